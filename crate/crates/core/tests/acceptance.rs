//! Acceptance suite. Runs every criterion sequentially (timing criteria must
//! not share the machine with other tests) and prints one PASS/FAIL line each.
//!
//! Criterion 10 needs an externally prepared Coil dataset directory in
//! `OMCAL_COIL_DIR`; without it the criterion reports SKIP.

use std::io::Write;
use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use omcal_core::anchors::{build_all, select_anchors, AnchorGraphSet};
use omcal_core::dataset::{load_dataset, synth_blobs, BlobSpec};
use omcal_core::graph_tools::reconstruct_full_graph;
use omcal_core::linalg::{orthonormality_error, orthonormalize, svt};
use omcal_core::metrics::{accuracy, ari, nmi, pairwise_f_precision};
use omcal_core::pipeline::{self, PipelineConfig};
use omcal_core::solver::{
    self, objective_value, update_alpha, update_f, update_g, QpControls, SolverConfig,
};
use omcal_core::{fit_single, presets, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// Row-stochastic matrix with `k` random non-zeros per row.
fn random_graph(n: usize, m: usize, k: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut s = DMatrix::zeros(n, m);
    for i in 0..n {
        let mut cols: Vec<usize> = (0..m).collect();
        for j in 0..k {
            let pick = rng.random_range(j..m);
            cols.swap(j, pick);
        }
        let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = w.iter().sum();
        for (&j, wj) in cols[..k].iter().zip(&w) {
            s[(i, j)] = wj / total;
        }
    }
    s
}

fn blob_graphs(spec: &BlobSpec, m: usize, k: usize, seed: u64) -> AnchorGraphSet {
    let ds = synth_blobs(spec).unwrap();
    let anchors = select_anchors(&ds, m, seed, 100).unwrap();
    build_all(&ds, &anchors, k).unwrap()
}

// 1. Monotone descent over 100 seeded runs.
fn monotone_descent() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut cycles = 0;
    let mut worst_rise = f64::NEG_INFINITY;
    for run in 0..100u64 {
        let c = rng.random_range(2..5);
        let views = rng.random_range(1..4);
        let spec = BlobSpec {
            n: rng.random_range(80..200),
            n_clusters: c,
            dims: (0..views).map(|_| rng.random_range(2..8)).collect(),
            separation: rng.random_range(1.0..6.0),
            noise: rng.random_range(0.2..1.5),
            seed: run,
        };
        let m = rng.random_range(c + 2..16);
        let graphs = blob_graphs(&spec, m, rng.random_range(1..m.min(6)), run);
        let cfg = SolverConfig {
            beta: rng.random_range(0.05..1.0),
            gamma: 10f64.powf(rng.random_range(-5.0..0.0)),
            seed: run,
            ..SolverConfig::new(c)
        };
        let res = solver::fit(&graphs, &cfg).map_err(|e| format!("run {run}: {e}"))?;
        for (t, w) in res.state.objective_history.windows(2).enumerate() {
            worst_rise = worst_rise.max(w[1] - w[0]);
            ensure(w[1] <= w[0] + 1e-9, || {
                format!(
                    "run {run} cycle {}: objective rose {} -> {}",
                    t + 1,
                    w[0],
                    w[1]
                )
            })?;
        }
        let st = &res.state;
        ensure(st.f.iter().all(|&a| a >= 0.0), || {
            format!("run {run}: F < 0")
        })?;
        ensure(orthonormality_error(&st.g) < 1e-8, || {
            format!("run {run}: GᵀG != I")
        })?;
        let sum: f64 = st.alpha.iter().sum();
        ensure(
            st.alpha.iter().all(|&a| a >= 0.0) && (sum - 1.0).abs() < 1e-12,
            || format!("run {run}: alpha {:?} off the simplex", st.alpha),
        )?;
        cycles += st.iters_run;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s (limit 60s)"))?;
    Ok(format!(
        "100 runs, {cycles} cycles, largest change {worst_rise:.2e}, {secs:.1}s"
    ))
}

/// Nuclear norm as the sum of positive eigenvalues of `[[0, W], [Wᵀ, 0]]`.
fn nuclear_norm_oracle(w: &Matrix) -> f64 {
    let (r, c) = w.shape();
    let mut aug = DMatrix::zeros(r + c, r + c);
    aug.view_mut((0, r), (r, c)).copy_from(w);
    aug.view_mut((r, 0), (c, r)).copy_from(&w.transpose());
    SymmetricEigen::new(aug)
        .eigenvalues
        .iter()
        .filter(|&&e| e > 0.0)
        .sum()
}

fn g_update_oracle(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for t in 0..50 {
        let n = rng.random_range(5..40);
        let m = rng.random_range(2..12);
        let c = rng.random_range(1..=m);
        let z = random_graph(n, m, rng.random_range(1..=m), rng);
        let f = random(n, c, rng).map(f64::abs);
        let (g, _) = update_g(&z, &f);
        let w = z.transpose() * &f;
        let gap = ((g.transpose() * &w).trace() - nuclear_norm_oracle(&w)).abs();
        worst = worst.max(gap);
        ensure(gap < 1e-8, || format!("G instance {t}: trace gap {gap:e}"))?;
        ensure(orthonormality_error(&g) < 1e-10, || {
            format!("G instance {t}: not orthonormal")
        })?;
    }
    Ok(worst)
}

/// Worst violation of `M − Z ∈ τ ∂‖Z‖_*` for `Z = svt(M, τ)`.
fn svt_kkt_residual(m: &Matrix, tau: f64) -> f64 {
    let z = svt(m, tau);
    // Right singular vectors of Z from the eigenvectors of ZᵀZ; U₁ = Z V₁ Σ⁻¹.
    let eig = SymmetricEigen::new(z.transpose() * &z);
    let scale = eig.eigenvalues.max().max(1.0);
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > 1e-12 * scale)
        .collect();
    let v1 = eig.eigenvectors.select_columns(&keep);
    let mut u1 = &z * &v1;
    for (col, &i) in keep.iter().enumerate() {
        u1.column_mut(col).unscale_mut(eig.eigenvalues[i].sqrt());
    }
    // M − Z = τ (U₁V₁ᵀ + W) with W orthogonal to both singular subspaces and ‖W‖₂ ≤ 1.
    let rest = m - &z - (&u1 * v1.transpose()) * tau;
    let on_subspace = (u1.transpose() * &rest).amax().max((&rest * &v1).amax());
    let spectral = rest.svd(false, false).singular_values.max();
    on_subspace.max((spectral - tau).max(0.0))
}

fn svt_oracle(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for t in 0..50 {
        let rows = rng.random_range(2..30);
        let cols = rng.random_range(2..10);
        let m = random(rows, cols, rng) * rng.random_range(0.5..5.0);
        let top = m.clone().svd(false, false).singular_values.max();
        let tau = rng.random_range(0.0..top);
        let res = svt_kkt_residual(&m, tau);
        worst = worst.max(res);
        ensure(res < 1e-8, || {
            format!("svt instance {t}: KKT residual {res:e}")
        })?;
    }
    Ok(worst)
}

/// Exhaustive minimization of `αᵀQα − αᵀb` on a simplex grid of step 1e-3.
fn alpha_grid_oracle(quad: &Matrix, lin: &[f64]) -> Vec<f64> {
    let steps = 1000;
    let h = 1.0 / steps as f64;
    let value = |a: &[f64]| {
        let mut v = 0.0;
        for i in 0..a.len() {
            for j in 0..a.len() {
                v += a[i] * quad[(i, j)] * a[j];
            }
            v -= a[i] * lin[i];
        }
        v
    };
    let mut best = (f64::INFINITY, Vec::new());
    match lin.len() {
        2 => {
            for i in 0..=steps {
                let a = [i as f64 * h, (steps - i) as f64 * h];
                let v = value(&a);
                if v < best.0 {
                    best = (v, a.to_vec());
                }
            }
        }
        3 => {
            for i in 0..=steps {
                for j in 0..=steps - i {
                    let a = [i as f64 * h, j as f64 * h, (steps - i - j) as f64 * h];
                    let v = value(&a);
                    if v < best.0 {
                        best = (v, a.to_vec());
                    }
                }
            }
        }
        _ => unreachable!("grid oracle covers V <= 3"),
    }
    best.1
}

fn alpha_oracle(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let qp = QpControls::from(&SolverConfig::default());
    let mut worst: f64 = 0.0;
    for t in 0..50 {
        let views = 2 + t % 2;
        let n = rng.random_range(10..40);
        let m = rng.random_range(4..10);
        let graphs: Vec<Matrix> = (0..views).map(|_| random_graph(n, m, 2, rng)).collect();
        let weights: Vec<f64> = (0..views).map(|_| rng.random_range(0.0..1.0)).collect();
        let mut z = solver::mix_graphs(&graphs, &weights);
        z += random(n, m, rng) * 0.05;
        let start = vec![1.0 / views as f64; views];
        let got = update_alpha(&graphs, &z, &start, qp).alpha;
        let quad = DMatrix::from_fn(views, views, |a, b| graphs[a].dot(&graphs[b]));
        let lin: Vec<f64> = graphs.iter().map(|s| 2.0 * s.dot(&z)).collect();
        let grid = alpha_grid_oracle(&quad, &lin);
        let dist = got
            .iter()
            .zip(&grid)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(dist);
        ensure(dist <= 1e-3, || {
            format!("alpha instance {t}: {got:?} vs grid {grid:?}")
        })?;
    }
    // Frobenius-orthogonal graphs with Z equal to the first: optimum at a vertex.
    let mut s1 = DMatrix::zeros(4, 4);
    let mut s2 = DMatrix::zeros(4, 4);
    for i in 0..4 {
        s1[(i, i % 2)] = 1.0;
        s2[(i, 2 + i % 2)] = 1.0;
    }
    let got = update_alpha(&[s1.clone(), s2], &s1, &[0.5, 0.5], qp).alpha;
    ensure((got[0] - 1.0).abs() <= 1e-3, || {
        format!("orthogonal case gave {got:?}")
    })?;
    Ok(worst)
}

fn f_oracle(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for t in 0..50 {
        let n = rng.random_range(3..15);
        let m = rng.random_range(2..8);
        let c = rng.random_range(1..=m);
        let z = random(n, m, rng);
        let g = orthonormalize(&random(m, c, rng));
        let f = update_f(&z, &g);
        let loss = |f: &Matrix| (&z - f * g.transpose()).norm_squared();
        let best = loss(&f);
        for _ in 0..1000 {
            let scale = 10f64.powf(rng.random_range(-4.0..0.0));
            let probe = f.map(|a| (a + scale * rng.random_range(-1.0..1.0)).max(0.0));
            let val = loss(&probe);
            ensure(best <= val, || {
                format!("F instance {t}: probe {val} < {best}")
            })?;
        }
    }
    Ok(())
}

// 2. Block-update oracles.
fn block_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = g_update_oracle(&mut rng)?;
    let s = svt_oracle(&mut rng)?;
    let a = alpha_oracle(&mut rng)?;
    f_oracle(&mut rng)?;
    Ok(format!(
        "G trace gap {g:.1e}, SVT KKT {s:.1e}, alpha grid distance {a:.1e}, F beats 50k probes"
    ))
}

// 3. Convergence speed with default settings.
fn convergence_speed() -> Outcome {
    let ds = synth_blobs(&BlobSpec {
        n: 1000,
        n_clusters: 5,
        dims: vec![10, 20],
        separation: 5.0,
        noise: 1.0,
        seed: 3,
    })
    .unwrap();
    let cfg = PipelineConfig {
        solver: SolverConfig::new(5),
        ..PipelineConfig::default()
    };
    let out = pipeline::run(&ds, &cfg).map_err(|e| e.to_string())?;
    let iters = out.result.state.iters_run;
    ensure(out.result.converged && iters <= 100, || {
        format!(
            "converged={} after {iters} iterations",
            out.result.converged
        )
    })?;
    Ok(format!("converged in {iters} iterations"))
}

// 4. Clustering quality on separated blobs.
fn clustering_quality() -> Outcome {
    let ds = synth_blobs(&BlobSpec {
        n: 300,
        n_clusters: 3,
        dims: vec![4, 6],
        separation: 10.0,
        noise: 0.1,
        seed: 4,
    })
    .unwrap();
    let cfg = PipelineConfig {
        anchors: 10,
        neighbors: 3,
        solver: SolverConfig {
            beta: 0.2,
            gamma: 0.1,
            ..SolverConfig::new(3)
        },
        ..PipelineConfig::default()
    };
    let start = Instant::now();
    let out = pipeline::run(&ds, &cfg).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let m = out.metrics.expect("synthetic data has labels");
    ensure(m.acc >= 0.95 && m.nmi >= 0.85 && secs < 2.0, || {
        format!("ACC {:.3}, NMI {:.3}, {secs:.3}s", m.acc, m.nmi)
    })?;
    Ok(format!("ACC {:.3}, NMI {:.3}, {secs:.3}s", m.acc, m.nmi))
}

// 5. Wall-clock grows at most ~linearly in n.
fn linearity() -> Outcome {
    let total = |n: usize| -> Result<f64, String> {
        let ds = synth_blobs(&BlobSpec {
            n,
            n_clusters: 5,
            dims: vec![20],
            separation: 4.0,
            noise: 1.0,
            seed: 5,
        })
        .unwrap();
        let cfg = PipelineConfig {
            anchors: 30,
            solver: SolverConfig::new(5),
            ..PipelineConfig::default()
        };
        // Best of three to damp scheduler noise.
        let mut best = f64::INFINITY;
        for _ in 0..3 {
            let start = Instant::now();
            pipeline::run(&ds, &cfg).map_err(|e| e.to_string())?;
            best = best.min(start.elapsed().as_secs_f64());
        }
        Ok(best)
    };
    let small = total(5_000)?;
    let large = total(20_000)?;
    let ratio = large / small;
    ensure(ratio <= 6.0, || {
        format!("n=5000 {small:.3}s, n=20000 {large:.3}s, ratio {ratio:.2} > 6")
    })?;
    Ok(format!(
        "n=5000 {small:.3}s, n=20000 {large:.3}s, ratio {ratio:.2}"
    ))
}

fn brute_force_accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    let cp = pred.iter().max().unwrap() + 1;
    let ct = truth.iter().max().unwrap() + 1;
    let size = cp.max(ct);
    let mut perm: Vec<usize> = (0..size).collect();
    let mut best = 0;
    // Heap's algorithm over all cluster-to-class maps.
    fn visit(k: usize, perm: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if k == 1 {
            f(perm);
            return;
        }
        for i in 0..k {
            visit(k - 1, perm, f);
            let j = if k & 1 == 0 { i } else { 0 };
            perm.swap(j, k - 1);
        }
    }
    visit(size, &mut perm, &mut |p| {
        let hits = pred.iter().zip(truth).filter(|(&a, &b)| p[a] == b).count();
        best = best.max(hits);
    });
    best as f64 / pred.len() as f64
}

/// `(co-clustered in both, in pred, in truth, total)` by direct enumeration.
fn enumerate_pairs(pred: &[usize], truth: &[usize]) -> (i128, i128, i128, i128) {
    let (mut both, mut p, mut t, mut total) = (0, 0, 0, 0);
    for i in 0..pred.len() {
        for j in i + 1..pred.len() {
            let sp = pred[i] == pred[j];
            let st = truth[i] == truth[j];
            both += (sp && st) as i128;
            p += sp as i128;
            t += st as i128;
            total += 1;
        }
    }
    (both, p, t, total)
}

// 6. Metric oracles with exact equality.
fn metric_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let draw = |rng: &mut ChaCha8Rng, n: usize, max_c: usize| -> Vec<usize> {
        let c = rng.random_range(1..=max_c);
        (0..n).map(|_| rng.random_range(0..c)).collect()
    };
    for t in 0..200 {
        let n = rng.random_range(1..=10);
        let pred = draw(&mut rng, n, 4);
        let truth = draw(&mut rng, n, 4);
        let got = accuracy(&pred, &truth).unwrap();
        let want = brute_force_accuracy(&pred, &truth);
        ensure(got == want, || format!("ACC trial {t}: {got} vs {want}"))?;
    }
    for t in 0..200 {
        let n = rng.random_range(2..=12);
        let pred = draw(&mut rng, n, 5);
        let truth = draw(&mut rng, n, 5);
        let (both, p, tr, total) = enumerate_pairs(&pred, &truth);
        // Rand-index adjusted for chance, from raw pair counts.
        let num = 2 * (total * both - p * tr);
        let den = total * (p + tr) - 2 * p * tr;
        let want_ari = if den == 0 {
            1.0
        } else {
            num as f64 / den as f64
        };
        let got_ari = ari(&pred, &truth).unwrap();
        ensure(got_ari == want_ari, || {
            format!("ARI trial {t}: {got_ari} vs {want_ari}")
        })?;
        let want_p = if p == 0 { 0.0 } else { both as f64 / p as f64 };
        let want_f = if p + tr == 0 {
            0.0
        } else {
            (2 * both) as f64 / (p + tr) as f64
        };
        let (got_f, got_p) = pairwise_f_precision(&pred, &truth).unwrap();
        ensure(got_p == want_p && got_f == want_f, || {
            format!("F/P trial {t}: ({got_f}, {got_p}) vs ({want_f}, {want_p})")
        })?;
        let sym = nmi(&pred, &truth).unwrap() - nmi(&truth, &pred).unwrap();
        ensure(sym.abs() < 1e-12, || format!("NMI trial {t} asymmetric"))?;
    }
    Ok("400 ACC/ARI/F/P trials exact".into())
}

// 7. Anchor-graph contract.
fn anchor_graph_contract() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut rows = 0;
    for t in 0..100u64 {
        let views = rng.random_range(1..4);
        let n = rng.random_range(20..120);
        let spec = BlobSpec {
            n,
            n_clusters: rng.random_range(1..5),
            dims: (0..views).map(|_| rng.random_range(1..6)).collect(),
            separation: rng.random_range(0.5..5.0),
            noise: rng.random_range(0.1..2.0),
            seed: t,
        };
        let m = rng.random_range(2..20);
        let k = rng.random_range(1..m);
        let graphs = blob_graphs(&spec, m, k, t);
        for (v, s) in graphs.graphs().iter().enumerate() {
            for (i, row) in s.row_iter().enumerate() {
                let sum = row.sum();
                let nnz = row.iter().filter(|&&w| w != 0.0).count();
                ensure((sum - 1.0).abs() <= 1e-10 && nnz == k.min(m), || {
                    format!("instance {t} view {v} row {i}: sum {sum}, {nnz} non-zeros, k={k}")
                })?;
                rows += 1;
            }
        }
    }
    Ok(format!("{rows} rows checked"))
}

// 8. Full-graph reconstruction against a naive triple loop.
fn graph_reconstruction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for t in 0..50 {
        let n = rng.random_range(1..=50);
        let m = rng.random_range(2..12);
        let s = random_graph(n, m, rng.random_range(1..=m), &mut rng);
        let full = reconstruct_full_graph(&s).map_err(|e| e.to_string())?;
        let d: Vec<f64> = (0..m).map(|j| (0..n).map(|i| s[(i, j)]).sum()).collect();
        for i in 0..n {
            for j in 0..n {
                let mut naive = 0.0;
                for a in 0..m {
                    if d[a] > 0.0 {
                        naive += s[(i, a)] * s[(j, a)] / d[a];
                    }
                }
                worst = worst.max((full.b[(i, j)] - naive).abs());
            }
            let row_sum = full.b.row(i).sum();
            ensure((row_sum - 1.0).abs() < 1e-8, || {
                format!("instance {t} row {i} sums to {row_sum}")
            })?;
        }
        ensure(full.b == full.b.transpose(), || {
            format!("instance {t}: B not symmetric")
        })?;
        ensure(full.b.iter().all(|&x| x >= 0.0), || {
            format!("instance {t}: B negative")
        })?;
    }
    ensure(worst < 1e-12, || {
        format!("max deviation from naive {worst:e}")
    })?;
    Ok(format!("max deviation {worst:.1e}"))
}

// 9. Single-view path equals the multi-view path on one graph.
fn single_view_equivalence() -> Outcome {
    let graphs = blob_graphs(
        &BlobSpec {
            n: 150,
            n_clusters: 3,
            dims: vec![5],
            separation: 4.0,
            noise: 1.0,
            seed: 9,
        },
        12,
        4,
        9,
    );
    for seed in 0..20 {
        let cfg = SolverConfig {
            seed,
            beta: 0.3,
            gamma: 0.05,
            ..SolverConfig::new(3)
        };
        let single = fit_single(&graphs.graphs()[0], &cfg).map_err(|e| e.to_string())?;
        let multi = solver::fit(&graphs, &cfg).map_err(|e| e.to_string())?;
        ensure(
            single.labels == multi.labels && single.state == multi.state,
            || format!("seed {seed}: outputs differ"),
        )?;
        let direct = objective_value(
            graphs.graphs(),
            &single.state.z,
            &single.state.f,
            &single.state.g,
            &[1.0],
            cfg.beta,
            cfg.gamma,
        );
        ensure(direct == single.final_objective(), || {
            format!("seed {seed}: objective mismatch")
        })?;
    }
    Ok("20 seeds bit-identical".into())
}

// 10. Optional Coil run with its preset.
fn coil_preset() -> Option<Outcome> {
    let dir = std::env::var_os("OMCAL_COIL_DIR")?;
    let preset = presets::find("coil").unwrap();
    Some((|| {
        let ds = load_dataset(&dir).map_err(|e| e.to_string())?;
        let cfg = PipelineConfig {
            anchors: preset.anchors,
            solver: SolverConfig {
                beta: preset.beta,
                gamma: preset.gamma,
                ..SolverConfig::new(preset.n_clusters)
            },
            ..PipelineConfig::default()
        };
        let out = pipeline::run(&ds, &cfg).map_err(|e| e.to_string())?;
        let acc = out.metrics.ok_or("Coil dataset has no labels")?.acc;
        // Reported rather than enforced: preprocessing of the source data is unknown.
        let note = if acc >= 0.95 {
            "meets 0.95"
        } else {
            "below 0.95 (reported only)"
        };
        Ok(format!("ACC {acc:.3}, {note}"))
    })())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("AC1 monotone descent", monotone_descent),
        ("AC2 block-update oracles", block_oracles),
        ("AC3 convergence speed", convergence_speed),
        ("AC4 clustering quality", clustering_quality),
        ("AC5 linear scaling", linearity),
        ("AC6 metric oracles", metric_oracles),
        ("AC7 anchor-graph contract", anchor_graph_contract),
        ("AC8 graph reconstruction", graph_reconstruction),
        ("AC9 single-view equivalence", single_view_equivalence),
    ];
    // Written to stderr directly so the lines show without --nocapture.
    let mut err = std::io::stderr();
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => writeln!(err, "PASS {name}: {detail}").unwrap(),
            Err(detail) => {
                failed += 1;
                writeln!(err, "FAIL {name}: {detail}").unwrap();
            }
        }
    }
    match coil_preset() {
        None => writeln!(err, "SKIP AC10 coil preset: OMCAL_COIL_DIR not set").unwrap(),
        Some(Ok(detail)) => writeln!(err, "PASS AC10 coil preset: {detail}").unwrap(),
        Some(Err(detail)) => writeln!(err, "INFO AC10 coil preset: {detail}").unwrap(),
    }
    if failed > 0 {
        writeln!(err, "{failed} acceptance criteria failed").unwrap();
        std::process::exit(1);
    }
}
