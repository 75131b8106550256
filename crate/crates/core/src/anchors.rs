//! Anchor selection (per-view k-means) and normalized k-NN anchor graphs.
//!
//! For sample `x` with anchors sorted by squared distance `φ₁ ≤ φ₂ ≤ …`, the
//! `j`-th nearest of the first `k` receives weight
//!
//! ```text
//! (φ_{k+1} − φ_j) / (k·φ_{k+1} − Σ_{h≤k} φ_h)
//! ```
//!
//! and every other anchor receives zero, so each row sums to one.

use std::collections::HashSet;
use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{self, MultiViewDataset, ViewFormat};
use crate::error::{Error, Result, Warning};
use crate::Matrix;

pub const DEFAULT_NEIGHBORS: usize = 5;
pub const DEFAULT_KMEANS_ITERS: usize = 100;
/// Relative center-shift tolerance of the Lloyd iterations.
pub const KMEANS_TOL: f64 = 1e-4;
pub const GRAPH_SIDECAR: &str = "anchors.json";

/// Row-sum tolerance accepted when validating externally supplied graphs.
const ROW_SUM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSet {
    /// One `m × d_v` matrix of anchors per view.
    pub anchors: Vec<Matrix>,
    pub m: usize,
    /// Lloyd iterations run for each view.
    pub kmeans_iters: Vec<usize>,
    pub warnings: Vec<Warning>,
}

/// One row-stochastic `n × m` anchor graph per view.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorGraphSet {
    graphs: Vec<Matrix>,
    k: usize,
    pub warnings: Vec<Warning>,
}

impl AnchorGraphSet {
    /// Validates externally built graphs: equal shapes, entries in `[0, 1]`,
    /// rows summing to one.
    pub fn new(graphs: Vec<Matrix>, k: usize) -> Result<Self> {
        let Some(first) = graphs.first() else {
            return Err(Error::InvalidDataset("no anchor graphs".into()));
        };
        let (n, m) = first.shape();
        if n == 0 || m == 0 {
            return Err(Error::InvalidDataset("empty anchor graph".into()));
        }
        for (v, s) in graphs.iter().enumerate() {
            if s.shape() != (n, m) {
                return Err(Error::InvalidDataset(format!(
                    "graph {v} is {}x{}, expected {n}x{m}",
                    s.nrows(),
                    s.ncols()
                )));
            }
            if let Some(bad) = s.iter().position(|&a| !(0.0..=1.0).contains(&a)) {
                return Err(Error::InvalidDataset(format!(
                    "graph {v} entry ({}, {}) outside [0, 1]",
                    bad % n,
                    bad / n
                )));
            }
            for (i, row) in s.row_iter().enumerate() {
                if (row.sum() - 1.0).abs() > ROW_SUM_TOL {
                    return Err(Error::InvalidDataset(format!(
                        "graph {v} row {i} sums to {}",
                        row.sum()
                    )));
                }
            }
        }
        Ok(Self {
            graphs,
            k,
            warnings: Vec::new(),
        })
    }

    pub fn graphs(&self) -> &[Matrix] {
        &self.graphs
    }

    pub fn n_views(&self) -> usize {
        self.graphs.len()
    }

    pub fn n(&self) -> usize {
        self.graphs[0].nrows()
    }

    pub fn m(&self) -> usize {
        self.graphs[0].ncols()
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Runs k-means (k-means++ seeding, Lloyd iterations) on every view
/// independently and returns the centers as anchors.
pub fn select_anchors(
    ds: &MultiViewDataset,
    m: usize,
    seed: u64,
    max_iters: usize,
) -> Result<AnchorSet> {
    if m == 0 || m > ds.n() {
        return Err(Error::InvalidParameter(format!(
            "anchor count must be in 1..={}, got {m}",
            ds.n()
        )));
    }
    if max_iters == 0 {
        return Err(Error::InvalidParameter(
            "k-means needs max_iters >= 1".into(),
        ));
    }
    let per_view: Vec<_> = ds
        .views()
        .par_iter()
        .enumerate()
        .map(|(v, x)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(v as u64);
            let distinct = count_distinct_rows(x);
            let warning = (distinct < m).then(|| {
                Warning::DegenerateView {
                    view: v,
                    distinct_rows: distinct,
                    m,
                }
                .emit()
            });
            let (centers, iters) = kmeans(x, m, max_iters, &mut rng);
            (centers, iters, warning)
        })
        .collect();
    let mut set = AnchorSet {
        anchors: Vec::with_capacity(per_view.len()),
        m,
        kmeans_iters: Vec::with_capacity(per_view.len()),
        warnings: Vec::new(),
    };
    for (centers, iters, warning) in per_view {
        set.anchors.push(centers);
        set.kmeans_iters.push(iters);
        set.warnings.extend(warning);
    }
    Ok(set)
}

fn count_distinct_rows(x: &Matrix) -> usize {
    let rows: HashSet<Vec<u64>> = x
        .row_iter()
        .map(|r| r.iter().map(|a| a.to_bits()).collect())
        .collect();
    rows.len()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Returns `(centers m×d, lloyd_iterations)`.
fn kmeans(x: &Matrix, m: usize, max_iters: usize, rng: &mut ChaCha8Rng) -> (Matrix, usize) {
    let n = x.nrows();
    let d = x.ncols();
    // Column i of `xt` is sample i, contiguous in memory.
    let xt = x.transpose();
    let point = |i: usize| xt.column(i).as_slice().to_vec();
    let sample = |i: usize| &xt.as_slice()[i * d..(i + 1) * d];

    // k-means++ seeding.
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(m);
    centers.push(point(rng.random_range(0..n)));
    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist(sample(i), &centers[0])).collect();
    while centers.len() < m {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random_range(0.0..total);
            let mut pick = n - 1;
            for (i, &w) in nearest.iter().enumerate() {
                if r < w {
                    pick = i;
                    break;
                }
                r -= w;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        let c = point(pick);
        for (i, best) in nearest.iter_mut().enumerate() {
            *best = best.min(sq_dist(sample(i), &c));
        }
        centers.push(c);
    }

    // Stop once centers move less than this (squared, summed), scaled by the
    // mean feature variance; exact assignment stability alone needs more
    // sweeps as n grows.
    let tol = KMEANS_TOL * mean_variance(x);
    let mut assign = vec![usize::MAX; n];
    let mut dist = vec![0.0; n];
    let mut iters = 0;
    while iters < max_iters {
        iters += 1;
        let mut changed = false;
        for i in 0..n {
            let xi = sample(i);
            let (best, best_d) = centers
                .iter()
                .enumerate()
                .map(|(j, c)| (j, sq_dist(xi, c)))
                .fold(
                    (0, f64::INFINITY),
                    |acc, cur| if cur.1 < acc.1 { cur } else { acc },
                );
            if assign[i] != best {
                assign[i] = best;
                changed = true;
            }
            dist[i] = best_d;
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; d]; m];
        let mut counts = vec![0usize; m];
        for i in 0..n {
            counts[assign[i]] += 1;
            for (s, &v) in sums[assign[i]].iter_mut().zip(sample(i)) {
                *s += v;
            }
        }
        let mut shift = 0.0;
        for j in 0..m {
            if counts[j] > 0 {
                let inv = 1.0 / counts[j] as f64;
                let moved: Vec<f64> = sums[j].iter().map(|s| s * inv).collect();
                shift += sq_dist(&moved, &centers[j]);
                centers[j] = moved;
            } else {
                shift = f64::INFINITY;
                // Empty cluster: move it onto the worst-served sample.
                let far = (0..n).fold(0, |best, i| if dist[i] > dist[best] { i } else { best });
                centers[j] = point(far);
                dist[far] = 0.0;
                assign[far] = usize::MAX;
            }
        }
        if shift <= tol {
            break;
        }
    }
    let flat: Vec<f64> = centers.into_iter().flatten().collect();
    (DMatrix::from_row_slice(m, d, &flat), iters)
}

fn mean_variance(x: &Matrix) -> f64 {
    let n = x.nrows() as f64;
    let total: f64 = x
        .column_iter()
        .map(|col| {
            let mean = col.sum() / n;
            col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
        })
        .sum();
    total / x.ncols().max(1) as f64
}

/// Normalized k-NN anchor graph of `x` (`n × d`) against `anchors` (`m × d`).
///
/// Requires `1 ≤ k < m`. Rows whose `k + 1` nearest anchors are all
/// equidistant get uniform weight `1/k` on the `k` nearest.
pub fn build_anchor_graph(x: &Matrix, anchors: &Matrix, k: usize) -> Result<Matrix> {
    build_graph_counted(x, anchors, k).map(|(s, _)| s)
}

fn build_graph_counted(x: &Matrix, anchors: &Matrix, k: usize) -> Result<(Matrix, usize)> {
    let m = anchors.nrows();
    if k == 0 || k >= m {
        return Err(Error::InvalidParameter(format!(
            "neighbor count k must satisfy 1 <= k < m = {m}, got {k}"
        )));
    }
    if x.ncols() != anchors.ncols() {
        return Err(Error::InvalidParameter(format!(
            "samples have {} features but anchors have {}",
            x.ncols(),
            anchors.ncols()
        )));
    }
    let d = x.ncols();
    let xt = x.transpose();
    let at = anchors.transpose();
    let mut s = DMatrix::zeros(x.nrows(), m);
    let mut phi = vec![0.0; m];
    let mut order: Vec<usize> = (0..m).collect();
    let mut degenerate = 0;
    for i in 0..x.nrows() {
        let xi = &xt.as_slice()[i * d..(i + 1) * d];
        for (j, p) in phi.iter_mut().enumerate() {
            *p = sq_dist(xi, &at.as_slice()[j * d..(j + 1) * d]);
        }
        order.iter_mut().enumerate().for_each(|(j, o)| *o = j);
        // Stable sort: equal distances keep anchor-index order.
        order.sort_by(|&a, &b| phi[a].total_cmp(&phi[b]));
        let cutoff = phi[order[k]];
        let head: f64 = order[..k].iter().map(|&j| phi[j]).sum();
        let denom = k as f64 * cutoff - head;
        if denom <= 4.0 * f64::EPSILON * k as f64 * cutoff {
            degenerate += 1;
            for &j in &order[..k] {
                s[(i, j)] = 1.0 / k as f64;
            }
        } else {
            for &j in &order[..k] {
                s[(i, j)] = (cutoff - phi[j]) / denom;
            }
        }
    }
    Ok((s, degenerate))
}

/// Builds every view's anchor graph from its own anchors, one view per worker.
pub fn build_all(ds: &MultiViewDataset, anchors: &AnchorSet, k: usize) -> Result<AnchorGraphSet> {
    if anchors.anchors.len() != ds.n_views() {
        return Err(Error::InvalidParameter(format!(
            "{} anchor matrices for {} views",
            anchors.anchors.len(),
            ds.n_views()
        )));
    }
    let built: Vec<(Matrix, usize)> = ds
        .views()
        .par_iter()
        .zip(anchors.anchors.par_iter())
        .map(|(x, c)| build_graph_counted(x, c, k))
        .collect::<Result<_>>()?;
    let mut graphs = Vec::with_capacity(built.len());
    let mut warnings = Vec::new();
    for (v, (s, degenerate)) in built.into_iter().enumerate() {
        if degenerate > 0 {
            warnings.push(
                Warning::DegenerateRows {
                    view: v,
                    rows: degenerate,
                }
                .emit(),
            );
        }
        graphs.push(s);
    }
    Ok(AnchorGraphSet {
        graphs,
        k,
        warnings,
    })
}

/// Parameters recorded next to cached graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphCacheInfo {
    pub m: usize,
    pub k: usize,
    pub seed: u64,
}

/// Writes the graphs as a dataset directory (one view file per graph) plus
/// an `anchors.json` sidecar.
pub fn save_graphs(set: &AnchorGraphSet, root: impl AsRef<Path>, seed: u64) -> Result<()> {
    let root = root.as_ref();
    let as_views = MultiViewDataset::new(set.graphs.clone(), None, Vec::new())?;
    dataset::save_dataset_as(&as_views, root, ViewFormat::Csv)?;
    let info = GraphCacheInfo {
        m: set.m(),
        k: set.k,
        seed,
    };
    dataset::write_json(&root.join(GRAPH_SIDECAR), &info)
}

pub fn load_graphs(root: impl AsRef<Path>) -> Result<(AnchorGraphSet, GraphCacheInfo)> {
    let root = root.as_ref();
    let sidecar = root.join(GRAPH_SIDECAR);
    let text = std::fs::read_to_string(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
    let info: GraphCacheInfo = serde_json::from_str(&text).map_err(|e| Error::MalformedMeta {
        file: sidecar.clone(),
        reason: e.to_string(),
    })?;
    let views = dataset::load_dataset(root)?;
    if views.dims().iter().any(|&d| d != info.m) {
        return Err(Error::MalformedMeta {
            file: sidecar,
            reason: format!("graphs do not all have m = {} columns", info.m),
        });
    }
    let set = AnchorGraphSet::new(views.views().to_vec(), info.k)?;
    Ok((set, info))
}
