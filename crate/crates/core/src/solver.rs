//! Joint low-rank consensus-graph learning and indicator factorization.
//!
//! Given view graphs `S⁽ᵛ⁾` (`n × m`), the solver minimizes
//!
//! ```text
//! ‖Z − Σ_v α_v S⁽ᵛ⁾‖²_F + β‖Z‖_* + γ‖Z − F Gᵀ‖²_F
//!     s.t.  F ≥ 0,  GᵀG = I,  α ≥ 0,  Σ α = 1
//! ```
//!
//! by cycling over the blocks `F → G → Z → α`. Each block update is the exact
//! minimizer of its subproblem, so the objective never increases.

use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::anchors::AnchorGraphSet;
use crate::error::{Error, Result, Warning};
use crate::linalg;
use crate::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub n_clusters: usize,
    /// Nuclear-norm weight.
    pub beta: f64,
    /// Factorization weight.
    pub gamma: f64,
    pub max_iters: usize,
    /// Stop once the relative objective change falls below this.
    pub rel_tol: f64,
    pub seed: u64,
    pub qp_max_iters: usize,
    pub qp_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n_clusters: 2,
            beta: 0.2,
            gamma: 0.1,
            max_iters: 200,
            rel_tol: 1e-6,
            seed: 0,
            qp_max_iters: 1000,
            qp_tol: 1e-10,
        }
    }
}

impl SolverConfig {
    pub fn new(n_clusters: usize) -> Self {
        Self {
            n_clusters,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n_clusters == 0 {
            return fail("cluster count must be at least 1".into());
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return fail(format!("beta must be finite and >= 0, got {}", self.beta));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return fail(format!("gamma must be finite and >= 0, got {}", self.gamma));
        }
        if self.max_iters == 0 {
            return fail("max_iters must be at least 1".into());
        }
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return fail(format!("rel_tol must be positive, got {}", self.rel_tol));
        }
        if self.qp_max_iters == 0 || self.qp_tol.is_nan() || self.qp_tol <= 0.0 {
            return fail("qp_max_iters and qp_tol must be positive".into());
        }
        Ok(())
    }
}

/// Iteration cap and tolerance of the view-weight subproblem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpControls {
    pub max_iters: usize,
    pub tol: f64,
}

impl From<&SolverConfig> for QpControls {
    fn from(c: &SolverConfig) -> Self {
        Self {
            max_iters: c.qp_max_iters,
            tol: c.qp_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    /// Consensus anchor graph, `n × m`.
    pub z: Matrix,
    /// Non-negative soft indicator, `n × c`.
    pub f: Matrix,
    /// Column-orthonormal basis, `m × c`.
    pub g: Matrix,
    /// View weights on the probability simplex.
    pub alpha: Vec<f64>,
    /// Objective at initialization followed by one value per completed cycle.
    pub objective_history: Vec<f64>,
    pub iters_run: usize,
}

#[derive(Debug, Clone)]
pub struct ClusteringResult {
    pub labels: Vec<usize>,
    pub state: SolverState,
    /// Wall-clock seconds spent in the solver.
    pub elapsed: f64,
    pub converged: bool,
    pub warnings: Vec<Warning>,
}

impl ClusteringResult {
    pub fn final_objective(&self) -> f64 {
        *self
            .state
            .objective_history
            .last()
            .expect("history holds the initial objective")
    }
}

/// `Σ_v α_v S⁽ᵛ⁾`.
pub fn mix_graphs(graphs: &[Matrix], alpha: &[f64]) -> Matrix {
    let (n, m) = graphs[0].shape();
    let mut out = DMatrix::zeros(n, m);
    for (s, &a) in graphs.iter().zip(alpha) {
        out.zip_apply(s, |o, x| *o += a * x);
    }
    out
}

/// Even view weights, `Z` as their mixture, `F = |N(0,1)|` and `G` the
/// orthonormalized Q factor of an `m × c` normal draw.
pub fn init_state(graphs: &AnchorGraphSet, config: &SolverConfig) -> Result<SolverState> {
    init_from_slices(graphs.graphs(), config)
}

pub(crate) fn init_from_slices(graphs: &[Matrix], config: &SolverConfig) -> Result<SolverState> {
    config.validate()?;
    let Some(first) = graphs.first() else {
        return Err(Error::InvalidParameter("no anchor graphs".into()));
    };
    let (n, m) = first.shape();
    let c = config.n_clusters;
    if graphs.iter().any(|s| s.shape() != (n, m)) {
        return Err(Error::InvalidParameter(
            "anchor graphs differ in shape".into(),
        ));
    }
    if c > m {
        return Err(Error::InvalidParameter(format!(
            "{c} clusters need at least as many anchors, got m = {m}"
        )));
    }
    let v = graphs.len();
    let alpha = vec![1.0 / v as f64; v];
    let z = mix_graphs(graphs, &alpha);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let raw_g = DMatrix::from_fn(m, c, |_, _| StandardNormal.sample(&mut rng));
    let g = linalg::orthonormalize(&raw_g);
    let f = DMatrix::from_fn(n, c, |_, _| {
        let draw: f64 = StandardNormal.sample(&mut rng);
        draw.abs()
    });
    Ok(SolverState {
        z,
        f,
        g,
        alpha,
        objective_history: Vec::new(),
        iters_run: 0,
    })
}

/// `F = max(Z G, 0)`, the exact minimizer of `‖Z − F Gᵀ‖²` over `F ≥ 0` for
/// column-orthonormal `G`.
pub fn update_f(z: &Matrix, g: &Matrix) -> Matrix {
    (z * g).map(|a| a.max(0.0))
}

/// Orthogonal Procrustes step: `G = U Vᵀ` from the SVD of `W = ZᵀF`.
///
/// Returns the new `G` and the smallest singular value of `W`.
pub fn update_g(z: &Matrix, f: &Matrix) -> (Matrix, f64) {
    let w = z.transpose() * f;
    linalg::procrustes(&w)
}

/// Threshold applied to the singular values in the `Z` step.
pub fn z_threshold(beta: f64, gamma: f64) -> f64 {
    beta / (2.0 * (1.0 + gamma))
}

/// `Z = svt(M, β / (2(1+γ)))` with `M = (Σ α_v S⁽ᵛ⁾ + γ F Gᵀ) / (1 + γ)`.
pub fn update_z(
    graphs: &[Matrix],
    alpha: &[f64],
    f: &Matrix,
    g: &Matrix,
    beta: f64,
    gamma: f64,
) -> Matrix {
    let mut target = mix_graphs(graphs, alpha);
    if gamma != 0.0 {
        target.gemm(gamma, f, &g.transpose(), 1.0);
        target /= 1.0 + gamma;
    }
    linalg::svt(&target, z_threshold(beta, gamma))
}

/// Outcome of the view-weight subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaUpdate {
    pub alpha: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Size of the final projected step (∞-norm).
    pub last_step: f64,
}

/// Minimizes `αᵀ 𝕄 α − αᵀ 𝐦` over the simplex, with `𝕄_uv = ⟨S⁽ᵘ⁾, S⁽ᵛ⁾⟩`
/// and `𝐦_v = 2⟨S⁽ᵛ⁾, Z⟩`, by projected gradient descent from `start`.
///
/// The step is `1/L` with `L = 2 λ_max(𝕄)`, so every iterate is no worse than
/// the previous one.
pub fn update_alpha(
    graphs: &[Matrix],
    z: &Matrix,
    start: &[f64],
    controls: QpControls,
) -> AlphaUpdate {
    let v = graphs.len();
    assert_eq!(start.len(), v, "start point has wrong dimension");
    if v == 1 {
        return AlphaUpdate {
            alpha: vec![1.0],
            iterations: 0,
            converged: true,
            last_step: 0.0,
        };
    }
    let gram = DMatrix::from_fn(v, v, |a, b| graphs[a].dot(&graphs[b]));
    let linear: Vec<f64> = graphs.iter().map(|s| 2.0 * s.dot(z)).collect();
    solve_simplex_qp(&gram, &linear, start, controls)
}

/// Projected gradient for `min xᵀ Q x − xᵀ b` on the simplex (`Q` PSD).
pub fn solve_simplex_qp(
    quad: &Matrix,
    linear: &[f64],
    start: &[f64],
    controls: QpControls,
) -> AlphaUpdate {
    let v = linear.len();
    let lipschitz = 2.0 * SymmetricEigen::new(quad.clone()).eigenvalues.max();
    let mut x = linalg::project_simplex(start);
    if lipschitz.is_nan() || lipschitz <= 0.0 {
        return AlphaUpdate {
            alpha: x,
            iterations: 0,
            converged: true,
            last_step: 0.0,
        };
    }
    let step = 1.0 / lipschitz;
    let mut last_step = f64::INFINITY;
    for it in 1..=controls.max_iters {
        let trial: Vec<f64> = (0..v)
            .map(|a| {
                let grad = 2.0 * (0..v).map(|b| quad[(a, b)] * x[b]).sum::<f64>() - linear[a];
                x[a] - step * grad
            })
            .collect();
        let next = linalg::project_simplex(&trial);
        last_step = next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        x = next;
        if last_step < controls.tol {
            return AlphaUpdate {
                alpha: x,
                iterations: it,
                converged: true,
                last_step,
            };
        }
    }
    AlphaUpdate {
        alpha: x,
        iterations: controls.max_iters,
        converged: false,
        last_step,
    }
}

/// Value of the clustering objective at the given variables.
pub fn objective_value(
    graphs: &[Matrix],
    z: &Matrix,
    f: &Matrix,
    g: &Matrix,
    alpha: &[f64],
    beta: f64,
    gamma: f64,
) -> f64 {
    let fit = (z - mix_graphs(graphs, alpha)).norm_squared();
    let low_rank = if beta == 0.0 {
        0.0
    } else {
        beta * linalg::nuclear_norm(z)
    };
    let factor = if gamma == 0.0 {
        0.0
    } else {
        gamma * (z - f * g.transpose()).norm_squared()
    };
    fit + low_rank + factor
}

pub fn objective(state: &SolverState, graphs: &AnchorGraphSet, config: &SolverConfig) -> f64 {
    objective_value(
        graphs.graphs(),
        &state.z,
        &state.f,
        &state.g,
        &state.alpha,
        config.beta,
        config.gamma,
    )
}

/// Row-wise argmax of `F`, lowest column index on ties.
pub fn labels_from_f(f: &Matrix) -> Vec<usize> {
    f.row_iter()
        .map(|row| {
            let mut best = 0;
            for j in 1..row.len() {
                if row[j] > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// Whether the view weights are learned or held at their initial value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum AlphaStep {
    Learn,
    Fixed,
}

/// Runs the full alternating scheme and labels samples by the argmax of `F`.
pub fn fit(graphs: &AnchorGraphSet, config: &SolverConfig) -> Result<ClusteringResult> {
    run(graphs.graphs(), config, AlphaStep::Learn)
}

pub(crate) fn run(
    graphs: &[Matrix],
    config: &SolverConfig,
    alpha_step: AlphaStep,
) -> Result<ClusteringResult> {
    let start = Instant::now();
    let mut state = init_from_slices(graphs, config)?;
    let mut warnings = Vec::new();
    let qp = QpControls::from(config);
    let eval = |s: &SolverState| {
        objective_value(
            graphs,
            &s.z,
            &s.f,
            &s.g,
            &s.alpha,
            config.beta,
            config.gamma,
        )
    };
    let initial = eval(&state);
    if !initial.is_finite() {
        return Err(Error::NumericalBreakdown { iteration: 0 });
    }
    state.objective_history.push(initial);
    let mut converged = false;
    for iteration in 1..=config.max_iters {
        state.f = update_f(&state.z, &state.g);
        let (g, sigma_min) = update_g(&state.z, &state.f);
        if sigma_min < 1e-12 {
            warnings.push(
                Warning::RankDeficientW {
                    iteration,
                    sigma_min,
                }
                .emit(),
            );
        }
        state.g = g;
        state.z = update_z(
            graphs,
            &state.alpha,
            &state.f,
            &state.g,
            config.beta,
            config.gamma,
        );
        if alpha_step == AlphaStep::Learn {
            let upd = update_alpha(graphs, &state.z, &state.alpha, qp);
            if !upd.converged {
                warnings.push(
                    Warning::QpNotConverged {
                        iteration,
                        step: upd.last_step,
                    }
                    .emit(),
                );
            }
            state.alpha = upd.alpha;
        }
        state.iters_run = iteration;
        let value = eval(&state);
        if !value.is_finite() {
            return Err(Error::NumericalBreakdown { iteration });
        }
        let previous = *state.objective_history.last().expect("non-empty history");
        state.objective_history.push(value);
        if (previous - value).abs() / previous.max(1e-12) < config.rel_tol {
            converged = true;
            break;
        }
    }
    Ok(ClusteringResult {
        labels: labels_from_f(&state.f),
        state,
        elapsed: start.elapsed().as_secs_f64(),
        converged,
        warnings,
    })
}
