//! Single-view variant: low-rank learning of one anchor graph jointly with the
//! indicator factorization, i.e. the multi-view solver with the view weight
//! pinned to one.

use crate::error::Result;
use crate::solver::{self, AlphaStep, ClusteringResult, SolverConfig};
use crate::Matrix;

/// Minimizes `‖Z − S‖² + β‖Z‖_* + γ‖Z − F Gᵀ‖²` by the `F → G → Z` cycle.
///
/// Produces bit-identical output to [`solver::fit`] on a one-graph set with the
/// same configuration.
pub fn fit_single(s: &Matrix, config: &SolverConfig) -> Result<ClusteringResult> {
    solver::run(std::slice::from_ref(s), config, AlphaStep::Fixed)
}
