//! One-step multi-view clustering with adaptive low-rank anchor-graph learning.
//!
//! The pipeline runs in three stages:
//!
//! 1. [`anchors`] selects `m` anchors per view by k-means and builds a sparse,
//!    row-stochastic `n × m` anchor graph for every view.
//! 2. [`solver`] learns a low-rank consensus anchor graph `Z` jointly with a
//!    non-negative factorization `Z ≈ F Gᵀ` (`GᵀG = I`) and a simplex weight per
//!    view, by exact block coordinate descent.
//! 3. Hard labels are read off the soft indicator `F`; [`metrics`] scores them
//!    against ground truth.
//!
//! Every stage is linear in the number of samples `n`.

pub mod anchors;
pub mod dataset;
pub mod error;
pub mod graph_tools;
pub mod linalg;
pub mod metrics;
pub mod pipeline;
pub mod presets;
pub mod report;
pub mod single_view;
pub mod solver;

pub use anchors::{AnchorGraphSet, AnchorSet};
pub use dataset::MultiViewDataset;
pub use error::{Error, ErrorKind, Result, Warning};
pub use graph_tools::FullGraph;
pub use metrics::{ContingencyTable, Metrics};
pub use pipeline::{PipelineConfig, PipelineOutput};
pub use presets::Preset;
pub use single_view::fit_single;
pub use solver::{fit, ClusteringResult, SolverConfig, SolverState};

/// Dense column-major matrix used throughout the crate.
pub type Matrix = nalgebra::DMatrix<f64>;
