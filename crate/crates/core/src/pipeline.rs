//! End-to-end clustering of a dataset: anchors, graphs, solver, metrics.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::anchors::{self, AnchorGraphSet, DEFAULT_KMEANS_ITERS, DEFAULT_NEIGHBORS};
use crate::dataset::MultiViewDataset;
use crate::error::{Error, Result, Warning};
use crate::metrics::{self, Metrics};
use crate::single_view::fit_single;
use crate::solver::{self, ClusteringResult, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    /// Anchors per view (`m`).
    pub anchors: usize,
    /// Nearest anchors per sample (`k`), clamped to `m − 1`.
    pub neighbors: usize,
    pub anchor_seed: u64,
    pub kmeans_iters: usize,
    /// Cluster only this view with the single-view solver.
    pub single_view: Option<usize>,
    /// Z-score every feature before building graphs.
    pub normalize: bool,
    pub solver: SolverConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            anchors: 30,
            neighbors: DEFAULT_NEIGHBORS,
            anchor_seed: 0,
            kmeans_iters: DEFAULT_KMEANS_ITERS,
            single_view: None,
            normalize: false,
            solver: SolverConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn effective_neighbors(&self) -> usize {
        self.neighbors.min(self.anchors.saturating_sub(1))
    }

    pub fn validate(&self) -> Result<()> {
        if self.anchors < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 anchors to build k-NN graphs, got {}",
                self.anchors
            )));
        }
        if self.neighbors == 0 {
            return Err(Error::InvalidParameter(
                "neighbors must be at least 1".into(),
            ));
        }
        if self.kmeans_iters == 0 {
            return Err(Error::InvalidParameter(
                "kmeans_iters must be at least 1".into(),
            ));
        }
        self.solver.validate()
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub graphs: AnchorGraphSet,
    pub result: ClusteringResult,
    pub build_seconds: f64,
    pub solve_seconds: f64,
    /// Scores against ground truth, when the dataset has labels.
    pub metrics: Option<Metrics>,
    pub warnings: Vec<Warning>,
}

/// Builds anchor graphs for `ds` (or the selected single view).
pub fn build_graphs(ds: &MultiViewDataset, config: &PipelineConfig) -> Result<AnchorGraphSet> {
    config.validate()?;
    let normalized;
    let ds = if config.normalize {
        normalized = ds.zscore();
        &normalized
    } else {
        ds
    };
    let selected;
    let ds = match config.single_view {
        Some(v) if v >= ds.n_views() => {
            return Err(Error::InvalidParameter(format!(
                "view {v} requested but the dataset has {} views",
                ds.n_views()
            )))
        }
        Some(v) => {
            selected = MultiViewDataset::new(
                vec![ds.view(v).clone()],
                ds.labels().map(<[usize]>::to_vec),
                vec![ds.view_names()[v].clone()],
            )?;
            &selected
        }
        None => ds,
    };
    let anchor_set =
        anchors::select_anchors(ds, config.anchors, config.anchor_seed, config.kmeans_iters)?;
    let mut graphs = anchors::build_all(ds, &anchor_set, config.effective_neighbors())?;
    let mut warnings = anchor_set.warnings;
    warnings.append(&mut graphs.warnings);
    graphs.warnings = warnings;
    Ok(graphs)
}

/// Fits prebuilt graphs. With `single_view` set the graph set must hold
/// exactly that one graph (as produced by [`build_graphs`]).
pub fn fit_graphs(graphs: &AnchorGraphSet, config: &PipelineConfig) -> Result<ClusteringResult> {
    match config.single_view {
        Some(_) if graphs.n_views() != 1 => Err(Error::InvalidParameter(format!(
            "single-view fit needs one graph, got {}",
            graphs.n_views()
        ))),
        Some(_) => fit_single(&graphs.graphs()[0], &config.solver),
        None => solver::fit(graphs, &config.solver),
    }
}

pub fn run(ds: &MultiViewDataset, config: &PipelineConfig) -> Result<PipelineOutput> {
    let start = Instant::now();
    let graphs = build_graphs(ds, config)?;
    let build_seconds = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let result = fit_graphs(&graphs, config)?;
    let solve_seconds = start.elapsed().as_secs_f64();
    let metrics = ds
        .labels()
        .map(|truth| metrics::evaluate(&result.labels, truth))
        .transpose()?;
    let mut warnings = graphs.warnings.clone();
    warnings.extend(result.warnings.iter().cloned());
    Ok(PipelineOutput {
        graphs,
        result,
        build_seconds,
        solve_seconds,
        metrics,
        warnings,
    })
}
