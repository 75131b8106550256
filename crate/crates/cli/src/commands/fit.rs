use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use omcal_core::anchors::{load_graphs, save_graphs, AnchorGraphSet};
use omcal_core::dataset::{load_dataset, write_labels, write_matrix, ViewFormat};
use omcal_core::report::{convergence_points, write_csv, write_fit_report, FitReport};
use omcal_core::{metrics, pipeline, MultiViewDataset};

use crate::args::FitArgs;
use crate::config::RunConfig;
use crate::error::{CliError, Stage};

pub const LABELS_FILE: &str = "labels.txt";
pub const RESULTS_FILE: &str = "results.json";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const CONSENSUS_FILE: &str = "consensus.csv";

pub fn run(args: &FitArgs) -> Result<FitReport, CliError> {
    let mut cfg = RunConfig::resolve(&args.run)?;
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }
    cfg.cache_graphs |= args.cache_graphs;
    cfg.write_consensus |= args.write_consensus;
    fit(&cfg)
}

pub fn fit(cfg: &RunConfig) -> Result<FitReport, CliError> {
    let out = cfg
        .out
        .as_deref()
        .ok_or_else(|| CliError::Config("no output directory given (--out)".into()))?;
    let ds = load_dataset(cfg.data_dir()?).stage("dataset")?;

    let start = Instant::now();
    let graphs = if cfg.cache_graphs {
        cached_graphs(&ds, cfg, out)?
    } else {
        pipeline::build_graphs(&ds, &cfg.pipeline()).stage("anchors")?
    };
    let build_seconds = start.elapsed().as_secs_f64();

    let result = pipeline::fit_graphs(&graphs, &cfg.pipeline()).stage("solver")?;
    let scores = ds
        .labels()
        .map(|truth| metrics::evaluate(&result.labels, truth))
        .transpose()
        .stage("metrics")?;

    fs::create_dir_all(out).map_err(|e| CliError::Config(format!("{}: {e}", out.display())))?;
    write_labels(&out.join(LABELS_FILE), &result.labels).stage("output")?;
    let history = convergence_points(&result.state.objective_history);
    write_csv(&out.join(CONVERGENCE_FILE), &history).stage("output")?;
    if cfg.write_consensus {
        write_matrix(&out.join(CONSENSUS_FILE), &result.state.z, ViewFormat::Csv)
            .stage("output")?;
    }
    let warnings = graphs
        .warnings
        .iter()
        .chain(&result.warnings)
        .map(ToString::to_string)
        .collect();
    let report = FitReport {
        labels_path: LABELS_FILE.into(),
        n: ds.n(),
        n_views: graphs.n_views(),
        anchors: graphs.m(),
        neighbors: graphs.k(),
        single_view: cfg.single_view.is_some(),
        alpha: result.state.alpha.clone(),
        final_objective: result.final_objective(),
        iters: result.state.iters_run,
        converged: result.converged,
        elapsed_seconds: result.elapsed,
        build_seconds,
        solver: cfg.solver.clone(),
        metrics: scores,
        warnings,
    };
    write_fit_report(&out.join(RESULTS_FILE), &report).stage("output")?;
    Ok(report)
}

/// Graph cache directory; the name encodes everything the graphs depend on.
fn cache_dir(cfg: &RunConfig, out: &Path) -> PathBuf {
    let p = cfg.pipeline();
    let mut name = format!(
        "graphs-m{}-k{}-s{}",
        p.anchors,
        p.effective_neighbors(),
        p.anchor_seed
    );
    if cfg.normalize {
        name.push_str("-z");
    }
    if let Some(v) = cfg.single_view {
        name.push_str(&format!("-view{v}"));
    }
    out.join(name)
}

fn cached_graphs(
    ds: &MultiViewDataset,
    cfg: &RunConfig,
    out: &Path,
) -> Result<AnchorGraphSet, CliError> {
    let dir = cache_dir(cfg, out);
    let p = cfg.pipeline();
    let views = if cfg.single_view.is_some() {
        1
    } else {
        ds.n_views()
    };
    if dir.exists() {
        match load_graphs(&dir) {
            Ok((set, info))
                if info.m == p.anchors
                    && info.k == p.effective_neighbors()
                    && info.seed == p.anchor_seed
                    && set.n() == ds.n()
                    && set.n_views() == views =>
            {
                log::info!("loaded anchor graphs from {}", dir.display());
                return Ok(set);
            }
            Ok(_) => log::warn!(
                "graph cache {} does not match this run; rebuilding",
                dir.display()
            ),
            Err(e) => log::warn!("graph cache {} unreadable ({e}); rebuilding", dir.display()),
        }
    }
    let set = pipeline::build_graphs(ds, &p).stage("anchors")?;
    save_graphs(&set, &dir, p.anchor_seed).stage("graph cache")?;
    Ok(set)
}
