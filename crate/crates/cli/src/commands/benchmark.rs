use std::time::Instant;

use omcal_core::dataset::{synth_blobs, BlobSpec};
use omcal_core::report::BenchmarkRow;
use omcal_core::{pipeline, PipelineConfig, SolverConfig};

use crate::args::BenchmarkArgs;
use crate::error::{CliError, Stage};

/// Sizes run one after another so timings do not compete for cores.
pub fn run(args: &BenchmarkArgs) -> Result<Vec<BenchmarkRow>, CliError> {
    if args.sizes.is_empty() || args.repeats == 0 || args.views == 0 {
        return Err(CliError::Config(
            "need at least one size, view and repeat".into(),
        ));
    }
    let cfg = PipelineConfig {
        anchors: args.anchors,
        anchor_seed: args.seed,
        solver: SolverConfig {
            seed: args.seed,
            ..SolverConfig::new(args.clusters)
        },
        ..PipelineConfig::default()
    };
    cfg.validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut rows = Vec::with_capacity(args.sizes.len());
    for &n in &args.sizes {
        let ds = synth_blobs(&BlobSpec {
            n,
            n_clusters: args.clusters,
            dims: vec![args.dims; args.views],
            separation: 4.0,
            noise: 1.0,
            seed: args.seed,
        })
        .stage("synthetic data")?;
        let mut best: Option<BenchmarkRow> = None;
        for _ in 0..args.repeats {
            let start = Instant::now();
            let out = pipeline::run(&ds, &cfg).stage("fit")?;
            let row = BenchmarkRow {
                n,
                build_seconds: out.build_seconds,
                solve_seconds: out.solve_seconds,
                total: start.elapsed().as_secs_f64(),
                iters: out.result.state.iters_run,
            };
            if best.is_none_or(|b| row.total < b.total) {
                best = Some(row);
            }
        }
        let row = best.expect("at least one repeat");
        log::info!("n={n}: {:.3}s ({} iterations)", row.total, row.iters);
        rows.push(row);
    }
    Ok(rows)
}
