use std::path::Path;

use omcal_core::dataset::load_dataset;
use omcal_core::report::{write_atomic, SweepRow};
use omcal_core::{pipeline, MultiViewDataset, PipelineConfig};
use rayon::prelude::*;

use crate::args::SweepArgs;
use crate::config::RunConfig;
use crate::error::{CliError, Stage};

/// Worker-pool size for grid cells; rayon's default when unset.
pub const WORKERS_ENV: &str = "OMCAL_WORKERS";

/// Largest objective rise still counted as monotone.
const DESCENT_SLACK: f64 = 1e-9;

pub fn run(args: &SweepArgs) -> Result<Vec<SweepRow>, CliError> {
    let cfg = RunConfig::resolve(&args.run)?;
    let ds = load_dataset(cfg.data_dir()?).stage("dataset")?;
    let base = cfg.pipeline();
    let or_base = |grid: &[f64], v: f64| {
        if grid.is_empty() {
            vec![v]
        } else {
            grid.to_vec()
        }
    };
    let anchors = if args.anchors_grid.is_empty() {
        vec![base.anchors]
    } else {
        args.anchors_grid.clone()
    };
    let betas = or_base(&args.beta_grid, base.solver.beta);
    let gammas = or_base(&args.gamma_grid, base.solver.gamma);
    let mut cells = Vec::with_capacity(anchors.len() * betas.len() * gammas.len());
    for &m in &anchors {
        for &b in &betas {
            for &g in &gammas {
                cells.push((m, b, g));
            }
        }
    }

    if let Some(dir) = &args.cells_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
    }
    let pool = worker_pool()?;
    let rows: Vec<SweepRow> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(m, beta, gamma)| {
                let row = run_cell(&ds, &base, m, beta, gamma);
                if let Some(dir) = &args.cells_dir {
                    write_cell(dir, &row);
                }
                row
            })
            .collect()
    });
    omcal_core::report::write_csv(&args.out, &rows).stage("output")?;
    Ok(rows)
}

fn worker_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(text) = std::env::var(WORKERS_ENV) {
        let n: usize = text.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::Config(format!(
                "{WORKERS_ENV} must be a positive integer, got {text:?}"
            ))
        })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))
}

/// One fit; failures become a row with `error` set so the sweep continues.
fn run_cell(
    ds: &MultiViewDataset,
    base: &PipelineConfig,
    m: usize,
    beta: f64,
    gamma: f64,
) -> SweepRow {
    let mut cfg = base.clone();
    cfg.anchors = m;
    cfg.solver.beta = beta;
    cfg.solver.gamma = gamma;
    let mut row = SweepRow {
        m,
        beta,
        gamma,
        acc: None,
        nmi: None,
        purity: None,
        ari: None,
        f_score: None,
        precision: None,
        iters: None,
        final_objective: None,
        converged: None,
        monotone: None,
        error: None,
    };
    match pipeline::run(ds, &cfg) {
        Ok(out) => {
            if let Some(s) = out.metrics {
                row.acc = Some(s.acc);
                row.nmi = Some(s.nmi);
                row.purity = Some(s.purity);
                row.ari = Some(s.ari);
                row.f_score = Some(s.f_score);
                row.precision = Some(s.precision);
            }
            let history = &out.result.state.objective_history;
            row.iters = Some(out.result.state.iters_run);
            row.final_objective = Some(out.result.final_objective());
            row.converged = Some(out.result.converged);
            row.monotone = Some(history.windows(2).all(|w| w[1] <= w[0] + DESCENT_SLACK));
        }
        Err(e) => {
            log::warn!("cell m={m} beta={beta} gamma={gamma} failed: {e}");
            row.error = Some(e.to_string());
        }
    }
    row
}

fn write_cell(dir: &Path, row: &SweepRow) {
    let path = dir.join(format!("cell-m{}-b{}-g{}.json", row.m, row.beta, row.gamma));
    let text = serde_json::to_string_pretty(row).expect("serializable row") + "\n";
    if let Err(e) = write_atomic(&path, text.as_bytes()) {
        log::warn!("could not write {}: {e}", path.display());
    }
}
