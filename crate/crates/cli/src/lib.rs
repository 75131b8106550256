//! `omcal` command-line front end: argument parsing, run configuration and
//! one module per subcommand. The binary only maps errors to exit codes.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;

use std::io::Write;

use omcal_core::report::write_csv;

pub use args::{Cli, Command};
pub use config::RunConfig;
pub use error::CliError;

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fit(args) => {
            let report = commands::fit::run(&args)?;
            let mut line = format!(
                "{} samples, {} iterations, objective {:.6e}, converged={}",
                report.n, report.iters, report.final_objective, report.converged
            );
            if let Some(m) = report.metrics {
                line.push_str(&format!(", ACC {:.4}, NMI {:.4}", m.acc, m.nmi));
            }
            println!("{line}");
        }
        Command::Evaluate(args) => {
            let scores = commands::evaluate::run(&args)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&scores).expect("serializable metrics")
            );
        }
        Command::ReconstructGraph(args) => {
            let n = commands::reconstruct::run(&args)?;
            println!("wrote {n}-sample graph to {}", args.out.display());
        }
        Command::Benchmark(args) => {
            let rows = commands::benchmark::run(&args)?;
            match &args.out {
                Some(path) => write_csv(path, &rows).map_err(|source| CliError::Core {
                    stage: "output",
                    source,
                })?,
                None => print_csv(&rows),
            }
        }
        Command::Sweep(args) => {
            let rows = commands::sweep::run(&args)?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            println!(
                "{} cells, {failed} failed; report in {}",
                rows.len(),
                args.out.display()
            );
        }
        Command::Synth(args) => {
            commands::synth::run(&args)?;
            println!("wrote {} samples to {}", args.samples, args.out.display());
        }
    }
    Ok(())
}

fn print_csv(rows: &[omcal_core::report::BenchmarkRow]) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "n,build_seconds,solve_seconds,total,iters").ok();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.n, r.build_seconds, r.solve_seconds, r.total, r.iters
        )
        .ok();
    }
}
