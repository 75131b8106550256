use omcal_core::dataset::{read_csv_matrix, write_matrix, ViewFormat};
use omcal_core::graph_tools::{reconstruct_full_graph, reconstruct_top_k};
use omcal_core::report::write_csv;
use serde::{Deserialize, Serialize};

use crate::args::{MatrixFormat, ReconstructArgs};
use crate::error::{CliError, Stage};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triplet {
    pub row: usize,
    pub col: usize,
    pub weight: f64,
}

/// Returns the number of samples.
pub fn run(args: &ReconstructArgs) -> Result<usize, CliError> {
    let mut s = read_csv_matrix(&args.graph).stage("anchor graph")?;
    if args.clip_negative {
        s.apply(|x| *x = x.max(0.0));
    }
    match args.top_k {
        Some(k) => {
            let rows: Vec<Triplet> = reconstruct_top_k(&s, k)
                .stage("graph")?
                .into_iter()
                .map(|(row, col, weight)| Triplet { row, col, weight })
                .collect();
            write_csv(&args.out, &rows).stage("output")?;
        }
        None => {
            let full = reconstruct_full_graph(&s).stage("graph")?;
            let format = match args.format {
                MatrixFormat::Csv => ViewFormat::Csv,
                MatrixFormat::F64le => ViewFormat::F64le,
            };
            write_matrix(&args.out, &full.b, format).stage("output")?;
        }
    }
    Ok(s.nrows())
}
