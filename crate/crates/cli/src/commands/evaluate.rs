use omcal_core::dataset::{read_raw_labels, remap_labels};
use omcal_core::metrics::{self, Metrics};

use crate::args::EvaluateArgs;
use crate::error::{CliError, Stage};

/// Labels may be any tokens; both files are remapped independently.
pub fn run(args: &EvaluateArgs) -> Result<Metrics, CliError> {
    let truth = remap_labels(&read_raw_labels(&args.truth).stage("truth labels")?);
    let pred = remap_labels(&read_raw_labels(&args.pred).stage("predicted labels")?);
    metrics::evaluate(&pred, &truth).stage("metrics")
}
