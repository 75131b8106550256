use omcal_core::dataset::{save_dataset_as, synth_blobs, BlobSpec, ViewFormat};

use crate::args::SynthArgs;
use crate::error::{CliError, Stage};

pub fn run(args: &SynthArgs) -> Result<(), CliError> {
    let ds = synth_blobs(&BlobSpec {
        n: args.samples,
        n_clusters: args.clusters,
        dims: args.dims.clone(),
        separation: args.separation,
        noise: args.noise,
        seed: args.seed,
    })
    .stage("synthetic data")?;
    let format = if args.binary {
        ViewFormat::F64le
    } else {
        ViewFormat::Csv
    };
    save_dataset_as(&ds, &args.out, format).stage("output")
}
