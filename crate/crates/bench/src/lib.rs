//! Shared fixtures for the benchmarks.

use omcal_core::anchors::{build_all, select_anchors};
use omcal_core::dataset::{synth_blobs, BlobSpec};
use omcal_core::{AnchorGraphSet, MultiViewDataset};

/// Five blobs in `views` views of 20 features each.
pub fn blobs(n: usize, views: usize) -> MultiViewDataset {
    synth_blobs(&BlobSpec {
        n,
        n_clusters: 5,
        dims: vec![20; views],
        separation: 4.0,
        noise: 1.0,
        seed: 7,
    })
    .expect("valid blob spec")
}

pub fn graphs(ds: &MultiViewDataset, m: usize) -> AnchorGraphSet {
    let anchors = select_anchors(ds, m, 7, 100).expect("enough samples for anchors");
    build_all(ds, &anchors, 5).expect("k < m")
}
