//! Per-dataset parameter presets for the benchmark datasets the method was
//! tuned on: anchor count, nuclear-norm weight, factorization weight, and the
//! dataset's class count.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub n_clusters: usize,
    pub anchors: usize,
    pub beta: f64,
    pub gamma: f64,
}

const fn preset(
    name: &'static str,
    n_clusters: usize,
    anchors: usize,
    beta: f64,
    gamma: f64,
) -> Preset {
    Preset {
        name,
        n_clusters,
        anchors,
        beta,
        gamma,
    }
}

pub const PRESETS: &[Preset] = &[
    preset("coil", 20, 35, 0.3, 0.01),
    preset("wiki", 10, 30, 0.1, 0.1),
    preset("usps", 10, 40, 0.3, 0.1),
    preset("reuters", 6, 15, 0.8, 0.0001),
    preset("noisymnist", 10, 100, 0.2, 1.0),
    // 200 classes exceed the 40 anchors; fitting this preset fails validation.
    preset("xmedia", 200, 40, 0.1, 1.0),
    preset("cifar10", 10, 35, 1.0, 0.001),
    preset("cifar100", 100, 150, 0.4, 0.1),
    preset("mnist", 10, 30, 0.2, 0.1),
];

/// Case-insensitive lookup; `-` and `_` are ignored (`noisy-mnist` works).
pub fn find(name: &str) -> Option<&'static Preset> {
    let key: String = name
        .chars()
        .filter(|c| *c != '-' && *c != '_')
        .flat_map(char::to_lowercase)
        .collect();
    PRESETS.iter().find(|p| p.name == key)
}
