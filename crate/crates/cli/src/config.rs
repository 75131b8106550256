//! Run configuration: defaults, then a preset, then a JSON file, then flags.

use std::path::{Path, PathBuf};

use omcal_core::anchors::{DEFAULT_KMEANS_ITERS, DEFAULT_NEIGHBORS};
use omcal_core::{presets, PipelineConfig, SolverConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::RunArgs;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub preset: Option<String>,
    pub anchors: usize,
    pub neighbors: usize,
    pub anchor_seed: u64,
    pub kmeans_iters: usize,
    pub single_view: Option<usize>,
    pub normalize: bool,
    pub cache_graphs: bool,
    pub write_consensus: bool,
    pub solver: SolverConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let pipeline = PipelineConfig::default();
        Self {
            data: None,
            out: None,
            preset: None,
            anchors: pipeline.anchors,
            neighbors: DEFAULT_NEIGHBORS,
            anchor_seed: 0,
            kmeans_iters: DEFAULT_KMEANS_ITERS,
            single_view: None,
            normalize: false,
            cache_graphs: false,
            write_consensus: false,
            solver: SolverConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn resolve(args: &RunArgs) -> Result<Self, CliError> {
        let file = args.config.as_deref().map(read_json).transpose()?;
        let preset = match &args.preset {
            Some(name) => Some(name.clone()),
            None => match file.as_ref().and_then(|f| f.get("preset")) {
                None | Some(Value::Null) => None,
                Some(Value::String(name)) => Some(name.clone()),
                Some(other) => {
                    return Err(CliError::Config(format!(
                        "preset must be a string, got {other}"
                    )))
                }
            },
        };
        let mut base = RunConfig::default();
        if let Some(name) = preset {
            base.apply_preset(&name)?;
        }
        let mut cfg = match file {
            Some(file) => {
                let mut merged = serde_json::to_value(&base).expect("serializable config");
                merge(&mut merged, file);
                serde_json::from_value(merged).map_err(|e| {
                    let path = args.config.as_deref().unwrap_or(Path::new("-"));
                    CliError::Config(format!("{}: {e}", path.display()))
                })?
            }
            None => base,
        };
        cfg.apply_flags(args);
        cfg.pipeline()
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn apply_preset(&mut self, name: &str) -> Result<(), CliError> {
        let p = presets::find(name).ok_or_else(|| {
            let known: Vec<&str> = presets::PRESETS.iter().map(|p| p.name).collect();
            CliError::Config(format!(
                "unknown preset {name:?}; known: {}",
                known.join(", ")
            ))
        })?;
        self.preset = Some(p.name.to_string());
        self.anchors = p.anchors;
        self.solver.n_clusters = p.n_clusters;
        self.solver.beta = p.beta;
        self.solver.gamma = p.gamma;
        Ok(())
    }

    fn apply_flags(&mut self, a: &RunArgs) {
        if let Some(d) = &a.data {
            self.data = Some(d.clone());
        }
        if let Some(c) = a.clusters {
            self.solver.n_clusters = c;
        }
        if let Some(m) = a.anchors {
            self.anchors = m;
        }
        if let Some(k) = a.neighbors {
            self.neighbors = k;
        }
        if let Some(b) = a.beta {
            self.solver.beta = b;
        }
        if let Some(g) = a.gamma {
            self.solver.gamma = g;
        }
        if let Some(t) = a.tol {
            self.solver.rel_tol = t;
        }
        if let Some(i) = a.max_iters {
            self.solver.max_iters = i;
        }
        if let Some(s) = a.seed {
            self.solver.seed = s;
            self.anchor_seed = s;
        }
        if let Some(s) = a.anchor_seed {
            self.anchor_seed = s;
        }
        if let Some(i) = a.kmeans_iters {
            self.kmeans_iters = i;
        }
        if a.normalize {
            self.normalize = true;
        }
        if a.single_view {
            self.single_view = Some(a.view);
        }
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            anchors: self.anchors,
            neighbors: self.neighbors,
            anchor_seed: self.anchor_seed,
            kmeans_iters: self.kmeans_iters,
            single_view: self.single_view,
            normalize: self.normalize,
            solver: self.solver.clone(),
        }
    }

    pub fn data_dir(&self) -> Result<&Path, CliError> {
        self.data.as_deref().ok_or_else(|| {
            CliError::Config("no dataset given (--data or \"data\" in the config)".into())
        })
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if !value.is_object() {
        return Err(CliError::Config(format!(
            "{}: expected a JSON object",
            path.display()
        )));
    }
    Ok(value)
}

/// Overlays `patch` onto `base`, recursing into objects.
fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
