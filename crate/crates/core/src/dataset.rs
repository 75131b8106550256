//! Multi-view datasets: validation, the on-disk directory format, and a
//! seeded Gaussian-blob generator for tests and benchmarks.
//!
//! A dataset directory holds a `meta.json` describing the views:
//!
//! ```json
//! {"n": 4, "views": [{"name": "v0", "file": "v0.csv", "dims": 2, "format": "csv"}], "labels": "labels.txt"}
//! ```
//!
//! View files are headerless CSV (one sample per row) or raw row-major
//! little-endian `f64`. The labels file holds one label per line.

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Matrix;

pub const META_FILE: &str = "meta.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViewFormat {
    #[default]
    Csv,
    F64le,
}

impl ViewFormat {
    fn extension(self) -> &'static str {
        match self {
            ViewFormat::Csv => "csv",
            ViewFormat::F64le => "bin",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViewMeta {
    pub name: String,
    pub file: String,
    pub dims: usize,
    #[serde(default)]
    pub format: ViewFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetMeta {
    pub n: usize,
    pub views: Vec<ViewMeta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<String>,
}

/// `V` feature matrices over the same `n` samples, with optional ground truth.
///
/// Immutable once built; every constructor validates the shape and finiteness
/// invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiViewDataset {
    views: Vec<Matrix>,
    labels: Option<Vec<usize>>,
    view_names: Vec<String>,
}

impl MultiViewDataset {
    /// Validates and assembles a dataset. Labels are remapped to `0..c` in
    /// order of first occurrence. Empty `view_names` yields `view0, view1, ...`.
    pub fn new(
        views: Vec<Matrix>,
        labels: Option<Vec<usize>>,
        view_names: Vec<String>,
    ) -> Result<Self> {
        let Some(first) = views.first() else {
            return Err(Error::InvalidDataset("dataset has no views".into()));
        };
        let n = first.nrows();
        if n == 0 {
            return Err(Error::InvalidDataset("dataset has no samples".into()));
        }
        for (v, x) in views.iter().enumerate() {
            if x.nrows() != n {
                return Err(Error::InvalidDataset(format!(
                    "view {v} has {} rows, expected {n}",
                    x.nrows()
                )));
            }
            if x.ncols() == 0 {
                return Err(Error::InvalidDataset(format!("view {v} has zero features")));
            }
            if let Some((row, col)) = first_non_finite(x) {
                return Err(Error::InvalidDataset(format!(
                    "view {v} has a non-finite value at row {row}, column {col}"
                )));
            }
        }
        let labels = match labels {
            Some(l) if l.len() != n => {
                return Err(Error::InvalidDataset(format!(
                    "{} labels for {n} samples",
                    l.len()
                )))
            }
            Some(l) => Some(remap_labels(&l)),
            None => None,
        };
        let view_names = if view_names.is_empty() {
            (0..views.len()).map(|v| format!("view{v}")).collect()
        } else if view_names.len() != views.len() {
            return Err(Error::InvalidDataset(format!(
                "{} view names for {} views",
                view_names.len(),
                views.len()
            )));
        } else {
            view_names
        };
        Ok(Self {
            views,
            labels,
            view_names,
        })
    }

    pub fn n(&self) -> usize {
        self.views[0].nrows()
    }

    pub fn n_views(&self) -> usize {
        self.views.len()
    }

    pub fn views(&self) -> &[Matrix] {
        &self.views
    }

    pub fn view(&self, v: usize) -> &Matrix {
        &self.views[v]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.views.iter().map(|x| x.ncols()).collect()
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn view_names(&self) -> &[String] {
        &self.view_names
    }

    /// Number of distinct ground-truth classes, if labels are present.
    pub fn n_classes(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().copied().max().map_or(0, |m| m + 1))
    }

    /// Per-feature z-score of every view. Constant features are only centered.
    pub fn zscore(&self) -> Self {
        let views = self
            .views
            .iter()
            .map(|x| {
                let n = x.nrows() as f64;
                let mut out = x.clone();
                for mut col in out.column_iter_mut() {
                    let mean = col.sum() / n;
                    let var = col.iter().map(|&a| (a - mean) * (a - mean)).sum::<f64>() / n;
                    let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
                    col.apply(|a| *a = (*a - mean) / sd);
                }
                out
            })
            .collect();
        Self {
            views,
            labels: self.labels.clone(),
            view_names: self.view_names.clone(),
        }
    }
}

/// Remaps arbitrary labels to `0..c` preserving first-occurrence order.
pub fn remap_labels<T: Clone + Eq + std::hash::Hash>(labels: &[T]) -> Vec<usize> {
    let mut ids: HashMap<T, usize> = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = ids.len();
            *ids.entry(l.clone()).or_insert(next)
        })
        .collect()
}

fn first_non_finite(x: &Matrix) -> Option<(usize, usize)> {
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            if !x[(i, j)].is_finite() {
                return Some((i, j));
            }
        }
    }
    None
}

/// Reads a dataset directory, validating it against its `meta.json`.
pub fn load_dataset(root: impl AsRef<Path>) -> Result<MultiViewDataset> {
    let root = root.as_ref();
    let meta = read_meta(root)?;
    let meta_path = root.join(META_FILE);
    if meta.views.is_empty() {
        return Err(Error::MalformedMeta {
            file: meta_path,
            reason: "no views declared".into(),
        });
    }
    if meta.n == 0 {
        return Err(Error::MalformedMeta {
            file: meta_path,
            reason: "n must be at least 1".into(),
        });
    }
    let mut views = Vec::with_capacity(meta.views.len());
    let mut names = Vec::with_capacity(meta.views.len());
    for view in &meta.views {
        if view.dims == 0 {
            return Err(Error::MalformedMeta {
                file: meta_path,
                reason: format!("view '{}' declares zero dims", view.name),
            });
        }
        let path = root.join(&view.file);
        views.push(read_matrix(&path, meta.n, view.dims, view.format)?);
        names.push(view.name.clone());
    }
    let labels = match &meta.labels {
        Some(file) => Some(read_labels(&root.join(file), meta.n)?),
        None => None,
    };
    MultiViewDataset::new(views, labels, names)
}

/// Writes `ds` as CSV views plus `meta.json`.
pub fn save_dataset(ds: &MultiViewDataset, root: impl AsRef<Path>) -> Result<()> {
    save_dataset_as(ds, root, ViewFormat::Csv)
}

pub fn save_dataset_as(
    ds: &MultiViewDataset,
    root: impl AsRef<Path>,
    format: ViewFormat,
) -> Result<()> {
    let root = root.as_ref();
    fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    let mut views = Vec::with_capacity(ds.n_views());
    for (v, x) in ds.views().iter().enumerate() {
        let file = format!("view{v}.{}", format.extension());
        write_matrix(&root.join(&file), x, format)?;
        views.push(ViewMeta {
            name: ds.view_names()[v].clone(),
            file,
            dims: x.ncols(),
            format,
        });
    }
    let labels = match ds.labels() {
        Some(l) => {
            let file = "labels.txt".to_string();
            write_labels(&root.join(&file), l)?;
            Some(file)
        }
        None => None,
    };
    let meta = DatasetMeta {
        n: ds.n(),
        views,
        labels,
    };
    write_json(&root.join(META_FILE), &meta)
}

pub fn read_meta(root: &Path) -> Result<DatasetMeta> {
    let path = root.join(META_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedMeta {
        file: path,
        reason: e.to_string(),
    })
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable value");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Reads an `n × dims` matrix in the given format.
pub fn read_matrix(path: &Path, n: usize, dims: usize, format: ViewFormat) -> Result<Matrix> {
    match format {
        ViewFormat::Csv => {
            let x = read_csv_matrix(path)?;
            if x.nrows() != n || x.ncols() != dims {
                return Err(Error::ShapeMismatch {
                    file: path.to_path_buf(),
                    detail: format!("found {}x{}, expected {n}x{dims}", x.nrows(), x.ncols()),
                });
            }
            Ok(x)
        }
        ViewFormat::F64le => read_f64le(path, n, dims),
    }
}

/// Reads a headerless CSV matrix, inferring its shape.
pub fn read_csv_matrix(path: &Path) -> Result<Matrix> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::ShapeMismatch {
            file: path.to_path_buf(),
            detail: format!("row {row}: {e}"),
        })?;
        let width = *cols.get_or_insert(record.len());
        if record.len() != width {
            return Err(Error::ShapeMismatch {
                file: path.to_path_buf(),
                detail: format!("row {row} has {} columns, expected {width}", record.len()),
            });
        }
        for (col, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::ShapeMismatch {
                file: path.to_path_buf(),
                detail: format!("row {row}, column {col}: '{field}' is not a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFiniteValue {
                    file: path.to_path_buf(),
                    row,
                    col,
                });
            }
            data.push(value);
        }
        rows += 1;
    }
    Ok(DMatrix::from_row_slice(rows, cols.unwrap_or(0), &data))
}

fn read_f64le(path: &Path, n: usize, dims: usize) -> Result<Matrix> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() != n * dims * 8 {
        return Err(Error::ShapeMismatch {
            file: path.to_path_buf(),
            detail: format!(
                "{} bytes, expected {n}x{dims} f64 = {}",
                bytes.len(),
                n * dims * 8
            ),
        });
    }
    let data: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
        .collect();
    if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue {
            file: path.to_path_buf(),
            row: pos / dims,
            col: pos % dims,
        });
    }
    Ok(DMatrix::from_row_slice(n, dims, &data))
}

pub fn write_matrix(path: &Path, x: &Matrix, format: ViewFormat) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let res = match format {
        ViewFormat::Csv => write_csv_rows(&mut out, x),
        ViewFormat::F64le => (0..x.nrows()).try_for_each(|i| {
            (0..x.ncols()).try_for_each(|j| out.write_all(&x[(i, j)].to_le_bytes()))
        }),
    };
    res.and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

// `Display` for f64 prints the shortest string that parses back to the same bits.
fn write_csv_rows(out: &mut impl Write, x: &Matrix) -> std::io::Result<()> {
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            if j > 0 {
                out.write_all(b",")?;
            }
            write!(out, "{}", x[(i, j)])?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads one label per line (blank lines ignored) and remaps them to `0..c`.
pub fn read_labels(path: &Path, n: usize) -> Result<Vec<usize>> {
    let raw = read_raw_labels(path)?;
    if raw.len() != n {
        return Err(Error::ShapeMismatch {
            file: path.to_path_buf(),
            detail: format!("{} labels, expected {n}", raw.len()),
        });
    }
    Ok(remap_labels(&raw))
}

/// Reads one label token per line without remapping or length checks.
pub fn read_raw_labels(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect())
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    let mut text = String::with_capacity(labels.len() * 3);
    for l in labels {
        text.push_str(&l.to_string());
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Parameters for [`synth_blobs`].
#[derive(Debug, Clone, PartialEq)]
pub struct BlobSpec {
    pub n: usize,
    pub n_clusters: usize,
    pub dims: Vec<usize>,
    pub separation: f64,
    pub noise: f64,
    pub seed: u64,
}

/// Gaussian blobs seen through `dims.len()` views.
///
/// Each view draws its own cluster centers (`separation · N(0, I)`) and adds
/// isotropic `noise · N(0, I)` to each sample. Sample `i` belongs to cluster
/// `⌊i·c/n⌋` in every view, so classes are balanced to within one sample.
pub fn synth_blobs(spec: &BlobSpec) -> Result<MultiViewDataset> {
    let BlobSpec {
        n,
        n_clusters: c,
        ref dims,
        separation,
        noise,
        seed,
    } = *spec;
    if c == 0 || n < c {
        return Err(Error::InvalidParameter(format!(
            "need n >= c >= 1, got n={n}, c={c}"
        )));
    }
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidParameter(
            "every view needs at least one dimension".into(),
        ));
    }
    if !(separation > 0.0 && separation.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "separation must be positive, got {separation}"
        )));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise must be non-negative, got {noise}"
        )));
    }
    let labels: Vec<usize> = (0..n).map(|i| i * c / n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let views = dims
        .iter()
        .map(|&d| {
            let centers = DMatrix::from_fn(c, d, |_, _| {
                let draw: f64 = StandardNormal.sample(&mut rng);
                separation * draw
            });
            let mut x = DMatrix::zeros(n, d);
            for i in 0..n {
                for j in 0..d {
                    let eps: f64 = StandardNormal.sample(&mut rng);
                    x[(i, j)] = centers[(labels[i], j)] + noise * eps;
                }
            }
            x
        })
        .collect();
    MultiViewDataset::new(views, Some(labels), Vec::new())
}
