use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing file: {}", path.display())]
    MissingFile { path: PathBuf },

    #[error("{}: shape mismatch: {detail}", file.display())]
    ShapeMismatch { file: PathBuf, detail: String },

    #[error("{}: non-finite value at row {row}, column {col}", file.display())]
    NonFiniteValue {
        file: PathBuf,
        row: usize,
        col: usize,
    },

    #[error("{}: malformed metadata: {reason}", file.display())]
    MalformedMeta { file: PathBuf, reason: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("anchor graph has no column with positive mass")]
    AllZeroGraph,

    #[error("label vectors differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("objective became non-finite after iteration {iteration}")]
    NumericalBreakdown { iteration: usize },
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter(_) => ErrorKind::Config,
            Error::NumericalBreakdown { .. } => ErrorKind::Numerical,
            _ => ErrorKind::Data,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile { path: path.into() }
        } else {
            Error::Io {
                path: path.into(),
                source,
            }
        }
    }
}

/// Non-fatal conditions surfaced alongside results.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// A view has fewer distinct rows than requested anchors; some anchors coincide.
    DegenerateView {
        view: usize,
        distinct_rows: usize,
        m: usize,
    },
    /// Rows whose `k + 1` nearest anchors are equidistant received uniform weights.
    DegenerateRows { view: usize, rows: usize },
    /// `ZᵀF` was rank deficient during a `G` update, so the update is not unique.
    RankDeficientW { iteration: usize, sigma_min: f64 },
    /// The view-weight subproblem hit its iteration cap.
    QpNotConverged { iteration: usize, step: f64 },
    /// Zero-mass anchor columns were dropped before reconstructing a full graph.
    ZeroColumnsDropped { count: usize },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::DegenerateView {
                view,
                distinct_rows,
                m,
            } => write!(
                f,
                "view {view} has {distinct_rows} distinct rows but {m} anchors were requested"
            ),
            Warning::DegenerateRows { view, rows } => {
                write!(
                    f,
                    "view {view}: {rows} rows with equidistant nearest anchors"
                )
            }
            Warning::RankDeficientW {
                iteration,
                sigma_min,
            } => write!(
                f,
                "iteration {iteration}: ZᵀF rank deficient (smallest singular value {sigma_min:e})"
            ),
            Warning::QpNotConverged { iteration, step } => write!(
                f,
                "iteration {iteration}: view-weight QP stopped at cap (last step {step:e})"
            ),
            Warning::ZeroColumnsDropped { count } => {
                write!(f, "dropped {count} anchor columns with zero mass")
            }
        }
    }
}

impl Warning {
    pub(crate) fn emit(self) -> Self {
        log::warn!("{self}");
        self
    }
}
