use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("expected rank {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("negative matrix entry at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize },
    #[error("family is not valid: {0}")]
    InvalidFamily(String),
    #[error("direction p must be nonzero")]
    ZeroDirection,
    #[error("shape {inner} is not dominated by {outer}")]
    ShapeNotDominated { inner: String, outer: String },
    #[error("terminal letter {terminal} of the first word differs from origin {origin} of the second")]
    OriginMismatch { terminal: usize, origin: usize },
    #[error("square completion at {point:?} has {candidates} candidates")]
    NonUniqueFilling { point: Vec<usize>, candidates: usize },
    #[error("square completion got stuck at {point:?}")]
    NoFilling { point: Vec<usize> },
    #[error("{what}: estimated work {required} exceeds budget {limit}")]
    BudgetExceeded { what: String, required: f64, limit: f64 },
    #[error("scale too fine: need k-cube >= p (k = {k}, p = {p})")]
    ScaleTooFine { k: usize, p: String },
    #[error("operation requires rank >= 2")]
    RankOne,
    #[error("potential window {window} is wider than k = {k}")]
    WindowTooWide { window: usize, k: usize },
    #[error("m = {m} is smaller than p + n = {required}")]
    ShapeTooSmall { m: String, required: String },
    #[error("letter {0} is out of range")]
    UnknownLetter(usize),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code used in JSON error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "Parse",
            Error::RankMismatch { .. } => "RankMismatch",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::NotSquare { .. } => "NotSquare",
            Error::NegativeEntry { .. } => "NegativeEntry",
            Error::InvalidFamily(_) => "InvalidFamily",
            Error::ZeroDirection => "ZeroDirection",
            Error::ShapeNotDominated { .. } => "ShapeNotDominated",
            Error::OriginMismatch { .. } => "OriginMismatch",
            Error::NonUniqueFilling { .. } => "NonUniqueFilling",
            Error::NoFilling { .. } => "NoFilling",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::ScaleTooFine { .. } => "ScaleTooFine",
            Error::RankOne => "RankOne",
            Error::WindowTooWide { .. } => "WindowTooWide",
            Error::ShapeTooSmall { .. } => "ShapeTooSmall",
            Error::UnknownLetter(_) => "UnknownLetter",
            Error::Json(_) => "Json",
            Error::Io(_) => "Io",
        }
    }
}
