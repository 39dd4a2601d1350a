use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field has {got} values but the grid has {expected} cells")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value in {what} at cell {cell}")]
    NonFinite { what: &'static str, cell: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("negative cell density {value} at cell {cell}")]
    NegativeDensity { cell: usize, value: f64 },

    #[error("invalid initial data: {0}")]
    InvalidInitialData(String),

    #[error("time step {dt:e} exceeds the stability limit {limit:e} ({constraint})")]
    CflViolation {
        dt: f64,
        limit: f64,
        constraint: &'static str,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("ordering hypothesis failed at t = {t}: initial sub exceeds super by {excess:e} at cell {cell}")]
    InitialOrdering { t: f64, cell: usize, excess: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
