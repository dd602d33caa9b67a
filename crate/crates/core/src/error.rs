use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-physical state (rho = {rho}, p = {p}){}", location_suffix(.cell, .time))]
    NonPhysicalState {
        rho: f64,
        p: f64,
        cell: Option<(usize, usize)>,
        time: Option<f64>,
    },

    #[error("maximal wave speed is zero; time step is undefined")]
    DegenerateSpeed,

    #[error("multiplier must be positive, got {0}")]
    NonPositiveMultiplier(f64),

    #[error("weight file schema error: {0}")]
    Schema(String),

    #[error("channel mismatch: {0}")]
    ChannelMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid wave data: {0}")]
    InvalidWaveData(String),

    #[error("sample rejected: {0}")]
    RejectSample(String),

    #[error("no wave relations are known for configuration {0}")]
    UnknownConfiguration(u8),

    #[error("unknown initial condition `{0}`")]
    UnknownName(String),

    #[error("grid alignment error: {0}")]
    Alignment(String),

    #[error("scheme {0} needs a CNN model but none was loaded")]
    ModelMissing(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("bad field file {path}: {reason}")]
    FieldFormat { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn location_suffix(cell: &Option<(usize, usize)>, time: &Option<f64>) -> String {
    let mut s = String::new();
    if let Some((i, j)) = cell {
        s.push_str(&format!(" at cell ({i}, {j})"));
    }
    if let Some(t) = time {
        s.push_str(&format!(" at t = {t}"));
    }
    s
}

impl Error {
    /// True for failures of the numerics (blow-up), as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonPhysicalState { .. } | Error::DegenerateSpeed)
    }

    pub(crate) fn at_time(self, t: f64) -> Self {
        match self {
            Error::NonPhysicalState { rho, p, cell, .. } => Error::NonPhysicalState {
                rho,
                p,
                cell,
                time: Some(t),
            },
            other => other,
        }
    }
}
