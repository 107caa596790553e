use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("site {site} out of range for a chain of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("{n_sites} sites exceeds the dimension cap of {cap} sites")]
    DimensionCap { n_sites: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("ground state is degenerate: gap {gap:.3e} below threshold {threshold:.3e}")]
    DegenerateGroundState { gap: f64, threshold: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("invalid ramp: {0}")]
    InvalidRamp(String),

    #[error("time {t} outside ramp interval [0, {t_final}]")]
    TimeOutOfRange { t: f64, t_final: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("norm drift {drift:.3e} exceeds tolerance {tol:.3e}")]
    NormDrift { drift: f64, tol: f64 },

    #[error("step doubling changed the observable by {rel_change:.3e} (tolerance {tol:.1e})")]
    ConvergenceFailure { rel_change: f64, tol: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable variant name, echoed in machine-readable error records.
    pub fn name(&self) -> &'static str {
        match self {
            Error::SiteOutOfRange { .. } => "SiteOutOfRange",
            Error::DimensionCap { .. } => "DimensionCap",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::DegenerateGroundState { .. } => "DegenerateGroundState",
            Error::Eigensolver(_) => "Eigensolver",
            Error::InvalidParams(_) => "InvalidParams",
            Error::InvalidModel(_) => "InvalidModel",
            Error::Unknown { .. } => "Unknown",
            Error::InvalidRamp(_) => "InvalidRamp",
            Error::TimeOutOfRange { .. } => "TimeOutOfRange",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::NormDrift { .. } => "NormDrift",
            Error::ConvergenceFailure { .. } => "ConvergenceFailure",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}
