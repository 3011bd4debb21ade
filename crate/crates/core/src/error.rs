use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("Hilbert space dimension {dimension} exceeds the cap of {cap}")]
    DimensionCap { dimension: usize, cap: usize },

    #[error("matrix is not Hermitian (residual {residual:.3e}, tolerance {tolerance:.3e})")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("electron manifold is ambiguous: best m_S weight {weight:.3} is below {threshold}")]
    AmbiguousManifold { weight: f64, threshold: f64 },

    #[error("no data left after removing the {dead_time_us} μs dead time")]
    EmptyAfterDeadTime { dead_time_us: f64 },

    #[error("fit did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("under-determined fit: {0}")]
    UnderDetermined(String),

    #[error("rank-deficient sensitivity matrix")]
    RankDeficient,

    #[error("no peak near the ¹³C Larmor frequency {larmor_mhz:.4} MHz")]
    NoLarmorAnchor { larmor_mhz: f64 },

    #[error("T₂ minimum is not bracketed by the temperature points")]
    MinimumNotBracketed,

    #[error("coupling {coupling_khz} kHz is not below the linewidth {linewidth_khz} kHz")]
    InvalidRegime {
        coupling_khz: f64,
        linewidth_khz: f64,
    },

    #[error("data format error at line {line}: {message}")]
    DataFormat { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
