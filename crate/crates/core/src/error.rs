use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("geometry does not fit: {0}")]
    Geometry(String),

    #[error("index {index} out of range 0..{len}")]
    Index { index: usize, len: usize },

    #[error("sampling bound violated: {0}")]
    Sampling(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid filter or apodizer spec: {0}")]
    Spec(String),

    #[error("DFT oracle limited to 64x64 samples, got {nx}x{ny}")]
    OracleSize { nx: usize, ny: usize },

    #[error("cannot calibrate phase: {0}")]
    Calibration(String),

    #[error("profile has no half-maximum crossing on the {0} side of the peak")]
    NoHalfCrossing(&'static str),

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Grid(_)
            | Error::Geometry(_)
            | Error::Index { .. }
            | Error::Sampling(_)
            | Error::Config(_)
            | Error::Spec(_) => 3,
            Error::OracleSize { .. } | Error::Calibration(_) | Error::NoHalfCrossing(_) => 4,
            Error::Format(_) | Error::Io(_) => 5,
        }
    }
}
