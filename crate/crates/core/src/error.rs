use std::path::PathBuf;

/// Errors produced anywhere in the lesion-mask toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid image dimensions {width}x{height} for buffer of length {len}")]
    InvalidDimensions {
        width: usize,
        height: usize,
        len: usize,
    },

    #[error("invalid kernel side {0}: must be odd and >= 1")]
    InvalidKernel(usize),

    #[error("invalid sigma {0}: must be positive and finite")]
    InvalidSigma(f64),

    #[error("degenerate histogram: fewer than two occupied intensity levels")]
    DegenerateHistogram,

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("{path}: image has an alpha channel; only 8-bit RGB or grayscale input is accepted")]
    AlphaChannel { path: PathBuf },

    #[error("{path}: unsupported pixel format {format}")]
    UnsupportedPixelFormat { path: PathBuf, format: String },

    #[error("{path}: failed to decode image: {source}")]
    Decode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("{path}: failed to encode image: {source}")]
    Encode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("missing required column {0:?}")]
    MissingColumn(String),

    #[error("unknown diagnosis code {0:?}")]
    UnknownDiagnosis(String),

    #[error("diagnosis mapping does not cover known codes: {}", .0.join(", "))]
    IncompleteMapping(Vec<String>),

    #[error("invalid label {0:?}: expected benign or malignant")]
    InvalidLabel(String),

    #[error("no metadata record matched a file in {0}")]
    EmptyJoin(PathBuf),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}
