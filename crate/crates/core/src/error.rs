use std::path::PathBuf;

/// Coarse error classes; the CLI maps these to exit codes 1, 2 and 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Ingestion,
    Config,
    Numerical,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Ingestion => 1,
            ErrorClass::Config => 2,
            ErrorClass::Numerical => 3,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("could not decode image {path}: {message}")]
    Decode { path: PathBuf, message: String },
    #[error("need at least 2 frames, found {found}")]
    NotEnoughFrames { found: usize },
    #[error("mixed frame dimensions: expected {expected}, {path} is {found}")]
    MixedDimensions {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error("not a PMIS container")]
    BadMagic,
    #[error("unsupported PMIS container: {0}")]
    UnsupportedContainer(String),
    #[error("truncated PMIS payload: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(
        "frame {height}x{width}x{channels} too small for patch size {patch_size}: \
         {patches} patches but joint dimension is {joint_dim}; increase resolution or decrease patch size"
    )]
    FrameTooSmall {
        height: usize,
        width: usize,
        channels: usize,
        patch_size: usize,
        patches: usize,
        joint_dim: usize,
    },
    #[error("requested {requested} frames but the video has only {available}; use --allow-repeat or reduce the frame count")]
    TooFewFrames { requested: usize, available: usize },

    #[error("zero-variance input: all patch samples are identical")]
    ZeroVariance,
    #[error("covariance is not positive definite even with relative jitter {0:e}")]
    JitterExhausted(f64),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("zero-norm frame in cosine similarity")]
    ZeroNorm,
    #[error("cumulative distribution drifted by {0:e} from 1")]
    CdfDrift(f64),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Io { .. }
            | Decode { .. }
            | NotEnoughFrames { .. }
            | MixedDimensions { .. }
            | BadMagic
            | UnsupportedContainer(_)
            | Truncated { .. } => ErrorClass::Ingestion,
            InvalidConfig(_) | ShapeMismatch(_) | FrameTooSmall { .. } | TooFewFrames { .. } => {
                ErrorClass::Config
            }
            ZeroVariance | JitterExhausted(_) | NonFinite(_) | ZeroNorm | CdfDrift(_) => {
                ErrorClass::Numerical
            }
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
