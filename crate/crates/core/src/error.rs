use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Cmx(#[from] crate::cmx::CmxError),

    #[error("arrangement not complete")]
    IncompleteArrangement,

    #[error("invalid arrangement: {0}")]
    InvalidArrangement(String),

    #[error("invalid bundle: {0}")]
    InvalidBundle(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("skip_eroded {skip} too large for piece side {side}")]
    SkipTooLarge { skip: usize, side: usize },

    #[error("erosion width {width} must be below half the piece side {side}")]
    ErosionTooLarge { width: usize, side: usize },

    #[error("bundle has no ground truth")]
    MissingGroundTruth,

    #[error("no chunks")]
    NoChunks,

    #[error("normalize first")]
    NotNormalized,

    #[error("measure {0} cannot be computed from pixels")]
    NotComputable(&'static str),

    #[error("invalid solver config: {0}")]
    InvalidConfig(String),

    #[error("phase {0} is essential and cannot be disabled")]
    EssentialPhase(crate::ga::Phase),

    #[error("image {width}x{height} is smaller than one {piece}x{piece} piece")]
    ImageTooSmall {
        width: usize,
        height: usize,
        piece: usize,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the filesystem or stream rather than of the data.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::Image { source, .. } => matches!(source, image::ImageError::IoError(_)),
            Error::Cmx(e) => matches!(e, crate::cmx::CmxError::Io(_)),
            _ => false,
        }
    }
}
