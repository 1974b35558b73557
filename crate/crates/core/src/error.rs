use thiserror::Error;

use crate::model::Side;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate rectangle at primitive {index}")]
    DegenerateRectangle { index: usize },

    #[error("facet angle out of range [0, pi/2) at primitive {index}")]
    AngleOutOfRange { index: usize },

    #[error("probability out of range for pair ({0}, {1})", pair.0, pair.1)]
    ProbabilityOutOfRange { pair: (usize, usize) },

    #[error("incomplete relation map: missing pair ({0}, {1})", pair.0, pair.1)]
    IncompleteRelationMap { pair: (usize, usize) },

    #[error("relation pair ({0}, {1}) does not name two distinct primitives", pair.0, pair.1)]
    InvalidRelationPair { pair: (usize, usize) },

    #[error("invalid raster geometry: {0}")]
    InvalidGeometry(String),

    #[error("primitive box lies outside the {resolution}x{resolution} image")]
    BoxOutsideImage { resolution: usize },

    #[error("empty bundle list")]
    EmptyBundleList,

    #[error("raster size mismatch: {0}")]
    SizeMismatch(String),

    #[error("duplicate primitive owner {0} in composite input")]
    DuplicateOwner(usize),

    #[error("no boundary response on the {0} side")]
    NoBoundaryResponse(Side),

    #[error("orientation image is all background")]
    AllBackground,

    #[error("degenerate rectangle transform")]
    DegenerateTransform,

    #[error("roof model has no facets")]
    EmptyModel,

    #[error("zero-extent model cannot be normalized")]
    ZeroExtentModel,

    #[error("empty model set")]
    EmptySet,

    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),

    #[error("placement failed after {attempts} attempts (seed {seed}, stream {stream})")]
    PlacementFailed { seed: u64, stream: u64, attempts: usize },

    #[error("format error: {0}")]
    Format(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        Error::Io { path: path.display().to_string(), message: e.to_string() }
    }
}
