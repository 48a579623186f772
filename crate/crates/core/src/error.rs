use thiserror::Error;

/// Errors raised by domain construction and the geometric queries.
#[derive(Debug, Error)]
pub enum Error {
    #[error("query point ({x}, {y}) lies outside the clip box minus its margin band")]
    QueryOutsideClipBox { x: f64, y: f64 },

    #[error("point ({x}, {y}) is not an interior point of the domain")]
    NotInteriorPoint { x: f64, y: f64 },

    #[error("boundary piece {piece} has zero length")]
    DegenerateBoundary { piece: usize },

    #[error("boundary pieces {before} and {after} do not join (gap {gap:e})")]
    DiscontinuousBoundary { before: usize, after: usize, gap: f64 },

    #[error("joint between pieces {before} and {after} was declared C1 but its tangents differ by {angle:e} rad")]
    JointNotC1 { before: usize, after: usize, angle: f64 },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("boundary is not C2 at ({x}, {y})")]
    NotC2At { x: f64, y: f64 },

    #[error("envelope radius {radius} is below twice the sample spacing {spacing}")]
    EnvelopeRadiusBelowSampling { radius: f64, spacing: f64 },

    #[error("grid of {nx}x{ny} cells is too coarse (need at least 32x32)")]
    GridTooCoarse { nx: usize, ny: usize },

    #[error("{unreached} interior cells were never reached by the marching front")]
    DisconnectedInterior { unreached: usize },

    #[error("operation requires a C1 boundary but the domain has corners")]
    RequiresC1Boundary,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI's error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::QueryOutsideClipBox { .. } => "QueryOutsideClipBox",
            Error::NotInteriorPoint { .. } => "NotInteriorPoint",
            Error::DegenerateBoundary { .. } => "DegenerateBoundary",
            Error::DiscontinuousBoundary { .. } => "DiscontinuousBoundary",
            Error::JointNotC1 { .. } => "JointNotC1",
            Error::InvalidDomain(_) => "InvalidDomain",
            Error::NotC2At { .. } => "NotC2At",
            Error::EnvelopeRadiusBelowSampling { .. } => "EnvelopeRadiusBelowSampling",
            Error::GridTooCoarse { .. } => "GridTooCoarse",
            Error::DisconnectedInterior { .. } => "DisconnectedInterior",
            Error::RequiresC1Boundary => "RequiresC1Boundary",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
