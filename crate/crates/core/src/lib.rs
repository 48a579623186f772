//! Distance functions, metric projections, radius of inner curvature and
//! cut-locus detection for planar domains.
//!
//! A [`DomainSpec`] describes the open set; [`Domain::new`] compiles it into a
//! boundary chain with a dense sampling, after which every query is a pure
//! function of `&Domain`.

pub mod curvature;
pub mod cutlocus;
pub mod eikonal;
pub mod error;
pub mod export;
pub mod geometry;
pub mod grid;
pub mod projection;
pub mod render;
pub mod tolerances;
pub mod verify;

pub use curvature::{BallTest, Radius, RhoEstimate, RhoStar};
pub use cutlocus::{classify, detect_skeleton, Classification, SkeletonMask};
pub use error::{Error, Result};
pub use geometry::{BoundarySample, ClipBox, Domain, DomainSpec, Point};
pub use projection::{usc_probe, ProjectionResult, UscReport};
pub use tolerances::Tolerances;
