//! Domain specifications, boundary pieces and the compiled [`Domain`].

mod curve;
mod dense;
mod domain;
mod point;
mod spec;

pub use curve::{Curve, CurveEval, GraphLaw};
pub use domain::{
    BoundaryParam, BoundarySample, Domain, Joint, JointSmoothness, LocalFrame, CORNER_ANGLE,
};
pub(crate) use domain::snap_param;
pub use point::Point;
pub use spec::{ClipBox, DomainKind, DomainSpec, Orientation, PieceSpec};
