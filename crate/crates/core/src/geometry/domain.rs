use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use serde::Serialize;

use super::curve::{Curve, GraphLaw};
use super::dense::DenseBoundary;
use super::point::Point;
use super::spec::{DomainKind, DomainSpec, Orientation, PieceSpec};
use crate::curvature::RhoTable;
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

/// Tangent directions differing by more than this flag a corner.
pub const CORNER_ANGLE: f64 = 1e-6;
/// Consecutive pieces must meet within this fraction of the clip box diameter.
const JOIN_GAP_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JointSmoothness {
    /// One-sided tangents differ.
    Corner,
    /// Tangents agree, curvature jumps or is unbounded.
    C1,
    /// Tangent and curvature agree.
    Smooth,
}

/// Point where piece `before` ends and piece `after` starts.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Joint {
    pub point: Point,
    pub before: usize,
    pub after: usize,
    pub smoothness: JointSmoothness,
    pub tangent_gap: f64,
}

/// Location on the boundary chain: piece index and normalized parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryParam {
    pub piece: usize,
    pub s: f64,
}

/// A boundary point with its inner unit normal.
///
/// At a corner the point is emitted twice, once with each one-sided normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundarySample {
    pub point: Point,
    pub inner_normal: Point,
    pub param: BoundaryParam,
    pub arc_spacing: f64,
    pub corner: bool,
}

/// Frame in which the boundary near a sample is (or would be) a graph over
/// the line orthogonal to `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalFrame {
    pub origin: Point,
    pub axis: Point,
    pub graph_representable: bool,
    /// Angle between the one-sided tangents (0 away from joints).
    pub tangent_gap: f64,
}

/// A [`DomainSpec`] compiled into a boundary chain with a dense sampling.
///
/// Immutable after construction; every query takes `&self`.
#[derive(Debug)]
pub struct Domain {
    spec: DomainSpec,
    tol: Tolerances,
    curves: Vec<Curve>,
    closed: bool,
    joints: Vec<Joint>,
    start_joint: Vec<Option<usize>>,
    end_joint: Vec<Option<usize>>,
    pub(crate) dense: DenseBoundary,
    /// Closed polygon used for winding-number inside tests.
    polygon: Option<Vec<Point>>,
    eps_bd: f64,
    pub(crate) rho_table: OnceLock<RhoTable>,
}

pub(crate) fn curve_from_piece_spec(p: &PieceSpec) -> Curve {
    match *p {
        PieceSpec::Segment { from, to } => Curve::Segment {
            from: from.into(),
            to: to.into(),
        },
        PieceSpec::Arc {
            center,
            radius,
            start,
            end,
        } => Curve::Arc {
            center: center.into(),
            radius,
            start,
            end,
        },
        PieceSpec::EllipticArc {
            center,
            rx,
            ry,
            start,
            end,
        } => Curve::EllipticArc {
            center: center.into(),
            rx,
            ry,
            start,
            end,
        },
    }
}

fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| poly[i].cross(poly[(i + 1) % n]))
        .sum::<f64>()
        * 0.5
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let t = ((p - a).dot(d) / d.norm_sq()).clamp(0.0, 1.0);
    (a + d * t).distance(p)
}

/// Winding number of a closed polygon around `p`.
fn winding_number(poly: &[Point], p: Point) -> i32 {
    let n = poly.len();
    let mut wn = 0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let side = (b - a).cross(p - a);
        if a.y <= p.y {
            if b.y > p.y && side > 0.0 {
                wn += 1;
            }
        } else if b.y <= p.y && side < 0.0 {
            wn -= 1;
        }
    }
    wn
}

impl Domain {
    pub fn new(spec: DomainSpec) -> Result<Self> {
        Self::with_tolerances(spec, Tolerances::default())
    }

    pub fn with_tolerances(spec: DomainSpec, tol: Tolerances) -> Result<Self> {
        spec.validate()?;
        if !(tol.dense_spacing > 0.0 && tol.target_spacing > 0.0) {
            return Err(Error::InvalidArgument("spacings must be positive".into()));
        }
        let eps_bd = tol.eps_bd_rel * spec.clip_box.diameter();
        let c = spec.clip_box;
        let (mut curves, closed): (Vec<Curve>, bool) = match &spec.kind {
            DomainKind::Disc { radius } => (
                vec![Curve::Arc {
                    center: Point::ORIGIN,
                    radius: *radius,
                    start: 0.0,
                    end: TAU,
                }],
                true,
            ),
            DomainKind::Ellipse { a, b } => (
                vec![Curve::EllipticArc {
                    center: Point::ORIGIN,
                    rx: *a,
                    ry: *b,
                    start: 0.0,
                    end: TAU,
                }],
                true,
            ),
            DomainKind::DiscHalfplane => (
                vec![
                    Curve::Segment {
                        from: Point::new(c.x0, 0.0),
                        to: Point::new(-1.0, 0.0),
                    },
                    Curve::Arc {
                        center: Point::ORIGIN,
                        radius: 1.0,
                        start: PI,
                        end: TAU,
                    },
                    Curve::Segment {
                        from: Point::new(1.0, 0.0),
                        to: Point::new(c.x1, 0.0),
                    },
                ],
                false,
            ),
            DomainKind::GraphPower { p } => graph_pair(GraphLaw::Power(*p), GraphLaw::Power(*p), &spec),
            DomainKind::GraphPiecewiseParabola { c_left, c_right } => graph_pair(
                GraphLaw::Quadratic(*c_left),
                GraphLaw::Quadratic(*c_right),
                &spec,
            ),
            DomainKind::Polyline { vertices } => {
                let mut v = vertices.clone();
                if signed_area(&v) < 0.0 {
                    v.reverse();
                }
                let n = v.len();
                let segs = (0..n)
                    .map(|i| Curve::Segment {
                        from: v[i],
                        to: v[(i + 1) % n],
                    })
                    .collect();
                (segs, true)
            }
            DomainKind::Parametric { pieces, .. } => {
                let mut cs: Vec<Curve> = pieces.iter().map(curve_from_piece_spec).collect();
                let first = cs[0].point(0.0);
                let last = cs[cs.len() - 1].point(1.0);
                let gap = first.distance(last);
                if gap > JOIN_GAP_REL * spec.clip_box.diameter() {
                    return Err(Error::DiscontinuousBoundary {
                        before: cs.len() - 1,
                        after: 0,
                        gap,
                    });
                }
                let poly: Vec<Point> = cs
                    .iter()
                    .flat_map(|c| (0..64).map(move |k| c.point(k as f64 / 64.0)))
                    .collect();
                if signed_area(&poly) < 0.0 {
                    cs = cs.iter().rev().map(Curve::reversed).collect();
                }
                (cs, true)
            }
        };
        if spec.orientation == Orientation::Exterior {
            curves = curves.iter().rev().map(Curve::reversed).collect();
        }
        for (i, cv) in curves.iter().enumerate() {
            if cv.length().is_nan() || cv.length() <= 0.0 {
                return Err(Error::DegenerateBoundary { piece: i });
            }
        }

        let n = curves.len();
        let mut joints = Vec::new();
        let mut start_joint = vec![None; n];
        let mut end_joint = vec![None; n];
        let pairs: Vec<(usize, usize)> = if closed {
            (0..n).map(|i| (i, (i + 1) % n)).collect()
        } else {
            (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect()
        };
        for (a, b) in pairs {
            let pa = curves[a].point(1.0);
            let pb = curves[b].point(0.0);
            let gap = pa.distance(pb);
            if gap > JOIN_GAP_REL * spec.clip_box.diameter() {
                return Err(Error::DiscontinuousBoundary {
                    before: a,
                    after: b,
                    gap,
                });
            }
            let ta = curves[a].tangent(1.0);
            let tb = curves[b].tangent(0.0);
            let tangent_gap = ta.angle_between(tb);
            let smoothness = if tangent_gap > CORNER_ANGLE {
                JointSmoothness::Corner
            } else {
                let ka = curves[a].signed_curvature(1.0);
                let kb = curves[b].signed_curvature(0.0);
                let scale = 1f64.max(ka.abs()).max(kb.abs());
                if ka.is_finite() && kb.is_finite() && (ka - kb).abs() <= 1e-9 * scale {
                    JointSmoothness::Smooth
                } else {
                    JointSmoothness::C1
                }
            };
            end_joint[a] = Some(joints.len());
            start_joint[b] = Some(joints.len());
            joints.push(Joint {
                point: pb,
                before: a,
                after: b,
                smoothness,
                tangent_gap,
            });
        }
        if let DomainKind::Parametric {
            c1_joints: Some(flags),
            ..
        } = &spec.kind
        {
            for j in &joints {
                // flags are indexed by piece in input order
                let idx = if spec.orientation == Orientation::Exterior {
                    n - 1 - j.after
                } else {
                    j.before
                };
                if flags.get(idx).copied().unwrap_or(false) && j.smoothness == JointSmoothness::Corner
                {
                    return Err(Error::JointNotC1 {
                        before: j.before,
                        after: j.after,
                        angle: j.tangent_gap,
                    });
                }
            }
        }

        let dense = DenseBoundary::build(&curves, tol.dense_spacing);
        let polygon = match spec.kind {
            DomainKind::Polyline { .. } => Some(curves.iter().map(|c| c.point(0.0)).collect()),
            DomainKind::Parametric { .. } => Some(
                dense
                    .pieces
                    .iter()
                    .flat_map(|p| p.points[..p.points.len() - 1].iter().copied())
                    .collect(),
            ),
            _ => None,
        };
        Ok(Domain {
            spec,
            tol,
            curves,
            closed,
            joints,
            start_joint,
            end_joint,
            dense,
            polygon,
            eps_bd,
            rho_table: OnceLock::new(),
        })
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn joints(&self) -> &[Joint] {
        &self.joints
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Threshold for "lies on the boundary".
    pub fn eps_bd(&self) -> f64 {
        self.eps_bd
    }

    pub fn diameter(&self) -> f64 {
        self.spec.clip_box.diameter()
    }

    /// True when no joint is a corner.
    pub fn is_c1(&self) -> bool {
        self.joints
            .iter()
            .all(|j| j.smoothness != JointSmoothness::Corner)
    }

    pub(crate) fn start_joint(&self, piece: usize) -> Option<&Joint> {
        self.start_joint[piece].map(|j| &self.joints[j])
    }

    pub(crate) fn end_joint(&self, piece: usize) -> Option<&Joint> {
        self.end_joint[piece].map(|j| &self.joints[j])
    }

    /// Joint located at `param`, if the parameter is a piece endpoint.
    pub fn joint_at(&self, param: BoundaryParam) -> Option<&Joint> {
        if param.s <= 0.0 {
            self.start_joint(param.piece)
        } else if param.s >= 1.0 {
            self.end_joint(param.piece)
        } else {
            None
        }
    }

    /// Signed implicit value: negative inside, positive outside, roughly a distance.
    fn implicit(&self, x: Point) -> f64 {
        let v = match &self.spec.kind {
            DomainKind::Disc { radius } => x.norm() - radius,
            DomainKind::Ellipse { a, b } => {
                ((x.x / a).hypot(x.y / b) - 1.0) * a.min(*b)
            }
            DomainKind::DiscHalfplane => (x.norm() - 1.0).min(-x.y),
            DomainKind::GraphPower { p } => x.x.abs().powf(*p) - x.y,
            DomainKind::GraphPiecewiseParabola { c_left, c_right } => {
                let c = if x.x < 0.0 { c_left } else { c_right };
                c * x.x * x.x - x.y
            }
            DomainKind::Polyline { .. } | DomainKind::Parametric { .. } => {
                let poly = self.polygon.as_ref().expect("polygonal kinds carry a polygon");
                let n = poly.len();
                let dist = (0..n)
                    .map(|i| segment_distance(x, poly[i], poly[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min);
                if winding_number(poly, x) != 0 {
                    -dist
                } else {
                    dist
                }
            }
        };
        match self.spec.orientation {
            Orientation::Interior => v,
            Orientation::Exterior => -v,
        }
    }

    /// Membership in the open set, without the clip-box precondition.
    pub fn contains(&self, x: Point) -> bool {
        x.is_finite() && self.implicit(x) < -self.eps_bd
    }

    pub fn check_query(&self, x: Point) -> Result<()> {
        if !x.is_finite() || !self.spec.query_box().contains(x) {
            return Err(Error::QueryOutsideClipBox { x: x.x, y: x.y });
        }
        Ok(())
    }

    /// `true` iff `x` lies in the domain; `x` must be inside the query box.
    pub fn inside(&self, x: Point) -> Result<bool> {
        self.check_query(x)?;
        Ok(self.contains(x))
    }

    pub(crate) fn require_interior(&self, x: Point) -> Result<()> {
        if !self.inside(x)? {
            return Err(Error::NotInteriorPoint { x: x.x, y: x.y });
        }
        Ok(())
    }

    /// Builds the sample at `param` using that piece's one-sided normal.
    pub fn sample_at(&self, param: BoundaryParam, arc_spacing: f64) -> BoundarySample {
        let curve = &self.curves[param.piece];
        let corner = self
            .joint_at(param)
            .is_some_and(|j| j.smoothness == JointSmoothness::Corner);
        BoundarySample {
            point: curve.point(param.s),
            inner_normal: curve.inner_normal(param.s),
            param,
            arc_spacing,
            corner,
        }
    }

    /// The other one-sided sample at a corner, if `sample` sits on one.
    pub fn corner_twin(&self, sample: &BoundarySample) -> Option<BoundarySample> {
        let j = self.joint_at(sample.param)?;
        if j.smoothness != JointSmoothness::Corner {
            return None;
        }
        let param = if sample.param.s <= 0.0 {
            BoundaryParam {
                piece: j.before,
                s: 1.0,
            }
        } else {
            BoundaryParam {
                piece: j.after,
                s: 0.0,
            }
        };
        Some(self.sample_at(param, sample.arc_spacing))
    }

    /// Samples the boundary with consecutive arc spacing close to `target_spacing`.
    ///
    /// Corner points appear twice, once per one-sided normal.
    pub fn sample_boundary(&self, target_spacing: f64) -> Result<Vec<BoundarySample>> {
        if !(target_spacing > 0.0 && target_spacing < self.diameter()) {
            return Err(Error::InvalidArgument(format!(
                "target spacing {target_spacing} must be positive and below the clip box diameter"
            )));
        }
        let mut out = Vec::new();
        for (pi, curve) in self.curves.iter().enumerate() {
            let len = curve.length();
            if len.is_nan() || len <= 0.0 {
                return Err(Error::DegenerateBoundary { piece: pi });
            }
            let n = (len / target_spacing).round().max(1.0) as usize;
            let (params, step) = curve.arc_uniform_params(n);
            let skip_start = self
                .start_joint(pi)
                .is_some_and(|j| j.smoothness != JointSmoothness::Corner);
            for (k, &s) in params.iter().enumerate() {
                if k == 0 && skip_start {
                    continue;
                }
                out.push(self.sample_at(BoundaryParam { piece: pi, s }, step));
            }
        }
        Ok(out)
    }

    pub fn local_frame(&self, sample: &BoundarySample) -> LocalFrame {
        match self.corner_twin(sample) {
            Some(twin) => {
                let sum = sample.inner_normal + twin.inner_normal;
                let axis = if sum.norm() > 1e-9 {
                    sum.normalized()
                } else {
                    sample.inner_normal
                };
                let gap = self
                    .joint_at(sample.param)
                    .map(|j| j.tangent_gap)
                    .unwrap_or(0.0);
                LocalFrame {
                    origin: sample.point,
                    axis,
                    graph_representable: false,
                    tangent_gap: gap,
                }
            }
            None => LocalFrame {
                origin: sample.point,
                axis: sample.inner_normal,
                graph_representable: true,
                tangent_gap: self
                    .joint_at(sample.param)
                    .map(|j| j.tangent_gap)
                    .unwrap_or(0.0),
            },
        }
    }

    /// Nearest boundary sample to an arbitrary point (dense resolution, then refined).
    pub fn nearest_boundary_sample(&self, x: Point) -> BoundarySample {
        let mut best = (f64::INFINITY, BoundaryParam { piece: 0, s: 0.0 });
        self.dense.visit_near(
            x,
            |_| 0.0,
            |r| {
                let (sa, sb) = self.dense.interval(r);
                let (s, d) = self.curves[r.piece].nearest_on(x, sa, sb);
                if d < best.0 {
                    best = (d, BoundaryParam { piece: r.piece, s });
                }
            },
        );
        self.sample_at(snap_param(best.1), self.tol.dense_spacing)
    }
}

/// Snaps parameters within rounding of a piece end onto the end.
pub(crate) fn snap_param(p: BoundaryParam) -> BoundaryParam {
    let s = if p.s < 1e-12 {
        0.0
    } else if p.s > 1.0 - 1e-12 {
        1.0
    } else {
        p.s
    };
    BoundaryParam { piece: p.piece, s }
}

fn graph_pair(left: GraphLaw, right: GraphLaw, spec: &DomainSpec) -> (Vec<Curve>, bool) {
    // Extend past the clip box so feet of query points never hit the truncation.
    let c = spec.clip_box;
    let top = c.y1 + 0.5 * (c.y1 - c.y0);
    let lx = left.inverse(top);
    let rx = right.inverse(top);
    (
        vec![
            Curve::Graph {
                law: left,
                from: -lx,
                to: 0.0,
            },
            Curve::Graph {
                law: right,
                from: 0.0,
                to: rx,
            },
        ],
        false,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc() -> Domain {
        Domain::new(DomainSpec::disc(1.0)).unwrap()
    }

    #[test]
    fn inside_examples() {
        assert!(disc().inside(Point::new(0.5, 0.0)).unwrap());
        assert!(!disc().inside(Point::new(1.0, 0.0)).unwrap());
        let dh = Domain::new(DomainSpec::disc_halfplane()).unwrap();
        assert!(dh.inside(Point::new(1.0, 1.0)).unwrap());
        assert!(!dh.inside(Point::new(1.5, -0.5)).unwrap());
        assert!(matches!(
            dh.inside(Point::new(3.8, 1.0)),
            Err(Error::QueryOutsideClipBox { .. })
        ));
    }

    #[test]
    fn disc_sampling_covers_circle() {
        let s = disc().sample_boundary(0.01).unwrap();
        assert_eq!(s.len(), 628);
        for b in &s {
            assert!((b.point.norm() - 1.0).abs() < 1e-12);
            assert!((b.inner_normal + b.point).norm() < 1e-12);
        }
    }

    #[test]
    fn disc_halfplane_samples_skip_upper_semicircle() {
        let d = Domain::new(DomainSpec::disc_halfplane()).unwrap();
        let s = d.sample_boundary(0.01).unwrap();
        assert!(s.iter().all(|b| b.point.y <= 1e-12));
        let corners: Vec<_> = s.iter().filter(|b| b.corner).collect();
        assert_eq!(corners.len(), 4);
        for b in &s {
            let t = 1e-3;
            assert!(d.contains(b.point + b.inner_normal * t));
            assert!(!d.contains(b.point - b.inner_normal * t));
            assert!(!d.contains(b.point));
        }
    }

    #[test]
    fn graph_normal_formula() {
        let d = Domain::new(DomainSpec::graph_power(1.5)).unwrap();
        for b in d.sample_boundary(0.01).unwrap() {
            let x = b.point.x;
            let fp = 1.5 * x.abs().sqrt() * x.signum();
            let n = Point::new(-fp, 1.0) / (1.0 + fp * fp).sqrt();
            assert!((b.inner_normal - n).norm() < 1e-9, "{x}");
            assert!((b.point.y - x.abs().powf(1.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn frames() {
        let d = disc();
        let s = d.sample_at(BoundaryParam { piece: 0, s: 0.0 }, 0.01);
        let f = d.local_frame(&s);
        assert_eq!(f.origin, Point::new(1.0, 0.0));
        assert!((f.axis - Point::new(-1.0, 0.0)).norm() < 1e-15);
        assert!(f.graph_representable);

        let e = Domain::new(DomainSpec::ellipse(2.0, 1.0)).unwrap();
        let s = e.sample_at(BoundaryParam { piece: 0, s: 0.0 }, 0.01);
        let f = e.local_frame(&s);
        assert!((f.origin - Point::new(2.0, 0.0)).norm() < 1e-15);
        assert!((f.axis - Point::new(-1.0, 0.0)).norm() < 1e-15);

        let dh = Domain::new(DomainSpec::disc_halfplane()).unwrap();
        let s = dh.sample_at(BoundaryParam { piece: 1, s: 1.0 }, 0.01);
        let f = dh.local_frame(&s);
        assert!(!f.graph_representable);
        let bisector = Point::new(-1.0, 1.0).normalized();
        assert!((f.axis - bisector).norm() < 1e-12);
        assert!((f.origin - Point::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn joints_are_classified() {
        let dh = Domain::new(DomainSpec::disc_halfplane()).unwrap();
        assert!(dh.joints().iter().all(|j| j.smoothness == JointSmoothness::Corner));
        let gp = Domain::new(DomainSpec::graph_power(1.5)).unwrap();
        assert_eq!(gp.joints()[0].smoothness, JointSmoothness::C1);
        let pp = Domain::new(DomainSpec::graph_piecewise_parabola(0.25, 0.5)).unwrap();
        assert_eq!(pp.joints()[0].smoothness, JointSmoothness::C1);
        assert_eq!(disc().joints()[0].smoothness, JointSmoothness::Smooth);
        assert!(!Domain::new(DomainSpec::strip()).unwrap().is_c1());
    }

    #[test]
    fn exterior_orientation_flips_membership_and_normals() {
        let spec = DomainSpec::disc(1.0)
            .with_clip_box(super::super::spec::ClipBox::square(3.0), 0.1)
            .with_orientation(Orientation::Exterior);
        let d = Domain::new(spec).unwrap();
        assert!(d.inside(Point::new(2.0, 0.0)).unwrap());
        assert!(!d.inside(Point::new(0.2, 0.0)).unwrap());
        let s = d.sample_boundary(0.05).unwrap();
        assert!(s.iter().all(|b| (b.inner_normal - b.point).norm() < 1e-12));
    }

    #[test]
    fn parametric_c1_declaration_is_checked() {
        use super::super::spec::PieceSpec;
        let pieces = vec![
            PieceSpec::Segment {
                from: [-1.0, 0.0],
                to: [1.0, 0.0],
            },
            PieceSpec::Arc {
                center: [0.0, 0.0],
                radius: 1.0,
                start: 0.0,
                end: PI,
            },
        ];
        let ok = Domain::new(DomainSpec::parametric(pieces.clone())).unwrap();
        assert!(ok.contains(Point::new(0.0, 0.5)));
        assert!(!ok.contains(Point::new(0.0, -0.5)));
        let mut spec = DomainSpec::parametric(pieces);
        spec.kind = DomainKind::Parametric {
            pieces: match spec.kind {
                DomainKind::Parametric { pieces, .. } => pieces,
                _ => unreachable!(),
            },
            c1_joints: Some(vec![true, false]),
        };
        assert!(matches!(Domain::new(spec), Err(Error::JointNotC1 { .. })));
    }
}
