//! Distance function, metric projection sets and their semicontinuity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{snap_param, BoundaryParam, BoundarySample, Domain, Point};

/// Cosine tolerance when deciding that a piece endpoint is a local minimizer.
const STATIONARY_COS: f64 = 1e-6;
/// Parameters this close to a dense interval end are snapped onto it.
const SNAP: f64 = 1e-9;

/// Full metric projection set of one interior point.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectionResult {
    pub point: Point,
    pub distance: f64,
    /// One representative per cluster, in boundary order.
    pub projections: Vec<BoundarySample>,
    pub is_singleton: bool,
    /// Smallest pairwise distance among representatives, 0 for a singleton.
    pub cluster_gap: f64,
    /// Cluster count before capping.
    pub cluster_count: usize,
}

impl ProjectionResult {
    /// The nearest representative.
    pub fn foot(&self) -> &BoundarySample {
        self.projections
            .iter()
            .min_by(|a, b| {
                a.point
                    .distance(self.point)
                    .total_cmp(&b.point.distance(self.point))
            })
            .expect("projection sets are nonempty")
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    param: BoundaryParam,
    foot: Point,
    value: f64,
}

impl Domain {
    fn cosine(&self, x: Point, param: BoundaryParam) -> f64 {
        let e = self.curves()[param.piece].eval(param.s);
        let r = e.pos - x;
        let n = e.d1.norm() * r.norm();
        if n > 0.0 {
            r.dot(e.d1) / n
        } else {
            0.0
        }
    }

    /// Decides whether a minimizer over one dense interval is a local minimizer
    /// over the whole boundary chain.
    fn is_local_min(&self, x: Point, param: BoundaryParam, sa: f64, sb: f64) -> bool {
        let s = param.s;
        if s > sa && s < sb {
            return true;
        }
        let g = self.cosine(x, param);
        if s <= 0.0 {
            if g < -STATIONARY_COS {
                return false;
            }
            return match self.start_joint(param.piece) {
                Some(j) => {
                    self.cosine(x, BoundaryParam { piece: j.before, s: 1.0 }) <= STATIONARY_COS
                }
                None => true,
            };
        }
        if s >= 1.0 {
            if g > STATIONARY_COS {
                return false;
            }
            return match self.end_joint(param.piece) {
                Some(j) => {
                    self.cosine(x, BoundaryParam { piece: j.after, s: 0.0 }) >= -STATIONARY_COS
                }
                None => true,
            };
        }
        g.abs() <= STATIONARY_COS
    }

    /// Local minimizers whose value may lie within `slack(d)` of the minimum.
    fn local_minima(&self, x: Point, slack: impl Fn(f64) -> f64) -> Vec<Candidate> {
        let mut out = Vec::new();
        self.dense.visit_near(x, slack, |r| {
            let (sa, sb) = self.dense.interval(r);
            let (mut s, _) = self.curves()[r.piece].nearest_on(x, sa, sb);
            if s - sa <= SNAP {
                s = sa;
            } else if sb - s <= SNAP {
                s = sb;
            }
            let param = snap_param(BoundaryParam { piece: r.piece, s });
            if self.is_local_min(x, param, sa, sb) {
                let foot = self.curves()[r.piece].point(param.s);
                out.push(Candidate {
                    param,
                    foot,
                    value: foot.distance(x),
                });
            }
        });
        out
    }

    pub(crate) fn distance_unchecked(&self, x: Point) -> f64 {
        let mut best = f64::INFINITY;
        self.dense.visit_near(
            x,
            |_| 0.0,
            |r| {
                let (sa, sb) = self.dense.interval(r);
                best = best.min(self.curves()[r.piece].nearest_on(x, sa, sb).1);
            },
        );
        best
    }

    /// Distance from an interior point to the boundary.
    pub fn distance(&self, x: Point) -> Result<f64> {
        self.require_interior(x)?;
        Ok(self.distance_unchecked(x))
    }

    /// All global minimizers of the distance to `x`, clustered.
    pub fn project(&self, x: Point) -> Result<ProjectionResult> {
        self.project_at_scale(x, 0.0)
    }

    /// `true` iff `x` has more than one projection cluster.
    pub fn is_skeleton_point(&self, x: Point) -> Result<bool> {
        Ok(!self.project(x)?.is_singleton)
    }

    /// Projection set admitting every local minimizer that would become a global
    /// one somewhere in the box `x + [-w, w]²` (to first order).
    ///
    /// With `w = 0` this is the exact projection set of `x`.
    pub fn project_at_scale(&self, x: Point, w: f64) -> Result<ProjectionResult> {
        self.require_interior(x)?;
        Ok(self.project_at_scale_unchecked(x, w))
    }

    pub(crate) fn project_at_scale_unchecked(&self, x: Point, w: f64) -> ProjectionResult {
        let tol = self.tolerances();
        let tau = tol.tau_rel;
        // |u_i - u_best|_1 never exceeds 2√2
        let mut cands = self.local_minima(x, |d| 2.0 * std::f64::consts::SQRT_2 * w + tau * d);
        if cands.is_empty() {
            // numerically flat corner cases: fall back to the plain minimizer
            let nb = self.nearest_boundary_sample(x);
            cands.push(Candidate {
                param: nb.param,
                foot: nb.point,
                value: nb.point.distance(x),
            });
        }
        cands.sort_by(|a, b| {
            a.value
                .total_cmp(&b.value)
                .then(a.param.piece.cmp(&b.param.piece))
                .then(a.param.s.total_cmp(&b.param.s))
        });
        let best = cands[0];
        let d = best.value;
        let u_best = (x - best.foot) / d;
        let admitted = cands.iter().filter(|c| {
            let u = (x - c.foot) / c.value;
            c.value - d <= w * (u - u_best).l1_norm() + tau * d
        });

        // leader clustering: each candidate joins the first leader within reach
        let radius = tol.cluster_radius();
        let mut leaders: Vec<Candidate> = Vec::new();
        for c in admitted {
            if leaders.iter().all(|l| l.foot.distance(c.foot) > radius) {
                leaders.push(*c);
            }
        }
        let cluster_count = leaders.len();
        leaders.sort_by(|a, b| {
            a.param
                .piece
                .cmp(&b.param.piece)
                .then(a.param.s.total_cmp(&b.param.s))
        });
        let cap = tol.cluster_cap.max(2);
        if leaders.len() > cap {
            let n = leaders.len();
            leaders = (0..cap).map(|i| leaders[i * n / cap]).collect();
        }
        let mut gap = f64::INFINITY;
        for i in 0..leaders.len() {
            for j in i + 1..leaders.len() {
                gap = gap.min(leaders[i].foot.distance(leaders[j].foot));
            }
        }
        let projections: Vec<BoundarySample> = leaders
            .iter()
            .map(|c| self.sample_at(c.param, tol.dense_spacing))
            .collect();
        ProjectionResult {
            point: x,
            distance: d,
            is_singleton: projections.len() == 1,
            cluster_gap: if projections.len() > 1 { gap } else { 0.0 },
            cluster_count,
            projections,
        }
    }
}

/// Deviation of projection sets of nearby points from the projection set at the center.
#[derive(Debug, Clone, Serialize)]
pub struct UscReport {
    pub point: Point,
    pub radii: Vec<f64>,
    pub deviations: Vec<f64>,
    pub epsilon: f64,
    /// Deviations never grow as the radius shrinks.
    pub monotone: bool,
    pub pass: bool,
}

/// Number of probe points on each circle.
pub const USC_PROBES: usize = 64;

/// Probes upper semicontinuity of the projection map at `x`.
///
/// For each radius, the worst one-sided deviation `dist(η, π(x))` over
/// `η ∈ π(y)` and probes `y` on the circle is reported. A foot `η` with
/// `|η − x| = d(x)` (within `eps_proj`) belongs to `π(x)` and deviates by 0.
pub fn usc_probe(domain: &Domain, x: Point, radii: &[f64], epsilon: f64) -> Result<UscReport> {
    let center = domain.project(x)?;
    let d = center.distance;
    if radii.is_empty() || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(
            "usc radii must be a nonempty decreasing list".into(),
        ));
    }
    if radii.iter().any(|&r| !(r > 0.0 && r < 0.5 * d)) {
        return Err(Error::InvalidArgument(format!(
            "usc radii must lie in (0, d(x)/2) = (0, {})",
            0.5 * d
        )));
    }
    let eps_proj = domain.tolerances().eps_proj;
    let mut deviations = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut worst: f64 = 0.0;
        for k in 0..USC_PROBES {
            let theta = std::f64::consts::TAU * k as f64 / USC_PROBES as f64;
            let y = x + Point::polar(theta) * r;
            let py = domain.project(y)?;
            for eta in &py.projections {
                let dev = if (eta.point.distance(x) - d).abs() <= eps_proj {
                    0.0
                } else {
                    center
                        .projections
                        .iter()
                        .map(|xi| xi.point.distance(eta.point))
                        .fold(f64::INFINITY, f64::min)
                };
                worst = worst.max(dev);
            }
        }
        deviations.push(worst);
    }
    let monotone = deviations.windows(2).all(|w| w[1] <= w[0] + eps_proj);
    let pass = *deviations.last().unwrap() < epsilon;
    Ok(UscReport {
        point: x,
        radii: radii.to_vec(),
        deviations,
        epsilon,
        monotone,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;

    #[test]
    fn disc_examples() {
        let d = Domain::new(DomainSpec::disc(1.0)).unwrap();
        assert!((d.distance(Point::new(0.5, 0.0)).unwrap() - 0.5).abs() < 1e-12);
        let p = d.project(Point::new(0.0, 0.0)).unwrap();
        assert!(!p.is_singleton);
        assert!(p.projections.len() >= 8);
        assert!((p.distance - 1.0).abs() < 1e-12);
        let p = d.project(Point::new(0.5, 0.0)).unwrap();
        assert!(p.is_singleton);
        assert!((p.foot().point - Point::new(1.0, 0.0)).norm() < 1e-9);
        assert!(matches!(
            d.distance(Point::new(1.0, 0.0)),
            Err(Error::NotInteriorPoint { .. })
        ));
    }

    #[test]
    fn ellipse_examples() {
        let e = Domain::new(DomainSpec::ellipse(2.0, 1.0)).unwrap();
        assert!((e.distance(Point::ORIGIN).unwrap() - 1.0).abs() < 1e-12);
        let p = e.project(Point::new(1.4, 0.0)).unwrap();
        assert!(!p.is_singleton);
        assert_eq!(p.projections.len(), 2);
        let (a, b) = (p.projections[0].point, p.projections[1].point);
        assert!((a.x - b.x).abs() < 1e-9 && (a.y + b.y).abs() < 1e-9, "{a} {b}");
        assert!(a.y.abs() > 0.1);
    }

    #[test]
    fn disc_halfplane_examples() {
        let dh = Domain::new(DomainSpec::disc_halfplane()).unwrap();
        let p = dh.project(Point::new(1.0, 1.0)).unwrap();
        assert!((p.distance - 1.0).abs() < 1e-12);
        assert!(p.is_singleton);
        assert!((p.foot().point - Point::new(1.0, 0.0)).norm() < 1e-9);
        assert!(dh.is_skeleton_point(Point::new(0.0, 0.5)).unwrap());
        assert!(!dh.is_skeleton_point(Point::new(0.5, 0.5)).unwrap());
    }

    #[test]
    fn scale_window_catches_nearby_ties() {
        let e = Domain::new(DomainSpec::ellipse(2.0, 1.0)).unwrap();
        let x = Point::new(0.3, 0.004);
        assert!(e.project(x).unwrap().is_singleton);
        assert!(!e.project_at_scale(x, 0.005).unwrap().is_singleton);
        assert!(e.project_at_scale(x, 0.003).unwrap().is_singleton);
    }

    #[test]
    fn usc_disc_matches_radial_formula() {
        let d = Domain::new(DomainSpec::disc(1.0)).unwrap();
        let x = Point::new(0.5, 0.0);
        let rep = usc_probe(&d, x, &[0.1, 0.01, 0.001], 0.05).unwrap();
        assert!(rep.pass && rep.monotone);
        for (r, dev) in rep.radii.iter().zip(&rep.deviations) {
            // radial feet y/|y| against (1,0), over the same probes
            let oracle = (0..USC_PROBES)
                .map(|k| {
                    let t = std::f64::consts::TAU * k as f64 / USC_PROBES as f64;
                    let phi = (r * t.sin()).atan2(0.5 + r * t.cos());
                    2.0 * (phi.abs() / 2.0).sin()
                })
                .fold(0.0, f64::max);
            assert!(oracle <= 2.0 * ((r / 0.5f64).asin() / 2.0).sin() + 1e-15);
            assert!((dev - oracle).abs() < 1e-9, "{r}: {dev} vs {oracle}");
        }
        let rep = usc_probe(&d, Point::ORIGIN, &[0.1, 0.01], 0.05).unwrap();
        assert!(rep.pass);
        assert!(rep.deviations.iter().all(|&v| v == 0.0));
    }
}
