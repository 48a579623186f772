//! Radius of inner curvature from locally inner touching balls, its lower
//! semicontinuous envelope, and the curvature cross-check.

use std::cmp::Ordering;
use std::f64::consts::FRAC_PI_3;

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{BoundarySample, Domain, JointSmoothness, Point};

/// A nonnegative radius, possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Radius {
    /// `uncertainty` is the half-width of the bisection bracket.
    Finite { value: f64, uncertainty: f64 },
    Unbounded,
}

impl Radius {
    pub fn exact(value: f64) -> Self {
        Radius::Finite {
            value,
            uncertainty: 0.0,
        }
    }

    /// Numeric value, `+∞` when unbounded.
    pub fn value(&self) -> f64 {
        match *self {
            Radius::Finite { value, .. } => value,
            Radius::Unbounded => f64::INFINITY,
        }
    }

    pub fn uncertainty(&self) -> f64 {
        match *self {
            Radius::Finite { uncertainty, .. } => uncertainty,
            Radius::Unbounded => 0.0,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, Radius::Unbounded)
    }

    pub fn min(self, other: Radius) -> Radius {
        if other.value() < self.value() {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Radius) -> Radius {
        if other.value() > self.value() {
            other
        } else {
            self
        }
    }
}

impl PartialOrd for Radius {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value().partial_cmp(&other.value())
    }
}

impl std::fmt::Display for Radius {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Radius::Finite { value, uncertainty } => write!(f, "{value} ± {uncertainty:e}"),
            Radius::Unbounded => f.write_str("inf"),
        }
    }
}

impl Serialize for Radius {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Radius", 2)?;
        match self {
            Radius::Finite { value, uncertainty } => {
                st.serialize_field("value", value)?;
                st.serialize_field("uncertainty", uncertainty)?;
            }
            Radius::Unbounded => {
                st.serialize_field("value", "inf")?;
                st.serialize_field("uncertainty", &0.0)?;
            }
        }
        st.end()
    }
}

/// Outcome of one touching-ball test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BallTest {
    Touching,
    Crossing,
    /// The neighborhood is too small for the dense sampling to resolve.
    Indeterminate,
}

/// Radius of inner curvature at one sample, with diagnostics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RhoEstimate {
    pub radius: Radius,
    /// Some test in the bisection could not be resolved (counted as crossing).
    pub indeterminate: bool,
    /// Halving the neighborhood changed the answer by more than 1%.
    pub locality_sensitive: bool,
}

/// Envelope value with the inf at every stage of the radius schedule.
#[derive(Debug, Clone, Serialize)]
pub struct RhoStar {
    pub radius: Radius,
    pub trace: Vec<(f64, Radius)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RhoTableEntry {
    /// Arc length from the start of the boundary chain.
    pub arc: f64,
    pub sample: BoundarySample,
    pub rho: RhoEstimate,
    /// `rho`, or the larger value of the two one-sided samples at a corner.
    pub aggregated: Radius,
}

/// ρ over a boundary sampling at the target spacing, built once per domain.
#[derive(Debug, Clone)]
pub struct RhoTable {
    pub spacing: f64,
    pub entries: Vec<RhoTableEntry>,
}

impl RhoTable {
    /// Smallest aggregated ρ among entries within `r` of `p`.
    pub fn inf_within(&self, p: Point, r: f64) -> Radius {
        self.entries
            .iter()
            .filter(|e| e.sample.point.distance(p) <= r)
            .fold(Radius::Unbounded, |acc, e| acc.min(e.aggregated))
    }
}

impl Domain {
    fn r_min(&self) -> f64 {
        2.0 * self.tolerances().target_spacing
    }

    fn r_max(&self) -> f64 {
        4.0 * self.diameter()
    }

    /// Tests the ball of radius `r` tangent at `xi` against the boundary within
    /// `min(r, locality)` of `xi`.
    pub fn touching_ball_test(&self, xi: &BoundarySample, r: f64, locality: f64) -> BallTest {
        if r <= 0.0 {
            return BallTest::Touching;
        }
        let loc = r.min(locality);
        if loc < 2.0 * self.tolerances().dense_spacing {
            return BallTest::Indeterminate;
        }
        let c = xi.point + xi.inner_normal * r;
        let limit = r - self.eps_bd();
        let mut crossing = false;
        self.dense.visit_within(xi.point, loc, |iv| {
            if crossing {
                return;
            }
            let (sa, sb) = self.dense.interval(iv);
            if self.curves()[iv.piece].nearest_on(c, sa, sb).1 < limit {
                crossing = true;
            }
        });
        if crossing {
            return BallTest::Crossing;
        }
        // points of the ball close to xi must lie in the domain
        let clip = self.spec().clip_box;
        for psi in [-FRAC_PI_3, 0.0, FRAC_PI_3] {
            let dir = xi.inner_normal.rotated(psi);
            for t in [0.25 * loc, 0.5 * loc] {
                let p = xi.point + dir * t;
                if clip.contains(p) && !self.contains(p) {
                    return BallTest::Crossing;
                }
            }
        }
        BallTest::Touching
    }

    pub fn is_touching_ball(&self, xi: &BoundarySample, r: f64, locality: f64) -> bool {
        self.touching_ball_test(xi, r, locality) == BallTest::Touching
    }

    /// Bisection for the largest touching radius below `cap` (at most `r_max`).
    fn rho_bisect(&self, xi: &BoundarySample, locality: f64, cap: f64) -> (Radius, bool) {
        let mut indeterminate = false;
        let mut touching = |r: f64| match self.touching_ball_test(xi, r, locality) {
            BallTest::Touching => true,
            BallTest::Crossing => false,
            BallTest::Indeterminate => {
                indeterminate = true;
                false
            }
        };
        let r_max = self.r_max();
        let hi0 = cap.min(r_max);
        if hi0 >= r_max && touching(r_max) {
            return (Radius::Unbounded, false);
        }
        let r_min = self.r_min();
        if !touching(r_min) {
            return (
                Radius::Finite {
                    value: 0.0,
                    uncertainty: r_min,
                },
                indeterminate,
            );
        }
        let (mut lo, mut hi) = (r_min, hi0);
        for _ in 0..self.tolerances().bisection_steps {
            let mid = 0.5 * (lo + hi);
            if touching(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Near the threshold the test is only as sharp as the boundary
        // tolerance; widen the half-width until r ± 2u test as they should.
        let value = 0.5 * (lo + hi);
        let mut u = 0.5 * (hi - lo);
        for _ in 0..64 {
            let below = value - 2.0 * u;
            let above = value + 2.0 * u;
            let below_ok = below <= r_min || touching(below);
            let above_ok = above >= hi0 || !touching(above);
            if below_ok && above_ok {
                break;
            }
            u *= 2.0;
        }
        (
            Radius::Finite {
                value,
                uncertainty: u,
            },
            indeterminate,
        )
    }

    /// ρ at `xi` for this sample's normal, with an explicit neighborhood bound.
    pub fn rho_with_locality(&self, xi: &BoundarySample, locality: f64) -> RhoEstimate {
        let (radius, indeterminate) = self.rho_bisect(xi, locality, f64::INFINITY);
        RhoEstimate {
            radius,
            indeterminate,
            locality_sensitive: false,
        }
    }

    /// Radius of inner curvature at `xi` (for this sample's one-sided normal).
    pub fn rho(&self, xi: &BoundarySample) -> RhoEstimate {
        let lambda = self.tolerances().locality;
        let mut est = self.rho_with_locality(xi, lambda);
        let half = self.rho_with_locality(xi, 0.5 * lambda);
        est.indeterminate |= half.indeterminate;
        est.locality_sensitive = match (est.radius, half.radius) {
            (Radius::Unbounded, Radius::Unbounded) => false,
            (a, b) if a.is_unbounded() || b.is_unbounded() => true,
            (a, b) => (a.value() - b.value()).abs() > 1e-2 * a.value().max(b.value()).max(1e-12),
        };
        est
    }

    /// ρ at the point of `xi`: the larger value over both one-sided normals at a corner.
    pub fn rho_aggregated(&self, xi: &BoundarySample) -> Radius {
        let own = self.rho(xi).radius;
        match self.corner_twin(xi) {
            Some(twin) => own.max(self.rho(&twin).radius),
            None => own,
        }
    }

    /// `1/κ` from the analytic parametrization; unbounded where `κ ≤ 0`.
    pub fn rho_from_curvature(&self, xi: &BoundarySample) -> Result<Radius> {
        if let Some(j) = self.joint_at(xi.param) {
            if j.smoothness != JointSmoothness::Smooth {
                return Err(Error::NotC2At {
                    x: xi.point.x,
                    y: xi.point.y,
                });
            }
        }
        let k = self.curves()[xi.param.piece].signed_curvature(xi.param.s);
        if !k.is_finite() {
            return Err(Error::NotC2At {
                x: xi.point.x,
                y: xi.point.y,
            });
        }
        Ok(if k <= 0.0 {
            Radius::Unbounded
        } else {
            Radius::exact(1.0 / k)
        })
    }

    /// ρ over the boundary sampling at the target spacing (computed once, in parallel).
    pub fn rho_table(&self) -> &RhoTable {
        self.rho_table.get_or_init(|| {
            let spacing = self.tolerances().target_spacing;
            let samples = self
                .sample_boundary(spacing)
                .expect("target spacing is validated against the clip box");
            let mut offsets = Vec::with_capacity(self.curves().len());
            let mut acc = 0.0;
            for c in self.curves() {
                offsets.push(acc);
                acc += c.length();
            }
            let rhos: Vec<RhoEstimate> = samples.par_iter().map(|s| self.rho(s)).collect();
            let mut entries: Vec<RhoTableEntry> = samples
                .iter()
                .zip(&rhos)
                .map(|(s, r)| RhoTableEntry {
                    arc: offsets[s.param.piece] + s.param.s * self.curves()[s.param.piece].length(),
                    sample: *s,
                    rho: *r,
                    aggregated: r.radius,
                })
                .collect();
            // corner duplicates are adjacent: (piece end, next piece start)
            for i in 0..entries.len() {
                if !entries[i].sample.corner {
                    continue;
                }
                let p = entries[i].sample.point;
                let twin = entries
                    .iter()
                    .enumerate()
                    .filter(|(k, e)| *k != i && e.sample.corner && e.sample.point.distance(p) < 1e-12)
                    .map(|(_, e)| e.rho.radius)
                    .fold(entries[i].rho.radius, Radius::max);
                entries[i].aggregated = twin;
            }
            RhoTable { spacing, entries }
        })
    }

    fn check_env_radii(&self, env_radii: &[f64]) -> Result<()> {
        let spacing = self.tolerances().target_spacing;
        if env_radii.is_empty() || env_radii.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidArgument(
                "env_radii must be a nonempty decreasing list".into(),
            ));
        }
        if let Some(&r) = env_radii.iter().find(|&&r| r < 2.0 * spacing) {
            return Err(Error::EnvelopeRadiusBelowSampling { radius: r, spacing });
        }
        Ok(())
    }

    /// Lower semicontinuous envelope of ρ at `xi` over the shrinking schedule.
    pub fn rho_star(&self, xi: &BoundarySample, env_radii: &[f64]) -> Result<RhoStar> {
        self.check_env_radii(env_radii)?;
        let own = self.rho_aggregated(xi);
        let table = self.rho_table();
        let trace: Vec<(f64, Radius)> = env_radii
            .iter()
            .map(|&r| (r, own.min(table.inf_within(xi.point, r))))
            .collect();
        Ok(RhoStar {
            radius: trace.last().unwrap().1,
            trace,
        })
    }

    /// ρ* at the smallest envelope radius, testing the own value only up to the
    /// neighborhood infimum.
    pub(crate) fn rho_star_fast(&self, xi: &BoundarySample) -> Result<Radius> {
        let radii = &self.tolerances().env_radii;
        self.check_env_radii(radii)?;
        let r = *radii.last().unwrap();
        let m = self.rho_table().inf_within(xi.point, r);
        let lambda = self.tolerances().locality;
        let mut best = Radius::exact(0.0);
        for s in std::iter::once(*xi).chain(self.corner_twin(xi)) {
            let own = match m {
                Radius::Unbounded => self.rho_bisect(&s, lambda, f64::INFINITY).0,
                Radius::Finite { value, .. } => {
                    if self.is_touching_ball(&s, value, lambda) {
                        return Ok(m);
                    }
                    self.rho_bisect(&s, lambda, value).0
                }
            };
            best = best.max(own);
        }
        Ok(best.min(m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoundaryParam, DomainSpec};

    fn at(d: &Domain, piece: usize, s: f64) -> BoundarySample {
        d.sample_at(BoundaryParam { piece, s }, 0.01)
    }

    #[test]
    fn touching_examples() {
        let disc = Domain::new(DomainSpec::disc(1.0)).unwrap();
        let xi = at(&disc, 0, 0.0);
        assert!(disc.is_touching_ball(&xi, 1.0, 0.5));
        assert!(disc.is_touching_ball(&xi, 1.0, 0.05));
        assert!(!disc.is_touching_ball(&xi, 1.01, 0.5));
        // oracle: circle points within 0.5 of xi strictly inside B_1.01((-0.01, 0))
        let inside = (1..100)
            .map(|k| k as f64 * 0.005)
            .any(|t| Point::new(t.cos() + 0.01, t.sin()).norm() < 1.01 - 1e-9);
        assert!(inside);

        let dh = Domain::new(DomainSpec::disc_halfplane()).unwrap();
        let flat = dh.nearest_boundary_sample(Point::new(2.0, 0.5));
        assert!((flat.point - Point::new(2.0, 0.0)).norm() < 1e-9);
        assert!(dh.is_touching_ball(&flat, 10.0, 0.5));
        assert_eq!(dh.touching_ball_test(&flat, 1.0, 1e-3), BallTest::Indeterminate);
    }

    #[test]
    fn rho_examples() {
        let disc = Domain::new(DomainSpec::disc(1.0)).unwrap();
        for s in [0.0, 0.3, 0.77] {
            let r = disc.rho(&at(&disc, 0, s));
            assert!((r.radius.value() - 1.0).abs() < 1e-6, "{}", r.radius);
            assert!(!r.locality_sensitive && !r.indeterminate);
        }
        let gp = Domain::new(DomainSpec::graph_power(1.5)).unwrap();
        let origin = at(&gp, 1, 0.0);
        assert_eq!(origin.point, Point::ORIGIN);
        assert_eq!(gp.rho(&origin).radius.value(), 0.0);
    }

    #[test]
    fn curvature_examples() {
        let e = Domain::new(DomainSpec::ellipse(2.0, 1.0)).unwrap();
        let v = e.rho_from_curvature(&at(&e, 0, 0.0)).unwrap();
        assert!((v.value() - 0.5).abs() < 1e-12);
        let cv = e.rho_from_curvature(&at(&e, 0, 0.25)).unwrap();
        assert!((cv.value() - 4.0).abs() < 1e-9);
        let dh = Domain::new(DomainSpec::disc_halfplane()).unwrap();
        let flat = dh.nearest_boundary_sample(Point::new(3.0, 0.5));
        assert!(dh.rho_from_curvature(&flat).unwrap().is_unbounded());
        assert!(matches!(
            dh.rho_from_curvature(&at(&dh, 2, 0.0)),
            Err(Error::NotC2At { .. })
        ));
    }

    #[test]
    fn rho_star_examples() {
        let disc = Domain::new(DomainSpec::disc(1.0)).unwrap();
        let rs = disc.rho_star(&at(&disc, 0, 0.1), &[0.4, 0.2, 0.1]).unwrap();
        for (_, r) in &rs.trace {
            assert!((r.value() - 1.0).abs() < 1e-6);
        }
        assert!(matches!(
            disc.rho_star(&at(&disc, 0, 0.1), &[0.4, 0.01]),
            Err(Error::EnvelopeRadiusBelowSampling { .. })
        ));
        let pp = Domain::new(DomainSpec::graph_piecewise_parabola(0.25, 0.5)).unwrap();
        let origin = at(&pp, 1, 0.0);
        let rs = pp.rho_star(&origin, &[0.4, 0.2, 0.1]).unwrap();
        assert!((rs.radius.value() - 1.0).abs() < 0.05, "{}", rs.radius);
        let fast = pp.rho_star_fast(&origin).unwrap();
        assert!((fast.value() - rs.radius.value()).abs() < 1e-6);
    }

    #[test]
    fn radius_ordering() {
        assert!(Radius::Unbounded > Radius::exact(1e300));
        assert_eq!(Radius::exact(2.0).min(Radius::Unbounded), Radius::exact(2.0));
        assert!(serde_json::to_string(&Radius::Unbounded).unwrap().contains("\"inf\""));
    }
}
