//! Skeleton detection on a grid, the cut-locus classifier, the non-spreading
//! perpendicular diagnostic and the two-direction agreement report.

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::Radius;
use crate::error::{Error, Result};
use crate::geometry::{BoundarySample, Domain, LocalFrame, Point};
use crate::grid::Grid;
use crate::projection::ProjectionResult;

/// Detected skeleton on a grid and its closure approximation.
#[derive(Debug, Clone, Serialize)]
pub struct SkeletonMask {
    pub grid: Grid,
    pub interior: Vec<bool>,
    /// Cells whose center box is crossed by a tie between two projections.
    pub flagged: Vec<bool>,
    /// One-cell dilation of `flagged`, restricted to interior cells.
    pub closure: Vec<bool>,
    pub dilation_radius: f64,
}

impl SkeletonMask {
    pub fn flagged_centers(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.grid.len())
            .filter(|&k| self.flagged[k])
            .map(|k| self.grid.center_of(k))
    }

    pub fn closure_centers(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.grid.len())
            .filter(|&k| self.closure[k])
            .map(|k| self.grid.center_of(k))
    }

    pub fn flagged_count(&self) -> usize {
        self.flagged.iter().filter(|&&f| f).count()
    }

    /// Interior cells within `band` of a cell whose closure membership differs.
    pub fn near_transition(&self, band: f64) -> Vec<bool> {
        let g = &self.grid;
        let r = (band / g.h).ceil() as usize;
        (0..g.len())
            .map(|k| {
                self.interior[k]
                    && g.neighbors(k, r).any(|n| {
                        self.interior[n]
                            && self.closure[n] != self.closure[k]
                            && g.center_of(n).distance(g.center_of(k)) <= band + 1e-12
                    })
            })
            .collect()
    }

    /// Interior cells within `dist` of a closure cell (including closure cells).
    pub fn near_closure(&self, dist: f64) -> Vec<bool> {
        let g = &self.grid;
        let r = (dist / g.h).ceil() as usize;
        (0..g.len())
            .map(|k| {
                self.interior[k]
                    && (self.closure[k]
                        || g.neighbors(k, r).any(|n| {
                            self.closure[n] && g.center_of(n).distance(g.center_of(k)) <= dist + 1e-12
                        }))
            })
            .collect()
    }
}

/// Flags every interior cell whose box `center ± h/2` contains a projection tie.
pub fn detect_skeleton(domain: &Domain, h: f64) -> Result<SkeletonMask> {
    let grid = Grid::for_domain(domain, h)?;
    let interior = grid.interior(domain);
    let flagged: Vec<bool> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            interior[k]
                && !domain
                    .project_at_scale_unchecked(grid.center_of(k), 0.5 * h)
                    .is_singleton
        })
        .collect();
    let closure: Vec<bool> = (0..grid.len())
        .map(|k| interior[k] && (flagged[k] || grid.neighbors(k, 1).any(|n| flagged[n])))
        .collect();
    Ok(SkeletonMask {
        grid,
        interior,
        flagged,
        closure,
        dilation_radius: std::f64::consts::SQRT_2 * h,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    RegularPoint,
    CutLocusPoint,
    BoundaryCase,
}

impl Classification {
    pub fn name(&self) -> &'static str {
        match self {
            Classification::RegularPoint => "RegularPoint",
            Classification::CutLocusPoint => "CutLocusPoint",
            Classification::BoundaryCase => "BoundaryCase",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A classification with the quantities that decided it.
#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub point: Point,
    pub classification: Classification,
    pub distance: f64,
    pub resolution: f64,
    pub projections: Vec<BoundarySample>,
    /// ρ* at the unique projection; absent for multi-projection points.
    pub rho_star: Option<Radius>,
}

/// Decides `x ∈ Ω∖Σ̄` from the projection set and the envelope radius.
pub fn classify(domain: &Domain, x: Point, resolution: f64) -> Result<ClassifyReport> {
    if resolution.is_nan() || resolution <= 0.0 {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let p = domain.project(x)?;
    classify_projection(domain, p, resolution)
}

/// Classification of a grid cell center (already known to be interior).
pub(crate) fn classify_cell(domain: &Domain, x: Point, resolution: f64) -> Result<Classification> {
    let p = domain.project_at_scale_unchecked(x, 0.0);
    classify_projection(domain, p, resolution).map(|r| r.classification)
}

fn classify_projection(domain: &Domain, p: ProjectionResult, resolution: f64) -> Result<ClassifyReport> {
    let (classification, rho_star) = if !p.is_singleton {
        (Classification::CutLocusPoint, None)
    } else {
        let rs = domain.rho_star_fast(p.foot())?;
        let d = p.distance;
        let c = if d < rs.value() - resolution {
            Classification::RegularPoint
        } else if d > rs.value() + resolution {
            Classification::CutLocusPoint
        } else {
            Classification::BoundaryCase
        };
        (c, Some(rs))
    };
    Ok(ClassifyReport {
        point: p.point,
        classification,
        distance: p.distance,
        resolution,
        projections: p.projections,
        rho_star,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Vacuous,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Vacuous => "VACUOUS",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NonspreadingReport {
    pub sample: BoundarySample,
    pub frame: LocalFrame,
    /// Interior points found with `sample.point` among their projections.
    pub pullback: Vec<Point>,
    /// Largest angle (radians) between two pull-back directions seen from the sample.
    pub angular_spread: f64,
    pub verdict: Verdict,
}

/// Pull-back points farther than this angle apart make the perpendicular spread.
pub const SPREAD_ANGLE_DEG: f64 = 5.0;
const MARCH_DIRECTIONS: usize = 64;
const MARCH_RADII: usize = 16;
/// `ξ ∈ π(y)` when `|ξ − y|` exceeds `d(y)` by at most this fraction of itself.
const PULLBACK_REL: f64 = 1e-6;

/// Samples the pull-back `π⁻¹({ξ})` and checks it lies on one line along which
/// the boundary is a graph.
pub fn nonspreading_diagnostic(
    domain: &Domain,
    xi: &BoundarySample,
    probe_count: usize,
) -> NonspreadingReport {
    let frame = domain.local_frame(xi);
    let mut dirs: Vec<Point> = (0..MARCH_DIRECTIONS)
        .map(|k| Point::polar(std::f64::consts::TAU * k as f64 / MARCH_DIRECTIONS as f64))
        .collect();
    dirs.push(xi.inner_normal);
    if let Some(twin) = domain.corner_twin(xi) {
        dirs.push(twin.inner_normal);
    }
    let t_max = 0.25 * domain.diameter();
    let mut pullback = Vec::new();
    'search: for dir in &dirs {
        for m in 0..MARCH_RADII {
            let t = t_max * 0.5f64.powi(m as i32);
            let y = xi.point + *dir * t;
            if domain.check_query(y).is_err() || !domain.contains(y) {
                continue;
            }
            let d = domain.distance_unchecked(y);
            let t = xi.point.distance(y);
            if t - d <= PULLBACK_REL * t {
                pullback.push(y);
                if pullback.len() >= probe_count {
                    break 'search;
                }
            }
        }
    }
    let units: Vec<Point> = pullback
        .iter()
        .map(|&y| (y - xi.point).normalized())
        .collect();
    let mut spread: f64 = 0.0;
    for i in 0..units.len() {
        for j in i + 1..units.len() {
            spread = spread.max(units[i].angle_between(units[j]));
        }
    }
    let verdict = if pullback.is_empty() {
        Verdict::Vacuous
    } else if spread >= SPREAD_ANGLE_DEG.to_radians() {
        Verdict::Fail
    } else {
        let line = units.iter().fold(Point::ORIGIN, |a, &u| a + u).normalized();
        let transversal = line.dot(frame.axis) > 85f64.to_radians().cos();
        if frame.graph_representable && transversal {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    };
    NonspreadingReport {
        sample: *xi,
        frame,
        pullback,
        angular_spread: spread,
        verdict,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Disagreement {
    pub x: f64,
    pub y: f64,
    pub expected: Classification,
    pub got: Classification,
}

/// Comparison of the classifier with the detected skeleton closure.
#[derive(Debug, Clone, Serialize)]
pub struct AgreementReport {
    pub h: f64,
    pub band: f64,
    pub agreement: f64,
    pub n_cells: usize,
    pub disagreements: Vec<Disagreement>,
    /// Cells outside the closure classified as cut locus.
    pub only_if_violations: usize,
    /// Cells inside the closure classified as regular.
    pub if_violations: usize,
    /// Closure cells standing in for skeleton endpoints (see [`endpoint_cells`]).
    pub endpoint_cells: usize,
    /// Largest `ρ* − d` over those cells.
    pub max_rho_star_minus_d: f64,
    /// Endpoint cells with `d < ρ* − tol_theorem`.
    pub endpoint_violations: usize,
}

/// Closure cells standing in for `Σ̄∖Σ`: not flagged themselves, with a
/// single projection `ξ` lying between two competing projections of a flagged
/// neighbor, all of them close to `ξ` (the feet of the skeleton merge into `ξ`).
///
/// Returns each cell center with its distance and envelope radius.
pub fn endpoint_cells(domain: &Domain, mask: &SkeletonMask) -> Result<Vec<(Point, f64, Radius)>> {
    let g = mask.grid;
    let h = g.h;
    let cells: Vec<usize> = (0..g.len())
        .filter(|&k| mask.closure[k] && !mask.flagged[k])
        .collect();
    let out: Vec<Option<(Point, f64, Radius)>> = cells
        .par_iter()
        .map(|&k| {
            let x = g.center_of(k);
            let p = domain.project_at_scale_unchecked(x, 0.0);
            if !p.is_singleton {
                return Ok(None);
            }
            let xi = p.foot().point;
            // feet of skeleton points at distance δ from a focal endpoint sit
            // about sqrt(2 δ d) away from the merged foot
            let reach = 2.0 * (2.0 * h * p.distance).sqrt();
            let merging = g.neighbors(k, 1).filter(|&n| mask.flagged[n]).any(|n| {
                let q = domain.project_at_scale_unchecked(g.center_of(n), 0.5 * h);
                let feet = &q.projections;
                feet.iter().all(|f| f.point.distance(xi) <= reach)
                    && (0..feet.len()).any(|i| {
                        (i + 1..feet.len())
                            .any(|j| (xi - feet[i].point).dot(xi - feet[j].point) <= 1e-12)
                    })
            });
            if !merging {
                return Ok(None);
            }
            let rs = domain.rho_star_fast(p.foot())?;
            Ok(Some((x, p.distance, rs)))
        })
        .collect::<Result<_>>()?;
    Ok(out.into_iter().flatten().collect())
}

/// Two-direction agreement of the classifier with the detected closure, away
/// from the closure's transition band.
pub fn agreement_report(domain: &Domain, h: f64, band: f64) -> Result<AgreementReport> {
    if !domain.is_c1() {
        return Err(Error::RequiresC1Boundary);
    }
    let mask = detect_skeleton(domain, h)?;
    agreement_from_mask(domain, &mask, band)
}

pub fn agreement_from_mask(
    domain: &Domain,
    mask: &SkeletonMask,
    band: f64,
) -> Result<AgreementReport> {
    let g = mask.grid;
    let h = g.h;
    let excluded = mask.near_transition(band);
    let cells: Vec<usize> = (0..g.len())
        .filter(|&k| mask.interior[k] && !excluded[k])
        .collect();
    let results: Vec<(usize, Classification)> = cells
        .par_iter()
        .map(|&k| classify_cell(domain, g.center_of(k), h).map(|c| (k, c)))
        .collect::<Result<_>>()?;
    let mut disagreements = Vec::new();
    let (mut if_v, mut only_if_v) = (0, 0);
    for &(k, got) in &results {
        let expected = if mask.closure[k] {
            Classification::CutLocusPoint
        } else {
            Classification::RegularPoint
        };
        if got != expected {
            let c = g.center_of(k);
            match (expected, got) {
                (Classification::RegularPoint, Classification::CutLocusPoint) => only_if_v += 1,
                (Classification::CutLocusPoint, Classification::RegularPoint) => if_v += 1,
                _ => {}
            }
            disagreements.push(Disagreement {
                x: c.x,
                y: c.y,
                expected,
                got,
            });
        }
    }
    let n = results.len();
    let ends = endpoint_cells(domain, mask)?;
    let mut max_gap = f64::NEG_INFINITY;
    let mut end_v = 0;
    for (_, d, rs) in &ends {
        max_gap = max_gap.max(rs.value() - d);
        if *d < rs.value() - domain.tolerances().tol_theorem(h, rs.uncertainty()) {
            end_v += 1;
        }
    }
    Ok(AgreementReport {
        h,
        band,
        agreement: if n == 0 {
            1.0
        } else {
            (n - disagreements.len()) as f64 / n as f64
        },
        n_cells: n,
        disagreements,
        only_if_violations: only_if_v,
        if_violations: if_v,
        endpoint_cells: ends.len(),
        max_rho_star_minus_d: max_gap,
        endpoint_violations: end_v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoundaryParam, DomainSpec};

    #[test]
    fn classify_examples() {
        let disc = Domain::new(DomainSpec::disc(1.0)).unwrap();
        let r = classify(&disc, Point::new(0.5, 0.0), 1e-3).unwrap();
        assert_eq!(r.classification, Classification::RegularPoint);
        assert!((r.rho_star.unwrap().value() - 1.0).abs() < 1e-6);
        assert_eq!(
            classify(&disc, Point::ORIGIN, 1e-3).unwrap().classification,
            Classification::CutLocusPoint
        );

        let e = Domain::new(DomainSpec::ellipse(2.0, 1.0)).unwrap();
        let r = classify(&e, Point::new(1.5, 0.0), 1e-3).unwrap();
        assert_eq!(r.classification, Classification::BoundaryCase);
        assert!((r.distance - 0.5).abs() < 1e-9);
        assert!((r.rho_star.unwrap().value() - 0.5).abs() < 1e-3);

        let dh = Domain::new(DomainSpec::disc_halfplane()).unwrap();
        for res in [1e-2, 3e-3, 1e-3] {
            let r = classify(&dh, Point::new(1.0, 1.0), res).unwrap();
            assert_eq!(r.classification, Classification::BoundaryCase, "{res}");
        }
    }

    #[test]
    fn nonspreading_examples() {
        let disc = Domain::new(DomainSpec::disc(1.0)).unwrap();
        let xi = disc.sample_at(BoundaryParam { piece: 0, s: 0.0 }, 0.01);
        let r = nonspreading_diagnostic(&disc, &xi, 32);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.pullback.iter().all(|p| p.y.abs() < 1e-12 && p.x < 1.0));

        let dh = Domain::new(DomainSpec::disc_halfplane()).unwrap();
        let xi = dh.sample_at(BoundaryParam { piece: 2, s: 0.0 }, 0.01);
        let r = nonspreading_diagnostic(&dh, &xi, 4096);
        assert_eq!(r.verdict, Verdict::Fail);
        // the whole normal cone between the two one-sided normals pulls back
        assert!(r.pullback.iter().any(|p| (p.x - 1.0).abs() < 1e-12 && p.y > 0.0));
        assert!(r.pullback.iter().any(|p| p.y.abs() < 1e-12 && p.x < 1.0));
        assert!(r.angular_spread > 80f64.to_radians());

        let gp = Domain::new(DomainSpec::graph_power(1.5)).unwrap();
        let xi = gp.sample_at(BoundaryParam { piece: 1, s: 0.0 }, 0.01);
        let r = nonspreading_diagnostic(&gp, &xi, 32);
        assert!(matches!(r.verdict, Verdict::Vacuous | Verdict::Pass), "{:?}", r.pullback);
    }

    #[test]
    fn disc_skeleton_is_the_center() {
        let disc = Domain::new(DomainSpec::disc(1.0)).unwrap();
        let m = detect_skeleton(&disc, 1.0 / 64.0).unwrap();
        assert!(m.flagged_count() >= 1);
        for c in m.flagged_centers() {
            assert!(c.norm() <= 2.0 / 64.0 + 1e-12, "{c}");
        }
    }

    #[test]
    fn agreement_requires_c1() {
        let dh = Domain::new(DomainSpec::disc_halfplane()).unwrap();
        assert!(matches!(
            agreement_report(&dh, 1.0 / 64.0, 2.0 / 64.0),
            Err(Error::RequiresC1Boundary)
        ));
    }
}
