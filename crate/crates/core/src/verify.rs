//! Per-domain verification suites with independent analytic oracles.
//!
//! Each check carries the number of the acceptance criterion it belongs to,
//! or `None` for supplementary checks.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::Radius;
use crate::cutlocus::{
    agreement_from_mask, classify, detect_skeleton, endpoint_cells, nonspreading_diagnostic,
    Classification, Verdict,
};
use crate::eikonal::{error_report, solve, CellState};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryParam, Domain, DomainKind, DomainSpec, Point};
use crate::projection::usc_probe;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub criterion: Option<u8>,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub domain: String,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    pub h: f64,
    /// Boundary samples of the brute-force distance oracle.
    pub brute_samples: usize,
    /// Random interior points compared against the oracle.
    pub brute_points: usize,
    pub tolerances: Tolerances,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 20240517,
            h: 1.0 / 64.0,
            brute_samples: 1_000_000,
            brute_points: 1_000,
            tolerances: Tolerances::default(),
        }
    }
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn run(&mut self, criterion: Option<u8>, name: &str, f: impl FnOnce() -> Result<(bool, String)>) {
        let t = Instant::now();
        let (pass, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        self.checks.push(Check {
            criterion,
            name: name.to_string(),
            pass,
            detail,
            seconds: t.elapsed().as_secs_f64(),
        });
    }
}

/// Runs every check that applies to the builtin domain `name` (default parameters).
pub fn verify_builtin(name: &str, opts: &VerifyOptions) -> Result<VerifyReport> {
    let spec = DomainSpec::builtin(name, &BTreeMap::new())?;
    let domain = Domain::with_tolerances(spec, opts.tolerances.clone())?;
    let mut s = Suite { checks: Vec::new() };
    let h = opts.h;
    match name {
        "disc" => {
            s.run(None, "classify (0.5,0)", || check_disc_classify(&domain));
            s.run(Some(3), "two-direction agreement", || check_agreement(&domain, h));
            s.run(Some(6), "usc probe", || check_usc(&domain, opts.seed));
            s.run(Some(8), "eikonal convergence", || check_eikonal_convergence(&domain, h));
        }
        "ellipse" => {
            s.run(Some(3), "two-direction agreement", || check_agreement(&domain, h));
            s.run(Some(3), "skeleton endpoint (1.5,0)", || check_ellipse_endpoint(&domain));
            s.run(Some(4), "endpoint inequality", || check_endpoint_inequality(&domain, h));
            s.run(Some(5), "rho vs 1/kappa", || check_rho_curvature(&domain));
            s.run(Some(6), "usc probe", || check_usc(&domain, opts.seed));
            s.run(None, "eikonal far-region error", || check_eikonal_far(&domain, h));
        }
        "disc_halfplane" => {
            s.run(Some(1), "corner values", || check_halfplane_values(&domain));
            s.run(Some(2), "skeleton on nonnegative x2-axis", || check_halfplane_skeleton(&domain, h));
            s.run(None, "nonspreading at (1,0)", || check_halfplane_nonspreading(&domain));
            s.run(Some(6), "usc probe", || check_usc(&domain, opts.seed));
            s.run(None, "eikonal far-region error", || check_eikonal_far(&domain, h));
        }
        "graph_power" => {
            s.run(Some(9), "degenerate origin", || check_graph_power(&domain, h));
        }
        "graph_piecewise_parabola" => {
            s.run(Some(4), "endpoint inequality", || check_endpoint_inequality(&domain, h));
            s.run(None, "cut locus height", || check_parabola_height(&domain, h));
        }
        "polyline" => {
            s.run(None, "eikonal strip", || check_strip(&domain, h));
        }
        _ => unreachable!("builtin names are validated"),
    }
    s.run(Some(7), "brute-force distance oracle", || {
        check_brute_distance(&domain, opts.seed, opts.brute_samples, opts.brute_points)
    });
    s.run(Some(10), "1-Lipschitz distance", || check_lipschitz(&domain, opts.seed));
    s.run(Some(10), "rho_star <= rho", || check_rho_star_below_rho(&domain));
    s.run(Some(10), "bisection bracket", || check_brackets(&domain));
    s.run(Some(10), "marching monotonicity", || check_monotone(&domain, h));
    Ok(VerifyReport {
        domain: name.to_string(),
        checks: s.checks,
    })
}

fn near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn random_interior(domain: &Domain, rng: &mut ChaCha8Rng, n: usize) -> Vec<Point> {
    let q = domain.spec().query_box();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = Point::new(rng.gen_range(q.x0..q.x1), rng.gen_range(q.y0..q.y1));
        if domain.contains(p) {
            out.push(p);
        }
    }
    out
}

fn check_disc_classify(domain: &Domain) -> Result<(bool, String)> {
    let r = classify(domain, Point::new(0.5, 0.0), domain.tolerances().resolution)?;
    let rs = r.rho_star.map(|r| r.value()).unwrap_or(f64::NAN);
    let pass = r.classification == Classification::RegularPoint
        && near(r.distance, 0.5, 1e-9)
        && near(rs, 1.0, 1e-3);
    Ok((pass, format!("{} d={:.9} rho_star={rs:.6}", r.classification, r.distance)))
}

fn check_halfplane_values(domain: &Domain) -> Result<(bool, String)> {
    let x = Point::new(1.0, 1.0);
    let p = domain.project(x)?;
    let foot = p.foot().point;
    // the arc-owned sample at the corner (1,0)
    let xi = domain.sample_at(BoundaryParam { piece: 1, s: 1.0 }, domain.tolerances().target_spacing);
    let rho = domain.rho(&xi).radius;
    let aggregated = domain.rho_aggregated(&xi);
    let rs = domain.rho_star(&xi, &domain.tolerances().env_radii)?.radius;
    let c = classify(domain, x, domain.tolerances().resolution)?;
    let pass = near(p.distance, 1.0, 1e-6)
        && p.is_singleton
        && foot.distance(Point::new(1.0, 0.0)) <= 1e-3
        && near(rho.value(), 1.0, 1e-2)
        && near(rs.value(), 1.0, 5e-2)
        && c.classification == Classification::BoundaryCase;
    Ok((
        pass,
        format!(
            "d(1,1)={:.9} projections={} foot={} rho={} rho(aggregated over both normals)={} rho_star={} class={}",
            p.distance,
            p.projections.len(),
            foot,
            show(rho),
            show(aggregated),
            show(rs),
            c.classification
        ),
    ))
}

fn show(r: Radius) -> String {
    match r {
        Radius::Unbounded => "inf".into(),
        Radius::Finite { value, uncertainty } => format!("{value:.6}±{uncertainty:.1e}"),
    }
}

fn check_halfplane_skeleton(domain: &Domain, h: f64) -> Result<(bool, String)> {
    let mask = detect_skeleton(domain, h)?;
    let clip = domain.spec().clip_box;
    let dist_to_axis = |p: Point| if p.y >= 0.0 { p.x.abs() } else { p.norm() };
    let cells: Vec<Point> = mask.closure_centers().filter(|&p| clip.contains(p)).collect();
    let worst = cells.iter().map(|&p| dist_to_axis(p)).fold(0.0, f64::max);
    let (ymin, ymax) = cells
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.y), b.max(p.y)));
    let pass = !cells.is_empty() && worst <= 2.0 * h;
    Ok((
        pass,
        format!(
            "{} closure cells, max distance to {{x1=0, x2>=0}} = {:.3}h, x2 in [{ymin:.4}, {ymax:.4}]",
            cells.len(),
            worst / h
        ),
    ))
}

fn check_halfplane_nonspreading(domain: &Domain) -> Result<(bool, String)> {
    let xi = domain.sample_at(BoundaryParam { piece: 2, s: 0.0 }, domain.tolerances().target_spacing);
    let r = nonspreading_diagnostic(domain, &xi, 4096);
    Ok((
        r.verdict == Verdict::Fail,
        format!(
            "verdict {} with {} pull-back points spread over {:.1} deg",
            r.verdict,
            r.pullback.len(),
            r.angular_spread.to_degrees()
        ),
    ))
}

fn check_agreement(domain: &Domain, h: f64) -> Result<(bool, String)> {
    let mask = detect_skeleton(domain, h)?;
    let report = agreement_from_mask(domain, &mask, 2.0 * h)?;
    // analytic skeleton: the center of a disc, the segment joining the centers
    // of curvature of the two major vertices of an ellipse
    let (pass_geom, geom) = match domain.spec().kind {
        DomainKind::Disc { .. } => {
            let worst = mask.closure_centers().map(|p| p.norm()).fold(0.0, f64::max);
            (worst <= 2.0 * h, format!("closure within {:.2}h of the center", worst / h))
        }
        DomainKind::Ellipse { a, b } => {
            let c = (a * a - b * b) / a;
            let seg = |p: Point| Point::new(p.x.clamp(-c, c), 0.0).distance(p);
            let worst = mask.closure_centers().map(seg).fold(0.0, f64::max);
            let centers: Vec<Point> = mask.closure_centers().collect();
            let covered = (0..=100).all(|k| {
                let q = Point::new(-c + 2.0 * c * k as f64 / 100.0, 0.0);
                centers.iter().any(|p| p.distance(q) <= 2.0 * h)
            });
            (
                worst <= 2.0 * h && covered,
                format!(
                    "closure within {:.2}h of [-{c},{c}]x{{0}}, segment covered: {covered}",
                    worst / h
                ),
            )
        }
        _ => (true, String::new()),
    };
    Ok((
        report.agreement >= 0.99 && pass_geom,
        format!(
            "agreement {:.5} over {} cells (if-violations {}, only-if violations {}); {geom}",
            report.agreement, report.n_cells, report.if_violations, report.only_if_violations
        ),
    ))
}

fn check_ellipse_endpoint(domain: &Domain) -> Result<(bool, String)> {
    let DomainKind::Ellipse { a, b } = domain.spec().kind else {
        return Err(Error::InvalidArgument("ellipse expected".into()));
    };
    let focal = b * b / a;
    let x = Point::new(a - focal, 0.0);
    let r = classify(domain, x, domain.tolerances().resolution)?;
    let rs = r.rho_star.map(|r| r.value()).unwrap_or(f64::NAN);
    let pass = r.classification == Classification::BoundaryCase
        && (r.distance - rs).abs() <= 1e-3
        && near(r.distance, focal, 1e-3)
        && near(rs, focal, 1e-3);
    Ok((pass, format!("{} at {x}: d={:.9} rho_star={rs:.6}", r.classification, r.distance)))
}

fn check_endpoint_inequality(domain: &Domain, h: f64) -> Result<(bool, String)> {
    let mask = detect_skeleton(domain, h)?;
    let ends = endpoint_cells(domain, &mask)?;
    let mut violations = 0;
    let mut lines = Vec::new();
    for (p, d, rs) in &ends {
        let tol = domain.tolerances().tol_theorem(h, rs.uncertainty());
        if *d < rs.value() - tol {
            violations += 1;
        }
        lines.push(format!("{p}: d={d:.6} rho_star={}", show(*rs)));
    }
    Ok((
        !ends.is_empty() && violations == 0,
        format!("{} endpoint cells, {violations} violations [{}]", ends.len(), lines.join("; ")),
    ))
}

fn check_rho_curvature(domain: &Domain) -> Result<(bool, String)> {
    let DomainKind::Ellipse { a, b } = domain.spec().kind else {
        return Err(Error::InvalidArgument("ellipse expected".into()));
    };
    let n = 200;
    let samples: Vec<_> = (0..n)
        .map(|k| {
            domain.sample_at(
                BoundaryParam {
                    piece: 0,
                    s: k as f64 / n as f64,
                },
                domain.tolerances().target_spacing,
            )
        })
        .collect();
    let errs: Vec<f64> = samples
        .par_iter()
        .map(|xi| {
            let p = xi.point;
            let t = (p.y / b).atan2(p.x / a);
            let (s, c) = t.sin_cos();
            let inv_kappa = (a * a * s * s + b * b * c * c).powf(1.5) / (a * b);
            let rho = domain.rho(xi).radius.value();
            (rho - inv_kappa).abs() / inv_kappa
        })
        .collect();
    let worst = errs.iter().copied().fold(0.0, f64::max);
    Ok((worst <= 1e-2, format!("{n} samples, max relative error {worst:.2e}")))
}

fn check_usc(domain: &Domain, seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x05c);
    let points = random_interior(domain, &mut rng, 20);
    let eps = 0.05;
    let reports: Vec<_> = points
        .par_iter()
        .map(|&x| {
            let q = domain.spec().query_box();
            let room = (x.x - q.x0).min(q.x1 - x.x).min(x.y - q.y0).min(q.y1 - x.y);
            let d = domain.distance(x)?.min(room);
            let radii: Vec<f64> = [0.25, 0.1, 1e-2, 1e-3, 1e-4].iter().map(|f| f * d).collect();
            usc_probe(domain, x, &radii, eps)
        })
        .collect::<Result<_>>()?;
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} dev={:.3e}", r.point, r.deviations.last().unwrap()))
        .collect();
    let worst = reports
        .iter()
        .map(|r| *r.deviations.last().unwrap())
        .fold(0.0, f64::max);
    Ok((
        failed.is_empty(),
        format!(
            "20 points at eps={eps}, worst final deviation {worst:.2e}{}",
            if failed.is_empty() {
                String::new()
            } else {
                format!("; failed: {}", failed.join(", "))
            }
        ),
    ))
}

fn check_eikonal_convergence(domain: &Domain, h: f64) -> Result<(bool, String)> {
    let mut errs = Vec::new();
    for hh in [h, 0.5 * h] {
        let f = solve(domain, hh)?;
        let mask = detect_skeleton(domain, hh)?;
        errs.push(error_report(&f, domain, &mask)?.far.max);
    }
    let ratio = errs[1] / errs[0];
    let pass = errs[0] <= 2.0 * h && (0.4..=0.7).contains(&ratio);
    Ok((
        pass,
        format!(
            "far max error {:.3e} ({:.3}h) at h, {:.3e} at h/2, ratio {ratio:.3}",
            errs[0],
            errs[0] / h,
            errs[1]
        ),
    ))
}

fn check_eikonal_far(domain: &Domain, h: f64) -> Result<(bool, String)> {
    let f = solve(domain, h)?;
    let mask = detect_skeleton(domain, h)?;
    let r = error_report(&f, domain, &mask)?;
    let pass = r.far.max <= 2.0 * h
        && r.min_value >= 0.0
        && r.max_boundary_adjacent <= h
        && r.residual_median <= 0.05;
    Ok((
        pass,
        format!(
            "far max {:.3}h mean {:.2e}, near max {:.3}h, residual median {:.2e}",
            r.far.max / h,
            r.far.mean,
            r.near.max / h,
            r.residual_median
        ),
    ))
}

fn check_strip(domain: &Domain, h: f64) -> Result<(bool, String)> {
    let DomainKind::Polyline { vertices } = &domain.spec().kind else {
        return Err(Error::InvalidArgument("polyline expected".into()));
    };
    let (y0, y1) = vertices
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v.y), b.max(v.y)));
    let (x0, x1) = vertices
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v.x), b.max(v.x)));
    let f = solve(domain, h)?;
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for k in 0..f.grid.len() {
        let c = f.grid.center_of(k);
        // the short walls are farther than the long ones here
        let away = (c.x - x0).min(x1 - c.x) >= 0.5 * (y1 - y0);
        if f.state[k] == CellState::Accepted && away {
            worst = worst.max((f.values[k] - (c.y - y0).min(y1 - c.y)).abs());
            n += 1;
        }
    }
    Ok((worst <= h, format!("{n} cells, max |u - min(y - y0, y1 - y)| = {:.3}h", worst / h)))
}

fn check_graph_power(domain: &Domain, h: f64) -> Result<(bool, String)> {
    let DomainKind::GraphPower { p } = domain.spec().kind else {
        return Err(Error::InvalidArgument("graph_power expected".into()));
    };
    let tol = domain.tolerances();
    let origin = domain.sample_at(BoundaryParam { piece: 1, s: 0.0 }, tol.target_spacing);
    let rho = domain.rho(&origin).radius;
    let rs = domain.rho_star(&origin, &tol.env_radii)?.radius;
    // analytic oracle: the ball of radius r tangent at the origin contains the
    // graph point (x, |x|^p) iff x² + (|x|^p - r)² < r², which holds for all
    // small x once p < 2
    let crossing_oracle = |r: f64| {
        let loc = r.min(tol.locality);
        (1..=1000).any(|k| {
            let x = loc * k as f64 / 1000.0;
            x * x + (x.powf(p) - r).powi(2) < r * r
        })
    };
    let radii = [2.0 * tol.target_spacing, 0.05, 0.1, 0.5, 1.0];
    let oracle_agrees = radii
        .iter()
        .all(|&r| crossing_oracle(r) && !domain.is_touching_ball(&origin, r, tol.locality));
    // a locally touching ball cannot beat the osculating circle, and 1/κ along
    // the graph shrinks to 0 at the origin
    let mut trend = Vec::new();
    let mut trend_ok = true;
    let mut previous = f64::INFINITY;
    for x0 in [0.2, 0.1, 0.05, 0.02] {
        let xi = *domain.project(Point::new(x0, x0.powf(p) + 0.05))?.foot();
        let x = xi.point.x;
        let f1 = p * x.powf(p - 1.0);
        let f2 = p * (p - 1.0) * x.powf(p - 2.0);
        let inv_kappa = (1.0 + f1 * f1).powf(1.5) / f2;
        let r = domain.rho(&xi).radius;
        trend_ok &= r.value() <= inv_kappa + r.uncertainty() && r.value() < previous;
        previous = r.value();
        trend.push(format!("x={x:.4}: rho={:.4} 1/kappa={inv_kappa:.4}", r.value()));
    }
    let mask = detect_skeleton(domain, h)?;
    let lowest = mask
        .flagged_centers()
        .map(|c| c.norm())
        .fold(f64::INFINITY, f64::min);
    let on_axis = mask.flagged_centers().all(|c| c.x.abs() <= 2.0 * h);
    let pass = rho.value() == 0.0
        && rs.value() == 0.0
        && oracle_agrees
        && trend_ok
        && lowest <= 4.0 * h
        && on_axis;
    Ok((
        pass,
        format!(
            "rho(0,0)={} rho_star(0,0)={}, ball oracle agrees: {oracle_agrees}; {}; nearest flagged cell {:.2}h from the origin, all on the axis: {on_axis}",
            show(rho),
            show(rs),
            trend.join(", "),
            lowest / h
        ),
    ))
}

fn check_parabola_height(domain: &Domain, h: f64) -> Result<(bool, String)> {
    let mask = detect_skeleton(domain, h)?;
    let lowest = mask
        .closure_centers()
        .filter(|c| c.x.abs() <= h)
        .map(|c| c.y)
        .fold(f64::INFINITY, f64::min);
    let report = agreement_from_mask(domain, &mask, 2.0 * h)?;
    // ρ* at the origin is the smaller one-sided radius 1/(2c)
    let expected = match domain.spec().kind {
        DomainKind::GraphPiecewiseParabola { c_right, c_left } => 0.5 / c_right.max(c_left),
        _ => return Err(Error::InvalidArgument("graph_piecewise_parabola expected".into())),
    };
    let pass = (lowest - expected).abs() <= 2.0 * h && report.agreement >= 0.99;
    Ok((
        pass,
        format!(
            "closure reaches x2={lowest:.4} above the origin (expected {expected}), agreement {:.5}",
            report.agreement
        ),
    ))
}

fn check_brute_distance(
    domain: &Domain,
    seed: u64,
    samples: usize,
    points: usize,
) -> Result<(bool, String)> {
    let oracle = BruteBoundary::new(domain.spec(), samples)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb17e);
    let xs = random_interior(domain, &mut rng, points);
    let errs: Vec<f64> = xs
        .par_iter()
        .map(|&x| Ok((domain.distance(x)? - oracle.distance(x)).abs()))
        .collect::<Result<_>>()?;
    let worst = errs.iter().copied().fold(0.0, f64::max);
    let tol = 2.0 * domain.tolerances().eps_proj;
    Ok((
        worst <= tol,
        format!("{points} points against {samples} boundary samples, max |d - d_brute| = {worst:.2e}"),
    ))
}

fn check_lipschitz(domain: &Domain, seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1195);
    let q = domain.spec().query_box();
    let mut pairs = Vec::new();
    let a = random_interior(domain, &mut rng, 400);
    let b = random_interior(domain, &mut rng, 200);
    for (i, &x) in a.iter().enumerate() {
        if i < 200 {
            pairs.push((x, b[i]));
        } else {
            let r = 0.05 * rng.gen::<f64>();
            let y = x + Point::polar(rng.gen_range(0.0..std::f64::consts::TAU)) * r;
            if q.contains(y) && domain.contains(y) {
                pairs.push((x, y));
            }
        }
    }
    let slack = 2.0 * domain.tolerances().eps_proj;
    let excess: Vec<f64> = pairs
        .par_iter()
        .map(|&(x, y)| Ok((domain.distance(x)? - domain.distance(y)?).abs() - x.distance(y)))
        .collect::<Result<_>>()?;
    let violations = excess.iter().filter(|&&e| e > slack).count();
    let worst = excess.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((
        violations == 0,
        format!("{} pairs, {violations} violations, max |d(x)-d(y)| - |x-y| = {worst:.2e}", pairs.len()),
    ))
}

fn check_rho_star_below_rho(domain: &Domain) -> Result<(bool, String)> {
    let table = domain.rho_table();
    let radii = &domain.tolerances().env_radii;
    let picks: Vec<_> = table.entries.iter().step_by(5).collect();
    let bad: Vec<Point> = picks
        .par_iter()
        .map(|e| {
            let rs = domain.rho_star(&e.sample, radii)?.radius;
            let ok = match (rs, e.aggregated) {
                (_, Radius::Unbounded) => true,
                (Radius::Unbounded, _) => false,
                (a, b) => a.value() <= b.value() + b.uncertainty(),
            };
            Ok((!ok).then_some(e.sample.point))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok((bad.is_empty(), format!("{} samples, {} violations", picks.len(), bad.len())))
}

fn check_brackets(domain: &Domain) -> Result<(bool, String)> {
    let table = domain.rho_table();
    let tol = domain.tolerances();
    let r_min = 2.0 * tol.target_spacing;
    let r_max = 4.0 * domain.diameter();
    let picks: Vec<_> = table.entries.iter().step_by(10).collect();
    let bad = picks
        .par_iter()
        .filter(|e| {
            let xi = &e.sample;
            match e.rho.radius {
                Radius::Unbounded => !domain.is_touching_ball(xi, r_max, tol.locality),
                // a zero value means the smallest tested radius already crossed
                Radius::Finite { value: 0.0, uncertainty } => {
                    domain.is_touching_ball(xi, uncertainty, tol.locality)
                }
                Radius::Finite { value, uncertainty } => {
                    let lo = value - 2.0 * uncertainty;
                    let hi = value + 2.0 * uncertainty;
                    let lo_ok = lo <= r_min || domain.is_touching_ball(xi, lo, tol.locality);
                    let hi_ok = hi >= r_max || !domain.is_touching_ball(xi, hi, tol.locality);
                    !(lo_ok && hi_ok)
                }
            }
        })
        .count();
    Ok((bad == 0, format!("{} samples, {bad} unsound brackets", picks.len())))
}

fn check_monotone(domain: &Domain, h: f64) -> Result<(bool, String)> {
    let f = solve(domain, h)?;
    Ok((
        f.acceptance_violations == 0,
        format!("{} accepted cells, {} out-of-order acceptances", f.accepted, f.acceptance_violations),
    ))
}

/// One analytic boundary piece, parametrized by `t ∈ [t0, t1]`.
#[derive(Debug, Clone, Copy)]
enum OraclePiece {
    Arc { center: Point, r: f64 },
    Ellipse { a: f64, b: f64 },
    Segment { a: Point, b: Point },
    Graph { c: f64, p: f64 },
}

impl OraclePiece {
    fn at(&self, t: f64) -> Point {
        match *self {
            OraclePiece::Arc { center, r } => center + Point::polar(t) * r,
            OraclePiece::Ellipse { a, b } => Point::new(a * t.cos(), b * t.sin()),
            OraclePiece::Segment { a, b } => a + (b - a) * t,
            OraclePiece::Graph { c, p } => Point::new(t, c * t.abs().powf(p)),
        }
    }
}

/// Brute-force distance: a dense uniform sampling of the analytic boundary,
/// refined by golden-section search around the best sample.
pub struct BruteBoundary {
    pieces: Vec<(OraclePiece, f64, f64)>,
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// (piece, t) of every sample.
    params: Vec<(u32, f64)>,
    steps: Vec<f64>,
}

impl BruteBoundary {
    pub fn new(spec: &DomainSpec, samples: usize) -> Result<Self> {
        use std::f64::consts::{PI, TAU};
        // far enough that no query point in the box is closer to the cut ends
        let reach = 2.0 * spec.clip_box.diameter();
        let pieces: Vec<(OraclePiece, f64, f64)> = match &spec.kind {
            DomainKind::Disc { radius } => vec![(
                OraclePiece::Arc {
                    center: Point::ORIGIN,
                    r: *radius,
                },
                0.0,
                TAU,
            )],
            DomainKind::Ellipse { a, b } => vec![(OraclePiece::Ellipse { a: *a, b: *b }, 0.0, TAU)],
            DomainKind::DiscHalfplane => vec![
                (
                    OraclePiece::Segment {
                        a: Point::new(-reach, 0.0),
                        b: Point::new(-1.0, 0.0),
                    },
                    0.0,
                    1.0,
                ),
                (
                    OraclePiece::Arc {
                        center: Point::ORIGIN,
                        r: 1.0,
                    },
                    PI,
                    TAU,
                ),
                (
                    OraclePiece::Segment {
                        a: Point::new(1.0, 0.0),
                        b: Point::new(reach, 0.0),
                    },
                    0.0,
                    1.0,
                ),
            ],
            DomainKind::GraphPower { p } => {
                let x = reach.powf(1.0 / p);
                vec![
                    (OraclePiece::Graph { c: 1.0, p: *p }, -x, 0.0),
                    (OraclePiece::Graph { c: 1.0, p: *p }, 0.0, x),
                ]
            }
            DomainKind::GraphPiecewiseParabola { c_left, c_right } => vec![
                (OraclePiece::Graph { c: *c_left, p: 2.0 }, -(reach / c_left).sqrt(), 0.0),
                (OraclePiece::Graph { c: *c_right, p: 2.0 }, 0.0, (reach / c_right).sqrt()),
            ],
            DomainKind::Polyline { vertices } => (0..vertices.len())
                .map(|i| {
                    (
                        OraclePiece::Segment {
                            a: vertices[i],
                            b: vertices[(i + 1) % vertices.len()],
                        },
                        0.0,
                        1.0,
                    )
                })
                .collect(),
            DomainKind::Parametric { .. } => {
                return Err(Error::InvalidArgument(
                    "the brute-force oracle covers builtin kinds only".into(),
                ))
            }
        };
        // share samples in proportion to a chord estimate of each piece's length
        let lengths: Vec<f64> = pieces
            .iter()
            .map(|&(pc, t0, t1)| {
                (0..1000)
                    .map(|k| {
                        let a = t0 + (t1 - t0) * k as f64 / 1000.0;
                        let b = t0 + (t1 - t0) * (k + 1) as f64 / 1000.0;
                        pc.at(a).distance(pc.at(b))
                    })
                    .sum()
            })
            .collect();
        let total: f64 = lengths.iter().sum();
        let mut out = BruteBoundary {
            pieces: pieces.clone(),
            xs: Vec::with_capacity(samples),
            ys: Vec::with_capacity(samples),
            params: Vec::with_capacity(samples),
            steps: Vec::new(),
        };
        for (i, &(pc, t0, t1)) in pieces.iter().enumerate() {
            let n = ((samples as f64 * lengths[i] / total).round() as usize).max(2);
            let step = (t1 - t0) / (n - 1) as f64;
            out.steps.push(step);
            for k in 0..n {
                let t = t0 + step * k as f64;
                let q = pc.at(t);
                out.xs.push(q.x);
                out.ys.push(q.y);
                out.params.push((i as u32, t));
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    fn nearest_sample(&self, x: Point) -> usize {
        const LANES: usize = 8;
        const BLOCK: usize = 1024;
        let mut best = f64::INFINITY;
        let mut best_block = 0;
        for (b, (bx, by)) in self.xs.chunks(BLOCK).zip(self.ys.chunks(BLOCK)).enumerate() {
            let mut acc = [f64::INFINITY; LANES];
            let mut cx = bx.chunks_exact(LANES);
            let mut cy = by.chunks_exact(LANES);
            for (px, py) in (&mut cx).zip(&mut cy) {
                for l in 0..LANES {
                    let dx = px[l] - x.x;
                    let dy = py[l] - x.y;
                    let d = dx * dx + dy * dy;
                    acc[l] = if d < acc[l] { d } else { acc[l] };
                }
            }
            let mut m = acc.iter().copied().fold(f64::INFINITY, f64::min);
            for (px, py) in cx.remainder().iter().zip(cy.remainder()) {
                m = m.min((px - x.x).powi(2) + (py - x.y).powi(2));
            }
            if m < best {
                best = m;
                best_block = b;
            }
        }
        let start = best_block * BLOCK;
        let end = (start + BLOCK).min(self.xs.len());
        (start..end)
            .min_by(|&i, &j| {
                let di = (self.xs[i] - x.x).powi(2) + (self.ys[i] - x.y).powi(2);
                let dj = (self.xs[j] - x.x).powi(2) + (self.ys[j] - x.y).powi(2);
                di.total_cmp(&dj)
            })
            .unwrap()
    }

    pub fn distance(&self, x: Point) -> f64 {
        let i = self.nearest_sample(x);
        let (piece, t) = self.params[i];
        let (pc, t0, t1) = self.pieces[piece as usize];
        let step = self.steps[piece as usize];
        let f = |t: f64| pc.at(t).distance(x);
        let (mut a, mut b) = ((t - step).max(t0), (t + step).min(t1));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        for _ in 0..80 {
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
            c = b - g * (b - a);
            d = a + g * (b - a);
        }
        f(0.5 * (a + b)).min(f(t))
    }
}
