//! Library results against closed forms and brute-force minimization written
//! here, independently of the library's curve code.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ridgekit::geometry::BoundaryParam;
use ridgekit::{classify, detect_skeleton, Classification, Domain, DomainSpec, Point};

/// Distance to the ellipse `(a cos t, b sin t)`: dense scan plus golden-section refinement.
fn ellipse_distance_brute(a: f64, b: f64, x: Point, n: usize) -> (f64, Point) {
    let at = |t: f64| Point::new(a * t.cos(), b * t.sin());
    let step = std::f64::consts::TAU / n as f64;
    let (mut best_t, mut best) = (0.0, f64::INFINITY);
    for k in 0..n {
        let t = k as f64 * step;
        let d = at(t).distance(x);
        if d < best {
            best = d;
            best_t = t;
        }
    }
    let (mut lo, mut hi) = (best_t - step, best_t + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let c = hi - g * (hi - lo);
        let d = lo + g * (hi - lo);
        if at(c).distance(x) < at(d).distance(x) {
            hi = d;
        } else {
            lo = c;
        }
    }
    let t = 0.5 * (lo + hi);
    (at(t).distance(x).min(best), at(t))
}

#[test]
fn ellipse_distance_and_foot_match_brute_force() {
    let (a, b) = (2.0, 1.0);
    let e = Domain::new(DomainSpec::ellipse(a, b)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 200 {
        let x = Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0));
        if (x.x / a).powi(2) + (x.y / b).powi(2) >= 1.0 {
            continue;
        }
        let (d_brute, foot) = ellipse_distance_brute(a, b, x, 20_000);
        let p = e.project(x).unwrap();
        assert!((p.distance - d_brute).abs() <= 2e-6, "{x}: {} vs {d_brute}", p.distance);
        // off the major axis segment the foot is unique and matches the brute minimizer
        if x.y.abs() > 1e-3 {
            assert!(p.is_singleton, "{x}");
            assert!(p.foot().point.distance(foot) <= 1e-4, "{x}: {} vs {foot}", p.foot().point);
        }
        checked += 1;
    }
}

#[test]
fn disc_distance_is_one_minus_radius() {
    let d = Domain::new(DomainSpec::disc(1.0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let r: f64 = rng.gen_range(0.0..0.999);
        let x = Point::polar(rng.gen_range(0.0..std::f64::consts::TAU)) * r;
        assert!((d.distance(x).unwrap() - (1.0 - r)).abs() <= 1e-9);
    }
}

#[test]
fn curvature_radii_at_ellipse_vertices() {
    let (a, b) = (2.0, 1.0);
    let e = Domain::new(DomainSpec::ellipse(a, b)).unwrap();
    let vertex = e.nearest_boundary_sample(Point::new(a, 0.0));
    assert!((e.rho(&vertex).radius.value() - b * b / a).abs() <= 1e-3);
    // curvature grows away from the covertex, so a touching ball is slightly
    // smaller than the osculating circle there
    let covertex = e.nearest_boundary_sample(Point::new(0.0, b));
    let r = e.rho(&covertex).radius.value();
    assert!(r <= a * a / b + 1e-9 && r >= 0.99 * a * a / b, "{r}");
}

#[test]
fn disc_radius_is_recovered() {
    for radius in [0.5, 1.0, 2.0] {
        let d = Domain::new(DomainSpec::disc(radius)).unwrap();
        let xi = d.sample_at(BoundaryParam { piece: 0, s: 0.3 }, 0.01);
        let rho = d.rho(&xi).radius.value();
        assert!((rho - radius).abs() <= 1e-6 * radius.max(1.0), "{radius}: {rho}");
    }
}

#[test]
fn halfplane_corner_closed_forms() {
    let dh = Domain::new(DomainSpec::disc_halfplane()).unwrap();
    let p = dh.project(Point::new(1.0, 1.0)).unwrap();
    assert!((p.distance - 1.0).abs() <= 1e-9);
    assert!(p.is_singleton);
    assert!(p.foot().point.distance(Point::new(1.0, 0.0)) <= 1e-9);
    // points straight above the corner at height t < 1 are nearer the segment
    for t in [0.25, 0.5, 0.9] {
        let q = dh.project(Point::new(1.0, t)).unwrap();
        assert!((q.distance - t).abs() <= 1e-9);
    }
    // points on the positive x2-axis above the disc have two feet (±1, 0)
    let q = dh.project(Point::new(0.0, 1.5)).unwrap();
    assert_eq!(q.projections.len(), 2);
    assert!((q.distance - (1.0f64 + 1.5 * 1.5).sqrt()).abs() <= 1e-9);
}

#[test]
fn skeletons_match_analytic_sets() {
    let h = 1.0 / 64.0;
    let disc = Domain::new(DomainSpec::disc(1.0)).unwrap();
    let mask = detect_skeleton(&disc, h).unwrap();
    let flagged: Vec<Point> = mask.flagged_centers().collect();
    assert_eq!(flagged, vec![Point::ORIGIN]);

    let (a, b) = (2.0, 1.0);
    let e = Domain::new(DomainSpec::ellipse(a, b)).unwrap();
    let mask = detect_skeleton(&e, h).unwrap();
    let c = (a * a - b * b) / a;
    for p in mask.flagged_centers() {
        assert!(p.y.abs() <= h && p.x.abs() <= c + h, "{p}");
    }
    // every grid point of the open segment is flagged
    let mut k = 1;
    while (k as f64) * h < c {
        for x in [k as f64 * h, -(k as f64) * h] {
            assert!(mask.flagged_centers().any(|p| p == Point::new(x, 0.0)), "{x}");
        }
        k += 1;
    }
}

#[test]
fn classification_along_the_ellipse_axis() {
    let (a, b) = (2.0, 1.0);
    let e = Domain::new(DomainSpec::ellipse(a, b)).unwrap();
    let focal = a - b * b / a;
    for x in [0.0, 0.5, 1.0, 1.4] {
        let r = classify(&e, Point::new(x, 0.0), 1e-3).unwrap();
        assert_eq!(r.classification, Classification::CutLocusPoint, "{x}");
    }
    assert_eq!(
        classify(&e, Point::new(focal, 0.0), 1e-3).unwrap().classification,
        Classification::BoundaryCase
    );
    for x in [1.6, 1.8] {
        let r = classify(&e, Point::new(x, 0.0), 1e-3).unwrap();
        assert_eq!(r.classification, Classification::RegularPoint, "{x}");
    }
}
