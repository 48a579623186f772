//! Randomized invariants: Lipschitz distance, envelope below ρ, sound
//! bisection brackets and monotone marching.

use std::sync::OnceLock;

use proptest::prelude::*;
use ridgekit::curvature::Radius;
use ridgekit::eikonal::solve;
use ridgekit::geometry::BoundaryParam;
use ridgekit::{Domain, DomainSpec, Point};

fn ellipse() -> &'static Domain {
    static D: OnceLock<Domain> = OnceLock::new();
    D.get_or_init(|| Domain::new(DomainSpec::ellipse(2.0, 1.0)).unwrap())
}

fn parabola() -> &'static Domain {
    static D: OnceLock<Domain> = OnceLock::new();
    D.get_or_init(|| Domain::new(DomainSpec::graph_piecewise_parabola(0.25, 0.5)).unwrap())
}

fn inside_ellipse(x: f64, y: f64) -> bool {
    (x / 2.0).powi(2) + y * y < 0.999
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_one_lipschitz(
        x0 in -2.0f64..2.0, y0 in -1.0f64..1.0,
        x1 in -2.0f64..2.0, y1 in -1.0f64..1.0,
    ) {
        prop_assume!(inside_ellipse(x0, y0) && inside_ellipse(x1, y1));
        let (p, q) = (Point::new(x0, y0), Point::new(x1, y1));
        let e = ellipse();
        let diff = (e.distance(p).unwrap() - e.distance(q).unwrap()).abs();
        prop_assert!(diff <= p.distance(q) + 2e-6);
    }

    #[test]
    fn distance_bounded_by_any_boundary_point(x in -2.0f64..2.0, y in -1.0f64..1.0, s in 0.0f64..1.0) {
        prop_assume!(inside_ellipse(x, y));
        let e = ellipse();
        let p = Point::new(x, y);
        let b = e.sample_at(BoundaryParam { piece: 0, s }, 0.01).point;
        let d = e.distance(p).unwrap();
        prop_assert!(d >= 0.0 && d <= p.distance(b) + 1e-9);
    }

    #[test]
    fn envelope_below_rho(s in 0.0f64..1.0, piece in 0usize..2) {
        for d in [ellipse(), parabola()] {
            let piece = piece.min(d.curves().len() - 1);
            let xi = d.sample_at(BoundaryParam { piece, s }, 0.01);
            let rs = d.rho_star(&xi, &d.tolerances().env_radii).unwrap().radius;
            match d.rho_aggregated(&xi) {
                Radius::Unbounded => {}
                r => prop_assert!(!rs.is_unbounded() && rs.value() <= r.value() + r.uncertainty()),
            }
        }
    }

    #[test]
    fn brackets_are_sound(s in 0.0f64..1.0, piece in 0usize..2) {
        for d in [ellipse(), parabola()] {
            let piece = piece.min(d.curves().len() - 1);
            let xi = d.sample_at(BoundaryParam { piece, s }, 0.01);
            let lambda = d.tolerances().locality;
            let r_min = 2.0 * d.tolerances().target_spacing;
            if let Radius::Finite { value, uncertainty } = d.rho(&xi).radius {
                if value > 0.0 {
                    let lo = value - 2.0 * uncertainty;
                    prop_assert!(lo <= r_min || d.is_touching_ball(&xi, lo, lambda));
                    prop_assert!(!d.is_touching_ball(&xi, value + 2.0 * uncertainty, lambda));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn marching_accepts_in_order(a in 1.0f64..2.5, b in 0.5f64..1.0) {
        let d = Domain::new(DomainSpec::ellipse(a, b)).unwrap();
        let f = solve(&d, b / 24.0).unwrap();
        prop_assert_eq!(f.acceptance_violations, 0);
        prop_assert!(f.values.iter().filter(|v| !v.is_nan()).all(|&v| v >= 0.0));
    }
}
