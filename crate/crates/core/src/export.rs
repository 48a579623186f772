//! Deterministic CSV, JSON and PGM writers.
//!
//! Every float is written with at most 12 significant digits; unbounded values
//! are written as `inf`.

use serde::Serialize;
use serde_json::Value;

use crate::curvature::Radius;
use crate::cutlocus::SkeletonMask;
use crate::eikonal::ScalarField;
use crate::error::Result;
use crate::geometry::Domain;
use crate::grid::Grid;
use crate::projection::ProjectionResult;

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Formats a float at 12 significant digits in its shortest round-trip form.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        let r = round12(x);
        if r == 0.0 {
            "0".into() // never "-0"
        } else if (1e-5..1e15).contains(&r.abs()) {
            format!("{r}")
        } else {
            format!("{r:e}")
        }
    }
}

pub fn fmt_radius(r: Radius) -> (String, String) {
    match r {
        Radius::Unbounded => ("inf".into(), "0".into()),
        Radius::Finite { value, uncertainty } => (fmt_num(value), fmt_num(uncertainty)),
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(f) = n.as_f64().filter(|_| !n.is_i64() && !n.is_u64()) {
                if let Some(m) = serde_json::Number::from_f64(round12(f)) {
                    *n = m;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with floats rounded to 12 significant digits.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

/// `x, y, d, n_clusters, proj_x_1, proj_y_1, ...` padded to the widest row.
pub fn projections_csv(results: &[ProjectionResult]) -> String {
    let width = results.iter().map(|r| r.projections.len()).max().unwrap_or(1);
    let mut out = String::from("x,y,d,n_clusters");
    for i in 1..=width {
        out += &format!(",proj_x_{i},proj_y_{i}");
    }
    out.push('\n');
    for r in results {
        let mut row = vec![
            fmt_num(r.point.x),
            fmt_num(r.point.y),
            fmt_num(r.distance),
            r.cluster_count.to_string(),
        ];
        for i in 0..width {
            match r.projections.get(i) {
                Some(p) => {
                    row.push(fmt_num(p.point.x));
                    row.push(fmt_num(p.point.y));
                }
                None => row.extend([String::new(), String::new()]),
            }
        }
        out += &row.join(",");
        out.push('\n');
    }
    out
}

/// ρ and ρ* over the boundary sampling: `arc_param, x, y, rho, rho_uncertainty, rho_star`.
pub fn rho_csv(domain: &Domain) -> Result<String> {
    let radii = domain.tolerances().env_radii.clone();
    let mut out = String::from("arc_param,x,y,rho,rho_uncertainty,rho_star\n");
    for e in &domain.rho_table().entries {
        let rs = domain.rho_star(&e.sample, &radii)?;
        let (rho, unc) = fmt_radius(e.rho.radius);
        let (rs, _) = fmt_radius(rs.radius);
        out += &format!(
            "{},{},{},{rho},{unc},{rs}\n",
            fmt_num(e.arc),
            fmt_num(e.sample.point.x),
            fmt_num(e.sample.point.y)
        );
    }
    Ok(out)
}

/// Cell centers of `mask` that carry a flag: `x, y, flagged, closure`.
pub fn mask_csv(mask: &SkeletonMask) -> String {
    let mut out = String::from("x,y,flagged,closure\n");
    for k in 0..mask.grid.len() {
        if mask.closure[k] {
            let c = mask.grid.center_of(k);
            out += &format!(
                "{},{},{},{}\n",
                fmt_num(c.x),
                fmt_num(c.y),
                u8::from(mask.flagged[k]),
                u8::from(mask.closure[k])
            );
        }
    }
    out
}

/// Binary grey map, top row first. `shade` returns a level in `0..=255`.
pub fn pgm(grid: &Grid, shade: impl Fn(usize) -> u8) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", grid.nx, grid.ny).into_bytes();
    for j in (0..grid.ny).rev() {
        for i in 0..grid.nx {
            out.push(shade(grid.index(i, j)));
        }
    }
    out
}

/// Exterior black, interior light grey, closure grey, flagged white.
pub fn mask_pgm(mask: &SkeletonMask) -> Vec<u8> {
    pgm(&mask.grid, |k| {
        if mask.flagged[k] {
            255
        } else if mask.closure[k] {
            160
        } else if mask.interior[k] {
            64
        } else {
            0
        }
    })
}

/// Heat map of finite values scaled to `1..=255`; NaN cells are black.
pub fn scalar_pgm(grid: &Grid, values: &[f64]) -> Vec<u8> {
    let max = values
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    pgm(grid, |k| {
        let v = values[k];
        if !v.is_finite() {
            0
        } else if max <= 0.0 {
            1
        } else {
            1 + (254.0 * (v / max).clamp(0.0, 1.0)).round() as u8
        }
    })
}

/// `x, y, u, state` for every grid cell.
pub fn field_csv(field: &ScalarField) -> String {
    let mut out = String::from("x,y,u,state\n");
    for k in 0..field.grid.len() {
        let c = field.grid.center_of(k);
        let u = field.values[k];
        out += &format!(
            "{},{},{},{}\n",
            fmt_num(c.x),
            fmt_num(c.y),
            if u.is_nan() { String::new() } else { fmt_num(u) },
            field.state[k].name()
        );
    }
    out
}

/// `x, y, d` over the interior cells of a grid.
pub fn distance_csv(grid: &Grid, values: &[f64]) -> String {
    let mut out = String::from("x,y,d\n");
    for (k, &v) in values.iter().enumerate() {
        if v.is_finite() {
            let c = grid.center_of(k);
            out += &format!("{},{},{}\n", fmt_num(c.x), fmt_num(c.y), fmt_num(v));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(2.0 / 3.0 * 1e-9), "6.66666666667e-10");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(123456789012.345), "123456789012");
        assert_eq!(fmt_num(1.5e20), "1.5e20");
    }

    #[test]
    fn json_rounding() {
        let s = to_json(&serde_json::json!({"a": 0.1 + 0.2, "n": 3, "r": Radius::Unbounded})).unwrap();
        assert!(s.contains("\"a\": 0.3"), "{s}");
        assert!(s.contains("\"n\": 3"));
        assert!(s.contains("\"value\": \"inf\""), "{s}");
    }

    #[test]
    fn pgm_layout() {
        let g = Grid {
            origin: crate::geometry::Point::ORIGIN,
            h: 1.0,
            nx: 2,
            ny: 2,
        };
        let bytes = pgm(&g, |k| k as u8);
        let header = b"P5\n2 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        // top row (j = 1) first
        assert_eq!(&bytes[header.len()..], &[2, 3, 0, 1]);
    }
}
