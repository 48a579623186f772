//! Boundary pieces with analytic first and second derivatives.
//!
//! Every piece is parametrized over `s ∈ [0, 1]` and traversed so that the
//! domain lies on its left; the inner normal is therefore the tangent rotated
//! a quarter turn counter-clockwise.

use std::f64::consts::TAU;

use super::point::Point;

/// Height function of a graph boundary `y = f(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphLaw {
    /// `f(x) = |x|^p`
    Power(f64),
    /// `f(x) = c x²`
    Quadratic(f64),
}

impl GraphLaw {
    /// Returns `(f, f', f'')` at `x`. `f''` may be infinite (e.g. `|x|^1.5` at 0).
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        match *self {
            GraphLaw::Power(p) => {
                let ax = x.abs();
                let f = ax.powf(p);
                let f1 = if ax == 0.0 {
                    if p > 1.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    p * ax.powf(p - 1.0) * x.signum()
                };
                let f2 = if ax == 0.0 {
                    if p > 2.0 {
                        0.0
                    } else if p == 2.0 {
                        2.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    p * (p - 1.0) * ax.powf(p - 2.0)
                };
                (f, f1, f2)
            }
            GraphLaw::Quadratic(c) => (c * x * x, 2.0 * c * x, 2.0 * c),
        }
    }

    /// Largest `x ≥ 0` with `f(x) ≤ height` (the law is even in `x`).
    pub fn inverse(&self, height: f64) -> f64 {
        match *self {
            GraphLaw::Power(p) => height.max(0.0).powf(1.0 / p),
            GraphLaw::Quadratic(c) => {
                if c > 0.0 {
                    (height.max(0.0) / c).sqrt()
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

/// Position and derivatives with respect to the normalized parameter.
#[derive(Debug, Clone, Copy)]
pub struct CurveEval {
    pub pos: Point,
    pub d1: Point,
    pub d2: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Curve {
    Segment {
        from: Point,
        to: Point,
    },
    /// Circular arc; counter-clockwise when `end > start`.
    Arc {
        center: Point,
        radius: f64,
        start: f64,
        end: f64,
    },
    /// Axis-aligned elliptic arc `center + (rx cos θ, ry sin θ)`.
    EllipticArc {
        center: Point,
        rx: f64,
        ry: f64,
        start: f64,
        end: f64,
    },
    /// Graph `y = law(x)` traversed from `x = from` to `x = to`.
    Graph {
        law: GraphLaw,
        from: f64,
        to: f64,
    },
}

impl Curve {
    pub fn eval(&self, s: f64) -> CurveEval {
        match *self {
            Curve::Segment { from, to } => {
                let d = to - from;
                CurveEval {
                    pos: from + d * s,
                    d1: d,
                    d2: Point::ORIGIN,
                }
            }
            Curve::Arc {
                center,
                radius,
                start,
                end,
            } => {
                let span = end - start;
                let u = Point::polar(start + span * s);
                CurveEval {
                    pos: center + u * radius,
                    d1: u.perp() * (radius * span),
                    d2: u * (-radius * span * span),
                }
            }
            Curve::EllipticArc {
                center,
                rx,
                ry,
                start,
                end,
            } => {
                let span = end - start;
                let (sn, cs) = (start + span * s).sin_cos();
                CurveEval {
                    pos: center + Point::new(rx * cs, ry * sn),
                    d1: Point::new(-rx * sn, ry * cs) * span,
                    d2: Point::new(-rx * cs, -ry * sn) * (span * span),
                }
            }
            Curve::Graph { law, from, to } => {
                let len = to - from;
                let x = from + len * s;
                let (f, f1, f2) = law.eval(x);
                CurveEval {
                    pos: Point::new(x, f),
                    d1: Point::new(len, len * f1),
                    d2: Point::new(0.0, len * len * f2),
                }
            }
        }
    }

    #[inline]
    pub fn point(&self, s: f64) -> Point {
        match *self {
            Curve::Segment { from, to } => from + (to - from) * s,
            Curve::Arc {
                center,
                radius,
                start,
                end,
            } => center + Point::polar(start + (end - start) * s) * radius,
            _ => self.eval(s).pos,
        }
    }

    /// Unit tangent in the direction of traversal.
    pub fn tangent(&self, s: f64) -> Point {
        self.eval(s).d1.normalized()
    }

    /// Unit normal pointing into the domain.
    pub fn inner_normal(&self, s: f64) -> Point {
        self.tangent(s).perp()
    }

    /// Signed curvature; positive when the boundary bends toward the domain.
    pub fn signed_curvature(&self, s: f64) -> f64 {
        let e = self.eval(s);
        let speed = e.d1.norm();
        e.d1.cross(e.d2) / (speed * speed * speed)
    }

    /// Same point set traversed in the opposite direction.
    pub fn reversed(&self) -> Curve {
        match *self {
            Curve::Segment { from, to } => Curve::Segment { from: to, to: from },
            Curve::Arc {
                center,
                radius,
                start,
                end,
            } => Curve::Arc {
                center,
                radius,
                start: end,
                end: start,
            },
            Curve::EllipticArc {
                center,
                rx,
                ry,
                start,
                end,
            } => Curve::EllipticArc {
                center,
                rx,
                ry,
                start: end,
                end: start,
            },
            Curve::Graph { law, from, to } => Curve::Graph {
                law,
                from: to,
                to: from,
            },
        }
    }

    /// Whether the second derivative is finite everywhere on the open piece.
    pub fn has_bounded_curvature(&self) -> bool {
        !matches!(self, Curve::Graph { law: GraphLaw::Power(p), .. } if *p < 2.0)
    }

    /// Cumulative arc length at `steps + 1` uniformly spaced parameters.
    fn arc_length_table(&self, steps: usize) -> Vec<f64> {
        let mut table = Vec::with_capacity(steps + 1);
        table.push(0.0);
        let ds = 1.0 / steps as f64;
        let mut acc = 0.0;
        let mut prev = self.eval(0.0).d1.norm();
        for k in 1..=steps {
            let mid = self.eval((k as f64 - 0.5) * ds).d1.norm();
            let next = self.eval(k as f64 * ds).d1.norm();
            // Simpson on each step
            acc += ds * (prev + 4.0 * mid + next) / 6.0;
            table.push(acc);
            prev = next;
        }
        table
    }

    pub fn length(&self) -> f64 {
        match *self {
            Curve::Segment { from, to } => from.distance(to),
            Curve::Arc {
                radius, start, end, ..
            } => radius * (end - start).abs(),
            _ => *self.arc_length_table(4096).last().unwrap(),
        }
    }

    /// Parameters of `n + 1` points equally spaced in arc length (endpoints included),
    /// together with the arc length between consecutive points.
    pub fn arc_uniform_params(&self, n: usize) -> (Vec<f64>, f64) {
        let n = n.max(1);
        match self {
            Curve::Segment { .. } | Curve::Arc { .. } => {
                let params = (0..=n).map(|k| k as f64 / n as f64).collect();
                (params, self.length() / n as f64)
            }
            _ => {
                let steps = (16 * n).max(4096);
                let table = self.arc_length_table(steps);
                let total = *table.last().unwrap();
                let step = total / n as f64;
                let mut params = Vec::with_capacity(n + 1);
                params.push(0.0);
                let mut j = 0;
                for k in 1..n {
                    let target = k as f64 * step;
                    while table[j + 1] < target {
                        j += 1;
                    }
                    let frac = (target - table[j]) / (table[j + 1] - table[j]);
                    let a = j as f64 / steps as f64;
                    let s = (j as f64 + frac) / steps as f64;
                    // one Newton step on the arc length inside the table cell
                    let speed = |t: f64| self.eval(t).d1.norm();
                    let arc = (s - a) / 6.0 * (speed(a) + 4.0 * speed(0.5 * (a + s)) + speed(s));
                    params.push(s - (arc - (target - table[j])) / speed(s));
                }
                params.push(1.0);
                (params, step)
            }
        }
    }

    /// Nearest point to `x` on the sub-piece `[sa, sb]`. Returns `(s, distance)`.
    ///
    /// Sub-pieces are assumed short relative to the local feature size, so
    /// the derivative of the squared distance changes sign at most once.
    pub fn nearest_on(&self, x: Point, sa: f64, sb: f64) -> (f64, f64) {
        match *self {
            Curve::Segment { from, to } => {
                let d = to - from;
                let s = ((x - from).dot(d) / d.norm_sq()).clamp(sa, sb);
                (s, self.point(s).distance(x))
            }
            Curve::Arc {
                center,
                radius: _,
                start,
                end,
            } => {
                let rel = x - center;
                if rel.norm() < 1e-300 {
                    return (sa, self.point(sa).distance(x));
                }
                let span = end - start;
                let theta = rel.angle();
                // lift theta into the parameter window if possible
                let raw = (theta - start) / span;
                let period = TAU / span.abs();
                let k = ((0.5 * (sa + sb) - raw) / period).round();
                let s = raw + k * period;
                if s >= sa && s <= sb {
                    (s, self.point(s).distance(x))
                } else {
                    let da = self.point(sa).distance(x);
                    let db = self.point(sb).distance(x);
                    if da <= db {
                        (sa, da)
                    } else {
                        (sb, db)
                    }
                }
            }
            _ => self.nearest_smooth(x, sa, sb),
        }
    }

    fn nearest_smooth(&self, x: Point, sa: f64, sb: f64) -> (f64, f64) {
        // g(s) = <ξ(s) - x, ξ'(s)> is half the derivative of |ξ(s) - x|²
        let g = |s: f64| {
            let e = self.eval(s);
            (e.pos - x).dot(e.d1)
        };
        let ga = g(sa);
        let gb = g(sb);
        let endpoint = || {
            let da = self.point(sa).distance(x);
            let db = self.point(sb).distance(x);
            if da <= db {
                (sa, da)
            } else {
                (sb, db)
            }
        };
        if ga >= 0.0 && gb >= 0.0 {
            return (sa, self.point(sa).distance(x));
        }
        if ga <= 0.0 && gb <= 0.0 {
            return (sb, self.point(sb).distance(x));
        }
        if ga > 0.0 {
            // interior maximum, minimum sits at an end
            return endpoint();
        }
        // sign change from - to +: interior stationary minimum
        let (mut lo, mut hi) = (sa, sb);
        let mut s = 0.5 * (sa + sb);
        let mut newton_ok = true;
        for _ in 0..30 {
            let e = self.eval(s);
            let r = e.pos - x;
            let gs = r.dot(e.d1);
            if gs == 0.0 {
                break;
            }
            if gs < 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let gp = e.d1.norm_sq() + r.dot(e.d2);
            if !gp.is_finite() || gp <= 0.0 {
                newton_ok = false;
                break;
            }
            let next = s - gs / gp;
            if next == s {
                break;
            }
            // keep the bracket: fall back to bisection when Newton leaves it
            s = if next > lo && next < hi {
                next
            } else {
                0.5 * (lo + hi)
            };
            if (hi - lo) <= 1e-15 * (sb - sa).abs().max(1e-300) {
                break;
            }
        }
        if !newton_ok {
            s = self.golden_section(x, lo, hi);
        }
        let d = self.point(s).distance(x);
        let (se, de) = endpoint();
        if de < d {
            (se, de)
        } else {
            (s, d)
        }
    }

    fn golden_section(&self, x: Point, mut a: f64, mut b: f64) -> f64 {
        const INV_PHI: f64 = 0.618_033_988_749_894_8;
        let f = |s: f64| self.point(s).distance_sq(x);
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let mut fc = f(c);
        let mut fd = f(d);
        for _ in 0..80 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = f(d);
            }
            if (b - a).abs() < 1e-16 {
                break;
            }
        }
        0.5 * (a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn arc_inner_normal_points_to_center() {
        let c = Curve::Arc {
            center: Point::ORIGIN,
            radius: 1.0,
            start: 0.0,
            end: TAU,
        };
        let n = c.inner_normal(0.0);
        assert!((n - Point::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((c.signed_curvature(0.3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_arc_bends_away() {
        let c = Curve::Arc {
            center: Point::ORIGIN,
            radius: 2.0,
            start: 0.0,
            end: PI,
        }
        .reversed();
        assert!((c.signed_curvature(0.5) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn ellipse_vertex_curvature() {
        let e = Curve::EllipticArc {
            center: Point::ORIGIN,
            rx: 2.0,
            ry: 1.0,
            start: 0.0,
            end: TAU,
        };
        assert!((e.signed_curvature(0.0) - 2.0).abs() < 1e-12);
        assert!((e.signed_curvature(0.25) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn ellipse_length_matches_series() {
        let e = Curve::EllipticArc {
            center: Point::ORIGIN,
            rx: 2.0,
            ry: 1.0,
            start: 0.0,
            end: TAU,
        };
        // Ramanujan II, accurate to ~1e-9 relative for this eccentricity
        let (a, b) = (2.0f64, 1.0f64);
        let h = ((a - b) / (a + b)).powi(2);
        let ram = PI * (a + b) * (1.0 + 3.0 * h / (10.0 + (4.0 - 3.0 * h).sqrt()));
        assert!((e.length() - ram).abs() < 1e-6);
    }

    #[test]
    fn arc_uniform_params_are_equally_spaced() {
        let g = Curve::Graph {
            law: GraphLaw::Power(1.5),
            from: 0.0,
            to: 2.0,
        };
        let (params, step) = g.arc_uniform_params(200);
        for w in params.windows(2) {
            // arc length between consecutive params as a sum of fine chords
            let m = 2000;
            let arc: f64 = (0..m)
                .map(|i| {
                    let a = w[0] + (w[1] - w[0]) * i as f64 / m as f64;
                    let b = w[0] + (w[1] - w[0]) * (i + 1) as f64 / m as f64;
                    g.point(a).distance(g.point(b))
                })
                .sum();
            assert!((arc - step).abs() < 1e-6 * step, "{arc} vs {step}");
        }
    }

    #[test]
    fn nearest_on_segment_clamps() {
        let c = Curve::Segment {
            from: Point::new(1.0, 0.0),
            to: Point::new(4.0, 0.0),
        };
        let (s, d) = c.nearest_on(Point::new(1.0, 1.0), 0.0, 1.0);
        assert_eq!(s, 0.0);
        assert_eq!(d, 1.0);
    }

    #[test]
    fn nearest_on_power_graph_at_cusp_of_curvature() {
        // f'' is unbounded at 0; the minimizer from (0.3, 0.05) is found by bracketing
        let g = Curve::Graph {
            law: GraphLaw::Power(1.5),
            from: 0.0,
            to: 1.0,
        };
        let x = Point::new(0.3, 0.05);
        let (s, d) = g.nearest_on(x, 0.0, 1.0);
        let brute = (0..=200_000)
            .map(|k| g.point(k as f64 / 200_000.0).distance(x))
            .fold(f64::INFINITY, f64::min);
        assert!((d - brute).abs() < 1e-9, "{d} {brute} at s={s}");
    }
}
