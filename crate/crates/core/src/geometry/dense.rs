//! Dense boundary sampling with a two-level bound hierarchy.
//!
//! Intervals between consecutive dense samples are grouped into chunks with a
//! bounding circle. A query first bounds the distance from chunk centers,
//! then only expands chunks and intervals whose lower bound can still beat it.

use super::curve::Curve;
use super::point::Point;

const CHUNK_INTERVALS: usize = 32;

#[derive(Debug, Clone)]
pub(crate) struct DensePiece {
    pub params: Vec<f64>,
    pub points: Vec<Point>,
    /// Arc length of each interval.
    pub step: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Chunk {
    pub piece: usize,
    /// Intervals `first..last` (points `first..=last`).
    pub first: usize,
    pub last: usize,
    pub center: Point,
    pub radius: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct DenseBoundary {
    pub pieces: Vec<DensePiece>,
    pub chunks: Vec<Chunk>,
}

/// One interval `[params[k], params[k+1]]` of a piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct IntervalRef {
    pub piece: usize,
    pub k: usize,
}

impl DenseBoundary {
    pub fn build(curves: &[Curve], spacing: f64) -> Self {
        let mut pieces = Vec::with_capacity(curves.len());
        let mut chunks = Vec::new();
        for (pi, curve) in curves.iter().enumerate() {
            let n = (curve.length() / spacing).ceil().max(1.0) as usize;
            let (params, step) = curve.arc_uniform_params(n);
            let points: Vec<Point> = params.iter().map(|&s| curve.point(s)).collect();
            let mut first = 0;
            while first < n {
                let last = (first + CHUNK_INTERVALS).min(n);
                let center = points[(first + last) / 2];
                let radius = points[first..=last]
                    .iter()
                    .map(|p| p.distance(center))
                    .fold(0.0, f64::max)
                    + 0.5 * step;
                chunks.push(Chunk {
                    piece: pi,
                    first,
                    last,
                    center,
                    radius,
                });
                first = last;
            }
            pieces.push(DensePiece {
                params,
                points,
                step,
            });
        }
        DenseBoundary { pieces, chunks }
    }

    /// Visits every interval that may hold a local minimizer of the distance to
    /// `x` and whose lower bound is within `slack` of the smallest dense-sample
    /// distance `d0`; returns `d0`.
    ///
    /// `slack` may depend on `d0` (relative admission windows).
    pub fn visit_near(
        &self,
        x: Point,
        slack: impl Fn(f64) -> f64,
        mut visit: impl FnMut(IntervalRef),
    ) -> f64 {
        let mut upper = f64::INFINITY;
        for c in &self.chunks {
            upper = upper.min(c.center.distance(x));
        }
        let mut open: Vec<(usize, f64)> = Vec::new();
        let reach = upper + slack(upper);
        for (ci, c) in self.chunks.iter().enumerate() {
            let lb = c.center.distance(x) - c.radius;
            if lb <= reach {
                open.push((ci, lb));
            }
        }
        // exact sample distances of the open chunks
        let mut dists: Vec<Vec<f64>> = Vec::with_capacity(open.len());
        let mut d0 = upper;
        for &(ci, _) in &open {
            let c = &self.chunks[ci];
            let pts = &self.pieces[c.piece].points[c.first..=c.last];
            let d: Vec<f64> = pts.iter().map(|p| p.distance(x)).collect();
            for &v in &d {
                d0 = d0.min(v);
            }
            dists.push(d);
        }
        let reach = d0 + slack(d0);
        for (&(ci, lb), d) in open.iter().zip(&dists) {
            if lb > reach {
                continue;
            }
            let c = &self.chunks[ci];
            let piece = &self.pieces[c.piece];
            let step = piece.step;
            let n = piece.points.len() - 1;
            for j in 0..(c.last - c.first) {
                let lower = 0.5 * (d[j] + d[j + 1] - step);
                if lower > reach {
                    continue;
                }
                // A minimizer inside interval k forces the sampled distances to
                // fall into it from the left and rise out of it to the right.
                let k = c.first + j;
                let tie = 1e-12 * (1.0 + d[j]);
                let left_ok = k == 0 || piece.points[k - 1].distance(x) >= d[j] - tie;
                let right_ok = k + 1 == n || piece.points[k + 2].distance(x) >= d[j + 1] - tie;
                if left_ok && right_ok {
                    visit(IntervalRef { piece: c.piece, k });
                }
            }
        }
        d0
    }

    /// Visits intervals whose two endpoints both lie within `radius` of `center`.
    pub fn visit_within(&self, center: Point, radius: f64, mut visit: impl FnMut(IntervalRef)) {
        for c in &self.chunks {
            if c.center.distance(center) - c.radius > radius {
                continue;
            }
            let pts = &self.pieces[c.piece].points;
            let mut inside_prev = pts[c.first].distance(center) <= radius;
            for k in c.first..c.last {
                let inside_next = pts[k + 1].distance(center) <= radius;
                if inside_prev && inside_next {
                    visit(IntervalRef { piece: c.piece, k });
                }
                inside_prev = inside_next;
            }
        }
    }

    pub fn interval(&self, r: IntervalRef) -> (f64, f64) {
        let p = &self.pieces[r.piece].params;
        (p[r.k], p[r.k + 1])
    }
}
