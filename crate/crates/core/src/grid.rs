//! Uniform cell-centered grids over the query box of a domain.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};

/// Minimum number of cells per axis.
pub const MIN_CELLS: usize = 32;

/// Cell centers at integer multiples of `h` inside the query box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    /// Center of cell `(0, 0)`.
    pub origin: Point,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn for_domain(domain: &Domain, h: f64) -> Result<Grid> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid spacing must be positive, got {h}")));
        }
        let q = domain.spec().query_box();
        let i0 = (q.x0 / h).ceil();
        let i1 = (q.x1 / h).floor();
        let j0 = (q.y0 / h).ceil();
        let j1 = (q.y1 / h).floor();
        let nx = if i1 >= i0 { (i1 - i0) as usize + 1 } else { 0 };
        let ny = if j1 >= j0 { (j1 - j0) as usize + 1 } else { 0 };
        if nx < MIN_CELLS || ny < MIN_CELLS {
            return Err(Error::GridTooCoarse { nx, ny });
        }
        Ok(Grid {
            origin: Point::new(i0 * h, j0 * h),
            h,
            nx,
            ny,
        })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    pub fn center(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.origin.x + i as f64 * self.h,
            self.origin.y + j as f64 * self.h,
        )
    }

    pub fn center_of(&self, k: usize) -> Point {
        let (i, j) = self.coords(k);
        self.center(i, j)
    }

    /// Indices of cells within `radius_cells` (Chebyshev) of cell `k`, excluding `k`.
    pub fn neighbors(&self, k: usize, radius_cells: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = self.coords(k);
        let r = radius_cells as isize;
        let (i, j) = (i as isize, j as isize);
        (-r..=r).flat_map(move |dj| {
            (-r..=r).filter_map(move |di| {
                let (a, b) = (i + di, j + dj);
                if (di, dj) == (0, 0) || a < 0 || b < 0 || a >= self.nx as isize || b >= self.ny as isize {
                    None
                } else {
                    Some(self.index(a as usize, b as usize))
                }
            })
        })
    }

    /// Interior flag of every cell center.
    pub fn interior(&self, domain: &Domain) -> Vec<bool> {
        (0..self.len())
            .map(|k| domain.contains(self.center_of(k)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;

    #[test]
    fn disc_grid_contains_origin_cell() {
        let d = Domain::new(DomainSpec::disc(1.0)).unwrap();
        let g = Grid::for_domain(&d, 1.0 / 64.0).unwrap();
        assert_eq!(g.nx, 2 * 72 + 1);
        let k = (0..g.len()).find(|&k| g.center_of(k) == Point::ORIGIN);
        assert!(k.is_some());
        assert_eq!(g.neighbors(0, 1).count(), 3);
        assert_eq!(g.neighbors(g.index(5, 5), 1).count(), 8);
    }

    #[test]
    fn too_coarse() {
        let d = Domain::new(DomainSpec::disc(1.0)).unwrap();
        assert!(matches!(
            Grid::for_domain(&d, 0.1),
            Err(Error::GridTooCoarse { nx: 23, ny: 23 })
        ));
    }
}
