//! First-order fast marching for `|∇u| = 1`, `u = 0` on the boundary.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;

use crate::cutlocus::SkeletonMask;
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellState {
    Far,
    Narrow,
    Accepted,
    Exterior,
}

impl CellState {
    pub fn name(&self) -> &'static str {
        match self {
            CellState::Far => "far",
            CellState::Narrow => "narrow",
            CellState::Accepted => "accepted",
            CellState::Exterior => "exterior",
        }
    }
}

/// Solution of the marching scheme on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct ScalarField {
    pub grid: Grid,
    /// `NaN` on exterior cells.
    pub values: Vec<f64>,
    pub state: Vec<CellState>,
    /// Cells initialized from the exact distance.
    pub initialized: Vec<bool>,
    /// Accepted values that fell below an earlier accepted value.
    pub acceptance_violations: usize,
    pub accepted: usize,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    value: f64,
    cell: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // reversed: BinaryHeap pops the smallest value first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .value
            .total_cmp(&self.value)
            .then(other.cell.cmp(&self.cell))
    }
}

fn upwind_update(a: f64, b: f64, h: f64) -> f64 {
    match (a.is_finite(), b.is_finite()) {
        (true, true) if (a - b).abs() < h => 0.5 * (a + b + (2.0 * h * h - (a - b).powi(2)).sqrt()),
        (true, true) => a.min(b) + h,
        (true, false) => a + h,
        (false, true) => b + h,
        (false, false) => f64::INFINITY,
    }
}

/// Marches the eikonal front from exact distances on the boundary band.
///
/// Interior cells on the grid edge are seeded the same way: the domain may
/// continue past the query box and the front cannot see boundary out there.
pub fn solve(domain: &Domain, h: f64) -> Result<ScalarField> {
    let grid = Grid::for_domain(domain, h)?;
    let interior = grid.interior(domain);
    let n = grid.len();
    let band: Vec<bool> = (0..n)
        .map(|k| {
            let (i, j) = grid.coords(k);
            let edge = i == 0 || j == 0 || i + 1 == grid.nx || j + 1 == grid.ny;
            interior[k] && (edge || grid.neighbors(k, 1).any(|m| !interior[m]))
        })
        .collect();
    let exact: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            if band[k] {
                domain.distance_unchecked(grid.center_of(k))
            } else {
                f64::INFINITY
            }
        })
        .collect();

    let mut values = vec![f64::INFINITY; n];
    let mut state: Vec<CellState> = interior
        .iter()
        .map(|&i| if i { CellState::Far } else { CellState::Exterior })
        .collect();
    let mut heap = BinaryHeap::new();
    for k in 0..n {
        if band[k] {
            values[k] = exact[k];
            state[k] = CellState::Narrow;
            heap.push(Entry {
                value: exact[k],
                cell: k,
            });
        }
    }

    let value_of = |values: &[f64], state: &[CellState], i: isize, j: isize| -> f64 {
        if i < 0 || j < 0 || i >= grid.nx as isize || j >= grid.ny as isize {
            return f64::INFINITY;
        }
        let k = grid.index(i as usize, j as usize);
        if state[k] == CellState::Accepted {
            values[k]
        } else {
            f64::INFINITY
        }
    };

    let mut last = f64::NEG_INFINITY;
    let mut violations = 0;
    let mut accepted = 0;
    while let Some(Entry { value, cell }) = heap.pop() {
        if state[cell] == CellState::Accepted || value > values[cell] {
            continue; // stale entry
        }
        state[cell] = CellState::Accepted;
        accepted += 1;
        if value < last - 1e-12 * last.abs().max(1.0) {
            violations += 1;
        }
        last = last.max(value);
        let (ci, cj) = grid.coords(cell);
        for (di, dj) in [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)] {
            let (i, j) = (ci as isize + di, cj as isize + dj);
            if i < 0 || j < 0 || i >= grid.nx as isize || j >= grid.ny as isize {
                continue;
            }
            let k = grid.index(i as usize, j as usize);
            if band[k] || matches!(state[k], CellState::Accepted | CellState::Exterior) {
                continue;
            }
            let a = value_of(&values, &state, i - 1, j).min(value_of(&values, &state, i + 1, j));
            let b = value_of(&values, &state, i, j - 1).min(value_of(&values, &state, i, j + 1));
            let u = upwind_update(a, b, h);
            if u < values[k] {
                values[k] = u;
                state[k] = CellState::Narrow;
                heap.push(Entry { value: u, cell: k });
            }
        }
    }
    let unreached = state
        .iter()
        .filter(|s| matches!(s, CellState::Far | CellState::Narrow))
        .count();
    if unreached > 0 {
        return Err(Error::DisconnectedInterior { unreached });
    }
    for k in 0..n {
        if !interior[k] {
            values[k] = f64::NAN;
        }
    }
    Ok(ScalarField {
        grid,
        values,
        state,
        initialized: band,
        acceptance_violations: violations,
        accepted,
    })
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct ErrorStats {
    pub cells: usize,
    pub max: f64,
    pub mean: f64,
}

impl ErrorStats {
    fn from_errors(errs: &[f64]) -> Self {
        if errs.is_empty() {
            return Self::default();
        }
        ErrorStats {
            cells: errs.len(),
            max: errs.iter().copied().fold(0.0, f64::max),
            mean: errs.iter().sum::<f64>() / errs.len() as f64,
        }
    }
}

/// Accuracy of a solved field against the exact distance.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub h: f64,
    /// Cells within `3h` of the skeleton closure.
    pub near: ErrorStats,
    pub far: ErrorStats,
    /// Median of `| |∇u|_h − 1 |` over far cells outside the boundary band.
    pub residual_median: f64,
    pub residual_max: f64,
    pub min_value: f64,
    /// Largest value on cells sharing an edge with an exterior cell.
    pub max_boundary_adjacent: f64,
    pub acceptance_violations: usize,
}

/// Splits `|u − d|` by distance to the skeleton closure of `mask` (same grid).
pub fn error_report(field: &ScalarField, domain: &Domain, mask: &SkeletonMask) -> Result<ErrorReport> {
    let g = field.grid;
    if mask.grid != g {
        return Err(Error::InvalidArgument(
            "skeleton mask and field must share a grid".into(),
        ));
    }
    let h = g.h;
    let near = mask.near_closure(3.0 * h);
    let cells: Vec<usize> = (0..g.len())
        .filter(|&k| field.state[k] == CellState::Accepted)
        .collect();
    let errs: Vec<(usize, f64)> = cells
        .par_iter()
        .map(|&k| {
            let d = domain.distance_unchecked(g.center_of(k));
            (k, (field.values[k] - d).abs())
        })
        .collect();
    let near_errs: Vec<f64> = errs.iter().filter(|(k, _)| near[*k]).map(|e| e.1).collect();
    let far_errs: Vec<f64> = errs.iter().filter(|(k, _)| !near[*k]).map(|e| e.1).collect();

    let accepted = |i: isize, j: isize| -> Option<f64> {
        if i < 0 || j < 0 || i >= g.nx as isize || j >= g.ny as isize {
            return None;
        }
        let k = g.index(i as usize, j as usize);
        (field.state[k] == CellState::Accepted).then(|| field.values[k])
    };
    let mut residuals: Vec<f64> = cells
        .iter()
        .filter(|&&k| !near[k] && !field.initialized[k])
        .filter_map(|&k| {
            let (i, j) = g.coords(k);
            let (i, j) = (i as isize, j as isize);
            let u = field.values[k];
            let l = accepted(i - 1, j)?;
            let r = accepted(i + 1, j)?;
            let d = accepted(i, j - 1)?;
            let t = accepted(i, j + 1)?;
            let dx = (u - l).max(u - r).max(0.0) / h;
            let dy = (u - d).max(u - t).max(0.0) / h;
            Some((dx.hypot(dy) - 1.0).abs())
        })
        .collect();
    residuals.sort_by(f64::total_cmp);
    let residual_median = if residuals.is_empty() {
        0.0
    } else {
        residuals[residuals.len() / 2]
    };
    let min_value = cells.iter().map(|&k| field.values[k]).fold(f64::INFINITY, f64::min);
    let max_boundary_adjacent = cells
        .iter()
        .filter(|&&k| {
            let (i, j) = g.coords(k);
            [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)].iter().any(|(di, dj)| {
                let (a, b) = (i as isize + di, j as isize + dj);
                a >= 0
                    && b >= 0
                    && a < g.nx as isize
                    && b < g.ny as isize
                    && field.state[g.index(a as usize, b as usize)] == CellState::Exterior
            })
        })
        .map(|&k| field.values[k])
        .fold(0.0, f64::max);
    Ok(ErrorReport {
        h,
        near: ErrorStats::from_errors(&near_errs),
        far: ErrorStats::from_errors(&far_errs),
        residual_median,
        residual_max: residuals.last().copied().unwrap_or(0.0),
        min_value,
        max_boundary_adjacent,
        acceptance_violations: field.acceptance_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutlocus::detect_skeleton;
    use crate::geometry::{DomainSpec, Point};

    #[test]
    fn update_formula() {
        let h = 0.1;
        assert!((upwind_update(0.0, f64::INFINITY, h) - 0.1).abs() < 1e-15);
        // symmetric two-axis update: u = a + h/√2
        let u = upwind_update(1.0, 1.0, h);
        assert!((u - (1.0 + h / 2f64.sqrt())).abs() < 1e-12);
        assert!((upwind_update(0.0, 0.5, h) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn disc_center_value() {
        let d = Domain::new(DomainSpec::disc(1.0)).unwrap();
        let h = 1.0 / 64.0;
        let f = solve(&d, h).unwrap();
        assert_eq!(f.acceptance_violations, 0);
        let k = (0..f.grid.len())
            .find(|&k| f.grid.center_of(k) == Point::ORIGIN)
            .unwrap();
        assert!((f.values[k] - 1.0).abs() <= 3.0 * h, "{}", f.values[k]);
        let mask = detect_skeleton(&d, h).unwrap();
        let rep = error_report(&f, &d, &mask).unwrap();
        assert!(rep.far.max <= 2.0 * h, "{:?}", rep.far);
        assert!(rep.min_value >= 0.0 && rep.max_boundary_adjacent <= h);
        assert!(rep.residual_median <= 0.05);
    }

    #[test]
    fn strip_is_one_dimensional() {
        let d = Domain::new(DomainSpec::strip()).unwrap();
        let h = 1.0 / 64.0;
        let f = solve(&d, h).unwrap();
        for k in 0..f.grid.len() {
            let c = f.grid.center_of(k);
            if f.state[k] == CellState::Accepted && c.x.abs() <= 0.5 {
                let exact = (c.y + 0.5).min(0.5 - c.y);
                assert!((f.values[k] - exact).abs() <= h, "{c}: {}", f.values[k]);
            }
        }
    }
}
