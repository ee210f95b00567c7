//! Regular-grid geometry.
//!
//! A [`SpatialGrid`] partitions a box into half-open cubes of side `dx`.
//! The same type describes single-particle space (`d` axes) and the
//! n-particle configuration space (`n·d` axes, the single-particle axes
//! repeated per slot). Cells are `[lo + i·dx, lo + (i+1)·dx)`; the last cell
//! on each axis also owns the upper extent boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box partitioned into cubes of side `dx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    lo: Vec<f64>,
    hi: Vec<f64>,
    dx: f64,
    cells: Vec<usize>,
}

impl SpatialGrid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, dx: f64) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::config("grid needs matching, non-empty lo/hi"));
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::config(format!("grid dx must be positive, got {dx}")));
        }
        let mut cells = Vec::with_capacity(lo.len());
        for (axis, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            if !(h > l) || !l.is_finite() || !h.is_finite() {
                return Err(Error::config(format!("grid axis {axis}: need lo < hi, got [{l}, {h})")));
            }
            // Tolerate rounding so that (hi-lo)/dx = 40.000000001 does not grow a sliver cell.
            let ratio = (h - l) / dx;
            let n = if (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0) {
                ratio.round()
            } else {
                ratio.ceil()
            };
            cells.push((n as usize).max(1));
        }
        Ok(Self { lo, hi, dx, cells })
    }

    /// Grid with the same interval on every one of `dim` axes.
    pub fn uniform(dim: usize, lo: f64, hi: f64, dx: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim], dx)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn cells_per_axis(&self) -> &[usize] {
        &self.cells
    }

    pub fn num_cells(&self) -> usize {
        self.cells.iter().product()
    }

    /// Volume of one full cell, `dx^axes`.
    pub fn cell_volume(&self) -> f64 {
        self.dx.powi(self.dim() as i32)
    }

    /// Same extent, different cell size.
    pub fn with_dx(&self, dx: f64) -> Result<Self> {
        Self::new(self.lo.clone(), self.hi.clone(), dx)
    }

    /// Configuration-space grid for `n` particles: this grid's axes repeated per slot.
    pub fn configuration(&self, n: usize) -> Self {
        let mut lo = Vec::with_capacity(n * self.dim());
        let mut hi = Vec::with_capacity(n * self.dim());
        let mut cells = Vec::with_capacity(n * self.dim());
        for _ in 0..n {
            lo.extend_from_slice(&self.lo);
            hi.extend_from_slice(&self.hi);
            cells.extend_from_slice(&self.cells);
        }
        Self { lo, hi, dx: self.dx, cells }
    }

    /// Single-particle grid of a configuration grid built for `n` slots.
    pub fn slot_grid(&self, n: usize) -> Result<Self> {
        if n == 0 || self.dim() % n != 0 {
            return Err(Error::contract(format!("{} axes do not split into {n} slots", self.dim())));
        }
        let d = self.dim() / n;
        Ok(Self {
            lo: self.lo[..d].to_vec(),
            hi: self.hi[..d].to_vec(),
            dx: self.dx,
            cells: self.cells[..d].to_vec(),
        })
    }

    pub fn contains(&self, position: &[f64]) -> bool {
        position.len() == self.dim()
            && position
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&x, (&l, &h))| x >= l && x <= h)
    }

    fn axis_cell(&self, axis: usize, x: f64) -> Result<u32> {
        let (l, h) = (self.lo[axis], self.hi[axis]);
        if !(x >= l && x <= h) {
            return Err(Error::OutOfDomain { axis, value: x, lo: l, hi: h });
        }
        let i = ((x - l) / self.dx).floor() as usize;
        Ok(i.min(self.cells[axis] - 1) as u32)
    }

    /// Cell bounds `[a, b)` of cell `i` on `axis`, clipped to the extent.
    pub fn cell_bounds(&self, axis: usize, i: u32) -> (f64, f64) {
        let a = self.lo[axis] + f64::from(i) * self.dx;
        let b = (a + self.dx).min(self.hi[axis]);
        (a, b)
    }

    pub fn cell_center(&self, cell: &CellIndex) -> Vec<f64> {
        cell.0
            .iter()
            .enumerate()
            .map(|(axis, &i)| {
                let (a, b) = self.cell_bounds(axis, i);
                0.5 * (a + b)
            })
            .collect()
    }

    /// Row-major linear index (last axis fastest).
    pub fn linear_index(&self, cell: &CellIndex) -> usize {
        cell.0
            .iter()
            .zip(&self.cells)
            .fold(0usize, |acc, (&i, &n)| acc * n + i as usize)
    }

    pub fn cell_from_linear(&self, mut idx: usize) -> CellIndex {
        let mut coords = vec![0u32; self.dim()];
        for axis in (0..self.dim()).rev() {
            coords[axis] = (idx % self.cells[axis]) as u32;
            idx /= self.cells[axis];
        }
        CellIndex(coords)
    }

    /// Iterates every cell in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        (0..self.num_cells()).map(|i| self.cell_from_linear(i))
    }
}

/// Integer coordinates of one cell, one entry per axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellIndex(pub Vec<u32>);

impl CellIndex {
    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    /// Coordinates belonging to slot `slot` when `d` axes make one particle.
    pub fn slot(&self, slot: usize, d: usize) -> &[u32] {
        &self.0[slot * d..(slot + 1) * d]
    }
}

/// A cell of the double configuration space: where a cortege started and where it ended.
///
/// Ordering is lexicographic on `(ini, fin)`, which fixes tie-breaking in group ranking.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DoubleCellIndex {
    pub ini: CellIndex,
    pub fin: CellIndex,
}

/// Cell containing `position`, `floor((x - lo)/dx)` per axis.
///
/// `position` may be a single-particle point or a configuration point whose
/// length is a multiple of the grid dimension; in the latter case the grid
/// is applied per slot and the results concatenated.
pub fn cell_of(position: &[f64], grid: &SpatialGrid) -> Result<CellIndex> {
    let d = grid.dim();
    if position.is_empty() || position.len() % d != 0 {
        return Err(Error::contract(format!(
            "point of length {} does not fit a {d}-axis grid",
            position.len()
        )));
    }
    let coords = position
        .iter()
        .enumerate()
        .map(|(k, &x)| grid.axis_cell(k % d, x).map_err(|e| reaxis(e, k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CellIndex(coords))
}

fn reaxis(e: Error, axis: usize) -> Error {
    match e {
        Error::OutOfDomain { value, lo, hi, .. } => Error::OutOfDomain { axis, value, lo, hi },
        other => other,
    }
}

/// Double-space cell of an (initial, final) pair of configuration points.
pub fn double_cell_of(ini: &[f64], fin: &[f64], grid: &SpatialGrid) -> Result<DoubleCellIndex> {
    if ini.len() != fin.len() {
        return Err(Error::contract("initial and final points differ in length"));
    }
    Ok(DoubleCellIndex {
        ini: cell_of(ini, grid)?,
        fin: cell_of(fin, grid)?,
    })
}
