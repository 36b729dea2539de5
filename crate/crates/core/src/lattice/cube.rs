use super::{GridFunction, Lattice, SummedTable};
use crate::scalar::{Exponent, Real};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Tiling of ℝ^d by the half-open cubes `Q_k^r = ∏ [r·k_i, r·(k_i + 1))`.
///
/// The scale must be a whole number `m` of cells so that every cube is a
/// union of cells. With `n/2` cells on each side of the origin, cell `i`
/// belongs to cube `k = ⌊(i − n/2) / m⌋` along each axis.
#[derive(Clone, Debug, PartialEq)]
pub struct CubePartition<T> {
    lattice: Lattice<T>,
    cells_per_cube: usize,
}

impl<T: Real> CubePartition<T> {
    pub fn new(lattice: &Lattice<T>, scale: T) -> Result<Self> {
        let m = lattice.aligned_cells(scale).ok_or(Error::Misaligned {
            r: scale.as_f64(),
            h: lattice.spacing().as_f64(),
        })?;
        Ok(Self { lattice: lattice.clone(), cells_per_cube: m })
    }

    pub fn scale(&self) -> T {
        self.lattice.spacing() * T::from_count(self.cells_per_cube)
    }

    pub fn cells_per_cube(&self) -> usize {
        self.cells_per_cube
    }

    /// Cube index of cell `i` along one axis.
    #[inline]
    pub fn cube_of(&self, i: usize) -> i64 {
        let offset = i as i64 - (self.lattice.cells_per_axis() / 2) as i64;
        offset.div_euclid(self.cells_per_cube as i64)
    }

    /// Inclusive range of cube indices meeting the sampled box, per axis.
    pub fn index_range(&self) -> (i64, i64) {
        (self.cube_of(0), self.cube_of(self.lattice.cells_per_axis() - 1))
    }

    /// Number of cubes along one axis meeting the box.
    pub fn cubes_per_axis(&self) -> usize {
        let (lo, hi) = self.index_range();
        (hi - lo + 1) as usize
    }

    /// Cell index range `lo..hi` (clipped) covered by cube `k` along one axis.
    pub fn cells_of(&self, k: i64) -> (usize, usize) {
        let m = self.cells_per_cube as i64;
        let half = (self.lattice.cells_per_axis() / 2) as i64;
        let n = self.lattice.cells_per_axis() as i64;
        let lo = (k * m + half).clamp(0, n);
        let hi = ((k + 1) * m + half).clamp(0, n);
        (lo as usize, hi as usize)
    }

    /// Flat cube number of every cell, row-major over the cubes meeting the box.
    pub(crate) fn cube_ids(&self) -> Vec<usize> {
        let (lo, _) = self.index_range();
        let per_axis = self.cubes_per_axis();
        let axis: Vec<usize> =
            (0..self.lattice.cells_per_axis()).map(|i| (self.cube_of(i) - lo) as usize).collect();
        (0..self.lattice.len())
            .map(|flat| {
                let (r, c) = self.lattice.index(flat);
                if self.lattice.dim() == 1 {
                    axis[c]
                } else {
                    axis[r] * per_axis + axis[c]
                }
            })
            .collect()
    }

    pub fn cube_count(&self) -> usize {
        self.cubes_per_axis().pow(self.lattice.dim() as u32)
    }

    fn axis_cells(&self, k: &[i64]) -> ((usize, usize), (usize, usize)) {
        if self.lattice.dim() == 1 {
            ((0, 1), self.cells_of(k[0]))
        } else {
            (self.cells_of(k[0]), self.cells_of(k[1]))
        }
    }
}

/// `‖f χ_{Q_k}‖_q` by direct summation over the cells of the cube.
pub fn cube_integral<T: Real>(f: &GridFunction<T>, q: Exponent, partition: &CubePartition<T>, k: &[i64]) -> Result<T> {
    if f.lattice() != &partition.lattice {
        return Err(Error::LatticeMismatch);
    }
    let (rows, cols) = partition.axis_cells(k);
    let mut acc = CompensatedSum::new();
    let mut peak = T::zero();
    for r in rows.0..rows.1 {
        for c in cols.0..cols.1 {
            let v = f.at(r, c);
            match q {
                Exponent::Infinite => peak = peak.max(v.abs()),
                _ => acc.add(q.pow_abs(v)),
            }
        }
    }
    Ok(match q {
        Exponent::Infinite => peak,
        _ => q.root(f.lattice().cell_volume() * acc.value()),
    })
}

/// `‖f χ_{Q_k}‖_q` from a summed table built with the same exponent.
pub fn cube_integral_with_table<T: Real>(table: &SummedTable<T>, partition: &CubePartition<T>, k: &[i64]) -> Result<T> {
    if table.lattice() != &partition.lattice {
        return Err(Error::LatticeMismatch);
    }
    let (rows, cols) = partition.axis_cells(k);
    let s = table.box_sum(rows, cols);
    Ok(table.exponent().root(table.lattice().cell_volume() * s))
}
