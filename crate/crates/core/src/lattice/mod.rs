//! Uniform lattices, sampled functions, balls, cubes and prefix-sum tables.
//!
//! A lattice of spacing `h` and half-width `L` covers `[−L, L]^d` with
//! `n = 2·round(L/h)` cells per axis; cell `i` has center `−L + (i + ½)h`.
//! Functions are zero outside the sampled box. In two dimensions cells are
//! stored row-major: flat index `i·n + j`, where `i` indexes the first axis.
//! One-dimensional lattices are treated as a single row.

mod ball;
mod cube;
mod sample;
mod table;

pub use ball::{ball_integral, radius_in_cells, Ball, BallStencil};
pub use cube::{cube_integral, cube_integral_with_table, CubePartition};
pub use sample::{sample, FunctionSpec};
pub use table::{RowMax, SummedTable};

use serde::{Deserialize, Serialize};

use crate::scalar::{Exponent, Real};
use crate::{Error, Result};

/// Upper bound on the number of cells a lattice may allocate by default.
pub const DEFAULT_MAX_CELLS: usize = 1 << 26;

/// Serializable description `{"d":1,"h":0.01,"L":8.0}` of a lattice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub d: usize,
    pub h: f64,
    #[serde(rename = "L")]
    pub half_width: f64,
}

impl LatticeSpec {
    pub fn build<T: Real>(&self) -> Result<Lattice<T>> {
        Lattice::new(self.d, T::lit(self.h), T::lit(self.half_width))
    }

    /// Same box, half the spacing.
    pub fn refined(&self) -> Self {
        Self { h: self.h / 2.0, ..*self }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lattice<T> {
    dim: usize,
    spacing: T,
    cells: usize,
}

/// Builds the lattice `[−L, L]^d` with spacing `h`.
pub fn make_lattice<T: Real>(d: usize, h: T, half_width: T) -> Result<Lattice<T>> {
    Lattice::new(d, h, half_width)
}

impl<T: Real> Lattice<T> {
    pub fn new(d: usize, h: T, half_width: T) -> Result<Self> {
        Self::with_cell_cap(d, h, half_width, DEFAULT_MAX_CELLS)
    }

    pub fn with_cell_cap(d: usize, h: T, half_width: T, max_cells: usize) -> Result<Self> {
        if !(h.is_finite() && h > T::zero()) {
            return Err(Error::InvalidLattice(format!("spacing h = {h} must be positive")));
        }
        if !(half_width.is_finite() && half_width > T::zero()) {
            return Err(Error::InvalidLattice(format!("half-width L = {half_width} must be positive")));
        }
        let ratio = half_width / h;
        if ratio < T::lit(2.0) - T::epsilon() * T::lit(16.0) {
            return Err(Error::InvalidLattice(format!("need L ≥ 2h, got L = {half_width}, h = {h}")));
        }
        let half = ratio.round().to_usize().ok_or_else(|| Error::InvalidLattice("L/h too large".into()))?;
        Self::from_cells_capped(d, h, 2 * half, max_cells)
    }

    /// Lattice with `n` cells per axis (`n` even, at least 4).
    pub fn from_cells(d: usize, h: T, n: usize) -> Result<Self> {
        Self::from_cells_capped(d, h, n, DEFAULT_MAX_CELLS)
    }

    fn from_cells_capped(d: usize, h: T, n: usize, max_cells: usize) -> Result<Self> {
        if d != 1 && d != 2 {
            return Err(Error::InvalidLattice(format!("dimension d = {d} must be 1 or 2")));
        }
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidLattice(format!("cell count n = {n} must be even and ≥ 2")));
        }
        let total = n.checked_pow(d as u32).unwrap_or(usize::MAX);
        if total > max_cells {
            return Err(Error::InvalidLattice(format!(
                "{total} cells exceed the cap of {max_cells}"
            )));
        }
        Ok(Self { dim: d, spacing: h, cells: n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells
    }

    /// Total number of cells, `n^d`.
    pub fn len(&self) -> usize {
        self.cells.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Effective half-width `n·h/2`.
    pub fn half_width(&self) -> T {
        self.spacing * T::from_count(self.cells) / T::lit(2.0)
    }

    /// `h^d`.
    pub fn cell_volume(&self) -> T {
        self.spacing.powi(self.dim as i32)
    }

    /// Euclidean diameter `2L√d` of the sampled box.
    pub fn diameter(&self) -> T {
        T::lit(2.0) * self.half_width() * T::from_count(self.dim).sqrt()
    }

    /// `(rows, cols)`: `(1, n)` in one dimension, `(n, n)` in two.
    pub fn shape(&self) -> (usize, usize) {
        if self.dim == 1 {
            (1, self.cells)
        } else {
            (self.cells, self.cells)
        }
    }

    /// Center coordinate of cell `i` along any axis.
    #[inline]
    pub fn center(&self, i: usize) -> T {
        let twice = 2 * i as i64 - self.cells as i64 + 1;
        T::from_int(twice) * self.spacing / T::lit(2.0)
    }

    /// `(row, col)` of a flat index.
    #[inline]
    pub fn index(&self, flat: usize) -> (usize, usize) {
        if self.dim == 1 {
            (0, flat)
        } else {
            (flat / self.cells, flat % self.cells)
        }
    }

    #[inline]
    pub fn flat(&self, row: usize, col: usize) -> usize {
        row * self.cells + col
    }

    /// Cell-center coordinates of a flat index, in axis order.
    pub fn point(&self, flat: usize) -> Vec<T> {
        let (row, col) = self.index(flat);
        if self.dim == 1 {
            vec![self.center(col)]
        } else {
            vec![self.center(row), self.center(col)]
        }
    }

    /// Fractional cell index of a coordinate; integral at cell centers.
    pub(crate) fn fractional_index(&self, x: T) -> T {
        let u = (x + self.half_width()) / self.spacing - T::lit(0.5);
        let r = u.round();
        if (u - r).abs() <= T::lit(1e-9) * (T::one() + r.abs()) {
            r
        } else {
            u
        }
    }

    /// Lattice extended by `m` cells on every side; old cell `i` becomes `i + m`.
    pub fn padded(&self, m: usize) -> Self {
        Self { cells: self.cells + 2 * m, ..self.clone() }
    }

    /// Same box at half the spacing.
    pub fn refined(&self) -> Self {
        Self { spacing: self.spacing / T::lit(2.0), cells: self.cells * 2, dim: self.dim }
    }

    pub fn spec(&self) -> LatticeSpec {
        LatticeSpec { d: self.dim, h: self.spacing.as_f64(), half_width: self.half_width().as_f64() }
    }

    /// Whether `r` is an integer multiple of the spacing, returning the multiple.
    pub fn aligned_cells(&self, r: T) -> Option<usize> {
        let k = r / self.spacing;
        let kr = k.round();
        if kr >= T::one() && (k - kr).abs() <= T::lit(1e-9) * kr {
            kr.to_usize()
        } else {
            None
        }
    }
}

/// Real-valued function sampled at the cell centers of a lattice.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct GridFunction<T> {
    #[serde(serialize_with = "serialize_lattice")]
    lattice: Lattice<T>,
    values: Vec<T>,
}

fn serialize_lattice<T: Real, S: serde::Serializer>(l: &Lattice<T>, s: S) -> std::result::Result<S::Ok, S::Error> {
    l.spec().serialize(s)
}

impl<T: Real> GridFunction<T> {
    pub fn new(lattice: Lattice<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::InvalidFunction(format!(
                "expected {} values, got {}",
                lattice.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { lattice, values })
    }

    pub fn zeros(lattice: &Lattice<T>) -> Self {
        Self { values: vec![T::zero(); lattice.len()], lattice: lattice.clone() }
    }

    pub fn from_fn(lattice: &Lattice<T>, mut f: impl FnMut(&[T]) -> T) -> Result<Self> {
        let values = (0..lattice.len()).map(|k| f(&lattice.point(k))).collect();
        Self::new(lattice.clone(), values)
    }

    pub fn lattice(&self) -> &Lattice<T> {
        &self.lattice
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> T {
        self.values[self.lattice.flat(row, col)]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == T::zero())
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(self.lattice.clone(), self.values.iter().map(|v| f(*v)).collect())
    }

    pub fn abs(&self) -> Self {
        Self { lattice: self.lattice.clone(), values: self.values.iter().map(|v| v.abs()).collect() }
    }

    pub fn scale(&self, c: T) -> Result<Self> {
        self.map(|v| c * v)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| *a + *b).collect();
        Self::new(self.lattice.clone(), values)
    }

    /// Translates by whole cells (`offset` per axis), filling with zeros.
    pub fn shifted(&self, offset: &[isize]) -> Self {
        let n = self.lattice.cells as isize;
        let (rows, cols) = self.lattice.shape();
        let (dr, dc) = if self.lattice.dim == 1 { (0, offset[0]) } else { (offset[0], offset[1]) };
        let mut values = vec![T::zero(); self.values.len()];
        for r in 0..rows as isize {
            for c in 0..cols as isize {
                let (sr, sc) = (r - dr, c - dc);
                if sr < 0 || sc < 0 || sc >= n || (self.lattice.dim == 2 && sr >= n) {
                    continue;
                }
                values[(r * cols as isize + c) as usize] = self.values[(sr * cols as isize + sc) as usize];
            }
        }
        Self { lattice: self.lattice.clone(), values }
    }

    /// The same function on a lattice padded by `m` cells per side.
    pub fn padded(&self, m: usize) -> Self {
        let big = self.lattice.padded(m);
        let mut values = vec![T::zero(); big.len()];
        let (rows, cols) = self.lattice.shape();
        for r in 0..rows {
            for c in 0..cols {
                let br = if self.lattice.dim == 1 { 0 } else { r + m };
                values[big.flat(br, c + m)] = self.at(r, c);
            }
        }
        Self { lattice: big, values }
    }
}

/// `(h^d Σ |f|^q)`-type helper: ℓ^p norm of nonnegative terms scaled by the
/// largest term, so a single nonzero term is returned exactly.
pub(crate) fn scaled_lp<T: Real>(terms: &[T], p: Exponent) -> T {
    let m = terms.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if m == T::zero() {
        return T::zero();
    }
    match p {
        Exponent::Infinite => m,
        _ => {
            let s = crate::sum::compensated_sum(terms.iter().map(|v| p.pow_abs(*v / m)));
            m * p.root(s)
        }
    }
}
