use super::{GridFunction, Lattice, RowMax, SummedTable};
use crate::scalar::{Exponent, Real};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Closed Euclidean ball `B(center, radius)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball<T> {
    center: Vec<T>,
    radius: T,
}

impl<T: Real> Ball<T> {
    pub fn new(center: Vec<T>, radius: T) -> Result<Self> {
        if !(radius.is_finite() && radius > T::zero()) {
            return Err(Error::OutOfDomain(format!("ball radius {radius} must be positive")));
        }
        if center.iter().any(|x| !x.is_finite()) {
            return Err(Error::OutOfDomain("ball center must be finite".into()));
        }
        Ok(Self { center, radius })
    }

    /// Ball centered at the cell with flat index `cell`.
    pub fn at_cell(lattice: &Lattice<T>, cell: usize, radius: T) -> Result<Self> {
        Self::new(lattice.point(cell), radius)
    }

    pub fn center(&self) -> &[T] {
        &self.center
    }

    pub fn radius(&self) -> T {
        self.radius
    }
}

/// `r/h`, snapped to the nearest integer when within `1e-9` relative so that
/// aligned radii such as `0.3` on `h = 0.1` keep their boundary cells.
pub fn radius_in_cells<T: Real>(r: T, h: T) -> T {
    let k = r / h;
    let kr = k.round();
    if (k - kr).abs() <= T::lit(1e-9) * kr.max(T::one()) {
        kr
    } else {
        k
    }
}

/// Midpoint-rule `∫_{B} |f|^q` (or `max_B |f|` for `q = ∞`).
///
/// The ball collects every cell whose center lies within Euclidean distance
/// `r` of the ball center. Cells are enumerated directly; this is the
/// reference path the accelerated stencils are tested against.
pub fn ball_integral<T: Real>(f: &GridFunction<T>, q: Exponent, ball: &Ball<T>) -> T {
    let lattice = f.lattice();
    let d = lattice.dim();
    let radius = radius_in_cells(ball.radius, lattice.spacing());
    let r2 = radius * radius;
    let (rows, cols) = lattice.shape();
    let u_col = lattice.fractional_index(ball.center[d - 1]);
    let u_row = if d == 2 { lattice.fractional_index(ball.center[0]) } else { T::zero() };

    let span = |u: T, n: usize| -> std::ops::Range<usize> {
        let lo = (u - radius).ceil().max(T::zero());
        let hi = (u + radius).floor().min(T::from_count(n) - T::one());
        if hi < lo {
            0..0
        } else {
            lo.to_usize().unwrap_or(0)..hi.to_usize().unwrap_or(0) + 1
        }
    };
    let row_range = if d == 2 { span(u_row, rows) } else { 0..1 };
    let col_range = span(u_col, cols);

    let mut acc = CompensatedSum::new();
    let mut peak = T::zero();
    for row in row_range {
        let dr = T::from_count(row) - u_row;
        for col in col_range.clone() {
            let dc = T::from_count(col) - u_col;
            let dist2 = if d == 2 { dr * dr + dc * dc } else { dc * dc };
            if dist2 <= r2 {
                let v = f.at(row, col);
                match q {
                    Exponent::Infinite => peak = peak.max(v.abs()),
                    _ => acc.add(q.pow_abs(v)),
                }
            }
        }
    }
    match q {
        Exponent::Infinite => peak,
        _ => lattice.cell_volume() * acc.value(),
    }
}

/// Row decomposition of the discrete ball of radius `R` cells centered at a
/// cell: offsets `(di, dj)` with `di² + dj² ≤ R²`, stored as `(di, w)` with
/// `|dj| ≤ w`.
#[derive(Clone, Debug, PartialEq)]
pub struct BallStencil {
    rows: Vec<(isize, isize)>,
    count: usize,
}

impl BallStencil {
    pub fn new<T: Real>(radius_cells: T, dim: usize) -> Self {
        let r2 = radius_cells * radius_cells;
        let inside = |a: i64, b: i64| T::from_int(a * a + b * b) <= r2;
        let half_width = |di: i64| -> Option<isize> {
            if !inside(di, 0) {
                return None;
            }
            let base = (r2 - T::from_int(di * di)).max(T::zero()).sqrt().floor().to_i64().unwrap_or(0);
            let mut w = base.max(0);
            while inside(di, w + 1) {
                w += 1;
            }
            while w > 0 && !inside(di, w) {
                w -= 1;
            }
            Some(w as isize)
        };
        let rows: Vec<(isize, isize)> = if dim == 1 {
            vec![(0, half_width(0).unwrap_or(0))]
        } else {
            let top = radius_cells.floor().to_i64().unwrap_or(0) + 1;
            (-top..=top).filter_map(|di| half_width(di).map(|w| (di as isize, w))).collect()
        };
        let count = rows.iter().map(|(_, w)| (2 * w + 1) as usize).sum();
        Self { rows, count }
    }

    /// Stencil for a physical radius on a given lattice.
    pub fn for_radius<T: Real>(lattice: &Lattice<T>, r: T) -> Self {
        Self::new(radius_in_cells(r, lattice.spacing()), lattice.dim())
    }

    /// Number of cells in the discrete ball, including any outside the lattice.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn rows(&self) -> &[(isize, isize)] {
        &self.rows
    }

    /// Largest row or column offset.
    pub fn reach(&self) -> usize {
        self.rows.iter().map(|(di, w)| di.unsigned_abs().max(w.unsigned_abs())).max().unwrap_or(0)
    }

    /// `Σ |f|^q` over the ball centered at `(row, col)`, which may lie outside
    /// the lattice.
    #[inline]
    pub fn sum<T: Real>(&self, table: &SummedTable<T>, row: isize, col: isize) -> T {
        let mut acc = CompensatedSum::new();
        for &(di, w) in &self.rows {
            acc.add(table.row_sum_signed(row + di, col - w, col + w + 1));
        }
        acc.value()
    }

    #[inline]
    pub fn max<T: Real>(&self, table: &RowMax<T>, row: isize, col: isize) -> T {
        self.rows
            .iter()
            .fold(T::zero(), |m, &(di, w)| m.max(table.query(row + di, col - w, col + w + 1)))
    }
}
