//! Centered Hardy–Littlewood maximal operator on grid functions.
//!
//! Averages use the discrete cell count of the ball as denominator, counting
//! cells outside the sampled box (where `f = 0`). That keeps `M c = c` and
//! `Mf ≥ |f|` exact.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::{radius_in_cells, BallStencil, GridFunction, Lattice, SummedTable};
use crate::radius::RadiusGrid;
use crate::report::{CheckReport, CheckRow, Statistic};
use crate::scalar::{Exponent, Real};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Direct enumeration of every ball.
    #[default]
    Naive,
    /// Same balls, row sums from a summed table.
    PrefixBall,
    /// Cube maximal operator: averages over the inscribed and circumscribed
    /// cubes of each ball.
    PrefixCube,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Naive => "naive",
            Method::PrefixBall => "prefix-ball",
            Method::PrefixCube => "prefix-cube",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Method::Naive),
            "prefix-ball" => Ok(Method::PrefixBall),
            "prefix-cube" => Ok(Method::PrefixCube),
            _ => Err(Error::Precondition(format!(
                "unknown method {s:?}, expected naive, prefix-ball or prefix-cube"
            ))),
        }
    }
}

/// Radii of the supremum (radius 0 is always added) and evaluation path.
#[derive(Clone, Debug, PartialEq)]
pub struct MaximalConfig<T> {
    pub radii: RadiusGrid<T>,
    pub method: Method,
}

/// One radius of the supremum in cell units.
#[derive(Clone, Debug)]
struct Level {
    stencil: BallStencil,
    /// Squared radius in cells.
    r2: f64,
    /// Half-widths of the inscribed and circumscribed cubes.
    inner: usize,
    outer: usize,
}

impl<T: Real> MaximalConfig<T> {
    pub fn new(radii: RadiusGrid<T>, method: Method) -> Self {
        Self { radii, method }
    }

    /// Every multiple of `h` up to the lattice diameter.
    pub fn all_aligned(lattice: &Lattice<T>, method: Method) -> Result<Self> {
        Ok(Self::new(RadiusGrid::all_aligned(lattice)?, method))
    }

    /// Radii actually used on `lattice`: those beyond the diameter `2L√d`
    /// are replaced by the diameter itself. Radius 0 is implicit.
    pub fn effective_radii(&self, lattice: &Lattice<T>) -> Vec<T> {
        let diam = lattice.diameter();
        let mut out: Vec<T> = self.radii.radii().iter().copied().filter(|r| *r <= diam).collect();
        if self.radii.max() > diam && out.last() != Some(&diam) {
            out.push(diam);
        }
        out
    }

    fn levels(&self, lattice: &Lattice<T>) -> Vec<Level> {
        let d = lattice.dim();
        let mut levels: Vec<Level> = Vec::new();
        for r in self.effective_radii(lattice) {
            let rc = radius_in_cells(r, lattice.spacing());
            let stencil = BallStencil::new(rc, d);
            if stencil.count() == 1 || levels.last().is_some_and(|l| l.stencil.count() == stencil.count()) {
                continue;
            }
            let outer = stencil.reach();
            let r2 = rc * rc;
            let mut inner = (rc / T::from_count(d).sqrt()).floor().to_usize().unwrap_or(0);
            while T::from_count(d * (inner + 1) * (inner + 1)) <= r2 {
                inner += 1;
            }
            while inner > 0 && T::from_count(d * inner * inner) > r2 {
                inner -= 1;
            }
            levels.push(Level { stencil, r2: r2.as_f64(), inner, outer });
        }
        levels
    }

    /// Per radius, the cell-count ratio of circumscribed to inscribed cube.
    /// `M_cube ≤ K·M` and `M ≤ K·M_cube` hold with `K` the largest factor.
    pub fn sandwich_factors(&self, lattice: &Lattice<T>) -> Vec<(T, f64)> {
        let d = lattice.dim() as i32;
        let levels = self.levels(lattice);
        let radii = self.effective_radii(lattice);
        radii
            .iter()
            .filter_map(|&r| {
                let count = BallStencil::for_radius(lattice, r).count();
                levels.iter().find(|l| l.stencil.count() == count).map(|l| {
                    let k = ((2 * l.outer + 1) as f64 / (2 * l.inner + 1) as f64).powi(d);
                    (r, k)
                })
            })
            .collect()
    }
}

/// `Mf` at every cell: the largest average of `|f|` over the centered balls
/// of the configured radii, radius 0 being the cell itself.
pub fn maximal_function<T: Real>(f: &GridFunction<T>, cfg: &MaximalConfig<T>) -> Result<GridFunction<T>> {
    let lattice = f.lattice();
    let levels = cfg.levels(lattice);
    let (rows, cols) = lattice.shape();
    let values: Vec<T> = match cfg.method {
        Method::Naive => {
            let radii: Vec<(f64, usize)> = levels.iter().map(|l| (l.r2, l.stencil.reach())).collect();
            (0..lattice.len())
                .into_par_iter()
                .map(|k| {
                    let (row, col) = lattice.index(k);
                    let cover = cover_sq(lattice, row, col);
                    let mut best = f.values()[k].abs();
                    for &(r2, reach) in &radii {
                        best = best.max(naive_average(f, row, col, r2, reach));
                        if r2 >= cover {
                            break;
                        }
                    }
                    best
                })
                .collect()
        }
        Method::PrefixBall => {
            let table = SummedTable::new(f, Exponent::ONE)?;
            (0..lattice.len())
                .into_par_iter()
                .map(|k| {
                    let (row, col) = lattice.index(k);
                    let cover = cover_sq(lattice, row, col);
                    let mut best = f.values()[k].abs();
                    for l in &levels {
                        let s = l.stencil.sum(&table, row as isize, col as isize).max(T::zero());
                        best = best.max(s / T::from_count(l.stencil.count()));
                        if l.r2 >= cover {
                            break;
                        }
                    }
                    best
                })
                .collect()
        }
        Method::PrefixCube => {
            let table = SummedTable::new(f, Exponent::ONE)?;
            let d = lattice.dim();
            let cube = |row: usize, col: usize, a: usize| -> T {
                let cols = (col.saturating_sub(a), col + a + 1);
                let s = if d == 1 {
                    table.row_sum_signed(0, cols.0 as isize, cols.1 as isize)
                } else {
                    table.box_sum((row.saturating_sub(a), row + a + 1), cols)
                };
                let s = s.max(T::zero());
                s / T::from_count((2 * a + 1).pow(d as u32))
            };
            // Each distinct half-width once, smallest first.
            let mut widths: Vec<usize> = levels.iter().flat_map(|l| [l.inner, l.outer]).collect();
            widths.sort_unstable();
            widths.dedup();
            let n = lattice.cells_per_axis();
            (0..lattice.len())
                .into_par_iter()
                .map(|k| {
                    let (row, col) = lattice.index(k);
                    let mut cover = col.max(n - 1 - col);
                    if d == 2 {
                        cover = cover.max(row.max(n - 1 - row));
                    }
                    let mut best = f.values()[k].abs();
                    for &a in &widths {
                        best = best.max(cube(row, col, a));
                        // Wider cubes hold the same mass over more cells.
                        if a >= cover {
                            break;
                        }
                    }
                    best
                })
                .collect()
        }
    };
    debug_assert_eq!(values.len(), rows * cols);
    GridFunction::new(lattice.clone(), values)
}

/// Squared cell distance from `(row, col)` to the farthest lattice cell.
/// A ball reaching that far holds all of the mass, so wider balls only
/// lower the average.
fn cover_sq<T: Real>(lattice: &Lattice<T>, row: usize, col: usize) -> f64 {
    let n = lattice.cells_per_axis();
    let far = |i: usize| i.max(n - 1 - i) as f64;
    let dc = far(col);
    if lattice.dim() == 1 {
        dc * dc
    } else {
        let dr = far(row);
        dr * dr + dc * dc
    }
}

fn naive_average<T: Real>(f: &GridFunction<T>, row: usize, col: usize, r2: f64, reach: usize) -> T {
    let lattice = f.lattice();
    let n = lattice.cells_per_axis() as isize;
    let d = lattice.dim();
    let reach = reach as isize;
    let row_offsets = if d == 1 { 0..=0 } else { -reach..=reach };
    let mut acc = CompensatedSum::new();
    let mut count = 0usize;
    for di in row_offsets {
        // Largest dj with di² + dj² ≤ r², found by integer search from the float guess.
        let rest = r2 - (di * di) as f64;
        if rest < 0.0 {
            continue;
        }
        let mut w = rest.sqrt().floor() as isize;
        while ((di * di + (w + 1) * (w + 1)) as f64) <= r2 {
            w += 1;
        }
        while w > 0 && ((di * di + w * w) as f64) > r2 {
            w -= 1;
        }
        count += (2 * w + 1) as usize;
        let r = row as isize + di;
        if r < 0 || (d == 2 && r >= n) {
            continue;
        }
        let (c0, c1) = ((col as isize - w).max(0), (col as isize + w + 1).min(n));
        if c0 < c1 {
            let base = r as usize * n as usize;
            for v in &f.values()[base + c0 as usize..base + c1 as usize] {
                acc.add(v.abs());
            }
        }
    }
    acc.value() / T::from_count(count)
}

/// `M χ_{B(center, r)}(x)` in one dimension, in closed form.
///
/// Inside the ball a small enough radius gives 1; outside, with `t = |x − c|`,
/// the average over `[x − s, x + s]` is `(s − t + r)/(2s)` for
/// `t − r ≤ s ≤ t + r` and `r/s` beyond, so the maximum `r/(t + r)` is
/// reached at `s = t + r`.
pub fn indicator_maximal_oracle_1d<T: Real>(center: T, r: T, x: T) -> T {
    let t = (x - center).abs();
    if t < r {
        T::one()
    } else {
        r / (t + r)
    }
}

/// Cellwise sanity checks of `M`: `Mf ≥ |f|`, `M(f + g) ≤ Mf + Mg` and
/// `M(cf) = |c| Mf`. Each row carries the worst cellwise ratio; the cap
/// allows a few ulps of rounding.
pub fn pointwise_properties_check<T: Real>(
    f: &GridFunction<T>,
    g: &GridFunction<T>,
    c: T,
    cfg: &MaximalConfig<T>,
) -> Result<CheckReport> {
    if f.lattice() != g.lattice() {
        return Err(Error::LatticeMismatch);
    }
    let mf = maximal_function(f, cfg)?;
    let mg = maximal_function(g, cfg)?;
    let mfg = maximal_function(&f.add(g)?, cfg)?;
    let mcf = maximal_function(&f.scale(c)?, cfg)?;
    // Worst cellwise ratio lhs/rhs, skipping 0/0 cells.
    let worst = |lhs: &[T], rhs: &[T]| -> (f64, f64, usize) {
        let mut best = (0.0, 1.0);
        let mut skipped = 0;
        for (a, b) in lhs.iter().zip(rhs) {
            let (a, b) = (a.as_f64(), b.as_f64());
            if a == 0.0 && b == 0.0 {
                skipped += 1;
            } else if a * best.1 > best.0 * b {
                best = (a, b);
            }
        }
        (best.0, best.1, skipped)
    };
    let sum: Vec<T> = mf.values().iter().zip(mg.values()).map(|(a, b)| *a + *b).collect();
    let scaled: Vec<T> = mf.values().iter().map(|v| c.abs() * *v).collect();
    let abs_f: Vec<T> = f.values().iter().map(|v| v.abs()).collect();
    let mut rows = Vec::new();
    let mut skipped = 0;
    for (id, lhs, rhs) in [
        ("dominates", &abs_f[..], mf.values()),
        ("subadditive", mfg.values(), &sum[..]),
        ("homogeneous-upper", mcf.values(), &scaled[..]),
        ("homogeneous-lower", &scaled[..], mcf.values()),
    ] {
        let (a, b, s) = worst(lhs, rhs);
        skipped += s;
        if s < lhs.len() {
            rows.push(CheckRow::new(id, format!("c = {c}"), None, a, b));
        }
    }
    let cap = 1.0 + 8.0 * T::epsilon().as_f64();
    Ok(CheckReport::from_rows("maximal-pointwise", Statistic::MaxRatio, cap, rows, None, 0.0, skipped))
}
