//! Lebesgue, amalgam, Fofana, generalized Fofana and generalized Morrey norms.
//!
//! The supremum over `r > 0` in the Fofana-type norms is a maximum over a
//! finite [`RadiusGrid`]; the per-radius values are kept in the trace so an
//! under-resolved grid shows up as a maximum at an endpoint.

use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::{scaled_lp, BallStencil, CubePartition, GridFunction, RowMax, SummedTable};
use crate::radius::RadiusGrid;
use crate::scalar::{pow_rational, scaled, Exponent, ExponentPair, Real};
use crate::sum::CompensatedSum;
use crate::weights::WeightFunction;
use crate::{Error, Result};

/// Ball-based (continuous) or cube-based (discrete) amalgam inside the
/// generalized Fofana norm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    Continuous,
    Discrete,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "continuous" => Ok(Variant::Continuous),
            "discrete" => Ok(Variant::Discrete),
            _ => Err(Error::Precondition(format!("unknown variant {s:?}, expected continuous or discrete"))),
        }
    }
}

/// A sup-type norm together with the per-radius values it was taken over.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormValue<T> {
    pub value: T,
    pub argmax_r: T,
    pub trace: Vec<(T, T)>,
}

impl<T: Real> NormValue<T> {
    /// Maximum of a non-empty trace; ties go to the smallest radius.
    pub fn from_trace(trace: Vec<(T, T)>) -> Self {
        let (mut argmax_r, mut value) = trace[0];
        for &(r, v) in &trace[1..] {
            if v > value {
                value = v;
                argmax_r = r;
            }
        }
        Self { value, argmax_r, trace }
    }
}

/// `(h^d Σ |f|^q)^{1/q}`, or `max |f|` for `q = ∞`.
pub fn lebesgue_norm<T: Real>(f: &GridFunction<T>, q: Exponent) -> T {
    scaled_lp(f.values(), q) * q.root(f.lattice().cell_volume())
}

fn check_radius<T: Real>(r: T) -> Result<()> {
    if r.is_finite() && r > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidRadii(format!("radius {r} must be positive")))
    }
}

/// `y ↦ ‖f χ_{B(y,r)}‖_q` at every cell center of the lattice padded far
/// enough that every ball meeting the support is included, in row-major order.
pub fn local_ball_norms<T: Real>(f: &GridFunction<T>, r: T, q: Exponent) -> Result<Vec<T>> {
    check_radius(r)?;
    let lattice = f.lattice();
    let stencil = BallStencil::for_radius(lattice, r);
    let m = (stencil.reach() + 1) as isize;
    let n = lattice.cells_per_axis() as isize;
    let d = lattice.dim();
    let side = n + 2 * m;
    let rows: isize = if d == 1 { 1 } else { side };
    let vol = lattice.cell_volume();
    let at = |k: isize| -> (isize, isize) {
        let (row, col) = (k / side, k % side - m);
        if d == 1 {
            (0, col)
        } else {
            (row - m, col)
        }
    };
    let out: Vec<T> = match q {
        Exponent::Infinite => {
            let table = RowMax::new(f);
            (0..rows * side)
                .into_par_iter()
                .map(|k| {
                    let (row, col) = at(k);
                    stencil.max(&table, row, col)
                })
                .collect()
        }
        _ => {
            let table = SummedTable::new(f, q)?;
            (0..rows * side)
                .into_par_iter()
                .map(|k| {
                    let (row, col) = at(k);
                    q.root(vol * stencil.sum(&table, row, col).max(T::zero()))
                })
                .collect()
        }
    };
    Ok(out)
}

/// Continuous amalgam norm `_r‖f‖_{q,p} = ‖ ‖f χ_{B(·,r)}‖_q ‖_p`.
pub fn amalgam_continuous<T: Real>(f: &GridFunction<T>, r: T, qp: ExponentPair) -> Result<T> {
    let g = local_ball_norms(f, r, qp.q)?;
    Ok(scaled_lp(&g, qp.p) * qp.p.root(f.lattice().cell_volume()))
}

/// `‖f χ_{Q_k^r}‖_q` for every cube meeting the lattice.
pub fn cube_norms<T: Real>(f: &GridFunction<T>, r: T, q: Exponent) -> Result<Vec<T>> {
    check_radius(r)?;
    let part = CubePartition::new(f.lattice(), r)?;
    let ids = part.cube_ids();
    let count = part.cube_count();
    let norms = match q {
        Exponent::Infinite => {
            let mut peak = vec![T::zero(); count];
            for (v, &k) in f.values().iter().zip(&ids) {
                peak[k] = peak[k].max(v.abs());
            }
            peak
        }
        _ => {
            let mut acc = vec![CompensatedSum::new(); count];
            for (v, &k) in f.values().iter().zip(&ids) {
                acc[k].add(q.pow_abs(*v));
            }
            let vol = f.lattice().cell_volume();
            acc.iter().map(|s| q.root(vol * s.value())).collect()
        }
    };
    Ok(norms)
}

/// Discrete amalgam norm `_r‖f‖~_{q,p} = ‖ (‖f χ_{Q_k^r}‖_q)_k ‖_{ℓ^p}`.
/// `r` must be a whole number of cells.
pub fn amalgam_discrete<T: Real>(f: &GridFunction<T>, r: T, qp: ExponentPair) -> Result<T> {
    Ok(scaled_lp(&cube_norms(f, r, qp.q)?, qp.p))
}

/// `‖f‖_{q,p,α} = max_r r^{d(1/α − 1/q − 1/p)} _r‖f‖_{q,p}`.
pub fn fofana_norm<T: Real>(
    f: &GridFunction<T>,
    qp: ExponentPair,
    alpha: Exponent,
    radii: &RadiusGrid<T>,
) -> Result<NormValue<T>> {
    if alpha < qp.q || alpha > qp.p {
        return Err(Error::InvalidExponent(format!("need q ≤ α ≤ p, got α = {alpha} for {qp}")));
    }
    let d = f.lattice().dim();
    let e = scaled(d, alpha.recip() - qp.q.recip() - qp.p.recip());
    let trace = radii
        .radii()
        .iter()
        .map(|&r| Ok((r, pow_rational(r, e) * amalgam_continuous(f, r, qp)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(NormValue::from_trace(trace))
}

/// `‖f‖_{(L^q,L^p)^φ}`: the maximum over the grid of
/// `φ(r)^{−1} r^{−d/q−d/p} _r‖f‖_{q,p}` (continuous) or
/// `φ(r)^{−1} r^{−d/q} _r‖f‖~_{q,p}` (discrete, aligned radii only).
pub fn generalized_fofana_norm<T: Real>(
    f: &GridFunction<T>,
    qp: ExponentPair,
    w: &WeightFunction,
    radii: &RadiusGrid<T>,
    variant: Variant,
) -> Result<NormValue<T>> {
    let d = f.lattice().dim();
    if w.dim() != d {
        return Err(Error::InvalidWeight(format!("weight built for d = {}, function has d = {d}", w.dim())));
    }
    if qp.q > qp.p {
        return Err(Error::InvalidExponent(format!("need q ≤ p, got {qp}")));
    }
    let inner: Rational64 = -scaled(d, qp.q.recip());
    let trace = radii
        .radii()
        .iter()
        .map(|&r| {
            let v = match variant {
                Variant::Continuous => {
                    w.normalizer(r, inner - scaled(d, qp.p.recip()))? * amalgam_continuous(f, r, qp)?
                }
                Variant::Discrete => w.normalizer(r, inner)? * amalgam_discrete(f, r, qp)?,
            };
            Ok((r, v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NormValue::from_trace(trace))
}

/// Generalized Morrey norm: the `p = ∞` case of the continuous generalized
/// Fofana norm.
pub fn morrey_norm<T: Real>(
    f: &GridFunction<T>,
    q: Exponent,
    w: &WeightFunction,
    radii: &RadiusGrid<T>,
) -> Result<NormValue<T>> {
    if q.is_infinite() {
        return Err(Error::InvalidExponent("the Morrey norm needs a finite q".into()));
    }
    generalized_fofana_norm(f, ExponentPair::new(q, Exponent::INFINITY)?, w, radii, Variant::Continuous)
}
