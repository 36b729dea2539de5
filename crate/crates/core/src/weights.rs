//! Weight functions `φ : (0,∞) → (0,∞)` and the structural conditions the
//! norm inequalities need: membership in `G_{q,p}`, the doubling condition,
//! the integral (Nakai) condition and the dyadic lower bound.
//!
//! All suprema over pairs of radii are taken over finite log grids, so every
//! constant reported here is a lower estimate of the true constant.

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::quad::{log_simpson, log_simpson_with_tail_share, NODES_PER_DECADE};
use crate::radius::RadiusGrid;
use crate::report::{CheckReport, CheckRow, Statistic};
use crate::scalar::{pow_rational, scaled, Exponent, Real};
use crate::{Error, Result};

/// Parametric or tabulated weight, as read from JSON:
/// `{"kind":"power","alpha":2}`, `{"kind":"power-log","alpha":2,"beta":-1}`,
/// `{"kind":"tabulated","knots":[…],"values":[…]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightKind {
    /// `t^{−d/α}`.
    Power { alpha: Exponent },
    /// `t^{−d/α} (1 + |ln t|)^β`.
    PowerLog { alpha: Exponent, beta: f64 },
    /// Log-linear interpolation through `(knots, values)`, extrapolated one
    /// octave past either end.
    Tabulated { knots: Vec<f64>, values: Vec<f64> },
}

impl WeightKind {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidWeight(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightFunction {
    #[serde(flatten)]
    kind: WeightKind,
    dim: usize,
}

impl WeightFunction {
    pub fn new(kind: WeightKind, dim: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidWeight(format!("dimension {dim} must be 1 or 2")));
        }
        match &kind {
            WeightKind::Power { .. } => {}
            WeightKind::PowerLog { beta, .. } => {
                if !beta.is_finite() {
                    return Err(Error::InvalidWeight("beta must be finite".into()));
                }
            }
            WeightKind::Tabulated { knots, values } => {
                if knots.len() < 4 || knots.len() != values.len() {
                    return Err(Error::InvalidWeight(
                        "tabulated weights need at least 4 knots and one value per knot".into(),
                    ));
                }
                if knots.iter().any(|t| !(t.is_finite() && *t > 0.0)) || knots.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidWeight("knots must be positive and strictly increasing".into()));
                }
                if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                    return Err(Error::InvalidWeight("tabulated values must be positive".into()));
                }
            }
        }
        Ok(Self { kind, dim })
    }

    pub fn power(alpha: Exponent, dim: usize) -> Result<Self> {
        Self::new(WeightKind::Power { alpha }, dim)
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `−d/α` when `φ` is a pure power.
    pub fn power_exponent(&self) -> Option<Rational64> {
        match &self.kind {
            WeightKind::Power { alpha } => Some(-scaled(self.dim, alpha.recip())),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            WeightKind::Power { alpha } => format!("power({alpha})"),
            WeightKind::PowerLog { alpha, beta } => format!("power-log({alpha}, {beta})"),
            WeightKind::Tabulated { knots, .. } => format!("tabulated({} knots)", knots.len()),
        }
    }

    /// Interval of `t` on which the weight can be evaluated.
    pub fn domain(&self) -> (f64, f64) {
        match &self.kind {
            WeightKind::Tabulated { knots, .. } => (knots[0] / 2.0, knots[knots.len() - 1] * 2.0),
            _ => (0.0, f64::INFINITY),
        }
    }

    fn check_arg<T: Real>(&self, t: T) -> Result<()> {
        if !(t.is_finite() && t > T::zero()) {
            return Err(Error::OutOfDomain(format!("φ needs t > 0, got {t}")));
        }
        let (lo, hi) = self.domain();
        let x = t.as_f64();
        if x < lo * (1.0 - 1e-12) || x > hi * (1.0 + 1e-12) {
            return Err(Error::OutOfDomain(format!("t = {t} outside the tabulated window [{lo}, {hi}]")));
        }
        Ok(())
    }

    /// `φ(t)`.
    pub fn eval<T: Real>(&self, t: T) -> Result<T> {
        self.check_arg(t)?;
        Ok(match &self.kind {
            WeightKind::Power { .. } => pow_rational(t, self.power_exponent().unwrap()),
            WeightKind::PowerLog { alpha, beta } => {
                let e = -scaled(self.dim, alpha.recip());
                pow_rational(t, e) * (T::one() + t.ln().abs()).powf(T::lit(*beta))
            }
            WeightKind::Tabulated { knots, values } => T::lit(log_linear(knots, values, t.as_f64())),
        })
    }

    /// `t^e φ(t)^m`. For power weights the exponents are merged exactly
    /// before a single power is taken.
    pub fn scaled_power<T: Real>(&self, t: T, m: Rational64, e: Rational64) -> Result<T> {
        match self.power_exponent() {
            Some(pe) => {
                self.check_arg(t)?;
                Ok(pow_rational(t, pe * m + e))
            }
            None => Ok(pow_rational(t, e) * pow_rational(self.eval(t)?, m)),
        }
    }

    /// `t^e / φ(t)`, the radius factor of the generalized Fofana norm.
    pub fn normalizer<T: Real>(&self, t: T, e: Rational64) -> Result<T> {
        match self.power_exponent() {
            Some(pe) => {
                self.check_arg(t)?;
                Ok(pow_rational(t, e - pe))
            }
            None => Ok(pow_rational(t, e) / self.eval(t)?),
        }
    }
}

fn log_linear(knots: &[f64], values: &[f64], t: f64) -> f64 {
    let n = knots.len();
    let seg = match knots.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
        Ok(i) => return values[i],
        Err(0) => 0,
        Err(i) if i >= n => n - 2,
        Err(i) => i - 1,
    };
    let (t0, t1) = (knots[seg].ln(), knots[seg + 1].ln());
    let (v0, v1) = (values[seg].ln(), values[seg + 1].ln());
    let s = (t.ln() - t0) / (t1 - t0);
    (v0 + s * (v1 - v0)).exp()
}

/// `φ(t)`; see [`WeightFunction::eval`].
pub fn phi_eval<T: Real>(w: &WeightFunction, t: T) -> Result<T> {
    w.eval(t)
}

/// Estimated almost-monotonicity constants of `t^{d/p} φ` and `t^{d/q} φ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassCheckResult {
    /// `max_{r ≤ s} s^{d/p}φ(s) / (r^{d/p}φ(r))`.
    pub c_dec: f64,
    /// `max_{r ≤ s} r^{d/q}φ(r) / (s^{d/q}φ(s))`.
    pub c_inc: f64,
    pub dec_witness: (f64, f64),
    pub inc_witness: (f64, f64),
    /// The constant kept growing when the grid span doubled (in log scale).
    pub dec_unbounded: bool,
    pub inc_unbounded: bool,
    pub cap: f64,
    pub pass: bool,
}

/// Default cap on the almost-monotonicity constants.
pub const CLASS_CAP: f64 = 1e6;

const MIN_GRID: usize = 16;

/// Largest ratio `g(s)/g(r)` over grid pairs `r ≤ s`, with its witness.
fn max_forward_ratio(g: &[f64], grid: &[f64]) -> (f64, (f64, f64)) {
    let mut best = 1.0;
    let mut witness = (grid[0], grid[0]);
    let mut low = 0;
    for j in 0..g.len() {
        if g[j] < g[low] {
            low = j;
        }
        let ratio = g[j] / g[low];
        if ratio > best {
            best = ratio;
            witness = (grid[low], grid[j]);
        }
    }
    (best, witness)
}

/// Checks membership of `w` in `G_{q,p}` on a finite log grid.
///
/// A constant passes when it stays below `cap` and does not grow between the
/// central half of the grid (in log scale) and the full grid; a constant that
/// keeps growing with the span signals a genuinely monotone-in-the-wrong-
/// direction weight.
pub fn check_class<T: Real>(
    w: &WeightFunction,
    q: Exponent,
    p: Exponent,
    t_grid: &RadiusGrid<T>,
    cap: f64,
) -> Result<ClassCheckResult> {
    if t_grid.len() < MIN_GRID {
        return Err(Error::InvalidRadii(format!("class check needs at least {MIN_GRID} radii")));
    }
    let d = w.dim();
    let grid: Vec<T> = t_grid.radii().to_vec();
    let dec_e = scaled(d, p.recip());
    let inc_e = scaled(d, q.recip());
    let g: Vec<f64> = grid.iter().map(|t| w.scaled_power(*t, Rational64::from(1), dec_e).map(|v| v.as_f64())).collect::<Result<_>>()?;
    // Almost increasing: reverse roles so the same forward scan applies.
    let h: Vec<f64> = grid.iter().map(|t| w.scaled_power(*t, Rational64::from(1), inc_e).map(|v| 1.0 / v.as_f64())).collect::<Result<_>>()?;
    let gf: Vec<f64> = grid.iter().map(|t| t.as_f64()).collect();

    let (c_dec, dec_witness) = max_forward_ratio(&g, &gf);
    let (c_inc, inc_witness) = max_forward_ratio(&h, &gf);

    let m = grid.len();
    let (a, b) = (m / 4, m - m / 4);
    let (c_dec_half, _) = max_forward_ratio(&g[a..b], &gf[a..b]);
    let (c_inc_half, _) = max_forward_ratio(&h[a..b], &gf[a..b]);
    let grows = |full: f64, half: f64| full > 1.0 + 1e-9 && full > half * (1.0 + 1e-9);
    let dec_unbounded = grows(c_dec, c_dec_half);
    let inc_unbounded = grows(c_inc, c_inc_half);

    let pass = c_dec <= cap && c_inc <= cap && !dec_unbounded && !inc_unbounded;
    Ok(ClassCheckResult { c_dec, c_inc, dec_witness, inc_witness, dec_unbounded, inc_unbounded, cap, pass })
}

/// Estimated doubling constant `max φ(r)/φ(s)` over `1/2 ≤ r/s ≤ 2`.
///
/// Besides grid pairs in that range, every grid point is paired with its
/// exact double and half, so the extremal ratio `r/s = 2` is always probed.
pub fn check_doubling<T: Real>(w: &WeightFunction, t_grid: &RadiusGrid<T>) -> Result<f64> {
    if t_grid.len() < MIN_GRID {
        return Err(Error::InvalidRadii(format!("doubling check needs at least {MIN_GRID} radii")));
    }
    let (lo, hi) = w.domain();
    let two = T::lit(2.0);
    let radii = t_grid.radii();
    let mut best = 1.0f64;
    for (i, &r) in radii.iter().enumerate() {
        let fr = w.eval(r)?;
        let mut partners: Vec<T> = radii[i + 1..].iter().copied().take_while(|s| *s <= r * two).collect();
        for s in [r * two, r / two] {
            let x = s.as_f64();
            if x >= lo && x <= hi {
                partners.push(s);
            }
        }
        for s in partners {
            let fs = w.eval(s)?;
            let ratio = (fr / fs).max(fs / fr).as_f64();
            best = best.max(ratio);
        }
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NakaiOptions {
    pub nodes_per_decade: usize,
    /// Share of the total carried by the last decade above which a
    /// non-power integral is declared divergent.
    pub divergence_share: f64,
    /// Evaluate the condition at `q = 1` (the maximal bound is only known for `q > 1`).
    pub allow_q_one: bool,
}

impl Default for NakaiOptions {
    fn default() -> Self {
        Self { nodes_per_decade: NODES_PER_DECADE, divergence_share: 0.1, allow_q_one: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NakaiRow {
    pub r: f64,
    pub integral: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NakaiResult {
    pub c_hat: Option<f64>,
    pub divergent: bool,
    pub rows: Vec<NakaiRow>,
}

/// Smallest `C` with `∫_r^∞ φ^q(t) t^{dq/p−1} dt ≤ C φ^q(r) r^{dq/p}` over the
/// probe radii.
///
/// Power weights get a closed-form tail beyond `t_max` (and are divergent
/// exactly when `α ≥ p`); other weights are integrated to `t_max` and flagged
/// divergent when the last decade carries too much of the total.
pub fn nakai_constant<T: Real>(
    w: &WeightFunction,
    q: Exponent,
    p: Exponent,
    r_probes: &RadiusGrid<T>,
    t_max: T,
    opts: NakaiOptions,
) -> Result<NakaiResult> {
    let qr = q
        .finite()
        .ok_or_else(|| Error::Precondition("the integral condition needs a finite q".into()))?;
    if q == Exponent::ONE && !opts.allow_q_one {
        return Err(Error::Precondition("q = 1 is outside the range q > 1; set allow_q_one to evaluate".into()));
    }
    if q > p {
        return Err(Error::Precondition(format!("need q ≤ p, got q = {q}, p = {p}")));
    }
    if t_max < T::lit(100.0) * r_probes.max() {
        return Err(Error::Precondition("t_max must be at least 100 times the largest probe".into()));
    }
    let d = w.dim();
    // dq/p and the integrand's power of t.
    let dq_p = scaled(d, qr * p.recip());
    let t_exp = dq_p - Rational64::from(1);
    let integrand = |t: T| w.scaled_power(t, qr, t_exp).unwrap_or(T::nan());

    let mut rows = Vec::with_capacity(r_probes.len());
    let mut divergent = false;
    match w.power_exponent() {
        Some(pe) => {
            // ∫ t^a with a = q·(−d/α) + dq/p − 1.
            let a = pe * qr + t_exp;
            if a >= Rational64::from(-1) {
                return Ok(NakaiResult { c_hat: None, divergent: true, rows });
            }
            let a1 = a + Rational64::from(1);
            let tail = pow_rational(t_max, a1) / (-T::from_ratio(a1));
            for &r in r_probes.radii() {
                let integral = log_simpson(integrand, r, t_max, opts.nodes_per_decade) + tail;
                let bound = w.scaled_power(r, qr, dq_p)?;
                rows.push(row(r, integral, bound));
            }
        }
        None => {
            let (_, hi) = w.domain();
            if t_max.as_f64() > hi {
                return Err(Error::OutOfDomain(format!("t_max exceeds the weight's domain (max {hi})")));
            }
            for &r in r_probes.radii() {
                let (integral, share) = log_simpson_with_tail_share(integrand, r, t_max, opts.nodes_per_decade);
                if !integral.is_finite() {
                    return Err(Error::OutOfDomain("integrand not finite on [r, t_max]".into()));
                }
                if share.as_f64() > opts.divergence_share {
                    divergent = true;
                }
                let bound = w.scaled_power(r, qr, dq_p)?;
                rows.push(row(r, integral, bound));
            }
        }
    }
    let c_hat = if divergent { None } else { rows.iter().map(|r| r.ratio).reduce(f64::max) };
    Ok(NakaiResult { c_hat, divergent, rows })
}

fn row<T: Real>(r: T, integral: T, bound: T) -> NakaiRow {
    NakaiRow { r: r.as_f64(), integral: integral.as_f64(), bound: bound.as_f64(), ratio: (integral / bound).as_f64() }
}

/// Ratio of `(2^i r)^{dq/p} φ^q(2^{i+1} r)` to `∫_{2^i r}^{2^{i+1} r} φ^q(t) t^{dq/p−1} dt`
/// for `i = 1..=i_max`; the estimated constant is the largest ratio.
pub fn lemma_dyadic_lower_bound<T: Real>(
    w: &WeightFunction,
    q: Exponent,
    p: Exponent,
    r: T,
    i_max: usize,
) -> Result<CheckReport> {
    let qr = q.finite().ok_or_else(|| Error::Precondition("the dyadic bound needs a finite q".into()))?;
    if qr <= Rational64::from(1) {
        return Err(Error::Precondition("the dyadic bound needs q > 1".into()));
    }
    if i_max < 1 {
        return Err(Error::Precondition("i_max must be at least 1".into()));
    }
    if !(r > T::zero()) {
        return Err(Error::OutOfDomain(format!("r = {r} must be positive")));
    }
    let d = w.dim();
    let dq_p = scaled(d, qr * p.recip());
    let t_exp = dq_p - Rational64::from(1);
    let mut rows = Vec::with_capacity(i_max);
    let mut lo = r;
    for i in 1..=i_max {
        lo *= T::lit(2.0);
        let hi = lo * T::lit(2.0);
        let lhs = pow_rational(lo, dq_p) * w.scaled_power(hi, qr, Rational64::zero())?;
        let rhs = log_simpson(|t| w.scaled_power(t, qr, t_exp).unwrap_or(T::nan()), lo, hi, NODES_PER_DECADE);
        rows.push(CheckRow::new(format!("i={i}"), w.label(), Some(r.as_f64()), lhs.as_f64(), rhs.as_f64()));
    }
    Ok(CheckReport::from_rows("lemma-dyadic", Statistic::MaxRatio, f64::INFINITY, rows, None, 0.0, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(alpha: f64, d: usize) -> WeightFunction {
        WeightFunction::power(Exponent::from_f64(alpha).unwrap(), d).unwrap()
    }

    fn e(x: f64) -> Exponent {
        Exponent::from_f64(x).unwrap()
    }

    fn grid() -> RadiusGrid<f64> {
        RadiusGrid::geometric(1e-3, 1e3, 31).unwrap()
    }

    #[test]
    fn phi_examples() {
        assert_eq!(power(2.0, 1).eval(4.0f64).unwrap(), 0.5);
        let pl = WeightFunction::new(WeightKind::PowerLog { alpha: e(1.0), beta: 0.0 }, 1).unwrap();
        assert!((pl.eval(3.0f64).unwrap() - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(power(1.0, 2).eval(2.0f64).unwrap(), 0.25);
        assert!(power(1.0, 1).eval(0.0f64).is_err());
    }

    #[test]
    fn doubling_ratio_of_powers() {
        let w = power(3.0, 1);
        for t in grid().radii() {
            let ratio = w.eval(2.0 * t).unwrap() / w.eval(*t).unwrap();
            assert!((ratio - 2f64.powf(-1.0 / 3.0)).abs() <= 4.0 * f64::EPSILON);
        }
    }

    #[test]
    fn tabulated_interpolates_log_linearly() {
        let w = WeightFunction::new(
            WeightKind::Tabulated { knots: vec![1.0, 2.0, 4.0, 8.0], values: vec![1.0, 0.5, 0.25, 0.125] },
            1,
        )
        .unwrap();
        // Exactly t^{-1} in log-log coordinates.
        for t in [0.5f64, 1.5, 3.0, 16.0] {
            assert!((w.eval(t).unwrap() - 1.0 / t).abs() < 1e-14);
        }
        assert!(w.eval(0.4).is_err());
        assert!(w.eval(17.0).is_err());
        assert!(WeightFunction::new(WeightKind::Tabulated { knots: vec![1.0, 2.0], values: vec![1.0, 1.0] }, 1).is_err());
        assert!(WeightFunction::new(
            WeightKind::Tabulated { knots: vec![1.0, 3.0, 2.0, 4.0], values: vec![1.0; 4] },
            1
        )
        .is_err());
    }

    #[test]
    fn class_members_have_unit_constants() {
        for (q, a, p) in [(1.0, 2.0, 4.0), (2.0, 2.0, 2.0), (1.0, 1.5, f64::INFINITY), (2.0, 4.0, 4.0)] {
            let res = check_class(&power(a, 1), e(q), e(p), &grid(), CLASS_CAP).unwrap();
            assert!((res.c_dec - 1.0).abs() <= 1e-12 && (res.c_inc - 1.0).abs() <= 1e-12, "{res:?}");
            assert!(res.pass);
        }
    }

    #[test]
    fn power_above_p_fails_with_witness() {
        let res = check_class(&power(8.0, 1), e(2.0), e(4.0), &grid(), CLASS_CAP).unwrap();
        assert!(!res.pass);
        assert!(res.dec_unbounded);
        let (r, s) = res.dec_witness;
        assert!(r < s);
        assert!((res.c_dec - (s / r).powf(0.25 - 0.125)).abs() < 1e-9 * res.c_dec);
    }

    #[test]
    fn power_below_q_fails_increasing_side() {
        let res = check_class(&power(1.0, 1), e(2.0), e(4.0), &grid(), CLASS_CAP).unwrap();
        assert!(!res.pass && res.inc_unbounded);
        assert!(res.inc_witness.0 < res.inc_witness.1);
    }

    #[test]
    fn doubling_constants() {
        let g = RadiusGrid::geometric(0.01f64, 100.0, 16).unwrap();
        for a in [1.0, 2.0, 3.0] {
            let c = check_doubling(&power(a, 1), &g).unwrap();
            assert!((c - 2f64.powf(1.0 / a)).abs() <= 1e-12);
        }
        assert!((check_doubling(&power(1.0, 2), &g).unwrap() - 4.0).abs() <= 1e-12);
        let flat = WeightFunction::new(
            WeightKind::Tabulated { knots: vec![0.001, 0.1, 10.0, 1000.0], values: vec![1.0; 4] },
            1,
        )
        .unwrap();
        assert_eq!(check_doubling(&flat, &g).unwrap(), 1.0);
    }

    #[test]
    fn nakai_closed_forms() {
        let probes = RadiusGrid::geometric(0.01f64, 10.0, 16).unwrap();
        let t_max = 1e5;
        let res = nakai_constant(&power(2.0, 1), e(2.0), e(4.0), &probes, t_max, NakaiOptions::default()).unwrap();
        assert!(!res.divergent);
        assert!((res.c_hat.unwrap() - 2.0).abs() < 1e-6);
        let res = nakai_constant(&power(2.0, 1), e(2.0), Exponent::INFINITY, &probes, t_max, NakaiOptions::default()).unwrap();
        assert!((res.c_hat.unwrap() - 1.0).abs() < 1e-6);
        let res = nakai_constant(&power(4.0, 1), e(2.0), e(4.0), &probes, t_max, NakaiOptions::default()).unwrap();
        assert!(res.divergent && res.c_hat.is_none());
    }

    #[test]
    fn nakai_general_formula_for_powers() {
        // C = 1/(dq(1/α − 1/p)) across a spread of parameters, d = 2 included.
        let probes = RadiusGrid::geometric(0.1f64, 1.0, 16).unwrap();
        for (d, q, a, p) in [(1, 1.5, 2.0, 3.0), (2, 2.0, 3.0, 6.0), (2, 3.0, 3.0, f64::INFINITY)] {
            let res = nakai_constant(&power(a, d), e(q), e(p), &probes, 1e4, NakaiOptions::default()).unwrap();
            let want = 1.0 / (d as f64 * q * (1.0 / a - 1.0 / p));
            assert!((res.c_hat.unwrap() / want - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn nakai_preconditions() {
        let probes = RadiusGrid::geometric(0.1f64, 1.0, 16).unwrap();
        let w = power(2.0, 1);
        assert!(nakai_constant(&w, e(1.0), e(4.0), &probes, 1e4, NakaiOptions::default()).is_err());
        let loose = NakaiOptions { allow_q_one: true, ..NakaiOptions::default() };
        assert!(nakai_constant(&w, e(1.0), e(4.0), &probes, 1e4, loose).is_ok());
        assert!(nakai_constant(&w, e(2.0), e(4.0), &probes, 10.0, NakaiOptions::default()).is_err());
    }

    #[test]
    fn nakai_detects_log_divergence_of_tabulated_weight() {
        // φ(t) = t^{-1/2} tabulated, q = 2, p = 2 ⇒ integrand t^{-1}: divergent.
        let knots: Vec<f64> = (0..12).map(|i| 10f64.powi(i - 3)).collect();
        let values: Vec<f64> = knots.iter().map(|t| t.powf(-0.5)).collect();
        let w = WeightFunction::new(WeightKind::Tabulated { knots, values }, 1).unwrap();
        let probes = RadiusGrid::geometric(0.01f64, 1.0, 16).unwrap();
        let res = nakai_constant(&w, e(2.0), e(2.0), &probes, 1e5, NakaiOptions::default()).unwrap();
        assert!(res.divergent);
        // The same weight with p = ∞ converges, C = α/(dq) = 1.
        let res = nakai_constant(&w, e(2.0), Exponent::INFINITY, &probes, 1e5, NakaiOptions::default()).unwrap();
        assert!(!res.divergent);
        assert!((res.c_hat.unwrap() - 1.0).abs() < 0.05);
    }

    #[test]
    fn dyadic_bound_is_scale_invariant_for_powers() {
        let w = power(2.0, 1);
        let one = lemma_dyadic_lower_bound(&w, e(2.0), e(4.0), 0.3f64, 1).unwrap();
        let many = lemma_dyadic_lower_bound(&w, e(2.0), e(4.0), 0.3f64, 8).unwrap();
        let doubled = lemma_dyadic_lower_bound(&w, e(2.0), e(4.0), 0.6f64, 8).unwrap();
        let c1 = one.c_emp.unwrap();
        assert!((many.c_emp.unwrap() / c1 - 1.0).abs() < 1e-10);
        assert!((doubled.c_emp.unwrap() / c1 - 1.0).abs() < 1e-10);
        assert!(one.passed());
    }

    #[test]
    fn dyadic_bound_for_flat_weight() {
        // φ ≡ 1, p = q, d = 1: lhs = 2^i r, rhs = ∫_{2^i r}^{2^{i+1} r} dt = 2^i r, ratio 1.
        let w = WeightFunction::new(
            WeightKind::Tabulated { knots: vec![0.01, 1.0, 100.0, 1e4], values: vec![1.0; 4] },
            1,
        )
        .unwrap();
        let rep = lemma_dyadic_lower_bound(&w, e(2.0), e(2.0), 0.5f64, 6).unwrap();
        assert!(rep.passed());
        assert!((rep.c_emp.unwrap() - 1.0).abs() < 1e-7);
    }
}
