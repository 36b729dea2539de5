//! Composite Simpson quadrature in the logarithmic variable.
//!
//! `∫_a^b f(t) dt = ∫_{ln a}^{ln b} f(e^u) e^u du`; panels are uniform in `u`,
//! so a fixed number of nodes per decade resolves power-like integrands
//! uniformly across scales.

use crate::scalar::Real;
use crate::sum::CompensatedSum;

/// Default quadrature density.
pub const NODES_PER_DECADE: usize = 64;

/// Number of (even) Simpson panels used for `[a, b]`.
pub fn panel_count<T: Real>(a: T, b: T, nodes_per_decade: usize) -> usize {
    let decades = (b / a).log10().as_f64();
    let n = (decades * nodes_per_decade as f64).ceil().max(2.0) as usize;
    n + n % 2
}

/// `∫_a^b f(t) dt` for `0 < a ≤ b`.
pub fn log_simpson<T: Real>(f: impl Fn(T) -> T, a: T, b: T, nodes_per_decade: usize) -> T {
    if b <= a {
        return T::zero();
    }
    let n = panel_count(a, b, nodes_per_decade);
    let (ua, ub) = (a.ln(), b.ln());
    let step = (ub - ua) / T::from_count(n);
    let g = |i: usize| -> T {
        let t = if i == 0 {
            a
        } else if i == n {
            b
        } else {
            (ua + step * T::from_count(i)).exp()
        };
        f(t) * t
    };
    let mut acc = CompensatedSum::new();
    acc.add(g(0));
    acc.add(g(n));
    for i in 1..n {
        let w = if i % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
        acc.add(w * g(i));
    }
    acc.value() * step / T::lit(3.0)
}

/// `∫_a^b f` together with the share contributed by the last decade `[b/10, b]`.
pub fn log_simpson_with_tail_share<T: Real>(f: impl Fn(T) -> T, a: T, b: T, nodes_per_decade: usize) -> (T, T) {
    let split = b / T::lit(10.0);
    if split <= a {
        let total = log_simpson(&f, a, b, nodes_per_decade);
        return (total, T::one());
    }
    let head = log_simpson(&f, a, split, nodes_per_decade);
    let tail = log_simpson(&f, split, b, nodes_per_decade);
    let total = head + tail;
    let share = if total > T::zero() { tail / total } else { T::zero() };
    (total, share)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_monomials() {
        // ∫_1^100 t^{-2} dt = 0.99
        let v = log_simpson(|t: f64| t.powi(-2), 1.0, 100.0, NODES_PER_DECADE);
        assert!((v - 0.99).abs() < 1e-7);
        // ∫_r^{2r} dt/t = ln 2, independent of r
        for r in [1e-3, 1.0, 1e5] {
            let v = log_simpson(|t: f64| 1.0 / t, r, 2.0 * r, NODES_PER_DECADE);
            assert!((v - 2f64.ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn tail_share_detects_log_divergence() {
        let (_, share) = log_simpson_with_tail_share(|t: f64| 1.0 / t, 1.0, 1e4, NODES_PER_DECADE);
        assert!((share - 0.25).abs() < 1e-12);
        let (_, share) = log_simpson_with_tail_share(|t: f64| t.powi(-3), 1.0, 1e4, NODES_PER_DECADE);
        assert!(share < 1e-5);
    }
}
