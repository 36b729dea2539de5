//! Randomized invariants of the norms and the maximal operator.

use fofana_core::lattice::BallStencil;
use fofana_core::maximal::pointwise_properties_check;
use fofana_core::norms::{self, Variant};
use fofana_core::{
    maximal_function, Exponent, ExponentPair, GridFunction, Lattice, MaximalConfig, Method, RadiusGrid, Status,
    WeightFunction,
};
use proptest::prelude::*;

const H: f64 = 0.25;
const HALF: f64 = 2.0;

fn lattice(d: usize) -> Lattice<f64> {
    Lattice::new(d, H, HALF).unwrap()
}

fn exponent() -> impl Strategy<Value = Exponent> {
    prop::sample::select(vec![1.0, 1.5, 2.0, 3.0, f64::INFINITY]).prop_map(|x| Exponent::from_f64(x).unwrap())
}

fn pair() -> impl Strategy<Value = ExponentPair> {
    (exponent(), exponent()).prop_map(|(a, b)| ExponentPair::new(a.min(b), a.max(b)).unwrap())
}

/// Values on a fresh lattice; about a third of the cells are zero.
fn values(d: usize) -> impl Strategy<Value = Vec<f64>> {
    let n = lattice(d).len();
    prop::collection::vec(prop_oneof![1 => Just(0.0), 2 => -5.0..5.0f64], n)
}

fn function(d: usize) -> impl Strategy<Value = GridFunction<f64>> {
    values(d).prop_map(move |v| GridFunction::new(lattice(d), v).unwrap())
}

fn dim_and_function() -> impl Strategy<Value = GridFunction<f64>> {
    prop_oneof![function(1), function(2)]
}

fn two_functions() -> impl Strategy<Value = (GridFunction<f64>, GridFunction<f64>)> {
    prop_oneof![(function(1), function(1)), (function(2), function(2))]
}

/// Whole number of cells.
fn radius() -> impl Strategy<Value = f64> {
    (1usize..=4).prop_map(|m| m as f64 * H)
}

fn le_rel(a: f64, b: f64, tol: f64) -> bool {
    a <= b + tol * b.abs().max(a.abs())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// The norms under test at one radius.
fn all_norms(f: &GridFunction<f64>, r: f64, qp: ExponentPair) -> Vec<(&'static str, f64)> {
    let d = f.lattice().dim();
    let grid = RadiusGrid::from_list(vec![r, 2.0 * r]).unwrap();
    let w = WeightFunction::power(Exponent::TWO, d).unwrap();
    vec![
        ("lebesgue", norms::lebesgue_norm(f, qp.q)),
        ("continuous", norms::amalgam_continuous(f, r, qp).unwrap()),
        ("discrete", norms::amalgam_discrete(f, r, qp).unwrap()),
        ("generalized", norms::generalized_fofana_norm(f, qp, &w, &grid, Variant::Continuous).unwrap().value),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norms_are_absolutely_homogeneous(f in dim_and_function(), qp in pair(), r in radius(), c in -4.0..4.0f64) {
        let scaled = f.scale(c).unwrap();
        for ((name, a), (_, b)) in all_norms(&f, r, qp).into_iter().zip(all_norms(&scaled, r, qp)) {
            prop_assert!(close(b, c.abs() * a, 1e-12), "{name}: {b} vs |{c}|·{a}");
        }
    }

    #[test]
    fn triangle_inequality((f, g) in two_functions(), qp in pair(), r in radius()) {
        let sum = f.add(&g).unwrap();
        let nf = all_norms(&f, r, qp);
        let ng = all_norms(&g, r, qp);
        for (i, (name, s)) in all_norms(&sum, r, qp).into_iter().enumerate() {
            prop_assert!(le_rel(s, nf[i].1 + ng[i].1, 1e-12), "{name}: {s} > {} + {}", nf[i].1, ng[i].1);
        }
    }

    #[test]
    fn lattice_monotone((f, extra) in two_functions(), qp in pair(), r in radius()) {
        // |g| ≥ |f| everywhere.
        let values = f.values().iter().zip(extra.values()).map(|(a, e)| a.signum() * (a.abs() + e.abs())).collect();
        let g = GridFunction::new(f.lattice().clone(), values).unwrap();
        for ((name, a), (_, b)) in all_norms(&f, r, qp).into_iter().zip(all_norms(&g, r, qp)) {
            prop_assert!(le_rel(a, b, 1e-12), "{name}: {a} > {b}");
        }
    }

    #[test]
    fn translation_invariant_inside_the_box(v in prop::collection::vec(-3.0..3.0f64, 16), d in 1usize..=2,
                                            shift in -3isize..=3, qp in pair(), r in radius()) {
        // A 4-cell block (4×4 in 2D) in the middle keeps its support inside after the shift.
        let l = lattice(d);
        let n = l.cells_per_axis();
        let mut vals = vec![0.0; l.len()];
        for (k, x) in v.iter().enumerate() {
            let (a, b) = (k / 4, k % 4);
            if d == 1 && a > 0 {
                break;
            }
            let row = if d == 1 { 0 } else { n / 2 - 2 + a };
            vals[l.flat(row, n / 2 - 2 + b)] = *x;
        }
        let f = GridFunction::new(l, vals).unwrap();
        let offset = if d == 1 { vec![shift] } else { vec![shift, -shift] };
        let g = f.shifted(&offset);
        prop_assert!(close(norms::lebesgue_norm(&g, qp.q), norms::lebesgue_norm(&f, qp.q), 1e-12));
        let (a, b) = (norms::amalgam_continuous(&f, r, qp).unwrap(), norms::amalgam_continuous(&g, r, qp).unwrap());
        prop_assert!(close(a, b, 1e-12), "continuous amalgam {a} vs {b}");
    }

    #[test]
    fn discrete_amalgam_non_increasing_in_p(f in dim_and_function(), q in exponent(), r in radius()) {
        let mut last = f64::INFINITY;
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            let p = Exponent::from_f64(p).unwrap();
            if p < q {
                continue;
            }
            let v = norms::amalgam_discrete(&f, r, ExponentPair::new(q, p).unwrap()).unwrap();
            prop_assert!(v <= last, "p = {p}: {v} > {last}");
            last = v;
        }
    }

    #[test]
    fn holder_on_balls(f in dim_and_function(), q1 in exponent(), q2 in exponent(), r in radius()) {
        let (q1, q2) = (q1.min(q2), q1.max(q2));
        let vol = BallStencil::for_radius(f.lattice(), r).count() as f64 * f.lattice().cell_volume();
        let factor = vol.powf(recip(q1) - recip(q2));
        let a = norms::local_ball_norms(&f, r, q1).unwrap();
        let b = norms::local_ball_norms(&f, r, q2).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!(le_rel(*x, factor * y, 1e-12), "{x} > {factor}·{y}");
        }
    }

    #[test]
    fn l1_amalgam_factorizes(f in dim_and_function(), r in radius()) {
        // Σ_x Σ_{y ∈ B(x)} |f(y)| = #B · Σ_y |f(y)|.
        let one = ExponentPair::new(Exponent::ONE, Exponent::ONE).unwrap();
        let l = f.lattice();
        let ball = BallStencil::for_radius(l, r).count() as f64 * l.cell_volume();
        let a = norms::amalgam_continuous(&f, r, one).unwrap();
        prop_assert!(close(a, ball * norms::lebesgue_norm(&f, Exponent::ONE), 1e-12));
    }

    #[test]
    fn maximal_pointwise_laws((f, g) in two_functions(), c in -3.0..3.0f64) {
        let cfg = MaximalConfig::all_aligned(f.lattice(), Method::PrefixBall).unwrap();
        let rep = pointwise_properties_check(&f, &g, c, &cfg).unwrap();
        prop_assert_eq!(rep.status, Status::Pass, "{:?}", rep.notes);
    }

    #[test]
    fn maximal_methods_agree(f in dim_and_function()) {
        let l = f.lattice();
        let naive = maximal_function(&f, &MaximalConfig::all_aligned(l, Method::Naive).unwrap()).unwrap();
        let prefix = maximal_function(&f, &MaximalConfig::all_aligned(l, Method::PrefixBall).unwrap()).unwrap();
        let cfg = MaximalConfig::all_aligned(l, Method::PrefixCube).unwrap();
        let cube = maximal_function(&f, &cfg).unwrap();
        let k = cfg.sandwich_factors(l).iter().map(|x| x.1).fold(1.0, f64::max);
        for ((a, b), c) in naive.values().iter().zip(prefix.values()).zip(cube.values()) {
            prop_assert!(close(*a, *b, 1e-12), "naive {a} vs prefix {b}");
            prop_assert!(le_rel(*c, k * a, 1e-12) && le_rel(*a, k * c, 1e-12), "cube {c} vs ball {a}, K = {k}");
        }
    }

    #[test]
    fn single_precision_tracks_double(v in values(1), qp in pair(), r in radius()) {
        let f64f = GridFunction::new(lattice(1), v.clone()).unwrap();
        let l32: Lattice<f32> = Lattice::new(1, H as f32, HALF as f32).unwrap();
        let f32f = GridFunction::new(l32, v.iter().map(|x| *x as f32).collect()).unwrap();
        let a = norms::amalgam_continuous(&f64f, r, qp).unwrap();
        let b = norms::amalgam_continuous(&f32f, r as f32, qp).unwrap() as f64;
        prop_assert!(close(a, b, 1e-5), "{a} vs {b}");
    }
}

fn recip(q: Exponent) -> f64 {
    if q.is_infinite() {
        0.0
    } else {
        1.0 / q.to_f64()
    }
}
