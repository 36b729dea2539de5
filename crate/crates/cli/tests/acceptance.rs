//! Acceptance gate: every criterion prints one PASS/FAIL line; the process
//! exits non-zero if any fails. Reference values come from closed forms
//! evaluated here, not from the library.

// Negated comparisons make NaN fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fofana_core::lattice::GridFunction;
use fofana_core::maximal::Method;
use fofana_core::norms::{self, Variant};
use fofana_core::verify::{self, indicator_radii, run_suites, Profile, Suite, VerifyParams};
use fofana_core::weights::{self, NakaiOptions, WeightKind, CLASS_CAP};
use fofana_core::{
    indicator_maximal_oracle_1d, maximal_function, Exponent, ExponentPair, FunctionSpec, Lattice, MaximalConfig,
    RadiusGrid, RadiusSpec, Status, WeightFunction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn e(x: f64) -> Exponent {
    Exponent::from_f64(x).unwrap()
}

fn power(alpha: f64, d: usize) -> WeightFunction {
    WeightFunction::power(e(alpha), d).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

fn c01_constants() -> Outcome {
    let lattice = Lattice::new(1, 1.0 / 256.0, 8.0).unwrap();
    ensure!(lattice.len() == 4096, "expected n = 4096, got {}", lattice.len());
    let c = 0.7;
    let f = FunctionSpec::Constant { value: c }.sample::<f64>(&lattice).unwrap();
    let geometric = RadiusGrid::geometric(lattice.spacing(), lattice.diameter(), 32).unwrap();
    let mut times = Vec::new();
    for (method, radii) in [
        (Method::Naive, geometric.clone()),
        (Method::PrefixBall, RadiusGrid::all_aligned(&lattice).unwrap()),
        (Method::PrefixCube, RadiusGrid::all_aligned(&lattice).unwrap()),
    ] {
        let cfg = MaximalConfig::new(radii, method);
        let (mf, dt) = timed(|| maximal_function(&f, &cfg).unwrap());
        times.push(format!("{method} {dt:.2?}"));
        for (i, v) in mf.values().iter().enumerate() {
            ensure!(rel(*v, c) <= 1e-15, "{method}: cell {i} gives {v}, expected {c}");
        }
        ensure!(dt < Duration::from_secs(1), "{method} took {dt:?}");
    }
    Ok(format!("n = 4096, {}", times.join(", ")))
}

fn c02_indicator_oracle() -> Outcome {
    let h = 0.01;
    let lattice = Lattice::new(1, h, 4.0).unwrap();
    let chi = FunctionSpec::IndicatorBall { center: vec![], radius: 1.0 }.sample::<f64>(&lattice).unwrap();
    let cfg = MaximalConfig::all_aligned(&lattice, Method::Naive).unwrap();
    let (mf, dt) = timed(|| maximal_function(&chi, &cfg).unwrap());
    let mut worst = 0.0f64;
    for i in 0..lattice.len() {
        let x = lattice.center(i);
        if x.abs() > lattice.half_width() - 5.0 * h {
            continue;
        }
        let oracle = indicator_maximal_oracle_1d(0.0, 1.0, x);
        // Best window: the ball itself inside, the window reaching the far edge outside.
        let closed = if x.abs() <= 1.0 { 1.0 } else { 2.0 / (2.0 * (x.abs() + 1.0)) };
        ensure!((oracle - closed).abs() < 1e-12, "oracle at {x} is {oracle}, closed form {closed}");
        worst = worst.max((mf.values()[i] - oracle).abs());
    }
    ensure!(worst <= 0.05, "max abs error {worst:.4}");
    ensure!(dt < Duration::from_secs(10), "naive took {dt:?}");
    Ok(format!("max abs error {worst:.2e}, naive {dt:.2?}"))
}

fn c03_spike() -> Outcome {
    let lattice = Lattice::new(1, 1.0, 8.0).unwrap();
    let n = lattice.len();
    let at = n / 2;
    let mut values = vec![0.0; n];
    values[at] = 1.0;
    let f = GridFunction::new(lattice.clone(), values).unwrap();
    let (res, dt) = timed(|| {
        for method in [Method::Naive, Method::PrefixBall, Method::PrefixCube] {
            let mf = maximal_function(&f, &MaximalConfig::all_aligned(&lattice, method).unwrap()).unwrap();
            for (i, v) in mf.values().iter().enumerate() {
                let k = i.abs_diff(at) as f64;
                let expect = 1.0 / (2.0 * k + 1.0);
                ensure!(*v == expect, "{method}: cell {i} gives {v}, expected {expect}");
            }
        }
        Ok(())
    });
    res?;
    ensure!(dt < Duration::from_secs(1), "took {dt:?}");
    Ok(format!("exact 1/(2k+1) profile for all methods, {dt:.2?}"))
}

fn c04_amalgam_closed_form() -> Outcome {
    // g(x) = |B(0,1) ∩ B(x,1)| = (2 − |x|)_+, ∫ g² = 2 ∫_0^2 (2 − x)² dx = 16/3.
    let exact = (16.0f64 / 3.0).sqrt();
    let qp = ExponentPair::new(Exponent::ONE, Exponent::TWO).unwrap();
    let err = |h: f64| {
        let lattice = Lattice::new(1, h, 4.0).unwrap();
        let chi = FunctionSpec::IndicatorBall { center: vec![], radius: 1.0 }.sample::<f64>(&lattice).unwrap();
        rel(norms::amalgam_continuous(&chi, 1.0, qp).unwrap(), exact)
    };
    let coarse = err(0.01);
    let fine = err(0.0025);
    ensure!(coarse <= 0.02, "h = 0.01: relative error {coarse:.3e}");
    ensure!(fine <= 0.005, "h = 0.0025: relative error {fine:.3e}");
    ensure!(fine < coarse, "no convergence: {coarse:.3e} then {fine:.3e}");
    let order = (coarse / fine).log(4.0);
    Ok(format!("errors {coarse:.2e} / {fine:.2e}, observed order {order:.2}"))
}

/// Random member: lattice, function, aligned radius.
fn random_member(rng: &mut ChaCha8Rng) -> (GridFunction<f64>, f64, String) {
    let d = rng.gen_range(1..=2);
    let h = [1.0 / 8.0, 1.0 / 16.0][rng.gen_range(0..2)];
    let half = [2.0, 4.0][rng.gen_range(0..2)];
    let lattice = Lattice::new(d, h, half).unwrap();
    let c = |rng: &mut ChaCha8Rng| (0..d).map(|_| rng.gen_range(-1.5..1.5)).collect::<Vec<f64>>();
    let spec = match rng.gen_range(0..4) {
        0 => FunctionSpec::StepRandom { seed: rng.gen(), block: rng.gen_range(1..=8), extent: None },
        1 => FunctionSpec::Gaussian { sigma: rng.gen_range(0.2..2.0), center: c(rng) },
        2 => FunctionSpec::IndicatorBall { center: c(rng), radius: rng.gen_range(0.1..1.5) },
        _ => FunctionSpec::PowerTail { alpha: rng.gen_range(1.0..5.0), epsilon: 0.25 },
    };
    let f = spec.sample::<f64>(&lattice).unwrap();
    let r = h * rng.gen_range(1..=8) as f64;
    (f, r, format!("{spec:?} on d={d}, h={h}"))
}

const EXPONENTS: [f64; 6] = [1.0, 1.5, 2.0, 3.0, 4.0, f64::INFINITY];

fn naive_lebesgue(f: &GridFunction<f64>, q: f64) -> f64 {
    let vol = f.lattice().cell_volume();
    if q.is_infinite() {
        return f.values().iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    (f.values().iter().map(|v| v.abs().powf(q)).sum::<f64>() * vol).powf(1.0 / q)
}

fn c05_discrete_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let (f, r, desc) = random_member(&mut rng);
        let q = EXPONENTS[rng.gen_range(0..EXPONENTS.len())];
        let same = norms::amalgam_discrete(&f, r, ExponentPair::new(e(q), e(q)).unwrap()).unwrap();
        let leb = naive_lebesgue(&f, q);
        let err = rel(same, leb);
        worst = worst.max(err);
        ensure!(err <= 1e-12, "p = q = {q}: {same} against {leb} for {desc}");
        let mut last = f64::INFINITY;
        for &p in EXPONENTS.iter().filter(|p| **p >= q) {
            let v = norms::amalgam_discrete(&f, r, ExponentPair::new(e(q), e(p)).unwrap()).unwrap();
            ensure!(v <= last, "not monotone in p at p = {p}: {v} > {last} for {desc}");
            last = v;
        }
    }
    Ok(format!("200 members, worst p = q mismatch {worst:.1e}, monotone in p"))
}

fn c06_holder() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0usize;
    for _ in 0..200 {
        let (f, r, desc) = random_member(&mut rng);
        let d = f.lattice().dim() as i32;
        let i = rng.gen_range(0..EXPONENTS.len());
        let j = rng.gen_range(i..EXPONENTS.len());
        let (q1, q2) = (EXPONENTS[i], EXPONENTS[j]);
        let a = norms::cube_norms(&f, r, e(q1)).unwrap();
        let b = norms::cube_norms(&f, r, e(q2)).unwrap();
        let factor = r.powi(d).powf(1.0 / q1 - 1.0 / q2);
        for (k, (x, y)) in a.iter().zip(&b).enumerate() {
            ensure!(*x <= factor * y * (1.0 + 1e-12), "cube {k}: {x} > {factor}·{y} (q1 = {q1}, q2 = {q2}) for {desc}");
            checked += 1;
        }
    }
    Ok(format!("200 members, {checked} cubes"))
}

fn c07_norm_equivalence() -> Outcome {
    let mut parts = Vec::new();
    for d in [1, 2] {
        for (q, p) in [(1.0, 2.0), (2.0, 4.0), (1.0, f64::INFINITY)] {
            let params = VerifyParams::new(e(q), e(p), WeightKind::Power { alpha: e(p.min(q.max(2.0))) }, d);
            let (_, rep) = run_suites(Suite::Amalgam, &params).unwrap().remove(0);
            let spread = rep.spread.ok_or("no rows")?;
            let drift = rep.refinement.as_ref().ok_or("no refinement")?.drift;
            let cap = 4f64.powi(d as i32);
            ensure!(rep.status == Status::Pass, "d={d} ({q},{p}): status {:?}, notes {:?}", rep.status, rep.notes);
            ensure!(spread <= cap, "d={d} ({q},{p}): spread {spread} > {cap}");
            ensure!(drift <= 0.1, "d={d} ({q},{p}): drift {drift}");
            parts.push(format!("d={d} ({q},{p}) spread {spread:.3} drift {:.1}%", 100.0 * drift));
        }
    }
    Ok(parts.join("; "))
}

fn c08_power_collapse() -> Outcome {
    let mut compared = 0usize;
    for d in [1, 2] {
        let spec = verify::default_lattice(d);
        let lattice: Lattice<f64> = spec.build().unwrap();
        let radii = RadiusSpec::default_for(&lattice).resolve(Some(&lattice)).unwrap();
        let corpus = verify::generate_corpus(0, &spec, Profile::Standard, &[3.0]).unwrap();
        for m in &corpus.members {
            let f = m.sample().unwrap();
            for (q, p, alphas) in [(2.0, 4.0, &[2.0, 3.0, 4.0][..]), (1.0, f64::INFINITY, &[1.0, 2.0][..])] {
                let qp = ExponentPair::new(e(q), e(p)).unwrap();
                for &a in alphas {
                    let fo = norms::fofana_norm(&f, qp, e(a), &radii).unwrap();
                    let gf =
                        norms::generalized_fofana_norm(&f, qp, &power(a, d), &radii, Variant::Continuous).unwrap();
                    ensure!(fo.value.to_bits() == gf.value.to_bits(), "{} α={a}: {} vs {}", m.id, fo.value, gf.value);
                    for ((r1, v1), (r2, v2)) in fo.trace.iter().zip(&gf.trace) {
                        ensure!(r1 == r2 && v1.to_bits() == v2.to_bits(), "{} α={a}: trace differs at r={r1}", m.id);
                    }
                    compared += 1;
                }
            }
        }
    }
    Ok(format!("{compared} norm evaluations bit-identical"))
}

fn c09_nakai() -> Outcome {
    let probes = RadiusGrid::geometric(0.01, 10.0, 16).unwrap();
    let run = |alpha: f64, p: f64| {
        weights::nakai_constant(&power(alpha, 1), Exponent::TWO, e(p), &probes, 1e5, NakaiOptions::default())
            .unwrap()
    };
    let ((a, b, c), dt) = timed(|| (run(2.0, 4.0), run(2.0, f64::INFINITY), run(4.0, 4.0)));
    let ca = a.c_hat.ok_or("p = 4 reported divergent")?;
    let cb = b.c_hat.ok_or("p = ∞ reported divergent")?;
    ensure!(rel(ca, 2.0) <= 0.05, "p = 4: C_hat = {ca}");
    ensure!(rel(cb, 1.0) <= 0.05, "p = ∞: C_hat = {cb}");
    ensure!(c.divergent && c.c_hat.is_none(), "α = p not divergent: {:?}", c.c_hat);
    ensure!(dt < Duration::from_secs(1), "took {dt:?}");
    Ok(format!("C_hat {ca:.4} and {cb:.4}, α = p divergent, {dt:.2?}"))
}

fn c10_class_checker() -> Outcome {
    for (q, p, alpha) in [(2.0, 4.0, 2.0), (2.0, 4.0, 3.0), (2.0, 4.0, 4.0), (1.0, f64::INFINITY, 1.5), (1.0, 2.0, 1.0)] {
        for d in [1, 2] {
            let w = power(alpha, d);
            let res = weights::check_class(&w, e(q), e(p), &verify::class_grid(&w).unwrap(), CLASS_CAP).unwrap();
            ensure!(res.pass, "power({alpha}) d={d} rejected for ({q},{p})");
            ensure!((res.c_dec - 1.0).abs() <= 1e-12, "C_dec = {}", res.c_dec);
            ensure!((res.c_inc - 1.0).abs() <= 1e-12, "C_inc = {}", res.c_inc);
        }
    }
    // α > p: t^{1/p − 1/α} grows, so the decreasing side fails.
    let w = power(8.0, 1);
    let res = weights::check_class(&w, e(2.0), e(4.0), &verify::class_grid(&w).unwrap(), CLASS_CAP).unwrap();
    ensure!(!res.pass, "power(8) accepted for (2,4)");
    let (r, s) = res.dec_witness;
    let at_witness = (s / r).powf(1.0 / 4.0 - 1.0 / 8.0);
    ensure!(r < s && at_witness > 1.0, "witness ({r}, {s}) does not violate");
    ensure!(rel(at_witness, res.c_dec) <= 1e-9, "witness ratio {at_witness} vs C_dec {}", res.c_dec);
    for alpha in [1.0, 1.5, 2.0, 3.0, 4.0, 8.0] {
        let w = power(alpha, 1);
        let dbl = weights::check_doubling(&w, &verify::class_grid(&w).unwrap()).unwrap();
        let expect = 2f64.powf(1.0 / alpha);
        ensure!((dbl - expect).abs() <= 1e-12, "doubling of power({alpha}) = {dbl}, expected {expect}");
    }
    Ok(format!("witness ({r:.3e}, {s:.3e}), doubling matches 2^(1/α)"))
}

fn c11_dyadic() -> Outcome {
    let mut worst = 0.0f64;
    for (alpha, q, p) in [(2.0, 2.0, 4.0), (3.0, 2.0, 4.0), (1.5, 1.5, 2.0), (2.0, 2.0, f64::INFINITY)] {
        for d in [1, 2] {
            let w = power(alpha, d);
            let c_at = |r: f64| {
                let rep = weights::lemma_dyadic_lower_bound(&w, e(q), e(p), r, 8).unwrap();
                (rep.c_emp.unwrap(), rep.rows.iter().map(|x| x.ratio).collect::<Vec<_>>())
            };
            for r in [0.01, 0.1, 1.0, 10.0] {
                let (c, ratios) = c_at(r);
                let (c2, _) = c_at(2.0 * r);
                for x in &ratios {
                    worst = worst.max(rel(*x, ratios[0]));
                }
                worst = worst.max(rel(c, c2));
            }
        }
    }
    ensure!(worst <= 1e-10, "relative variation {worst:.2e}");
    Ok(format!("max relative variation {worst:.1e}"))
}

fn c12_ball_indicator() -> Outcome {
    let params = VerifyParams::new(Exponent::ONE, Exponent::INFINITY, WeightKind::Power { alpha: Exponent::TWO }, 1);
    let (_, rep) = run_suites(Suite::Indicator, &params).unwrap().remove(0);
    let spread = rep.spread.ok_or("no rows")?;
    ensure!(rep.status == Status::Pass, "status {:?}, notes {:?}", rep.status, rep.notes);
    ensure!(spread <= 16.0, "spread {spread}");
    // Recompute each row on the grid and on its doubling.
    let lattice: Lattice<f64> = params.lattice.build().unwrap();
    let w = power(2.0, 1);
    let qp = ExponentPair::new(Exponent::ONE, Exponent::INFINITY).unwrap();
    let grid = indicator_radii(&lattice).unwrap();
    let dense = grid.doubled().unwrap();
    let mut worst = 0.0f64;
    for r0 in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let chi = FunctionSpec::IndicatorBall { center: vec![], radius: r0 }.sample::<f64>(&lattice).unwrap();
        let v = |g: &RadiusGrid<f64>| {
            w.eval(r0).unwrap() * norms::generalized_fofana_norm(&chi, qp, &w, g, Variant::Continuous).unwrap().value
        };
        let (a, b) = (v(&grid), v(&dense));
        worst = worst.max(rel(b, a));
        ensure!(rel(b, a) <= 0.05, "r0 = {r0}: {a} then {b}");
    }
    Ok(format!("spread {spread:.4}, worst stability {:.2}%", 100.0 * worst))
}

fn c13_maximal_boundedness() -> Outcome {
    let phi = WeightKind::Power { alpha: Exponent::TWO };
    let params = VerifyParams::new(Exponent::TWO, e(4.0), phi, 1);
    let n = params.lattice.build::<f64>().unwrap().len();
    ensure!(n <= 2048, "lattice has {n} cells");
    let (reports, dt) = timed(|| run_suites(Suite::All, &params).unwrap());
    let (_, rep) = reports.iter().find(|(s, _)| *s == Suite::Maximal).unwrap();
    let c = rep.c_emp.ok_or("no rows")?;
    let drift = rep.refinement.as_ref().ok_or("no refinement")?.drift;
    ensure!(rep.status == Status::Pass, "status {:?}, notes {:?}", rep.status, rep.notes);
    ensure!(c <= 100.0, "C_emp = {c}");
    ensure!(drift <= 0.1, "drift {drift}");
    ensure!(dt < Duration::from_secs(300), "full suite took {dt:?}");
    let neg = VerifyParams::new(Exponent::TWO, e(4.0), WeightKind::Power { alpha: e(4.0) }, 1);
    let (_, nrep) = run_suites(Suite::Maximal, &neg).unwrap().remove(0);
    ensure!(nrep.status == Status::NotApplicable, "negative control status {:?}", nrep.status);
    Ok(format!("C_emp {c:.4}, drift {:.2}%, full suite {dt:.2?} at n = {n}, α = p not applicable", 100.0 * drift))
}

/// Runs `verify` inside `dir` with relative output paths, so that argv is
/// the same for every run.
fn run_verify(dir: &Path, threads: &str) -> Result<(Vec<u8>, Vec<u8>), String> {
    std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_fofana-kit"))
        .current_dir(dir)
        .args(["--threads", threads, "verify", "--suite", "all", "--phi", "power(2)", "--q", "2", "--p", "4"])
        .args(["--seed", "3", "--profile", "standard", "--report", "report.json", "--csv", "rows.csv"])
        .env_remove("FOFANA_KIT_THREADS")
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "exit {:?}: {}", out.status, String::from_utf8_lossy(&out.stderr));
    let read = |n: &str| std::fs::read(dir.join(n)).map_err(|e| e.to_string());
    Ok((read("report.json")?, read("rows.csv")?))
}

fn c14_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a_json, a_csv) = run_verify(&dir.path().join("a"), "1")?;
    let (b_json, b_csv) = run_verify(&dir.path().join("b"), "1")?;
    ensure!(a_json == b_json, "single-threaded reports differ");
    ensure!(a_csv == b_csv, "single-threaded CSVs differ");
    let (c_json, c_csv) = run_verify(&dir.path().join("c"), "4")?;
    let suites = |b: &[u8]| serde_json::from_slice::<serde_json::Value>(b).map(|v| v["suites"].clone());
    let (one, many) = (suites(&a_json).map_err(|e| e.to_string())?, suites(&c_json).map_err(|e| e.to_string())?);
    ensure!(one == many, "rows differ between 1 and 4 threads");
    ensure!(a_csv == c_csv, "CSVs differ between 1 and 4 threads");
    Ok(format!("{} report bytes identical, 4-thread rows identical", a_json.len()))
}

fn main() {
    let criteria: [Criterion; 14] = [
        ("maximal identity on constants", c01_constants),
        ("1D indicator oracle", c02_indicator_oracle),
        ("spike oracle", c03_spike),
        ("continuous amalgam closed form", c04_amalgam_closed_form),
        ("discrete identities", c05_discrete_identities),
        ("Hölder cube bound", c06_holder),
        ("norm equivalence", c07_norm_equivalence),
        ("power-φ collapse", c08_power_collapse),
        ("Nakai constant oracle", c09_nakai),
        ("G_{q,p} checker", c10_class_checker),
        ("dyadic lower bound invariance", c11_dyadic),
        ("ball-indicator bound", c12_ball_indicator),
        ("maximal boundedness at desk scale", c13_maximal_boundedness),
        ("determinism", c14_determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let dt = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} [{dt:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} [{dt:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
