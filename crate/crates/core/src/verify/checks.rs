use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::corpus::{Corpus, CorpusMember};
use crate::lattice::{ball_integral, Ball, FunctionSpec, GridFunction, Lattice, LatticeSpec};
use crate::maximal::{indicator_maximal_oracle_1d, maximal_function, MaximalConfig, Method};
use crate::norms::{amalgam_continuous, amalgam_discrete, generalized_fofana_norm, Variant};
use crate::radius::RadiusGrid;
use crate::report::{CheckReport, CheckRow, Statistic, Status};
use crate::scalar::{pow_rational, scaled, Exponent, ExponentPair};
use crate::weights::{check_class, nakai_constant, NakaiOptions, WeightFunction, CLASS_CAP};
use crate::{Error, Result};

/// Settings shared by the checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    /// Recompute every row at half the spacing and bound the drift.
    pub refine: bool,
    /// Relative drift allowed between `h` and `h/2`.
    pub drift_bound: f64,
    /// Evaluate the maximal bound at `q = 1`, outside the range `q > 1`.
    pub allow_q_one: bool,
    pub equivalence_cap_base: f64,
    pub embedding_cap: f64,
    pub indicator_cap: f64,
    pub indicator_stability: f64,
    pub maximal_cap: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            refine: true,
            drift_bound: 0.1,
            allow_q_one: false,
            equivalence_cap_base: 4.0,
            embedding_cap: 100.0,
            indicator_cap: 16.0,
            indicator_stability: 0.05,
            maximal_cap: 100.0,
        }
    }
}

/// Raw row before the 0/0 filter: `(case suffix, r, lhs, rhs)`.
type RawRow = (String, Option<f64>, f64, f64);

/// Evaluates `rows_of` on every member in parallel and merges the rows in
/// corpus order, dropping and counting `0/0` rows.
fn collect_rows<F>(members: &[CorpusMember], rows_of: F) -> Result<(Vec<CheckRow>, usize)>
where
    F: Fn(&CorpusMember, &GridFunction<f64>) -> Result<Vec<RawRow>> + Sync,
{
    let per_member: Vec<Result<Vec<CheckRow>>> = members
        .par_iter()
        .map(|m| {
            let f = m.sample()?;
            let h = m.lattice.h;
            Ok(rows_of(m, &f)?
                .into_iter()
                .map(|(case, r, lhs, rhs)| {
                    let id = if case.is_empty() { m.id.clone() } else { format!("{}/{case}", m.id) };
                    CheckRow::new(id, m.function.label(), r, lhs, rhs).at_spacing(h)
                })
                .collect())
        })
        .collect();
    let mut rows = Vec::new();
    let mut skipped = 0;
    for part in per_member {
        for row in part? {
            if row.lhs == 0.0 && row.rhs == 0.0 {
                skipped += 1;
            } else {
                rows.push(row);
            }
        }
    }
    Ok((rows, skipped))
}

/// Base rows, and refined rows when configured.
fn base_and_refined<F>(corpus: &Corpus, cfg: &CheckConfig, rows_of: F) -> Result<(Vec<CheckRow>, Option<Vec<CheckRow>>, usize)>
where
    F: Fn(&CorpusMember, &GridFunction<f64>) -> Result<Vec<RawRow>> + Sync,
{
    let (base, skipped) = collect_rows(&corpus.base(), &rows_of)?;
    let refined = if cfg.refine { Some(collect_rows(&corpus.refined_members(), &rows_of)?.0) } else { None };
    Ok((base, refined, skipped))
}

/// Log grid for the class and Nakai checks, clipped to the weight's domain.
pub fn class_grid(w: &WeightFunction) -> Result<RadiusGrid<f64>> {
    let (lo, hi) = w.domain();
    RadiusGrid::geometric(lo.max(1e-3), hi.min(1e3), 61)
}

/// `_r‖f‖_{q,p} / (r^{d/p} _r‖f‖~_{q,p})` over corpus and radii; passes when
/// the spread `max/min` stays within `4^d`.
pub fn check_norm_equivalence(
    corpus: &Corpus,
    qp: ExponentPair,
    radii: &RadiusGrid<f64>,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let lattice: Lattice<f64> = corpus.lattice().build()?;
    if !radii.is_aligned(&lattice) {
        return Err(Error::Misaligned { r: radii.min(), h: lattice.spacing() });
    }
    let d = lattice.dim();
    let scale = scaled(d, qp.p.recip());
    let rows_of = |_: &CorpusMember, f: &GridFunction<f64>| -> Result<Vec<RawRow>> {
        radii
            .radii()
            .iter()
            .map(|&r| {
                let cont = amalgam_continuous(f, r, qp)?;
                let disc = amalgam_discrete(f, r, qp)?;
                Ok((format!("r={r}"), Some(r), cont, pow_rational(r, scale) * disc))
            })
            .collect()
    };
    let (base, refined, skipped) = base_and_refined(corpus, cfg, rows_of)?;
    let cap = cfg.equivalence_cap_base.powi(d as i32);
    Ok(CheckReport::from_rows("norm-equivalence", Statistic::Spread, cap, base, refined, cfg.drift_bound, skipped)
        .with_note(format!("{qp}, d = {d}")))
}

/// Exponents of the two embedding families: `(L^{q2},L^{p1})^φ ⊂ (L^{q1},L^{p1})^φ`
/// and `(L^{q1},L^{p1})^φ ⊂ (L^{q1},L^{p2})^φ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingSpec {
    pub q1: Exponent,
    pub q2: Exponent,
    pub p1: Exponent,
    pub p2: Exponent,
}

pub fn check_embeddings(
    corpus: &Corpus,
    spec: EmbeddingSpec,
    w: &WeightFunction,
    radii: &RadiusGrid<f64>,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let EmbeddingSpec { q1, q2, p1, p2 } = spec;
    if !(q1 <= q2 && q2 <= p1 && p1 <= p2) {
        return Err(Error::Precondition(format!(
            "need q1 ≤ q2 ≤ p1 ≤ p2, got q1 = {q1}, q2 = {q2}, p1 = {p1}, p2 = {p2}"
        )));
    }
    let grid = class_grid(w)?;
    let q_family = check_class(w, q2, p1, &grid, CLASS_CAP)?.pass;
    let p_family = check_class(w, q1, p1, &grid, CLASS_CAP)?.pass;
    if !q_family && !p_family {
        return Ok(CheckReport::with_status(
            "embeddings",
            Status::Vacuous,
            format!("{} is outside G_{{{q2},{p1}}} and G_{{{q1},{p1}}}", w.label()),
        ));
    }
    let pair = |q, p| ExponentPair::new(q, p);
    let (a, b) = (pair(q1, p1)?, pair(q2, p1)?);
    let c = pair(q1, p2)?;
    let rows_of = |_: &CorpusMember, f: &GridFunction<f64>| -> Result<Vec<RawRow>> {
        let norm = |qp| generalized_fofana_norm(f, qp, w, radii, Variant::Continuous).map(|v| v.value);
        let mut rows = Vec::new();
        let base = norm(a)?;
        if q_family {
            rows.push(("q".to_string(), None, base, if q1 == q2 { base } else { norm(b)? }));
        }
        if p_family {
            rows.push(("p".to_string(), None, if p1 == p2 { base } else { norm(c)? }, base));
        }
        Ok(rows)
    };
    let (base, refined, skipped) = base_and_refined(corpus, cfg, rows_of)?;
    let mut rep =
        CheckReport::from_rows("embeddings", Statistic::MaxRatio, cfg.embedding_cap, base, refined, cfg.drift_bound, skipped);
    if !q_family {
        rep = rep.with_note(format!("q rows vacuous: {} is outside G_{{{q2},{p1}}}", w.label()));
    }
    if !p_family {
        rep = rep.with_note(format!("p rows vacuous: {} is outside G_{{{q1},{p1}}}", w.label()));
    }
    Ok(rep)
}

/// `φ(r0) ‖χ_{B(0,r0)}‖_{(L^q,L^p)^φ}` for each `r0`; passes when the spread
/// is at most the cap and each value moves by at most the stability bound when
/// the radius grid is doubled.
pub fn check_ball_indicator(
    w: &WeightFunction,
    qp: ExponentPair,
    r0_list: &[f64],
    radii: &RadiusGrid<f64>,
    lattice: &LatticeSpec,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let class = check_class(w, qp.q, qp.p, &class_grid(w)?, CLASS_CAP)?;
    if !class.pass {
        return Ok(CheckReport::with_status(
            "ball-indicator",
            Status::Vacuous,
            format!("{} is outside G_{{{},{}}}", w.label(), qp.q, qp.p),
        ));
    }
    let grid: Lattice<f64> = lattice.build()?;
    let dense = radii.doubled()?;
    let rows_at = |radii: &RadiusGrid<f64>| -> Result<Vec<CheckRow>> {
        r0_list
            .par_iter()
            .map(|&r0| {
                let spec = FunctionSpec::IndicatorBall { center: vec![], radius: r0 };
                let chi = spec.sample(&grid)?;
                let norm = generalized_fofana_norm(&chi, qp, w, radii, Variant::Continuous)?;
                let lhs = w.eval(r0)? * norm.value;
                Ok(CheckRow::new(format!("r0={r0}"), spec.label(), Some(r0), lhs, 1.0).at_spacing(grid.spacing()))
            })
            .collect()
    };
    let base = rows_at(radii)?;
    let fine = rows_at(&dense)?;
    let mut unstable = Vec::new();
    for (a, b) in base.iter().zip(&fine) {
        let drift = (b.ratio - a.ratio).abs() / a.ratio;
        if drift > cfg.indicator_stability {
            unstable.push(format!("{} moved by {:.3}% under radius-grid doubling", a.case_id, 100.0 * drift));
        }
    }
    let mut rep = CheckReport::from_rows(
        "ball-indicator",
        Statistic::Spread,
        cfg.indicator_cap,
        base,
        Some(fine),
        cfg.indicator_stability,
        0,
    );
    if !unstable.is_empty() {
        rep.status = Status::Fail;
        for note in unstable {
            rep = rep.with_note(note);
        }
    }
    Ok(rep)
}

/// Maximal-operator radii used by the harness: every multiple of `h` in one
/// dimension, a 48-point geometric grid up to the diameter in two.
pub fn default_maximal_radii(lattice: &Lattice<f64>) -> Result<RadiusGrid<f64>> {
    if lattice.dim() == 1 {
        RadiusGrid::all_aligned(lattice)
    } else {
        RadiusGrid::geometric(lattice.spacing(), lattice.diameter(), 48)
    }
}

/// `∫_B (Mf)^q / ∫ |f|^q M χ_B` per member and ball. In one dimension
/// `M χ_B` comes from the closed form, in two from the discrete operator.
pub fn check_fefferman_stein(
    corpus: &Corpus,
    q: Exponent,
    balls: &[(Vec<f64>, f64)],
    maximal_radii: &RadiusGrid<f64>,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    if q <= Exponent::ONE || q.is_infinite() {
        return Err(Error::Precondition(format!("need 1 < q < ∞, got q = {q}")));
    }
    let d = corpus.lattice().d;
    for (c, r) in balls {
        Ball::new(c.clone(), *r)?;
        if c.len() != d {
            return Err(Error::Precondition(format!("ball center {c:?} does not have {d} coordinates")));
        }
    }
    let rows_of = |_: &CorpusMember, f: &GridFunction<f64>| -> Result<Vec<RawRow>> {
        let lattice = f.lattice();
        let mcfg = MaximalConfig::new(maximal_radii.clone(), Method::PrefixBall);
        let mf = maximal_function(f, &mcfg)?;
        let vol = lattice.cell_volume();
        let mut rows = Vec::new();
        for (c, r) in balls {
            let ball = Ball::new(c.clone(), *r)?;
            let lhs = ball_integral(&mf, q, &ball);
            let m_chi: Vec<f64> = if d == 1 {
                (0..lattice.len()).map(|k| indicator_maximal_oracle_1d(c[0], *r, lattice.point(k)[0])).collect()
            } else {
                let chi = FunctionSpec::IndicatorBall { center: c.clone(), radius: *r }.sample(lattice)?;
                maximal_function(&chi, &mcfg)?.into_values()
            };
            let rhs = vol * crate::sum::compensated_sum(f.values().iter().zip(&m_chi).map(|(v, m)| q.pow_abs(*v) * m));
            rows.push((format!("B({c:?},{r})"), Some(*r), lhs, rhs));
        }
        Ok(rows)
    };
    let (base, refined, skipped) = base_and_refined(corpus, cfg, rows_of)?;
    Ok(CheckReport::from_rows("fefferman-stein", Statistic::MaxRatio, f64::INFINITY, base, refined, cfg.drift_bound, skipped))
}

/// Default balls for the Fefferman–Stein check.
pub fn default_balls(d: usize) -> Vec<(Vec<f64>, f64)> {
    [(0.0, 0.5), (0.0, 1.0), (2.0, 0.25), (-1.5, 1.0)].iter().map(|&(c, r)| (vec![c; d], r)).collect()
}

/// `‖Mf‖ / ‖f‖` in `(L^q,L^p)^φ` per member.
///
/// Not applicable when `φ` fails the class check or the integral condition
/// diverges; experimental (no pass semantics) at `q = 1`.
pub fn check_maximal_boundedness(
    corpus: &Corpus,
    qp: ExponentPair,
    w: &WeightFunction,
    radii: &RadiusGrid<f64>,
    maximal_radii: &RadiusGrid<f64>,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    const ID: &str = "maximal-boundedness";
    let q_one = qp.q == Exponent::ONE;
    if q_one && !cfg.allow_q_one {
        return Ok(CheckReport::with_status(
            ID,
            Status::NotApplicable,
            "q = 1 is outside the range q > 1; enable the experimental flag to record values",
        ));
    }
    let class = check_class(w, qp.q, qp.p, &class_grid(w)?, CLASS_CAP)?;
    if !class.pass {
        return Ok(CheckReport::with_status(
            ID,
            Status::NotApplicable,
            format!("{} is outside G_{{{},{}}}", w.label(), qp.q, qp.p),
        ));
    }
    if !qp.q.is_infinite() {
        let probes = RadiusGrid::geometric(radii.min(), radii.max(), 16)?;
        let (_, hi) = w.domain();
        let t_max = (1e4 * probes.max()).min(hi);
        let opts = NakaiOptions { allow_q_one: q_one, ..NakaiOptions::default() };
        let nakai = match nakai_constant(w, qp.q, qp.p, &probes, t_max, opts) {
            Ok(n) => n,
            Err(e) => return Ok(CheckReport::with_status(ID, Status::NotApplicable, format!("integral condition: {e}"))),
        };
        if nakai.divergent {
            return Ok(CheckReport::with_status(
                ID,
                Status::NotApplicable,
                format!("integral condition diverges for {} at {qp}", w.label()),
            ));
        }
    }
    let rows_of = |_: &CorpusMember, f: &GridFunction<f64>| -> Result<Vec<RawRow>> {
        let mf = maximal_function(f, &MaximalConfig::new(maximal_radii.clone(), Method::PrefixBall))?;
        let lhs = generalized_fofana_norm(&mf, qp, w, radii, Variant::Continuous)?.value;
        let rhs = generalized_fofana_norm(f, qp, w, radii, Variant::Continuous)?.value;
        Ok(vec![(String::new(), None, lhs, rhs)])
    };
    let (base, refined, skipped) = base_and_refined(corpus, cfg, rows_of)?;
    let mut rep = CheckReport::from_rows(ID, Statistic::MaxRatio, cfg.maximal_cap, base, refined, cfg.drift_bound, skipped);
    if q_one {
        rep.status = Status::Experimental;
        rep = rep.with_note("q = 1: values recorded without pass semantics");
    }
    Ok(rep)
}
