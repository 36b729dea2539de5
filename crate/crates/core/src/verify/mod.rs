//! Corpus generation and the inequality-checking harness.
//!
//! Each check evaluates both sides of an inequality on every corpus member,
//! records the ratios and compares the largest one (or the spread) with a
//! configurable cap. Refinement rows repeat the computation at half the
//! spacing with the same physical radii.

mod checks;
mod corpus;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use checks::{
    check_ball_indicator, check_embeddings, check_fefferman_stein, check_maximal_boundedness,
    check_norm_equivalence, class_grid, default_balls, default_maximal_radii, CheckConfig, EmbeddingSpec,
};
pub use corpus::{default_lattice, generate_corpus, Corpus, CorpusMember, Profile, DEFAULT_ALPHAS};

use crate::lattice::{Lattice, LatticeSpec};
use crate::radius::{RadiusGrid, RadiusSpec};
use crate::report::CheckReport;
use crate::scalar::{Exponent, ExponentPair};
use crate::weights::{WeightFunction, WeightKind};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    Amalgam,
    Embeddings,
    Indicator,
    FeffermanStein,
    Maximal,
}

impl Suite {
    pub const EACH: [Suite; 5] =
        [Suite::Amalgam, Suite::Embeddings, Suite::Indicator, Suite::FeffermanStein, Suite::Maximal];

    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Self::EACH.to_vec(),
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::All => "all",
            Suite::Amalgam => "amalgam",
            Suite::Embeddings => "embeddings",
            Suite::Indicator => "indicator",
            Suite::FeffermanStein => "fefferman-stein",
            Suite::Maximal => "maximal",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Suite::All, Suite::Amalgam, Suite::Embeddings, Suite::Indicator, Suite::FeffermanStein, Suite::Maximal]
            .into_iter()
            .find(|x| x.to_string() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown suite {s:?}")))
    }
}

/// Everything a harness run depends on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyParams {
    pub q: Exponent,
    pub p: Exponent,
    pub phi: WeightKind,
    pub lattice: LatticeSpec,
    pub seed: u64,
    pub profile: Profile,
    /// Radii of the sup in the Fofana-type norms; `None` means `geometric:4h:L:25`.
    pub radii: Option<RadiusSpec>,
    pub r0: Vec<f64>,
    pub check: CheckConfig,
}

impl VerifyParams {
    pub fn new(q: Exponent, p: Exponent, phi: WeightKind, d: usize) -> Self {
        Self {
            q,
            p,
            phi,
            lattice: default_lattice(d),
            seed: 0,
            profile: Profile::Standard,
            radii: None,
            r0: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            check: CheckConfig::default(),
        }
    }

    fn alphas(&self) -> Vec<f64> {
        match &self.phi {
            WeightKind::Power { alpha } | WeightKind::PowerLog { alpha, .. } if !alpha.is_infinite() => {
                vec![alpha.to_f64()]
            }
            _ => vec![],
        }
    }
}

/// Runs the requested suites in order.
pub fn run_suites(suite: Suite, params: &VerifyParams) -> Result<Vec<(Suite, CheckReport)>> {
    let lattice: Lattice<f64> = params.lattice.build()?;
    let d = lattice.dim();
    let w = WeightFunction::new(params.phi.clone(), d)?;
    let qp = ExponentPair::new(params.q, params.p)?;
    let corpus = generate_corpus(params.seed, &params.lattice, params.profile, &params.alphas())?;
    let radii: RadiusGrid<f64> = params
        .radii
        .clone()
        .unwrap_or_else(|| RadiusSpec::default_for(&lattice))
        .resolve(Some(&lattice))?;
    let maximal_radii = default_maximal_radii(&lattice)?;
    let cfg = &params.check;
    let mut out = Vec::new();
    for s in suite.expand() {
        let rep = match s {
            Suite::Amalgam => check_norm_equivalence(&corpus, qp, &radii.aligned_to(&lattice)?, cfg)?,
            Suite::Embeddings => {
                let spec = EmbeddingSpec { q1: Exponent::ONE, q2: qp.q, p1: qp.p, p2: Exponent::INFINITY };
                check_embeddings(&corpus, spec, &w, &radii, cfg)?
            }
            Suite::Indicator => {
                check_ball_indicator(&w, qp, &params.r0, &indicator_radii(&lattice)?, &params.lattice, cfg)?
            }
            Suite::FeffermanStein => {
                let q = if qp.q > Exponent::ONE { qp.q } else { Exponent::TWO };
                check_fefferman_stein(&corpus, q, &default_balls(d), &maximal_radii, cfg)?
            }
            Suite::Maximal => check_maximal_boundedness(&corpus, qp, &w, &radii, &maximal_radii, cfg)?,
            Suite::All => unreachable!(),
        };
        out.push((s, rep));
    }
    Ok(out)
}

/// Dyadic-friendly grid for the indicator check: `2^{k/2}` from `2h` to the
/// half-width, so every power of two in range is a node.
pub fn indicator_radii(lattice: &Lattice<f64>) -> Result<RadiusGrid<f64>> {
    let lo = (2.0 * lattice.spacing()).log2().ceil() as i32;
    let hi = lattice.half_width().log2().floor() as i32;
    if hi <= lo {
        return Err(Error::InvalidRadii("lattice too small for the indicator check".into()));
    }
    let count = (2 * (hi - lo) + 1) as usize;
    RadiusGrid::geometric(2f64.powi(lo), 2f64.powi(hi), count)
}
