use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lattice::{FunctionSpec, GridFunction, LatticeSpec};
use crate::{Error, Result};

/// Corpus size and shape.
///
/// | profile    | members                                                   |
/// |------------|-----------------------------------------------------------|
/// | smoke      | constant, one cell, two balls, one gaussian, one power tail, one step function |
/// | standard   | constant, two cells, balls r0 ∈ {1/4, 1/2, 1, 2}, gaussians σ ∈ {1/2, 1, 2}, a power tail per α, two step functions |
/// | refinement | the standard members, each at `h` and `h/2`               |
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Smoke,
    #[default]
    Standard,
    Refinement,
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Smoke => "smoke",
            Profile::Standard => "standard",
            Profile::Refinement => "refinement",
        })
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smoke" => Ok(Profile::Smoke),
            "standard" => Ok(Profile::Standard),
            "refinement" => Ok(Profile::Refinement),
            _ => Err(Error::Precondition(format!("unknown profile {s:?}, expected smoke, standard or refinement"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusMember {
    pub id: String,
    pub function: FunctionSpec,
    pub lattice: LatticeSpec,
    /// 0 at the base spacing, 1 at half of it.
    pub level: u32,
}

impl CorpusMember {
    pub fn sample(&self) -> Result<GridFunction<f64>> {
        self.function.sample(&self.lattice.build::<f64>()?)
    }

    /// The same physical function on the lattice with half the spacing.
    pub fn refined(&self) -> Self {
        Self {
            id: self.id.clone(),
            function: self.function.for_refined_lattice(),
            lattice: self.lattice.refined(),
            level: self.level + 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub seed: u64,
    pub profile: Profile,
    pub members: Vec<CorpusMember>,
}

/// Default lattice of the harness: `[−8, 8]` at `h = 1/32` in one
/// dimension, `[−4, 4]²` at `h = 1/8` in two.
pub fn default_lattice(d: usize) -> LatticeSpec {
    match d {
        1 => LatticeSpec { d: 1, h: 1.0 / 32.0, half_width: 8.0 },
        _ => LatticeSpec { d: 2, h: 1.0 / 8.0, half_width: 4.0 },
    }
}

/// Power-tail exponents always present in the standard corpus.
pub const DEFAULT_ALPHAS: [f64; 3] = [1.5, 2.0, 4.0];

/// Deterministic corpus for `(seed, lattice, profile)`; `alphas` adds power
/// tails matching the weights under test.
pub fn generate_corpus(seed: u64, lattice: &LatticeSpec, profile: Profile, alphas: &[f64]) -> Result<Corpus> {
    let grid = lattice.build::<f64>()?;
    let d = lattice.d;
    let h = lattice.h;
    let n = grid.cells_per_axis();
    let at = |x: f64| vec![x; d];
    let cell = |i: usize| grid.center(i);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut alpha_set: Vec<f64> = DEFAULT_ALPHAS.iter().chain(alphas).copied().filter(|a| *a > 0.0).collect();
    alpha_set.sort_by(|a, b| a.partial_cmp(b).unwrap());
    alpha_set.dedup();

    let mut out: Vec<(String, FunctionSpec)> = Vec::new();
    let ball = |r: f64, c: Vec<f64>| FunctionSpec::IndicatorBall { center: c, radius: r };
    let step = |seed: u64| FunctionSpec::StepRandom { seed, block: 8, extent: Some(lattice.half_width / 2.0) };
    match profile {
        Profile::Smoke => {
            out.push(("constant".into(), FunctionSpec::Constant { value: 1.0 }));
            out.push(("cell-0".into(), ball(h / 2.0, at(cell(n / 2)))));
            out.push(("ball-0.5".into(), ball(0.5, vec![])));
            out.push(("ball-1".into(), ball(1.0, vec![])));
            out.push(("gaussian-1".into(), FunctionSpec::Gaussian { sigma: 1.0, center: vec![] }));
            out.push((format!("power-tail-{}", alpha_set[0]), FunctionSpec::PowerTail { alpha: alpha_set[0], epsilon: 0.25 }));
            out.push(("step-0".into(), step(rng.next_u64())));
        }
        Profile::Standard | Profile::Refinement => {
            out.push(("constant".into(), FunctionSpec::Constant { value: 1.0 }));
            out.push(("cell-0".into(), ball(h / 2.0, at(cell(n / 2)))));
            out.push(("cell-1".into(), ball(h / 2.0, at(cell(n / 2 + n / 8)))));
            for r0 in [0.25, 0.5, 1.0, 2.0] {
                out.push((format!("ball-{r0}"), ball(r0, vec![])));
            }
            for sigma in [0.5, 1.0, 2.0] {
                out.push((format!("gaussian-{sigma}"), FunctionSpec::Gaussian { sigma, center: vec![] }));
            }
            for &alpha in &alpha_set {
                out.push((format!("power-tail-{alpha}"), FunctionSpec::PowerTail { alpha, epsilon: 0.25 }));
            }
            out.push(("step-0".into(), step(rng.next_u64())));
            out.push(("step-1".into(), step(rng.next_u64())));
        }
    }
    let mut members: Vec<CorpusMember> = out
        .into_iter()
        .map(|(id, function)| CorpusMember { id, function, lattice: *lattice, level: 0 })
        .collect();
    // Validate every descriptor once on its lattice.
    for m in &members {
        m.function.sample(&grid)?;
    }
    if profile == Profile::Refinement {
        let fine: Vec<CorpusMember> = members.iter().map(CorpusMember::refined).collect();
        members.extend(fine);
    }
    Ok(Corpus { seed, profile, members })
}

impl Corpus {
    pub fn base(&self) -> Vec<CorpusMember> {
        self.members.iter().filter(|m| m.level == 0).cloned().collect()
    }

    /// Members at half the spacing: the stored ones for the refinement
    /// profile, otherwise generated from the base members.
    pub fn refined_members(&self) -> Vec<CorpusMember> {
        let stored: Vec<CorpusMember> = self.members.iter().filter(|m| m.level == 1).cloned().collect();
        if stored.is_empty() {
            self.base().iter().map(CorpusMember::refined).collect()
        } else {
            stored
        }
    }

    /// Base lattice shared by the members.
    pub fn lattice(&self) -> LatticeSpec {
        self.members[0].lattice
    }
}
