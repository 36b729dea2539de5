use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GridFunction, Lattice};
use crate::scalar::Real;
use crate::{Error, Result};

/// Analytic test function, evaluated at cell centers by [`sample`].
///
/// JSON form: `{"kind": "gaussian", "sigma": 1.0}` and so on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionSpec {
    Constant {
        value: f64,
    },
    /// 1 strictly inside the ball, 0 elsewhere. An empty center means the origin.
    IndicatorBall {
        #[serde(default)]
        center: Vec<f64>,
        radius: f64,
    },
    /// `exp(−|x − c|² / (2σ²))`.
    Gaussian {
        sigma: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    /// `min(ε^{−d/α}, |x|^{−d/α})`.
    PowerTail {
        alpha: f64,
        epsilon: f64,
    },
    /// Piecewise constant with values uniform in `[−1, 1)` on blocks of
    /// `block` cells per axis, supported in `[−extent, extent]^d`.
    StepRandom {
        seed: u64,
        block: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        extent: Option<f64>,
    },
}

impl FunctionSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidFunction(e.to_string()))
    }

    pub fn sample<T: Real>(&self, lattice: &Lattice<T>) -> Result<GridFunction<T>> {
        sample(self, lattice)
    }

    /// Short human-readable label used in reports.
    pub fn label(&self) -> String {
        match self {
            FunctionSpec::Constant { value } => format!("constant({value})"),
            FunctionSpec::IndicatorBall { center, radius } => {
                format!("indicator-ball({center:?}, {radius})")
            }
            FunctionSpec::Gaussian { sigma, .. } => format!("gaussian({sigma})"),
            FunctionSpec::PowerTail { alpha, epsilon } => format!("power-tail({alpha}, {epsilon})"),
            FunctionSpec::StepRandom { seed, block, .. } => format!("step-random({seed}, {block})"),
        }
    }

    /// Descriptor of the same function for a lattice with half the spacing.
    pub fn for_refined_lattice(&self) -> Self {
        match self {
            FunctionSpec::StepRandom { seed, block, extent } => {
                FunctionSpec::StepRandom { seed: *seed, block: block * 2, extent: *extent }
            }
            other => other.clone(),
        }
    }
}

fn center_or_origin(center: &[f64], d: usize) -> Result<Vec<f64>> {
    if center.is_empty() {
        Ok(vec![0.0; d])
    } else if center.len() == d {
        Ok(center.to_vec())
    } else {
        Err(Error::InvalidFunction(format!("center has {} coordinates, lattice has d = {d}", center.len())))
    }
}

fn dist2(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Evaluates a descriptor at every cell center of `lattice`.
pub fn sample<T: Real>(spec: &FunctionSpec, lattice: &Lattice<T>) -> Result<GridFunction<T>> {
    let d = lattice.dim();
    let point = |k: usize| -> Vec<f64> { lattice.point(k).into_iter().map(|x| x.as_f64()).collect() };
    let values: Vec<f64> = match spec {
        FunctionSpec::Constant { value } => vec![*value; lattice.len()],
        FunctionSpec::IndicatorBall { center, radius } => {
            if !(*radius > 0.0) {
                return Err(Error::InvalidFunction(format!("radius = {radius} must be positive")));
            }
            let c = center_or_origin(center, d)?;
            let r2 = radius * radius;
            (0..lattice.len()).map(|k| if dist2(&point(k), &c) < r2 { 1.0 } else { 0.0 }).collect()
        }
        FunctionSpec::Gaussian { sigma, center } => {
            if !(*sigma > 0.0) {
                return Err(Error::InvalidFunction(format!("sigma = {sigma} must be positive")));
            }
            let c = center_or_origin(center, d)?;
            let s2 = 2.0 * sigma * sigma;
            (0..lattice.len()).map(|k| (-dist2(&point(k), &c) / s2).exp()).collect()
        }
        FunctionSpec::PowerTail { alpha, epsilon } => {
            if !(*epsilon > 0.0) {
                return Err(Error::InvalidFunction(format!("epsilon = {epsilon} must be positive")));
            }
            if !(*alpha > 0.0) {
                return Err(Error::InvalidFunction(format!("alpha = {alpha} must be positive")));
            }
            let e = -(d as f64) / alpha;
            let cap = epsilon.powf(e);
            (0..lattice.len())
                .map(|k| {
                    let r = dist2(&point(k), &[0.0, 0.0][..d]).sqrt();
                    if r == 0.0 {
                        cap
                    } else {
                        cap.min(r.powf(e))
                    }
                })
                .collect()
        }
        FunctionSpec::StepRandom { seed, block, extent } => {
            if *block == 0 {
                return Err(Error::InvalidFunction("block must be at least one cell".into()));
            }
            let extent = extent.unwrap_or(f64::INFINITY);
            if !(extent > 0.0) {
                return Err(Error::InvalidFunction(format!("extent = {extent} must be positive")));
            }
            let n = lattice.cells_per_axis();
            let blocks_per_axis = n.div_ceil(*block) as u64;
            (0..lattice.len())
                .map(|k| {
                    let (row, col) = lattice.index(k);
                    if point(k).iter().any(|x| x.abs() > extent) {
                        return 0.0;
                    }
                    let id = (row / block) as u64 * blocks_per_axis + (col / block) as u64;
                    block_value(*seed, id)
                })
                .collect()
        }
    };
    GridFunction::new(lattice.clone(), values.into_iter().map(T::lit).collect())
}

/// Counter-based draw: the value of block `id` depends only on `(seed, id)`.
fn block_value(seed: u64, id: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng.gen_range(-1.0..1.0)
}
