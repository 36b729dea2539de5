//! Numerical toolkit for amalgam-type function-space norms on ℝ¹ and ℝ².
//!
//! Functions are sampled on uniform lattices ([`lattice`]) and measured with
//! Lebesgue, amalgam, Fofana, generalized Fofana and generalized Morrey norms
//! ([`norms`]). The centered Hardy–Littlewood maximal operator lives in
//! [`maximal`], weight functions and their structural conditions in
//! [`weights`], and the inequality-checking harness in [`verify`].
//!
//! Every kernel is generic over the scalar type through [`Real`]; the
//! `*64` / `*32` aliases below fix the common choices.
//!
//! ```
//! use fofana_core::{Exponent, Lattice64, FunctionSpec, norms};
//!
//! let lattice = Lattice64::new(1, 0.5, 2.0).unwrap();
//! let f = FunctionSpec::Constant { value: 3.0 }.sample::<f64>(&lattice).unwrap();
//! let n = norms::lebesgue_norm(&f, Exponent::ONE);
//! assert!((n - 12.0).abs() < 1e-12);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod lattice;
pub mod maximal;
pub mod norms;
pub mod quad;
pub mod radius;
pub mod report;
pub mod scalar;
pub mod sum;
pub mod verify;
pub mod weights;

use thiserror::Error;

pub use lattice::{
    ball_integral, cube_integral, make_lattice, sample, Ball, CubePartition, FunctionSpec,
    GridFunction, Lattice, LatticeSpec, SummedTable,
};
pub use maximal::{indicator_maximal_oracle_1d, maximal_function, MaximalConfig, Method};
pub use norms::{NormValue, Variant};
pub use radius::{RadiusGrid, RadiusSpec};
pub use report::{CheckReport, CheckRow, Status};
pub use scalar::{Exponent, ExponentPair, Real};
pub use weights::{ClassCheckResult, NakaiResult, WeightFunction, WeightKind};

/// Version string embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Lattice64 = Lattice<f64>;
pub type Lattice32 = Lattice<f32>;
pub type GridFunction64 = GridFunction<f64>;
pub type GridFunction32 = GridFunction<f32>;
pub type Ball64 = Ball<f64>;
pub type RadiusGrid64 = RadiusGrid<f64>;
pub type RadiusGrid32 = RadiusGrid<f32>;
pub type NormValue64 = NormValue<f64>;
pub type MaximalConfig64 = MaximalConfig<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("invalid function descriptor: {0}")]
    InvalidFunction(String),
    #[error("non-finite sample value at cell {0}")]
    NonFinite(usize),
    #[error("grid functions live on different lattices")]
    LatticeMismatch,
    #[error("radius {r} is not an integer multiple of the spacing {h}")]
    Misaligned { r: f64, h: f64 },
    #[error("invalid radius grid: {0}")]
    InvalidRadii(String),
    #[error("invalid weight function: {0}")]
    InvalidWeight(String),
    #[error("argument out of domain: {0}")]
    OutOfDomain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
