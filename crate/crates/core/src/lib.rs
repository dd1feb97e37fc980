//! Small-ball probabilities of strictly stable Lévy processes measured in
//! p-variation and related path semi-norms.
//!
//! The numerical core ([`stable`], [`path`], [`variation`], [`constants`]) is
//! generic over the scalar type through [`Scalar`]; `f64` and `f32` aliases
//! are provided below. Monte Carlo estimation lives in [`estimator`].

pub mod constants;
pub mod error;
pub mod estimator;
pub mod oracle;
pub mod parallel;
pub mod path;
pub mod rng;
pub mod scalar;
pub mod special;
pub mod stable;
pub mod stats;
pub mod sum;
pub mod variation;

pub use constants::{
    closed_form_constant, constants_report, gaussian_constants, holder_lower_bound, jump_lower_bound, rate_exponent,
    subordination_offset, symmetric_lower_bound, Branch, ConstantsReport, GaussianConstants, HolderBound,
};
pub use error::{Error, Result};
pub use estimator::{estimate_smallball, MCConfig, Route, SemiNorm, SmallBallEstimate};
pub use path::{
    simulate_grid, simulate_jumps, simulate_subordinated, JumpSet, PathGrid, PathMethod, SubordinatedPath,
};
pub use rng::{RngStream, StreamDomain};
pub use scalar::Scalar;
pub use stable::{sp_law, StableLaw, SubordinatorLaw};
pub use variation::{
    block_pvars, holder_seminorm, pvar_bruteforce, pvar_dp, pvar_value, BlockDecomposition, InequalityWitness,
    VariationResult,
};

pub type StableLaw64 = StableLaw<f64>;
pub type StableLaw32 = StableLaw<f32>;
pub type SubordinatorLaw64 = SubordinatorLaw<f64>;
pub type SubordinatorLaw32 = SubordinatorLaw<f32>;
pub type PathGrid64 = PathGrid<f64>;
pub type PathGrid32 = PathGrid<f32>;
pub type JumpSet64 = JumpSet<f64>;
pub type JumpSet32 = JumpSet<f32>;
pub type VariationResult64 = VariationResult<f64>;
pub type VariationResult32 = VariationResult<f32>;
pub type ConstantsReport64 = ConstantsReport<f64>;
pub type ConstantsReport32 = ConstantsReport<f32>;
