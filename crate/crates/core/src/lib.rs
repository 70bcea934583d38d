//! Potential theory of the α-stable subordinated random walk on Z and Z².
//!
//! The walk `S_α` is the simple random walk run along the discrete
//! α/2-stable subordinator; its transition operator is `I − (I − P)^{α/2}`.
//! The crate computes its transition kernels and Green function, capacities
//! of finite sets, the Wiener-type test of massiveness over dyadic shells,
//! closed-form massiveness criteria for the classical set families, and
//! Monte Carlo hitting probabilities.
//!
//! Floating-point kernels are generic over [`Real`] (`f32`/`f64`); the
//! closed-form classifiers are generic over [`Field`], which also admits
//! exact rationals. The aliases below fix the usual `f64` instantiation.

pub mod capacity;
pub mod error;
pub mod gauss;
pub mod kernels;
pub mod lattice;
pub mod linalg;
pub mod massiveness;
pub mod real;
pub mod sets;
pub mod simulate;
pub mod special;
pub mod subordinator;

pub use error::{Error, Result};
pub use lattice::{Dim, FiniteLatticeSet, Point};
pub use real::{Field, Real};

/// Exact rational scalar for the closed-form classifiers.
pub type Rational = num_rational::Ratio<i64>;

pub type WalkConfig = kernels::WalkConfig<f64>;
pub type GreenValue = kernels::GreenValue<f64>;
pub type GreenKernel = kernels::GreenKernel<f64>;
pub type Subordinator = subordinator::Subordinator<f64>;
pub type EquilibriumMeasure = capacity::EquilibriumMeasure<f64>;
