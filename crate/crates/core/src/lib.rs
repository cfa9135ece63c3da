//! Twisted Hitchin pairs on split bundles over the projective line.
//!
//! A pair is a split bundle `E = ⊕ O(a_i)` together with a map
//! `Φ : E → E ⊗ O(ℓ)` whose entries are binary forms. This crate decides
//! membership in the nilpotent cone, builds the kernel/image filtrations of
//! nilpotent pairs, checks slope stability, and computes the limit of the
//! `C*`-orbit `z·Φ` as `z → ∞` in closed form. The closed form can be checked
//! independently by running the gauge flow symbolically (see [`flow`]).
//!
//! All algorithms are generic over the coefficient field ([`Scalar`]); the
//! aliases below fix exact rationals.

pub mod error;
pub mod filtration;
pub mod flow;
pub mod forms;
pub mod limits;
pub mod linalg;
pub mod model;
pub mod polymat;
pub mod scalar;
pub mod stability;
pub mod testkit;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Arbitrary-precision rationals, the coefficient field used throughout.
/// `RBig` keeps small values inline, which matters for the elimination-heavy
/// kernels.
pub type Rational = dashu_ratio::RBig;
pub type Form = forms::BinaryForm<Rational>;
pub type AffinePoly = forms::Poly<Rational>;
pub type Matrix = polymat::TwistedMatrix<Rational>;
pub type Subbundle = polymat::SubbundleBasis<Rational>;
pub type Pair = model::HitchinPair<Rational>;
