//! Exact and certified triple correlations for two families of
//! measure-preserving systems:
//!
//! * the Ledrappier three-dot Z²-action on F₂ configurations satisfying
//!   `a(z1, z2) + a(z1 + 1, z2) + a(z1, z2 + 1) = 0`, handled through the
//!   character algebra in [`gf2_dual`] and the sampler in [`ledrappier`];
//! * rank-one cutting-and-stacking transformations with spacer blocks
//!   `(H, H + 2N, H + N)`, handled by [`rank_one`] (finite and infinite
//!   measure) and driven by the experiment tables in [`asymptotics`].
//!
//! All reported measures are exact rationals; where a quantity depends on
//! infinitely many construction stages it is bracketed by a
//! [`rank_one::CertifiedMeasure`].

pub mod asymptotics;
pub mod bits;
mod error;
pub mod gf2_dual;
pub mod ledrappier;
pub mod literal;
pub mod rank_one;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;

/// Crate version, echoed into run summaries.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
