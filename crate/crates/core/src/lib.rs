//! Numerical toolkit for decohering quantum channels.
//!
//! Three channel families are covered, all of the form `(1 - x) rho + x D(rho)`
//! for a pinching-type map `D`:
//!
//! * fully decohering: `D` removes every off-diagonal entry,
//! * block decohering: `D` removes coherences between contiguous blocks of size `k`,
//! * weakly decohering: coherence survives only inside cyclic windows of `k`
//!   neighbouring basis states.
//!
//! The [`channels`] module builds the Kraus representations, complementary channels,
//! Choi matrices and symmetry operators. The [`capacity`] module evaluates the
//! closed-form quantum capacities and checks them against a direct numerical
//! maximization of the coherent information. Dense linear algebra lives in [`matrix`].

pub mod capacity;
pub mod channels;
mod error;
pub mod matrix;
pub mod random;

pub use error::{Error, Result};
