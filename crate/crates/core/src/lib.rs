//! Counterfactual effects in multi-path single-photon interferometers.
//!
//! Given an input state, a blocked path and an outcome basis, the crate
//! computes the change of output statistics caused by an ideal absorber and
//! splits it into Kirkwood–Dirac and Elitzur–Vaidman contributions, the
//! back-action redistribution, the optimal discrimination error, and the
//! closed-form bounds on counterfactual gain.

pub mod bounds;
pub mod counterfactual;
pub mod discriminate;
pub mod error;
pub mod hilbert;
pub mod network;
pub mod scenarios;
pub mod tolerances;

pub use error::{Error, Result};
