//! Pre- and post-selected quantum ensembles.
//!
//! The pipeline is: pre-select the system, let it interact with an
//! intermediate measuring apparatus (IMA), post-select, then read the
//! ensemble's state off as a weighted set of pointer projectors. Outcome
//! probabilities come out of three independent routes (density operator,
//! closed forms, brute-force amplitudes) which are expected to agree.
//!
//! [`timesym`] checks motion-reversal invariance of such ensembles and
//! reproduces two standard counterexamples.

pub mod apparatus;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod ppse;
pub mod scenario;
pub mod timesym;

pub use error::{Error, Result};
