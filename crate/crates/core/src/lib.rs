//! Upper bounds on the advantage of data-reconstruction adversaries against
//! differentially private mechanisms, via Fano-type inequalities, together with a
//! simulator for MAP attacks that gives matching empirical lower bounds.
//!
//! * [`info_theory`]: entropies, divergences, mutual and Arimoto information.
//! * [`mi_bounds`]: information bounds for randomized response and the Gaussian mechanism.
//! * [`fano`]: conversion of information bounds into advantage bounds.
//! * [`attack_sim`]: the reconstruction game with MAP adversaries.
//! * [`cli`]: sweeps, figure presets and the command-line front end.
//!
//! All information quantities are in nats.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod attack_sim;
pub mod cli;
pub mod error;
pub mod fano;
pub mod info_theory;
pub mod mi_bounds;
pub mod numeric;
mod rng;

pub use error::{Error, Result};
