//! Simultaneous evolution of a repertoire of hexapod walking controllers:
//! novelty search with local competition on endpoint orientation, plus a
//! surrogate-estimated transferability objective fed by occasional runs on a
//! perturbed "real" robot.

pub mod baselines;
pub mod config;
pub mod error;
pub mod evolution;
pub mod gait;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod nsga2;
pub mod repertoire;
pub mod sim;
pub mod surrogate;

pub use error::{Error, Result};
