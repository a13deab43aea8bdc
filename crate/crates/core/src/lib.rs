#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Exact and simulated performance measures for an M/M/1 queue whose rates
//! switch between two random environments, and for its heavy-traffic
//! diffusion approximation.

pub mod diffusion;
pub mod error;
pub mod fpt_discrete;
pub mod model;
pub mod numerics;
pub mod simulator;
pub mod steady_state;
pub mod transient;

pub use error::{Error, Result};
pub use model::{DiffusionSpec, Env, QueueSpec, StabilityCase};
