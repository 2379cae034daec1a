//! Evolution of developmental programs that grow multitask feed-forward
//! neural networks.
//!
//! Two Cartesian Genetic Programs (one for somas, one for dendrites) are
//! evolved with a one-elite strategy. Each individual grows a 2-D brain over a
//! fixed number of development cycles, is wired by the nearest-left rule, and
//! is scored on a cartpole controller task and a binary classification task.
//! Activity dependence optionally lets the soma program rewrite a configurable
//! subset of soma parameters from a task reward while the tasks run.

pub mod brain;
pub mod cgp;
pub mod error;
pub mod evolution;
pub mod harness;
pub mod learning;
pub mod rng;
pub mod tasks;

pub use error::{Error, Result};
