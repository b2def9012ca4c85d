//! Steady-state availability modelling for replicated blockchain deployments.
//!
//! A server is a series arrangement of infrastructure parts (hardware,
//! operating system, docker engine) and the containers stacked on top of
//! them. Deployments replicate that server and combine the replicas under
//! an AND, OR, or k-out-of-n read policy. Everything downstream, block
//! diagrams, Markov chains, parameter sweeps, simulation, reports in
//! nines and hours, is derived from the same per-component
//! failure/repair pairs.

pub mod baseline;
pub mod ctmc;
pub mod montecarlo;
pub mod policy;
pub mod rbd;
pub mod reliability;
pub mod sensitivity;

pub use reliability::{AvailabilityValue, ComponentId, FailureRepairPair, HOURS_PER_YEAR};

/// Errors shared across the modelling modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A numeric input was outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A read policy asked for more replicas than the deployment has.
    #[error("invalid policy: requires {required} of {total} servers")]
    InvalidPolicy { required: u32, total: u32 },

    /// A state space grew past the supported size.
    #[error("state space has {states} states, limit is {cap}")]
    DimensionLimit { states: usize, cap: usize },

    /// The generator matrix does not describe one irreducible chain.
    #[error("reducible chain: {0}")]
    ReducibleChain(String),

    /// A sweep or ranking named a parameter the model does not have.
    #[error("unknown parameter: {0}")]
    UnknownParameter(String),
}
