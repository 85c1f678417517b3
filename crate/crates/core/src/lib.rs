//! Simulation of two-stage adaptive seamless phase II/III designs.
//!
//! A replication draws the standardized score statistics of every arm (or
//! population), stage and endpoint from their joint normal law, applies an
//! interim selection rule to the early-outcome statistics, and tests the
//! surviving hypotheses with a closed combination test on the final outcome.
//! Replications are aggregated into [`engine::OperatingCharacteristics`].
//!
//! Module map:
//!
//! * [`statdist`]: normal, bivariate and equicorrelated normal probabilities,
//!   Cholesky factors, per-replication random streams.
//! * [`simmodel`]: effect translation and the Kronecker-structured score model.
//! * [`selection`]: interim treatment and population selection rules.
//! * [`closedtest`]: intersection tests, combination tests, spending
//!   boundaries, closed testing.
//! * [`engine`]: replication loop, tallies, expected sample size, sweeps.
//!
//! With the default `parallel` feature the replication loop runs on rayon;
//! results are identical for any thread count because every replication owns
//! a random stream keyed by `(master_seed, replication_index)` and tallies
//! merge by integer addition.

pub mod arms;
pub mod closedtest;
pub mod engine;
mod error;
pub mod selection;
pub mod simmodel;
pub mod statdist;

pub use arms::{ArmSet, MAX_ARMS};
pub use error::{Error, Result};
