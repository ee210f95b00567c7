//! Quantum many-body dynamics with swarms of classical samples.
//!
//! A particle is represented by a swarm of samples whose cell density is
//! `|Ψ|²` and whose velocities carry the phase gradient. An n-particle state
//! is a set of *corteges*, n-tuples of samples that move together, one per
//! particle. Corteges sharing a configuration-space cell exchange impulses,
//! which stands in for the quantum part of the dynamics. A genetic selection
//! loop over (initial, final) cortege pairs searches for the cortege
//! assignment that dominates the reaction outcome.
//!
//! Module map:
//!
//! * [`lattice`]: cell indexing of single-particle, configuration and double
//!   configuration space;
//! * [`wavefield`]: grid wavefunctions, Born sampling, swarm ↔ wavefunction
//!   conversion, amplitude-grain reduction;
//! * [`swarm`], [`dynamics`]: ensembles and their time evolution;
//! * [`selection`]: the grouping / ranking / crossover loop;
//! * [`oracle`]: Crank–Nicolson reference solver and interference deposits;
//! * [`scenario`]: configuration files, outcome classification and the
//!   batch runner behind the `cortege` binary.

pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod potential;
pub mod rng;
pub mod scenario;
pub mod selection;
pub mod swarm;
pub mod wavefield;

pub use error::{Error, Result};
