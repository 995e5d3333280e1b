//! Stabilizer-circuit laboratory.
//!
//! A simulation workbench for shallow Clifford measurement protocols:
//!
//! - exact stabilizer simulation with forced-outcome measurement and
//!   snapshot/rewind ([`tableau`]),
//! - the abelian algebra of CZ/Phase words and the magic-pentagram
//!   constants ([`diag`], [`pentagram`]),
//! - graph-state measurement problems and MBQC compilation onto grid
//!   cluster states ([`graph`], [`mbqc`]),
//! - surface-code blocks under local stochastic noise with syndrome-measured
//!   preparation, canonical recovery and decoding ([`noise`], [`surface`],
//!   [`encoded`]),
//! - the parity-L reduction pipeline: DAG path parity, determinant encoding,
//!   randomized share encodings, layered DAGs and CNOT-word reductions
//!   ([`dag`], [`encoding`], [`efrak`]),
//! - rewindable oracle devices and the solvers that consume them
//!   ([`oracle`], [`solver`], [`estimator`]).
//!
//! The [`dense`] module is an independent brute-force state-vector
//! simulator used as a reference oracle by the test suites.

pub mod bits;
pub mod dag;
pub mod dense;
pub mod diag;
pub mod efrak;
pub mod encoded;
pub mod encoding;
pub mod estimator;
pub mod gate;
pub mod graph;
pub mod mbqc;
pub mod noise;
pub mod oracle;
pub mod pauli;
pub mod pentagram;
pub mod solver;
pub mod stats;
pub mod surface;
pub mod tableau;

pub use gate::CliffordGate;
pub use pauli::{PauliString, Sign};
pub use tableau::{Determinism, Snapshot, StabilizerTableau};
