//! Simulation toolkit for loss-tolerant quantum codes.
//!
//! The crate is organised bottom-up:
//!
//! * [`qsim`] is a small dense simulator (state vectors, density matrices,
//!   Pauli strings, channels and projective measurement).
//! * [`codes`] builds the parity/redundancy erasure codewords and their
//!   stabilizers.
//! * [`recovery`] models heralded loss as erasure and runs the
//!   measure-and-correct decoding back to a single qubit.
//! * [`cluster`] holds graph states, the Z-removal and XX-contraction
//!   rewrite rules and the five-photon loss-tolerant one-way rotation.
//! * [`tomography`] decomposes target projectors into local observables,
//!   groups them into measurement settings and estimates fidelities from
//!   simulated counts.
//! * [`harness`] wires everything into reproducible experiments for the
//!   `losskit` binary.
//!
//! Qubit 0 is always the most significant bit of a basis index.

pub mod cluster;
pub mod codes;
pub mod error;
pub mod harness;
pub mod qsim;
pub mod recovery;
pub mod tomography;

pub use error::{Error, Result};
