//! Simulator and verification harness for quantum-statistical annealing on
//! triode/EQU Boolean networks.
//!
//! The crate is organised bottom-up:
//!
//! * [`network`]: the Boolean problem (triodes, wires, error metric, brute
//!   force, gadgets, exact-cover ingestion, classical Metropolis annealing).
//! * [`statespace`]: spin-pair algebra, the comparison (`4^T`) and physical
//!   (`3^T`) spaces, embeddings and the S/F/V classification.
//! * [`hamiltonian`]: wire Hamiltonians, Ornstein–Uhlenbeck field noise,
//!   heat-bath couplings and symmetrization checks.
//! * [`dynamics`]: steppers, comparison / projected / symmetrized runs,
//!   ensembles and the projection-interval convergence study.
//! * [`analysis`]: take-off fits, the renormalization ledger, power-law fits.

// `!(x > 0.0)` also rejects NaN, which is the intent throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
mod error;
pub mod hamiltonian;
pub mod network;
pub mod par;
pub mod statespace;

pub use error::{Error, Result};
