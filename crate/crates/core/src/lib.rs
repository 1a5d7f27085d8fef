//! Exact block diagonalization of the detuned spin-boson model.
//!
//! N two-level spins couple to one or two boson modes through
//! `H_I = r a†a + κ (J₊ a + J₋ a†)` (plus the analogous terms for a second
//! mode). The excitation number is conserved, so the spectrum follows from
//! finite blocks. On top of that this crate locates the level crossings of
//! the ground state as the coupling grows, and measures the spin-spin
//! entanglement (Wootters concurrence) of the ground state.
//!
//! Energies are in units of the spin level spacing; couplings and detunings
//! are dimensionless.

pub mod closedform;
pub mod eig;
pub mod entangle;
pub mod error;
pub mod gsi;
pub mod model;
pub mod par;
pub mod tables;

pub use error::{Error, Result};
pub use model::{
    block_dimension, build_block, build_single_mode_block, build_two_mode_block, BasisState,
    CouplingAxis, CouplingScan, Excitation, ExcitationBlock, ModelParams, SecondMode,
};
pub use par::Execution;
