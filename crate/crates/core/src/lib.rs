//! Tabled asymmetric numeral systems (tANS) laboratory.
//!
//! The crate covers four layers:
//!
//! - [`dist`], [`spread`], [`tables`], [`codec`] and [`format`]: symbol statistics,
//!   symbol spreads, coding tables, bit-exact frame coding and the on-disk formats.
//! - [`markov`]: the coder's state chain, its stationary distribution (exact rational
//!   or floating point) and the resulting redundancy `ΔH = κ − H`.
//! - [`tuning`]: analytic spreads built from the `log2(e)/x` state-probability law.
//! - [`optimize`] and [`keyed`]: swap search for low-redundancy spreads, exhaustive
//!   enumeration at toy sizes, and key-derived secret spreads.

pub mod codec;
pub mod dist;
pub mod error;
pub mod format;
pub mod keyed;
pub mod markov;
pub mod optimize;
pub mod rng;
pub mod spread;
pub mod tables;
pub mod tuning;

pub use codec::{decode, encode, BinaryFrame, SymbolFrame};
pub use dist::{quantize, QuantizeMode, SymbolDistribution};
pub use error::{Error, Result};
pub use markov::{
    build_transition_system, redundancy, simulate_empirical, solve_equilibrium, Arithmetic,
    EquilibriumDistribution, RedundancyReport, TransitionSystem,
};
pub use spread::SymbolSpread;
pub use tables::CodingTables;

/// A coder state in `I = {L, …, 2L−1}`.
pub type State = u32;
