//! The coder as a Markov chain over its states.
//!
//! Encoding one i.i.d. symbol moves state `x` to `x′ = 𝔼(s, x)` with probability `p_s`.
//! The stationary distribution of that chain gives the exact long-run average code
//! length `κ` and the residual redundancy `ΔH = κ − H(S)`.

mod redundancy;
mod simulate;
mod solve;
mod transition;

pub use redundancy::{constant_lengths, evaluate, redundancy, RedundancyReport};
pub use simulate::simulate_empirical;
pub use solve::{solve_equilibrium, EquilibriumDistribution};
pub use transition::{build_transition_system, ScaledSystem, TransitionSystem};

pub(crate) use solve::{bareiss, bareiss_i128, solve_float_in_place};
pub(crate) use transition::scaled_weights;

use std::fmt;
use std::str::FromStr;

/// Arithmetic used to solve for the stationary distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arithmetic {
    /// Rational Gaussian elimination; reproduces fractions exactly.
    Exact,
    /// Partial-pivot elimination in `f64`.
    Floating,
}

impl Arithmetic {
    /// Exact for tables of at most 256 states, floating beyond.
    pub fn default_for(l: u32) -> Self {
        if l <= 256 {
            Arithmetic::Exact
        } else {
            Arithmetic::Floating
        }
    }
}

impl fmt::Display for Arithmetic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Arithmetic::Exact => "exact",
            Arithmetic::Floating => "floating",
        })
    }
}

impl FromStr for Arithmetic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" | "rational" => Ok(Arithmetic::Exact),
            "float" | "floating" => Ok(Arithmetic::Floating),
            other => Err(format!("unknown arithmetic mode {other:?}")),
        }
    }
}
