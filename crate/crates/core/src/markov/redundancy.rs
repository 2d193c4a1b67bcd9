use num_rational::BigRational;
use num_traits::Zero;

use super::solve::{solve_equilibrium, EquilibriumDistribution};
use super::transition::build_transition_system;
use super::Arithmetic;
use crate::dist::{rational_to_f64, SymbolDistribution};
use crate::error::{Error, Result};
use crate::spread::SymbolSpread;
use crate::tables::CodingTables;

/// Average code length and residual redundancy of one coder.
#[derive(Debug, Clone, PartialEq)]
pub struct RedundancyReport {
    pub mode: Arithmetic,
    /// `κ`, bits per symbol.
    pub kappa: f64,
    /// `κ` as a fraction, in exact mode.
    pub kappa_exact: Option<BigRational>,
    /// `κ(s) = Σ_x k_s(x)·p_x`.
    pub per_symbol: Vec<f64>,
    pub per_symbol_exact: Option<Vec<BigRational>>,
    /// `H(S)`, bits per symbol.
    pub entropy: f64,
    /// `ΔH = κ − H(S)`.
    pub delta_h: f64,
}

/// `κ(s)`, `κ`, `H(S)` and `ΔH` from a stationary distribution.
pub fn redundancy(
    eq: &EquilibriumDistribution,
    tables: &CodingTables,
    dist: &SymbolDistribution,
) -> Result<RedundancyReport> {
    let l = tables.l();
    if eq.len() != l as usize || tables.symbols() != dist.len() {
        return Err(Error::SpreadMismatch(
            "equilibrium, tables and distribution disagree in size".into(),
        ));
    }
    let per_symbol: Vec<f64> = (0..dist.len())
        .map(|s| (l..2 * l).map(|x| tables.k(s, x) as f64 * eq.prob(x)).sum())
        .collect();
    let entropy = dist.entropy();

    let exact = match (eq.exact(), dist.exact_probs()) {
        (Some(px), Some(ps)) => {
            let per_symbol: Vec<BigRational> = (0..dist.len())
                .map(|s| {
                    let mut acc = BigRational::zero();
                    for x in l..2 * l {
                        let k = tables.k(s, x);
                        if k > 0 {
                            acc += &px[(x - l) as usize] * BigRational::from_integer(k.into());
                        }
                    }
                    acc
                })
                .collect();
            let kappa: BigRational = per_symbol.iter().zip(ps).map(|(k, p)| k * p).sum();
            Some((kappa, per_symbol))
        }
        _ => None,
    };

    let (kappa, kappa_exact, per_symbol, per_symbol_exact) = match exact {
        Some((kappa, per_exact)) => (
            rational_to_f64(&kappa),
            Some(kappa),
            per_exact.iter().map(rational_to_f64).collect(),
            Some(per_exact),
        ),
        None => {
            let kappa = per_symbol
                .iter()
                .zip(dist.probs())
                .map(|(k, p)| k * p)
                .sum();
            (kappa, None, per_symbol, None)
        }
    };

    Ok(RedundancyReport {
        mode: eq.mode(),
        kappa,
        kappa_exact,
        per_symbol,
        per_symbol_exact,
        entropy,
        delta_h: kappa - entropy,
    })
}

/// Tables, equilibrium and redundancy for one spread in a single call.
pub fn evaluate(
    dist: &SymbolDistribution,
    spread: &SymbolSpread,
    mode: Arithmetic,
) -> Result<RedundancyReport> {
    let tables = CodingTables::build(dist, spread)?;
    let sys = build_transition_system(&tables, dist);
    match solve_equilibrium(&sys, mode) {
        Ok(eq) => redundancy(&eq, &tables, dist),
        Err(Error::SingularSystem) => match constant_lengths(dist) {
            Some(k) => Ok(constant_length_report(dist, &k, mode)),
            None => Err(Error::SingularSystem),
        },
        Err(e) => Err(e),
    }
}

/// `k_s` when every count is a power of two, so that `k_s(x) = R − lg L_s` for all `x`.
///
/// Such coders may have a reducible state chain, yet `κ = Σ p_s·k_s` under every
/// stationary distribution.
pub fn constant_lengths(dist: &SymbolDistribution) -> Option<Vec<u32>> {
    dist.counts()
        .iter()
        .map(|&c| c.is_power_of_two().then(|| dist.r() - c.trailing_zeros()))
        .collect()
}

fn constant_length_report(
    dist: &SymbolDistribution,
    k: &[u32],
    mode: Arithmetic,
) -> RedundancyReport {
    let per_symbol: Vec<f64> = k.iter().map(|&k| k as f64).collect();
    let entropy = dist.entropy();
    let (kappa, kappa_exact, per_symbol_exact) = match (mode, dist.exact_probs()) {
        (Arithmetic::Exact, Some(ps)) => {
            let kappa: BigRational = ps
                .iter()
                .zip(k)
                .map(|(p, &k)| p * BigRational::from_integer(k.into()))
                .sum();
            let per = k
                .iter()
                .map(|&k| BigRational::from_integer(k.into()))
                .collect();
            (rational_to_f64(&kappa), Some(kappa), Some(per))
        }
        _ => (
            dist.probs()
                .iter()
                .zip(&per_symbol)
                .map(|(p, k)| p * k)
                .sum(),
            None,
            None,
        ),
    };
    RedundancyReport {
        mode,
        kappa,
        kappa_exact,
        per_symbol,
        per_symbol_exact,
        entropy,
        delta_h: kappa - entropy,
    }
}
