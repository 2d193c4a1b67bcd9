use std::fmt;
use std::str::FromStr;

use super::{swap_search, SearchConfig, SearchTrace};
use crate::dist::{quantize, state_count, QuantizeMode, SymbolDistribution, SymbolProbs};
use crate::error::{Error, Result};

/// Above this many free symbols the `2^m` candidate vectors are not enumerated.
const MAX_FREE_SYMBOLS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuantizedSearchMode {
    /// Search only the best-fit count vector.
    BestFit,
    /// Search every vector with `L_s ∈ {⌊p_s·L⌋, ⌊p_s·L⌋+1}` summing to `L`.
    Exhaustive,
}

impl fmt::Display for QuantizedSearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuantizedSearchMode::BestFit => "best-fit",
            QuantizedSearchMode::Exhaustive => "exhaustive",
        })
    }
}

impl FromStr for QuantizedSearchMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "best-fit" | "best_fit" | "bestfit" => Ok(Self::BestFit),
            "exhaustive" => Ok(Self::Exhaustive),
            other => Err(format!("unknown quantization search mode {other:?}")),
        }
    }
}

fn floors(probs: &SymbolProbs, l: u32) -> Vec<u32> {
    match probs.exact() {
        Some(exact) => exact
            .iter()
            .map(|p| {
                let t = (p * num_bigint::BigInt::from(l)).floor().to_integer();
                u32::try_from(t).expect("p ≤ 1")
            })
            .collect(),
        None => probs
            .probs()
            .iter()
            .map(|&p| (p * l as f64).floor() as u32)
            .collect(),
    }
}

/// Candidate count vectors in enumeration order: bit `i` of the mask adds one state to
/// the `i`-th non-tail symbol.
fn candidates(probs: &SymbolProbs, l: u32) -> Result<Vec<Vec<u32>>> {
    let base = floors(probs, l);
    let free: Vec<usize> = (0..base.len()).filter(|&s| base[s] >= 1).collect();
    if free.len() > MAX_FREE_SYMBOLS {
        return Err(Error::InvalidConfig(format!(
            "{} symbols to quantize exhaustively, at most {MAX_FREE_SYMBOLS}",
            free.len()
        )));
    }
    let pinned: Vec<u32> = base.iter().map(|&a| a.max(1)).collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << free.len() {
        let mut counts = pinned.clone();
        for (i, &s) in free.iter().enumerate() {
            if mask >> i & 1 == 1 {
                counts[s] += 1;
            }
        }
        if counts.iter().map(|&c| c as u64).sum::<u64>() == l as u64 {
            out.push(counts);
        }
    }
    Ok(out)
}

/// Chooses counts and spread together. Exhaustive mode runs the swap search once per
/// feasible count vector and keeps the lowest final `ΔH` (first one on ties).
pub fn quantized_search(
    probs: &SymbolProbs,
    r: u32,
    mode: QuantizedSearchMode,
    cfg: &SearchConfig,
) -> Result<(SymbolDistribution, SearchTrace)> {
    let l = state_count(r)?;
    match mode {
        QuantizedSearchMode::BestFit => {
            let dist = quantize(probs, r, QuantizeMode::BestFit)?;
            let trace = swap_search(&dist, cfg)?;
            Ok((dist, trace))
        }
        QuantizedSearchMode::Exhaustive => {
            if probs.len() > l as usize {
                return Err(Error::AlphabetTooLarge {
                    symbols: probs.len(),
                    states: l as usize,
                });
            }
            let mut best: Option<(SymbolDistribution, SearchTrace, f64)> = None;
            for counts in candidates(probs, l)? {
                let dist = quantize(probs, r, QuantizeMode::GivenCounts(counts))?;
                let trace = swap_search(&dist, cfg)?;
                let dh = trace.report.as_ref().map_or(f64::INFINITY, |r| r.delta_h);
                if best.as_ref().is_none_or(|b| dh < b.2) {
                    best = Some((dist, trace, dh));
                }
            }
            best.map(|(d, t, _)| (d, t))
                .ok_or(Error::NoFeasibleCounts(r))
        }
    }
}
