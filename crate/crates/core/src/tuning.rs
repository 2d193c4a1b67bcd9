//! Analytic spreads from the state-probability law `p_x ≈ log2(e)/x`.
//!
//! For a symbol `s`, the states sharing one quotient `⌊x/2^k⌋` form an interval
//! `[r, r+α−1]` of length `α = 2^k` that all jump to the same state. Requiring the
//! target state to carry `p_s` times the interval's probability mass gives its
//! preferred position
//!
//! ```text
//! y = 1 / (p_s · ln((r+α−1)/(r−1)))
//! ```
//!
//! [`tune_spread`] rounds these positions and resolves collisions; [`rank_match_spread`]
//! sorts them and hands out states in rank order, which minimizes [`spread_distance`].

use crate::dist::SymbolDistribution;
use crate::error::{Error, Result};
use crate::spread::SymbolSpread;
use crate::tables::bit_count;
use crate::State;

/// States `start, …, start+len−1` sharing the quotient `⌊x/2^k⌋ = quotient`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateInterval {
    pub start: State,
    pub len: u32,
    pub k: u32,
    pub quotient: u32,
}

impl StateInterval {
    pub fn end(&self) -> State {
        self.start + self.len - 1
    }
}

/// The `L_s` intervals of `I` for one symbol, in state order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateIntervalPartition {
    pub symbol: usize,
    pub intervals: Vec<StateInterval>,
}

pub fn partition_intervals(dist: &SymbolDistribution, s: usize) -> StateIntervalPartition {
    let l = dist.l();
    let count = dist.count(s);
    let mut intervals: Vec<StateInterval> = Vec::with_capacity(count as usize);
    for x in l..2 * l {
        let k = bit_count(x, count);
        let quotient = x >> k;
        match intervals.last_mut() {
            Some(last) if last.k == k && last.quotient == quotient => last.len += 1,
            _ => intervals.push(StateInterval {
                start: x,
                len: 1,
                k,
                quotient,
            }),
        }
    }
    StateIntervalPartition {
        symbol: s,
        intervals,
    }
}

/// Preferred state for the interval `[r, r+α−1]` of a symbol with probability `p`.
pub fn preferred_state(p: f64, start: State, len: u32) -> Result<f64> {
    if start < 2 || len == 0 {
        return Err(Error::PreferredStateDomain(start as u64));
    }
    let r = start as f64;
    let last = r + len as f64 - 1.0;
    Ok(1.0 / (p * (last / (r - 1.0)).ln()))
}

/// Preferred positions for every symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferredPositions {
    l: u32,
    /// Per symbol, in interval order, straight from the formula.
    pub raw: Vec<Vec<f64>>,
    /// Per symbol, moved into `[L, 2L)` in unit steps and sorted ascending.
    pub positions: Vec<Vec<f64>>,
}

impl PreferredPositions {
    pub fn compute(dist: &SymbolDistribution) -> Self {
        let l = dist.l();
        let raw: Vec<Vec<f64>> = (0..dist.len())
            .map(|s| {
                let p = dist.prob(s);
                partition_intervals(dist, s)
                    .intervals
                    .iter()
                    .map(|iv| preferred_state(p, iv.start, iv.len).expect("r ≥ L ≥ 2"))
                    .collect()
            })
            .collect();
        let (lo, hi) = (l as f64, 2.0 * l as f64);
        let positions = raw
            .iter()
            .map(|ys| {
                let mut ys: Vec<f64> = ys
                    .iter()
                    .map(|&y| {
                        let mut y = y;
                        while y < lo {
                            y += 1.0;
                        }
                        while y >= hi {
                            y -= 1.0;
                        }
                        y
                    })
                    .collect();
                ys.sort_by(f64::total_cmp);
                ys
            })
            .collect();
        Self { l, raw, positions }
    }

    /// `⌊y⌉` (round half up) clamped into `I`, ascending per symbol.
    pub fn rounded(&self) -> Vec<Vec<State>> {
        let (lo, hi) = (self.l as f64, (2 * self.l - 1) as f64);
        self.raw
            .iter()
            .map(|ys| {
                let mut xs: Vec<State> = ys
                    .iter()
                    .map(|&y| (y + 0.5).floor().clamp(lo, hi) as State)
                    .collect();
                xs.sort_unstable();
                xs
            })
            .collect()
    }
}

/// Spread tuning with collision removal.
///
/// Each symbol claims its rounded preferred states. Symbols are served in descending
/// probability order (ties by alphabet order), each in ascending claim order. A
/// claim on a taken state moves to the nearest free state; on equal distance the
/// higher state wins.
pub fn tune_spread(dist: &SymbolDistribution) -> SymbolSpread {
    let l = dist.l();
    let prefs = PreferredPositions::compute(dist);
    let claims = prefs.rounded();
    let mut owner: Vec<Option<u16>> = vec![None; l as usize];
    for s in dist.by_descending_prob() {
        for &want in &claims[s] {
            let slot =
                nearest_free(&owner, (want - l) as usize).expect("exactly L claims for L states");
            owner[slot] = Some(s as u16);
        }
    }
    let assignment = owner
        .into_iter()
        .map(|o| o.expect("all states claimed"))
        .collect();
    SymbolSpread::from_assignment(dist.r(), dist.len(), assignment)
        .expect("claims match the counts")
}

fn nearest_free(owner: &[Option<u16>], at: usize) -> Option<usize> {
    if owner[at].is_none() {
        return Some(at);
    }
    for d in 1..owner.len() {
        if at + d < owner.len() && owner[at + d].is_none() {
            return Some(at + d);
        }
        if d <= at && owner[at - d].is_none() {
            return Some(at - d);
        }
    }
    None
}

/// Rank matching: sort all preferred positions and give the `i`-th smallest state to
/// the symbol of the `i`-th smallest position. Equal positions go to the
/// lower-probability symbol first, then alphabet order.
pub fn rank_match_spread(dist: &SymbolDistribution) -> SymbolSpread {
    let prefs = PreferredPositions::compute(dist);
    let mut labelled: Vec<(f64, usize)> = prefs
        .positions
        .iter()
        .enumerate()
        .flat_map(|(s, ys)| ys.iter().map(move |&y| (y, s)))
        .collect();
    labelled.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| dist.cmp_prob(a.1, b.1))
            .then(a.1.cmp(&b.1))
    });
    let assignment = labelled.into_iter().map(|(_, s)| s as u16).collect();
    SymbolSpread::from_assignment(dist.r(), dist.len(), assignment).expect("one position per state")
}

/// `d = Σ_s Σ_{x ∈ 𝕃_s} |x − y|`, pairing the `j`-th smallest state of `𝕃_s` with the
/// `j`-th smallest preferred position of `s`.
pub fn spread_distance(spread: &SymbolSpread, prefs: &PreferredPositions) -> Result<f64> {
    if spread.symbols() != prefs.positions.len() {
        return Err(Error::SpreadMismatch(format!(
            "{} symbols in spread, {} in preferences",
            spread.symbols(),
            prefs.positions.len()
        )));
    }
    let mut d = 0.0;
    for (s, ys) in prefs.positions.iter().enumerate() {
        let xs = spread.states(s);
        if xs.len() != ys.len() {
            return Err(Error::CardinalityMismatch {
                symbol: s,
                states: xs.len(),
                prefs: ys.len(),
            });
        }
        d += xs
            .iter()
            .zip(ys)
            .map(|(&x, &y)| (x as f64 - y).abs())
            .sum::<f64>();
    }
    Ok(d)
}
