use super::solve::EquilibriumDistribution;
use super::Arithmetic;
use crate::dist::SymbolDistribution;
use crate::rng::SplitMix64;
use crate::tables::CodingTables;

/// Steps discarded before counting visits.
pub const BURN_IN: u64 = 1_000;

/// Monte-Carlo estimate of the stationary distribution.
///
/// Encodes an i.i.d. symbol stream drawn from the source probabilities, starting at
/// `x = L`, and returns the visit frequency of each state over `steps` counted steps
/// after a burn-in of [`BURN_IN`]. Deterministic in `(steps, seed)`.
pub fn simulate_empirical(
    tables: &CodingTables,
    dist: &SymbolDistribution,
    steps: u64,
    seed: u64,
) -> EquilibriumDistribution {
    let l = tables.l();
    let mut cumulative = Vec::with_capacity(dist.len());
    let mut acc = 0.0;
    for &p in dist.probs() {
        acc += p;
        cumulative.push(acc);
    }
    let last = cumulative.len() - 1;
    let mut rng = SplitMix64::new(seed);
    let mut visits = vec![0u64; l as usize];
    let mut x = l;
    for step in 0..BURN_IN + steps {
        if step >= BURN_IN {
            visits[(x - l) as usize] += 1;
        }
        let u = rng.next_f64();
        let s = cumulative.partition_point(|&c| c <= u).min(last);
        x = tables.entry(s, x).next;
    }
    let total = steps.max(1) as f64;
    EquilibriumDistribution::from_float(
        Arithmetic::Floating,
        visits.into_iter().map(|v| v as f64 / total).collect(),
    )
}
