//! Searching for low-redundancy spreads: greedy random swaps, exhaustive enumeration
//! for toy tables, and search over nearby count vectors.

mod bench;
mod evaluator;
mod exhaustive;
mod quantized;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

pub use bench::{bench_point, BenchRow, BENCH_CSV_HEADER};
pub use evaluator::{Kappa, FLOAT_KAPPA_TOLERANCE};
pub use exhaustive::{
    exhaustive_spreads, multinomial, Bucket, ExhaustiveConfig, ExhaustiveReport, DEFAULT_CAP,
    DEFAULT_EDGES,
};
pub use quantized::{quantized_search, QuantizedSearchMode};

pub(crate) use evaluator::Evaluator;

use crate::dist::SymbolDistribution;
use crate::error::{Error, Result};
use crate::markov::{evaluate, Arithmetic, RedundancyReport};
use crate::rng::SplitMix64;
use crate::spread::SymbolSpread;
use crate::tuning::{rank_match_spread, tune_spread};
use crate::State;

/// Smallest float improvement in `κ` accepted as a good swap. Smaller differences are
/// indistinguishable from elimination round-off.
pub const FLOAT_MIN_GAIN: f64 = 1e-13;

/// Exchanges the symbols of `x` and `y` and re-sorts the affected state sets.
pub fn swap_states(spread: &SymbolSpread, x: State, y: State) -> Result<SymbolSpread> {
    spread.swap(x, y)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitialSpread {
    /// Uniformly random, drawn from the search generator.
    Random,
    Tuned,
    Rank,
    Explicit(SymbolSpread),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    Minimize,
    Maximize,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Minimize => "min",
            Objective::Maximize => "max",
        })
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "min" | "minimize" => Ok(Objective::Minimize),
            "max" | "maximize" => Ok(Objective::Maximize),
            other => Err(format!("unknown objective {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Stop once `ΔH < threshold` (minimize) or `ΔH > threshold` (maximize).
    pub threshold: f64,
    /// Total number of drawn pairs `(x, y)`.
    pub max_iters: u64,
    pub seed: u64,
    pub init: InitialSpread,
    pub objective: Objective,
    /// Arithmetic for candidate evaluation. The final report always uses
    /// [`Arithmetic::default_for`] when probabilities are exact.
    pub arithmetic: Arithmetic,
    /// When false the threshold is ignored and exactly `max_iters` pairs are drawn.
    pub early_exit: bool,
}

impl SearchConfig {
    pub fn new(max_iters: u64, seed: u64) -> Self {
        Self {
            threshold: 0.0,
            max_iters,
            seed,
            init: InitialSpread::Random,
            objective: Objective::Minimize,
            arithmetic: Arithmetic::Floating,
            early_exit: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig(
                "at least one iteration is required".into(),
            ));
        }
        if self.threshold.is_nan() || self.threshold < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "threshold {} must be non-negative",
                self.threshold
            )));
        }
        Ok(())
    }

    fn reached(&self, delta_h: f64) -> bool {
        self.early_exit
            && match self.objective {
                Objective::Minimize => delta_h < self.threshold,
                Objective::Maximize => delta_h > self.threshold,
            }
    }
}

/// One good swap.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptedSwap {
    /// One-based index of the draw that produced it.
    pub iteration: u64,
    pub x: State,
    pub y: State,
    pub delta_h: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone)]
pub struct SearchTrace {
    pub initial_spread: SymbolSpread,
    /// `+∞` (minimize) or `−∞` (maximize) when the initial coder has no unique
    /// equilibrium.
    pub initial_delta_h: f64,
    pub accepted: Vec<AcceptedSwap>,
    pub iterations: u64,
    /// Draws where the two states carried different symbols.
    pub swaps_attempted: u64,
    pub singular: u64,
    pub wall_time: Duration,
    pub final_spread: SymbolSpread,
    /// `None` when no evaluated coder had a unique equilibrium.
    pub report: Option<RedundancyReport>,
}

impl SearchTrace {
    pub fn good_swaps(&self) -> usize {
        self.accepted.len()
    }

    pub fn final_delta_h(&self) -> f64 {
        self.accepted
            .last()
            .map_or(self.initial_delta_h, |a| a.delta_h)
    }
}

fn initial_spread(
    dist: &SymbolDistribution,
    init: &InitialSpread,
    rng: &mut SplitMix64,
) -> Result<SymbolSpread> {
    let spread = match init {
        InitialSpread::Random => SymbolSpread::random(dist, rng),
        InitialSpread::Tuned => tune_spread(dist),
        InitialSpread::Rank => rank_match_spread(dist),
        InitialSpread::Explicit(s) => s.clone(),
    };
    spread.check_against(dist)?;
    Ok(spread)
}

fn improves(objective: Objective, candidate: &Kappa, current: Option<&Kappa>) -> bool {
    let Some(current) = current else {
        return true;
    };
    match (candidate, current) {
        (Kappa::Exact(a), Kappa::Exact(b)) => match objective {
            Objective::Minimize => a < b,
            Objective::Maximize => a > b,
        },
        _ => {
            let (a, b) = (candidate.to_f64(), current.to_f64());
            match objective {
                Objective::Minimize => a < b - FLOAT_MIN_GAIN,
                Objective::Maximize => a > b + FLOAT_MIN_GAIN,
            }
        }
    }
}

/// Greedy random-swap search.
///
/// Sweeps `x` over `I`; for each `x` one partner `y` is drawn uniformly from `I`.
/// Pairs with equal symbols are skipped. Otherwise the swapped coder is evaluated and
/// kept only if it strictly improves `ΔH`; singular coders are rejected. Each draw
/// counts as one iteration.
pub fn swap_search(dist: &SymbolDistribution, cfg: &SearchConfig) -> Result<SearchTrace> {
    cfg.validate()?;
    let start = Instant::now();
    let mut rng = SplitMix64::new(cfg.seed);
    let mut spread = initial_spread(dist, &cfg.init, &mut rng)?;
    let initial = spread.clone();
    let mut eval = Evaluator::new(dist, cfg.arithmetic)?;
    let entropy = eval.entropy();
    let unsolved = match cfg.objective {
        Objective::Minimize => f64::INFINITY,
        Objective::Maximize => f64::NEG_INFINITY,
    };

    let mut current = match eval.kappa(&spread) {
        Ok(k) => Some(k),
        Err(Error::SingularSystem) => None,
        Err(e) => return Err(e),
    };
    let initial_delta_h = current.as_ref().map_or(unsolved, |k| k.to_f64() - entropy);
    let mut delta_h = initial_delta_h;
    let mut accepted = Vec::new();
    let (mut iterations, mut attempted, mut singular) = (0u64, 0u64, 0u64);
    let l = dist.l();

    'search: while iterations < cfg.max_iters && !cfg.reached(delta_h) {
        for x in l..2 * l {
            if iterations == cfg.max_iters {
                break 'search;
            }
            iterations += 1;
            let y = l + rng.below(l as u64) as State;
            if spread.symbol_at(x) == spread.symbol_at(y) {
                continue;
            }
            attempted += 1;
            spread.swap_in_place(x, y);
            match eval.kappa(&spread) {
                Ok(k) if improves(cfg.objective, &k, current.as_ref()) => {
                    delta_h = k.to_f64() - entropy;
                    accepted.push(AcceptedSwap {
                        iteration: iterations,
                        x,
                        y,
                        delta_h,
                        kappa: k.to_f64(),
                    });
                    current = Some(k);
                    if cfg.reached(delta_h) {
                        break 'search;
                    }
                }
                Ok(_) => spread.swap_in_place(x, y),
                Err(Error::SingularSystem) => {
                    singular += 1;
                    spread.swap_in_place(x, y);
                }
                Err(e) => return Err(e),
            }
        }
    }

    let report = if current.is_some() {
        let mode = if dist.exact_probs().is_some() {
            Arithmetic::default_for(l)
        } else {
            Arithmetic::Floating
        };
        Some(evaluate(dist, &spread, mode)?)
    } else {
        None
    };
    Ok(SearchTrace {
        initial_spread: initial,
        initial_delta_h,
        accepted,
        iterations,
        swaps_attempted: attempted,
        singular,
        wall_time: start.elapsed(),
        final_spread: spread,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn example() -> SymbolDistribution {
        SymbolDistribution::from_counts(vec!["1".into(), "2".into(), "3".into()], 4, vec![3, 5, 8])
            .unwrap()
    }

    fn worst() -> SymbolSpread {
        SymbolSpread::from_sets(
            4,
            &[vec![24, 25, 26], (27..32).collect(), (16..24).collect()],
        )
        .unwrap()
    }

    #[test]
    fn swap_reproduces_second_table() {
        let s = SymbolSpread::from_labels(4, &[3, 3, 1, 2, 2, 3, 1, 2, 3, 1, 2, 3, 2, 3, 3, 3])
            .unwrap();
        let t = swap_states(&s, 25, 28).unwrap();
        assert_eq!(t.to_string(), "3 3 1 2 2 3 1 2 3 2 2 3 1 3 3 3");
        assert!(swap_states(&s, 16, 17).is_err());
    }

    #[test]
    fn threshold_one_stops_immediately() {
        let mut cfg = SearchConfig::new(1000, 7);
        cfg.threshold = 1.0;
        let trace = swap_search(&example(), &cfg).unwrap();
        assert_eq!(trace.iterations, 0);
        assert!(trace.accepted.is_empty());
        assert_eq!(trace.final_spread, trace.initial_spread);
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = SearchConfig::new(2000, 42);
        let a = swap_search(&example(), &cfg).unwrap();
        let b = swap_search(&example(), &cfg).unwrap();
        assert_eq!(a.accepted, b.accepted);
        assert_eq!(a.final_spread, b.final_spread);
    }

    #[test]
    fn reaches_optimum_from_worst_start() {
        let mut cfg = SearchConfig::new(10_000, 3);
        cfg.init = InitialSpread::Explicit(worst());
        let trace = swap_search(&example(), &cfg).unwrap();
        let report = trace.report.unwrap();
        assert_eq!(
            report.kappa_exact.unwrap(),
            BigRational::new(3619.into(), 2448.into())
        );
        let deltas: Vec<f64> = trace.accepted.iter().map(|a| a.delta_h).collect();
        assert!(deltas.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn exact_and_float_agree_on_trace() {
        let mut cfg = SearchConfig::new(600, 11);
        cfg.init = InitialSpread::Explicit(worst());
        let float = swap_search(&example(), &cfg).unwrap();
        cfg.arithmetic = Arithmetic::Exact;
        let exact = swap_search(&example(), &cfg).unwrap();
        assert_eq!(float.final_spread, exact.final_spread);
        assert_eq!(float.good_swaps(), exact.good_swaps());
    }

    #[test]
    fn maximize_increases() {
        let mut cfg = SearchConfig::new(3000, 5);
        cfg.objective = Objective::Maximize;
        cfg.threshold = f64::INFINITY;
        let trace = swap_search(&example(), &cfg).unwrap();
        let deltas: Vec<f64> = trace.accepted.iter().map(|a| a.delta_h).collect();
        assert!(deltas.windows(2).all(|w| w[1] > w[0]));
        assert!(trace.final_delta_h() >= trace.initial_delta_h);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = SearchConfig::new(0, 1);
        assert!(matches!(
            swap_search(&example(), &cfg),
            Err(Error::InvalidConfig(_))
        ));
        let mut cfg = SearchConfig::new(10, 1);
        cfg.threshold = -1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn singular_start_is_recovered() {
        // Symbol 1 owning only the top states gives a reducible chain.
        let dist =
            SymbolDistribution::from_counts(vec!["a".into(), "b".into()], 2, vec![2, 2]).unwrap();
        let mut cfg = SearchConfig::new(400, 9);
        cfg.arithmetic = Arithmetic::Exact;
        for labels in [[1u16, 1, 2, 2], [2, 2, 1, 1], [1, 2, 1, 2], [2, 1, 2, 1]] {
            cfg.init = InitialSpread::Explicit(SymbolSpread::from_labels(2, &labels).unwrap());
            let trace = swap_search(&dist, &cfg).unwrap();
            if trace.initial_delta_h.is_infinite() {
                assert!(trace.report.is_some() || trace.accepted.is_empty());
            }
        }
    }
}
