use std::time::Duration;

use super::{swap_search, InitialSpread, Objective, SearchConfig};
use crate::dist::{quantize, QuantizeMode, SymbolProbs};
use crate::error::Result;
use crate::markov::Arithmetic;

pub const BENCH_CSV_HEADER: &str =
    "r,l,seed,iters,delta_h_min,good_swaps_min,seconds_min,delta_h_max,good_swaps_max,seconds_max";

/// One `(R, seed)` measurement: a minimizing and a maximizing run from the same
/// random start.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub r: u32,
    pub l: u32,
    pub seed: u64,
    pub iters: u64,
    pub delta_h_min: f64,
    pub good_swaps_min: usize,
    pub time_min: Duration,
    pub delta_h_max: f64,
    pub good_swaps_max: usize,
    pub time_max: Duration,
}

impl BenchRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{:e},{},{:.3},{:e},{},{:.3}",
            self.r,
            self.l,
            self.seed,
            self.iters,
            self.delta_h_min,
            self.good_swaps_min,
            self.time_min.as_secs_f64(),
            self.delta_h_max,
            self.good_swaps_max,
            self.time_max.as_secs_f64()
        )
    }
}

/// Quantizes with best fit, then runs a minimizing and a maximizing search of
/// `iters` draws each in floating arithmetic.
pub fn bench_point(probs: &SymbolProbs, r: u32, iters: u64, seed: u64) -> Result<BenchRow> {
    let dist = quantize(probs, r, QuantizeMode::BestFit)?;
    let mut cfg = SearchConfig::new(iters, seed);
    cfg.init = InitialSpread::Random;
    cfg.arithmetic = Arithmetic::Floating;
    let min = swap_search(&dist, &cfg)?;
    cfg.objective = Objective::Maximize;
    cfg.threshold = f64::INFINITY;
    let max = swap_search(&dist, &cfg)?;
    Ok(BenchRow {
        r,
        l: dist.l(),
        seed,
        iters,
        delta_h_min: min.final_delta_h(),
        good_swaps_min: min.good_swaps(),
        time_min: min.wall_time,
        delta_h_max: max.final_delta_h(),
        good_swaps_max: max.good_swaps(),
        time_max: max.wall_time,
    })
}
