//! Acceptance criteria, one test per criterion. Each prints a `PASS`/`FAIL` line with
//! the measured values before asserting.

use std::time::{Duration, Instant};

use anslab::dist::SymbolProbs;
use anslab::markov::{evaluate, simulate_empirical};
use anslab::optimize::{
    exhaustive_spreads, swap_search, ExhaustiveConfig, InitialSpread, Kappa, SearchConfig,
};
use anslab::rng::SplitMix64;
use anslab::tuning::{preferred_state, rank_match_spread, tune_spread};
use anslab::*;
use num_rational::BigRational;

fn verdict(n: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {n:>2} [{name}]: {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} failed: {detail}");
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn example_dist() -> SymbolDistribution {
    let p = SymbolProbs::from_ratios(&[(3, 16), (5, 16), (8, 16)]).unwrap();
    quantize(&p, 4, QuantizeMode::BestFit).unwrap()
}

fn example_spread() -> SymbolSpread {
    SymbolSpread::from_labels(4, &[3, 3, 1, 2, 2, 3, 1, 2, 3, 1, 2, 3, 2, 3, 3, 3]).unwrap()
}

fn swapped_spread() -> SymbolSpread {
    example_spread().swap(25, 28).unwrap()
}

#[test]
fn criterion_01_golden_encoding_table() {
    let start = Instant::now();
    let t = CodingTables::build(&example_dist(), &example_spread()).unwrap();
    let next: [[u32; 16]; 3] = [
        [
            22, 22, 22, 22, 25, 25, 25, 25, 18, 18, 18, 18, 18, 18, 18, 18,
        ],
        [
            26, 26, 28, 28, 19, 19, 19, 19, 20, 20, 20, 20, 23, 23, 23, 23,
        ],
        [
            16, 16, 17, 17, 21, 21, 24, 24, 27, 27, 29, 29, 30, 30, 31, 31,
        ],
    ];
    let bits: [[&str; 16]; 3] = [
        [
            "00", "01", "10", "11", "00", "01", "10", "11", "000", "001", "010", "011", "100",
            "101", "110", "111",
        ],
        [
            "0", "1", "0", "1", "00", "01", "10", "11", "00", "01", "10", "11", "00", "01", "10",
            "11",
        ],
        [
            "0", "1", "0", "1", "0", "1", "0", "1", "0", "1", "0", "1", "0", "1", "0", "1",
        ],
    ];
    let mut wrong = Vec::new();
    for s in 0..3 {
        for x in 16..32u32 {
            let (k, b, nx) = t.step(s, x);
            let got = if k == 0 {
                String::new()
            } else {
                format!("{b:0width$b}", width = k as usize)
            };
            let i = (x - 16) as usize;
            if nx != next[s][i] || got != bits[s][i] {
                wrong.push(format!("(s{}, {x})", s + 1));
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        1,
        "golden encoding table",
        wrong.is_empty() && elapsed < Duration::from_secs(1),
        &format!(
            "48 cells, {} mismatches {wrong:?}, {elapsed:?}",
            wrong.len()
        ),
    );
}

#[test]
fn criterion_02_exact_equilibrium() {
    let start = Instant::now();
    let first = [
        q(367, 4590),
        q(367, 4590),
        q(1933, 24480),
        q(1189, 14688),
        q(991, 14688),
        q(991, 14688),
        q(367, 6120),
        q(157, 2448),
        q(1519, 24480),
        q(1189, 24480),
        q(367, 7344),
        q(677, 12240),
        q(367, 7344),
        q(1933, 36720),
        q(157, 3060),
        q(157, 3060),
    ];
    let second = [
        q(3071, 38400),
        q(3071, 38400),
        q(8077, 102400),
        q(4981, 61440),
        q(4177, 61440),
        q(4177, 61440),
        q(3071, 51200),
        q(65, 1024),
        q(6321, 102400),
        q(3071, 61440),
        q(3071, 61440),
        q(17159, 307200),
        q(4981, 102400),
        q(5419, 102400),
        q(13, 256),
        q(13, 256),
    ];
    let dist = example_dist();
    let mut ok = true;
    for (spread, want) in [(example_spread(), &first), (swapped_spread(), &second)] {
        let t = CodingTables::build(&dist, &spread).unwrap();
        let sys = build_transition_system(&t, &dist);
        let eq = solve_equilibrium(&sys, Arithmetic::Exact).unwrap();
        ok &= eq.exact().unwrap() == want.as_slice();
    }
    let elapsed = start.elapsed();
    verdict(
        2,
        "exact equilibrium",
        ok && elapsed < Duration::from_secs(1),
        &format!("both 16-fraction vectors reproduced: {ok}, {elapsed:?}"),
    );
}

#[test]
fn criterion_03_redundancy() {
    let dist = example_dist();
    let tol = 1e-9;
    let mut lines = Vec::new();
    let mut ok = true;
    for (spread, kappa, dh) in [
        (example_spread(), 1.4790168845, 0.0017998831),
        (swapped_spread(), 1.4789314193, 0.0017144179),
    ] {
        let f = evaluate(&dist, &spread, Arithmetic::Floating).unwrap();
        let e = evaluate(&dist, &spread, Arithmetic::Exact).unwrap();
        let exact_kappa = e.kappa_exact.clone().unwrap();
        let per: BigRational = e
            .per_symbol_exact
            .as_ref()
            .unwrap()
            .iter()
            .zip(dist.exact_probs().unwrap())
            .map(|(k, p)| k * p)
            .sum();
        ok &= (f.kappa - kappa).abs() <= tol
            && (f.entropy - 1.4772170014).abs() <= tol
            && (f.delta_h - dh).abs() <= tol
            && (e.kappa - kappa).abs() <= tol
            && per == exact_kappa;
        lines.push(format!(
            "κ={:.10} ({exact_kappa}) H={:.10} ΔH={:.10}",
            f.kappa, f.entropy, f.delta_h
        ));
    }
    verdict(3, "redundancy", ok, &lines.join("; "));
}

#[test]
fn criterion_04_tuning() {
    let dist = example_dist();
    let tuned = evaluate(&dist, &tune_spread(&dist), Arithmetic::Exact).unwrap();
    let ranked = evaluate(&dist, &rank_match_spread(&dist), Arithmetic::Exact).unwrap();
    let p = 3.0 / 16.0;
    let prefs = [
        preferred_state(p, 16, 4).unwrap(),
        preferred_state(p, 20, 4).unwrap(),
        preferred_state(p, 24, 8).unwrap(),
    ];
    let prefs_ok = prefs
        .iter()
        .zip([22.56, 27.91, 17.86])
        .all(|(a, b)| (a - b).abs() <= 0.01);
    let tk = tuned.kappa_exact.unwrap();
    let rk = ranked.kappa_exact.unwrap();
    verdict(
        4,
        "tuning",
        tk == q(3619, 2448) && rk == q(230755, 156048) && prefs_ok,
        &format!("tuned κ={tk}, rank-matched κ={rk}, preferred {prefs:.2?}"),
    );
}

#[test]
fn criterion_05_exhaustive_case_study() {
    let start = Instant::now();
    let r = exhaustive_spreads(&example_dist(), &ExhaustiveConfig::default()).unwrap();
    let elapsed = start.elapsed();
    let min = r.min.as_ref().unwrap();
    let max = r.max.as_ref().unwrap();
    let counts: Vec<u64> = r.buckets.iter().map(|b| b.count).collect();
    let ok = r.total == 720_720
        && min.kappa == Kappa::Exact(q(3619, 2448))
        && min.count == 30_240
        && max.kappa == Kappa::Exact(q(97, 64))
        && max.count == 56
        && r.failures == 5_040
        && counts == [86_560, 483_360, 66_896, 48_568];
    verdict(
        5,
        "exhaustive enumeration",
        ok,
        &format!(
            "total {} min {}×{} max {}×{} failures {} buckets {counts:?}, {elapsed:?}",
            r.total, min.kappa, min.count, max.kappa, max.count, r.failures
        ),
    );
}

#[test]
fn criterion_06_swap_search_convergence() {
    let dist = example_dist();
    let worst = SymbolSpread::from_sets(
        4,
        &[vec![24, 25, 26], (27..32).collect(), (16..24).collect()],
    )
    .unwrap();
    let target = q(3619, 2448);
    let (mut hits, mut lo, mut hi) = (0, usize::MAX, 0);
    for seed in 0..100 {
        let mut cfg = SearchConfig::new(10_000, seed);
        cfg.init = InitialSpread::Explicit(worst.clone());
        cfg.arithmetic = Arithmetic::Exact;
        let trace = swap_search(&dist, &cfg).unwrap();
        if trace.report.and_then(|r| r.kappa_exact) == Some(target.clone()) {
            hits += 1;
        }
        lo = lo.min(trace.accepted.len());
        hi = hi.max(trace.accepted.len());
    }
    verdict(
        6,
        "swap search convergence",
        hits == 100 && lo >= 4 && hi <= 30,
        &format!("{hits}/100 reached 3619/2448, good swaps in [{lo}, {hi}]"),
    );
}

/// A random dyadic distribution: repeatedly halve a random symbol.
fn random_dyadic(rng: &mut SplitMix64) -> (Vec<u32>, u32) {
    let symbols = 2 + rng.below(7) as usize;
    let mut depths = vec![0u32];
    while depths.len() < symbols {
        let i = rng.below(depths.len() as u64) as usize;
        depths[i] += 1;
        let d = depths[i];
        depths.push(d);
    }
    let r = depths.iter().copied().max().unwrap() + rng.below(3) as u32;
    (depths, r)
}

#[test]
fn criterion_07_dyadic_optimality() {
    let mut rng = SplitMix64::new(7);
    let (mut spreads, mut bad) = (0, Vec::new());
    for case in 0..20 {
        let (depths, r) = random_dyadic(&mut rng);
        let ratios: Vec<(i64, i64)> = depths.iter().map(|&d| (1, 1i64 << d)).collect();
        let probs = SymbolProbs::from_ratios(&ratios).unwrap();
        let dist = quantize(&probs, r, QuantizeMode::BestFit).unwrap();
        for _ in 0..20 {
            let spread = SymbolSpread::random(&dist, &mut rng);
            let report = evaluate(&dist, &spread, Arithmetic::Exact).unwrap();
            let tables = CodingTables::build(&dist, &spread).unwrap();
            let constant = (0..dist.len())
                .all(|s| (dist.l()..2 * dist.l()).all(|x| tables.k(s, x) == depths[s]));
            let entropy: BigRational = ratios
                .iter()
                .zip(&depths)
                .map(|(&(n, d), &k)| q(n, d) * BigRational::from_integer(k.into()))
                .sum();
            if report.kappa_exact.as_ref() != Some(&entropy) || !constant || report.delta_h != 0.0 {
                bad.push(case);
            }
            spreads += 1;
        }
    }
    verdict(
        7,
        "dyadic optimality",
        bad.is_empty(),
        &format!("{spreads} random spreads over 20 dyadic sources, failing cases {bad:?}"),
    );
}

#[test]
fn criterion_08_monte_carlo_oracle() {
    let dist = example_dist();
    let mut rng = SplitMix64::new(8);
    let (mut checked, mut worst) = (0, 0.0f64);
    while checked < 10 {
        let spread = SymbolSpread::random(&dist, &mut rng);
        let tables = CodingTables::build(&dist, &spread).unwrap();
        let sys = build_transition_system(&tables, &dist);
        let Ok(eq) = solve_equilibrium(&sys, Arithmetic::Exact) else {
            continue;
        };
        let mc = simulate_empirical(&tables, &dist, 10_000_000, rng.next_u64());
        let err = eq
            .probs()
            .iter()
            .zip(mc.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(err);
        checked += 1;
    }
    verdict(
        8,
        "Monte-Carlo oracle",
        worst <= 5e-4,
        &format!("10 spreads, worst max-abs error {worst:.2e}"),
    );
}

#[test]
fn criterion_09_trend_at_128_states() {
    let probs = SymbolProbs::from_ratios(&[(3, 16), (5, 16), (8, 16)]).unwrap();
    let dist = quantize(&probs, 7, QuantizeMode::BestFit).unwrap();
    let reference = 1.577e-5;
    let start = Instant::now();
    let mut within = 0;
    let mut monotone = true;
    let mut values = Vec::new();
    for seed in 0..10 {
        let trace = swap_search(&dist, &SearchConfig::new(100_000, seed)).unwrap();
        let dh = trace.final_delta_h();
        values.push(format!("{dh:.4e}"));
        if (0.5 * reference..=2.0 * reference).contains(&dh) {
            within += 1;
        }
        let deltas: Vec<f64> = std::iter::once(trace.initial_delta_h)
            .chain(trace.accepted.iter().map(|a| a.delta_h))
            .collect();
        monotone &= deltas.windows(2).all(|w| w[1] < w[0]);
    }
    let elapsed = start.elapsed();
    verdict(
        9,
        "trend at L=128",
        within >= 8 && monotone && elapsed < Duration::from_secs(15 * 60),
        &format!("{within}/10 seeds within [0.5×, 2×] of 1.577e-5, monotone {monotone}, ΔH_min [{}], {elapsed:?}", values.join(", ")),
    );
}

#[test]
fn criterion_10_roundtrip_fuzz() {
    let mut rng = SplitMix64::new(10);
    let (mut cases, mut roundtrip_fail, mut bound_fail) = (0, 0, 0);
    let mut worst_excess = 0.0f64;
    while cases < 1000 {
        let symbols = 2 + rng.below(7) as usize;
        let r = 3 + rng.below(8) as u32;
        if (1usize << r) < symbols {
            continue;
        }
        let raw: Vec<u64> = (0..symbols).map(|_| 1 + rng.below(100)).collect();
        let names = (0..symbols).map(|i| i.to_string()).collect();
        let probs = SymbolProbs::from_counts(names, &raw).unwrap();
        let dist = quantize(&probs, r, QuantizeMode::BestFit).unwrap();
        let spread = SymbolSpread::random(&dist, &mut rng);
        let Ok(report) = evaluate(&dist, &spread, Arithmetic::Floating) else {
            continue;
        };
        cases += 1;
        let tables = CodingTables::build(&dist, &spread).unwrap();
        let len = 1 + rng.below(4096) as usize;
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        for &p in probs.probs() {
            acc += p;
            cumulative.push(acc);
        }
        let symbols_drawn: Vec<usize> = (0..len)
            .map(|_| {
                let u = rng.next_f64();
                cumulative.partition_point(|&c| c <= u).min(symbols - 1)
            })
            .collect();
        let frame = SymbolFrame::new(symbols_drawn);
        let x0 = dist.l() + rng.below(dist.l() as u64) as u32;
        let out = encode(&frame, &tables, x0).unwrap();
        if decode(&out, &tables, len as u64).ok().as_ref() != Some(&frame) {
            roundtrip_fail += 1;
        }
        let bits = out.bit_len as f64;
        let l = len as f64;
        let upper = l * (report.kappa + 0.01);
        if bits < l * report.entropy - 64.0 || bits > upper {
            bound_fail += 1;
            worst_excess = worst_excess.max(bits - upper);
        }
    }
    verdict(
        10,
        "round-trip fuzz",
        roundtrip_fail == 0 && bound_fail == 0,
        &format!(
            "{cases} cases, {roundtrip_fail} round-trip failures, {bound_fail} outside [ℓH−64, ℓ(κ+0.01)] (worst excess {worst_excess:.1} bits)"
        ),
    );
}
