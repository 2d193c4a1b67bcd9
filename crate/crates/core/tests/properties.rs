use anslab::dist::SymbolProbs;
use anslab::rng::SplitMix64;
use anslab::tables::bit_count;
use anslab::tuning::partition_intervals;
use anslab::*;
use proptest::prelude::*;

/// A random coder: counts summing to `L = 2^r` and a seeded random spread.
fn coder() -> impl Strategy<Value = (SymbolDistribution, SymbolSpread)> {
    (2u32..=8, 2usize..=6, any::<u64>()).prop_filter_map("alphabet fits", |(r, n, seed)| {
        let l = 1u32 << r;
        if n as u32 > l {
            return None;
        }
        let mut rng = SplitMix64::new(seed);
        let mut counts = vec![1u32; n];
        for _ in 0..l - n as u32 {
            counts[rng.below(n as u64) as usize] += 1;
        }
        let names = (0..n).map(|i| format!("s{i}")).collect();
        let dist = SymbolDistribution::from_counts(names, r, counts).ok()?;
        let spread = SymbolSpread::random(&dist, &mut rng);
        Some((dist, spread))
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 200,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn roundtrip((dist, spread) in coder(), frame_seed in any::<u64>(), len in 0usize..600) {
        let tables = CodingTables::build(&dist, &spread).unwrap();
        let mut rng = SplitMix64::new(frame_seed);
        let frame = SymbolFrame::new(
            (0..len).map(|_| rng.below(dist.len() as u64) as usize).collect(),
        );
        let x0 = dist.l() + rng.below(dist.l() as u64) as u32;
        let out = encode(&frame, &tables, x0).unwrap();
        prop_assert_eq!(out.payload.len() as u64, out.bit_len.div_ceil(8));
        prop_assert_eq!(decode(&out, &tables, len as u64).unwrap(), frame);
    }

    #[test]
    fn coding_function_is_a_bijection((dist, spread) in coder()) {
        let tables = CodingTables::build(&dist, &spread).unwrap();
        let l = dist.l();
        let mut hit = vec![false; l as usize];
        for s in 0..dist.len() {
            let ls = dist.count(s);
            for y in ls..2 * ls {
                let x = tables.coding(s, y);
                prop_assert!(!hit[(x - l) as usize]);
                hit[(x - l) as usize] = true;
                let d = tables.decode_entry(x);
                prop_assert_eq!((d.symbol as usize, d.y), (s, y));
            }
        }
        prop_assert!(hit.iter().all(|&h| h));
    }

    #[test]
    fn bit_length_law((dist, spread) in coder()) {
        let tables = CodingTables::build(&dist, &spread).unwrap();
        let l = dist.l();
        for s in 0..dist.len() {
            let ls = dist.count(s);
            for x in l..2 * l {
                let (k, bits, next) = tables.step(s, x);
                prop_assert_eq!(k, bit_count(x, ls));
                let y = x >> k;
                prop_assert!((ls..2 * ls).contains(&y));
                // The decoder reads back exactly k bits and restores x.
                let d = tables.decode_entry(next);
                prop_assert_eq!(d.y, y);
                prop_assert_eq!(tables.read_count(d.y), k);
                prop_assert_eq!((d.y << k) | bits, x);
            }
        }
    }

    #[test]
    fn intervals_partition_the_states((dist, _) in coder()) {
        let l = dist.l();
        for s in 0..dist.len() {
            let part = partition_intervals(&dist, s);
            prop_assert_eq!(part.intervals.len() as u32, dist.count(s));
            let mut next = l;
            for iv in &part.intervals {
                prop_assert_eq!(iv.start, next);
                prop_assert!(iv.len.is_power_of_two());
                prop_assert_eq!(iv.len, 1 << iv.k);
                next = iv.end() + 1;
            }
            prop_assert_eq!(next, 2 * l);
        }
    }

    #[test]
    fn equilibrium_is_stationary((dist, spread) in coder()) {
        let tables = CodingTables::build(&dist, &spread).unwrap();
        let sys = build_transition_system(&tables, &dist);
        let Ok(eq) = solve_equilibrium(&sys, Arithmetic::Floating) else {
            return Ok(());
        };
        let l = dist.l();
        let mut pushed = vec![0.0; l as usize];
        for x in l..2 * l {
            for s in 0..dist.len() {
                let next = tables.entry(s, x).next;
                pushed[(next - l) as usize] += dist.prob(s) * eq.prob(x);
            }
        }
        let sum: f64 = eq.probs().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
        for (a, b) in pushed.iter().zip(eq.probs()) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn swap_is_an_involution((dist, spread) in coder(), seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let l = dist.l();
        let x = l + rng.below(l as u64) as u32;
        let y = l + rng.below(l as u64) as u32;
        if spread.symbol_at(x) == spread.symbol_at(y) {
            prop_assert!(spread.swap(x, y).is_err());
        } else {
            let swapped = spread.swap(x, y).unwrap();
            swapped.check_against(&dist).unwrap();
            prop_assert_eq!(swapped.swap(x, y).unwrap(), spread);
        }
    }
}

/// Random counts over `n` symbols summing to `2^r`.
fn random_dist(rng: &mut SplitMix64, r: u32, n: usize) -> SymbolDistribution {
    let mut counts = vec![1u32; n];
    for _ in 0..(1u32 << r) - n as u32 {
        counts[rng.below(n as u64) as usize] += 1;
    }
    let names = (0..n).map(|i| format!("s{i}")).collect();
    SymbolDistribution::from_counts(names, r, counts).unwrap()
}

#[test]
fn exact_and_float_solves_agree() {
    let mut rng = SplitMix64::new(5);
    let mut compared = 0;
    while compared < 20_000 {
        let n = 2 + rng.below(5) as usize;
        let dist = random_dist(&mut rng, 4, n);
        let spread = SymbolSpread::random(&dist, &mut rng);
        let tables = CodingTables::build(&dist, &spread).unwrap();
        let sys = build_transition_system(&tables, &dist);
        let (Ok(e), Ok(f)) = (
            solve_equilibrium(&sys, Arithmetic::Exact),
            solve_equilibrium(&sys, Arithmetic::Floating),
        ) else {
            continue;
        };
        compared += 1;
        for (a, b) in e.probs().iter().zip(f.probs()) {
            assert!((a - b).abs() < 1e-10, "{spread}");
        }
    }
}

#[test]
fn redundancy_is_never_negative() {
    let mut rng = SplitMix64::new(6);
    let mut checked = 0;
    let mut lowest = f64::INFINITY;
    while checked < 10_000 {
        let r = 2 + rng.below(5) as u32;
        let n = 2 + rng.below(((1u64 << r) - 1).min(6)) as usize;
        let dist = random_dist(&mut rng, r, n);
        let spread = SymbolSpread::random(&dist, &mut rng);
        if let Ok(report) = markov::evaluate(&dist, &spread, Arithmetic::Floating) {
            checked += 1;
            lowest = lowest.min(report.delta_h);
        }
    }
    println!("lowest ΔH over {checked} spreads: {lowest:e}");
    assert!(lowest >= -1e-12);
}

#[test]
fn tuned_spreads_follow_the_inverse_state_law() {
    let p = SymbolProbs::from_ratios(&[(1, 10), (2, 10), (3, 10), (4, 10)]).unwrap();
    let dist = quantize(&p, 10, QuantizeMode::BestFit).unwrap();
    for spread in [tuning::tune_spread(&dist), tuning::rank_match_spread(&dist)] {
        let tables = CodingTables::build(&dist, &spread).unwrap();
        let eq = solve_equilibrium(
            &build_transition_system(&tables, &dist),
            Arithmetic::Floating,
        )
        .unwrap();
        let l = dist.l();
        let l1: f64 = (l..2 * l)
            .map(|x| (eq.prob(x) - std::f64::consts::LOG2_E / x as f64).abs())
            .sum();
        println!(
            "L=1024: Σ|p_x − log2(e)/x| = {l1:.4e}, divided by L {:.4e}",
            l1 / l as f64
        );
        assert!(l1 <= 0.01);
    }
}

/// Kullback–Leibler divergence of the quantized distribution, the quantity the best-fit
/// rule approximately minimizes.
fn divergence(p: &[f64], counts: &[u32], l: u32) -> f64 {
    p.iter()
        .zip(counts)
        .map(|(&p, &c)| p * (p * l as f64 / c as f64).log2())
        .sum()
}

#[test]
fn best_fit_matches_brute_force_on_small_cases() {
    let p = SymbolProbs::from_f64(
        vec!["a".into(), "b".into(), "c".into(), "d".into()],
        vec![0.40, 0.35, 0.20, 0.05],
    )
    .unwrap();
    let d = quantize(&p, 4, QuantizeMode::BestFit).unwrap();
    let mut best: Option<(f64, Vec<u32>)> = None;
    for a in 1..16u32 {
        for b in 1..16 {
            for c in 1..16 {
                if a + b + c >= 16 {
                    continue;
                }
                let counts = vec![a, b, c, 16 - a - b - c];
                let kl = divergence(p.probs(), &counts, 16);
                if best.as_ref().is_none_or(|(v, _)| kl < *v) {
                    best = Some((kl, counts));
                }
            }
        }
    }
    assert_eq!(best.unwrap().1, vec![6, 6, 3, 1]);
    assert_eq!(d.counts(), &[6, 6, 3, 1]);
}
