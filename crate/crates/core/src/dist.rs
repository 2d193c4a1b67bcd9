//! Symbol statistics and their quantization to integer state counts.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const FLOAT_SUM_TOLERANCE: f64 = 1e-12;

/// Largest supported table exponent. States are stored as `u32` and the state set
/// `{L, …, 2L−1}` must fit.
pub const MAX_R: u32 = 24;

/// Source probabilities over a named alphabet, before quantization.
///
/// Probabilities are always available as `f64`; when they came from exact text
/// (`3/16`, `0.35`) or integer counts they are also kept as rationals, which is what
/// exact-mode equilibrium solving needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolProbs {
    names: Vec<String>,
    float: Vec<f64>,
    exact: Option<Vec<BigRational>>,
}

impl SymbolProbs {
    pub fn from_rationals(names: Vec<String>, probs: Vec<BigRational>) -> Result<Self> {
        check_alphabet(&names, probs.len())?;
        if let Some(bad) = probs.iter().find(|p| !p.is_positive()) {
            return Err(Error::InvalidDistribution(format!(
                "probability {bad} is not positive"
            )));
        }
        let sum: BigRational = probs.iter().sum();
        if !sum.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        let float = probs.iter().map(rational_to_f64).collect();
        Ok(Self {
            names,
            float,
            exact: Some(probs),
        })
    }

    pub fn from_f64(names: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        check_alphabet(&names, probs.len())?;
        if let Some(bad) = probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::InvalidDistribution(format!(
                "probability {bad} is not positive"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > FLOAT_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        Ok(Self {
            names,
            float: probs,
            exact: None,
        })
    }

    /// Normalizes raw occurrence counts into exact probabilities.
    pub fn from_counts(names: Vec<String>, counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidDistribution("all counts are zero".into()));
        }
        let probs = counts
            .iter()
            .map(|&c| BigRational::new(BigInt::from(c), BigInt::from(total)))
            .collect();
        Self::from_rationals(names, probs)
    }

    /// Exact probabilities given as `(numerator, denominator)` pairs, with symbols
    /// named `1, 2, …`.
    pub fn from_ratios(ratios: &[(i64, i64)]) -> Result<Self> {
        let names = (1..=ratios.len()).map(|i| i.to_string()).collect();
        let probs = ratios
            .iter()
            .map(|&(n, d)| {
                if d == 0 {
                    Err(Error::InvalidDistribution("zero denominator".into()))
                } else {
                    Ok(BigRational::new(n.into(), d.into()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rationals(names, probs)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn probs(&self) -> &[f64] {
        &self.float
    }

    pub fn exact(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.float)
    }
}

fn check_alphabet(names: &[String], probs: usize) -> Result<()> {
    if names.len() != probs {
        return Err(Error::InvalidDistribution(format!(
            "{} names for {} probabilities",
            names.len(),
            probs
        )));
    }
    if names.len() < 2 {
        return Err(Error::InvalidDistribution(
            "at least two symbols are required".into(),
        ));
    }
    let mut sorted: Vec<&String> = names.iter().collect();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidDistribution(format!(
            "duplicate symbol {:?}",
            w[0]
        )));
    }
    Ok(())
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Shannon entropy in bits of a probability vector.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .map(|&p| -p * (p.ln() / std::f64::consts::LN_2))
        .sum()
}

/// Symbol probabilities together with the state counts `L_s` for `L = 2^R` states.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolDistribution {
    probs: SymbolProbs,
    r: u32,
    counts: Vec<u32>,
}

/// How [`quantize`] picks the counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuantizeMode {
    /// Tail rule plus largest-remainder allocation.
    BestFit,
    /// Caller-supplied counts, validated against the invariants.
    GivenCounts(Vec<u32>),
}

impl SymbolDistribution {
    /// Builds a distribution from already chosen counts.
    pub fn new(probs: SymbolProbs, r: u32, counts: Vec<u32>) -> Result<Self> {
        let l = state_count(r)?;
        if probs.len() > l as usize {
            return Err(Error::AlphabetTooLarge {
                symbols: probs.len(),
                states: l as usize,
            });
        }
        if counts.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} counts for {} symbols",
                counts.len(),
                probs.len()
            )));
        }
        if counts.contains(&0) {
            return Err(Error::InvalidDistribution(
                "every symbol needs at least one state".into(),
            ));
        }
        let total: u64 = counts.iter().map(|&c| c as u64).sum();
        if total != l as u64 {
            return Err(Error::InvalidDistribution(format!(
                "counts sum to {total}, expected L={l}"
            )));
        }
        Ok(Self { probs, r, counts })
    }

    /// The exactly quantized case `p_s = L_s / L`.
    pub fn from_counts(names: Vec<String>, r: u32, counts: Vec<u32>) -> Result<Self> {
        let wide: Vec<u64> = counts.iter().map(|&c| c as u64).collect();
        let probs = SymbolProbs::from_counts(names, &wide)?;
        Self::new(probs, r, counts)
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Number of states `L = 2^R`.
    pub fn l(&self) -> u32 {
        1 << self.r
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn count(&self, s: usize) -> u32 {
        self.counts[s]
    }

    pub fn names(&self) -> &[String] {
        self.probs.names()
    }

    pub fn probs(&self) -> &[f64] {
        self.probs.probs()
    }

    pub fn prob(&self, s: usize) -> f64 {
        self.probs.probs()[s]
    }

    pub fn exact_probs(&self) -> Option<&[BigRational]> {
        self.probs.exact()
    }

    pub fn source(&self) -> &SymbolProbs {
        &self.probs
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.names().iter().position(|n| n == name)
    }

    /// `H(S)` in bits per symbol.
    pub fn entropy(&self) -> f64 {
        self.probs.entropy()
    }

    /// Symbol indices ordered by descending probability, ties by alphabet order.
    pub fn by_descending_prob(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.cmp_prob(b, a).then(a.cmp(&b)));
        order
    }

    pub(crate) fn cmp_prob(&self, a: usize, b: usize) -> Ordering {
        match self.probs.exact() {
            Some(exact) => exact[a].cmp(&exact[b]),
            None => self.prob(a).total_cmp(&self.prob(b)),
        }
    }
}

/// `L = 2^R`, checking `1 ≤ R ≤ MAX_R`.
pub fn state_count(r: u32) -> Result<u32> {
    if r == 0 || r > MAX_R {
        return Err(Error::InvalidExponent(r));
    }
    Ok(1 << r)
}

/// Chooses integer state counts `L_s` for `L = 2^R` states.
///
/// Best fit gives every symbol with `p_s·L < 1` a single state, every other symbol
/// `⌊p_s·L⌋` states, and hands out the remaining states one at a time in descending
/// order of the fractional part `p_s·L − ⌊p_s·L⌋` (ties: higher probability, then
/// alphabet order). When the tail over-commits the table, states are taken back from
/// the symbol whose count most exceeds `p_s·L` (ties: lower probability, then
/// alphabet order), never dropping a count below one.
pub fn quantize(probs: &SymbolProbs, r: u32, mode: QuantizeMode) -> Result<SymbolDistribution> {
    let l = state_count(r)?;
    if probs.len() > l as usize {
        return Err(Error::AlphabetTooLarge {
            symbols: probs.len(),
            states: l as usize,
        });
    }
    let counts = match mode {
        QuantizeMode::GivenCounts(counts) => counts,
        QuantizeMode::BestFit => best_fit_counts(probs, l),
    };
    SymbolDistribution::new(probs.clone(), r, counts)
}

fn best_fit_counts(probs: &SymbolProbs, l: u32) -> Vec<u32> {
    let lf = l as f64;
    // Scaling by a power of two is exact in binary floating point.
    let target: Vec<f64> = probs.probs().iter().map(|&p| p * lf).collect();
    let tail: Vec<bool> = target.iter().map(|&t| t < 1.0).collect();
    let mut counts: Vec<u32> = target
        .iter()
        .map(|&t| if t < 1.0 { 1 } else { t.floor() as u32 })
        .collect();
    let mut total: i64 = counts.iter().map(|&c| c as i64).sum();

    if total < l as i64 {
        let mut order: Vec<usize> = (0..counts.len()).filter(|&s| !tail[s]).collect();
        let cmp_prob = |a: usize, b: usize| match probs.exact() {
            Some(exact) => exact[a].cmp(&exact[b]),
            None => target[a].total_cmp(&target[b]),
        };
        order.sort_by(|&a, &b| {
            let fa = target[a] - target[a].floor();
            let fb = target[b] - target[b].floor();
            fb.total_cmp(&fa).then(cmp_prob(b, a)).then(a.cmp(&b))
        });
        for s in order.into_iter().cycle() {
            if total == l as i64 {
                break;
            }
            counts[s] += 1;
            total += 1;
        }
    }
    while total > l as i64 {
        let victim = (0..counts.len())
            .filter(|&s| counts[s] > 1)
            .max_by(|&a, &b| {
                let ea = counts[a] as f64 - target[a];
                let eb = counts[b] as f64 - target[b];
                ea.total_cmp(&eb)
                    .then(target[b].total_cmp(&target[a]))
                    .then(b.cmp(&a))
            })
            .expect("alphabet fits into L, so some count exceeds one");
        counts[victim] -= 1;
        total -= 1;
    }
    counts
}

/// Least common multiple of the denominators of exact probabilities.
pub(crate) fn common_denominator(probs: &[BigRational]) -> BigInt {
    use num_integer::Integer;
    probs
        .iter()
        .fold(BigInt::one(), |acc, p| acc.lcm(p.denom()))
}

/// Parses a probability written as a decimal (`0.35`), a fraction (`3/16`) or an
/// integer, exactly.
pub fn parse_exact(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a number: {text:?}"));
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (text, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    })
}
