use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use rayon::prelude::*;

use super::evaluator::{Evaluator, Kappa};
use crate::dist::SymbolDistribution;
use crate::error::{Error, Result};
use crate::markov::Arithmetic;
use crate::spread::SymbolSpread;

pub const DEFAULT_CAP: u128 = 1_000_000;

/// Histogram edges as fractions: 1.48, 1.49, 1.5.
pub const DEFAULT_EDGES: [(i64, i64); 3] = [(148, 100), (149, 100), (150, 100)];

/// Float values this close to an edge or to the running extremes are re-solved
/// exactly in exact mode.
const SCREEN_TOLERANCE: f64 = 1e-9;

/// Upper bound on buffered assignment symbols per generation round.
const BLOCK_SYMBOLS: usize = 1 << 20;
const CHUNK_SPREADS: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveConfig {
    pub cap: u128,
    pub arithmetic: Arithmetic,
    /// Interior histogram edges, ascending.
    pub edges: Vec<BigRational>,
    /// Fan out over the rayon pool; `false` is the sequential reference path.
    pub parallel: bool,
}

impl Default for ExhaustiveConfig {
    fn default() -> Self {
        Self {
            cap: DEFAULT_CAP,
            arithmetic: Arithmetic::Exact,
            edges: DEFAULT_EDGES
                .iter()
                .map(|&(n, d)| BigRational::new(n.into(), d.into()))
                .collect(),
            parallel: true,
        }
    }
}

/// Histogram bucket `[low, high)`. The first bucket excludes the minimum and the last
/// one the maximum, which are counted separately.
#[derive(Debug, Clone, PartialEq)]
pub struct Bucket {
    pub low: Kappa,
    pub high: Kappa,
    pub count: u64,
}

#[derive(Debug, Clone)]
pub struct ExhaustiveReport {
    pub mode: Arithmetic,
    pub total: u64,
    /// Spreads whose chain has no unique equilibrium.
    pub failures: u64,
    pub min: Option<Extreme>,
    pub max: Option<Extreme>,
    pub buckets: Vec<Bucket>,
}

/// An extreme `κ`, how many spreads attain it, and the lexicographically first one.
#[derive(Debug, Clone)]
pub struct Extreme {
    pub kappa: Kappa,
    pub count: u64,
    pub spread: SymbolSpread,
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kappa::Exact(r) => write!(f, "{r}"),
            Kappa::Float(v) => write!(f, "{v}"),
        }
    }
}

/// `L! / ∏ L_s!`, or `None` on `u128` overflow.
pub fn multinomial(counts: &[u32]) -> Option<u128> {
    let mut result: u128 = 1;
    let mut n: u128 = 0;
    for &c in counts {
        for i in 1..=c as u128 {
            n += 1;
            // result · n / i stays integral: it is a product of binomials so far.
            let g = gcd(result, i);
            result = (result / g).checked_mul(n / (i / g))?;
        }
    }
    Some(result)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Next assignment in lexicographic order, `false` after the last one.
fn next_permutation(a: &mut [u16]) -> bool {
    let Some(i) = a.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = a.iter().rposition(|&v| v > a[i]).expect("a[i+1] > a[i]");
    a.swap(i, j);
    a[i + 1..].reverse();
    true
}

#[derive(Debug, Clone)]
struct Partial {
    total: u64,
    failures: u64,
    bins: Vec<u64>,
    min: Option<(Kappa, u64, Vec<u16>)>,
    max: Option<(Kappa, u64, Vec<u16>)>,
}

impl Partial {
    fn new(bins: usize) -> Self {
        Self {
            total: 0,
            failures: 0,
            bins: vec![0; bins],
            min: None,
            max: None,
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        self.total += other.total;
        self.failures += other.failures;
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
        self.min = merge_extreme(self.min, other.min, Ordering::Less);
        self.max = merge_extreme(self.max, other.max, Ordering::Greater);
        self
    }
}

type ExtremeAcc = Option<(Kappa, u64, Vec<u16>)>;

fn merge_extreme(a: ExtremeAcc, b: ExtremeAcc, better: Ordering) -> ExtremeAcc {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            let ord = a.0.cmp_tol(&b.0);
            if ord == better {
                Some(a)
            } else if ord == Ordering::Equal {
                let first = if a.2 <= b.2 { a.2 } else { b.2 };
                Some((a.0, a.1 + b.1, first))
            } else {
                Some(b)
            }
        }
    }
}

fn offer(acc: &mut ExtremeAcc, kappa: &Kappa, assignment: &[u16], better: Ordering) {
    match acc {
        None => *acc = Some((kappa.clone(), 1, assignment.to_vec())),
        Some((k, count, first)) => {
            let ord = kappa.cmp_tol(k);
            if ord == better {
                *acc = Some((kappa.clone(), 1, assignment.to_vec()));
            } else if ord == Ordering::Equal {
                *count += 1;
                if assignment < first.as_slice() {
                    *first = assignment.to_vec();
                }
            }
        }
    }
}

struct Scan<'a> {
    dist: &'a SymbolDistribution,
    mode: Arithmetic,
    edges: &'a [Kappa],
    edges_f: Vec<f64>,
}

impl Scan<'_> {
    fn bin(&self, kappa: &Kappa) -> usize {
        self.edges
            .iter()
            .take_while(|e| kappa.cmp_tol(e) != Ordering::Less)
            .count()
    }

    fn near(&self, v: f64, acc: &ExtremeAcc) -> bool {
        acc.as_ref()
            .is_none_or(|(k, _, _)| (v - k.to_f64()).abs() <= SCREEN_TOLERANCE)
    }

    fn beyond(v: f64, acc: &ExtremeAcc, better: Ordering) -> bool {
        acc.as_ref()
            .is_none_or(|(k, _, _)| v.total_cmp(&k.to_f64()) == better)
    }

    fn run(&self, block: &[u16]) -> Result<Partial> {
        let l = self.dist.l() as usize;
        let mut float = Evaluator::new(self.dist, Arithmetic::Floating)?;
        let mut exact = match self.mode {
            Arithmetic::Exact => Some(Evaluator::new(self.dist, Arithmetic::Exact)?),
            Arithmetic::Floating => None,
        };
        let mut part = Partial::new(self.edges.len() + 1);
        for assignment in block.chunks_exact(l) {
            part.total += 1;
            let spread =
                SymbolSpread::from_assignment(self.dist.r(), self.dist.len(), assignment.to_vec())?;
            let screened = match float.kappa(&spread) {
                Ok(k) => Some(k.to_f64()),
                Err(Error::SingularSystem) => None,
                Err(e) => return Err(e),
            };
            let kappa = match (&mut exact, screened) {
                (None, Some(v)) => Some(Kappa::Float(v)),
                (None, None) => None,
                (Some(ev), screened) => {
                    let needs_exact = match screened {
                        None => true,
                        Some(v) => {
                            self.edges_f
                                .iter()
                                .any(|e| (v - e).abs() <= SCREEN_TOLERANCE)
                                || self.near(v, &part.min)
                                || self.near(v, &part.max)
                                || Self::beyond(v, &part.min, Ordering::Less)
                                || Self::beyond(v, &part.max, Ordering::Greater)
                        }
                    };
                    if needs_exact {
                        match ev.kappa(&spread) {
                            Ok(k) => Some(k),
                            Err(Error::SingularSystem) => None,
                            Err(e) => return Err(e),
                        }
                    } else {
                        screened.map(Kappa::Float)
                    }
                }
            };
            let Some(kappa) = kappa else {
                part.failures += 1;
                continue;
            };
            part.bins[self.bin(&kappa)] += 1;
            if kappa.exact().is_some() || self.mode == Arithmetic::Floating {
                offer(&mut part.min, &kappa, assignment, Ordering::Less);
                offer(&mut part.max, &kappa, assignment, Ordering::Greater);
            }
        }
        Ok(part)
    }
}

/// Evaluates `κ` for every spread with the distribution's counts.
///
/// Spreads are generated in lexicographic order of their assignment strings. In exact
/// mode every spread is first solved in floating point; those within a small margin
/// of a histogram edge or of the running extremes, and those that fail, are re-solved
/// exactly, so all reported counts are exact.
pub fn exhaustive_spreads(
    dist: &SymbolDistribution,
    cfg: &ExhaustiveConfig,
) -> Result<ExhaustiveReport> {
    let count = multinomial(dist.counts()).unwrap_or(u128::MAX);
    if count > cfg.cap {
        return Err(Error::CapExceeded {
            count,
            cap: cfg.cap,
        });
    }
    if cfg.arithmetic == Arithmetic::Exact && dist.exact_probs().is_none() {
        return Err(Error::ExactUnavailable(
            "probabilities are not exact rationals".into(),
        ));
    }
    if cfg.edges.is_empty() {
        return Err(Error::InvalidConfig(
            "at least one histogram edge is required".into(),
        ));
    }
    if cfg.edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("histogram edges must ascend".into()));
    }
    let edges: Vec<Kappa> = cfg
        .edges
        .iter()
        .map(|e| match cfg.arithmetic {
            Arithmetic::Exact => Kappa::Exact(e.clone()),
            Arithmetic::Floating => Kappa::Float(crate::dist::rational_to_f64(e)),
        })
        .collect();
    let scan = Scan {
        dist,
        mode: cfg.arithmetic,
        edges: &edges,
        edges_f: edges.iter().map(Kappa::to_f64).collect(),
    };

    let l = dist.l() as usize;
    let per_block = (BLOCK_SYMBOLS / l).max(1);
    let mut assignment = SymbolSpread::sorted_assignment(dist.counts());
    let mut total = Partial::new(edges.len() + 1);
    let mut block: Vec<u16> = Vec::with_capacity(per_block * l);
    let mut more = true;
    while more {
        block.clear();
        while more && block.len() < per_block * l {
            block.extend_from_slice(&assignment);
            more = next_permutation(&mut assignment);
        }
        let part = if cfg.parallel {
            block
                .par_chunks(CHUNK_SPREADS * l)
                .map(|chunk| scan.run(chunk))
                .try_reduce(|| Partial::new(edges.len() + 1), |a, b| Ok(a.merge(b)))?
        } else {
            scan.run(&block)?
        };
        total = total.merge(part);
    }

    let bucket_count = edges.len() + 1;
    let mut bins = total.bins.clone();
    let to_extreme = |acc: &ExtremeAcc| -> Result<Option<Extreme>> {
        acc.as_ref()
            .map(|(k, c, a)| {
                Ok(Extreme {
                    kappa: k.clone(),
                    count: *c,
                    spread: SymbolSpread::from_assignment(dist.r(), dist.len(), a.clone())?,
                })
            })
            .transpose()
    };
    let min = to_extreme(&total.min)?;
    let max = to_extreme(&total.max)?;
    if let Some(m) = &min {
        let b = scan.bin(&m.kappa);
        bins[b] -= m.count;
    }
    if let (Some(m), Some(lo)) = (&max, &min) {
        if m.kappa.cmp_tol(&lo.kappa) != Ordering::Equal {
            let b = scan.bin(&m.kappa);
            bins[b] -= m.count;
        }
    }
    let buckets = (0..bucket_count)
        .map(|i| {
            let low = match &min {
                Some(m) if i == 0 && m.kappa.cmp_tol(&edges[0]) == Ordering::Less => {
                    m.kappa.clone()
                }
                _ => edges[i.saturating_sub(1)].clone(),
            };
            let last = &edges[edges.len() - 1];
            let high = match &max {
                Some(m) if i + 1 == bucket_count && m.kappa.cmp_tol(last) == Ordering::Greater => {
                    m.kappa.clone()
                }
                _ => edges[i.min(edges.len() - 1)].clone(),
            };
            Bucket {
                low,
                high,
                count: bins[i],
            }
        })
        .collect();
    Ok(ExhaustiveReport {
        mode: cfg.arithmetic,
        total: total.total,
        failures: total.failures,
        min,
        max,
        buckets,
    })
}
