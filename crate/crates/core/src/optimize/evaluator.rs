use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dist::{rational_to_f64, SymbolDistribution};
use crate::error::{Error, Result};
use crate::markov::{bareiss_i128, solve_float_in_place, Arithmetic};
use crate::spread::SymbolSpread;
use crate::tables::bit_count;

/// Float `κ` values closer than this count as equal.
pub const FLOAT_KAPPA_TOLERANCE: f64 = 1e-12;

/// Average code length of one spread.
#[derive(Debug, Clone, PartialEq)]
pub enum Kappa {
    Exact(BigRational),
    Float(f64),
}

impl Kappa {
    pub fn to_f64(&self) -> f64 {
        match self {
            Kappa::Exact(r) => rational_to_f64(r),
            Kappa::Float(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Kappa::Exact(r) => Some(r),
            Kappa::Float(_) => None,
        }
    }

    /// Exact comparison, or comparison up to [`FLOAT_KAPPA_TOLERANCE`].
    pub fn cmp_tol(&self, other: &Kappa) -> Ordering {
        match (self, other) {
            (Kappa::Exact(a), Kappa::Exact(b)) => a.cmp(b),
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                if (a - b).abs() <= FLOAT_KAPPA_TOLERANCE {
                    Ordering::Equal
                } else {
                    a.total_cmp(&b)
                }
            }
        }
    }
}

/// Reusable buffers for computing `κ` of many spreads over one distribution.
///
/// `κ = Σ_x c_x·p_x` with `c_x = Σ_s p_s·k_s(x)`, and `c_x` only depends on the counts,
/// so it is computed once.
pub(crate) struct Evaluator<'a> {
    dist: &'a SymbolDistribution,
    mode: Arithmetic,
    l: usize,
    /// `(x >> k_s(x)) − L_s`, indexed `s * L + (x − L)`.
    rank: Vec<u32>,
    cost: Vec<f64>,
    matrix: Vec<f64>,
    rhs: Vec<f64>,
    exact: Option<ExactParts>,
    constant: Option<Vec<u32>>,
}

struct ExactParts {
    weights: Vec<i128>,
    denominator: i128,
    /// `Σ_s w_s·k_s(x)`, so `c_x = cost_x / D`.
    cost: Vec<i128>,
    matrix: Vec<i128>,
}

impl<'a> Evaluator<'a> {
    pub fn new(dist: &'a SymbolDistribution, mode: Arithmetic) -> Result<Self> {
        let l = dist.l();
        let size = l as usize;
        let n = dist.len();
        let mut rank = Vec::with_capacity(n * size);
        let mut bits = Vec::with_capacity(n * size);
        for s in 0..n {
            let ls = dist.count(s);
            for x in l..2 * l {
                let k = bit_count(x, ls);
                rank.push((x >> k) - ls);
                bits.push(k);
            }
        }
        let cost = (0..size)
            .map(|i| {
                (0..n)
                    .map(|s| dist.prob(s) * bits[s * size + i] as f64)
                    .sum()
            })
            .collect();
        let exact = match mode {
            Arithmetic::Floating => None,
            Arithmetic::Exact => {
                let (weights, denominator) =
                    crate::markov::scaled_weights(dist).ok_or_else(|| {
                        Error::ExactUnavailable("probabilities are not exact rationals".into())
                    })?;
                let cost = (0..size)
                    .map(|i| {
                        (0..n)
                            .map(|s| weights[s] * bits[s * size + i] as i128)
                            .sum()
                    })
                    .collect();
                Some(ExactParts {
                    weights,
                    denominator,
                    cost,
                    matrix: vec![0; size * size],
                })
            }
        };
        Ok(Self {
            dist,
            mode,
            l: size,
            rank,
            cost,
            matrix: vec![0.0; size * size],
            rhs: vec![0.0; size],
            exact,
            constant: crate::markov::constant_lengths(dist),
        })
    }

    pub fn entropy(&self) -> f64 {
        self.dist.entropy()
    }

    #[inline]
    fn next_row(&self, spread: &SymbolSpread, s: usize, col: usize) -> usize {
        spread.states(s)[self.rank[s * self.l + col] as usize] as usize - self.l
    }

    /// A singular chain fails unless the code lengths do not depend on the state.
    pub fn kappa(&mut self, spread: &SymbolSpread) -> Result<Kappa> {
        let result = match self.mode {
            Arithmetic::Floating => self.kappa_float(spread).map(Kappa::Float),
            Arithmetic::Exact => self.kappa_exact(spread).map(Kappa::Exact),
        };
        match (result, &self.constant) {
            (Err(Error::SingularSystem), Some(k)) => Ok(self.constant_kappa(k)),
            (result, _) => result,
        }
    }

    fn constant_kappa(&self, k: &[u32]) -> Kappa {
        match (self.mode, self.dist.exact_probs()) {
            (Arithmetic::Exact, Some(ps)) => Kappa::Exact(
                ps.iter()
                    .zip(k)
                    .map(|(p, &k)| p * BigRational::from_integer(k.into()))
                    .sum(),
            ),
            _ => Kappa::Float(
                self.dist
                    .probs()
                    .iter()
                    .zip(k)
                    .map(|(p, &k)| p * k as f64)
                    .sum(),
            ),
        }
    }

    fn kappa_float(&mut self, spread: &SymbolSpread) -> Result<f64> {
        let n = self.l;
        let mut m = std::mem::take(&mut self.matrix);
        m.fill(0.0);
        for i in 0..n {
            m[i * n + i] = -1.0;
        }
        for s in 0..self.dist.len() {
            let p = self.dist.prob(s);
            for col in 0..n {
                let row = self.next_row(spread, s, col);
                m[row * n + col] += p;
            }
        }
        m[(n - 1) * n..].fill(1.0);
        self.rhs.fill(0.0);
        self.rhs[n - 1] = 1.0;
        let solved = solve_float_in_place(&mut m, &mut self.rhs, n);
        self.matrix = m;
        solved?;
        Ok(self.cost.iter().zip(&self.rhs).map(|(c, p)| c * p).sum())
    }

    fn kappa_exact(&mut self, spread: &SymbolSpread) -> Result<BigRational> {
        let n = self.l;
        let mut parts = self.exact.take().expect("exact mode has exact parts");
        let m = &mut parts.matrix;
        m.fill(0);
        for i in 0..n {
            m[i * n + i] = -parts.denominator;
        }
        for s in 0..self.dist.len() {
            let w = parts.weights[s];
            for col in 0..n {
                let row = self.next_row(spread, s, col);
                m[row * n + col] += w;
            }
        }
        m[(n - 1) * n..].fill(1);
        let result = exact_kappa(&parts, n);
        self.exact = Some(parts);
        result
    }
}

fn exact_kappa(parts: &ExactParts, n: usize) -> Result<BigRational> {
    if let Ok(solved) = bareiss_i128(&parts.matrix, n) {
        let (numer, det) = solved.ok_or(Error::SingularSystem)?;
        let mut total: Option<i128> = Some(0);
        for (c, v) in parts.cost.iter().zip(&numer) {
            total = total.and_then(|t| t.checked_add(c.checked_mul(*v)?));
        }
        let scale = parts.denominator.checked_mul(det);
        if let (Some(total), Some(scale)) = (total, scale) {
            return Ok(BigRational::new(total.into(), scale.into()));
        }
        let total: BigInt = parts
            .cost
            .iter()
            .zip(&numer)
            .map(|(&c, &v)| BigInt::from(c) * BigInt::from(v))
            .sum();
        return Ok(BigRational::new(
            total,
            BigInt::from(parts.denominator) * BigInt::from(det),
        ));
    }
    let mut a: Vec<BigInt> = parts.matrix.iter().map(|&v| BigInt::from(v)).collect();
    let mut b = vec![BigInt::zero(); n];
    b[n - 1] = BigInt::one();
    let det = crate::markov::bareiss(&mut a, &mut b, n)
        .map_err(|_| Error::ExactUnavailable("big-integer elimination overflowed".into()))?
        .ok_or(Error::SingularSystem)?;
    let total: BigInt = parts
        .cost
        .iter()
        .zip(&b)
        .map(|(&c, v)| BigInt::from(c) * v)
        .sum();
    Ok(BigRational::new(
        total,
        BigInt::from(parts.denominator) * det,
    ))
}
