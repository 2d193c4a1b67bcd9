use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::transition::TransitionSystem;
use super::Arithmetic;
use crate::dist::rational_to_f64;
use crate::error::{Error, Result};
use crate::State;

/// Pivots smaller than this mark a floating system as singular.
pub const SINGULAR_PIVOT: f64 = 1e-12;

/// Stationary state probabilities `p_x` for `x ∈ I`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumDistribution {
    mode: Arithmetic,
    float: Vec<f64>,
    exact: Option<Vec<BigRational>>,
}

impl EquilibriumDistribution {
    pub(crate) fn from_float(mode: Arithmetic, float: Vec<f64>) -> Self {
        Self {
            mode,
            float,
            exact: None,
        }
    }

    pub(crate) fn from_exact(exact: Vec<BigRational>) -> Self {
        Self {
            mode: Arithmetic::Exact,
            float: exact.iter().map(rational_to_f64).collect(),
            exact: Some(exact),
        }
    }

    pub fn mode(&self) -> Arithmetic {
        self.mode
    }

    /// Number of states `L`.
    pub fn len(&self) -> usize {
        self.float.len()
    }

    pub fn is_empty(&self) -> bool {
        self.float.is_empty()
    }

    /// `p_x`, indexed by `x − L`.
    pub fn probs(&self) -> &[f64] {
        &self.float
    }

    /// Exact `p_x`, indexed by `x − L`, in exact mode.
    pub fn exact(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    pub fn prob(&self, x: State) -> f64 {
        self.float[x as usize - self.float.len()]
    }
}

/// Solves `M·X = B`. A system without a unique solution is reported as
/// [`Error::SingularSystem`].
pub fn solve_equilibrium(
    sys: &TransitionSystem,
    mode: Arithmetic,
) -> Result<EquilibriumDistribution> {
    let n = sys.size();
    match mode {
        Arithmetic::Floating => {
            let mut a = sys.matrix_f64().to_vec();
            let mut b = vec![0.0; n];
            b[n - 1] = 1.0;
            solve_float_in_place(&mut a, &mut b, n)?;
            Ok(EquilibriumDistribution::from_float(mode, b))
        }
        Arithmetic::Exact => {
            let scaled = sys.scaled().ok_or_else(|| {
                Error::ExactUnavailable("probabilities are not exact rationals".into())
            })?;
            let (numer, det) = match bareiss_i128(&scaled.entries, n) {
                Ok(Some((numer, det))) => (
                    numer.into_iter().map(BigInt::from).collect::<Vec<_>>(),
                    BigInt::from(det),
                ),
                Ok(None) => return Err(Error::SingularSystem),
                Err(Overflow) => {
                    let mut a: Vec<BigInt> =
                        scaled.entries.iter().map(|&v| BigInt::from(v)).collect();
                    let mut b = vec![BigInt::zero(); n];
                    b[n - 1] = BigInt::one();
                    let det = bareiss(&mut a, &mut b, n)
                        .map_err(|_| unreachable_overflow())?
                        .ok_or(Error::SingularSystem)?;
                    (b, det)
                }
            };
            let probs = numer
                .into_iter()
                .map(|num| BigRational::new(num, det.clone()))
                .collect();
            Ok(EquilibriumDistribution::from_exact(probs))
        }
    }
}

fn unreachable_overflow() -> Error {
    Error::ExactUnavailable("big-integer elimination overflowed".into())
}

/// Partial-pivot Gaussian elimination on a row-major `n × n` system. On success `b`
/// holds the solution.
pub(crate) fn solve_float_in_place(a: &mut [f64], b: &mut [f64], n: usize) -> Result<()> {
    for k in 0..n {
        let (p, best) = (k..n)
            .map(|i| (i, a[i * n + k].abs()))
            .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if best < SINGULAR_PIVOT {
            return Err(Error::SingularSystem);
        }
        if p != k {
            for j in k..n {
                a.swap(k * n + j, p * n + j);
            }
            b.swap(k, p);
        }
        let pivot = a[k * n + k];
        let (head, tail) = a.split_at_mut((k + 1) * n);
        let pivot_row = &head[k * n + k..k * n + n];
        let bk = b[k];
        for (off, row) in tail.chunks_exact_mut(n).enumerate() {
            let f = row[k];
            if f == 0.0 {
                continue;
            }
            let f = f / pivot;
            for (dst, &src) in row[k..].iter_mut().zip(pivot_row) {
                *dst -= f * src;
            }
            b[k + 1 + off] -= f * bk;
        }
    }
    for k in (0..n).rev() {
        let mut acc = b[k];
        for j in k + 1..n {
            acc -= a[k * n + j] * b[j];
        }
        b[k] = acc / a[k * n + k];
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Overflow;

/// Integers usable in fraction-free elimination.
pub(crate) trait ExactInt: Clone + PartialEq {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    /// `(a·b − c·d) / q`, the quotient being exact.
    fn cross(
        a: &Self,
        b: &Self,
        c: &Self,
        d: &Self,
        q: &Self,
    ) -> std::result::Result<Self, Overflow>;
}

impl ExactInt for i128 {
    fn nil() -> Self {
        0
    }

    fn unit() -> Self {
        1
    }

    fn is_nil(&self) -> bool {
        *self == 0
    }

    #[inline]
    fn cross(
        a: &Self,
        b: &Self,
        c: &Self,
        d: &Self,
        q: &Self,
    ) -> std::result::Result<Self, Overflow> {
        let ab = a.checked_mul(*b).ok_or(Overflow)?;
        let cd = c.checked_mul(*d).ok_or(Overflow)?;
        let diff = ab.checked_sub(cd).ok_or(Overflow)?;
        debug_assert_eq!(diff % q, 0);
        Ok(diff / q)
    }
}

impl ExactInt for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }

    fn unit() -> Self {
        One::one()
    }

    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }

    fn cross(
        a: &Self,
        b: &Self,
        c: &Self,
        d: &Self,
        q: &Self,
    ) -> std::result::Result<Self, Overflow> {
        let diff = a * b - c * d;
        debug_assert!(Zero::is_zero(&(&diff % q)));
        Ok(diff / q)
    }
}

/// Fraction-free Gauss–Jordan elimination (Bareiss). Every intermediate entry is a
/// minor of the input, so all divisions are exact. Returns the common diagonal
/// value `det` with `b` overwritten by numerators: `x_i = b_i / det`. `Ok(None)`
/// means the matrix is singular.
pub(crate) fn bareiss<T: ExactInt>(
    a: &mut [T],
    b: &mut [T],
    n: usize,
) -> std::result::Result<Option<T>, Overflow> {
    let mut prev = T::unit();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i * n + k].is_nil()) else {
            return Ok(None);
        };
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            b.swap(k, p);
        }
        let pivot = a[k * n + k].clone();
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = a[i * n + k].clone();
            if i < k {
                a[i * n + i] = T::cross(&pivot, &a[i * n + i], &f, &T::nil(), &prev)?;
            }
            for j in k + 1..n {
                a[i * n + j] = T::cross(&pivot, &a[i * n + j], &f, &a[k * n + j], &prev)?;
            }
            b[i] = T::cross(&pivot, &b[i], &f, &b[k], &prev)?;
            a[i * n + k] = T::nil();
        }
        prev = pivot;
    }
    Ok(Some(prev))
}

/// Bareiss on a scaled system with `B = e_last`, in checked `i128`.
pub(crate) fn bareiss_i128(
    entries: &[i128],
    n: usize,
) -> std::result::Result<Option<(Vec<i128>, i128)>, Overflow> {
    let mut a = entries.to_vec();
    let mut b = vec![0i128; n];
    b[n - 1] = 1;
    Ok(bareiss(&mut a, &mut b, n)?.map(|det| (b, det)))
}
