use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::dist::{common_denominator, SymbolDistribution};
use crate::tables::CodingTables;

/// The linear system `M·X = B` whose solution is the stationary distribution.
///
/// Column `j` is source state `L + j`, row `i` destination state `L + i`. Every
/// transition adds `p_s` to its cell, the diagonal starts at −1 and the last row is
/// replaced by ones (normalization). `B` is zero except for a final one.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSystem {
    size: usize,
    float: Vec<f64>,
    scaled: Option<ScaledSystem>,
}

/// `M` with every row but the last multiplied by the common denominator `D` of the
/// symbol probabilities, so all entries are integers. Scaling rows leaves the
/// solution unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledSystem {
    pub denominator: i128,
    pub entries: Vec<i128>,
}

/// Denominators above this do not leave headroom for elimination in `i128`.
const MAX_DENOMINATOR: i128 = 1 << 62;

impl TransitionSystem {
    /// Number of states `L`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry_f64(&self, row: usize, col: usize) -> f64 {
        self.float[row * self.size + col]
    }

    /// Exact entry, when the probabilities are exact.
    pub fn entry(&self, row: usize, col: usize) -> Option<BigRational> {
        let scaled = self.scaled.as_ref()?;
        let value = BigInt::from(scaled.entries[row * self.size + col]);
        Some(if row + 1 == self.size {
            BigRational::from_integer(value)
        } else {
            BigRational::new(value, BigInt::from(scaled.denominator))
        })
    }

    pub fn matrix_f64(&self) -> &[f64] {
        &self.float
    }

    pub fn scaled(&self) -> Option<&ScaledSystem> {
        self.scaled.as_ref()
    }

    /// `B = (0, …, 0, 1)`.
    pub fn rhs(&self) -> Vec<u8> {
        let mut b = vec![0; self.size];
        b[self.size - 1] = 1;
        b
    }
}

/// Assembles `M` and `B` from the encoding table.
///
/// All source states `L, …, 2L−1` contribute. Transitions into the last row vanish
/// under the normalization overwrite, but those out of `2L−1` into other rows are kept.
pub fn build_transition_system(
    tables: &CodingTables,
    dist: &SymbolDistribution,
) -> TransitionSystem {
    let l = tables.l();
    let size = l as usize;
    let mut float = vec![0.0; size * size];
    fill_float(tables, dist.probs(), &mut float);

    let scaled = scaled_weights(dist).map(|(weights, denominator)| {
        let mut entries = vec![0i128; size * size];
        fill_scaled(tables, &weights, denominator, &mut entries);
        ScaledSystem {
            denominator,
            entries,
        }
    });

    TransitionSystem {
        size,
        float,
        scaled,
    }
}

pub(crate) fn fill_float(tables: &CodingTables, probs: &[f64], m: &mut [f64]) {
    let l = tables.l();
    let size = l as usize;
    m.fill(0.0);
    for i in 0..size {
        m[i * size + i] = -1.0;
    }
    for x in l..2 * l {
        let col = (x - l) as usize;
        for (s, &p) in probs.iter().enumerate() {
            let row = (tables.entry(s, x).next - l) as usize;
            m[row * size + col] += p;
        }
    }
    m[(size - 1) * size..].fill(1.0);
}

pub(crate) fn fill_scaled(
    tables: &CodingTables,
    weights: &[i128],
    denominator: i128,
    m: &mut [i128],
) {
    let l = tables.l();
    let size = l as usize;
    m.fill(0);
    for i in 0..size {
        m[i * size + i] = -denominator;
    }
    for x in l..2 * l {
        let col = (x - l) as usize;
        for (s, &w) in weights.iter().enumerate() {
            let row = (tables.entry(s, x).next - l) as usize;
            m[row * size + col] += w;
        }
    }
    m[(size - 1) * size..].fill(1);
}

/// Integer weights `p_s · D` and `D`, when the probabilities are exact and small enough.
pub(crate) fn scaled_weights(dist: &SymbolDistribution) -> Option<(Vec<i128>, i128)> {
    let exact = dist.exact_probs()?;
    let denominator = common_denominator(exact).to_i128()?;
    if denominator > MAX_DENOMINATOR {
        return None;
    }
    let d = BigRational::from_integer(denominator.into());
    let weights = exact
        .iter()
        .map(|p| (p * &d).to_integer().to_i128())
        .collect::<Option<Vec<_>>>()?;
    debug_assert!(weights.iter().all(|w| *w > 0));
    Some((weights, denominator))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spread::SymbolSpread;
    use num_traits::One;

    #[test]
    fn two_state_coder() {
        let dist =
            SymbolDistribution::from_counts(vec!["a".into(), "b".into()], 1, vec![1, 1]).unwrap();
        let spread = SymbolSpread::from_labels(1, &[1, 2]).unwrap();
        let tables = CodingTables::build(&dist, &spread).unwrap();
        let sys = build_transition_system(&tables, &dist);
        let half = BigRational::new(1.into(), 2.into());
        let one = BigRational::one();
        assert_eq!(sys.entry(0, 0).unwrap(), -half.clone());
        assert_eq!(sys.entry(0, 1).unwrap(), half);
        assert_eq!(sys.entry(1, 0).unwrap(), one.clone());
        assert_eq!(sys.entry(1, 1).unwrap(), one);
        assert_eq!(sys.rhs(), vec![0, 1]);
        assert_eq!(sys.matrix_f64(), &[-0.5, 0.5, 1.0, 1.0]);
    }
}
