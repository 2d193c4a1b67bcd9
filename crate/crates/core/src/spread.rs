//! Symbol spreads: the assignment of every state in `I = {L, …, 2L−1}` to a symbol.

use std::fmt;

use crate::dist::{state_count, SymbolDistribution};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::State;

/// A spread `s̄ : I → S` together with the ascending per-symbol state sets `𝕃_s`.
///
/// The state sets are kept sorted, so the `j`-th element of `𝕃_s` is `C(s, L_s + j)`.
/// Any reassignment of states therefore canonicalizes automatically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolSpread {
    r: u32,
    assignment: Vec<u16>,
    sets: Vec<Vec<State>>,
}

impl SymbolSpread {
    /// Builds a spread from the symbol index of each state `L, L+1, …, 2L−1`.
    pub fn from_assignment(r: u32, symbols: usize, assignment: Vec<u16>) -> Result<Self> {
        let l = state_count(r)?;
        if assignment.len() != l as usize {
            return Err(Error::InvalidSpread(format!(
                "{} assignments for {} states",
                assignment.len(),
                l
            )));
        }
        if symbols > u16::MAX as usize + 1 {
            return Err(Error::InvalidSpread(format!("{symbols} symbols")));
        }
        let mut sets = vec![Vec::new(); symbols];
        for (i, &s) in assignment.iter().enumerate() {
            let set = sets
                .get_mut(s as usize)
                .ok_or(Error::UnknownSymbol(s as usize))?;
            set.push(l + i as State);
        }
        if let Some(s) = sets.iter().position(Vec::is_empty) {
            return Err(Error::InvalidSpread(format!("symbol {s} owns no state")));
        }
        Ok(Self {
            r,
            assignment,
            sets,
        })
    }

    /// Builds a spread from per-symbol state sets; they must partition `I`.
    pub fn from_sets(r: u32, sets: &[Vec<State>]) -> Result<Self> {
        let l = state_count(r)?;
        let mut assignment = vec![u16::MAX; l as usize];
        for (s, set) in sets.iter().enumerate() {
            for &x in set {
                if x < l || x >= 2 * l {
                    return Err(Error::StateOutOfRange(x as u64));
                }
                let slot = &mut assignment[(x - l) as usize];
                if *slot != u16::MAX {
                    return Err(Error::InvalidSpread(format!("state {x} assigned twice")));
                }
                *slot = s as u16;
            }
        }
        if let Some(i) = assignment.iter().position(|&s| s == u16::MAX) {
            return Err(Error::InvalidSpread(format!(
                "state {} unassigned",
                l + i as State
            )));
        }
        Self::from_assignment(r, sets.len(), assignment)
    }

    /// Convenience for literal spreads: one-based symbol labels per state.
    pub fn from_labels(r: u32, labels: &[u16]) -> Result<Self> {
        let symbols = labels.iter().copied().max().unwrap_or(0) as usize;
        if labels.contains(&0) {
            return Err(Error::InvalidSpread("labels are one-based".into()));
        }
        Self::from_assignment(r, symbols, labels.iter().map(|&s| s - 1).collect())
    }

    /// A uniformly random spread with the distribution's counts (Fisher–Yates).
    pub fn random(dist: &SymbolDistribution, rng: &mut SplitMix64) -> Self {
        let mut assignment = Self::sorted_assignment(dist.counts());
        for i in (1..assignment.len()).rev() {
            let j = rng.below(i as u64 + 1) as usize;
            assignment.swap(i, j);
        }
        Self::from_assignment(dist.r(), dist.len(), assignment)
            .expect("counts come from a valid distribution")
    }

    /// Symbols laid out in contiguous runs `0…0 1…1 …`, the lexicographically
    /// smallest assignment.
    pub(crate) fn sorted_assignment(counts: &[u32]) -> Vec<u16> {
        counts
            .iter()
            .enumerate()
            .flat_map(|(s, &c)| std::iter::repeat_n(s as u16, c as usize))
            .collect()
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn l(&self) -> u32 {
        1 << self.r
    }

    pub fn symbols(&self) -> usize {
        self.sets.len()
    }

    /// `s̄(x)`.
    pub fn symbol_at(&self, x: State) -> usize {
        self.assignment[(x - self.l()) as usize] as usize
    }

    /// The assignment for states `L, …, 2L−1`, in state order.
    pub fn assignment(&self) -> &[u16] {
        &self.assignment
    }

    /// `𝕃_s`, ascending.
    pub fn states(&self, s: usize) -> &[State] {
        &self.sets[s]
    }

    pub fn sets(&self) -> &[Vec<State>] {
        &self.sets
    }

    pub fn counts(&self) -> Vec<u32> {
        self.sets.iter().map(|s| s.len() as u32).collect()
    }

    /// Checks `|𝕃_s| = L_s` for every symbol.
    pub fn check_against(&self, dist: &SymbolDistribution) -> Result<()> {
        if self.r != dist.r() {
            return Err(Error::SpreadMismatch(format!(
                "spread has R={}, distribution R={}",
                self.r,
                dist.r()
            )));
        }
        if self.symbols() != dist.len() {
            return Err(Error::SpreadMismatch(format!(
                "spread has {} symbols, distribution {}",
                self.symbols(),
                dist.len()
            )));
        }
        for (s, set) in self.sets.iter().enumerate() {
            if set.len() as u32 != dist.count(s) {
                return Err(Error::SpreadMismatch(format!(
                    "symbol {s} owns {} states, expected {}",
                    set.len(),
                    dist.count(s)
                )));
            }
        }
        Ok(())
    }

    /// Exchanges the symbols of `x` and `y`. The state sets are re-sorted, which is
    /// the same as performing the cascade of repair swaps that restores their order.
    pub fn swap(&self, x: State, y: State) -> Result<Self> {
        let l = self.l();
        for z in [x, y] {
            if z < l || z >= 2 * l {
                return Err(Error::StateOutOfRange(z as u64));
            }
        }
        let (sx, sy) = (self.symbol_at(x), self.symbol_at(y));
        if sx == sy {
            return Err(Error::SameSymbolSwap(x, y));
        }
        let mut next = self.clone();
        next.swap_in_place(x, y);
        Ok(next)
    }

    pub(crate) fn swap_in_place(&mut self, x: State, y: State) {
        let l = self.l();
        let (ix, iy) = ((x - l) as usize, (y - l) as usize);
        let (sx, sy) = (self.assignment[ix] as usize, self.assignment[iy] as usize);
        self.assignment.swap(ix, iy);
        replace_sorted(&mut self.sets[sx], x, y);
        replace_sorted(&mut self.sets[sy], y, x);
    }
}

fn replace_sorted(set: &mut Vec<State>, old: State, new: State) {
    let at = set.binary_search(&old).expect("state belongs to the set");
    set.remove(at);
    let to = set.binary_search(&new).unwrap_err();
    set.insert(to, new);
}

impl fmt::Display for SymbolSpread {
    /// One-based symbol labels in state order, e.g. `3 3 1 2 …`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.assignment.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", s + 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> SymbolSpread {
        SymbolSpread::from_labels(4, &[3, 3, 1, 2, 2, 3, 1, 2, 3, 1, 2, 3, 2, 3, 3, 3]).unwrap()
    }

    #[test]
    fn sets_are_ascending() {
        let s = example();
        assert_eq!(s.states(0), &[18, 22, 25]);
        assert_eq!(s.states(1), &[19, 20, 23, 26, 28]);
        assert_eq!(s.states(2), &[16, 17, 21, 24, 27, 29, 30, 31]);
        assert_eq!(s.counts(), vec![3, 5, 8]);
    }

    #[test]
    fn swap_canonicalizes() {
        let s = example().swap(22, 26).unwrap();
        assert_eq!(s.states(0), &[18, 25, 26]);
        assert_eq!(s.states(1), &[19, 20, 22, 23, 28]);
        let back = s.swap(22, 26).unwrap();
        assert_eq!(back, example());
    }

    #[test]
    fn swap_errors() {
        let s = example();
        assert_eq!(s.swap(16, 17), Err(Error::SameSymbolSwap(16, 17)));
        assert!(matches!(s.swap(15, 18), Err(Error::StateOutOfRange(15))));
    }

    #[test]
    fn from_sets_rejects_overlap_and_gaps() {
        assert!(SymbolSpread::from_sets(1, &[vec![2], vec![2]]).is_err());
        assert!(SymbolSpread::from_sets(2, &[vec![4, 5], vec![6]]).is_err());
        assert!(SymbolSpread::from_sets(1, &[vec![2], vec![3]]).is_ok());
    }

    #[test]
    fn random_spread_has_counts() {
        let dist = SymbolDistribution::from_counts(
            vec!["a".into(), "b".into(), "c".into()],
            4,
            vec![3, 5, 8],
        )
        .unwrap();
        let mut rng = SplitMix64::new(3);
        for _ in 0..20 {
            let s = SymbolSpread::random(&dist, &mut rng);
            s.check_against(&dist).unwrap();
        }
    }
}
