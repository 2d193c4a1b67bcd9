//! Encoding and decoding tables derived from a distribution and a spread.

use crate::dist::SymbolDistribution;
use crate::error::{Error, Result};
use crate::spread::SymbolSpread;
use crate::State;

/// One cell of the encoding table `𝔼(s, x) = (x′, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeEntry {
    pub next: State,
    pub bits: u8,
}

/// One cell of the decoding table `D(x) = (s, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeEntry {
    pub symbol: u16,
    pub y: u32,
}

/// `C(s, y)`, `D(x)`, `k_s(x)` and `k(y)` for one coder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodingTables {
    r: u32,
    counts: Vec<u32>,
    /// Indexed `s * L + (x − L)`.
    encode: Vec<EncodeEntry>,
    /// Indexed `x − L`.
    decode: Vec<DecodeEntry>,
    /// `C(s, L_s + j)` is `coding[s][j]`.
    coding: Vec<Vec<State>>,
}

/// `⌊lg(x / count)⌋` for `x ≥ count ≥ 1`.
#[inline]
pub fn bit_count(x: State, count: u32) -> u32 {
    let k = count.leading_zeros() - x.leading_zeros();
    if (count << k) > x {
        k - 1
    } else {
        k
    }
}

impl CodingTables {
    pub fn build(dist: &SymbolDistribution, spread: &SymbolSpread) -> Result<Self> {
        spread.check_against(dist)?;
        let r = dist.r();
        let l = dist.l();
        let n = dist.len();
        let coding: Vec<Vec<State>> = spread.sets().to_vec();

        let mut decode = vec![DecodeEntry { symbol: 0, y: 0 }; l as usize];
        for (s, set) in coding.iter().enumerate() {
            let ls = set.len() as u32;
            for (j, &x) in set.iter().enumerate() {
                decode[(x - l) as usize] = DecodeEntry {
                    symbol: s as u16,
                    y: ls + j as u32,
                };
            }
        }

        let mut encode = Vec::with_capacity(n * l as usize);
        for (s, set) in coding.iter().enumerate() {
            let ls = dist.count(s);
            for x in l..2 * l {
                let k = bit_count(x, ls);
                let y = x >> k;
                encode.push(EncodeEntry {
                    next: set[(y - ls) as usize],
                    bits: k as u8,
                });
            }
        }

        Ok(Self {
            r,
            counts: dist.counts().to_vec(),
            encode,
            decode,
            coding,
        })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn l(&self) -> u32 {
        1 << self.r
    }

    pub fn symbols(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    #[inline]
    pub fn entry(&self, s: usize, x: State) -> EncodeEntry {
        self.encode[s * self.l() as usize + (x - self.l()) as usize]
    }

    /// `k_s(x)`.
    #[inline]
    pub fn k(&self, s: usize, x: State) -> u32 {
        self.entry(s, x).bits as u32
    }

    /// `C(s, y)` for `y ∈ [L_s, 2L_s − 1]`.
    pub fn coding(&self, s: usize, y: u32) -> State {
        self.coding[s][(y - self.counts[s]) as usize]
    }

    /// `D(x)`.
    #[inline]
    pub fn decode_entry(&self, x: State) -> DecodeEntry {
        self.decode[(x - self.l()) as usize]
    }

    /// Bits the decoder reads after `D(x) = (s, y)`: `k(y) = R − ⌊lg y⌋`.
    #[inline]
    pub fn read_count(&self, y: u32) -> u32 {
        self.r - (31 - y.leading_zeros())
    }

    /// One encoding step: `(k, x mod 2^k, x′)`.
    #[inline]
    pub fn step(&self, s: usize, x: State) -> (u32, u32, State) {
        let e = self.entry(s, x);
        let k = e.bits as u32;
        (k, x & ((1u32 << k) - 1), e.next)
    }

    pub(crate) fn check_state(&self, x: State) -> Result<()> {
        let l = self.l();
        if x < l || x >= 2 * l {
            return Err(Error::StateOutOfRange(x as u64));
        }
        Ok(())
    }
}
