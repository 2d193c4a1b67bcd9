//! Key-derived secret spreads.
//!
//! Both parties quantize the public distribution, start from the public rank-matched
//! spread and run the minimizing swap search for a fixed number of draws, with the
//! generator seeded from the shared key:
//!
//! ```text
//! seed = first 8 bytes (big-endian) of HMAC-SHA256(K, DOMAIN ‖ version u32 ‖ SHA-256(dist))
//! ```
//!
//! where `SHA-256(dist)` hashes [`distribution_digest`]'s canonical text. This only
//! obscures the spread; it is not a confidentiality guarantee.

use std::fmt;

use hmac::{Hmac, KeyInit, Mac};
use sha2::{Digest, Sha256};

use crate::codec::{decode, encode, SymbolFrame};
use crate::dist::{quantize, QuantizeMode, SymbolDistribution, SymbolProbs};
use crate::error::{Error, Result};
use crate::format::{frame_checksum, write_counts, write_distribution, Container};
use crate::markov::{Arithmetic, RedundancyReport};
use crate::optimize::{swap_search, InitialSpread, Objective, SearchConfig};
use crate::spread::SymbolSpread;
use crate::tables::CodingTables;

pub const PROTOCOL_VERSION: u32 = 1;
pub const KEY_BYTES: usize = 32;
pub const DEFAULT_KEYED_ITERS: u64 = 1000;
const DOMAIN: &[u8] = b"anslab/keyed-spread";

/// SHA-256 of `R`, the probabilities and the counts in canonical text form.
pub fn distribution_digest(dist: &SymbolDistribution) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(format!("R\t{}\n", dist.r()));
    h.update(write_distribution(dist.source()));
    h.update(write_counts(dist));
    h.finalize().into()
}

/// Search seed derived from the key and the public distribution.
pub fn keyed_seed(key: &[u8], dist: &SymbolDistribution) -> Result<u64> {
    if key.len() != KEY_BYTES {
        return Err(Error::InvalidKey(key.len()));
    }
    let mut mac =
        <Hmac<Sha256> as KeyInit>::new_from_slice(key).map_err(|_| Error::InvalidKey(key.len()))?;
    mac.update(DOMAIN);
    mac.update(&PROTOCOL_VERSION.to_be_bytes());
    mac.update(&distribution_digest(dist));
    let tag = mac.finalize().into_bytes();
    Ok(u64::from_be_bytes(
        tag[..8].try_into().expect("tag has 32 bytes"),
    ))
}

/// A derived coder. The key itself is not retained.
#[derive(Clone)]
pub struct KeyedSession {
    pub dist: SymbolDistribution,
    pub spread: SymbolSpread,
    pub report: Option<RedundancyReport>,
    pub iters: u64,
    tables: CodingTables,
}

impl fmt::Debug for KeyedSession {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KeyedSession")
            .field("counts", &self.dist.counts())
            .field("iters", &self.iters)
            .finish_non_exhaustive()
    }
}

/// Derives the secret spread for key `key` (32 bytes).
pub fn derive_keyed_spread(
    key: &[u8],
    probs: &SymbolProbs,
    r: u32,
    iters: u64,
) -> Result<KeyedSession> {
    let dist = quantize(probs, r, QuantizeMode::BestFit)?;
    let seed = keyed_seed(key, &dist)?;
    let mut cfg = SearchConfig::new(iters, seed);
    cfg.init = InitialSpread::Rank;
    cfg.objective = Objective::Minimize;
    cfg.arithmetic = Arithmetic::Floating;
    cfg.early_exit = false;
    let trace = swap_search(&dist, &cfg)?;
    let tables = CodingTables::build(&dist, &trace.final_spread)?;
    Ok(KeyedSession {
        spread: trace.final_spread,
        report: trace.report,
        iters,
        tables,
        dist,
    })
}

impl KeyedSession {
    pub fn tables(&self) -> &CodingTables {
        &self.tables
    }

    /// Encodes from the initial state `L` into a checksummed container.
    pub fn encode(&self, frame: &SymbolFrame) -> Result<Container> {
        let out = encode(frame, &self.tables, self.dist.l())?;
        Ok(Container {
            r: self.dist.r(),
            counts: self.dist.counts().to_vec(),
            len: frame.len() as u64,
            frame: out,
            checksum: Some(frame_checksum(&frame.symbols)),
        })
    }

    /// Decodes and verifies the checksum. A different key shows up as a checksum
    /// mismatch or a decoding error.
    pub fn decode(&self, container: &Container) -> Result<SymbolFrame> {
        container.check_against(&self.dist)?;
        let expected = container
            .checksum
            .ok_or_else(|| Error::Parse("container carries no checksum".into()))?;
        let frame = decode(&container.frame, &self.tables, container.len)?;
        let actual = frame_checksum(&frame.symbols);
        if actual != expected {
            return Err(Error::ChecksumMismatch { expected, actual });
        }
        Ok(frame)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probs() -> SymbolProbs {
        SymbolProbs::from_ratios(&[(3, 16), (5, 16), (8, 16)]).unwrap()
    }

    #[test]
    fn same_key_same_spread() {
        let key = [7u8; 32];
        let a = derive_keyed_spread(&key, &probs(), 4, 300).unwrap();
        let b = derive_keyed_spread(&key, &probs(), 4, 300).unwrap();
        assert_eq!(a.spread, b.spread);
    }

    #[test]
    fn key_length_is_checked() {
        assert!(matches!(
            derive_keyed_spread(&[0u8; 16], &probs(), 4, 10),
            Err(Error::InvalidKey(16))
        ));
    }

    #[test]
    fn roundtrip_and_wrong_key() {
        let a = derive_keyed_spread(&[1u8; 32], &probs(), 4, 500).unwrap();
        let frame = SymbolFrame::new(vec![0, 1, 2, 2, 1, 0, 2, 2, 2, 1]);
        let c = a.encode(&frame).unwrap();
        assert_eq!(a.decode(&c).unwrap(), frame);
        let empty = a.encode(&SymbolFrame::default()).unwrap();
        assert!(empty.frame.payload.is_empty());
        assert!(a.decode(&empty).unwrap().is_empty());
    }

    #[test]
    fn never_worse_than_public_start() {
        let s = derive_keyed_spread(&[9u8; 32], &probs(), 4, 1000).unwrap();
        let dist = quantize(&probs(), 4, QuantizeMode::BestFit).unwrap();
        let start = crate::markov::evaluate(
            &dist,
            &crate::tuning::rank_match_spread(&dist),
            Arithmetic::Exact,
        )
        .unwrap();
        assert!(s.report.unwrap().kappa_exact.unwrap() <= start.kappa_exact.unwrap());
    }
}
