//! Text formats for distributions and spreads, and the binary container.
//!
//! Distribution file: one `symbol<TAB>value` line per symbol, `#` starts a comment.
//! Values are probabilities (`0.35`, `3/16`, `1e-3`) or, when every value is a plain
//! integer, raw counts that get normalized.
//!
//! Spread file: one `x<TAB>symbol` line per state, states ascending from `L`.
//!
//! Container, all integers big-endian:
//!
//! ```text
//! magic "ANS1" | R u8 | n u16 | L_s u16 × n | ℓ u64 | x_0 u32 | bit length u64 | payload
//! ```
//!
//! The keyed variant uses magic `"ANSK"` and inserts a CRC-32 of the frame after the bit
//! length.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::codec::BinaryFrame;
use crate::dist::{parse_exact, SymbolDistribution, SymbolProbs, MAX_R};
use crate::error::{Error, Result};
use crate::spread::SymbolSpread;
use crate::State;

pub const MAGIC: [u8; 4] = *b"ANS1";
pub const KEYED_MAGIC: [u8; 4] = *b"ANSK";

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn two_fields(line_no: usize, line: &str) -> Result<(&str, &str)> {
    let (a, b) = line
        .split_once('\t')
        .or_else(|| line.split_once(char::is_whitespace))
        .ok_or_else(|| Error::Parse(format!("line {line_no}: expected two fields")))?;
    Ok((a.trim(), b.trim()))
}

/// Parses a distribution file. Counts are normalized exactly; probabilities are kept
/// exact when they sum to exactly one and as floats when they only do so within
/// rounding.
pub fn parse_distribution(text: &str) -> Result<SymbolProbs> {
    let mut names = Vec::new();
    let mut values = Vec::new();
    for (no, line) in lines(text) {
        let (name, value) = two_fields(no, line)?;
        names.push(name.to_string());
        values.push((no, value));
    }
    let counts: Option<Vec<u64>> = values.iter().map(|(_, v)| v.parse::<u64>().ok()).collect();
    if let Some(counts) = counts {
        return SymbolProbs::from_counts(names, &counts);
    }
    let exact = values
        .iter()
        .map(|&(no, v)| {
            parse_exact(v).map_err(|_| Error::Parse(format!("line {no}: bad value {v:?}")))
        })
        .collect::<Result<Vec<BigRational>>>()?;
    let sum: BigRational = exact.iter().sum();
    if sum == BigRational::from_integer(BigInt::from(1)) {
        return SymbolProbs::from_rationals(names, exact);
    }
    let float = exact.iter().map(crate::dist::rational_to_f64).collect();
    SymbolProbs::from_f64(names, float)
}

/// Writes probabilities, as fractions when exact.
pub fn write_distribution(probs: &SymbolProbs) -> String {
    let mut out = String::new();
    for (i, name) in probs.names().iter().enumerate() {
        let value = match probs.exact() {
            Some(exact) => exact[i].to_string(),
            None => format!("{}", probs.probs()[i]),
        };
        out.push_str(&format!("{name}\t{value}\n"));
    }
    out
}

/// Writes quantized counts; reading them back gives probabilities `L_s / L`.
pub fn write_counts(dist: &SymbolDistribution) -> String {
    dist.names()
        .iter()
        .zip(dist.counts())
        .map(|(n, c)| format!("{n}\t{c}\n"))
        .collect()
}

/// Parses a spread file against the alphabet of `dist`.
pub fn parse_spread(text: &str, dist: &SymbolDistribution) -> Result<SymbolSpread> {
    let l = dist.l();
    let mut assignment = Vec::with_capacity(l as usize);
    for (no, line) in lines(text) {
        let (x, name) = two_fields(no, line)?;
        let x: State = x
            .parse()
            .map_err(|_| Error::Parse(format!("line {no}: bad state {x:?}")))?;
        let expected = l + assignment.len() as State;
        if x != expected {
            return Err(Error::Parse(format!(
                "line {no}: state {x}, expected {expected}"
            )));
        }
        let s = dist
            .symbol_index(name)
            .ok_or_else(|| Error::UnknownSymbolName(name.to_string()))?;
        assignment.push(s as u16);
    }
    let spread = SymbolSpread::from_assignment(dist.r(), dist.len(), assignment)?;
    spread.check_against(dist)?;
    Ok(spread)
}

pub fn write_spread(spread: &SymbolSpread, names: &[String]) -> String {
    let l = spread.l();
    spread
        .assignment()
        .iter()
        .enumerate()
        .map(|(i, &s)| format!("{}\t{}\n", l + i as State, names[s as usize]))
        .collect()
}

/// Symbol name used for a byte in byte-stream distributions.
pub fn byte_symbol_name(b: u8) -> String {
    format!("0x{b:02x}")
}

/// Accepts `0xHH` or a single ASCII character.
pub fn parse_byte_symbol(name: &str) -> Option<u8> {
    if let Some(hex) = name.strip_prefix("0x").or_else(|| name.strip_prefix("0X")) {
        return u8::from_str_radix(hex, 16).ok();
    }
    match name.as_bytes() {
        [b] if b.is_ascii() => Some(*b),
        _ => None,
    }
}

/// Byte histogram of `data` as a distribution over the bytes that occur, ascending.
pub fn byte_distribution(data: &[u8]) -> Result<SymbolProbs> {
    let mut hist = [0u64; 256];
    for &b in data {
        hist[b as usize] += 1;
    }
    let (names, counts): (Vec<String>, Vec<u64>) = (0..=255u8)
        .filter(|&b| hist[b as usize] > 0)
        .map(|b| (byte_symbol_name(b), hist[b as usize]))
        .unzip();
    SymbolProbs::from_counts(names, &counts)
}

/// CRC-32 over the symbol indices, each as a big-endian `u16`.
pub fn frame_checksum(symbols: &[usize]) -> u32 {
    let mut h = crc32fast::Hasher::new();
    for &s in symbols {
        h.update(&(s as u16).to_be_bytes());
    }
    h.finalize()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    pub r: u32,
    pub counts: Vec<u32>,
    /// Number of symbols `ℓ`.
    pub len: u64,
    pub frame: BinaryFrame,
    /// Present in keyed containers.
    pub checksum: Option<u32>,
}

impl Container {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let n = u16::try_from(self.counts.len())
            .map_err(|_| Error::InvalidConfig("alphabet exceeds 65535 symbols".into()))?;
        let mut out = Vec::with_capacity(27 + 2 * self.counts.len() + self.frame.payload.len());
        out.extend_from_slice(if self.checksum.is_some() {
            &KEYED_MAGIC
        } else {
            &MAGIC
        });
        out.push(self.r as u8);
        out.extend_from_slice(&n.to_be_bytes());
        for &c in &self.counts {
            let c = u16::try_from(c)
                .map_err(|_| Error::InvalidConfig(format!("count {c} exceeds 65535")))?;
            out.extend_from_slice(&c.to_be_bytes());
        }
        out.extend_from_slice(&self.len.to_be_bytes());
        out.extend_from_slice(&self.frame.final_state.to_be_bytes());
        out.extend_from_slice(&self.frame.bit_len.to_be_bytes());
        if let Some(crc) = self.checksum {
            out.extend_from_slice(&crc.to_be_bytes());
        }
        out.extend_from_slice(&self.frame.payload);
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor { bytes, pos: 0 };
        let keyed = match cur.take(4)? {
            m if m == MAGIC => false,
            m if m == KEYED_MAGIC => true,
            m => return Err(Error::Parse(format!("bad container magic {m:?}"))),
        };
        let r = cur.take(1)?[0] as u32;
        if r == 0 || r > MAX_R {
            return Err(Error::InvalidExponent(r));
        }
        let n = cur.u16()? as usize;
        let counts = (0..n)
            .map(|_| cur.u16().map(u32::from))
            .collect::<Result<Vec<_>>>()?;
        let len = cur.u64()?;
        let final_state = cur.u32()?;
        let bit_len = cur.u64()?;
        let checksum = if keyed { Some(cur.u32()?) } else { None };
        let payload = cur.bytes[cur.pos..].to_vec();
        if bit_len.div_ceil(8) != payload.len() as u64 {
            return Err(Error::Parse(format!(
                "bit length {bit_len} does not match {} payload bytes",
                payload.len()
            )));
        }
        Ok(Self {
            r,
            counts,
            len,
            frame: BinaryFrame {
                payload,
                bit_len,
                final_state,
            },
            checksum,
        })
    }

    /// Fails unless the header matches the distribution's exponent and counts.
    pub fn check_against(&self, dist: &SymbolDistribution) -> Result<()> {
        if self.r != dist.r() || self.counts != dist.counts() {
            return Err(Error::SpreadMismatch(format!(
                "container has R={} counts {:?}, distribution R={} counts {:?}",
                self.r,
                self.counts,
                dist.r(),
                dist.counts()
            )));
        }
        Ok(())
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        let s = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Parse("container header truncated".into()))?;
        self.pos = end;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{quantize, QuantizeMode};

    #[test]
    fn distribution_forms() {
        let p = parse_distribution("# example\na\t3/16\nb\t0.3125\nc\t1/2\n").unwrap();
        assert_eq!(p.names(), &["a", "b", "c"]);
        assert!(p.exact().is_some());
        let c = parse_distribution("a 3\nb 5\nc 8\n").unwrap();
        assert_eq!(c.exact(), p.exact());
        let f =
            parse_distribution("a\t0.33333333333333\nb\t0.33333333333333\nc\t0.33333333333333\n")
                .unwrap();
        assert!(f.exact().is_none());
        assert!(parse_distribution("a\t0.5\nb\t0.4\n").is_err());
        assert!(parse_distribution("a\n").is_err());
        let back = parse_distribution(&write_distribution(&p)).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn spread_roundtrip() {
        let p = parse_distribution("a\t3\nb\t5\nc\t8\n").unwrap();
        let d = quantize(&p, 4, QuantizeMode::BestFit).unwrap();
        let s = SymbolSpread::from_labels(4, &[3, 3, 1, 2, 2, 3, 1, 2, 3, 1, 2, 3, 2, 3, 3, 3])
            .unwrap();
        let text = write_spread(&s, d.names());
        assert!(text.starts_with("16\tc\n17\tc\n18\ta\n"));
        assert_eq!(parse_spread(&text, &d).unwrap(), s);
        assert!(parse_spread("17\tc\n", &d).is_err());
        assert!(matches!(
            parse_spread(&text.replace("18\ta", "18\tz"), &d),
            Err(Error::UnknownSymbolName(_))
        ));
    }

    #[test]
    fn byte_names() {
        assert_eq!(parse_byte_symbol(&byte_symbol_name(0xfe)), Some(0xfe));
        assert_eq!(parse_byte_symbol("A"), Some(b'A'));
        assert_eq!(parse_byte_symbol("AB"), None);
        let p = byte_distribution(b"abracadabra").unwrap();
        assert_eq!(p.names(), &["0x61", "0x62", "0x63", "0x64", "0x72"]);
    }

    #[test]
    fn container_roundtrip() {
        let c = Container {
            r: 4,
            counts: vec![3, 5, 8],
            len: 2,
            frame: BinaryFrame {
                payload: vec![0b1000_0000],
                bit_len: 5,
                final_state: 22,
            },
            checksum: None,
        };
        let bytes = c.to_bytes().unwrap();
        assert_eq!(&bytes[..4], b"ANS1");
        assert_eq!(bytes.len(), 4 + 1 + 2 + 6 + 8 + 4 + 8 + 1);
        assert_eq!(Container::from_bytes(&bytes).unwrap(), c);
        let keyed = Container {
            checksum: Some(frame_checksum(&[0, 0])),
            ..c.clone()
        };
        let kb = keyed.to_bytes().unwrap();
        assert_eq!(&kb[..4], b"ANSK");
        assert_eq!(Container::from_bytes(&kb).unwrap(), keyed);
        assert!(Container::from_bytes(&bytes[..10]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(Container::from_bytes(&bad).is_err());
        assert!(Container::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }
}
