//! Frame encoding and decoding.
//!
//! The encoder walks the symbol frame last-to-first. Step `i` emits the `k` low bits
//! `b_i` of the current state, most significant bit first. The payload is laid out as
//! `b_1 | b_2 | … | b_ℓ`, so the decoder, which recovers `s_1` first from the final
//! state, reads it front to back. Bytes are packed MSB-first.

use crate::error::{Error, Result};
use crate::tables::CodingTables;
use crate::State;

/// A sequence of symbol indices into the distribution's alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolFrame {
    pub symbols: Vec<usize>,
}

impl SymbolFrame {
    pub fn new(symbols: Vec<usize>) -> Self {
        Self { symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Encoder output: the packed payload, its length in bits and the final state `x_0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryFrame {
    pub payload: Vec<u8>,
    pub bit_len: u64,
    pub final_state: State,
}

#[derive(Debug, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    bit_len: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the `count` low bits of `value`, most significant first.
    pub fn write(&mut self, value: u32, count: u32) {
        for i in (0..count).rev() {
            let bit = (value >> i) & 1;
            let offset = (self.bit_len % 8) as u32;
            if offset == 0 {
                self.bytes.push(0);
            }
            if bit == 1 {
                *self.bytes.last_mut().unwrap() |= 0x80 >> offset;
            }
            self.bit_len += 1;
        }
    }

    pub fn bit_len(&self) -> u64 {
        self.bit_len
    }

    pub fn finish(self) -> (Vec<u8>, u64) {
        (self.bytes, self.bit_len)
    }
}

#[derive(Debug)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    bit_len: u64,
    pos: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8], bit_len: u64) -> Self {
        Self {
            bytes,
            bit_len: bit_len.min(bytes.len() as u64 * 8),
            pos: 0,
        }
    }

    /// Reads `count ≤ 32` bits MSB-first, or `None` when fewer remain.
    pub fn read(&mut self, count: u32) -> Option<u32> {
        if self.remaining() < count as u64 {
            return None;
        }
        let mut value = 0u32;
        for _ in 0..count {
            let byte = self.bytes[(self.pos / 8) as usize];
            let bit = (byte >> (7 - (self.pos % 8))) & 1;
            value = (value << 1) | bit as u32;
            self.pos += 1;
        }
        Some(value)
    }

    pub fn remaining(&self) -> u64 {
        self.bit_len - self.pos
    }
}

/// Encodes `frame` starting from state `x_init ∈ I`.
pub fn encode(frame: &SymbolFrame, tables: &CodingTables, x_init: State) -> Result<BinaryFrame> {
    tables.check_state(x_init)?;
    let n = tables.symbols();
    let mut steps: Vec<(u32, u32)> = Vec::with_capacity(frame.len());
    let mut x = x_init;
    for &s in frame.symbols.iter().rev() {
        if s >= n {
            return Err(Error::UnknownSymbol(s));
        }
        let (k, bits, next) = tables.step(s, x);
        steps.push((bits, k));
        x = next;
    }
    let mut writer = BitWriter::new();
    for &(bits, k) in steps.iter().rev() {
        writer.write(bits, k);
    }
    let (payload, bit_len) = writer.finish();
    Ok(BinaryFrame {
        payload,
        bit_len,
        final_state: x,
    })
}

/// Decodes `len` symbols. Fails if the payload runs out or bits are left over.
pub fn decode(frame: &BinaryFrame, tables: &CodingTables, len: u64) -> Result<SymbolFrame> {
    tables.check_state(frame.final_state)?;
    if frame.bit_len > frame.payload.len() as u64 * 8 {
        return Err(Error::Parse(format!(
            "bit length {} exceeds payload of {} bytes",
            frame.bit_len,
            frame.payload.len()
        )));
    }
    let mut reader = BitReader::new(&frame.payload, frame.bit_len);
    let mut x = frame.final_state;
    let mut symbols = Vec::with_capacity(len.min(1 << 24) as usize);
    for decoded in 0..len {
        let d = tables.decode_entry(x);
        let k = tables.read_count(d.y);
        let bits = reader.read(k).ok_or(Error::PayloadExhausted {
            decoded,
            expected: len,
        })?;
        symbols.push(d.symbol as usize);
        x = (d.y << k) | bits;
        tables.check_state(x)?;
    }
    if reader.remaining() > 0 {
        return Err(Error::TrailingBits(reader.remaining()));
    }
    Ok(SymbolFrame { symbols })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::SymbolDistribution;
    use crate::spread::SymbolSpread;

    fn example_tables() -> CodingTables {
        let dist = SymbolDistribution::from_counts(
            vec!["1".into(), "2".into(), "3".into()],
            4,
            vec![3, 5, 8],
        )
        .unwrap();
        let spread =
            SymbolSpread::from_labels(4, &[3, 3, 1, 2, 2, 3, 1, 2, 3, 1, 2, 3, 2, 3, 3, 3])
                .unwrap();
        CodingTables::build(&dist, &spread).unwrap()
    }

    #[test]
    fn single_symbol_frame() {
        let t = example_tables();
        let out = encode(&SymbolFrame::new(vec![2]), &t, 16).unwrap();
        assert_eq!(out.bit_len, 1);
        assert_eq!(out.payload, vec![0]);
        assert_eq!(out.final_state, 16);
        assert_eq!(decode(&out, &t, 1).unwrap().symbols, vec![2]);
    }

    #[test]
    fn empty_frame() {
        let t = example_tables();
        let out = encode(&SymbolFrame::default(), &t, 21).unwrap();
        assert_eq!(out.bit_len, 0);
        assert!(out.payload.is_empty());
        assert_eq!(out.final_state, 21);
        assert!(decode(&out, &t, 0).unwrap().is_empty());
    }

    #[test]
    fn payload_order_is_frame_order() {
        let t = example_tables();
        // s_1 then s_1 from x = 24: the second symbol is encoded first.
        let frame = SymbolFrame::new(vec![0, 0]);
        let out = encode(&frame, &t, 24).unwrap();
        // step for s_2 at x=24: k=3, bits 000, x'=18; step for s_1 at x=18: k=2, bits 10.
        assert_eq!(out.bit_len, 5);
        assert_eq!(out.payload, vec![0b1000_0000]);
        assert_eq!(out.final_state, 22);
        assert_eq!(decode(&out, &t, 2).unwrap(), frame);
    }

    #[test]
    fn errors() {
        let t = example_tables();
        assert!(matches!(
            encode(&SymbolFrame::new(vec![3]), &t, 16),
            Err(Error::UnknownSymbol(3))
        ));
        assert!(matches!(
            encode(&SymbolFrame::new(vec![0]), &t, 15),
            Err(Error::StateOutOfRange(15))
        ));
        let out = encode(&SymbolFrame::new(vec![0, 1, 2, 0]), &t, 16).unwrap();
        let short = BinaryFrame {
            bit_len: out.bit_len - 1,
            ..out.clone()
        };
        assert!(matches!(
            decode(&short, &t, 4),
            Err(Error::PayloadExhausted { .. })
        ));
        assert!(matches!(decode(&out, &t, 1), Err(Error::TrailingBits(_))));
    }

    #[test]
    fn bit_io_roundtrip() {
        let mut w = BitWriter::new();
        w.write(0b101, 3);
        w.write(0, 0);
        w.write(0xABCD, 16);
        let (bytes, len) = w.finish();
        assert_eq!(len, 19);
        let mut r = BitReader::new(&bytes, len);
        assert_eq!(r.read(3), Some(0b101));
        assert_eq!(r.read(0), Some(0));
        assert_eq!(r.read(16), Some(0xABCD));
        assert_eq!(r.read(1), None);
    }
}
