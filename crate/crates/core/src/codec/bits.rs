//! MSB-first bit buffers and the Elias-gamma integer code.

use std::fmt;

use super::CodecError;

/// An owned bit sequence, packed MSB-first into bytes.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Bits {
    bytes: Vec<u8>,
    len: usize,
}

impl Bits {
    pub fn new() -> Self {
        Self::default()
    }

    /// Takes the first `len` bits of `bytes`; trailing bits are zeroed.
    pub fn from_bytes(mut bytes: Vec<u8>, len: usize) -> Self {
        let len = len.min(bytes.len() * 8);
        bytes.truncate(len.div_ceil(8));
        if !len.is_multiple_of(8) {
            let last = bytes.len() - 1;
            bytes[last] &= 0xffu8 << (8 - len % 8);
        }
        Bits { bytes, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed bytes, zero-padded to the byte boundary.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        (index < self.len).then(|| self.bytes[index / 8] & (0x80 >> (index % 8)) != 0)
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.len() - 1;
            self.bytes[last] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Writes the low `width` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        for shift in (0..width).rev() {
            self.push((value >> shift) & 1 == 1);
        }
    }

    pub fn extend(&mut self, other: &Bits) {
        for i in 0..other.len {
            self.push(other.get(i).unwrap_or(false));
        }
    }

    /// Appends the Elias-gamma code of `n`; `n` must be positive.
    pub fn push_gamma(&mut self, n: u64) {
        assert!(n > 0, "Elias gamma cannot encode 0");
        let width = 64 - n.leading_zeros();
        for _ in 1..width {
            self.push(false);
        }
        self.push_bits(n, width);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.bytes[i / 8] & (0x80 >> (i % 8)) != 0)
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits[{}; ", self.len)?;
        for b in self.iter().take(64) {
            write!(f, "{}", b as u8)?;
        }
        if self.len > 64 {
            write!(f, "…")?;
        }
        write!(f, "]")
    }
}

/// `|γ(n)| = 2⌊log₂ n⌋ + 1`.
pub fn gamma_length(n: u64) -> usize {
    assert!(n > 0, "Elias gamma cannot encode 0");
    2 * (63 - n.leading_zeros() as usize) + 1
}

/// Sequential reader over a [`Bits`] buffer that tracks its position.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bits: &'a Bits,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a Bits) -> Self {
        BitReader { bits, pos: 0 }
    }

    /// Bits consumed so far.
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool, CodecError> {
        let bit = self
            .bits
            .get(self.pos)
            .ok_or(CodecError::Truncated { offset: self.pos })?;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, width: u32) -> Result<u64, CodecError> {
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | self.read_bit()? as u64;
        }
        Ok(v)
    }

    pub fn read_gamma(&mut self) -> Result<u64, CodecError> {
        let start = self.pos;
        let mut zeros = 0u32;
        while !self.read_bit()? {
            zeros += 1;
            if zeros > 63 {
                return Err(CodecError::Malformed {
                    offset: start,
                    reason: "Elias-gamma prefix longer than 63 bits".into(),
                });
            }
        }
        let rest = self.read_bits(zeros)?;
        Ok((1u64 << zeros) | rest)
    }
}
