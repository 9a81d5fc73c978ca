//! Binary blocks: codewords, hard detections and error patterns.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A length-`N` sequence of bits, each stored as a `u8` in `{0, 1}`.
///
/// Positions are 0-based throughout the crate.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitBlock(Vec<u8>);

impl BitBlock {
    pub fn zeros(len: usize) -> Self {
        BitBlock(vec![0; len])
    }

    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidBit(b));
        }
        Ok(BitBlock(bits))
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        BitBlock(bits.into_iter().map(u8::from).collect())
    }

    /// Block with ones exactly at `positions`.
    pub fn from_support(len: usize, positions: &[usize]) -> Result<Self> {
        let mut block = BitBlock::zeros(len);
        for &p in positions {
            if p >= len {
                return Err(Error::IndexOutOfRange { index: p, len });
            }
            block.0[p] = 1;
        }
        Ok(block)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        self.0[i] = u8::from(bit);
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        self.0[i] ^= 1;
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().copied()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }

    /// Positions holding a one, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| (b == 1).then_some(i))
            .collect()
    }

    pub fn xor(&self, other: &BitBlock) -> Result<BitBlock> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(BitBlock(
            self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect(),
        ))
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }
}

impl fmt::Display for BitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitBlock({self})")
    }
}

impl FromStr for BitBlock {
    type Err = Error;

    /// Parses a string of `0`/`1` characters; whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(BitBlock)
    }
}

impl AsRef<[u8]> for BitBlock {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let b: BitBlock = "0101 1".parse().unwrap();
        assert_eq!(b.to_string(), "01011");
        assert_eq!(b.support(), vec![1, 3, 4]);
        assert_eq!(b.weight(), 3);
        assert!("01a".parse::<BitBlock>().is_err());
    }

    #[test]
    fn rejects_non_binary() {
        assert!(matches!(BitBlock::from_bits(vec![0, 2]), Err(Error::InvalidBit(2))));
    }

    #[test]
    fn xor_length_mismatch() {
        let a = BitBlock::zeros(3);
        let b = BitBlock::zeros(4);
        assert!(a.xor(&b).is_err());
    }
}
