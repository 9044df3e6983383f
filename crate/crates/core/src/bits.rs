//! Fixed-length bit strings.
//!
//! Position 0 is the leftmost (most significant) bit. Substring `[a]_i^j` in
//! the usual 1-indexed notation is `a.slice(i - 1, j)` here.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// A bit string of arbitrary length, MSB-first.
///
/// Bits are packed into 64-bit words with position 0 in the most significant
/// bit of the first word. Unused low bits of the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString { len, words: vec![0; word_count(len)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut b = BitString { len, words: vec![u64::MAX; word_count(len)] };
        b.clear_tail();
        b
    }

    /// Uniformly random bit string.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut b = BitString { len, words: (0..word_count(len)).map(|_| rng.random()).collect() };
        b.clear_tail();
        b
    }

    /// The low `len` bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64, "from_u64 supports at most 64 bits");
        let mut b = BitString::zeros(len);
        if len > 0 {
            let masked = if len == 64 { value } else { value & ((1u64 << len) - 1) };
            b.words[0] = masked << (64 - len);
        }
        b
    }

    /// Big-endian integer value of the string. Requires `len <= 64`.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= 64, "to_u64 supports at most 64 bits");
        if self.len == 0 {
            0
        } else {
            self.words[0] >> (64 - self.len)
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        bits.iter().copied().collect()
    }

    /// Unpacks the first `len` bits of `bytes`, MSB-first.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() * 8 < len {
            return Err(Error::LengthMismatch { expected: len, actual: bytes.len() * 8 });
        }
        let mut b = BitString::zeros(len);
        for (w, chunk) in b.words.iter_mut().zip(bytes.chunks(8)) {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            *w = u64::from_be_bytes(buf);
        }
        b.clear_tail();
        Ok(b)
    }

    /// Packs MSB-first into `ceil(len / 8)` bytes, zero-padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out: Vec<u8> = self.words.iter().flat_map(|w| w.to_be_bytes()).collect();
        out.truncate(self.len.div_ceil(8));
        out
    }

    /// Parses the big-endian hex encoding of a `len`-bit string.
    ///
    /// The value must fit in `len` bits; leading zero digits are optional.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let hex = hex.trim();
        let mut b = BitString::zeros(len);
        let mut pos = len;
        for c in hex.chars().rev() {
            let digit = c
                .to_digit(16)
                .ok_or_else(|| Error::Format(format!("invalid hex digit {c:?}")))?;
            for k in 0..4 {
                if digit >> k & 1 == 1 {
                    if pos <= k {
                        return Err(Error::Format(format!("hex value does not fit in {len} bits")));
                    }
                    b.set(pos - 1 - k, true);
                }
            }
            pos = pos.saturating_sub(4);
        }
        Ok(b)
    }

    /// Big-endian hex, padded to `ceil(len / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4);
        let mut out = vec![b'0'; digits];
        for d in 0..digits {
            let mut nibble = 0u32;
            for k in 0..4 {
                let bit_from_right = 4 * d + k;
                if bit_from_right < self.len && self.get(self.len - 1 - bit_from_right) {
                    nibble |= 1 << k;
                }
            }
            out[digits - 1 - d] = std::char::from_digit(nibble, 16).unwrap() as u8;
        }
        String::from_utf8(out).unwrap()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / 64] >> (63 - i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (63 - i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / 64] ^= 1u64 << (63 - i % 64);
    }

    /// Copy of positions `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> BitString {
        assert!(start <= end && end <= self.len, "slice {start}..{end} out of range for length {}", self.len);
        let mut out = BitString::zeros(end - start);
        for (k, i) in (start..end).enumerate() {
            if self.get(i) {
                out.set(k, true);
            }
        }
        out
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = BitString::zeros(self.len + other.len);
        for i in self.ones_positions() {
            out.set(i, true);
        }
        for i in other.ones_positions() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Extends with zero bits on the right up to `len`.
    pub fn pad_to(&self, len: usize) -> BitString {
        assert!(len >= self.len);
        let mut out = self.clone();
        out.len = len;
        out.words.resize(word_count(len), 0);
        out
    }

    /// Bitwise exclusive-or. Panics on length mismatch.
    pub fn xor(&self, other: &BitString) -> BitString {
        assert_eq!(self.len, other.len, "xor of bit strings with different lengths");
        BitString {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
        }
    }

    pub fn xor_assign(&mut self, other: &BitString) {
        assert_eq!(self.len, other.len, "xor of bit strings with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of the bitwise AND, i.e. the GF(2) inner product.
    pub fn dot(&self, other: &BitString) -> bool {
        assert_eq!(self.len, other.len, "inner product of bit strings with different lengths");
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum::<u32>() % 2 == 1
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Hamming distance. Panics on length mismatch.
    pub fn distance(&self, other: &BitString) -> usize {
        assert_eq!(self.len, other.len, "distance between bit strings with different lengths");
        self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Positions holding a one, in increasing order.
    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let lz = rest.leading_zeros() as usize;
                rest &= !(1u64 << (63 - lz));
                Some(wi * 64 + lz)
            })
        })
    }

    /// Index of the first set bit, if any.
    pub fn first_one(&self) -> Option<usize> {
        self.ones_positions().next()
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= !0u64 << (64 - rem);
            }
        }
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let bits: Vec<bool> = iter.into_iter().collect();
        let mut b = BitString::zeros(bits.len());
        for (i, bit) in bits.into_iter().enumerate() {
            if bit {
                b.set(i, true);
            }
        }
        b
    }
}

/// Parses strings of `0`/`1`, with an optional `0b` prefix and `_` separators.
impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix("0b").unwrap_or(s);
        s.chars()
            .filter(|&c| c != '_')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Format(format!("invalid binary digit {other:?}"))),
            })
            .collect()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.iter() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn u64_round_trip_is_msb_first() {
        let b = BitString::from_u64(0b0011, 4);
        assert_eq!(b, bs("0011"));
        assert_eq!(b.to_u64(), 3);
        assert!(!b.get(0));
        assert!(b.get(3));
        assert_eq!(BitString::from_u64(u64::MAX, 64).weight(), 64);
    }

    #[test]
    fn hex_is_padded_big_endian() {
        assert_eq!(bs("101101").to_hex(), "2d");
        assert_eq!(bs("0000101").to_hex(), "05");
        assert_eq!(BitString::from_hex("2d", 6).unwrap(), bs("101101"));
        assert_eq!(BitString::from_hex("5", 7).unwrap(), bs("0000101"));
        assert!(BitString::from_hex("40", 6).is_err());
        assert!(BitString::from_hex("zz", 8).is_err());
        assert_eq!(BitString::zeros(0).to_hex(), "");
    }

    #[test]
    fn bytes_are_packed_msb_first_with_zero_pad() {
        let b = bs("1010_0000_1");
        assert_eq!(b.to_bytes(), vec![0xa0, 0x80]);
        assert_eq!(BitString::from_bytes(&[0xa0, 0xff], 9).unwrap(), b);
        assert!(BitString::from_bytes(&[0xa0], 9).is_err());
    }

    #[test]
    fn slicing_and_concat() {
        let b = bs("110010111");
        assert_eq!(b.slice(2, 6), bs("0010"));
        assert_eq!(b.slice(0, 0), BitString::zeros(0));
        assert_eq!(b.slice(0, 4).concat(&b.slice(4, 9)), b);
        assert_eq!(bs("1").pad_to(3), bs("100"));
    }

    #[test]
    fn weight_distance_dot() {
        assert_eq!(bs("1101").weight(), 3);
        assert_eq!(bs("1101").distance(&bs("0111")), 2);
        assert!(bs("1101").dot(&bs("0100")));
        assert!(!bs("1101").dot(&bs("1100")));
        let ones: Vec<_> = bs("0100_0001").ones_positions().collect();
        assert_eq!(ones, vec![1, 7]);
    }

    #[test]
    fn long_strings_cross_word_boundaries() {
        let mut b = BitString::zeros(130);
        b.set(63, true);
        b.set(64, true);
        b.set(129, true);
        assert_eq!(b.ones_positions().collect::<Vec<_>>(), vec![63, 64, 129]);
        assert_eq!(b.slice(60, 70).to_string(), "0001100000");
        assert_eq!(BitString::ones(130).weight(), 130);
    }

    proptest! {
        #[test]
        fn hex_and_bytes_round_trip(bits in prop::collection::vec(any::<bool>(), 0..200)) {
            let b = BitString::from_bools(&bits);
            prop_assert_eq!(BitString::from_hex(&b.to_hex(), b.len()).unwrap(), b.clone());
            prop_assert_eq!(BitString::from_bytes(&b.to_bytes(), b.len()).unwrap(), b.clone());
            prop_assert_eq!(b.to_string().parse::<BitString>().unwrap(), b);
        }

        #[test]
        fn xor_is_self_inverse(a in prop::collection::vec(any::<bool>(), 77), b in prop::collection::vec(any::<bool>(), 77)) {
            let a = BitString::from_bools(&a);
            let b = BitString::from_bools(&b);
            prop_assert_eq!(a.xor(&b).xor(&b), a.clone());
            prop_assert_eq!(a.xor(&b).weight(), a.distance(&b));
        }
    }
}
