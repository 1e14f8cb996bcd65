//! Packed GF(2) words and partially erased words.
//!
//! Bits are stored in 64-bit limbs; position `i` lives in limb `i / 64` at bit
//! `i % 64`. Bits past `len` in the final limb are always zero.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{CodeError, Result};

#[inline]
pub(crate) fn limbs_for(len: usize) -> usize {
    len.div_ceil(64)
}

/// Binary vector of fixed length.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitWord {
    len: usize,
    limbs: Vec<u64>,
}

impl BitWord {
    pub fn zeros(len: usize) -> Self {
        BitWord {
            len,
            limbs: vec![0; limbs_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut w = BitWord {
            len,
            limbs: vec![u64::MAX; limbs_for(len)],
        };
        w.clear_tail();
        w
    }

    /// Builds a word from raw limbs, masking anything past `len`.
    pub fn from_limbs(len: usize, mut limbs: Vec<u64>) -> Self {
        limbs.resize(limbs_for(len), 0);
        let mut w = BitWord { len, limbs };
        w.clear_tail();
        w
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut limbs = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % 64 == 0 {
                limbs.push(0);
            }
            if b {
                limbs[len / 64] |= 1 << (len % 64);
            }
            len += 1;
        }
        BitWord { len, limbs }
    }

    /// Word of length `len <= 64` from the low bits of `value`.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= 64);
        BitWord::from_limbs(len, vec![value])
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
    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    /// Mutable limb access. Callers must keep the tail bits clear.
    #[inline]
    pub fn limbs_mut(&mut self) -> &mut [u64] {
        &mut self.limbs
    }

    /// Low 64 bits; convenient for words no longer than one limb.
    #[inline]
    pub fn as_u64(&self) -> u64 {
        self.limbs.first().copied().unwrap_or(0)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.limbs[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i & 63);
        if b {
            self.limbs[i >> 6] |= m;
        } else {
            self.limbs[i >> 6] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.limbs[i >> 6] ^= 1 << (i & 63);
    }

    pub fn count_ones(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    pub fn xor_assign(&mut self, other: &BitWord) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a ^= b;
        }
    }

    pub fn and_assign(&mut self, other: &BitWord) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a &= b;
        }
    }

    pub fn xor(&self, other: &BitWord) -> BitWord {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn hamming_distance(&self, other: &BitWord) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.limbs
            .iter()
            .zip(&other.limbs)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Parity of `self AND mask`.
    pub fn dot(&self, mask: &BitWord) -> bool {
        let mut acc = 0u64;
        for (a, b) in self.limbs.iter().zip(&mask.limbs) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Indices of set bits in increasing order.
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.limbs.iter().enumerate().flat_map(|(li, &limb)| {
            let mut rest = limb;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(li * 64 + b)
                }
            })
        })
    }

    /// Copies `len` bits starting at `start` into a new word.
    pub fn slice(&self, start: usize, len: usize) -> BitWord {
        debug_assert!(start + len <= self.len);
        if start.is_multiple_of(64) {
            let first = start / 64;
            let limbs = self.limbs[first..first + limbs_for(len)].to_vec();
            return BitWord::from_limbs(len, limbs);
        }
        let mut out = BitWord::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }

    /// Overwrites `src.len()` bits starting at `start`.
    pub fn write_slice(&mut self, start: usize, src: &BitWord) {
        debug_assert!(start + src.len <= self.len);
        if start.is_multiple_of(64) && (src.len.is_multiple_of(64) || start + src.len == self.len) {
            let first = start / 64;
            self.limbs[first..first + src.limbs.len()].copy_from_slice(&src.limbs);
            return;
        }
        for i in 0..src.len {
            self.set(start + i, src.get(i));
        }
    }

    /// Concatenation `self || other`.
    pub fn concat(&self, other: &BitWord) -> BitWord {
        let mut out = BitWord::zeros(self.len + other.len);
        out.write_slice(0, self);
        out.write_slice(self.len, other);
        out
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.limbs.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    /// Serializes as an 8-byte little-endian bit length followed by the
    /// limbs in little-endian byte order.
    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(&(self.len as u64).to_le_bytes())?;
        for limb in &self.limbs {
            out.write_all(&limb.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<BitWord> {
        let mut hdr = [0u8; 8];
        input
            .read_exact(&mut hdr)
            .map_err(|e| CodeError::Format(format!("word header: {e}")))?;
        let len = u64::from_le_bytes(hdr) as usize;
        let mut limbs = Vec::with_capacity(limbs_for(len));
        let mut buf = [0u8; 8];
        for _ in 0..limbs_for(len) {
            input
                .read_exact(&mut buf)
                .map_err(|e| CodeError::Format(format!("word payload: {e}")))?;
            limbs.push(u64::from_le_bytes(buf));
        }
        let w = BitWord::from_limbs(len, limbs.clone());
        if w.limbs != limbs {
            return Err(CodeError::Format("bits set past declared length".into()));
        }
        Ok(w)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = Vec::with_capacity(8 + 8 * self.limbs.len());
        self.write_to(&mut v).expect("write to vec");
        v
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({self})")
    }
}

impl FromStr for BitWord {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(CodeError::Parse(format!("unexpected symbol {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitWord::from_bits)
    }
}

/// Word over `{0, 1, *}`. Erased positions always carry a zero value bit.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TriWord {
    values: BitWord,
    erased: BitWord,
}

impl TriWord {
    pub fn new(mut values: BitWord, erased: BitWord) -> Result<Self> {
        if values.len() != erased.len() {
            return Err(CodeError::LengthMismatch {
                expected: values.len(),
                actual: erased.len(),
            });
        }
        for (v, e) in values.limbs.iter_mut().zip(&erased.limbs) {
            *v &= !e;
        }
        Ok(TriWord { values, erased })
    }

    pub fn from_word(w: BitWord) -> Self {
        let erased = BitWord::zeros(w.len());
        TriWord { values: w, erased }
    }

    pub fn all_erased(len: usize) -> Self {
        TriWord {
            values: BitWord::zeros(len),
            erased: BitWord::ones(len),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &BitWord {
        &self.values
    }

    pub fn erased(&self) -> &BitWord {
        &self.erased
    }

    pub fn into_parts(self) -> (BitWord, BitWord) {
        (self.values, self.erased)
    }

    pub fn erasure_count(&self) -> usize {
        self.erased.count_ones()
    }

    pub fn is_all_erased(&self) -> bool {
        self.erasure_count() == self.len()
    }

    /// `Some(bit)` for a known position, `None` for an erasure.
    pub fn get(&self, i: usize) -> Option<bool> {
        if self.erased.get(i) {
            None
        } else {
            Some(self.values.get(i))
        }
    }

    pub fn set(&mut self, i: usize, v: Option<bool>) {
        match v {
            Some(b) => {
                self.erased.set(i, false);
                self.values.set(i, b);
            }
            None => {
                self.erased.set(i, true);
                self.values.set(i, false);
            }
        }
    }

    /// The underlying binary word when nothing is erased.
    pub fn to_word(&self) -> Option<BitWord> {
        self.erased.is_zero().then(|| self.values.clone())
    }

    /// True when `c` agrees with every non-erased position.
    pub fn agrees_with(&self, c: &BitWord) -> bool {
        debug_assert_eq!(c.len(), self.len());
        self.values
            .limbs
            .iter()
            .zip(&c.limbs)
            .zip(&self.erased.limbs)
            .all(|((v, c), e)| (v ^ c) & !e == 0)
    }
}

impl fmt::Display for TriWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(match self.get(i) {
                Some(false) => "0",
                Some(true) => "1",
                None => "*",
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for TriWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TriWord({self})")
    }
}

impl FromStr for TriWord {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self> {
        let mut vals = Vec::new();
        let mut ers = Vec::new();
        for c in s.trim().chars() {
            let (v, e) = match c {
                '0' => (false, false),
                '1' => (true, false),
                '*' => (false, true),
                other => return Err(CodeError::Parse(format!("unexpected symbol {other:?}"))),
            };
            vals.push(v);
            ers.push(e);
        }
        TriWord::new(BitWord::from_bits(vals), BitWord::from_bits(ers))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_display() {
        let w: BitWord = "0110".parse().unwrap();
        assert_eq!(w.len(), 4);
        assert!(!w.get(0) && w.get(1) && w.get(2) && !w.get(3));
        assert_eq!(w.to_string(), "0110");
        let t: TriWord = "01*1".parse().unwrap();
        assert_eq!(t.erasure_count(), 1);
        assert_eq!(t.get(2), None);
        assert_eq!(t.to_string(), "01*1");
        assert!("01x".parse::<TriWord>().is_err());
    }

    #[test]
    fn ones_clears_tail() {
        let w = BitWord::ones(70);
        assert_eq!(w.count_ones(), 70);
        assert_eq!(w.limbs()[1], 0b111111);
    }

    #[test]
    fn slices_and_concat() {
        let w = BitWord::from_bits((0..200).map(|i| i % 3 == 0));
        let a = w.slice(0, 128);
        let b = w.slice(128, 72);
        assert_eq!(a.concat(&b), w);
        let odd = w.slice(5, 17);
        assert!(odd.iter().enumerate().all(|(i, b)| b == ((i + 5) % 3 == 0)));
        let mut z = BitWord::zeros(200);
        z.write_slice(5, &odd);
        assert_eq!(z.slice(5, 17), odd);
    }

    #[test]
    fn file_round_trip() {
        let w = BitWord::from_bits((0..77).map(|i| i % 5 == 1));
        let bytes = w.to_bytes();
        assert_eq!(&bytes[..8], &77u64.to_le_bytes());
        assert_eq!(bytes.len(), 8 + 16);
        assert_eq!(BitWord::read_from(&bytes[..]).unwrap(), w);
        assert!(BitWord::read_from(&bytes[..12]).is_err());
    }

    #[test]
    fn agreement() {
        let t: TriWord = "01*1".parse().unwrap();
        assert!(t.agrees_with(&"0111".parse().unwrap()));
        assert!(t.agrees_with(&"0101".parse().unwrap()));
        assert!(!t.agrees_with(&"1101".parse().unwrap()));
    }
}
