//! Binary and tri-valued tensors in row-major layout (last axis fastest).

use std::io::{Read, Write};

use crate::bits::{BitWord, TriWord};
use crate::error::{CodeError, Result};

/// Geometry of the `axis`-vectors of a tensor: vector `(p, s)` has its
/// `j`-th entry at `(p * len + j) * suffix + s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AxisLayout {
    pub prefix: usize,
    pub len: usize,
    pub suffix: usize,
}

impl AxisLayout {
    pub fn new(shape: &[usize], axis: usize) -> Self {
        AxisLayout {
            prefix: shape[..axis].iter().product(),
            len: shape[axis],
            suffix: shape[axis + 1..].iter().product(),
        }
    }

    #[inline]
    pub fn index(&self, p: usize, j: usize, s: usize) -> usize {
        (p * self.len + j) * self.suffix + s
    }

    pub fn vector_count(&self) -> usize {
        self.prefix * self.suffix
    }
}

fn check_shape(shape: &[usize]) -> Result<usize> {
    if shape.is_empty() || shape.contains(&0) {
        return Err(CodeError::InvalidParameters(format!(
            "tensor shape {shape:?} must be nonempty with positive extents"
        )));
    }
    shape
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .ok_or_else(|| CodeError::InvalidParameters("tensor too large".into()))
}

/// Boolean tensor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitTensor {
    shape: Vec<usize>,
    bits: BitWord,
}

impl BitTensor {
    pub fn zeros(shape: &[usize]) -> Result<Self> {
        let n = check_shape(shape)?;
        Ok(BitTensor {
            shape: shape.to_vec(),
            bits: BitWord::zeros(n),
        })
    }

    pub fn from_word(shape: &[usize], bits: BitWord) -> Result<Self> {
        let n = check_shape(shape)?;
        if bits.len() != n {
            return Err(CodeError::LengthMismatch {
                expected: n,
                actual: bits.len(),
            });
        }
        Ok(BitTensor {
            shape: shape.to_vec(),
            bits,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &BitWord {
        &self.bits
    }

    pub fn bits_mut(&mut self) -> &mut BitWord {
        &mut self.bits
    }

    pub fn into_word(self) -> BitWord {
        self.bits
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        idx.iter().zip(&self.shape).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn get(&self, idx: &[usize]) -> bool {
        self.bits.get(self.flat_index(idx))
    }

    pub fn set(&mut self, idx: &[usize], b: bool) {
        let i = self.flat_index(idx);
        self.bits.set(i, b);
    }

    /// Copies out the axis vector `(p, s)` of `layout`.
    pub fn axis_vector(&self, layout: &AxisLayout, p: usize, s: usize) -> BitWord {
        if layout.suffix == 1 {
            return self.bits.slice(layout.index(p, 0, 0), layout.len);
        }
        BitWord::from_bits((0..layout.len).map(|j| self.bits.get(layout.index(p, j, s))))
    }

    pub fn set_axis_vector(&mut self, layout: &AxisLayout, p: usize, s: usize, v: &BitWord) {
        if layout.suffix == 1 {
            self.bits.write_slice(layout.index(p, 0, 0), v);
            return;
        }
        for j in 0..layout.len {
            self.bits.set(layout.index(p, j, s), v.get(j));
        }
    }

    pub fn to_tri(&self) -> TriTensor {
        TriTensor {
            shape: self.shape.clone(),
            values: self.bits.clone(),
            erased: BitWord::zeros(self.bits.len()),
        }
    }
}

/// Tensor over `{0, 1, *}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriTensor {
    shape: Vec<usize>,
    values: BitWord,
    erased: BitWord,
}

impl TriTensor {
    pub fn new(shape: &[usize], values: BitWord, erased: BitWord) -> Result<Self> {
        let n = check_shape(shape)?;
        let word = TriWord::new(values, erased)?;
        if word.len() != n {
            return Err(CodeError::LengthMismatch {
                expected: n,
                actual: word.len(),
            });
        }
        let (values, erased) = word.into_parts();
        Ok(TriTensor {
            shape: shape.to_vec(),
            values,
            erased,
        })
    }

    pub fn all_erased(shape: &[usize]) -> Result<Self> {
        let n = check_shape(shape)?;
        Ok(TriTensor {
            shape: shape.to_vec(),
            values: BitWord::zeros(n),
            erased: BitWord::ones(n),
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
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

    /// Raw access to both planes; callers keep erased value bits at zero.
    pub fn planes_mut(&mut self) -> (&mut BitWord, &mut BitWord) {
        (&mut self.values, &mut self.erased)
    }

    pub fn erasure_count(&self) -> usize {
        self.erased.count_ones()
    }

    pub fn is_all_erased(&self) -> bool {
        self.erasure_count() == self.len()
    }

    pub fn to_bits(&self) -> Option<BitTensor> {
        self.erased.is_zero().then(|| BitTensor {
            shape: self.shape.clone(),
            bits: self.values.clone(),
        })
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.shape).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn get_flat(&self, i: usize) -> Option<bool> {
        if self.erased.get(i) {
            None
        } else {
            Some(self.values.get(i))
        }
    }

    pub fn set_flat(&mut self, i: usize, v: Option<bool>) {
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

    pub fn get(&self, idx: &[usize]) -> Option<bool> {
        self.get_flat(self.flat_index(idx))
    }

    pub fn erase_all(&mut self) {
        self.values = BitWord::zeros(self.len());
        self.erased = BitWord::ones(self.len());
    }

    pub fn axis_vector(&self, layout: &AxisLayout, p: usize, s: usize) -> TriWord {
        let (values, erased) = if layout.suffix == 1 {
            let start = layout.index(p, 0, 0);
            (
                self.values.slice(start, layout.len),
                self.erased.slice(start, layout.len),
            )
        } else {
            let idx = |j| layout.index(p, j, s);
            (
                BitWord::from_bits((0..layout.len).map(|j| self.values.get(idx(j)))),
                BitWord::from_bits((0..layout.len).map(|j| self.erased.get(idx(j)))),
            )
        };
        TriWord::new(values, erased).expect("equal lengths")
    }

    pub fn set_axis_vector(&mut self, layout: &AxisLayout, p: usize, s: usize, v: &TriWord) {
        if layout.suffix == 1 {
            let start = layout.index(p, 0, 0);
            self.values.write_slice(start, v.values());
            self.erased.write_slice(start, v.erased());
            return;
        }
        for j in 0..layout.len {
            self.set_flat(layout.index(p, j, s), v.get(j));
        }
    }

    /// `t: u32 | n_1..n_t: u32 | 2-bit symbols`, little-endian, four symbols
    /// per byte starting at the low bits (`00` = 0, `01` = 1, `10` = *).
    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(&(self.shape.len() as u32).to_le_bytes())?;
        for &n in &self.shape {
            out.write_all(&(n as u32).to_le_bytes())?;
        }
        let mut buf = vec![0u8; self.len().div_ceil(4)];
        for i in 0..self.len() {
            let sym: u8 = if self.erased.get(i) {
                0b10
            } else {
                self.values.get(i) as u8
            };
            buf[i / 4] |= sym << (2 * (i % 4));
        }
        out.write_all(&buf)
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<TriTensor> {
        let io = |e: std::io::Error| CodeError::Format(format!("tensor file: {e}"));
        let mut word = [0u8; 4];
        input.read_exact(&mut word).map_err(io)?;
        let t = u32::from_le_bytes(word) as usize;
        if t == 0 || t > 64 {
            return Err(CodeError::Format(format!("tensor file: bad order {t}")));
        }
        let mut shape = Vec::with_capacity(t);
        for _ in 0..t {
            input.read_exact(&mut word).map_err(io)?;
            shape.push(u32::from_le_bytes(word) as usize);
        }
        let n = check_shape(&shape).map_err(|e| CodeError::Format(e.to_string()))?;
        let mut buf = vec![0u8; n.div_ceil(4)];
        input.read_exact(&mut buf).map_err(io)?;
        let mut values = BitWord::zeros(n);
        let mut erased = BitWord::zeros(n);
        for i in 0..n {
            match (buf[i / 4] >> (2 * (i % 4))) & 0b11 {
                0b00 => {}
                0b01 => values.set(i, true),
                0b10 => erased.set(i, true),
                _ => return Err(CodeError::Format(format!("tensor file: bad symbol at {i}"))),
            }
        }
        TriTensor::new(&shape, values, erased)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = Vec::new();
        self.write_to(&mut v).expect("write to vec");
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_indexing() {
        let l = AxisLayout::new(&[2, 3, 4], 1);
        assert_eq!((l.prefix, l.len, l.suffix), (2, 3, 4));
        assert_eq!(l.index(1, 2, 3), 23);
        assert_eq!(l.vector_count(), 8);
    }

    #[test]
    fn axis_vectors_round_trip() {
        let shape = [3, 4, 5];
        let bits = BitWord::from_bits((0..60).map(|i| i % 7 < 3));
        let mut t = BitTensor::from_word(&shape, bits).unwrap();
        let l = AxisLayout::new(&shape, 1);
        let v = t.axis_vector(&l, 2, 3);
        let expect: Vec<bool> = (0..4).map(|j| t.get(&[2, j, 3])).collect();
        assert_eq!(v, BitWord::from_bits(expect));
        let ones = BitWord::ones(4);
        t.set_axis_vector(&l, 2, 3, &ones);
        assert!((0..4).all(|j| t.get(&[2, j, 3])));
    }

    #[test]
    fn file_format() {
        let mut t = TriTensor::all_erased(&[2, 3]).unwrap();
        t.set_flat(0, Some(false));
        t.set_flat(1, Some(true));
        let bytes = t.to_bytes();
        assert_eq!(&bytes[..12], &[2, 0, 0, 0, 2, 0, 0, 0, 3, 0, 0, 0]);
        // symbols 0,1,*,* then *,*
        assert_eq!(bytes[12], 0b1010_0100);
        assert_eq!(bytes[13], 0b0000_1010);
        assert_eq!(TriTensor::read_from(&bytes[..]).unwrap(), t);
        let mut bad = bytes.clone();
        bad[12] |= 0b11;
        assert!(TriTensor::read_from(&bad[..]).is_err());
        assert!(TriTensor::read_from(&bytes[..13]).is_err());
    }
}
