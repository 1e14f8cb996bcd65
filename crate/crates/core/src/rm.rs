//! Reed-Muller code descriptors, the point and monomial layout, encoding and
//! membership.
//!
//! A point `v = (v_1, ..., v_m)` of `F_2^m` sits at index
//! `sum_j v_j * 2^(m - j)`, so `v_1` is the most significant bit. A monomial
//! over the variable set `S` is stored as the index of the point whose
//! support is exactly `S`; this makes the evaluation vector of the monomial
//! the indicator of all indices that contain that mask.
//!
//! Encoding and membership both go through the subset-sum transform over
//! GF(2), which maps an evaluation vector to its algebraic normal form and
//! back (the transform is an involution).

use std::fmt;

use crate::bits::BitWord;
use crate::error::{CodeError, Result};

/// Largest `m` accepted by [`RmCode::new`].
pub const MAX_M: usize = 30;

/// `LOW_HALF[b]` selects bit positions of a limb whose index has bit `b` clear.
const LOW_HALF: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// `ABOVE_DEGREE[d]` selects limb bit positions `b` with `popcount(b) > d`.
const ABOVE_DEGREE: [u64; 7] = {
    let mut out = [0u64; 7];
    let mut d = 0;
    while d < 7 {
        let mut b = 0;
        while b < 64 {
            if (b as u64).count_ones() as usize > d {
                out[d] |= 1 << b;
            }
            b += 1;
        }
        d += 1;
    }
    out
};

/// The code RM(r, m).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct RmCode {
    r: usize,
    m: usize,
}

impl RmCode {
    pub fn new(r: usize, m: usize) -> Result<Self> {
        if m == 0 || m > MAX_M || r > m {
            return Err(CodeError::InvalidParameters(format!(
                "RM({r},{m}) needs 0 <= r <= m and 1 <= m <= {MAX_M}"
            )));
        }
        Ok(RmCode { r, m })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn length(&self) -> usize {
        1 << self.m
    }

    pub fn dimension(&self) -> usize {
        binom_sum(self.m, self.r) as usize
    }

    pub fn d_min(&self) -> usize {
        1 << (self.m - self.r)
    }

    pub fn rate(&self) -> f64 {
        self.dimension() as f64 / self.length() as f64
    }

    pub fn monomials(&self) -> MonomialSet {
        MonomialSet::new(self.m, self.r)
    }

    /// Generator rows: monomial evaluation vectors in monomial order.
    pub fn generator(&self) -> Vec<BitWord> {
        self.monomials()
            .masks()
            .iter()
            .map(|&mask| monomial_eval(self.m, mask))
            .collect()
    }
}

impl fmt::Display for RmCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RM({},{})", self.r, self.m)
    }
}

/// Monomials of degree at most `r` in `m` variables, ordered by degree and
/// then lexicographically on their sorted variable lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialSet {
    m: usize,
    masks: Vec<usize>,
}

impl MonomialSet {
    pub fn new(m: usize, r: usize) -> Self {
        let mut masks = Vec::with_capacity(binom_sum(m, r) as usize);
        for degree in 0..=r.min(m) {
            // Combinations of {1..m} in lexicographic order.
            let mut vars: Vec<usize> = (1..=degree).collect();
            loop {
                masks.push(vars.iter().map(|&j| 1usize << (m - j)).sum());
                // advance to the next combination
                let mut k = degree;
                while k > 0 && vars[k - 1] == m - degree + k {
                    k -= 1;
                }
                if k == 0 {
                    break;
                }
                vars[k - 1] += 1;
                for i in k..degree {
                    vars[i] = vars[i - 1] + 1;
                }
            }
        }
        MonomialSet { m, masks }
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    /// Point-index masks of the monomials, in canonical order.
    pub fn masks(&self) -> &[usize] {
        &self.masks
    }

    /// 1-based variable indices of monomial `i`.
    pub fn variables(&self, i: usize) -> Vec<usize> {
        let mask = self.masks[i];
        (1..=self.m).filter(|&j| mask >> (self.m - j) & 1 == 1).collect()
    }
}

/// Lexicographic rank of a point, first coordinate most significant.
pub fn point_index(v: &[bool]) -> usize {
    v.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

/// Evaluation vector of the monomial with point-index mask `mask`.
pub fn monomial_eval(m: usize, mask: usize) -> BitWord {
    let mut w = BitWord::zeros(1 << m);
    w.set(mask, true);
    subset_transform(&mut w, 0..m);
    w
}

/// In-place subset-sum transform over GF(2) along the given index bits:
/// afterwards position `i` holds the XOR of the old values at every `j` that
/// agrees with `i` outside those bits and is a subset of `i` on them.
pub fn subset_transform(w: &mut BitWord, index_bits: impl IntoIterator<Item = usize>) {
    let limbs = w.limbs_mut();
    for b in index_bits {
        if b < 6 {
            let shift = 1 << b;
            for l in limbs.iter_mut() {
                *l ^= (*l & LOW_HALF[b]) << shift;
            }
        } else {
            let step = 1usize << (b - 6);
            let mut start = 0;
            while start + step < limbs.len() {
                let (lo, hi) = limbs[start..start + 2 * step].split_at_mut(step);
                for (h, l) in hi.iter_mut().zip(lo.iter()) {
                    *h ^= *l;
                }
                start += 2 * step;
            }
        }
    }
}

/// Subset-sum transform of `2^m` bit-sliced words (64 independent lanes).
pub fn subset_transform_sliced(words: &mut [u64], m: usize) {
    debug_assert_eq!(words.len(), 1 << m);
    for b in 0..m {
        let step = 1usize << b;
        let mut start = 0;
        while start < words.len() {
            for j in start..start + step {
                words[j + step] ^= words[j];
            }
            start += 2 * step;
        }
    }
}

/// True iff the algebraic normal form in `anf` (length `2^m`) has no
/// monomial of degree above `r`.
fn anf_degree_at_most(anf: &BitWord, r: usize) -> bool {
    for (li, &limb) in anf.limbs().iter().enumerate() {
        if limb == 0 {
            continue;
        }
        let high = li.count_ones() as usize;
        if high > r {
            return false;
        }
        let budget = r - high;
        if budget < 6 && limb & ABOVE_DEGREE[budget] != 0 {
            return false;
        }
    }
    true
}

/// Encodes coefficients given in monomial order.
pub fn rm_encode(code: &RmCode, coeffs: &BitWord) -> Result<BitWord> {
    let monos = code.monomials();
    if coeffs.len() != monos.len() {
        return Err(CodeError::LengthMismatch {
            expected: monos.len(),
            actual: coeffs.len(),
        });
    }
    let mut w = BitWord::zeros(code.length());
    for i in coeffs.ones_iter() {
        w.set(monos.masks()[i], true);
    }
    subset_transform(&mut w, 0..code.m());
    Ok(w)
}

/// Coefficients (monomial order) of a codeword; `None` if `w` is not one.
pub fn rm_coefficients(code: &RmCode, w: &BitWord) -> Option<BitWord> {
    if w.len() != code.length() {
        return None;
    }
    let mut anf = w.clone();
    subset_transform(&mut anf, 0..code.m());
    if !anf_degree_at_most(&anf, code.r()) {
        return None;
    }
    Some(BitWord::from_bits(
        code.monomials().masks().iter().map(|&mask| anf.get(mask)),
    ))
}

pub fn rm_is_codeword(code: &RmCode, w: &BitWord) -> bool {
    if w.len() != code.length() {
        return false;
    }
    if code.r() == code.m() {
        return true;
    }
    let mut anf = w.clone();
    subset_transform(&mut anf, 0..code.m());
    anf_degree_at_most(&anf, code.r())
}

/// Membership for 64 words at once: `words[j]` carries position `j` of every
/// lane. Returns the lanes that are not codewords. `words` is clobbered.
pub fn rm_non_members_sliced(code: &RmCode, words: &mut [u64]) -> u64 {
    if code.r() == code.m() {
        return 0;
    }
    subset_transform_sliced(words, code.m());
    words
        .iter()
        .enumerate()
        .filter(|(i, _)| i.count_ones() as usize > code.r())
        .fold(0, |acc, (_, &w)| acc | w)
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `sum_{i <= r} C(m, i)`.
pub fn binom_sum(m: usize, r: usize) -> u128 {
    (0..=r.min(m)).map(|i| binomial(m, i)).sum()
}

/// Binary entropy in bits, with `h(0) = h(1) = 0`.
pub fn entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}
