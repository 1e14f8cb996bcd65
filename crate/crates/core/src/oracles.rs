//! Brute-force reference implementations for tests.
//!
//! Everything here works from explicit codeword lists built by evaluating
//! monomials point by point and XOR-ing generator rows; nothing goes through
//! the transforms, recursions or tables used by the fast paths.

use crate::bits::{BitWord, TriWord};
use crate::error::{CodeError, Result};

/// Largest dimension that will be enumerated.
pub const ORACLE_MAX_DIMENSION: usize = 20;

/// All codewords of a small code, indexed by message.
///
/// Message `u` selects basis row `i` when bit `k - 1 - i` of `u` is set, so
/// "first in list order" is the same tie-break the decoders use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codebook {
    n: usize,
    basis: Vec<BitWord>,
    words: Vec<BitWord>,
}

fn check_dimension(k: usize) -> Result<()> {
    if k > ORACLE_MAX_DIMENSION {
        return Err(CodeError::CapExceeded {
            what: "oracle dimension",
            value: k,
            cap: ORACLE_MAX_DIMENSION,
        });
    }
    Ok(())
}

/// Variable subsets of `{1..m}` of size at most `r`, by size and then
/// lexicographically on the sorted member list.
fn rm_monomials(m: usize, r: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (0u32..1 << m)
        .map(|s| (1..=m).filter(|&j| s >> (j - 1) & 1 == 1).collect::<Vec<_>>())
        .filter(|v: &Vec<usize>| v.len() <= r)
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all
}

/// Coordinates of point `idx` in `F_2^m`, `v_1` first.
fn point(m: usize, idx: usize) -> Vec<bool> {
    (1..=m).map(|j| idx >> (m - j) & 1 == 1).collect()
}

/// Evaluation vector of `prod_{j in vars} x_j`.
fn evaluate_monomial(m: usize, vars: &[usize]) -> BitWord {
    BitWord::from_bits((0..1usize << m).map(|idx| {
        let v = point(m, idx);
        vars.iter().all(|&j| v[j - 1])
    }))
}

impl Codebook {
    /// Span of `basis` listed by message; the rows must be independent.
    fn from_basis(n: usize, basis: Vec<BitWord>) -> Result<Self> {
        let k = basis.len();
        check_dimension(k)?;
        let mut words = Vec::with_capacity(1 << k);
        for u in 0usize..1 << k {
            let mut c = BitWord::zeros(n);
            for (i, row) in basis.iter().enumerate() {
                if u >> (k - 1 - i) & 1 == 1 {
                    c.xor_assign(row);
                }
            }
            words.push(c);
        }
        Ok(Codebook { n, basis, words })
    }

    /// RM(r, m) with monomials evaluated point by point.
    pub fn rm(r: usize, m: usize) -> Result<Self> {
        if r > m || m > 16 {
            return Err(CodeError::InvalidParameters(format!("oracle RM({r},{m})")));
        }
        let monos = rm_monomials(m, r);
        check_dimension(monos.len())?;
        let basis = monos.iter().map(|vars| evaluate_monomial(m, vars)).collect();
        Codebook::from_basis(1 << m, basis)
    }

    /// Span of arbitrary generator rows; dependent rows are dropped.
    pub fn linear(gen: &[BitWord]) -> Result<Self> {
        let n = gen.first().map_or(0, |g| g.len());
        if gen.iter().any(|g| g.len() != n) {
            return Err(CodeError::InvalidParameters("ragged generator".into()));
        }
        let mut span: Vec<BitWord> = vec![BitWord::zeros(n)];
        let mut basis = Vec::new();
        for g in gen {
            if span.contains(g) {
                continue;
            }
            check_dimension(basis.len() + 1)?;
            let extra: Vec<BitWord> = span.iter().map(|s| s.xor(g)).collect();
            span.extend(extra);
            basis.push(g.clone());
        }
        Codebook::from_basis(n, basis)
    }

    /// Tensor product of codes given by independent generator rows per
    /// axis; the basis is every outer product of one row per axis, laid out
    /// row-major.
    pub fn tensor(axes: &[Vec<BitWord>]) -> Result<Self> {
        if axes.is_empty() {
            return Err(CodeError::InvalidParameters("no axes".into()));
        }
        let k: usize = axes.iter().map(|a| a.len()).product();
        check_dimension(k)?;
        let mut basis: Vec<BitWord> = vec![BitWord::ones(1)];
        for rows in axes {
            let mut next = Vec::new();
            for b in &basis {
                for row in rows {
                    next.push(BitWord::from_bits(
                        (0..b.len() * row.len()).map(|i| b.get(i / row.len()) && row.get(i % row.len())),
                    ));
                }
            }
            basis = next;
        }
        let n = basis[0].len();
        Codebook::from_basis(n, basis)
    }

    /// Generator rows of RM(r, m) as used by [`Codebook::rm`].
    pub fn rm_basis(r: usize, m: usize) -> Result<Vec<BitWord>> {
        Ok(Codebook::rm(r, m)?.basis)
    }

    pub fn length(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BitWord] {
        &self.basis
    }

    pub fn words(&self) -> &[BitWord] {
        &self.words
    }

    pub fn contains(&self, w: &BitWord) -> bool {
        self.words.contains(w)
    }

    /// Encoding of message `u`.
    pub fn encode(&self, u: usize) -> &BitWord {
        &self.words[u]
    }

    /// Nearest codeword; the first one in message order among ties.
    pub fn nearest(&self, w: &BitWord) -> BitWord {
        let mut best = &self.words[0];
        let mut best_d = usize::MAX;
        for c in &self.words {
            let d = c.xor(w).count_ones();
            if d < best_d {
                best = c;
                best_d = d;
            }
        }
        best.clone()
    }

    pub fn min_distance(&self) -> usize {
        self.words
            .iter()
            .map(|c| c.iter().filter(|&b| b).count())
            .filter(|&wt| wt > 0)
            .min()
            .unwrap_or(0)
    }

    /// Codewords agreeing with `y` on every non-erased position.
    pub fn consistent(&self, y: &TriWord) -> Vec<BitWord> {
        self.words.iter().filter(|c| y.agrees_with(c)).cloned().collect()
    }

    /// Message bits (basis order) of a codeword, if it is one.
    pub fn coefficients(&self, w: &BitWord) -> Option<BitWord> {
        let k = self.dimension();
        let u = self.words.iter().position(|c| c == w)?;
        Some(BitWord::from_bits((0..k).map(|i| u >> (k - 1 - i) & 1 == 1)))
    }
}

/// Evaluation of `sum_i coeffs_i * monomial_i` over RM(r, m)'s monomials in
/// canonical order, one point at a time. No enumeration, so no cap.
pub fn evaluate_polynomial(r: usize, m: usize, coeffs: &BitWord) -> Result<BitWord> {
    let monos = rm_monomials(m, r);
    if coeffs.len() != monos.len() {
        return Err(CodeError::LengthMismatch {
            expected: monos.len(),
            actual: coeffs.len(),
        });
    }
    Ok(BitWord::from_bits((0..1usize << m).map(|idx| {
        let v = point(m, idx);
        monos
            .iter()
            .enumerate()
            .filter(|(i, vars)| coeffs.get(*i) && vars.iter().all(|&j| v[j - 1]))
            .count()
            % 2
            == 1
    })))
}

pub fn enumerate_codewords(code: &crate::rm::RmCode) -> Result<Codebook> {
    Codebook::rm(code.r(), code.m())
}

/// Tensor Reed-Muller code from its layers.
pub fn enumerate_trm(layers: &[(usize, usize)]) -> Result<Codebook> {
    let axes = layers
        .iter()
        .map(|&(r, m)| Codebook::rm_basis(r, m))
        .collect::<Result<Vec<_>>>()?;
    Codebook::tensor(&axes)
}

pub fn nearest_codeword(code: &crate::rm::RmCode, w: &BitWord) -> Result<BitWord> {
    Ok(enumerate_codewords(code)?.nearest(w))
}

pub fn min_distance_bruteforce(book: &Codebook) -> usize {
    book.min_distance()
}

pub fn consistent_codewords(book: &Codebook, y: &TriWord) -> Vec<BitWord> {
    book.consistent(y)
}

/// True iff no nonzero codeword of RM(m - t, m) is supported inside `z`.
pub fn ssv_condition_holds(m: usize, t: usize, z: &BitWord) -> Result<bool> {
    if t > m {
        return Err(CodeError::InvalidParameters(format!("t = {t} > m = {m}")));
    }
    let book = Codebook::rm(m - t, m)?;
    Ok(!book
        .words()
        .iter()
        .any(|c| !c.is_zero() && (0..c.len()).all(|i| !c.get(i) || z.get(i))))
}
