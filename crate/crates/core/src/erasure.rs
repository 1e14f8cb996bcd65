//! Erasure completion: the recursive Reed-Muller tester/completer and the
//! Gaussian-elimination completer for arbitrary linear codes.

use crate::bits::{BitWord, TriWord};
use crate::error::{CodeError, Result};
use crate::gf2::BitMatrix;
use crate::rm::RmCode;

/// Result of an erasure completion attempt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ErasureOutcome {
    /// A codeword agreeing with every non-erased input position.
    Completed(BitWord),
    /// No codeword fits, or (for the linear solver) more than one does.
    Inconsistent,
}

impl ErasureOutcome {
    pub fn completed(self) -> Option<BitWord> {
        match self {
            ErasureOutcome::Completed(c) => Some(c),
            ErasureOutcome::Inconsistent => None,
        }
    }
}

/// Finds the codeword of `code` consistent with `y`, which must carry fewer
/// than `2^(m-r)` erasures. Runs in `O(m 2^m)`.
pub fn rm_complete(code: &RmCode, y: &TriWord) -> Result<ErasureOutcome> {
    if y.len() != code.length() {
        return Err(CodeError::LengthMismatch {
            expected: code.length(),
            actual: y.len(),
        });
    }
    let erasures = y.erasure_count();
    if erasures >= code.d_min() {
        return Err(CodeError::TooManyErasures {
            erasures,
            limit: code.d_min(),
        });
    }
    let (r, m) = (code.r(), code.m());
    let vals = y.values().limbs();
    let ers = y.erased().limbs();
    let out = if m <= 6 {
        complete_small(r, m, vals[0], ers[0]).map(|c| vec![c])
    } else {
        complete_large(r, m, vals, ers)
    };
    Ok(match out {
        Some(limbs) => ErasureOutcome::Completed(BitWord::from_limbs(code.length(), limbs)),
        None => ErasureOutcome::Inconsistent,
    })
}

#[inline]
fn low_mask(len: usize) -> u64 {
    if len == 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Words of length `2^m <= 64` held in a single limb.
fn complete_small(r: usize, m: usize, v: u64, e: u64) -> Option<u64> {
    let full = low_mask(1 << m);
    if r == 0 {
        let known = !e & full;
        let ones = v & known;
        return if ones == 0 {
            Some(0)
        } else if ones == known {
            Some(full)
        } else {
            None
        };
    }
    if r == m {
        return Some(v & full);
    }
    let half = 1usize << (m - 1);
    let hm = low_mask(half);
    let (v0, v1) = (v & hm, (v >> half) & hm);
    let (e0, e1) = (e & hm, (e >> half) & hm);
    let es = e0 | e1;
    let c_sum = complete_small(r - 1, m - 1, (v0 ^ v1) & !es, es)?;
    let c = if e1.count_ones() < e0.count_ones() {
        let c1 = complete_small(r, m - 1, v1, e1)?;
        (c1 ^ c_sum) | (c1 << half)
    } else {
        let c0 = complete_small(r, m - 1, v0, e0)?;
        c0 | ((c0 ^ c_sum) << half)
    };
    ((c ^ v) & !e & full == 0).then_some(c)
}

fn popcount(limbs: &[u64]) -> u32 {
    limbs.iter().map(|l| l.count_ones()).sum()
}

/// Words of length `2^m > 64`, i.e. `2^(m-6)` limbs.
fn complete_large(r: usize, m: usize, v: &[u64], e: &[u64]) -> Option<Vec<u64>> {
    if m <= 6 {
        return complete_small(r, m, v[0], e[0]).map(|c| vec![c]);
    }
    if r == 0 {
        let mut any_one = false;
        let mut any_zero = false;
        for (&vl, &el) in v.iter().zip(e) {
            any_one |= vl & !el != 0;
            any_zero |= !vl & !el != 0;
        }
        return match (any_zero, any_one) {
            (true, true) => None,
            (_, true) => Some(vec![u64::MAX; v.len()]),
            _ => Some(vec![0; v.len()]),
        };
    }
    if r == m {
        return Some(v.to_vec());
    }
    let mid = v.len() / 2;
    let (v0, v1) = v.split_at(mid);
    let (e0, e1) = e.split_at(mid);
    let mut s_vals = Vec::with_capacity(mid);
    let mut s_ers = Vec::with_capacity(mid);
    for i in 0..mid {
        let es = e0[i] | e1[i];
        s_ers.push(es);
        s_vals.push((v0[i] ^ v1[i]) & !es);
    }
    let c_sum = complete_large(r - 1, m - 1, &s_vals, &s_ers)?;
    let mut c = Vec::with_capacity(v.len());
    if popcount(e1) < popcount(e0) {
        let c1 = complete_large(r, m - 1, v1, e1)?;
        c.extend(c1.iter().zip(&c_sum).map(|(a, b)| a ^ b));
        c.extend_from_slice(&c1);
    } else {
        let c0 = complete_large(r, m - 1, v0, e0)?;
        c.extend_from_slice(&c0);
        c.extend(c0.iter().zip(&c_sum).map(|(a, b)| a ^ b));
    }
    let consistent = c.iter().zip(v).zip(e).all(|((c, v), e)| (c ^ v) & !e == 0);
    consistent.then_some(c)
}

/// The completion map f_C for a Reed-Muller code: the consistent codeword
/// when there are fewer than `d_min` erasures and one exists, otherwise the
/// all-erased word.
pub fn f_rm(code: &RmCode, x: &TriWord) -> TriWord {
    assert_eq!(x.len(), code.length(), "f_rm: word length");
    match rm_complete(code, x) {
        Ok(ErasureOutcome::Completed(c)) => TriWord::from_word(c),
        _ => TriWord::all_erased(x.len()),
    }
}

/// Erasure solver for a linear code given by generator rows.
///
/// Parity checks are derived once from the generator; each completion solves
/// `H_E x = H_U y_U` for the erased coordinates `E`.
#[derive(Clone, Debug)]
pub struct LinearCompleter {
    n: usize,
    checks: Vec<BitWord>,
}

impl LinearCompleter {
    pub fn new(generator: &[BitWord]) -> Result<Self> {
        let n = generator
            .first()
            .map(|g| g.len())
            .ok_or_else(|| CodeError::InvalidParameters("empty generator".into()))?;
        if let Some(bad) = generator.iter().find(|g| g.len() != n) {
            return Err(CodeError::LengthMismatch {
                expected: n,
                actual: bad.len(),
            });
        }
        let checks = BitMatrix::new(n, generator.to_vec()).dual_basis();
        Ok(LinearCompleter { n, checks })
    }

    pub fn length(&self) -> usize {
        self.n
    }

    pub fn checks(&self) -> &[BitWord] {
        &self.checks
    }

    pub fn is_member(&self, w: &BitWord) -> bool {
        self.checks.iter().all(|h| !h.dot(w))
    }

    pub fn complete(&self, y: &TriWord) -> Result<ErasureOutcome> {
        if y.len() != self.n {
            return Err(CodeError::LengthMismatch {
                expected: self.n,
                actual: y.len(),
            });
        }
        let erased: Vec<usize> = y.erased().ones_iter().collect();
        let ne = erased.len();
        // Each check becomes one equation over the erased unknowns plus a
        // right-hand side in column `ne`.
        let rows: Vec<BitWord> = self
            .checks
            .iter()
            .map(|h| {
                let mut row = BitWord::zeros(ne + 1);
                for (k, &pos) in erased.iter().enumerate() {
                    if h.get(pos) {
                        row.set(k, true);
                    }
                }
                if h.dot(y.values()) {
                    row.set(ne, true);
                }
                row
            })
            .collect();
        let mut system = BitMatrix::new(ne + 1, rows);
        let pivots = system.rref_on(0..ne);
        let feasible = system.rows()[pivots.len()..].iter().all(|row| !row.get(ne));
        if !feasible || pivots.len() < ne {
            return Ok(ErasureOutcome::Inconsistent);
        }
        let mut c = y.values().clone();
        for (i, &k) in pivots.iter().enumerate() {
            c.set(erased[k], system.rows()[i].get(ne));
        }
        Ok(ErasureOutcome::Completed(c))
    }
}

/// One-shot Gaussian-elimination completion for the code spanned by `gen`.
/// Returns `Inconsistent` when no codeword fits or the fit is not unique.
pub fn linear_complete(gen: &[BitWord], y: &TriWord) -> Result<ErasureOutcome> {
    LinearCompleter::new(gen)?.complete(y)
}
