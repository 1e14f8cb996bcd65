//! Decoders for the short and the high-rate layer codes: a full
//! maximum-likelihood lookup table, direct ML search, and Reed's
//! majority-logic decoder.
//!
//! Ties between equidistant codewords are always broken toward the codeword
//! whose coefficient vector, read in monomial order as a big-endian integer,
//! is smallest.

use std::collections::VecDeque;
use std::io::{Read, Write};

use rayon::prelude::*;

use crate::bits::BitWord;
use crate::error::{CodeError, Result};
use crate::rm::{monomial_eval, rm_is_codeword, subset_transform, RmCode};

/// Default cap on the table's word length in bits (`2^m <= 16`).
pub const DEFAULT_TABLE_CAP_BITS: usize = 16;

/// Largest dimension for which [`ml_decode`] will enumerate codewords.
pub const ML_SEARCH_MAX_DIMENSION: usize = 20;

const TABLE_MAGIC: &[u8; 4] = b"TRML";
const TABLE_VERSION: u16 = 1;

/// Codewords indexed by message integer `u`, where monomial `i` carries bit
/// `k - 1 - i` of `u`.
fn codewords_by_message(code: &RmCode) -> Vec<BitWord> {
    let gen = code.generator();
    let k = gen.len();
    let mut out = Vec::with_capacity(1 << k);
    out.push(BitWord::zeros(code.length()));
    for u in 1usize..1 << k {
        let low = u.trailing_zeros() as usize;
        let mut c = out[u & (u - 1)].clone();
        c.xor_assign(&gen[k - 1 - low]);
        out.push(c);
    }
    out
}

/// Full ML lookup table for a code of length at most 16.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MlTable {
    code: RmCode,
    entries: Vec<u16>,
}

/// Builds the table with the default 16-bit cap.
pub fn build_ml_table(code: &RmCode) -> Result<MlTable> {
    build_ml_table_capped(code, DEFAULT_TABLE_CAP_BITS)
}

/// Builds the table by a multi-source breadth-first search over the Hamming
/// cube, seeded with every codeword. Each word inherits the smallest message
/// among its neighbours one step closer to the code, which is exactly the
/// smallest message among its nearest codewords.
pub fn build_ml_table_capped(code: &RmCode, cap_bits: usize) -> Result<MlTable> {
    let n = code.length();
    let cap = cap_bits.min(DEFAULT_TABLE_CAP_BITS);
    if n > cap {
        return Err(CodeError::CapExceeded {
            what: "ML table word length",
            value: n,
            cap,
        });
    }
    let words = codewords_by_message(code);
    let size = 1usize << n;
    let mut dist = vec![u8::MAX; size];
    let mut best = vec![u32::MAX; size];
    let mut queue = VecDeque::with_capacity(size);
    for (u, c) in words.iter().enumerate() {
        let w = c.as_u64() as usize;
        dist[w] = 0;
        best[w] = u as u32;
        queue.push_back(w);
    }
    while let Some(w) = queue.pop_front() {
        let d = dist[w];
        for b in 0..n {
            let x = w ^ (1 << b);
            if dist[x] == u8::MAX {
                dist[x] = d + 1;
                best[x] = best[w];
                queue.push_back(x);
            } else if dist[x] == d + 1 && best[w] < best[x] {
                best[x] = best[w];
            }
        }
    }
    let entries = best.iter().map(|&u| words[u as usize].as_u64() as u16).collect();
    Ok(MlTable { code: *code, entries })
}

impl MlTable {
    pub fn code(&self) -> &RmCode {
        &self.code
    }

    pub fn entries(&self) -> &[u16] {
        &self.entries
    }

    #[inline]
    pub fn lookup(&self, w: u16) -> u16 {
        self.entries[w as usize]
    }

    pub fn decode(&self, w: &BitWord) -> BitWord {
        debug_assert_eq!(w.len(), self.code.length());
        BitWord::from_u64(w.len(), self.lookup(w.as_u64() as u16) as u64)
    }

    /// `magic "TRML" | version u16 | r u8 | m u8 | entries as u16`, all
    /// little-endian.
    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(TABLE_MAGIC)?;
        out.write_all(&TABLE_VERSION.to_le_bytes())?;
        out.write_all(&[self.code.r() as u8, self.code.m() as u8])?;
        let mut buf = Vec::with_capacity(self.entries.len() * 2);
        for e in &self.entries {
            buf.extend_from_slice(&e.to_le_bytes());
        }
        out.write_all(&buf)
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<MlTable> {
        let io = |e: std::io::Error| CodeError::Format(format!("ML table: {e}"));
        let mut hdr = [0u8; 8];
        input.read_exact(&mut hdr).map_err(io)?;
        if &hdr[..4] != TABLE_MAGIC {
            return Err(CodeError::Format("ML table: bad magic".into()));
        }
        let version = u16::from_le_bytes([hdr[4], hdr[5]]);
        if version != TABLE_VERSION {
            return Err(CodeError::Format(format!("ML table: unsupported version {version}")));
        }
        let code = RmCode::new(hdr[6] as usize, hdr[7] as usize)?;
        if code.length() > DEFAULT_TABLE_CAP_BITS {
            return Err(CodeError::Format("ML table: word length above cap".into()));
        }
        let size = 1usize << code.length();
        let mut raw = vec![0u8; size * 2];
        input.read_exact(&mut raw).map_err(io)?;
        let entries: Vec<u16> = raw.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect();
        let all_codewords = entries.iter().all(|&e| {
            (e as u64) >> code.length() == 0 && rm_is_codeword(&code, &BitWord::from_u64(code.length(), e as u64))
        });
        if !all_codewords {
            return Err(CodeError::Format("ML table: entry is not a codeword".into()));
        }
        Ok(MlTable { code, entries })
    }
}

/// ML decoding by direct search over all `2^k` codewords.
pub fn ml_decode(code: &RmCode, w: &BitWord) -> Result<BitWord> {
    if w.len() != code.length() {
        return Err(CodeError::LengthMismatch {
            expected: code.length(),
            actual: w.len(),
        });
    }
    if code.dimension() > ML_SEARCH_MAX_DIMENSION {
        return Err(CodeError::CapExceeded {
            what: "ML search dimension",
            value: code.dimension(),
            cap: ML_SEARCH_MAX_DIMENSION,
        });
    }
    let mut best: Option<(usize, BitWord)> = None;
    for c in codewords_by_message(code) {
        let d = c.hamming_distance(w);
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, c));
            if d == 0 {
                break;
            }
        }
    }
    Ok(best.expect("code has at least one codeword").1)
}

/// Reed's majority-logic decoder with cached monomial evaluation vectors.
///
/// For each degree `s = r, ..., 0` and each degree-`s` monomial `S`, the
/// word is summed over the `2^(m-s)` cosets of the coordinate subspace
/// spanned by `S`; the coefficient of `S` is the strict majority of those
/// sums. The recovered degree-`s` layer is stripped before moving on.
/// Exact whenever fewer than `2^(m-r-1)` bits are wrong.
#[derive(Clone, Debug)]
pub struct MajorityDecoder {
    code: RmCode,
    /// `(variable index bits, evaluation vector)` per monomial, highest degree first.
    layers: Vec<Vec<(Vec<usize>, BitWord)>>,
}

impl MajorityDecoder {
    pub fn new(code: &RmCode) -> Self {
        let m = code.m();
        let mut layers = vec![Vec::new(); code.r() + 1];
        for &mask in code.monomials().masks() {
            let bits: Vec<usize> = (0..m).filter(|b| mask >> b & 1 == 1).collect();
            layers[bits.len()].push((bits, monomial_eval(m, mask)));
        }
        layers.reverse();
        MajorityDecoder { code: *code, layers }
    }

    pub fn code(&self) -> &RmCode {
        &self.code
    }

    pub fn decode(&self, w: &BitWord) -> BitWord {
        assert_eq!(w.len(), self.code.length(), "majority_decode: word length");
        let m = self.code.m();
        let mut residual = w.clone();
        let mut out = BitWord::zeros(w.len());
        for layer in &self.layers {
            let mut recovered = BitWord::zeros(w.len());
            for (bits, eval) in layer {
                let s = bits.len();
                let mut sums = residual.clone();
                subset_transform(&mut sums, bits.iter().copied());
                // sums at the points with every S-coordinate set are the coset sums
                let votes = sums
                    .limbs()
                    .iter()
                    .zip(eval.limbs())
                    .map(|(a, b)| (a & b).count_ones() as usize)
                    .sum::<usize>();
                if 2 * votes > 1 << (m - s) {
                    recovered.xor_assign(eval);
                }
            }
            residual.xor_assign(&recovered);
            out.xor_assign(&recovered);
        }
        out
    }
}

pub fn majority_decode(code: &RmCode, w: &BitWord) -> BitWord {
    MajorityDecoder::new(code).decode(w)
}

/// Decoder for high-rate codes: keep codewords, otherwise majority-decode.
#[derive(Clone, Debug)]
pub struct HighRateDecoder {
    majority: MajorityDecoder,
}

impl HighRateDecoder {
    pub fn new(code: &RmCode) -> Self {
        HighRateDecoder {
            majority: MajorityDecoder::new(code),
        }
    }

    pub fn code(&self) -> &RmCode {
        self.majority.code()
    }

    pub fn decode(&self, w: &BitWord) -> BitWord {
        if rm_is_codeword(self.majority.code(), w) {
            w.clone()
        } else {
            self.majority.decode(w)
        }
    }

    /// Majority step only; for callers that already know `w` is not a codeword.
    pub fn decode_non_member(&self, w: &BitWord) -> BitWord {
        self.majority.decode(w)
    }
}

pub fn highrate_decode(code: &RmCode, w: &BitWord) -> BitWord {
    HighRateDecoder::new(code).decode(w)
}

/// Direct-search table build, for cross-checking the BFS build.
pub fn build_ml_table_by_search(code: &RmCode) -> Result<MlTable> {
    let n = code.length();
    if n > DEFAULT_TABLE_CAP_BITS {
        return Err(CodeError::CapExceeded {
            what: "ML table word length",
            value: n,
            cap: DEFAULT_TABLE_CAP_BITS,
        });
    }
    let entries = (0..1usize << n)
        .into_par_iter()
        .map(|w| ml_decode(code, &BitWord::from_u64(n, w as u64)).map(|c| c.as_u64() as u16))
        .collect::<Result<Vec<_>>>()?;
    Ok(MlTable { code: *code, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rm::rm_encode;

    fn rm(r: usize, m: usize) -> RmCode {
        RmCode::new(r, m).unwrap()
    }

    fn bw(s: &str) -> BitWord {
        s.parse().unwrap()
    }

    #[test]
    fn table_examples() {
        let t = build_ml_table(&rm(0, 1)).unwrap();
        assert_eq!(t.decode(&bw("00")), bw("00"));
        assert_eq!(t.decode(&bw("01")), bw("00"));
        assert_eq!(t.decode(&bw("10")), bw("00"));
        assert_eq!(t.decode(&bw("11")), bw("11"));

        let t = build_ml_table(&rm(1, 2)).unwrap();
        assert_eq!(t.decode(&bw("1000")), bw("0000"));

        let t = build_ml_table(&rm(3, 3)).unwrap();
        assert!(t.entries().iter().enumerate().all(|(w, &e)| w as u16 == e));
    }

    #[test]
    fn table_cap() {
        assert!(matches!(
            build_ml_table(&rm(1, 5)),
            Err(CodeError::CapExceeded { value: 32, .. })
        ));
        assert!(build_ml_table_capped(&rm(1, 4), 8).is_err());
    }

    #[test]
    fn table_matches_direct_search() {
        for (r, m) in [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3), (3, 3)] {
            let code = rm(r, m);
            assert_eq!(
                build_ml_table(&code).unwrap(),
                build_ml_table_by_search(&code).unwrap(),
                "{code}"
            );
        }
    }

    #[test]
    fn table_persistence() {
        let t = build_ml_table(&rm(1, 3)).unwrap();
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"TRML");
        assert_eq!(MlTable::read_from(&buf[..]).unwrap(), t);
        let mut corrupt = buf.clone();
        corrupt[9] ^= 1;
        assert!(MlTable::read_from(&corrupt[..]).is_err());
        assert!(MlTable::read_from(&buf[..20]).is_err());
    }

    #[test]
    fn ml_decode_examples() {
        let code = rm(1, 3);
        let x1 = rm_encode(&code, &bw("0100")).unwrap();
        assert_eq!(ml_decode(&code, &x1).unwrap(), x1);
        let mut y = x1.clone();
        y.flip(0);
        y.flip(5);
        // two flips against d_min 4: exhaustive search over the 16 codewords
        let words = codewords_by_message(&code);
        let dmin = words.iter().map(|c| c.hamming_distance(&y)).min().unwrap();
        let first = words.iter().find(|c| c.hamming_distance(&y) == dmin).unwrap();
        assert_eq!(&ml_decode(&code, &y).unwrap(), first);
        assert_eq!(ml_decode(&rm(1, 2), &bw("1000")).unwrap(), bw("0000"));
        assert!(ml_decode(&rm(3, 6), &BitWord::zeros(64)).is_err());
    }

    #[test]
    fn majority_examples() {
        let code = rm(1, 3);
        let mut y = BitWord::zeros(8);
        assert_eq!(majority_decode(&code, &y), y);
        for i in 0..8 {
            y = BitWord::zeros(8);
            y.flip(i);
            assert_eq!(majority_decode(&code, &y), BitWord::zeros(8));
            assert_eq!(ml_decode(&code, &y).unwrap(), BitWord::zeros(8));
        }
    }

    #[test]
    fn majority_recovers_single_flips_rm24() {
        let code = rm(2, 4);
        let dec = MajorityDecoder::new(&code);
        for seed in 0..100u64 {
            let coeffs = BitWord::from_u64(11, seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 20);
            let c = rm_encode(&code, &coeffs).unwrap();
            assert_eq!(dec.decode(&c), c);
            for i in 0..16 {
                let mut y = c.clone();
                y.flip(i);
                assert_eq!(dec.decode(&y), c);
            }
        }
    }

    #[test]
    fn highrate_keeps_codewords() {
        let code = rm(4, 8);
        let c = rm_encode(&code, &BitWord::ones(code.dimension())).unwrap();
        assert_eq!(highrate_decode(&code, &c), c);
        let mut y = c.clone();
        for i in [3, 100, 201] {
            y.flip(i);
        }
        assert_eq!(highrate_decode(&code, &y), c);
    }
}
