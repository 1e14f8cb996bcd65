//! Decoding arbitrary tensor codes `C_1 ⊗ ... ⊗ C_t` from adversarial errors.
//!
//! The recursive decoder peels the last axis: each `(t-1)`-dimensional slice
//! is decoded on its own, every `t`-axis vector is then completed with
//! `f_{C_t}`, and the result is discarded (all erasures) if it still has
//! erasures or sits at distance `>= prod d_min / 2` from the input.
//!
//! Unrolling the recursion gives the schedule used here: for `k = 1..t`,
//! complete every `k`-axis vector of the whole tensor, then (for `k >= 2`)
//! run the erasure/distance check on every `k`-dimensional subtensor spanned
//! by the first `k` axes. Subtensors never interact before their check, so
//! the two schedules produce identical outputs.

use std::collections::HashMap;
use std::fmt;

use crate::bits::{BitWord, TriWord};
use crate::erasure::{f_rm, ErasureOutcome, LinearCompleter};
use crate::error::{CodeError, Result};
use crate::gf2::BitMatrix;
use crate::rm::{rm_is_codeword, rm_non_members_sliced, RmCode};
use crate::tensor::{AxisLayout, TriTensor};

/// A linear component code together with its completion map `f_C`.
pub trait ComponentCode: Send + Sync + fmt::Debug {
    fn length(&self) -> usize;

    /// True minimum distance.
    fn d_min(&self) -> usize;

    /// Generator rows (not necessarily independent).
    fn generator(&self) -> Vec<BitWord>;

    fn is_member(&self, w: &BitWord) -> bool;

    /// `f_C`: the consistent codeword when `x` has fewer than `d_min`
    /// erasures and one exists, the all-erased word otherwise.
    fn complete(&self, x: &TriWord) -> TriWord;

    /// Runtime bound of [`ComponentCode::complete`] in terms of the length `n`.
    fn cost_note(&self) -> &'static str;

    /// Membership for 64 words at once; `words[j]` holds position `j` of
    /// each lane. Returns the mask of lanes that are not codewords.
    /// `words` may be clobbered.
    fn non_members_sliced(&self, words: &mut [u64]) -> u64 {
        let mut bad = 0u64;
        for lane in 0..64 {
            let w = BitWord::from_bits(words.iter().map(|&x| x >> lane & 1 == 1));
            if !self.is_member(&w) {
                bad |= 1 << lane;
            }
        }
        bad
    }
}

/// Reed-Muller component backed by the recursive erasure completer.
#[derive(Clone, Debug)]
pub struct RmComponent {
    code: RmCode,
}

pub fn rm_component(code: RmCode) -> RmComponent {
    RmComponent { code }
}

impl RmComponent {
    pub fn code(&self) -> &RmCode {
        &self.code
    }
}

impl ComponentCode for RmComponent {
    fn length(&self) -> usize {
        self.code.length()
    }

    fn d_min(&self) -> usize {
        self.code.d_min()
    }

    fn generator(&self) -> Vec<BitWord> {
        self.code.generator()
    }

    fn is_member(&self, w: &BitWord) -> bool {
        rm_is_codeword(&self.code, w)
    }

    fn complete(&self, x: &TriWord) -> TriWord {
        f_rm(&self.code, x)
    }

    fn cost_note(&self) -> &'static str {
        "O(n log n)"
    }

    fn non_members_sliced(&self, words: &mut [u64]) -> u64 {
        rm_non_members_sliced(&self.code, words)
    }
}

/// Largest dimension for which [`linear_component`] enumerates codewords to
/// find the minimum distance.
pub const LINEAR_DMIN_MAX_DIMENSION: usize = 24;

/// Arbitrary binary linear code backed by Gaussian elimination.
#[derive(Clone, Debug)]
pub struct LinearComponent {
    generator: Vec<BitWord>,
    d_min: usize,
    completer: LinearCompleter,
}

pub fn linear_component(generator: &[BitWord]) -> Result<LinearComponent> {
    let completer = LinearCompleter::new(generator)?;
    let n = completer.length();
    let mut basis = BitMatrix::new(n, generator.to_vec());
    let rank = basis.rref().len();
    if rank == 0 {
        return Err(CodeError::InvalidParameters("zero code has no minimum distance".into()));
    }
    if rank > LINEAR_DMIN_MAX_DIMENSION {
        return Err(CodeError::CapExceeded {
            what: "linear code dimension",
            value: rank,
            cap: LINEAR_DMIN_MAX_DIMENSION,
        });
    }
    // Gray-code walk over all nonzero codewords.
    let rows = &basis.rows()[..rank];
    let mut c = BitWord::zeros(n);
    let mut d_min = n;
    for step in 1u64..1 << rank {
        c.xor_assign(&rows[step.trailing_zeros() as usize]);
        d_min = d_min.min(c.count_ones());
    }
    Ok(LinearComponent {
        generator: generator.to_vec(),
        d_min,
        completer,
    })
}

impl ComponentCode for LinearComponent {
    fn length(&self) -> usize {
        self.completer.length()
    }

    fn d_min(&self) -> usize {
        self.d_min
    }

    fn generator(&self) -> Vec<BitWord> {
        self.generator.clone()
    }

    fn is_member(&self, w: &BitWord) -> bool {
        self.completer.is_member(w)
    }

    fn complete(&self, x: &TriWord) -> TriWord {
        if x.erasure_count() >= self.d_min {
            return TriWord::all_erased(x.len());
        }
        match self.completer.complete(x) {
            Ok(ErasureOutcome::Completed(c)) => TriWord::from_word(c),
            _ => TriWord::all_erased(x.len()),
        }
    }

    fn cost_note(&self) -> &'static str {
        "O(n^3)"
    }

    fn non_members_sliced(&self, words: &mut [u64]) -> u64 {
        self.completer
            .checks()
            .iter()
            .fold(0, |bad, h| bad | h.ones_iter().fold(0u64, |acc, j| acc ^ words[j]))
    }
}

/// `ceil(prod d_i / (2 max d_i)) - 1`.
pub fn adversarial_radius(codes: &[&dyn ComponentCode]) -> u128 {
    assert!(!codes.is_empty(), "adversarial_radius: no component codes");
    let prod: u128 = codes.iter().map(|c| c.d_min() as u128).product();
    let max = codes.iter().map(|c| c.d_min() as u128).max().unwrap_or(1);
    prod.div_ceil(2 * max) - 1
}

/// Linear recipe for a fixed erasure pattern: the row-reduced generator with
/// pivots on non-erased coordinates. The codeword agreeing with a received
/// vector on the pivots is the XOR of the rows whose pivot bit is set.
#[derive(Clone, Debug)]
struct ErasureTemplate {
    pivots: Vec<usize>,
    rows: Vec<BitWord>,
}

impl ErasureTemplate {
    fn build(generator: Vec<BitWord>, erased: &BitWord) -> Self {
        let n = erased.len();
        let mut g = BitMatrix::new(n, generator);
        let pivots = g.rref_on((0..n).filter(|&j| !erased.get(j)));
        let rows = g.into_rows().into_iter().take(pivots.len()).collect();
        ErasureTemplate { pivots, rows }
    }

    fn apply(&self, x: &TriWord) -> Option<BitWord> {
        let mut c = BitWord::zeros(x.len());
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if x.values().get(p) {
                c.xor_assign(row);
            }
        }
        x.agrees_with(&c).then_some(c)
    }
}

/// Options for [`tensor_decode_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdversarialConfig {
    /// Reuse one linear solution per distinct erasure pattern and test
    /// erasure-free vectors 64 at a time. When off, every axis vector goes
    /// through the component's own `complete`.
    pub use_pattern_cache: bool,
}

impl Default for AdversarialConfig {
    fn default() -> Self {
        AdversarialConfig {
            use_pattern_cache: true,
        }
    }
}

/// Work counters for one decode.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AdversarialStats {
    /// Axis vectors handled per axis.
    pub vectors: Vec<usize>,
    /// Erasure templates solved (cache misses).
    pub templates_built: usize,
    /// Subtensors replaced by erasures, per axis level.
    pub erased_subtensors: Vec<usize>,
}

struct TemplateCache<'a> {
    code: &'a dyn ComponentCode,
    templates: HashMap<BitWord, ErasureTemplate>,
    built: usize,
}

impl<'a> TemplateCache<'a> {
    fn new(code: &'a dyn ComponentCode) -> Self {
        TemplateCache {
            code,
            templates: HashMap::new(),
            built: 0,
        }
    }

    fn complete(&mut self, x: &TriWord) -> TriWord {
        let e = x.erasure_count();
        if e >= self.code.d_min() {
            return TriWord::all_erased(x.len());
        }
        if e == 0 {
            return if self.code.is_member(x.values()) {
                x.clone()
            } else {
                TriWord::all_erased(x.len())
            };
        }
        let code = self.code;
        let built = &mut self.built;
        let template = self.templates.entry(x.erased().clone()).or_insert_with_key(|mask| {
            *built += 1;
            ErasureTemplate::build(code.generator(), mask)
        });
        match template.apply(x) {
            Some(c) => TriWord::from_word(c),
            None => TriWord::all_erased(x.len()),
        }
    }
}

fn complete_one(code: &dyn ComponentCode, cache: &mut Option<TemplateCache<'_>>, x: &TriWord) -> TriWord {
    match cache {
        Some(c) => c.complete(x),
        None => code.complete(x),
    }
}

/// Applies `f_C` to every axis vector of `cur` along `layout`.
fn complete_axis(
    code: &dyn ComponentCode,
    cur: &mut TriTensor,
    layout: &AxisLayout,
    cache: &mut Option<TemplateCache<'_>>,
) {
    if layout.suffix.is_multiple_of(64) {
        let limbs_per_block = layout.suffix / 64;
        let mut vals = vec![0u64; layout.len];
        let mut ers = vec![0u64; layout.len];
        let mut scratch = vec![0u64; layout.len];
        for p in 0..layout.prefix {
            for l in 0..limbs_per_block {
                let at = |j: usize| layout.index(p, j, 0) / 64 + l;
                {
                    let (v, e) = cur.planes_mut();
                    for j in 0..layout.len {
                        vals[j] = v.limbs()[at(j)];
                        ers[j] = e.limbs()[at(j)];
                    }
                }
                let any_erased = ers.iter().any(|&x| x != 0);
                if cache.is_some() && !any_erased {
                    scratch.copy_from_slice(&vals);
                    let bad = code.non_members_sliced(&mut scratch);
                    if bad != 0 {
                        let (v, e) = cur.planes_mut();
                        for j in 0..layout.len {
                            v.limbs_mut()[at(j)] &= !bad;
                            e.limbs_mut()[at(j)] |= bad;
                        }
                    }
                    continue;
                }
                for lane in 0..64 {
                    let x = TriWord::new(
                        BitWord::from_bits(vals.iter().map(|&w| w >> lane & 1 == 1)),
                        BitWord::from_bits(ers.iter().map(|&w| w >> lane & 1 == 1)),
                    )
                    .expect("equal lengths");
                    let y = complete_one(code, cache, &x);
                    if y == x {
                        continue;
                    }
                    let (v, e) = cur.planes_mut();
                    let bit = 1u64 << lane;
                    let (vl, el) = (v.limbs_mut(), e.limbs_mut());
                    for j in 0..layout.len {
                        let i = at(j);
                        vl[i] &= !bit;
                        el[i] &= !bit;
                        match y.get(j) {
                            Some(true) => vl[i] |= bit,
                            Some(false) => {}
                            None => el[i] |= bit,
                        }
                    }
                }
            }
        }
        return;
    }
    for p in 0..layout.prefix {
        for s in 0..layout.suffix {
            let x = cur.axis_vector(layout, p, s);
            let y = complete_one(code, cache, &x);
            if y != x {
                cur.set_axis_vector(layout, p, s, &y);
            }
        }
    }
}

/// Erases every subtensor (identified by its index modulo `suffix`) that
/// still holds an erasure or moved at least `prod_d / 2` away from `orig`.
/// Positions erased in `orig` do not count toward the distance.
fn check_subtensors(cur: &mut TriTensor, orig: &TriTensor, suffix: usize, prod_d: u128) -> usize {
    let mut flagged = vec![false; suffix];
    let mut dist = vec![0u128; suffix];
    for i in cur.erased().ones_iter() {
        flagged[i % suffix] = true;
    }
    let diff = cur
        .values()
        .limbs()
        .iter()
        .zip(orig.values().limbs())
        .zip(orig.erased().limbs())
        .zip(cur.erased().limbs())
        .map(|(((a, b), oe), ce)| (a ^ b) & !oe & !ce)
        .collect::<Vec<u64>>();
    let diff = BitWord::from_limbs(cur.len(), diff);
    for i in diff.ones_iter() {
        dist[i % suffix] += 1;
    }
    for s in 0..suffix {
        if 2 * dist[s] >= prod_d {
            flagged[s] = true;
        }
    }
    let count = flagged.iter().filter(|&&f| f).count();
    if count == 0 {
        return 0;
    }
    if count == suffix {
        cur.erase_all();
        return count;
    }
    let (v, e) = cur.planes_mut();
    if suffix.is_multiple_of(64) {
        let masks: Vec<u64> = flagged
            .chunks(64)
            .map(|c| c.iter().enumerate().fold(0u64, |acc, (b, &f)| acc | (f as u64) << b))
            .collect();
        let vl = v.limbs_mut();
        for (q, block) in e.limbs_mut().chunks_mut(masks.len()).enumerate() {
            for (l, (el, &mask)) in block.iter_mut().zip(&masks).enumerate() {
                *el |= mask;
                vl[q * masks.len() + l] &= !mask;
            }
        }
    } else {
        let n = v.len();
        for (s, _) in flagged.iter().enumerate().filter(|(_, &f)| f) {
            for i in (s..n).step_by(suffix) {
                e.set(i, true);
                v.set(i, false);
            }
        }
    }
    count
}

fn check_shape(codes: &[&dyn ComponentCode], a: &TriTensor) -> Result<()> {
    let expected: Vec<usize> = codes.iter().map(|c| c.length()).collect();
    if codes.is_empty() || a.shape() != expected.as_slice() {
        return Err(CodeError::ShapeMismatch {
            expected,
            actual: a.shape().to_vec(),
        });
    }
    Ok(())
}

/// Decodes `a` with the default configuration. The output is either a
/// codeword of the tensor code or the all-erased tensor.
pub fn tensor_decode(codes: &[&dyn ComponentCode], a: &TriTensor) -> Result<TriTensor> {
    tensor_decode_with(codes, a, &AdversarialConfig::default()).map(|(t, _)| t)
}

pub fn tensor_decode_with(
    codes: &[&dyn ComponentCode],
    a: &TriTensor,
    cfg: &AdversarialConfig,
) -> Result<(TriTensor, AdversarialStats)> {
    check_shape(codes, a)?;
    let t = codes.len();
    let mut stats = AdversarialStats {
        vectors: vec![0; t],
        templates_built: 0,
        erased_subtensors: vec![0; t],
    };
    let mut cur = a.clone();
    let mut prod_d: u128 = 1;
    for (k, &code) in codes.iter().enumerate() {
        let layout = AxisLayout::new(a.shape(), k);
        let mut cache = cfg.use_pattern_cache.then(|| TemplateCache::new(code));
        complete_axis(code, &mut cur, &layout, &mut cache);
        stats.vectors[k] = layout.vector_count();
        stats.templates_built += cache.map_or(0, |c| c.built);
        prod_d *= code.d_min() as u128;
        if k >= 1 {
            stats.erased_subtensors[k] = check_subtensors(&mut cur, a, layout.suffix, prod_d);
        }
    }
    Ok((cur, stats))
}

/// Direct transcription of the recursive decoder. Slow (it copies every
/// slice at every level); kept as a reference for the unrolled schedule.
pub fn tensor_decode_recursive(codes: &[&dyn ComponentCode], a: &TriTensor) -> Result<TriTensor> {
    check_shape(codes, a)?;
    Ok(decode_rec(codes, a))
}

fn decode_rec(codes: &[&dyn ComponentCode], a: &TriTensor) -> TriTensor {
    let t = codes.len();
    let shape = a.shape();
    if t == 1 {
        let y = codes[0].complete(&a.axis_vector(&AxisLayout::new(shape, 0), 0, 0));
        let (v, e) = y.into_parts();
        return TriTensor::new(shape, v, e).expect("same shape");
    }
    let n_t = shape[t - 1];
    let sub_shape = &shape[..t - 1];
    let sub_len: usize = sub_shape.iter().product();
    let mut cur = a.clone();
    for i in 0..n_t {
        let mut vals = BitWord::zeros(sub_len);
        let mut ers = BitWord::zeros(sub_len);
        for q in 0..sub_len {
            match a.get_flat(q * n_t + i) {
                Some(b) => vals.set(q, b),
                None => ers.set(q, true),
            }
        }
        let slice = TriTensor::new(sub_shape, vals, ers).expect("slice shape");
        let out = decode_rec(&codes[..t - 1], &slice);
        for q in 0..sub_len {
            cur.set_flat(q * n_t + i, out.get_flat(q));
        }
    }
    let layout = AxisLayout::new(shape, t - 1);
    for p in 0..layout.prefix {
        let x = cur.axis_vector(&layout, p, 0);
        let y = codes[t - 1].complete(&x);
        cur.set_axis_vector(&layout, p, 0, &y);
    }
    let prod_d: u128 = codes.iter().map(|c| c.d_min() as u128).product();
    let dist = (0..a.len())
        .filter(|&i| match (a.get_flat(i), cur.get_flat(i)) {
            (Some(x), Some(y)) => x != y,
            _ => false,
        })
        .count() as u128;
    if cur.erasure_count() > 0 || 2 * dist >= prod_d {
        cur.erase_all();
    }
    cur
}
