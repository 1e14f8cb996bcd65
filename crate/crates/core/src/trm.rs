//! Tensor Reed-Muller codes: descriptors, the asymptotic parameter planner,
//! encoding, membership and the staged random-error decoder.
//!
//! A TRM codeword is a `2^m_1 x ... x 2^m_t` tensor stored row-major, so its
//! flat index is the concatenation of the per-axis point indices with axis 0
//! most significant. The code is spanned by the products of layer monomials,
//! which means a whole tensor can be encoded with one subset-sum transform
//! over all index bits once the coefficients sit at their monomial masks.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::adversarial::{rm_component, tensor_decode, ComponentCode, RmComponent};
use crate::bits::BitWord;
use crate::error::{CodeError, Result};
use crate::inner::{build_ml_table, HighRateDecoder, MlTable};
use crate::rm::{binom_sum, entropy, rm_non_members_sliced, subset_transform, RmCode};
use crate::tensor::{AxisLayout, BitTensor};

/// Largest total `sum m_i` accepted for a descriptor (length `2^40`).
pub const MAX_TOTAL_M: usize = 40;

/// The code TRM(r_1, m_1; ...; r_t, m_t).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TrmCode {
    layers: Vec<RmCode>,
}

impl TrmCode {
    pub fn new(layers: Vec<RmCode>) -> Result<Self> {
        if layers.is_empty() {
            return Err(CodeError::InvalidParameters("TRM code needs at least one layer".into()));
        }
        let total: usize = layers.iter().map(|l| l.m()).sum();
        if total > MAX_TOTAL_M {
            return Err(CodeError::CapExceeded {
                what: "total m",
                value: total,
                cap: MAX_TOTAL_M,
            });
        }
        Ok(TrmCode { layers })
    }

    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        let layers = pairs
            .iter()
            .map(|&(r, m)| RmCode::new(r, m))
            .collect::<Result<Vec<_>>>()?;
        TrmCode::new(layers)
    }

    pub fn layers(&self) -> &[RmCode] {
        &self.layers
    }

    pub fn t(&self) -> usize {
        self.layers.len()
    }

    pub fn total_m(&self) -> usize {
        self.layers.iter().map(|l| l.m()).sum()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.length()).collect()
    }

    pub fn length(&self) -> usize {
        1 << self.total_m()
    }

    pub fn dimension(&self) -> u128 {
        self.layers.iter().map(|l| binom_sum(l.m(), l.r())).product()
    }

    pub fn d_min(&self) -> u128 {
        self.layers.iter().map(|l| l.d_min() as u128).product()
    }

    pub fn rate(&self) -> f64 {
        self.layers.iter().map(|l| l.rate()).product()
    }

    pub fn components(&self) -> Vec<RmComponent> {
        self.layers.iter().map(|&l| rm_component(l)).collect()
    }

    /// Indicator of the flat positions that hold a product monomial, i.e.
    /// whose axis-`i` part has at most `r_i` bits set for every `i`.
    pub fn monomial_mask(&self) -> BitWord {
        let mut mask = BitWord::ones(1);
        for layer in &self.layers {
            let n_k = layer.length();
            let ind = BitWord::from_bits((0..n_k).map(|j| j.count_ones() as usize <= layer.r()));
            let mut next = BitWord::zeros(mask.len() * n_k);
            for i in mask.ones_iter() {
                next.write_slice(i * n_k, &ind);
            }
            mask = next;
        }
        mask
    }
}

impl fmt::Display for TrmCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.layers.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", l.r(), l.m())?;
        }
        Ok(())
    }
}

/// Parses a profile string `"r1:m1,r2:m2,..."`.
impl FromStr for TrmCode {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self> {
        let pairs = s
            .split(',')
            .map(|part| {
                let (r, m) = part
                    .trim()
                    .split_once(':')
                    .ok_or_else(|| CodeError::Parse(format!("layer {part:?} is not r:m")))?;
                let num = |x: &str| {
                    x.trim()
                        .parse::<usize>()
                        .map_err(|_| CodeError::Parse(format!("bad number {x:?} in {part:?}")))
                };
                Ok((num(r)?, num(m)?))
            })
            .collect::<Result<Vec<_>>>()?;
        TrmCode::from_pairs(&pairs)
    }
}

impl Serialize for TrmCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TrmCode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Coefficients in product-monomial order (row-major over the per-layer
/// monomial orders) scattered to their flat monomial-mask positions.
pub fn place_coefficients(code: &TrmCode, coeffs: &BitWord) -> Result<BitWord> {
    let dim = code.dimension();
    if coeffs.len() as u128 != dim {
        return Err(CodeError::LengthMismatch {
            expected: dim as usize,
            actual: coeffs.len(),
        });
    }
    let masks: Vec<Vec<usize>> = code.layers.iter().map(|l| l.monomials().masks().to_vec()).collect();
    let dims: Vec<usize> = masks.iter().map(|m| m.len()).collect();
    let shape = code.shape();
    let mut out = BitWord::zeros(code.length());
    for c in coeffs.ones_iter() {
        let mut rest = c;
        let mut flat = 0usize;
        let mut stride = 1usize;
        for k in (0..dims.len()).rev() {
            flat += masks[k][rest % dims[k]] * stride;
            rest /= dims[k];
            stride *= shape[k];
        }
        out.set(flat, true);
    }
    Ok(out)
}

/// Encodes coefficients given in product-monomial order.
pub fn trm_encode(code: &TrmCode, coeffs: &BitWord) -> Result<BitTensor> {
    let mut w = place_coefficients(code, coeffs)?;
    subset_transform(&mut w, 0..code.total_m());
    BitTensor::from_word(&code.shape(), w)
}

/// Uniformly random codeword; `mask` must be `code.monomial_mask()`.
pub fn random_codeword<R: Rng + ?Sized>(code: &TrmCode, mask: &BitWord, rng: &mut R) -> BitTensor {
    assert_eq!(mask.len(), code.length(), "random_codeword: mask length");
    let limbs = mask.limbs().iter().map(|&m| rng.random::<u64>() & m).collect();
    let mut w = BitWord::from_limbs(code.length(), limbs);
    subset_transform(&mut w, 0..code.total_m());
    BitTensor::from_word(&code.shape(), w).expect("shape matches code")
}

/// Packs the axis vectors of prefixes `p0..p0 + g` into 64-bit lanes for an
/// axis whose suffix divides 64: lane `i * suffix + s` holds vector
/// `(p0 + i, s)`.
fn gather_packed(bits: &BitWord, layout: &AxisLayout, p0: usize, g: usize, words: &mut [u64]) {
    let sfx = layout.suffix;
    let chunk = if sfx == 64 { u64::MAX } else { (1u64 << sfx) - 1 };
    for (j, w) in words.iter_mut().enumerate() {
        let mut acc = 0;
        for i in 0..g {
            let at = layout.index(p0 + i, j, 0);
            acc |= (bits.limbs()[at / 64] >> (at % 64) & chunk) << (i * sfx);
        }
        *w = acc;
    }
}

/// Number of axis vectors along `axis` that are not codewords of `layer`.
/// Stops early once the count exceeds `limit`.
fn axis_non_member_count(layer: &RmCode, bits: &BitWord, layout: &AxisLayout, limit: usize) -> usize {
    let mut count = 0;
    if layout.suffix.is_multiple_of(64) {
        let blocks = layout.suffix / 64;
        let mut words = vec![0u64; layout.len];
        for p in 0..layout.prefix {
            for l in 0..blocks {
                for (j, w) in words.iter_mut().enumerate() {
                    *w = bits.limbs()[layout.index(p, j, 0) / 64 + l];
                }
                count += rm_non_members_sliced(layer, &mut words).count_ones() as usize;
                if count > limit {
                    return count;
                }
            }
        }
        return count;
    }
    if 64 % layout.suffix == 0 {
        let per = 64 / layout.suffix;
        let mut words = vec![0u64; layout.len];
        for p0 in (0..layout.prefix).step_by(per) {
            gather_packed(bits, layout, p0, per.min(layout.prefix - p0), &mut words);
            count += rm_non_members_sliced(layer, &mut words).count_ones() as usize;
            if count > limit {
                return count;
            }
        }
        return count;
    }
    let comp = rm_component(*layer);
    for p in 0..layout.prefix {
        for s in 0..layout.suffix {
            let v = if layout.suffix == 1 {
                bits.slice(layout.index(p, 0, 0), layout.len)
            } else {
                BitWord::from_bits((0..layout.len).map(|j| bits.get(layout.index(p, j, s))))
            };
            if !comp.is_member(&v) {
                count += 1;
                if count > limit {
                    return count;
                }
            }
        }
    }
    count
}

/// True iff every axis vector along every axis is a codeword of its layer.
pub fn trm_is_codeword(code: &TrmCode, a: &BitTensor) -> bool {
    let shape = code.shape();
    if a.shape() != shape.as_slice() {
        return false;
    }
    code.layers
        .iter()
        .enumerate()
        .all(|(k, layer)| axis_non_member_count(layer, a.bits(), &AxisLayout::new(&shape, k), 0) == 0)
}

/// `floor(n * 2^(-2^((log2 log2 n)^(1/4))))`.
pub fn counter_threshold(n: u64) -> u64 {
    assert!(n >= 4, "counter_threshold needs n >= 4");
    let nf = n as f64;
    let exponent = nf.log2().log2().powf(0.25).exp2();
    (nf * (-exponent).exp2()).floor() as u64
}

/// Parameters requested from the planner.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanRequest {
    pub n: u64,
    pub t: usize,
    pub rate: f64,
    pub p: f64,
}

/// Why the planner could not produce a code.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub violated_constraint: String,
    pub values: BTreeMap<String, serde_json::Value>,
    /// Smallest `n` (as `"2^L"`) at which every planner constraint holds,
    /// when one exists.
    pub minimum_feasible_n: Option<String>,
    pub minimum_feasible_log2_n: Option<u64>,
}

/// Planner formulas evaluated at `log n = log_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct PlanValues {
    m1: i64,
    r1: i64,
    m2: i64,
    r2: i64,
    m3: i64,
    r3: i64,
}

fn ceil_i(x: f64) -> i64 {
    x.ceil() as i64
}

fn evaluate_plan(log_n: f64, t: usize, rate: f64) -> PlanValues {
    let ll = log_n.log2();
    let m1 = ceil_i(ll - 3.0);
    let m2 = ceil_i(10.0 * ll);
    let m2f = m2 as f64;
    let r2 = ceil_i(m2f / 2.0 + m2f.sqrt() * m2f.log2());
    let m3 = ceil_i((log_n - m1 as f64 - m2f) / (t as f64 - 2.0));
    let m3f = m3.max(0) as f64;
    let r3 = ceil_i((m3f + m3f.powf(0.75)) / 2.0);
    let r1 = if m1 >= 1 {
        let m1u = m1 as usize;
        let denom = (1u128 << m1u) as f64;
        let mut best = 0usize;
        let mut best_gap = f64::INFINITY;
        for r in 0..=m1u {
            let gap = (binom_sum(m1u, r) as f64 / denom - rate).abs();
            // later r has higher rate, so `<=` breaks ties upward
            if gap <= best_gap {
                best = r;
                best_gap = gap;
            }
        }
        best as i64
    } else {
        0
    };
    PlanValues { m1, r1, m2, r2, m3, r3 }
}

/// First violated constraint, in checking order.
fn violation(v: &PlanValues, log_n: f64) -> Option<&'static str> {
    if v.m1 < 1 {
        Some("m1 >= 1")
    } else if (v.m1 + v.m2) as f64 >= log_n {
        Some("m1 + m2 < log n")
    } else if v.r2 > v.m2 {
        Some("r2 <= m2")
    } else if v.m3 < 1 || v.r3 > v.m3 {
        Some("r3 <= m3")
    } else {
        None
    }
}

/// Smallest integer `L` with a feasible plan at `n = 2^L`. Each constraint
/// is upward closed in `L`, so jumping to the first `L` that clears the
/// currently violated one never skips a feasible value.
fn minimum_feasible_log2(t: usize, rate: f64) -> u64 {
    let mut l: u64 = 2;
    loop {
        let lf = l as f64;
        let v = evaluate_plan(lf, t, rate);
        let next = match violation(&v, lf) {
            None => return l,
            Some("m1 >= 1") => 9,
            Some("m1 + m2 < log n") => (v.m1 + v.m2 + 1) as u64,
            // r2 <= m2 first holds once m2 can grow: jump to where ceil(10 log L) increases
            Some("r2 <= m2") => (v.m2 as f64 / 10.0).exp2().floor() as u64 + 1,
            Some(_) => l + 1,
        };
        l = next.max(l + 1);
    }
}

/// Evaluates the planner bullets at `n` and returns the code, or a
/// [`Diagnostic`] when the asymptotic formulas do not fit.
pub fn plan_parameters(req: &PlanRequest) -> Result<std::result::Result<TrmCode, Diagnostic>> {
    if req.t < 3 {
        return Err(CodeError::InvalidParameters(format!(
            "t = {} must be at least 3",
            req.t
        )));
    }
    if !(req.rate > 0.0 && req.rate < 1.0) {
        return Err(CodeError::InvalidParameters(format!("rate {} not in (0,1)", req.rate)));
    }
    if !(req.p > 0.0 && req.p < 0.5) {
        return Err(CodeError::InvalidParameters(format!("p {} not in (0,1/2)", req.p)));
    }
    if req.n < 4 {
        return Err(CodeError::InvalidParameters(format!(
            "n = {} must be at least 4",
            req.n
        )));
    }
    let capacity = 1.0 - entropy(req.p);
    let log_n = (req.n as f64).log2();
    let mut values = BTreeMap::new();
    values.insert("n".to_string(), req.n.into());
    values.insert("log2_n".to_string(), serde_json::json!(log_n));
    values.insert("t".to_string(), req.t.into());
    values.insert("rate".to_string(), serde_json::json!(req.rate));
    if req.rate >= capacity {
        values.insert("capacity".to_string(), serde_json::json!(capacity));
        values.insert("p".to_string(), serde_json::json!(req.p));
        return Ok(Err(Diagnostic {
            violated_constraint: "rate < 1 - h(p)".into(),
            values,
            minimum_feasible_n: None,
            minimum_feasible_log2_n: None,
        }));
    }
    let v = evaluate_plan(log_n, req.t, req.rate);
    if let Some(c) = violation(&v, log_n) {
        for (k, x) in [
            ("m1", v.m1),
            ("r1", v.r1),
            ("m2", v.m2),
            ("r2", v.r2),
            ("m3", v.m3),
            ("r3", v.r3),
        ] {
            values.insert(k.to_string(), x.into());
        }
        let l = minimum_feasible_log2(req.t, req.rate);
        return Ok(Err(Diagnostic {
            violated_constraint: c.into(),
            values,
            minimum_feasible_n: Some(format!("2^{l}")),
            minimum_feasible_log2_n: Some(l),
        }));
    }
    let mut pairs = vec![(v.r1 as usize, v.m1 as usize), (v.r2 as usize, v.m2 as usize)];
    pairs.extend(std::iter::repeat_n((v.r3 as usize, v.m3 as usize), req.t - 2));
    TrmCode::from_pairs(&pairs).map(Ok)
}

/// Decoder used on the layer-2 columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnerDecoderKind {
    HighRate,
    /// Table lookup; needs `2^m_2 <= 16`.
    Ml,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeConfig {
    /// Abort to the zero codeword once more columns than this were repaired.
    pub counter_threshold: u64,
    pub inner_decoder: InnerDecoderKind,
    /// Run the adversarial decoder over the whole tensor when `t > 3`.
    pub run_final_pass: bool,
}

impl DecodeConfig {
    /// Threshold from the length formula, high-rate column decoder, final pass on.
    pub fn for_code(code: &TrmCode) -> Self {
        DecodeConfig {
            counter_threshold: counter_threshold(code.length() as u64),
            inner_decoder: InnerDecoderKind::HighRate,
            run_final_pass: true,
        }
    }
}

/// Wall-clock time per decoder stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub table_pass: Duration,
    pub column_pass: Duration,
    pub final_pass: Duration,
}

impl std::ops::AddAssign for StageTimings {
    fn add_assign(&mut self, o: Self) {
        self.table_pass += o.table_pass;
        self.column_pass += o.column_pass;
        self.final_pass += o.final_pass;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeOutput {
    pub tensor: BitTensor,
    /// Rows changed by the table pass.
    pub rows_repaired: usize,
    /// Columns that failed the membership test.
    pub counter: u64,
    pub aborted: bool,
    /// The final pass returned all erasures and was mapped to zero.
    pub final_pass_failed: bool,
    pub timings: StageTimings,
}

enum ColumnDecoder {
    HighRate(HighRateDecoder),
    Ml(MlTable),
}

impl ColumnDecoder {
    fn decode(&self, w: &BitWord) -> BitWord {
        match self {
            ColumnDecoder::HighRate(d) => d.decode_non_member(w),
            ColumnDecoder::Ml(t) => t.decode(w),
        }
    }
}

/// The staged random-error decoder with its tables prepared once.
pub struct TrmDecoder {
    code: TrmCode,
    cfg: DecodeConfig,
    rows: MlTable,
    columns: ColumnDecoder,
    components: Vec<RmComponent>,
}

impl TrmDecoder {
    /// `table` must be the ML table of layer 1.
    pub fn new(code: &TrmCode, cfg: DecodeConfig, table: MlTable) -> Result<Self> {
        if code.t() < 3 {
            return Err(CodeError::InvalidParameters(format!(
                "the staged decoder needs t >= 3, got {}",
                code.t()
            )));
        }
        if table.code() != &code.layers[0] {
            return Err(CodeError::InvalidParameters(format!(
                "table is for {}, layer 1 is {}",
                table.code(),
                code.layers[0]
            )));
        }
        let columns = match cfg.inner_decoder {
            InnerDecoderKind::HighRate => ColumnDecoder::HighRate(HighRateDecoder::new(&code.layers[1])),
            InnerDecoderKind::Ml => ColumnDecoder::Ml(build_ml_table(&code.layers[1])?),
        };
        Ok(TrmDecoder {
            code: code.clone(),
            cfg,
            rows: table,
            columns,
            components: code.components(),
        })
    }

    pub fn code(&self) -> &TrmCode {
        &self.code
    }

    pub fn config(&self) -> &DecodeConfig {
        &self.cfg
    }

    pub fn decode(&self, a: &BitTensor) -> Result<DecodeOutput> {
        let shape = self.code.shape();
        if a.shape() != shape.as_slice() {
            return Err(CodeError::ShapeMismatch {
                expected: shape,
                actual: a.shape().to_vec(),
            });
        }
        let mut out = DecodeOutput {
            tensor: a.clone(),
            rows_repaired: 0,
            counter: 0,
            aborted: false,
            final_pass_failed: false,
            timings: StageTimings::default(),
        };

        let start = Instant::now();
        out.rows_repaired = self.row_pass(&mut out.tensor);
        out.timings.table_pass = start.elapsed();

        let start = Instant::now();
        let (counter, aborted) = self.column_pass(&mut out.tensor);
        out.timings.column_pass = start.elapsed();
        out.counter = counter;
        if aborted {
            out.aborted = true;
            out.tensor = BitTensor::zeros(&shape)?;
            return Ok(out);
        }

        if self.code.t() > 3 && self.cfg.run_final_pass {
            let start = Instant::now();
            let codes: Vec<&dyn ComponentCode> = self.components.iter().map(|c| c as &dyn ComponentCode).collect();
            let decoded = tensor_decode(&codes, &out.tensor.to_tri())?;
            out.tensor = match decoded.to_bits() {
                Some(b) => b,
                None => {
                    out.final_pass_failed = true;
                    BitTensor::zeros(&shape)?
                }
            };
            out.timings.final_pass = start.elapsed();
        }
        Ok(out)
    }

    /// Replaces every row (axis-1 vector) by its table entry.
    fn row_pass(&self, a: &mut BitTensor) -> usize {
        let layout = AxisLayout::new(a.shape(), 0);
        let layer = &self.code.layers[0];
        let mut repaired = 0;
        if layout.suffix.is_multiple_of(64) {
            let stride = layout.suffix / 64;
            let limbs = a.bits_mut().limbs_mut();
            let mut words = vec![0u64; layout.len];
            for l in 0..stride {
                for (j, w) in words.iter_mut().enumerate() {
                    *w = limbs[j * stride + l];
                }
                let mut scratch = words.clone();
                let mut bad = rm_non_members_sliced(layer, &mut scratch);
                while bad != 0 {
                    let lane = bad.trailing_zeros();
                    bad &= bad - 1;
                    let w = words
                        .iter()
                        .enumerate()
                        .fold(0u16, |acc, (j, &x)| acc | ((x >> lane & 1) as u16) << j);
                    let c = self.rows.lookup(w);
                    let diff = w ^ c;
                    for j in 0..layout.len {
                        if diff >> j & 1 == 1 {
                            limbs[j * stride + l] ^= 1 << lane;
                        }
                    }
                    repaired += 1;
                }
            }
            return repaired;
        }
        for s in 0..layout.suffix {
            let v = a.axis_vector(&layout, 0, s);
            let c = self.rows.decode(&v);
            if c != v {
                a.set_axis_vector(&layout, 0, s, &c);
                repaired += 1;
            }
        }
        repaired
    }

    /// Tests every column (axis-2 vector) and repairs the non-members.
    /// Returns the counter and whether it crossed the threshold.
    fn column_pass(&self, a: &mut BitTensor) -> (u64, bool) {
        let layout = AxisLayout::new(a.shape(), 1);
        let layer = &self.code.layers[1];
        let threshold = self.cfg.counter_threshold;
        let mut counter = 0u64;
        if layout.suffix.is_multiple_of(64) {
            let blocks = layout.suffix / 64;
            let limbs = a.bits_mut().limbs_mut();
            let mut words = vec![0u64; layout.len];
            let mut scratch = vec![0u64; layout.len];
            for p in 0..layout.prefix {
                for l in 0..blocks {
                    let at = |j: usize| layout.index(p, j, 0) / 64 + l;
                    for (j, w) in words.iter_mut().enumerate() {
                        *w = limbs[at(j)];
                    }
                    scratch.copy_from_slice(&words);
                    let mut bad = rm_non_members_sliced(layer, &mut scratch);
                    counter += bad.count_ones() as u64;
                    if counter > threshold {
                        return (counter, true);
                    }
                    while bad != 0 {
                        let lane = bad.trailing_zeros();
                        bad &= bad - 1;
                        let v = BitWord::from_bits(words.iter().map(|&x| x >> lane & 1 == 1));
                        let c = self.columns.decode(&v);
                        for j in 0..layout.len {
                            if c.get(j) != v.get(j) {
                                limbs[at(j)] ^= 1 << lane;
                            }
                        }
                    }
                }
            }
            return (counter, false);
        }
        if 64 % layout.suffix == 0 {
            let per = 64 / layout.suffix;
            let mut words = vec![0u64; layout.len];
            for p0 in (0..layout.prefix).step_by(per) {
                gather_packed(a.bits(), &layout, p0, per.min(layout.prefix - p0), &mut words);
                let mut scratch = words.clone();
                let mut bad = rm_non_members_sliced(layer, &mut scratch);
                counter += bad.count_ones() as u64;
                if counter > threshold {
                    return (counter, true);
                }
                while bad != 0 {
                    let lane = bad.trailing_zeros() as usize;
                    bad &= bad - 1;
                    let (p, s) = (p0 + lane / layout.suffix, lane % layout.suffix);
                    let v = BitWord::from_bits(words.iter().map(|&x| x >> lane & 1 == 1));
                    let c = self.columns.decode(&v);
                    for j in 0..layout.len {
                        if c.get(j) != v.get(j) {
                            a.bits_mut().flip(layout.index(p, j, s));
                        }
                    }
                }
            }
            return (counter, false);
        }
        let comp = rm_component(*layer);
        for p in 0..layout.prefix {
            for s in 0..layout.suffix {
                let v = a.axis_vector(&layout, p, s);
                if comp.is_member(&v) {
                    continue;
                }
                counter += 1;
                if counter > threshold {
                    return (counter, true);
                }
                let c = self.columns.decode(&v);
                a.set_axis_vector(&layout, p, s, &c);
            }
        }
        (counter, false)
    }
}

/// One-shot form of [`TrmDecoder::decode`].
pub fn trm_decode_random(code: &TrmCode, a: &BitTensor, cfg: &DecodeConfig, table: &MlTable) -> Result<DecodeOutput> {
    TrmDecoder::new(code, *cfg, table.clone())?.decode(a)
}
