//! Seeded noise models and Monte-Carlo trial running.
//!
//! Trial `k` of a run with base seed `b` draws everything (message and noise)
//! from `ChaCha8Rng::seed_from_u64(mix64(b, k))`, where `mix64` is the
//! splitmix64 finalizer applied to `b + (k + 1) * 0x9E3779B97F4A7C15`:
//!
//! ```text
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! z =  z ^ (z >> 31)
//! ```
//!
//! (all arithmetic wrapping mod 2^64).

use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::adversarial::{tensor_decode, ComponentCode, RmComponent};
use crate::bits::BitWord;
use crate::error::{CodeError, Result};
use crate::inner::{build_ml_table, ml_decode, HighRateDecoder, MlTable, DEFAULT_TABLE_CAP_BITS};
use crate::tensor::{BitTensor, TriTensor};
use crate::trm::{random_codeword, DecodeConfig, StageTimings, TrmCode, TrmDecoder};

/// Seed of trial `k`: the splitmix64 finalizer applied to
/// `base + (k + 1) * 0x9E3779B97F4A7C15`.
pub fn mix64(base: u64, k: u64) -> u64 {
    let mut z = base.wrapping_add(k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Where adversarial flips go.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    /// A uniformly random set of positions.
    Uniform,
    /// Packed into as few last-axis slices as possible (random slices,
    /// random positions inside the last partially used one).
    SliceConcentrated,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseSpec {
    Bsc { p: f64 },
    Bec { p: f64 },
    Adversarial { weight: usize, placement: Placement },
}

impl NoiseSpec {
    fn validate(&self, len: usize) -> Result<()> {
        match *self {
            NoiseSpec::Bsc { p } | NoiseSpec::Bec { p } if !(0.0..=1.0).contains(&p) => {
                Err(CodeError::InvalidParameters(format!("probability {p} not in [0,1]")))
            }
            NoiseSpec::Adversarial { weight, .. } if weight > len => Err(CodeError::InvalidParameters(format!(
                "weight {weight} exceeds blocklength {len}"
            ))),
            _ => Ok(()),
        }
    }
}

/// Positions hit independently with probability `p`, drawn as geometric gaps.
fn bernoulli_mask<R: Rng + ?Sized>(len: usize, p: f64, rng: &mut R) -> BitWord {
    let mut mask = BitWord::zeros(len);
    if p <= 0.0 {
        return mask;
    }
    if p >= 1.0 {
        return BitWord::ones(len);
    }
    let gap = Geometric::new(p).expect("p in (0,1)");
    let mut i = 0u64;
    loop {
        i = i.saturating_add(gap.sample(rng));
        if i >= len as u64 {
            return mask;
        }
        mask.set(i as usize, true);
        i += 1;
    }
}

fn concentrated_mask<R: Rng + ?Sized>(shape: &[usize], weight: usize, rng: &mut R) -> BitWord {
    let len: usize = shape.iter().product();
    let n_t = *shape.last().expect("nonempty shape");
    let slice_len = len / n_t;
    let mut slices: Vec<usize> = (0..n_t).collect();
    slices.shuffle(rng);
    let mut mask = BitWord::zeros(len);
    let mut left = weight;
    for i in slices {
        if left == 0 {
            break;
        }
        let take = left.min(slice_len);
        for q in sample(rng, slice_len, take) {
            mask.set(q * n_t + i, true);
        }
        left -= take;
    }
    mask
}

/// The ground-truth error (or erasure) positions for one draw.
pub fn noise_mask<R: Rng + ?Sized>(spec: &NoiseSpec, shape: &[usize], rng: &mut R) -> Result<BitWord> {
    let len: usize = shape.iter().product();
    spec.validate(len)?;
    Ok(match *spec {
        NoiseSpec::Bsc { p } | NoiseSpec::Bec { p } => bernoulli_mask(len, p, rng),
        NoiseSpec::Adversarial {
            weight,
            placement: Placement::Uniform,
        } => BitWord::from_bits({
            let mut v = vec![false; len];
            for i in sample(rng, len, weight) {
                v[i] = true;
            }
            v
        }),
        NoiseSpec::Adversarial {
            weight,
            placement: Placement::SliceConcentrated,
        } => concentrated_mask(shape, weight, rng),
    })
}

/// A noisy copy and the mask that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Noisy {
    /// Flipped bits for bsc/adversarial, erased positions for bec.
    pub received: TriTensor,
    pub mask: BitWord,
}

fn corrupt(spec: &NoiseSpec, x: &BitTensor, mask: BitWord) -> Noisy {
    let received = match spec {
        NoiseSpec::Bec { .. } => {
            let mut values = x.bits().clone();
            let mut keep = mask.clone();
            for l in keep.limbs_mut() {
                *l = !*l;
            }
            values.and_assign(&keep);
            TriTensor::new(x.shape(), values, mask.clone()).expect("same shape")
        }
        _ => {
            let mut values = x.bits().clone();
            values.xor_assign(&mask);
            TriTensor::new(x.shape(), values, BitWord::zeros(x.len())).expect("same shape")
        }
    };
    Noisy { received, mask }
}

pub fn apply_noise_with<R: Rng + ?Sized>(spec: &NoiseSpec, x: &BitTensor, rng: &mut R) -> Result<Noisy> {
    let mask = noise_mask(spec, x.shape(), rng)?;
    Ok(corrupt(spec, x, mask))
}

/// Deterministic in `(spec, x, seed)`.
pub fn apply_noise(spec: &NoiseSpec, x: &BitTensor, seed: u64) -> Result<Noisy> {
    apply_noise_with(spec, x, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Two-sided 95% Clopper-Pearson interval for `k` successes in `n` trials.
pub fn clopper_pearson(k: u64, n: u64) -> (f64, f64) {
    assert!(n > 0 && k <= n, "clopper_pearson: need 0 <= k <= n, n > 0");
    let alpha = 0.05;
    let (kf, nf) = (k as f64, n as f64);
    let low = if k == 0 {
        0.0
    } else {
        Beta::new(kf, nf - kf + 1.0)
            .expect("positive shape")
            .inverse_cdf(alpha / 2.0)
    };
    let high = if k == n {
        1.0
    } else {
        Beta::new(kf + 1.0, nf - kf)
            .expect("positive shape")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    (low, high)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    /// Nearest codeword; single-layer codes only.
    Ml,
    /// Membership test then majority logic; single-layer codes only.
    Highrate,
    /// The adversarial tensor decoder with RM components.
    TensorAdv,
    /// The staged random-error decoder.
    Full,
}

/// A decoder prepared once and shared by all trials.
pub enum TrialDecoder {
    MlTable(MlTable),
    MlSearch(crate::rm::RmCode),
    HighRate(HighRateDecoder),
    TensorAdv(Vec<RmComponent>),
    Full(Box<TrmDecoder>),
}

/// What a decoder produced for one received tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct Decoded {
    /// `None` when the decoder gave up with erasures.
    pub tensor: Option<BitTensor>,
    pub timings: StageTimings,
}

impl TrialDecoder {
    /// `table` is used for `Full` (layer-1 table) and single-layer `Ml`;
    /// it is built on the spot when absent.
    pub fn new(code: &TrmCode, kind: DecoderKind, cfg: Option<DecodeConfig>, table: Option<MlTable>) -> Result<Self> {
        let single = || -> Result<crate::rm::RmCode> {
            match code.layers() {
                [layer] => Ok(*layer),
                _ => Err(CodeError::InvalidParameters(format!(
                    "decoder {kind:?} needs a single-layer profile, got {code}"
                ))),
            }
        };
        Ok(match kind {
            DecoderKind::Ml => {
                let layer = single()?;
                if layer.length() <= DEFAULT_TABLE_CAP_BITS {
                    TrialDecoder::MlTable(match table {
                        Some(t) => t,
                        None => build_ml_table(&layer)?,
                    })
                } else {
                    TrialDecoder::MlSearch(layer)
                }
            }
            DecoderKind::Highrate => TrialDecoder::HighRate(HighRateDecoder::new(&single()?)),
            DecoderKind::TensorAdv => TrialDecoder::TensorAdv(code.components()),
            DecoderKind::Full => {
                let table = match table {
                    Some(t) => t,
                    None => build_ml_table(&code.layers()[0])?,
                };
                let cfg = cfg.unwrap_or_else(|| DecodeConfig::for_code(code));
                TrialDecoder::Full(Box::new(TrmDecoder::new(code, cfg, table)?))
            }
        })
    }

    pub fn decode(&self, received: &TriTensor) -> Result<Decoded> {
        let start = Instant::now();
        let boolean = || {
            received
                .to_bits()
                .ok_or_else(|| CodeError::InvalidParameters("this decoder needs an input without erasures".into()))
        };
        let shape = received.shape().to_vec();
        let single = |w: BitWord| BitTensor::from_word(&shape, w).map(Some);
        let mut timings = StageTimings::default();
        let tensor = match self {
            TrialDecoder::MlTable(t) => single(t.decode(boolean()?.bits()))?,
            TrialDecoder::MlSearch(code) => single(ml_decode(code, boolean()?.bits())?)?,
            TrialDecoder::HighRate(d) => single(d.decode(boolean()?.bits()))?,
            TrialDecoder::TensorAdv(comps) => {
                let codes: Vec<&dyn ComponentCode> = comps.iter().map(|c| c as &dyn ComponentCode).collect();
                let out = tensor_decode(&codes, received)?.to_bits();
                timings.final_pass = start.elapsed();
                out
            }
            TrialDecoder::Full(d) => {
                let out = d.decode(&boolean()?)?;
                timings = out.timings;
                Some(out.tensor)
            }
        };
        if !matches!(self, TrialDecoder::Full(_) | TrialDecoder::TensorAdv(_)) {
            timings.final_pass = start.elapsed();
        }
        Ok(Decoded { tensor, timings })
    }
}

/// Aggregated outcome of a batch of trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub trials: u64,
    pub block_errors: u64,
    pub error_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Summed per-stage decode time over all trials.
    pub elapsed: StageTimings,
    pub decode_time: Duration,
}

impl TrialStats {
    pub fn from_counts(trials: u64, block_errors: u64) -> Self {
        let (ci_low, ci_high) = clopper_pearson(block_errors, trials);
        TrialStats {
            trials,
            block_errors,
            error_rate: block_errors as f64 / trials as f64,
            ci_low,
            ci_high,
            elapsed: StageTimings::default(),
            decode_time: Duration::ZERO,
        }
    }
}

/// Result of one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub success: bool,
    pub noise_weight: usize,
    pub timings: StageTimings,
    pub decode_time: Duration,
}

/// Trial `k`: fresh random codeword, noise, decode, exact comparison.
pub fn run_trial(
    code: &TrmCode,
    monomial_mask: &BitWord,
    decoder: &TrialDecoder,
    spec: &NoiseSpec,
    base_seed: u64,
    k: u64,
) -> Result<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix64(base_seed, k));
    let cw = random_codeword(code, monomial_mask, &mut rng);
    let noisy = apply_noise_with(spec, &cw, &mut rng)?;
    let start = Instant::now();
    let out = decoder.decode(&noisy.received)?;
    let decode_time = start.elapsed();
    Ok(TrialOutcome {
        success: out.tensor.as_ref() == Some(&cw),
        noise_weight: noisy.mask.count_ones(),
        timings: out.timings,
        decode_time,
    })
}

/// Runs `trials` independent trials on the current rayon pool. Counts do
/// not depend on the schedule; only the timings do.
pub fn run_trials(
    code: &TrmCode,
    decoder: &TrialDecoder,
    spec: &NoiseSpec,
    trials: u64,
    base_seed: u64,
) -> Result<TrialStats> {
    if trials == 0 {
        return Err(CodeError::InvalidParameters("need at least one trial".into()));
    }
    spec.validate(code.length())?;
    let mask = code.monomial_mask();
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|k| run_trial(code, &mask, decoder, spec, base_seed, k))
        .collect::<Result<Vec<_>>>()?;
    let errors = outcomes.iter().filter(|o| !o.success).count() as u64;
    let mut stats = TrialStats::from_counts(trials, errors);
    for o in &outcomes {
        stats.elapsed += o.timings;
        stats.decode_time += o.decode_time;
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix64_reference_values() {
        // splitmix64 outputs for state 0: first two draws
        assert_eq!(mix64(0, 0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(mix64(0, 1), 0x6E78_9E6A_A1B9_65F4);
        assert_ne!(mix64(1, 0), mix64(0, 0));
    }

    #[test]
    fn clopper_pearson_closed_forms() {
        let (lo, hi) = clopper_pearson(0, 10);
        assert_eq!(lo, 0.0);
        // 1 - 0.025^(1/10)
        assert!((hi - 0.308_497_1).abs() < 1e-6, "{hi}");
        let (lo, hi) = clopper_pearson(10, 10);
        assert!((lo - 0.691_502_9).abs() < 1e-6, "{lo}");
        assert_eq!(hi, 1.0);
        let (lo, hi) = clopper_pearson(3, 10);
        assert!(lo < 0.3 && 0.3 < hi);
    }

    #[test]
    fn noise_examples() {
        let x = BitTensor::from_word(&[8, 8], BitWord::from_u64(64, 0xDEAD_BEEF)).unwrap();
        let n = apply_noise(&NoiseSpec::Bsc { p: 0.0 }, &x, 1).unwrap();
        assert!(n.mask.is_zero());
        assert_eq!(n.received, x.to_tri());

        for placement in [Placement::Uniform, Placement::SliceConcentrated] {
            let spec = NoiseSpec::Adversarial { weight: 11, placement };
            let n = apply_noise(&spec, &x, 9).unwrap();
            assert_eq!(n.mask.count_ones(), 11);
            let mut diff = n.received.values().clone();
            diff.xor_assign(x.bits());
            assert_eq!(diff, n.mask);
        }
        let spec = NoiseSpec::Adversarial {
            weight: 65,
            placement: Placement::Uniform,
        };
        assert!(apply_noise(&spec, &x, 0).is_err());

        let n = apply_noise(&NoiseSpec::Bec { p: 0.5 }, &x, 4).unwrap();
        assert_eq!(n.received.erased(), &n.mask);
        for i in 0..64 {
            if !n.mask.get(i) {
                assert_eq!(n.received.get_flat(i), Some(x.bits().get(i)));
            }
        }
    }

    #[test]
    fn concentrated_fills_whole_slices() {
        let x = BitTensor::zeros(&[4, 4, 8]).unwrap();
        let spec = NoiseSpec::Adversarial {
            weight: 32,
            placement: Placement::SliceConcentrated,
        };
        let n = apply_noise(&spec, &x, 2).unwrap();
        let full: Vec<usize> = (0..8).filter(|&i| (0..16).all(|q| n.mask.get(q * 8 + i))).collect();
        assert_eq!(full.len(), 2);
    }

    #[test]
    fn bsc_flip_fraction() {
        let x = BitTensor::zeros(&[1_000_000]).unwrap();
        let mut total = 0usize;
        for seed in 0..4 {
            total += apply_noise(&NoiseSpec::Bsc { p: 0.5 }, &x, seed)
                .unwrap()
                .mask
                .count_ones();
        }
        let frac = total as f64 / 4e6;
        assert!((frac - 0.5).abs() < 0.002, "{frac}");
    }

    #[test]
    fn noiseless_trials_never_fail() {
        let code: TrmCode = "1:3,2:4,2:4".parse().unwrap();
        for kind in [DecoderKind::Full, DecoderKind::TensorAdv] {
            let dec = TrialDecoder::new(&code, kind, None, None).unwrap();
            let stats = run_trials(&code, &dec, &NoiseSpec::Bsc { p: 0.0 }, 20, 7).unwrap();
            assert_eq!(stats.block_errors, 0, "{kind:?}");
        }
        let rm: TrmCode = "2:5".parse().unwrap();
        for kind in [DecoderKind::Ml, DecoderKind::Highrate] {
            let dec = TrialDecoder::new(&rm, kind, None, None).unwrap();
            let stats = run_trials(&rm, &dec, &NoiseSpec::Bsc { p: 0.0 }, 5, 7).unwrap();
            assert_eq!(stats.block_errors, 0, "{kind:?}");
        }
        assert!(TrialDecoder::new(&code, DecoderKind::Highrate, None, None).is_err());
    }

    #[test]
    fn reruns_are_identical() {
        let code: TrmCode = "3:4".parse().unwrap();
        let dec = TrialDecoder::new(&code, DecoderKind::Highrate, None, None).unwrap();
        let spec = NoiseSpec::Bsc { p: 0.05 };
        let a = run_trials(&code, &dec, &spec, 200, 42).unwrap();
        let b = run_trials(&code, &dec, &spec, 200, 42).unwrap();
        assert_eq!(
            (a.block_errors, a.ci_low, a.ci_high),
            (b.block_errors, b.ci_low, b.ci_high)
        );
        assert!(a.block_errors > 0);
    }
}
