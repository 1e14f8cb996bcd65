use std::time::{Duration, Instant};

use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use trm_core::adversarial::{tensor_decode, ComponentCode};
use trm_core::channel::{apply_noise_with, mix64, DecoderKind, NoiseSpec, TrialDecoder};
use trm_core::rm::RmCode;
use trm_core::trm::{random_codeword, StageTimings, TrmCode};

use crate::codec::build_decoder;
use crate::error::CliError;
use crate::output::{parse_profile, timings_json};

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Base profile; the last layer is resized to each entry of --sizes.
    #[arg(long)]
    profile: String,
    /// Values of m for the last layer, keeping m - r fixed.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// BSC crossover probability of the benchmark input.
    #[arg(long, default_value_t = 0.0002)]
    p: f64,
    /// Repetitions per size; the fastest is reported.
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip the adversarial decoder column.
    #[arg(long)]
    no_tensor_adv: bool,
    /// Emit JSON lines instead of a table.
    #[arg(long)]
    json: bool,
}

struct Row {
    code: TrmCode,
    full: StageTimings,
    full_total: Duration,
    adv: Option<Duration>,
}

fn resized(base: &TrmCode, m: usize) -> Result<TrmCode, CliError> {
    let last = base.layers().last().expect("profile has layers");
    let gap = last.m() - last.r();
    if m < gap {
        return Err(CliError::Usage(format!(
            "size {m} is below m - r = {gap} of the last layer"
        )));
    }
    let mut layers = base.layers().to_vec();
    *layers.last_mut().expect("profile has layers") = RmCode::new(m - gap, m)?;
    Ok(TrmCode::new(layers)?)
}

fn sum(t: &StageTimings) -> Duration {
    t.table_pass + t.column_pass + t.final_pass
}

pub fn run(a: &BenchArgs) -> Result<u8, CliError> {
    let base = parse_profile(&a.profile)?;
    let reps = a.reps.max(1);
    let mut rows = Vec::new();
    for (i, &m) in a.sizes.iter().enumerate() {
        let code = resized(&base, m)?;
        let TrialDecoder::Full(dec) = build_decoder(&code, DecoderKind::Full, None)? else {
            unreachable!("full decoder requested")
        };
        let mut rng = ChaCha8Rng::seed_from_u64(mix64(a.seed, i as u64));
        let cw = random_codeword(&code, &code.monomial_mask(), &mut rng);
        let noisy = apply_noise_with(&NoiseSpec::Bsc { p: a.p }, &cw, &mut rng)?.received;
        let bits = noisy.to_bits().expect("bsc output has no erasures");

        let mut best: Option<StageTimings> = None;
        for _ in 0..reps {
            let t = dec.decode(&bits)?.timings;
            if best.is_none_or(|b| sum(&t) < sum(&b)) {
                best = Some(t);
            }
        }
        let full = best.expect("at least one repetition");

        let adv = if a.no_tensor_adv {
            None
        } else {
            let comps = code.components();
            let codes: Vec<&dyn ComponentCode> = comps.iter().map(|c| c as &dyn ComponentCode).collect();
            let mut best = Duration::MAX;
            for _ in 0..reps {
                let start = Instant::now();
                std::hint::black_box(tensor_decode(&codes, &noisy)?);
                best = best.min(start.elapsed());
            }
            Some(best)
        };
        rows.push(Row {
            full_total: sum(&full),
            code,
            full,
            adv,
        });
    }

    let ratio = |i: usize, f: &dyn Fn(&Row) -> Option<Duration>| -> Option<f64> {
        let prev = f(rows.get(i.checked_sub(1)?)?)?;
        Some(f(&rows[i])?.as_secs_f64() / prev.as_secs_f64())
    };
    if !a.json {
        println!(
            "{:<16} {:>6} {:>12} {:>12} {:>12} {:>12} {:>8} {:>12} {:>8}",
            "profile", "log2n", "table", "column", "final", "full", "ratio", "tensor-adv", "ratio"
        );
    }
    for (i, r) in rows.iter().enumerate() {
        let full_ratio = ratio(i, &|r| Some(r.full_total));
        let adv_ratio = ratio(i, &|r| r.adv);
        if a.json {
            println!(
                "{}",
                json!({
                    "profile": r.code.to_string(),
                    "log2_n": r.code.total_m(),
                    "p": a.p,
                    "full": timings_json(&r.full),
                    "full_total_s": r.full_total.as_secs_f64(),
                    "full_ratio": full_ratio,
                    "tensor_adv_s": r.adv.map(|d| d.as_secs_f64()),
                    "tensor_adv_ratio": adv_ratio,
                })
            );
        } else {
            let fmt_ratio = |x: Option<f64>| x.map_or("-".to_string(), |x| format!("{x:.2}"));
            let fmt_time = |d: Duration| format!("{d:.2?}");
            println!(
                "{:<16} {:>6} {:>12} {:>12} {:>12} {:>12} {:>8} {:>12} {:>8}",
                r.code.to_string(),
                r.code.total_m(),
                fmt_time(r.full.table_pass),
                fmt_time(r.full.column_pass),
                fmt_time(r.full.final_pass),
                fmt_time(r.full_total),
                fmt_ratio(full_ratio),
                r.adv.map_or("-".to_string(), fmt_time),
                fmt_ratio(adv_ratio),
            );
        }
    }
    Ok(0)
}
