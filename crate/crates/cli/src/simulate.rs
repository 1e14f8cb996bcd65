use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use trm_core::channel::{run_trials, DecoderKind, NoiseSpec};
use trm_core::trm::{DecodeConfig, TrmCode};

use crate::codec::build_decoder;
use crate::error::{io_error, CliError};
use crate::output::timings_json;

pub const ARTIFACT_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub profiles: Vec<TrmCode>,
    pub decoder: DecoderKind,
    /// One campaign point per entry, run for every profile.
    pub noise: Vec<NoiseSpec>,
    pub trials: u64,
    pub base_seed: u64,
    /// JSON-lines output.
    pub output: PathBuf,
    /// CSV copy of the table; defaults to `output` with a `.csv` extension.
    #[serde(default)]
    pub csv: Option<PathBuf>,
    /// Wall-clock timings make reruns differ, so they are off by default.
    #[serde(default)]
    pub record_timings: bool,
    #[serde(default)]
    pub counter_threshold: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
    pub level: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Record {
    pub profile: String,
    pub decoder: DecoderKind,
    pub noise: NoiseSpec,
    pub trials: u64,
    pub block_errors: u64,
    pub error_rate: f64,
    pub ci: Interval,
    pub timings: Option<Value>,
    pub base_seed: u64,
    pub artifact_version: u32,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Campaign config (JSON).
    #[arg(long)]
    config: PathBuf,
}

impl CampaignConfig {
    fn validate(&self) -> Result<(), CliError> {
        if self.profiles.is_empty() {
            return Err(CliError::Usage("config: no profiles".into()));
        }
        if self.noise.is_empty() {
            return Err(CliError::Usage("config: empty noise grid".into()));
        }
        if self.trials == 0 {
            return Err(CliError::Usage("config: trials must be at least 1".into()));
        }
        Ok(())
    }
}

fn noise_param(n: &NoiseSpec) -> (&'static str, String) {
    match *n {
        NoiseSpec::Bsc { p } => ("bsc", p.to_string()),
        NoiseSpec::Bec { p } => ("bec", p.to_string()),
        NoiseSpec::Adversarial { weight, placement } => (
            "adversarial",
            format!(
                "{weight}/{}",
                serde_json::to_value(placement)
                    .expect("enum serializes")
                    .as_str()
                    .unwrap_or("")
            ),
        ),
    }
}

pub fn run(a: &SimulateArgs) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(&a.config).map_err(io_error(&a.config))?;
    let cfg: CampaignConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", a.config.display())))?;
    cfg.validate()?;

    let mut records = Vec::new();
    for code in &cfg.profiles {
        let mut dcfg = DecodeConfig::for_code(code);
        if let Some(th) = cfg.counter_threshold {
            dcfg.counter_threshold = th;
        }
        let decoder = build_decoder(code, cfg.decoder, Some(dcfg))?;
        for noise in &cfg.noise {
            let stats = run_trials(code, &decoder, noise, cfg.trials, cfg.base_seed)?;
            let timings = cfg.record_timings.then(|| {
                let mut t = timings_json(&stats.elapsed);
                t["decode_total_s"] = stats.decode_time.as_secs_f64().into();
                t
            });
            eprintln!(
                "{code} {:?}: {}/{} block errors",
                noise, stats.block_errors, stats.trials
            );
            records.push(Record {
                profile: code.to_string(),
                decoder: cfg.decoder,
                noise: *noise,
                trials: stats.trials,
                block_errors: stats.block_errors,
                error_rate: stats.error_rate,
                ci: Interval {
                    low: stats.ci_low,
                    high: stats.ci_high,
                    level: 0.95,
                },
                timings,
                base_seed: cfg.base_seed,
                artifact_version: ARTIFACT_VERSION,
            });
        }
    }

    let mut out = BufWriter::new(File::create(&cfg.output).map_err(io_error(&cfg.output))?);
    for r in &records {
        serde_json::to_writer(&mut out, r).expect("record serializes");
        writeln!(out).map_err(io_error(&cfg.output))?;
    }
    out.flush().map_err(io_error(&cfg.output))?;

    let csv_path = cfg.csv.clone().unwrap_or_else(|| cfg.output.with_extension("csv"));
    let csv_err = |e: csv::Error| CliError::Usage(format!("{}: {e}", csv_path.display()));
    let mut w = csv::Writer::from_path(&csv_path).map_err(csv_err)?;
    w.write_record([
        "profile",
        "decoder",
        "noise",
        "param",
        "trials",
        "block_errors",
        "error_rate",
        "ci_low",
        "ci_high",
    ])
    .map_err(csv_err)?;
    for r in &records {
        let (kind, param) = noise_param(&r.noise);
        let decoder = serde_json::to_value(r.decoder).expect("enum serializes");
        w.write_record([
            r.profile.clone(),
            decoder.as_str().unwrap_or_default().to_string(),
            kind.to_string(),
            param,
            r.trials.to_string(),
            r.block_errors.to_string(),
            r.error_rate.to_string(),
            r.ci.low.to_string(),
            r.ci.high.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| CliError::Usage(format!("{}: {e}", csv_path.display())))?;
    Ok(0)
}
