use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde_json::json;
use trm_core::channel::{DecoderKind, TrialDecoder};
use trm_core::trm::{trm_encode, trm_is_codeword, DecodeConfig, TrmCode};
use trm_core::{BitWord, TriTensor};

use crate::error::{io_error, CliError};
use crate::output::{cached_table, parse_profile, timings_json};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DecoderArg {
    Ml,
    Highrate,
    TensorAdv,
    Full,
}

impl From<DecoderArg> for DecoderKind {
    fn from(d: DecoderArg) -> Self {
        match d {
            DecoderArg::Ml => DecoderKind::Ml,
            DecoderArg::Highrate => DecoderKind::Highrate,
            DecoderArg::TensorAdv => DecoderKind::TensorAdv,
            DecoderArg::Full => DecoderKind::Full,
        }
    }
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    profile: String,
    /// Coefficients in product-monomial order, as a bit-word file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Codeword tensor file.
    #[arg(long = "out")]
    output: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    profile: String,
    /// Received tensor file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Decoded tensor file (all erasures if the decoder gave up).
    #[arg(long = "out")]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = DecoderArg::Full)]
    decoder: DecoderArg,
    /// Override the column-repair abort threshold of the full decoder.
    #[arg(long)]
    counter_threshold: Option<u64>,
    /// Skip the final whole-tensor pass of the full decoder.
    #[arg(long)]
    no_final_pass: bool,
}

fn write_tensor(path: &Path, t: &TriTensor) -> Result<(), CliError> {
    let mut out = BufWriter::new(File::create(path).map_err(io_error(path))?);
    t.write_to(&mut out).map_err(io_error(path))?;
    out.flush().map_err(io_error(path))
}

pub fn read_tensor(path: &Path) -> Result<TriTensor, CliError> {
    let file = File::open(path).map_err(io_error(path))?;
    Ok(TriTensor::read_from(BufReader::new(file))?)
}

pub fn encode(a: &EncodeArgs) -> Result<u8, CliError> {
    let code = parse_profile(&a.profile)?;
    let file = File::open(&a.input).map_err(io_error(&a.input))?;
    let coeffs = BitWord::read_from(BufReader::new(file))?;
    let cw = trm_encode(&code, &coeffs)?;
    write_tensor(&a.output, &cw.to_tri())?;
    Ok(0)
}

pub fn build_decoder(code: &TrmCode, kind: DecoderKind, cfg: Option<DecodeConfig>) -> Result<TrialDecoder, CliError> {
    let table = match kind {
        DecoderKind::Full | DecoderKind::Ml => cached_table(&code.layers()[0])?,
        _ => None,
    };
    Ok(TrialDecoder::new(code, kind, cfg, table)?)
}

pub fn decode(a: &DecodeArgs) -> Result<u8, CliError> {
    let code = parse_profile(&a.profile)?;
    let received = read_tensor(&a.input)?;
    if received.shape() != code.shape().as_slice() {
        return Err(CliError::Domain(format!(
            "shape mismatch: file has {:?}, profile {code} has {:?}",
            received.shape(),
            code.shape()
        )));
    }
    let mut cfg = DecodeConfig::for_code(&code);
    if let Some(th) = a.counter_threshold {
        cfg.counter_threshold = th;
    }
    cfg.run_final_pass = !a.no_final_pass;
    let decoder = build_decoder(&code, a.decoder.into(), Some(cfg))?;
    let decoded = decoder.decode(&received)?;
    let out = match &decoded.tensor {
        Some(t) => t.to_tri(),
        None => TriTensor::all_erased(received.shape())?,
    };
    let changed_bits = (0..out.len())
        .filter(|&i| received.get_flat(i) != out.get_flat(i))
        .count();
    let is_codeword = decoded.tensor.as_ref().is_some_and(|t| trm_is_codeword(&code, t));
    write_tensor(&a.output, &out)?;
    println!(
        "{}",
        json!({
            "profile": code.to_string(),
            "decoder": serde_json::to_value(DecoderKind::from(a.decoder)).expect("enum serializes"),
            "changed_bits": changed_bits,
            "output_is_codeword": is_codeword,
            "stage_timings": timings_json(&decoded.timings),
        })
    );
    Ok(0)
}
