//! JSON shapes shared by several subcommands.

use std::path::Path;

use serde_json::{json, Value};
use trm_core::inner::{build_ml_table, MlTable, DEFAULT_TABLE_CAP_BITS};
use trm_core::rm::RmCode;
use trm_core::trm::{counter_threshold, StageTimings, TrmCode};

use crate::error::CliError;

pub fn timings_json(t: &StageTimings) -> Value {
    json!({
        "table_pass_s": t.table_pass.as_secs_f64(),
        "column_pass_s": t.column_pass.as_secs_f64(),
        "final_pass_s": t.final_pass.as_secs_f64(),
    })
}

pub fn code_json(code: &TrmCode) -> Value {
    json!({
        "profile": code.to_string(),
        "t": code.t(),
        "shape": code.shape(),
        "length": code.length(),
        "dimension": code.dimension(),
        "rate": code.rate(),
        "d_min": code.d_min(),
        "counter_threshold": counter_threshold(code.length() as u64),
    })
}

pub fn parse_profile(s: &str) -> Result<TrmCode, CliError> {
    s.parse().map_err(|e| CliError::Usage(format!("profile {s:?}: {e}")))
}

/// ML table for `code`, read from or written to `$TRM_CACHE_DIR` when set.
/// Returns `None` for codes too long to tabulate.
pub fn cached_table(code: &RmCode) -> Result<Option<MlTable>, CliError> {
    if code.length() > DEFAULT_TABLE_CAP_BITS {
        return Ok(None);
    }
    let Some(dir) = std::env::var_os("TRM_CACHE_DIR") else {
        return Ok(Some(build_ml_table(code)?));
    };
    let path = Path::new(&dir).join(format!("rm_{}_{}.mltable", code.r(), code.m()));
    if let Ok(bytes) = std::fs::read(&path) {
        if let Ok(table) = MlTable::read_from(bytes.as_slice()) {
            if table.code() == code {
                return Ok(Some(table));
            }
        }
    }
    let table = build_ml_table(code)?;
    let mut bytes = Vec::new();
    table
        .write_to(&mut bytes)
        .map_err(|e| CliError::Usage(format!("ml table: {e}")))?;
    // a cache that cannot be written is not an error
    if std::fs::create_dir_all(&dir).is_ok() {
        let _ = std::fs::write(&path, bytes);
    }
    Ok(Some(table))
}
