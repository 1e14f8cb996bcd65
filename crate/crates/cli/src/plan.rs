use clap::{Args, ValueEnum};
use trm_core::trm::{plan_parameters, PlanRequest};

use crate::error::CliError;
use crate::output::{code_json, parse_profile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Derive (r_i, m_i) from n, t, rate and p.
    Theorem,
    /// Describe the code given by --profile.
    Profile,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Target block length.
    #[arg(long)]
    n: Option<u64>,
    /// Number of tensor factors.
    #[arg(long, default_value_t = 3)]
    t: usize,
    /// Target rate in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    rate: f64,
    /// BSC crossover probability in (0, 1/2).
    #[arg(long, default_value_t = 0.01)]
    p: f64,
    #[arg(long, value_enum, default_value_t = Mode::Theorem)]
    mode: Mode,
    /// Profile "r1:m1,r2:m2,..." for --mode profile.
    #[arg(long)]
    profile: Option<String>,
}

pub fn run(a: &PlanArgs) -> Result<u8, CliError> {
    if !(a.rate > 0.0 && a.rate < 1.0) {
        return Err(CliError::Usage(format!("--rate {} must lie in (0, 1)", a.rate)));
    }
    if a.mode == Mode::Profile || a.profile.is_some() {
        let Some(profile) = &a.profile else {
            return Err(CliError::Usage("--mode profile needs --profile".into()));
        };
        println!("{}", code_json(&parse_profile(profile)?));
        return Ok(0);
    }
    let req = PlanRequest {
        n: a.n.ok_or_else(|| CliError::Usage("--mode theorem needs --n".into()))?,
        t: a.t,
        rate: a.rate,
        p: a.p,
    };
    let plan = plan_parameters(&req).map_err(|e| CliError::Usage(e.to_string()))?;
    match plan {
        Ok(code) => {
            println!("{}", code_json(&code));
            Ok(0)
        }
        Err(diag) => {
            println!("{}", serde_json::to_string(&diag).expect("diagnostic serializes"));
            Ok(2)
        }
    }
}
