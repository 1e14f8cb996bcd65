//! Fast paths against the brute-force references, as a pass/fail table.

use std::collections::HashSet;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trm_core::adversarial::{adversarial_radius, tensor_decode, ComponentCode};
use trm_core::channel::{apply_noise_with, NoiseSpec, Placement};
use trm_core::erasure::{rm_complete, ErasureOutcome};
use trm_core::inner::build_ml_table;
use trm_core::oracles::{enumerate_trm, evaluate_polynomial, Codebook};
use trm_core::rm::{rm_encode, rm_is_codeword, RmCode};
use trm_core::trm::{trm_encode, TrmCode};
use trm_core::{BitWord, TriTensor, TriWord};

use crate::error::CliError;

#[derive(Debug, Args)]
pub struct OracleCheckArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Random cases per code and check.
    #[arg(long, default_value_t = 2000)]
    cases: usize,
}

struct Check {
    name: &'static str,
    cases: usize,
    mismatches: usize,
}

fn random_word(rng: &mut ChaCha8Rng, n: usize) -> BitWord {
    BitWord::from_bits((0..n).map(|_| rng.random::<bool>()))
}

fn small_codes(max_m: usize) -> Vec<RmCode> {
    (1..=max_m)
        .flat_map(|m| (0..=m).map(move |r| RmCode::new(r, m).expect("r <= m")))
        .collect()
}

fn encode_vs_evaluation(rng: &mut ChaCha8Rng, cases: usize) -> Check {
    let mut c = Check {
        name: "rm encode vs pointwise evaluation",
        cases: 0,
        mismatches: 0,
    };
    for code in small_codes(6) {
        for _ in 0..cases / 10 {
            let coeffs = random_word(rng, code.dimension());
            let want = evaluate_polynomial(code.r(), code.m(), &coeffs).expect("valid code");
            c.mismatches += (rm_encode(&code, &coeffs).expect("valid length") != want) as usize;
            c.cases += 1;
        }
    }
    c
}

fn membership_vs_enumeration(rng: &mut ChaCha8Rng, cases: usize) -> Check {
    let mut c = Check {
        name: "rm membership vs codebook",
        cases: 0,
        mismatches: 0,
    };
    for code in small_codes(4) {
        let book = Codebook::rm(code.r(), code.m()).expect("small code");
        let set: HashSet<&BitWord> = book.words().iter().collect();
        for k in 0..cases {
            let w = if k % 2 == 0 {
                book.encode(rng.random_range(0..book.words().len())).clone()
            } else {
                random_word(rng, code.length())
            };
            c.mismatches += (rm_is_codeword(&code, &w) != set.contains(&w)) as usize;
            c.cases += 1;
        }
    }
    c
}

fn completion_vs_consistent_set(rng: &mut ChaCha8Rng, cases: usize) -> Check {
    let mut c = Check {
        name: "erasure completion vs consistent set",
        cases: 0,
        mismatches: 0,
    };
    for code in small_codes(4) {
        let book = Codebook::rm(code.r(), code.m()).expect("small code");
        for k in 0..cases {
            let base = if k % 2 == 0 {
                book.encode(rng.random_range(0..book.words().len())).clone()
            } else {
                random_word(rng, code.length())
            };
            let e = rng.random_range(0..code.d_min());
            let mut erased = BitWord::zeros(code.length());
            for i in rand::seq::index::sample(rng, code.length(), e) {
                erased.set(i, true);
            }
            let y = TriWord::new(base, erased).expect("same length");
            let consistent = book.consistent(&y);
            let ok = match rm_complete(&code, &y).expect("fewer than d erasures") {
                ErasureOutcome::Completed(w) => consistent == [w],
                ErasureOutcome::Inconsistent => consistent.is_empty(),
            };
            c.mismatches += !ok as usize;
            c.cases += 1;
        }
    }
    c
}

fn table_vs_nearest(rng: &mut ChaCha8Rng, cases: usize) -> Check {
    let mut c = Check {
        name: "ml table vs nearest codeword",
        cases: 0,
        mismatches: 0,
    };
    for code in small_codes(4) {
        let book = Codebook::rm(code.r(), code.m()).expect("small code");
        let table = build_ml_table(&code).expect("length <= 16");
        for _ in 0..cases {
            let w = random_word(rng, code.length());
            c.mismatches += (table.decode(&w) != book.nearest(&w)) as usize;
            c.cases += 1;
        }
    }
    c
}

fn tensor_encode_vs_basis(rng: &mut ChaCha8Rng, cases: usize) -> Check {
    let mut c = Check {
        name: "trm encode vs tensor basis",
        cases: 0,
        mismatches: 0,
    };
    let profiles: [&[(usize, usize)]; 4] = [
        &[(1, 2), (1, 2)],
        &[(0, 2), (1, 3)],
        &[(1, 2), (0, 1), (1, 3)],
        &[(1, 3), (1, 3)],
    ];
    for layers in profiles {
        let code = TrmCode::from_pairs(layers).expect("valid profile");
        let book = enumerate_trm(layers).expect("small code");
        for _ in 0..cases / 10 {
            let coeffs = random_word(rng, book.dimension());
            let mut want = BitWord::zeros(code.length());
            for i in coeffs.ones_iter() {
                want.xor_assign(&book.basis()[i]);
            }
            c.mismatches += (trm_encode(&code, &coeffs).expect("valid length").bits() != &want) as usize;
            c.cases += 1;
        }
    }
    c
}

fn tensor_distance(_: &mut ChaCha8Rng, _: usize) -> Check {
    let mut c = Check {
        name: "trm d_min vs brute force",
        cases: 0,
        mismatches: 0,
    };
    let profiles: [&[(usize, usize)]; 5] = [
        &[(0, 1), (0, 1)],
        &[(1, 2), (1, 2)],
        &[(0, 2), (1, 3)],
        &[(1, 3), (1, 3)],
        &[(1, 2), (0, 2), (1, 2)],
    ];
    for layers in profiles {
        let code = TrmCode::from_pairs(layers).expect("valid profile");
        let got = enumerate_trm(layers).expect("small code").min_distance();
        c.mismatches += (got as u128 != code.d_min()) as usize;
        c.cases += 1;
    }
    c
}

fn tensor_decoder_radius(rng: &mut ChaCha8Rng, cases: usize) -> Check {
    let mut c = Check {
        name: "tensor decoder within radius",
        cases: 0,
        mismatches: 0,
    };
    for profile in ["0:2,0:2", "1:3,1:3", "1:3,1:3,1:3", "1:4,1:3"] {
        let code: TrmCode = profile.parse().expect("valid profile");
        let comps = code.components();
        let codes: Vec<&dyn ComponentCode> = comps.iter().map(|c| c as &dyn ComponentCode).collect();
        let radius = adversarial_radius(&codes) as usize;
        let mask = code.monomial_mask();
        for k in 0..cases {
            let cw = trm_core::trm::random_codeword(&code, &mask, rng);
            let placement = if k % 2 == 0 {
                Placement::Uniform
            } else {
                Placement::SliceConcentrated
            };
            let spec = NoiseSpec::Adversarial {
                weight: rng.random_range(0..=radius),
                placement,
            };
            let noisy: TriTensor = apply_noise_with(&spec, &cw, rng).expect("weight <= length").received;
            let out = tensor_decode(&codes, &noisy).expect("shapes match");
            c.mismatches += (out.to_bits().as_ref() != Some(&cw)) as usize;
            c.cases += 1;
        }
    }
    c
}

pub fn run(a: &OracleCheckArgs) -> Result<u8, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let checks: [fn(&mut ChaCha8Rng, usize) -> Check; 7] = [
        encode_vs_evaluation,
        membership_vs_enumeration,
        completion_vs_consistent_set,
        table_vs_nearest,
        tensor_encode_vs_basis,
        tensor_distance,
        tensor_decoder_radius,
    ];
    let mut failed = 0;
    println!("{:<40} {:>8} {:>10}  result", "check", "cases", "mismatch");
    for f in checks {
        let c = f(&mut rng, a.cases.max(10));
        let pass = c.mismatches == 0;
        failed += !pass as usize;
        println!(
            "{:<40} {:>8} {:>10}  {}",
            c.name,
            c.cases,
            c.mismatches,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    Ok(if failed == 0 { 0 } else { 2 })
}
