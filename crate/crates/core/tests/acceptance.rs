//! Acceptance suite: one pass/fail line per criterion. Exits nonzero if any
//! criterion fails.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use trm_core::adversarial::{adversarial_radius, linear_component, rm_component, tensor_decode, ComponentCode};
use trm_core::bits::{BitWord, TriWord};
use trm_core::channel::{apply_noise_with, mix64, run_trials, DecoderKind, NoiseSpec, Placement, TrialDecoder};
use trm_core::erasure::{f_rm, rm_complete, ErasureOutcome, LinearCompleter};
use trm_core::gf2::BitMatrix;
use trm_core::inner::MajorityDecoder;
use trm_core::oracles::{enumerate_trm, Codebook};
use trm_core::rm::{rm_encode, RmCode};
use trm_core::tensor::{BitTensor, TriTensor};
use trm_core::trm::{random_codeword, trm_encode, TrmCode};

type Criterion = (&'static str, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rm(r: usize, m: usize) -> RmCode {
    RmCode::new(r, m).unwrap()
}

fn random_erasures(rng: &mut ChaCha8Rng, n: usize, count: usize) -> BitWord {
    let mut e = BitWord::zeros(n);
    for i in rand::seq::index::sample(rng, n, count) {
        e.set(i, true);
    }
    e
}

fn ac1_erasure_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut checked, mut mismatches) = (0usize, 0usize);
    for m in 1..=6 {
        for r in 0..=m {
            let code = rm(r, m);
            let lin = LinearCompleter::new(&code.generator()).unwrap();
            for _ in 0..10_000 {
                let c = rm_encode(&code, &random_word(&mut rng, code.dimension())).unwrap();
                let e = rng.random_range(0..code.d_min());
                let y = TriWord::new(c.clone(), random_erasures(&mut rng, code.length(), e)).unwrap();
                let want = ErasureOutcome::Completed(c);
                let a = rm_complete(&code, &y).unwrap();
                let b = lin.complete(&y).unwrap();
                if a != want || b != want {
                    mismatches += 1;
                }
                checked += 1;
            }
        }
    }
    outcome(
        mismatches == 0,
        format!("{mismatches} mismatches over {checked} pairs, all RM(r,m) with m <= 6"),
    )
}

fn ac2_erasure_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let (mut conflicts, mut oracle_violations, mut oracle_checked, mut total) = (0usize, 0usize, 0usize, 0usize);
    for (r, m) in [
        (0, 2),
        (1, 2),
        (0, 3),
        (1, 3),
        (2, 3),
        (1, 4),
        (2, 4),
        (3, 4),
        (2, 5),
        (3, 6),
    ] {
        let code = rm(r, m);
        let n = code.length();
        let book = Codebook::rm(r, m).ok().filter(|b| b.dimension() <= 12);
        for i in 0..100_000 {
            let base = if i % 2 == 0 {
                rm_encode(&code, &random_word(&mut rng, code.dimension())).unwrap()
            } else {
                random_word(&mut rng, n)
            };
            // mostly below d_min so the completer runs, sometimes above
            let e = if i % 5 == 0 {
                rng.random_range(0..=n)
            } else {
                rng.random_range(0..code.d_min())
            };
            let mut y = TriWord::new(base, random_erasures(&mut rng, n, e)).unwrap();
            // a few random flips so consistency is not guaranteed
            for _ in 0..(i % 3) {
                let p = rng.random_range(0..n);
                if let Some(b) = y.get(p) {
                    y.set(p, Some(!b));
                }
            }
            total += 1;
            let f = f_rm(&code, &y);
            if let Some(c) = f.to_word() {
                if !y.agrees_with(&c) {
                    conflicts += 1;
                }
            }
            if e >= code.d_min() {
                if !f.is_all_erased() {
                    conflicts += 1;
                }
                continue;
            }
            let got = rm_complete(&code, &y).unwrap();
            if let ErasureOutcome::Completed(c) = &got {
                if !y.agrees_with(c) {
                    conflicts += 1;
                }
            }
            if let Some(book) = &book {
                oracle_checked += 1;
                let empty = book.consistent(&y).is_empty();
                if empty != (got == ErasureOutcome::Inconsistent) {
                    oracle_violations += 1;
                }
            }
        }
    }
    outcome(
        conflicts == 0 && oracle_violations == 0,
        format!(
            "{conflicts} conflicts over {total} words; {oracle_violations} Inconsistent/oracle disagreements over {oracle_checked} enumerable cases"
        ),
    )
}

fn adversarial_sets(rng: &mut ChaCha8Rng) -> Vec<(String, Vec<Box<dyn ComponentCode>>)> {
    let rmc = |r, m| -> Box<dyn ComponentCode> { Box::new(rm_component(rm(r, m))) };
    let mut sets = vec![
        ("RM(0,2)^2".to_string(), vec![rmc(0, 2), rmc(0, 2)]),
        ("RM(1,3)^2".to_string(), vec![rmc(1, 3), rmc(1, 3)]),
        ("RM(1,3)^3".to_string(), vec![rmc(1, 3), rmc(1, 3), rmc(1, 3)]),
        ("RM(1,4)xRM(1,3)".to_string(), vec![rmc(1, 4), rmc(1, 3)]),
    ];
    for (k, n) in [(3, 12), (4, 16), (2, 9)] {
        let g = random_generator(rng, k, n);
        let a: Box<dyn ComponentCode> = Box::new(linear_component(&g).unwrap());
        let b: Box<dyn ComponentCode> = Box::new(linear_component(&g).unwrap());
        sets.push((format!("random [{n},{k},{}]^2", a.d_min()), vec![a, b]));
    }
    sets
}

/// All subsets of `0..n` of size at most `w`, if there are at most `cap`.
fn small_patterns(n: usize, w: usize, cap: usize) -> Option<Vec<Vec<usize>>> {
    let count: u128 = (0..=w).map(|k| trm_core::rm::binomial(n, k)).sum();
    if count > cap as u128 {
        return None;
    }
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..w {
        let mut next = Vec::new();
        for p in &frontier {
            let start = p.last().map_or(0, |&x: &usize| x + 1);
            for i in start..n {
                let mut q: Vec<usize> = p.clone();
                q.push(i);
                next.push(q);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    Some(out)
}

fn ac3_adversarial_radius() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut failures = 0usize;
    let mut notes = Vec::new();
    for (name, set) in adversarial_sets(&mut rng) {
        let codes: Vec<&dyn ComponentCode> = set.iter().map(|c| c.as_ref()).collect();
        let gens: Vec<Vec<BitWord>> = codes.iter().map(|c| c.generator()).collect();
        let radius = adversarial_radius(&codes) as usize;
        let shape: Vec<usize> = codes.iter().map(|c| c.length()).collect();
        let n: usize = shape.iter().product();
        let exhaustive = small_patterns(n, radius, 100_000);
        let run = |pattern: &BitWord, rng: &mut ChaCha8Rng| {
            let cw = random_product_codeword(rng, &gens);
            let mut values = cw.bits().clone();
            values.xor_assign(pattern);
            let input = TriTensor::new(&shape, values, BitWord::zeros(n)).unwrap();
            let out = tensor_decode(&codes, &input).unwrap();
            out.to_bits().as_ref() != Some(&cw)
        };
        let mut trials = 0usize;
        match &exhaustive {
            Some(patterns) => {
                while trials < 10_000 {
                    for p in patterns {
                        let mut mask = BitWord::zeros(n);
                        for &i in p {
                            mask.set(i, true);
                        }
                        failures += run(&mask, &mut rng) as usize;
                        trials += 1;
                    }
                }
            }
            None => {
                for k in 0..10_000u64 {
                    let weight = if k % 2 == 0 {
                        radius
                    } else {
                        rng.random_range(0..=radius)
                    };
                    let placement = if k % 4 < 2 {
                        Placement::Uniform
                    } else {
                        Placement::SliceConcentrated
                    };
                    let spec = NoiseSpec::Adversarial { weight, placement };
                    let zero = BitTensor::zeros(&shape).unwrap();
                    let mask = apply_noise_with(&spec, &zero, &mut rng).unwrap().mask;
                    failures += run(&mask, &mut rng) as usize;
                    trials += 1;
                }
            }
        }
        notes.push(format!(
            "{name}: radius {radius}, {trials} {}",
            if exhaustive.is_some() { "exhaustive" } else { "sampled" }
        ));
    }
    outcome(failures == 0, format!("{failures} failures; {}", notes.join("; ")))
}

fn ac4_output_discipline() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let (mut violations, mut total, mut boolean) = (0usize, 0usize, 0usize);
    for (_, set) in adversarial_sets(&mut rng) {
        let codes: Vec<&dyn ComponentCode> = set.iter().map(|c| c.as_ref()).collect();
        let gens: Vec<Vec<BitWord>> = codes.iter().map(|c| c.generator()).collect();
        let prod: usize = codes.iter().map(|c| c.d_min()).product();
        let radius = adversarial_radius(&codes) as usize;
        let shape: Vec<usize> = codes.iter().map(|c| c.length()).collect();
        let n: usize = shape.iter().product();
        for k in 0..10_000 {
            let cw = random_product_codeword(&mut rng, &gens);
            let flips = match k % 3 {
                0 => rng.random_range(radius..=2 * radius + 2),
                1 => rng.random_range(0..=n / 2),
                _ => rng.random_range(0..=prod),
            };
            let mut values = cw.bits().clone();
            for i in rand::seq::index::sample(&mut rng, n, flips.min(n)) {
                values.flip(i);
            }
            let e = if k % 4 == 0 { rng.random_range(0..8).min(n) } else { 0 };
            let input = TriTensor::new(&shape, values, random_erasures(&mut rng, n, e)).unwrap();
            let out = tensor_decode(&codes, &input).unwrap();
            total += 1;
            match out.to_bits() {
                Some(b) => {
                    boolean += 1;
                    if !is_tensor_codeword(&codes, &b) || 2 * distance_to_input(&b, &input) >= prod {
                        violations += 1;
                    }
                }
                None => violations += (!out.is_all_erased()) as usize,
            }
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations over {total} fuzzed inputs ({boolean} Boolean outputs)"),
    )
}

fn ac5_highrate_bound() -> Outcome {
    let code: TrmCode = "4:8".parse().unwrap();
    let dec = TrialDecoder::new(&code, DecoderKind::Highrate, None, None).unwrap();
    let p = (-6f64).exp2() / 5.0;
    let stats = run_trials(&code, &dec, &NoiseSpec::Bsc { p }, 2000, 5).unwrap();
    outcome(
        stats.error_rate <= 0.0625 && stats.ci_high <= 0.085,
        format!(
            "RM(4,8), p = {p:.6}: {}/{} block errors, rate {:.4} (<= 0.0625), CP upper {:.4} (<= 0.085)",
            stats.block_errors, stats.trials, stats.error_rate, stats.ci_high
        ),
    )
}

fn ac6_majority_radius() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let (mut failures, mut total) = (0usize, 0usize);
    for (r, m) in [(1, 3), (1, 4), (2, 4)] {
        let code = rm(r, m);
        let dec = MajorityDecoder::new(&code);
        let radius = code.d_min() / 2 - 1;
        let patterns = small_patterns(code.length(), radius, usize::MAX).unwrap();
        for _ in 0..100 {
            let c = rm_encode(&code, &random_word(&mut rng, code.dimension())).unwrap();
            for p in &patterns {
                let mut w = c.clone();
                for &i in p {
                    w.flip(i);
                }
                failures += (dec.decode(&w) != c) as usize;
                total += 1;
            }
        }
    }
    let code = rm(4, 8);
    let dec = MajorityDecoder::new(&code);
    for k in 0..10_000 {
        let c = rm_encode(&code, &random_word(&mut rng, code.dimension())).unwrap();
        let weight = if k % 2 == 0 { 7 } else { rng.random_range(0..=7) };
        let mut w = c.clone();
        for i in rand::seq::index::sample(&mut rng, 256, weight) {
            w.flip(i);
        }
        failures += (dec.decode(&w) != c) as usize;
        total += 1;
    }
    outcome(failures == 0, format!("{failures} failures over {total} patterns"))
}

fn ac7_end_to_end() -> Outcome {
    let p = 0.005;
    let code: TrmCode = "2:4,5:7,6:8".parse().unwrap();
    let dec = TrialDecoder::new(&code, DecoderKind::Full, None, None).unwrap();
    let t3 = run_trials(&code, &dec, &NoiseSpec::Bsc { p }, 500, 7).unwrap();

    let code4: TrmCode = "2:4,5:7,6:8,6:8".parse().unwrap();
    let TrialDecoder::Full(full4) = TrialDecoder::new(&code4, DecoderKind::Full, None, None).unwrap() else {
        unreachable!()
    };
    let mask = code4.monomial_mask();
    let (mut errors4, mut final_failed) = (0usize, 0usize);
    for k in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(mix64(8, k));
        let cw = random_codeword(&code4, &mask, &mut rng);
        let noisy = apply_noise_with(&NoiseSpec::Bsc { p }, &cw, &mut rng).unwrap();
        let out = full4.decode(&noisy.received.to_bits().unwrap()).unwrap();
        errors4 += (out.tensor != cw) as usize;
        final_failed += out.final_pass_failed as usize;
    }
    outcome(
        t3.error_rate <= 0.01 && errors4 == 0 && final_failed == 0,
        format!(
            "t=3 n=2^19 p={p}: {}/{} block errors (rate {:.3}, <= 0.01); t=4 n=2^27: {errors4}/20 block errors, final pass erased {final_failed}/20",
            t3.block_errors, t3.trials, t3.error_rate
        ),
    )
}

/// Fastest of several runs, repeated until at least `budget` has elapsed.
fn min_time(budget: Duration, mut f: impl FnMut()) -> Duration {
    let start = Instant::now();
    let mut best = Duration::MAX;
    let mut runs = 0;
    while runs < 3 || start.elapsed() < budget {
        let t = Instant::now();
        f();
        best = best.min(t.elapsed());
        runs += 1;
    }
    best
}

fn ac8_scaling() -> Outcome {
    let profiles = ["2:4,5:7,2:4", "2:4,5:7,4:6", "2:4,5:7,6:8", "2:4,5:7,8:10"];
    let mut full = Vec::new();
    let mut adv = Vec::new();
    for (i, s) in profiles.iter().enumerate() {
        let code: TrmCode = s.parse().unwrap();
        let TrialDecoder::Full(dec) = TrialDecoder::new(&code, DecoderKind::Full, None, None).unwrap() else {
            unreachable!()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(mix64(9, i as u64));
        let cw = random_codeword(&code, &code.monomial_mask(), &mut rng);
        let noisy = apply_noise_with(&NoiseSpec::Bsc { p: 0.0002 }, &cw, &mut rng)
            .unwrap()
            .received
            .to_bits()
            .unwrap();
        full.push(min_time(Duration::from_millis(400), || {
            std::hint::black_box(dec.decode(&noisy).unwrap());
        }));

        let comps = code.components();
        let codes: Vec<&dyn ComponentCode> = comps.iter().map(|c| c as &dyn ComponentCode).collect();
        let spec = NoiseSpec::Adversarial {
            weight: 5,
            placement: Placement::Uniform,
        };
        let near = apply_noise_with(&spec, &cw, &mut rng).unwrap().received;
        adv.push(min_time(Duration::from_millis(400), || {
            std::hint::black_box(tensor_decode(&codes, &near).unwrap());
        }));
    }
    let ratios =
        |t: &[Duration]| -> Vec<f64> { t.windows(2).map(|w| w[1].as_secs_f64() / w[0].as_secs_f64()).collect() };
    let (rf, ra) = (ratios(&full), ratios(&adv));
    let pass = rf.iter().all(|&x| x <= 5.0) && ra.iter().all(|&x| x <= 5.5);
    let fmt = |t: &[Duration], r: &[f64]| {
        format!(
            "times {:?} ratios {:?}",
            t.iter().map(|d| format!("{:.2?}", d)).collect::<Vec<_>>(),
            r.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>()
        )
    };
    outcome(
        pass,
        format!(
            "n = 2^15..2^21; full decoder {} (<= 5); adversarial pass {} (<= 5.5)",
            fmt(&full, &rf),
            fmt(&adv, &ra)
        ),
    )
}

fn ac9_structure() -> Outcome {
    let mut bad = Vec::new();
    for s in [
        "1:2,1:2",
        "2:4,1:3",
        "1:3,2:4,1:3",
        "3:4,2:4,2:4",
        "0:3,1:4,2:5",
        "1:2,1:2,1:2,1:2,1:2,1:2",
    ] {
        let code: TrmCode = s.parse().unwrap();
        let dim = code.dimension() as usize;
        let gen: Vec<BitWord> = (0..dim)
            .map(|i| {
                let mut e = BitWord::zeros(dim);
                e.set(i, true);
                trm_encode(&code, &e).unwrap().into_word()
            })
            .collect();
        let rank = BitMatrix::new(code.length(), gen).rank();
        if rank != dim {
            bad.push(format!("{s}: rank {rank} vs {dim}"));
        }
    }
    let catalog: [&[(usize, usize)]; 7] = [
        &[(0, 1), (0, 1)],
        &[(1, 2), (1, 2)],
        &[(0, 2), (1, 3)],
        &[(1, 3), (1, 3)],
        &[(1, 2), (0, 2), (1, 2)],
        &[(2, 3), (0, 2)],
        &[(1, 4), (0, 3)],
    ];
    for layers in catalog {
        let want: usize = layers.iter().map(|&(r, m)| 1usize << (m - r)).product();
        let got = enumerate_trm(layers).unwrap().min_distance();
        let code = TrmCode::from_pairs(layers).unwrap();
        if got != want || code.d_min() != want as u128 {
            bad.push(format!("{code}: d_min {got} vs {want}"));
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            "6 generator ranks and 7 brute-force distances match the product formulas".into()
        } else {
            bad.join("; ")
        },
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        (
            "AC1",
            "erasure completion equals linear solver and codeword",
            ac1_erasure_equivalence,
        ),
        ("AC2", "erasure completion soundness fuzz", ac2_erasure_soundness),
        (
            "AC3",
            "tensor decoder corrects up to the adversarial radius",
            ac3_adversarial_radius,
        ),
        (
            "AC4",
            "tensor decoder output is a codeword or all erasures",
            ac4_output_discipline,
        ),
        ("AC5", "high-rate decoder finite failure bound", ac5_highrate_bound),
        ("AC6", "majority-logic radius", ac6_majority_radius),
        ("AC7", "end-to-end staged decoder", ac7_end_to_end),
        ("AC8", "quasilinear decode time", ac8_scaling),
        ("AC9", "dimension and distance formulas", ac9_structure),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with("AC")).collect();
    let mut failed = 0;
    for (id, name, f) in criteria {
        if !only.is_empty() && !only.iter().any(|o| o == id) {
            continue;
        }
        let start = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {id} {name}: {} ({:.1?})", o.detail, start.elapsed());
        failed += (!o.pass) as usize;
    }
    println!("acceptance: {} failed", failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
