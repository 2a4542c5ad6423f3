//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use pda_caching::analysis::{self, admissible, crosscheck, Scheme};
use pda_caching::constructions::{construct, mn_pda, predicted_params, ConstructionParams, Rule};
use pda_caching::mds::{MdsCodec, Packet};
use pda_caching::scheme::{decode_user, deliver, place, run_and_verify, Library, Mode, Request};
use pda_caching::subsets::binomial;
use pda_caching::Rational;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn within(start: Instant, limit: Duration) -> Outcome {
    let took = start.elapsed();
    ensure!(took < limit, "took {took:?}, limit {limit:?}");
    Ok(())
}

fn ac1_six_by_six_construction() -> Outcome {
    let start = Instant::now();
    let params = ConstructionParams::new(4, 2, 2, 1, Rule::I).map_err(|e| e.to_string())?;
    let pda = construct(&params).map_err(|e| e.to_string())?;
    let v = pda.validate().map_err(|e| e.to_string())?;
    ensure!((v.k, v.f, v.z, v.s) == (6, 6, 2, 12), "got {:?}", (v.k, v.f, v.z, v.s));
    // rows and columns back in the printed subset order 12,13,14,23,24,34
    let order = lex_order_positions(4, 2);
    let printed = relabel(&permute(&pda, &order, &order));
    ensure!(printed == example_one(), "array differs:\n{printed}");
    within(start, Duration::from_secs(1))
}

/// Printed delivery table as `(file, packet)` pairs per slot.
const DELIVERY_TABLE: [[(usize, usize); 2]; 12] = [
    [(0, 1), (1, 0)],
    [(0, 2), (2, 0)],
    [(0, 3), (3, 0)],
    [(0, 4), (4, 0)],
    [(1, 2), (2, 1)],
    [(1, 3), (3, 1)],
    [(1, 5), (5, 1)],
    [(2, 4), (4, 2)],
    [(2, 5), (5, 2)],
    [(3, 4), (4, 3)],
    [(3, 5), (5, 3)],
    [(4, 5), (5, 4)],
];

fn ac2_delivery_table() -> Outcome {
    let pda = example_one();
    let lib = Library::random(6, 600, 1).map_err(|e| e.to_string())?;
    let d = Request::new(vec![0, 1, 2, 3, 4, 5], 6).map_err(|e| e.to_string())?;
    let st = place(&pda, &lib, Mode::Uncoded).map_err(|e| e.to_string())?;
    let t = deliver(&st, &d).map_err(|e| e.to_string())?;
    ensure!(t.signals.len() == 12, "{} signals", t.signals.len());
    let packet_len = st.packet_len();
    for (s, (signal, row)) in t.signals.iter().zip(DELIVERY_TABLE).enumerate() {
        // W_{n,j} sent to user n (d = identity) is contributor (row j, user n)
        let want: BTreeSet<(usize, usize)> = row.iter().map(|&(n, j)| (j, n)).collect();
        let got: BTreeSet<(usize, usize)> = signal.contributors.iter().copied().collect();
        ensure!(signal.slot == s && got == want, "slot {s}: {got:?} != {want:?}");
        let mut xor = vec![0u8; packet_len];
        for &(n, j) in &row {
            let piece = &lib.file(n)[j * packet_len..(j + 1) * packet_len];
            xor.iter_mut().zip(piece).for_each(|(a, b)| *a ^= b);
        }
        ensure!(signal.payload == xor, "slot {s} payload is not the XOR of its packets");
    }
    for user in 0..6 {
        let got = decode_user(&st, &t, &d, user).map_err(|e| e.to_string())?;
        ensure!(got == lib.file(user), "user {user} decoded the wrong bytes");
    }
    Ok(())
}

fn ac3_reduction() -> Outcome {
    let pda = example_one();
    let c = pda.classify_stars();
    let anti: Vec<(usize, usize)> = (0..6).map(|j| (j, 5 - j)).collect();
    ensure!(c.useless == anti, "useless stars {:?}", c.useless);
    let (reduced, z_prime) = pda.reduce().map_err(|e| e.to_string())?;
    ensure!(z_prime == 1, "Z' = {z_prime}");
    ensure!(reduced == example_one_reduced(), "reduced array differs:\n{reduced}");
    let lib = Library::random(6, 1000, 2).map_err(|e| e.to_string())?;
    let d = Request::identity(6, 6).map_err(|e| e.to_string())?;
    let r = run_and_verify(&reduced, &lib, &d, Mode::Coded).map_err(|e| e.to_string())?;
    ensure!(r.memory_ratio == Rational::new(1, 5), "M/N = {}", r.memory_ratio);
    ensure!(r.rate == Rational::new(12, 5), "R = {}", r.rate);
    ensure!(r.ok, "users {:?} failed", r.failed_users);
    Ok(())
}

fn ac4_useless_counts_and_formulas() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for params in admissible(8) {
        let formula_gate = match params.rule {
            Rule::I => params.r + params.b <= params.h,
            Rule::II => params.r + params.b <= params.h + params.lambda,
        };
        if !formula_gate {
            continue;
        }
        let rep = crosscheck(&params).map_err(|e| e.to_string())?;
        ensure!(rep.formula.is_some(), "{params:?}: formula gated out");
        ensure!(rep.pass(), "{params:?}: {:?}", rep.mismatches);
        let z = rep.expected_z_prime as usize;
        ensure!(
            rep.measured.per_column_useless.iter().all(|&n| n == z),
            "{params:?}: per-column counts {:?} vs {z}",
            rep.measured.per_column_useless
        );
        checked += 1;
    }
    ensure!(checked > 100, "only {checked} parameter sets");
    within(start, Duration::from_secs(120))
}

fn ac5_gain_preservation() -> Outcome {
    let pool: Vec<ConstructionParams> = admissible(6)
        .into_iter()
        .filter(|p| !construct(p).unwrap().classify_stars().useless.is_empty())
        .collect();
    ensure!(pool.len() >= 10, "only {} reducible arrays", pool.len());
    let step = pool.len() / 10;
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for params in pool.iter().step_by(step).take(10) {
        let pda = construct(params).map_err(|e| e.to_string())?;
        let (reduced, _) = pda.reduce().map_err(|e| e.to_string())?;
        let k = pda.cols();
        let lib = Library::random(k, 20, 0).map_err(|e| e.to_string())?;
        let a = place(&pda, &lib, Mode::Uncoded).map_err(|e| e.to_string())?;
        let b = place(&reduced, &lib, Mode::Coded).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let d = Request::new((0..k).map(|_| rng.gen_range(0..k)).collect(), k)
                .map_err(|e| e.to_string())?;
            let ta = deliver(&a, &d).map_err(|e| e.to_string())?;
            let tb = deliver(&b, &d).map_err(|e| e.to_string())?;
            ensure!(ta.gains() == tb.gains(), "{params:?}: gains differ");
        }
    }
    Ok(())
}

fn ac6_mds() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 1..=10usize {
        for k in 1..=n {
            let codec = MdsCodec::new(n, k).map_err(|e| e.to_string())?;
            let src: Vec<Vec<u8>> = (0..k)
                .map(|_| (0..32).map(|_| rng.gen()).collect())
                .collect();
            let enc = codec.encode(&src).map_err(|e| e.to_string())?;
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize != k {
                    continue;
                }
                let subset: Vec<Packet> = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| enc[i].clone())
                    .collect();
                let dec = codec.decode(&subset).map_err(|e| e.to_string())?;
                ensure!(dec == src, "({n},{k}) subset {mask:b}");
            }
        }
    }
    let codec = MdsCodec::new(252, 200).map_err(|e| e.to_string())?;
    let src: Vec<Vec<u8>> = (0..200)
        .map(|_| (0..64).map(|_| rng.gen()).collect())
        .collect();
    let enc = codec.encode(&src).map_err(|e| e.to_string())?;
    for _ in 0..100 {
        let idx = sample(&mut rng, 252, 200).into_vec();
        let subset: Vec<Packet> = idx.into_iter().map(|i| enc[i].clone()).collect();
        let dec = codec.decode(&subset).map_err(|e| e.to_string())?;
        ensure!(dec == src, "(252,200) subset failed");
    }
    within(start, Duration::from_secs(60))
}

fn ac7_sweep() -> Outcome {
    let start = Instant::now();
    let (h, r) = (10u32, 5u32);
    let records = analysis::sweep(h, r);

    let mut buf = Vec::new();
    analysis::write_csv(&records, &mut buf).map_err(|e| e.to_string())?;
    let from_csv = analysis::read_csv(&buf[..]).map_err(|e| e.to_string())?;
    ensure!(from_csv == records, "CSV does not round-trip");

    let find = |s: Scheme, b: u32, l: u32| {
        from_csv
            .iter()
            .find(|x| x.scheme == s && x.b == b && x.lambda == l)
    };

    for b in 1..h {
        for l in 1..r.min(b) {
            if r + b > h + l {
                continue;
            }
            ensure!(find(Scheme::NewII, b, l).is_some(), "missing new_II at b={b} l={l}");
            ensure!(find(Scheme::New, b, l).is_some(), "missing new at b={b} l={l}");
            ensure!(
                find(Scheme::Original, b, l).is_some() == (r + b - l < h),
                "original presence wrong at b={b} l={l}"
            );
            ensure!(
                find(Scheme::NewI, b, l).is_some() == (r + b <= h),
                "new_I presence wrong at b={b} l={l}"
            );

            let uncoded = predicted_params(&ConstructionParams::new(h, r, b, l, Rule::I).unwrap())
                .map_err(|e| e.to_string())?;
            let original_ratio = Rational::new(uncoded.z as u128, uncoded.f as u128);
            for s in [Scheme::NewI, Scheme::NewII, Scheme::New] {
                if let Some(rec) = find(s, b, l) {
                    let z_prime = uncoded.f as u128 - rec.subpacketization;
                    if z_prime > 0 {
                        ensure!(
                            rec.memory_ratio < original_ratio,
                            "{s} at b={b} l={l}: {} !< {}",
                            rec.memory_ratio,
                            original_ratio
                        );
                    }
                }
            }

            if binomial(h as i64, b as i64) > 300 {
                continue;
            }
            // brute-force recount from constructed arrays
            let mut measured_rates = Vec::new();
            for (rule, scheme) in [(Rule::I, Scheme::NewI), (Rule::II, Scheme::NewII)] {
                let params = ConstructionParams::new(h, r, b, l, rule).unwrap();
                let rep = crosscheck(&params).map_err(|e| e.to_string())?;
                ensure!(rep.pass(), "{params:?}: {:?}", rep.mismatches);
                let v = &rep.measured.params;
                if let Some(rec) = find(Scheme::Original, b, l) {
                    ensure!(
                        rec.subpacketization == v.f as u128
                            && rec.memory_ratio == Rational::new(v.z as u128, v.f as u128),
                        "original at b={b} l={l} disagrees with the {rule} array"
                    );
                }
                if let Some(rec) = find(scheme, b, l) {
                    ensure!(
                        rec.subpacketization == rep.measured.subpacketization
                            && rec.memory_ratio == rep.measured.memory_ratio
                            && rec.rate == rep.measured.rate,
                        "{scheme} at b={b} l={l} disagrees with its array"
                    );
                    measured_rates.push(rep.measured.rate);
                }
            }
            if let Some(rec) = find(Scheme::Original, b, l) {
                let s_min = [Rule::I, Rule::II]
                    .iter()
                    .map(|&rule| {
                        construct(&ConstructionParams::new(h, r, b, l, rule).unwrap())
                            .unwrap()
                            .validate()
                            .unwrap()
                            .s
                    })
                    .min()
                    .unwrap();
                ensure!(
                    rec.rate == Rational::new(s_min as u128, rec.subpacketization),
                    "original rate at b={b} l={l}"
                );
            }
            let best = measured_rates.iter().min().copied();
            let new = find(Scheme::New, b, l).unwrap();
            ensure!(Some(new.rate) == best, "new curve at b={b} l={l} is not the smaller rate");
        }
    }

    for s in [Scheme::Original, Scheme::New] {
        ensure!(
            records.iter().any(|x| x.scheme == s && x.envelope),
            "no envelope for {s}"
        );
    }
    ensure!(
        analysis::render_svg(&records).contains("<polyline"),
        "SVG has no curves"
    );
    within(start, Duration::from_secs(300))
}

fn ac8_mn_baseline() -> Outcome {
    for k in 2..=8u32 {
        for t in 1..k {
            let pda = mn_pda(k, t).map_err(|e| e.to_string())?;
            let v = pda.validate().map_err(|e| e.to_string())?;
            let c = |n: u32, m: u32| binomial(n as i64, m as i64) as usize;
            let want = (k as usize, c(k, t), c(k - 1, t - 1), c(k, t + 1));
            ensure!((v.k, v.f, v.z, v.s) == want, "mn({k},{t}) = {:?}", (v.k, v.f, v.z, v.s));
            let useless = pda.classify_stars().useless.len();
            ensure!(useless == 0, "mn({k},{t}) has {useless} useless stars");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("AC1 six-by-six array from rule I (4,2,2,1)", ac1_six_by_six_construction),
        ("AC2 delivery table and bit-exact decoding", ac2_delivery_table),
        ("AC3 useless stars, reduction, coded M/N = 1/5 and R = 12/5", ac3_reduction),
        ("AC4 useless-star counts and reduced-scheme formulas, H <= 8", ac4_useless_counts_and_formulas),
        ("AC5 per-slot gains unchanged by reduction", ac5_gain_preservation),
        ("AC6 MDS decode from every k-subset (n <= 10) and (252,200)", ac6_mds),
        ("AC7 H=10 r=5 sweep: dominance and brute-force recount", ac7_sweep),
        ("AC8 t-subset baseline parameters and no useless stars", ac8_mn_baseline),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let took = start.elapsed();
        match outcome {
            Ok(()) => println!("PASS {name} ({took:.2?})"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name} ({took:.2?}): {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
