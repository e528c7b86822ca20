//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rauzy::verify::{self, Outcome};
use rauzy_core::codec::BoundaryParam;
use rauzy_core::{Embedding, FamilyParam};

fn param(a: i64) -> FamilyParam {
    FamilyParam::new(a).expect("valid parameter")
}

fn embedding(a: i64) -> Embedding {
    Embedding::new(param(a)).expect("roots")
}

fn curve(a: i64) -> BoundaryParam {
    BoundaryParam::new(&embedding(a)).expect("a >= 3")
}

/// Runs `check` for each `a`, failing on the first failure or on a run
/// slower than `limit` seconds.
fn each(range: impl IntoIterator<Item = i64>, limit: Option<f64>, check: impl Fn(i64) -> Outcome) -> Outcome {
    let mut notes = Vec::new();
    for a in range {
        let start = Instant::now();
        let detail = check(a).map_err(|e| format!("a = {a}: {e}"))?;
        let secs = start.elapsed().as_secs_f64();
        if let Some(limit) = limit {
            if secs > limit {
                return Err(format!("a = {a}: took {secs:.3}s, limit {limit}s"));
            }
        }
        notes.push(format!("a={a}: {detail}"));
    }
    Ok(notes.join("; "))
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let mut notes = Vec::new();
    for p in parts {
        notes.push(p?);
    }
    Ok(notes.join("; "))
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    let seed = 2024;
    let criteria: Vec<Criterion> = vec![
        (
            "automaton states equal the expected 15 for a = 3..10",
            Box::new(|| each(3..=10, Some(1.0), |a| verify::automaton_states(param(a), &embedding(a)))),
        ),
        ("exact corner identities, a = 3..10", Box::new(|| each(3..=10, None, |a| verify::corners(param(a))))),
        ("exact gluing identities, a = 3..10", Box::new(|| each(3..=10, None, |a| verify::gluing(param(a))))),
        (
            "curve endpoints at depth 40",
            Box::new(|| {
                let c = curve(3);
                let start = Instant::now();
                let out = verify::endpoints(&c, 40)?;
                let secs = start.elapsed().as_secs_f64();
                if secs > 0.1 {
                    return Err(format!("took {secs:.3}s"));
                }
                Ok(out)
            }),
        ),
        (
            "tail identities exact, a = 3..8",
            Box::new(|| each(3..=8, None, |a| verify::tail_identities(param(a), 8))),
        ),
        (
            "identified pairs coincide, separated pairs stay apart",
            Box::new(|| {
                let c = curve(3);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let start = Instant::now();
                let out = all(vec![
                    verify::identified_pairs(&c, 200, verify::CURVE_DEPTH, &mut rng),
                    verify::separated_pairs(&c, 1000, verify::CURVE_DEPTH, &mut rng),
                ])?;
                let secs = start.elapsed().as_secs_f64();
                if secs > 30.0 {
                    return Err(format!("took {secs:.1}s"));
                }
                Ok(out)
            }),
        ),
        (
            "continuity modulus, a = 3, 4, 5",
            Box::new(|| {
                each(3..=5, None, |a| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed + a as u64);
                    verify::continuity(&curve(a), 1000, verify::CURVE_DEPTH, &mut rng)
                })
            }),
        ),
        (
            "injectivity on a 10^4 grid at depth 30",
            Box::new(|| verify::injectivity_grid(&curve(3), 10_000, 30)),
        ),
        (
            "tiling area within 2% of the covolume",
            Box::new(|| {
                let start = Instant::now();
                let out = verify::tiling_area(&embedding(3), 18, 2_000_000, 400.0, seed)?;
                let secs = start.elapsed().as_secs_f64();
                if secs > 60.0 {
                    return Err(format!("took {secs:.1}s"));
                }
                Ok(out)
            }),
        ),
        (
            "enumeration and codec against oracles",
            Box::new(|| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                all(vec![
                    each([3, 4], None, |a| verify::enumeration_oracle(param(a), 8)),
                    verify::codec_round_trip(param(3), 1000, 40, &mut rng),
                ])
            }),
        ),
        (
            "expansion of one",
            Box::new(|| {
                all(vec![
                    verify::d_one_rows(),
                    each(3..=5, None, |a| verify::greedy_one(&embedding(a))),
                ])
            }),
        ),
    ];

    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
