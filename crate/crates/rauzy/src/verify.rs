//! Named checks of the exact identities and numerical properties, shared by
//! the `verify` subcommand and the acceptance test target.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use rauzy_core::automaton::{expected_states, BoundaryAutomaton};
use rauzy_core::codec::{
    expand, identified_pair, radices, tail_identity, BoundaryParam, MixedDigits, TailCase,
};
use rauzy_core::geometry::{corner_identities, gluing_points, KeyPoints};
use rauzy_core::numeration::{
    count_admissible, d_one, enumerate_admissible, greedy_expand, PeriodicWord,
};
use rauzy_core::render::{area_estimate, closest_pair, Lattice};
use rauzy_core::{AlgNum, Embedding, FamilyParam, PreciseEmbedding};

use crate::parallel;

/// Pass with a short description of what was measured, or fail with the reason.
pub type Outcome = Result<String, String>;

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

/// Sample sizes for one level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Budget {
    pub identified_pairs: usize,
    pub separated_pairs: usize,
    pub continuity_pairs: usize,
    pub grid: usize,
    pub area_depth: usize,
    pub area_samples: usize,
    /// Pixel side is the lattice covolume divided by this.
    pub area_divisor: f64,
    pub enumeration_len: usize,
    pub round_trips: usize,
}

impl Level {
    pub fn budget(self) -> Budget {
        match self {
            Level::Quick => Budget {
                identified_pairs: 40,
                separated_pairs: 200,
                continuity_pairs: 200,
                grid: 2_000,
                area_depth: 16,
                area_samples: 400_000,
                area_divisor: 200.0,
                enumeration_len: 6,
                round_trips: 200,
            },
            Level::Full => Budget {
                identified_pairs: 200,
                separated_pairs: 1_000,
                continuity_pairs: 1_000,
                grid: 10_000,
                area_depth: 18,
                area_samples: 2_000_000,
                area_divisor: 400.0,
                enumeration_len: 8,
                round_trips: 1_000,
            },
        }
    }
}

/// Depth used when evaluating the boundary parametrization.
pub const CURVE_DEPTH: usize = 30;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub a: u32,
    pub level: Level,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs `body`, timing it.
pub fn timed(name: impl Into<String>, body: impl FnOnce() -> Outcome) -> Check {
    let start = Instant::now();
    let outcome = body();
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Check {
        name: name.into(),
        passed,
        detail,
        seconds,
    }
}

/// An embedding precise enough to resolve `bound` on differences of exact
/// depth-`depth` values, whose coefficients grow like `β^{3·depth}`.
pub fn precise_for(e: &Embedding, depth: usize, bound: f64) -> PreciseEmbedding {
    let growth = 3.0 * depth as f64 * e.beta().log2();
    let resolution = -bound.max(f64::MIN_POSITIVE).log2();
    let bits = (growth + resolution.max(0.0)).ceil() as u32 + 96;
    PreciseEmbedding::new(e.param(), bits)
}

struct Setup {
    embedding: Embedding,
    curve: BoundaryParam,
}

fn setup(param: FamilyParam) -> Result<Setup, String> {
    let embedding = Embedding::new(param).map_err(fail)?;
    let curve = BoundaryParam::new(&embedding).map_err(fail)?;
    Ok(Setup {
        embedding,
        curve,
    })
}

/// Every check for one parameter.
pub fn run(param: FamilyParam, level: Level, seed: u64) -> Report {
    let budget = level.budget();
    let mut checks = Vec::new();
    let s = match setup(param) {
        Ok(s) => s,
        Err(e) => {
            checks.push(Check {
                name: "setup".into(),
                passed: false,
                detail: e,
                seconds: 0.0,
            });
            return Report { a: param.a(), level, seed, checks };
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    checks.push(timed("automaton states", || automaton_states(param, &s.embedding)));
    checks.push(timed("automaton equal-sum witness", || automaton_witness(param, &s.embedding)));
    checks.push(timed("corner identities", || corners(param)));
    checks.push(timed("gluing identities", || gluing(param)));
    checks.push(timed("curve endpoints", || endpoints(&s.curve, 40)));
    checks.push(timed("tail identities", || tail_identities(param, 6)));
    checks.push(timed("identified pairs", || {
        identified_pairs(&s.curve, budget.identified_pairs, CURVE_DEPTH, &mut rng)
    }));
    checks.push(timed("separated pairs", || {
        separated_pairs(&s.curve, budget.separated_pairs, CURVE_DEPTH, &mut rng)
    }));
    checks.push(timed("continuity modulus", || {
        continuity(&s.curve, budget.continuity_pairs, CURVE_DEPTH, &mut rng)
    }));
    checks.push(timed("injectivity grid", || injectivity_grid(&s.curve, budget.grid, CURVE_DEPTH)));
    checks.push(timed("tiling area", || {
        tiling_area(&s.embedding, budget.area_depth, budget.area_samples, budget.area_divisor, seed)
    }));
    checks.push(timed("enumeration oracle", || enumeration_oracle(param, budget.enumeration_len)));
    checks.push(timed("codec round trip", || {
        codec_round_trip(param, budget.round_trips, 40, &mut rng)
    }));
    checks.push(timed("expansion of one", d_one_rows));
    checks.push(timed("greedy expansion of one", || greedy_one(&s.embedding)));
    Report { a: param.a(), level, seed, checks }
}

/// Live states equal the 15 expected values.
pub fn automaton_states(param: FamilyParam, e: &Embedding) -> Outcome {
    let automaton = BoundaryAutomaton::build(param, e).map_err(fail)?;
    let got: BTreeSet<AlgNum> = automaton.states().iter().cloned().collect();
    let want: BTreeSet<AlgNum> = expected_states(param).into_iter().collect();
    if got == want {
        Ok(format!("states: {}, matches S: true", got.len()))
    } else {
        let extra = got.difference(&want).count();
        let missing = want.difference(&got).count();
        Err(format!(
            "states: {}, matches S: false ({extra} unexpected, {missing} missing)",
            got.len()
        ))
    }
}

/// Two distinct admissible expansions with equal sums are accepted, and
/// the exact sums agree.
pub fn automaton_witness(param: FamilyParam, e: &Embedding) -> Outcome {
    let top = param.a() - 1;
    let word = |prefix: Vec<u32>, period: Vec<u32>| PeriodicWord::new(0, prefix, period).map_err(fail);
    let first = word(vec![1, 0, top - 1], vec![top, 0, 0, top])?;
    let second = word(vec![0, 0, 0], vec![0, top, top, 0])?;
    let (n1, d1) = first.exact_sum(param);
    let (n2, d2) = second.exact_sum(param);
    if !(&n1 * &d2 - &n2 * &d1).is_zero() {
        return Err("witness sums differ".into());
    }
    let automaton = BoundaryAutomaton::build(param, e).map_err(fail)?;
    match automaton.verify_equality(&first, &second) {
        Ok(true) => Ok("accepted".into()),
        Ok(false) => Err("automaton rejects the witness".into()),
        Err(err) => Err(fail(err)),
    }
}

pub fn corners(param: FamilyParam) -> Outcome {
    let found = corner_identities(param).map_err(fail)?;
    Ok(format!("{} identities exact", found.len()))
}

/// Touching points of consecutive pieces; for `a = 3` the first is the
/// triple (−7, 4, −17).
pub fn gluing(param: FamilyParam) -> Outcome {
    let points = gluing_points(param).map_err(fail)?;
    if param.a() == 3 {
        let first = &points[0].point;
        if first.to_i64s() != Some([-7, 4, -17]) {
            return Err(format!("first gluing point is {first}"));
        }
    }
    Ok(format!("{} identities exact", points.len()))
}

/// `f(0) = −1` and `f(1) = v` within the truncation bound. The distance of
/// the exact depth-`depth` value is measured in fixed point; the `f64`
/// evaluation only has to land within 1e-9.
pub fn endpoints(curve: &BoundaryParam, depth: usize) -> Outcome {
    let param = curve.param();
    let e = curve.ifs().embedding();
    let kp = KeyPoints::new(param);
    let bound = curve.ifs().truncation_bound(depth);
    let precise = precise_for(e, depth, bound);
    let mut parts = Vec::new();
    for (t, name, target) in [(0, "u", &kp.u), (1, "v", &kp.v)] {
        let t = BigRational::from_integer(t.into());
        let code = curve.code(&t, depth).map_err(fail)?;
        let exact = curve.ifs().eval_exact(&code, curve.ifs().x0()).map_err(fail)?;
        let dist = precise.embed(&(&exact - target)).norm();
        let float = (curve.f(&t, depth).map_err(fail)?.point - e.embed(target)).norm();
        let line = format!("|f({t}) - {name}| = {dist:.1e} (f64 {float:.1e})");
        if dist > bound || float.is_nan() || float >= 1e-9 {
            return Err(format!("{line}, bound {bound:.1e}"));
        }
        parts.push(line);
    }
    Ok(format!("{}, bound {bound:.1e}", parts.join(", ")))
}

/// Every maximal tail sums exactly to its weight for `n, m < limit`.
pub fn tail_identities(param: FamilyParam, limit: u32) -> Outcome {
    let mut count = 0;
    for case in TailCase::ALL {
        for n in 0..limit {
            for m in 0..limit {
                let id = tail_identity(case, n, m, param).map_err(fail)?;
                if !id.holds(param) {
                    return Err(format!("{case:?} fails at n = {n}, m = {m}"));
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} identities exact"))
}

/// A uniformly random digit string respecting the step ranges, continuing
/// `head`.
pub fn random_digits<R: Rng + ?Sized>(param: FamilyParam, rng: &mut R, head: &[u32], len: usize) -> Vec<u32> {
    let mut digits = head.to_vec();
    while digits.len() < len {
        digits.push(0);
        let max = radices(param, &digits)[digits.len() - 1].max_digit(param);
        *digits.last_mut().expect("nonempty") = rng.random_range(0..=max);
    }
    digits
}

/// Pairs of expansions naming the same number land on the same point.
pub fn identified_pairs<R: Rng + ?Sized>(curve: &BoundaryParam, count: usize, depth: usize, rng: &mut R) -> Outcome {
    let param = curve.param();
    let bound = 2.0 * curve.ifs().truncation_bound(depth);
    let per_case = count.div_ceil(4);
    let precise = precise_for(curve.ifs().embedding(), depth, bound);
    let mut seen = [0usize; 4];
    let mut worst: f64 = 0.0;
    let mut attempts = 0;
    while seen.iter().any(|&c| c < per_case) {
        attempts += 1;
        if attempts > 200 * count + 1000 {
            return Err(format!("could not draw every case: {seen:?}"));
        }
        let head_len = rng.random_range(0..8);
        let digits = random_digits(param, rng, &[], head_len + 1);
        let (head, a_k) = digits.split_at(head_len);
        let Ok((maximal, partner, case)) = identified_pair(param, head, a_k[0]) else {
            continue;
        };
        let slot = TailCase::ALL.iter().position(|&c| c == case).expect("known case");
        if seen[slot] >= per_case {
            continue;
        }
        seen[slot] += 1;
        // compare in Z[α]; at this depth the bound is below f64 rounding
        let p = curve.f_digits_exact(&maximal, depth).map_err(fail)?;
        let q = curve.f_digits_exact(&partner, depth).map_err(fail)?;
        let dist = precise.embed(&(&p - &q)).norm();
        worst = worst.max(dist);
        if dist > bound {
            return Err(format!(
                "{case:?}: {:?} vs {:?} differ by {dist:.3e} > {bound:.3e}",
                maximal.take(head_len + 4),
                partner.take(head_len + 1)
            ));
        }
    }
    Ok(format!("{} pairs, worst {worst:.1e} <= {bound:.1e}", seen.iter().sum::<usize>()))
}

/// Parameters at least 1e-3 apart map to points far apart.
pub fn separated_pairs<R: Rng + ?Sized>(curve: &BoundaryParam, count: usize, depth: usize, rng: &mut R) -> Outcome {
    let bound = 20.0 * curve.ifs().truncation_bound(depth);
    let pairs: Vec<(f64, f64)> = std::iter::repeat_with(|| (rng.random::<f64>(), rng.random::<f64>()))
        .filter(|(s, t)| (s - t).abs() >= 1e-3)
        .take(count)
        .collect();
    let closest = pairs
        .par_iter()
        .map(|&(s, t)| {
            let p = curve.f_f64(s, depth)?.point;
            let q = curve.f_f64(t, depth)?.point;
            Ok(((p - q).norm(), s, t))
        })
        .collect::<rauzy_core::Result<Vec<_>>>()
        .map_err(fail)?
        .into_iter()
        .min_by(|x, y| x.0.total_cmp(&y.0));
    match closest {
        Some((d, s, t)) if d <= bound => Err(format!("f({s}) and f({t}) only {d:.3e} apart")),
        Some((d, _, _)) => Ok(format!("{count} pairs, closest {d:.2e} > {bound:.1e}")),
        None => Ok("no pairs".into()),
    }
}

/// Expansions sharing `k` leading digits map within
/// `|α|^{2k}(1 + |α|)·C` of each other.
pub fn continuity<R: Rng + ?Sized>(curve: &BoundaryParam, count: usize, depth: usize, rng: &mut R) -> Outcome {
    let param = curve.param();
    let m = curve.ifs().embedding().alpha_abs();
    let diam = curve.ifs().diam();
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..count {
        let k = rng.random_range(1..depth / 2);
        let first = random_digits(param, rng, &[], depth);
        let second = random_digits(param, rng, &first[..k], depth);
        let p = curve.f_digits(&MixedDigits::finite(first), depth).map_err(fail)?.point;
        let q = curve.f_digits(&MixedDigits::finite(second), depth).map_err(fail)?.point;
        let bound = m.powi(2 * k as i32) * (1.0 + m) * diam;
        let dist = (p - q).norm();
        worst_ratio = worst_ratio.max(dist / bound);
        if dist > bound {
            return Err(format!("shared prefix {k}: distance {dist:.3e} > {bound:.3e}"));
        }
    }
    Ok(format!("{count} pairs, largest distance/bound {worst_ratio:.3}"))
}

/// Images of `t = j/n` are pairwise more than three truncation errors apart.
pub fn injectivity_grid(curve: &BoundaryParam, n: usize, depth: usize) -> Outcome {
    let bound = 3.0 * curve.ifs().truncation_bound(depth);
    let points = (0..n)
        .into_par_iter()
        .map(|j| {
            let t = BigRational::new(BigInt::from(j), BigInt::from(n));
            Ok(curve.f(&t, depth)?.point)
        })
        .collect::<rauzy_core::Result<Vec<Complex64>>>()
        .map_err(fail)?;
    match closest_pair(&points) {
        Some((i, j, d)) if d <= bound => Err(format!("t = {i}/{n} and {j}/{n} only {d:.3e} apart")),
        Some((_, _, d)) => Ok(format!("{n} points, closest {d:.2e} > {bound:.1e}")),
        None => Ok("fewer than two points".into()),
    }
}

/// Pixel area of the fractal against the covolume of its lattice.
pub fn tiling_area(e: &Embedding, depth: usize, samples: usize, divisor: f64, seed: u64) -> Outcome {
    let cloud = parallel::points_of_r(e, depth, samples, seed).map_err(fail)?;
    let covolume = Lattice::new(e).covolume();
    let h = covolume / divisor;
    let area = area_estimate(&cloud.points, h).map_err(fail)?;
    let rel = (area - covolume).abs() / covolume;
    let detail = format!("area {area:.5}, covolume {covolume:.5}, relative error {:.2}%", 100.0 * rel);
    if rel < 0.02 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Whether the word `digits` (index 2 first) is admissible: zero-padded on
/// both sides, every window of four consecutive digits read from the top
/// down is lexicographically below `(a−1)(a−1)01`.
fn brute_admissible(param: FamilyParam, digits: &[u32]) -> bool {
    let top = param.a() - 1;
    let limit = [top, top, 0, 1];
    let len = digits.len() as i64;
    let at = |i: i64| if (0..len).contains(&i) { digits[i as usize] } else { 0 };
    (0..len + 3).all(|i| [at(i), at(i - 1), at(i - 2), at(i - 3)] < limit)
}

/// The enumerator agrees with filtering all digit strings, for every length
/// up to `max_len`.
pub fn enumeration_oracle(param: FamilyParam, max_len: usize) -> Outcome {
    let a = param.a();
    for n in 1..=max_len {
        let mut brute = BTreeSet::new();
        let total = (a as usize).pow(n as u32);
        for mut code in 0..total {
            let word: Vec<u32> = (0..n)
                .map(|_| {
                    let d = (code % a as usize) as u32;
                    code /= a as usize;
                    d
                })
                .collect();
            if brute_admissible(param, &word) {
                brute.insert(word);
            }
        }
        let listed: Vec<Vec<u32>> = enumerate_admissible(param, n).map(|w| w.digits().to_vec()).collect();
        let sorted = listed.windows(2).all(|w| w[0] < w[1]);
        let listed: BTreeSet<Vec<u32>> = listed.into_iter().collect();
        if listed != brute {
            return Err(format!("length {n}: {} enumerated, {} by filtering", listed.len(), brute.len()));
        }
        if !sorted || count_admissible(param, n) != Some(brute.len() as u128) {
            return Err(format!("length {n}: order or count mismatch"));
        }
    }
    Ok(format!("lengths 1..={max_len} agree"))
}

/// `0 ≤ t − value(expand(t)) ≤ bound` for random rationals `t`.
pub fn codec_round_trip<R: Rng + ?Sized>(param: FamilyParam, count: usize, depth: usize, rng: &mut R) -> Outcome {
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let den: i64 = rng.random_range(1..=1_000_000_000);
        let num: i64 = rng.random_range(0..=den);
        let t = BigRational::new(num.into(), den.into());
        let exp = expand(&t, param, depth).map_err(fail)?;
        let value = MixedDigits::finite(exp.digits.clone()).value(param).map_err(fail)?;
        let rest = &t - value;
        if rest.is_negative() || rest > exp.remainder_bound || rest != exp.remainder {
            return Err(format!("t = {t}: remainder {rest} outside [0, {}]", exp.remainder_bound));
        }
        let ratio = (rest / &exp.remainder_bound).to_f64().unwrap_or(f64::NAN);
        worst = worst.max(ratio);
    }
    Ok(format!("{count} values, largest remainder/bound {worst:.3}"))
}

/// Exact greedy expansion of 1 in base `β`, root of `x³ − a·x² − b·x − 1`:
/// remainders are kept as integer combinations of `1, β, β²`.
pub fn greedy_one_oracle(a: i64, b: i64, len: usize) -> Vec<i64> {
    let beta = {
        let p = |x: f64| ((x - a as f64) * x - b as f64) * x - 1.0;
        let (mut lo, mut hi) = (1.0, a as f64 + 2.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if p(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    };
    let mut rest: [i128; 3] = [1, 0, 0];
    let mut digits = Vec::new();
    for _ in 0..len {
        // multiply by β, reducing β³ = aβ² + bβ + 1
        let [c0, c1, c2] = rest;
        rest = [c2, c0 + i128::from(b) * c2, c1 + i128::from(a) * c2];
        let value = rest[0] as f64 + rest[1] as f64 * beta + rest[2] as f64 * beta * beta;
        let d = if rest[1] == 0 && rest[2] == 0 {
            rest[0]
        } else {
            value.floor() as i128
        };
        digits.push(d as i64);
        rest[0] -= d;
        if rest == [0, 0, 0] {
            break;
        }
    }
    digits
}

/// The classifier for the expansion of 1 agrees with the greedy oracle in
/// all four ranges of `b`.
pub fn d_one_rows() -> Outcome {
    const LEN: usize = 16;
    let mut rows = BTreeSet::new();
    for a in 2..=8i64 {
        for b in (1 - a)..=(a + 1) {
            if a + b < 1 {
                continue;
            }
            let one = d_one(a, b).map_err(fail)?;
            let mut listed = one.preperiod.clone();
            while !one.period.is_empty() && listed.len() < LEN {
                listed.extend_from_slice(&one.period);
            }
            listed.truncate(LEN);
            let oracle = greedy_one_oracle(a, b, LEN);
            if listed != oracle {
                return Err(format!("a = {a}, b = {b}: {listed:?} vs greedy {oracle:?}"));
            }
            rows.insert(match b {
                b if b <= -2 => 0,
                -1 => 1,
                b if b <= a => 2,
                _ => 3,
            });
        }
    }
    if rows.len() == 4 {
        Ok("all four ranges agree with greedy expansion".into())
    } else {
        Err(format!("only ranges {rows:?} exercised"))
    }
}

/// Greedy expansion of 1 is `(a−1)(a−1)01`.
pub fn greedy_one(e: &Embedding) -> Outcome {
    let top = e.param().a() - 1;
    let g = greedy_expand(1.0, e, 12).map_err(fail)?;
    let mut expect = vec![top, top, 0, 1];
    expect.resize(12, 0);
    let got = g.digits_from_top();
    if got == expect {
        Ok(format!("{top}{top}01"))
    } else {
        Err(format!("got {got:?}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(a: i64) -> FamilyParam {
        FamilyParam::new(a).unwrap()
    }

    #[test]
    fn brute_filter_examples() {
        let p = fp(3);
        assert!(brute_admissible(p, &[0, 0, 2, 2]));
        // reading down from the top: 2 2 1 ...
        assert!(!brute_admissible(p, &[1, 2, 2]));
        assert!(brute_admissible(p, &[0, 0, 2, 2, 0, 0, 2, 2]));
        assert!(!brute_admissible(p, &[0, 1, 2, 2]));
    }

    #[test]
    fn greedy_oracle_examples() {
        // β³ = 3β² − β + 1: 1 = .2201
        assert_eq!(greedy_one_oracle(3, -1, 10), vec![2, 2, 0, 1]);
        // β³ = β² + β + 1 (tribonacci): 1 = .111
        assert_eq!(greedy_one_oracle(1, 1, 10), vec![1, 1, 1]);
    }

    #[test]
    fn random_digits_respect_ranges() {
        let p = fp(4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let d = random_digits(p, &mut rng, &[6], 20);
            assert_eq!(d[0], 6);
            assert!(MixedDigits::finite(d).validate(p).is_ok());
        }
    }

    #[test]
    fn quick_report_passes() {
        let report = run(fp(4), Level::Quick, 0);
        for c in &report.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        assert!(report.passed());
        assert_eq!(report.checks.len(), 15);
    }
}
