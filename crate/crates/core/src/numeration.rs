//! Digit words, the admissibility language and β-expansions.
//!
//! A word `a_k, a_{k+1}, …` with digits in `[0, a − 1]` is admissible when
//! every window `(a_i, a_{i−1}, a_{i−2}, a_{i−3})` is lexicographically
//! smaller than `(a − 1, a − 1, 0, 1)`, digits below `k` counting as zero.
//! Unfolding the comparison: the pair `(a − 1, a − 1)` at `(i, i − 1)` is
//! allowed only when `a_{i−2} = a_{i−3} = 0`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::algebra::{AlgNum, Embedding, FamilyParam, PreciseEmbedding};
use crate::error::{Error, Result};

/// Digits `a_k, a_{k+1}, …, a_{k+len−1}`; all other digits are zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigitWord {
    lowest: i64,
    digits: Vec<u32>,
}

impl DigitWord {
    pub fn new(lowest: i64, digits: Vec<u32>) -> Self {
        DigitWord { lowest, digits }
    }

    pub fn zeros(lowest: i64, len: usize) -> Self {
        DigitWord::new(lowest, vec![0; len])
    }

    pub fn lowest(&self) -> i64 {
        self.lowest
    }

    /// Index of the last stored digit (`lowest − 1` for an empty word).
    pub fn highest(&self) -> i64 {
        self.lowest + self.digits.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Digit at index `i`, zero outside the stored range.
    pub fn get(&self, i: i64) -> u32 {
        if i < self.lowest {
            return 0;
        }
        self.digits
            .get((i - self.lowest) as usize)
            .copied()
            .unwrap_or(0)
    }

    /// Keeps the digits with index `≤ m`.
    pub fn truncate_above(&self, m: i64) -> DigitWord {
        let keep = (m - self.lowest + 1).clamp(0, self.digits.len() as i64) as usize;
        DigitWord::new(self.lowest, self.digits[..keep].to_vec())
    }

    pub fn check_range(&self, param: FamilyParam) -> Result<()> {
        let max = param.a() - 1;
        for (j, &d) in self.digits.iter().enumerate() {
            if d > max {
                return Err(Error::DigitOutOfRange {
                    index: self.lowest + j as i64,
                    digit: d,
                    max,
                });
            }
        }
        Ok(())
    }
}

/// Whether `d` may sit directly above the digits `below = [a_{i−1}, a_{i−2}, a_{i−3}]`.
pub fn window_allows(param: FamilyParam, d: u32, below: [u32; 3]) -> bool {
    let top = param.a() - 1;
    !(d == top && below[0] == top && (below[1] != 0 || below[2] != 0))
}

pub fn is_admissible(w: &DigitWord, param: FamilyParam) -> Result<bool> {
    w.check_range(param)?;
    let lo = w.lowest();
    Ok((lo..=w.highest()).all(|i| {
        window_allows(param, w.get(i), [w.get(i - 1), w.get(i - 2), w.get(i - 3)])
    }))
}

/// Greedy β-expansion digits together with the steps whose value landed
/// within `10·err` of an integer without being exactly one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyExpansion {
    /// Digits at indices `−depth..=−1`, so that `x ≈ Σ a_{−i}·β^{−i}`.
    pub word: DigitWord,
    /// Indices (negative) of the near-boundary steps.
    pub near_boundary: Vec<i64>,
}

impl GreedyExpansion {
    /// `a_{−1}, a_{−2}, …` in the order the greedy algorithm produced them.
    pub fn digits_from_top(&self) -> Vec<u32> {
        self.word.digits().iter().rev().copied().collect()
    }
}

/// Greedy expansion of `x ∈ (0, 1]` in base `β` to `depth` digits.
///
/// The remainder after `n` steps is `x·βⁿ − Dₙ` with `Dₙ ∈ Z[β]`; it is
/// evaluated in fixed point wide enough for the growth of `βⁿ`, and exact
/// ties (terminating expansions) are settled in `Q(β)`.
pub fn greedy_expand(x: f64, e: &Embedding, depth: usize) -> Result<GreedyExpansion> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::ValueOutOfRange(x));
    }
    let param = e.param();
    let top = param.a() - 1;
    let log2a = 32 - param.a().leading_zeros();
    let bits = 64 + depth as u32 * (log2a + 1);
    let pe = PreciseEmbedding::new(param, bits);
    let xr = BigRational::from_float(x).expect("finite");
    let (num, den) = (xr.numer().clone(), xr.denom().clone());
    let unit = BigInt::from(1u8) << bits;
    let tol = 10.0 * e.err();

    let mut power = AlgNum::one(param);
    let mut taken = AlgNum::zero(param);
    let mut digits = Vec::with_capacity(depth);
    let mut near_boundary = Vec::new();
    for step in 1..=depth {
        power = power.mul_alpha();
        taken = taken.mul_alpha();
        // y = x·βⁿ − Dₙ, scaled by 2^bits
        let y = (pe.real_fixed(&power) * &num).div_floor(&den) - pe.real_fixed(&taken);
        let (mut k, frac) = y.div_mod_floor(&unit);
        let exact_tie = |j: &BigInt| -> bool {
            let shifted = &taken + &AlgNum::from_int(param, j.clone());
            power
                .coeffs()
                .iter()
                .zip(shifted.coeffs())
                .all(|(b, d)| &num * b == &den * d)
        };
        let up = &k + 1;
        if (&unit - &frac) < BigInt::from(1u32 << 20) && exact_tie(&up) {
            k = up;
        } else {
            let dist = frac.clone().min(&unit - &frac);
            let dist = (dist >> (bits - 60)).to_f64().unwrap_or(1.0) / 2f64.powi(60);
            if dist < tol && !(frac.is_zero() && exact_tie(&k)) {
                near_boundary.push(-(step as i64));
            }
        }
        let k = if k.is_negative() {
            0
        } else {
            u32::try_from(&k).unwrap_or(top).min(top)
        };
        taken = &taken + &AlgNum::from_int(param, k);
        digits.push(k);
    }
    digits.reverse();
    Ok(GreedyExpansion {
        word: DigitWord::new(-(depth as i64), digits),
        near_boundary,
    })
}

/// Expansion of 1 as `.preperiod (period)^∞`; `period` empty when finite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneExpansion {
    pub preperiod: Vec<i64>,
    pub period: Vec<i64>,
}

/// Expansion of 1 in base `β`, the real root of `x³ − a·x² − b·x − 1`,
/// over the four parameter ranges `1 − a ≤ b ≤ −2`, `b = −1`,
/// `0 ≤ b ≤ a` and `b = a + 1`. `a + b ≥ 1` is required so that `β > 1`.
pub fn d_one(a: i64, b: i64) -> Result<OneExpansion> {
    if a < 0 || a + b < 1 || b < 1 - a || b > a + 1 {
        return Err(Error::ClassifierRange(a, b));
    }
    let (preperiod, period) = match b {
        -1 => (vec![a - 1, a - 1, 0, 1], vec![]),
        b if b <= -2 => (vec![a - 1, a + b - 1], vec![a + b]),
        b if b <= a => (vec![a, b, 1], vec![]),
        _ => (vec![a + 1, 0, 0, a, 1], vec![]),
    };
    Ok(OneExpansion { preperiod, period })
}

/// Depth-first stream of the admissible words of a fixed length starting at
/// index 2, in increasing lexicographic order of `(a_2, a_3, …)`.
#[derive(Clone, Debug)]
pub struct AdmissibleWords {
    param: FamilyParam,
    current: Vec<u32>,
    started: bool,
    done: bool,
}

/// Lowest index of the words making up the fractal.
pub const FRACTAL_START: i64 = 2;

pub fn enumerate_admissible(param: FamilyParam, n: usize) -> AdmissibleWords {
    AdmissibleWords {
        param,
        current: vec![0; n],
        started: false,
        done: n == 0,
    }
}

fn below(digits: &[u32], pos: usize) -> [u32; 3] {
    let at = |k: usize| if pos >= k { digits[pos - k] } else { 0 };
    [at(1), at(2), at(3)]
}

impl Iterator for AdmissibleWords {
    type Item = DigitWord;

    fn next(&mut self) -> Option<DigitWord> {
        if self.done {
            return None;
        }
        if self.started {
            let top = self.param.a() - 1;
            // Zero digits never violate a window, so advancing one position
            // and clearing everything above it keeps the word admissible.
            let mut pos = self.current.len();
            loop {
                if pos == 0 {
                    self.done = true;
                    return None;
                }
                pos -= 1;
                let ctx = below(&self.current, pos);
                let next = (self.current[pos] + 1..=top)
                    .find(|&d| window_allows(self.param, d, ctx));
                if let Some(d) = next {
                    self.current[pos] = d;
                    self.current[pos + 1..].iter_mut().for_each(|d| *d = 0);
                    break;
                }
            }
        }
        self.started = true;
        Some(DigitWord::new(FRACTAL_START, self.current.clone()))
    }
}

/// Digit classes relevant to the window rule: zero, top digit `a − 1`, and
/// everything in between.
const ZERO: usize = 0;
const MID: usize = 1;
const TOP: usize = 2;

fn class_of(param: FamilyParam, d: u32) -> usize {
    if d == 0 {
        ZERO
    } else if d == param.a() - 1 {
        TOP
    } else {
        MID
    }
}

fn class_size(param: FamilyParam, c: usize) -> u32 {
    if c == MID {
        param.a() - 2
    } else {
        1
    }
}

/// Context: classes of the three digits below, packed as `c1 + 3·c2 + 9·c3`.
fn pack(c: [usize; 3]) -> usize {
    c[0] + 3 * c[1] + 9 * c[2]
}

fn unpack(s: usize) -> [usize; 3] {
    [s % 3, (s / 3) % 3, s / 9]
}

fn class_allowed(ctx: [usize; 3], c: usize) -> bool {
    !(c == TOP && ctx[0] == TOP && (ctx[1] != ZERO || ctx[2] != ZERO))
}

fn shift(ctx: [usize; 3], c: usize) -> [usize; 3] {
    [c, ctx[0], ctx[1]]
}

/// `table[m][ctx]` = number of admissible continuations of length `m`.
fn completion_table<T>(param: FamilyParam, n: usize, from: fn(u32) -> T) -> Vec<[T; 27]>
where
    T: Copy + Zero + core::ops::Mul<Output = T>,
{
    let mut table = vec![[from(1); 27]];
    for m in 1..=n {
        let prev = &table[m - 1];
        let mut row = [T::zero(); 27];
        for (s, slot) in row.iter_mut().enumerate() {
            let ctx = unpack(s);
            for c in [ZERO, MID, TOP] {
                let size = class_size(param, c);
                if size > 0 && class_allowed(ctx, c) {
                    *slot = *slot + from(size) * prev[pack(shift(ctx, c))];
                }
            }
        }
        table.push(row);
    }
    table
}

/// Exact number of admissible words of length `n`, or `None` on overflow.
pub fn count_admissible(param: FamilyParam, n: usize) -> Option<u128> {
    let approx = completion_table(param, n, f64::from)[n][0];
    if approx > 1e38 {
        return None;
    }
    Some(completion_table(param, n, u128::from)[n][0])
}

/// Uniform sampler over admissible words of length `n` starting at index 2.
#[derive(Clone, Debug)]
pub struct AdmissibleSampler {
    param: FamilyParam,
    n: usize,
    table: Vec<[f64; 27]>,
}

impl AdmissibleSampler {
    pub fn new(param: FamilyParam, n: usize) -> Self {
        AdmissibleSampler {
            param,
            n,
            table: completion_table(param, n, f64::from),
        }
    }

    /// Number of words (as a float).
    pub fn total(&self) -> f64 {
        self.table[self.n][0]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DigitWord {
        let mut ctx = [ZERO; 3];
        let mut digits = Vec::with_capacity(self.n);
        for pos in 0..self.n {
            let rest = &self.table[self.n - pos - 1];
            let weights = [ZERO, MID, TOP].map(|c| {
                if class_allowed(ctx, c) {
                    f64::from(class_size(self.param, c)) * rest[pack(shift(ctx, c))]
                } else {
                    0.0
                }
            });
            let total: f64 = weights.iter().sum();
            let mut pick = rng.random::<f64>() * total;
            let mut class = ZERO;
            for (c, w) in weights.iter().enumerate() {
                if *w > 0.0 {
                    class = c;
                    if pick < *w {
                        break;
                    }
                    pick -= w;
                }
            }
            let d = match class {
                ZERO => 0,
                TOP => self.param.a() - 1,
                _ => rng.random_range(1..self.param.a() - 1),
            };
            debug_assert_eq!(class_of(self.param, d), class);
            digits.push(d);
            ctx = shift(ctx, class);
        }
        DigitWord::new(FRACTAL_START, digits)
    }
}

/// `Σ a_i·αⁱ` numerically.
pub fn eval_word(w: &DigitWord, e: &Embedding) -> Complex64 {
    let alpha = e.alpha();
    let horner = w
        .digits()
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &d| acc * alpha + f64::from(d));
    horner * alpha.powi(w.lowest() as i32)
}

/// `Σ a_i·αⁱ` as an exact element of `Z[α]`.
pub fn eval_word_exact(w: &DigitWord, param: FamilyParam) -> AlgNum {
    AlgNum::reduce(param, w.digits()) * AlgNum::alpha_power(param, w.lowest())
}

/// `a_start … a_{start+L−1}` followed by `period` repeated forever upward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicWord {
    start: i64,
    prefix: Vec<u32>,
    period: Vec<u32>,
}

impl PeriodicWord {
    pub fn new(start: i64, prefix: Vec<u32>, period: Vec<u32>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::NotPeriodic);
        }
        Ok(PeriodicWord {
            start,
            prefix,
            period,
        })
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn prefix(&self) -> &[u32] {
        &self.prefix
    }

    pub fn period(&self) -> &[u32] {
        &self.period
    }

    /// Index where the periodic part begins.
    pub fn period_start(&self) -> i64 {
        self.start + self.prefix.len() as i64
    }

    pub fn get(&self, i: i64) -> u32 {
        if i < self.start {
            return 0;
        }
        let off = (i - self.start) as usize;
        match self.prefix.get(off) {
            Some(&d) => d,
            None => self.period[(off - self.prefix.len()) % self.period.len()],
        }
    }

    /// The digits `start..start+len` as a finite word.
    pub fn truncate(&self, len: usize) -> DigitWord {
        let digits = (0..len as i64).map(|j| self.get(self.start + j)).collect();
        DigitWord::new(self.start, digits)
    }

    /// Every window is checked; past `period_start + 3` they repeat.
    pub fn is_admissible(&self, param: FamilyParam) -> Result<bool> {
        let len = self.prefix.len() + self.period.len() + 4;
        is_admissible(&self.truncate(len), param)
    }

    /// The value as `num / den` in `Q(α)`, with
    /// `den = 1 − α^p` and `num = P·den + α^{period_start}·Q`.
    pub fn exact_sum(&self, param: FamilyParam) -> (AlgNum, AlgNum) {
        let p = self.period.len() as i64;
        let den = AlgNum::one(param) - AlgNum::alpha_power(param, p);
        let head = eval_word_exact(&DigitWord::new(self.start, self.prefix.clone()), param);
        let tail = eval_word_exact(
            &DigitWord::new(self.period_start(), self.period.clone()),
            param,
        );
        (&head * &den + tail, den)
    }

    pub fn eval(&self, e: &Embedding) -> Complex64 {
        let (num, den) = self.exact_sum(e.param());
        e.embed(&num) / e.embed(&den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn fp(a: i64) -> FamilyParam {
        FamilyParam::new(a).unwrap()
    }

    /// Direct lexicographic comparison, as an oracle for the unfolded rule.
    fn lex_admissible(w: &DigitWord, a: u32) -> bool {
        let bound = [a - 1, a - 1, 0, 1];
        (w.lowest()..=w.highest()).all(|i| {
            let win = [w.get(i), w.get(i - 1), w.get(i - 2), w.get(i - 3)];
            win < bound
        })
    }

    fn all_words(a: u32, n: usize) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..a).map(move |d| {
                        let mut v = w.clone();
                        v.push(d);
                        v
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn admissibility_examples() {
        let p = fp(3);
        // the window (a_i, …, a_{i−3}) = (2, 2, 0, 1): indices increase left to right in storage
        let w = DigitWord::new(0, vec![1, 0, 2, 2]);
        assert!(!is_admissible(&w, p).unwrap());
        assert!(is_admissible(&DigitWord::zeros(2, 10), p).unwrap());
        assert!(is_admissible(&DigitWord::new(0, vec![0, 0, 2, 2]), p).unwrap());
        assert!(is_admissible(&DigitWord::new(2, vec![2, 2]), p).unwrap());
        assert!(!is_admissible(&DigitWord::new(2, vec![2, 2, 2]), p).unwrap());
        assert_eq!(
            is_admissible(&DigitWord::new(5, vec![0, 3]), p),
            Err(Error::DigitOutOfRange {
                index: 6,
                digit: 3,
                max: 2
            })
        );
    }

    #[test]
    fn rule_matches_lexicographic_oracle() {
        for a in 2..=5u32 {
            let p = fp(i64::from(a));
            for w in all_words(a, 6) {
                let w = DigitWord::new(-3, w);
                assert_eq!(is_admissible(&w, p).unwrap(), lex_admissible(&w, a));
            }
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for a in [3u32, 4] {
            let p = fp(i64::from(a));
            for n in 1..=8 {
                let brute: BTreeSet<Vec<u32>> = all_words(a, n)
                    .into_iter()
                    .filter(|w| lex_admissible(&DigitWord::new(2, w.clone()), a))
                    .collect();
                let listed: Vec<Vec<u32>> = enumerate_admissible(p, n)
                    .map(|w| {
                        assert_eq!(w.lowest(), 2);
                        w.digits().to_vec()
                    })
                    .collect();
                let set: BTreeSet<Vec<u32>> = listed.iter().cloned().collect();
                assert_eq!(set.len(), listed.len(), "duplicates at a={a} n={n}");
                assert_eq!(set, brute);
                assert_eq!(count_admissible(p, n), Some(brute.len() as u128));
            }
        }
        assert_eq!(enumerate_admissible(fp(3), 1).count(), 3);
        assert_eq!(enumerate_admissible(fp(3), 0).count(), 0);
    }

    #[test]
    fn growth_rate_tends_to_beta() {
        for a in 3..=6 {
            let p = fp(a);
            let beta = Embedding::new(p).unwrap().beta();
            let c40 = count_admissible(p, 40).map(|c| c as f64);
            let table = completion_table(p, 41, f64::from);
            let ratio = table[41][0] / table[40][0];
            assert!((ratio - beta).abs() < 1e-6, "a={a}: {ratio} vs {beta}");
            if let Some(c) = c40 {
                assert!((c / table[40][0] - 1.0).abs() < 1e-12);
            }
        }
        assert_eq!(count_admissible(fp(3), 18), Some(107_619_849));
    }

    #[test]
    fn sampler_is_uniform_on_small_lengths() {
        let p = fp(3);
        let sampler = AdmissibleSampler::new(p, 4);
        let words: Vec<Vec<u32>> = enumerate_admissible(p, 4).map(|w| w.digits().to_vec()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let trials = 60_000;
        let mut hits = std::collections::BTreeMap::new();
        for _ in 0..trials {
            let w = sampler.sample(&mut rng);
            assert!(is_admissible(&w, p).unwrap());
            *hits.entry(w.digits().to_vec()).or_insert(0usize) += 1;
        }
        assert_eq!(hits.len(), words.len());
        let expect = trials as f64 / words.len() as f64;
        for count in hits.values() {
            assert!((*count as f64 - expect).abs() < 6.0 * expect.sqrt());
        }
    }

    #[test]
    fn greedy_expansion_of_one() {
        for a in 3..=10 {
            let e = Embedding::new(fp(a)).unwrap();
            let g = greedy_expand(1.0, &e, 12).unwrap();
            let top = a as u32 - 1;
            let mut expect = vec![top, top, 0, 1];
            expect.resize(12, 0);
            assert_eq!(g.digits_from_top(), expect);
            assert!(g.near_boundary.is_empty());
        }
    }

    #[test]
    fn greedy_expansion_of_beta_inverse() {
        let e = Embedding::new(fp(3)).unwrap();
        // the f64 nearest to 1/β may fall on either side of it
        let g = greedy_expand(1.0 / e.beta() + 1e-12, &e, 20).unwrap();
        assert_eq!(&g.digits_from_top()[..2], &[1, 0]);
        let g = greedy_expand(1.0 / e.beta() - 1e-12, &e, 20).unwrap();
        assert_eq!(&g.digits_from_top()[..2], &[0, 2]);
        assert!(greedy_expand(0.0, &e, 5).is_err());
        assert!(greedy_expand(1.5, &e, 5).is_err());
    }

    #[test]
    fn d_one_cases() {
        assert_eq!(
            d_one(3, -1).unwrap(),
            OneExpansion {
                preperiod: vec![2, 2, 0, 1],
                period: vec![]
            }
        );
        assert_eq!(d_one(4, 2).unwrap().preperiod, vec![4, 2, 1]);
        assert_eq!(d_one(4, 5).unwrap().preperiod, vec![5, 0, 0, 4, 1]);
        let i = d_one(5, -3).unwrap();
        assert_eq!((i.preperiod, i.period), (vec![4, 1], vec![2]));
        assert!(d_one(3, 5).is_err());
        assert!(d_one(3, -3).is_err());
        assert!(d_one(0, 0).is_err());
    }

    /// Float greedy expansion of 1 for a general cubic, compared with the
    /// classifier over every parameter pair in range.
    #[test]
    fn d_one_matches_numeric_expansion() {
        for a in 1..=7i64 {
            for b in (1 - a)..=(a + 1) {
                let Ok(exp) = d_one(a, b) else { continue };
                let (af, bf) = (a as f64, b as f64);
                let f = |x: f64| ((x - af) * x - bf) * x - 1.0;
                let (mut lo, mut hi) = (1.0, af + 2.0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid) < 0.0 { lo = mid } else { hi = mid }
                }
                let beta = lo;
                let mut r = 1.0;
                let mut got = vec![];
                for _ in 0..8 {
                    let y = r * beta;
                    let d = (y + 1e-9).floor();
                    got.push(d as i64);
                    r = (y - d).max(0.0);
                }
                let mut expect = exp.preperiod.clone();
                while expect.len() < 8 {
                    expect.push(if exp.period.is_empty() { 0 } else { exp.period[0] });
                }
                assert_eq!(got, expect[..8], "a={a} b={b}");
            }
        }
    }

    #[test]
    fn eval_examples() {
        let p = fp(3);
        let e = Embedding::new(p).unwrap();
        assert_eq!(eval_word(&DigitWord::zeros(2, 5), &e), Complex64::new(0.0, 0.0));
        let a2 = e.alpha() * e.alpha();
        assert!((eval_word(&DigitWord::new(2, vec![1]), &e) - a2).norm() < 1e-15);
        let w = DigitWord::new(2, vec![2, 2]);
        let exact = AlgNum::reduce(p, &[0, 0, 2, 2]);
        assert_eq!(eval_word_exact(&w, p), exact);
        assert!((eval_word(&w, &e) - e.embed(&exact)).norm() < 1e-14);
    }

    #[test]
    fn periodic_sum_matches_truncation() {
        let p = fp(3);
        let e = Embedding::new(p).unwrap();
        let w = PeriodicWord::new(2, vec![], vec![2, 2, 0, 0]).unwrap();
        assert!(w.is_admissible(p).unwrap());
        let v = w.eval(&e);
        let approx = eval_word(&w.truncate(80), &e);
        assert!((v - approx).norm() < 1e-12);
        // the expansion of −1
        assert!((v + 1.0).norm() < 1e-12);
        let (num, den) = w.exact_sum(p);
        assert!((num + den).is_zero());
        assert!(PeriodicWord::new(0, vec![1], vec![]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn truncation_preserves_admissibility(seed in any::<u64>(), n in 1usize..30, m in 0i64..35) {
                let p = fp(3);
                let w = AdmissibleSampler::new(p, n).sample(&mut ChaCha8Rng::seed_from_u64(seed));
                prop_assert!(is_admissible(&w, p).unwrap());
                prop_assert!(is_admissible(&w.truncate_above(m), p).unwrap());
            }

            #[test]
            fn greedy_output_is_admissible(x in 1e-6f64..0.999_999, a in 3i64..8) {
                let e = Embedding::new(fp(a)).unwrap();
                let g = greedy_expand(x, &e, 30).unwrap();
                prop_assert!(is_admissible(&g.word, e.param()).unwrap());
                let beta = e.beta();
                let sum: f64 = g.digits_from_top().iter().enumerate()
                    .map(|(i, &d)| f64::from(d) * beta.powi(-(i as i32) - 1)).sum();
                prop_assert!(x - sum >= -1e-12 && x - sum < beta.powi(-30) + 1e-12);
            }
        }
    }
}
