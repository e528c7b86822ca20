//! A mixed-radix numeration of `[0, 1]` and the boundary parametrization
//! built on it.
//!
//! With `r = 2a − 1`, a number is written `t = Σ a_i / (r^{n_i}(r−2)^{m_i})`
//! where each step raises either the power of `r` (a *full* step, digits in
//! `[0, r−1]`) or the power of `r − 2` (a *reduced* step, digits in
//! `[0, r−3]`). The first step is full; the kind of each later step is fixed
//! by the previous digit, its position and the kind of the previous step
//! (see [`next_radix`]).
//!
//! The code `ψ` turns such digits into a [`GCode`](crate::geometry::GCode),
//! and `f(t)` is the limit point of that code. Two expansions name the same
//! `t` exactly when one ends in the largest admissible tail after a digit
//! `a_k` and the other has `a_k + 1` followed by zeros.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{AlgNum, Embedding, FamilyParam};
use crate::error::{Error, Result};
use crate::geometry::{check_code, f_map, BoundaryIfs, CodePoint, GCode, NumericMap};

/// Which power a step raises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Radix {
    /// Base `r`, digits `0..=r−1`.
    Full,
    /// Base `r − 2`, digits `0..=r−3`.
    Reduced,
}

impl Radix {
    pub fn base(self, param: FamilyParam) -> u32 {
        match self {
            Radix::Full => param.r(),
            Radix::Reduced => param.r() - 2,
        }
    }

    pub fn max_digit(self, param: FamilyParam) -> u32 {
        self.base(param) - 1
    }
}

/// Kind of step `i + 1`, given digit `a_i` at 1-based position `i` and the
/// kind of step `i`.
pub fn next_radix(param: FamilyParam, position: usize, digit: u32, previous: Radix) -> Radix {
    let r = param.r();
    let odd = position % 2 == 1;
    let full_if = |c: bool| if c { Radix::Full } else { Radix::Reduced };
    if digit == 0 {
        full_if(!odd)
    } else if digit == r - 1 {
        full_if(odd)
    } else if digit % 2 == 1 {
        Radix::Full
    } else if digit == r - 3 {
        match previous {
            Radix::Full => Radix::Reduced,
            Radix::Reduced => full_if(odd),
        }
    } else {
        Radix::Reduced
    }
}

/// Step kinds of `digits` (one per digit, the first always full).
pub fn radices(param: FamilyParam, digits: &[u32]) -> Vec<Radix> {
    let mut out = Vec::with_capacity(digits.len());
    let mut current = Radix::Full;
    for (j, &d) in digits.iter().enumerate() {
        out.push(current);
        current = next_radix(param, j + 1, d, current);
    }
    out
}

/// `(n_i, m_i)` after each step.
pub fn exponents(param: FamilyParam, digits: &[u32]) -> Vec<(u32, u32)> {
    let (mut n, mut m) = (0, 0);
    radices(param, digits)
        .into_iter()
        .map(|rad| {
            match rad {
                Radix::Full => n += 1,
                Radix::Reduced => m += 1,
            }
            (n, m)
        })
        .collect()
}

fn weight(param: FamilyParam, n: u32, m: u32) -> BigRational {
    let den = BigInt::from(param.r()).pow(n) * BigInt::from(param.r() - 2).pow(m);
    BigRational::new(BigInt::one(), den)
}

/// Digits `a_1 a_2 …`: a finite prefix, then `period` repeated forever
/// (an empty period means zeros).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MixedDigits {
    prefix: Vec<u32>,
    period: Vec<u32>,
}

/// Where the step-kind pattern of an eventually periodic expansion repeats:
/// positions `start..end` (0-based) form one cycle.
struct Cycle {
    start: usize,
    end: usize,
}

impl MixedDigits {
    pub fn finite(digits: Vec<u32>) -> Self {
        MixedDigits {
            prefix: digits,
            period: Vec::new(),
        }
    }

    pub fn periodic(prefix: Vec<u32>, period: Vec<u32>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::NotPeriodic);
        }
        Ok(MixedDigits { prefix, period })
    }

    pub fn prefix(&self) -> &[u32] {
        &self.prefix
    }

    pub fn period(&self) -> &[u32] {
        &self.period
    }

    /// Digit at 0-based position `j`.
    pub fn get(&self, j: usize) -> u32 {
        match self.prefix.get(j) {
            Some(&d) => d,
            None if self.period.is_empty() => 0,
            None => self.period[(j - self.prefix.len()) % self.period.len()],
        }
    }

    pub fn take(&self, n: usize) -> Vec<u32> {
        (0..n).map(|j| self.get(j)).collect()
    }

    fn period_len(&self) -> usize {
        self.period.len().max(1)
    }

    /// Past the prefix, the next step kind depends on the position in the
    /// period, the position parity and the current kind; find the first
    /// repeat of that state.
    fn cycle(&self, param: FamilyParam) -> Cycle {
        let start_at = self.prefix.len() + 1;
        let p = self.period_len();
        let mut seen = alloc::collections::BTreeMap::new();
        let mut current = Radix::Full;
        for j in 0.. {
            if j >= start_at {
                let key = ((j - self.prefix.len()) % p, j % 2, current);
                if let Some(&first) = seen.get(&key) {
                    return Cycle { start: first, end: j };
                }
                seen.insert(key, j);
            }
            current = next_radix(param, j + 1, self.get(j), current);
        }
        unreachable!()
    }

    /// Every digit is within the range of its step kind.
    pub fn validate(&self, param: FamilyParam) -> Result<()> {
        param.require_codec()?;
        let span = self.cycle(param).end;
        for (j, rad) in radices(param, &self.take(span)).into_iter().enumerate() {
            if self.get(j) > rad.max_digit(param) {
                return Err(Error::InvalidExpansion(j));
            }
        }
        Ok(())
    }

    /// Exact value, summing the repeating part as a geometric series.
    pub fn value(&self, param: FamilyParam) -> Result<BigRational> {
        self.validate(param)?;
        let Cycle { start, end } = self.cycle(param);
        let digits = self.take(end);
        let exps = exponents(param, &digits);
        let term = |j: usize| {
            let (n, m) = exps[j];
            weight(param, n, m) * BigInt::from(digits[j])
        };
        let head: BigRational = (0..start).map(term).sum();
        let body: BigRational = (start..end).map(term).sum();
        if body.is_zero() {
            return Ok(head);
        }
        let (n0, m0) = if start == 0 { (0, 0) } else { exps[start - 1] };
        let (n1, m1) = exps[end - 1];
        let ratio = weight(param, n1 - n0, m1 - m0);
        Ok(head + body / (BigRational::one() - ratio))
    }

    /// `ψ` applied to this expansion. Each output digit depends on the
    /// position parity and the two digits ending there, so past the prefix
    /// the code repeats with period `lcm(p, 2)`.
    pub fn psi(&self, param: FamilyParam) -> Result<GCode> {
        let lead = self.prefix.len() + 1;
        let p = self.period_len().lcm(&2);
        let code = psi(param, &self.take(lead + p))?;
        GCode::periodic(code[..lead].to_vec(), code[lead..].to_vec())
    }
}

/// Greedy expansion of `t` with its remainder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub digits: Vec<u32>,
    pub radices: Vec<Radix>,
    /// `t` minus the value of `digits`.
    pub remainder: BigRational,
    /// `1/(r^{n_K}(r−2)^{m_K})`, an upper bound for `remainder`.
    pub remainder_bound: BigRational,
}

/// `(r−1), (r−1), (r−3), (r−1), (r−3), …`: the expansion of 1.
pub fn expansion_of_one(param: FamilyParam) -> MixedDigits {
    let r = param.r();
    MixedDigits {
        prefix: vec![r - 1],
        period: vec![r - 1, r - 3],
    }
}

/// The first `depth` digits of `t ∈ [0, 1]`, computed greedily in exact
/// arithmetic; `t = 1` yields [`expansion_of_one`].
pub fn expand(t: &BigRational, param: FamilyParam, depth: usize) -> Result<Expansion> {
    param.require_codec()?;
    if t.is_negative() || t > &BigRational::one() {
        return Err(Error::ValueOutOfRange(t.to_f64().unwrap_or(f64::NAN)));
    }
    let digits = if t.is_one() {
        expansion_of_one(param).take(depth)
    } else {
        let mut digits = Vec::with_capacity(depth);
        let mut rest = t.clone();
        let mut current = Radix::Full;
        for j in 0..depth {
            let y = rest * BigInt::from(current.base(param));
            let d = y.floor();
            rest = y - &d;
            let d = d.to_integer().to_u32().expect("digit below base");
            digits.push(d);
            current = next_radix(param, j + 1, d, current);
        }
        digits
    };
    let exps = exponents(param, &digits);
    let (n, m) = exps.last().copied().unwrap_or((0, 0));
    let partial = MixedDigits::finite(digits.clone()).value(param)?;
    Ok(Expansion {
        radices: radices(param, &digits),
        remainder: t - partial,
        remainder_bound: weight(param, n, m),
        digits,
    })
}

/// Exact rational for an `f64` (every finite float is dyadic).
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or(Error::ValueOutOfRange(x))
}

/// `b_1 = a_1`; `b_{2k} = r − 1 − a_{2k}`; `b_{2k+1} = a_{2k+1}` when
/// `a_{2k}` is zero or odd and `a_{2k+1} + 2` otherwise. The result is
/// checked against the code follow rule.
pub fn psi(param: FamilyParam, digits: &[u32]) -> Result<Vec<u32>> {
    let r = param.r();
    let code: Vec<u32> = digits
        .iter()
        .enumerate()
        .map(|(j, &d)| {
            let position = j + 1;
            if position == 1 {
                d
            } else if position % 2 == 0 {
                r - 1 - d.min(r - 1)
            } else {
                let prev = digits[j - 1];
                if prev == 0 || prev % 2 == 1 {
                    d
                } else {
                    d + 2
                }
            }
        })
        .collect();
    check_code(param, &code)?;
    Ok(code)
}

/// The pattern of an identified pair, keyed by the parity of `k` and the
/// kind of step `k + 1` in the expansion carrying the maximal tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TailCase {
    /// `k` even, step `k + 1` full.
    One = 1,
    /// `k` odd, step `k + 1` full.
    Two = 2,
    /// `k` odd, step `k + 1` reduced.
    Three = 3,
    /// `k` even, step `k + 1` reduced.
    Four = 4,
}

impl TailCase {
    pub const ALL: [TailCase; 4] = [TailCase::One, TailCase::Two, TailCase::Three, TailCase::Four];

    pub fn classify(k: usize, next: Radix) -> TailCase {
        match (k.is_multiple_of(2), next) {
            (true, Radix::Full) => TailCase::One,
            (false, Radix::Full) => TailCase::Two,
            (false, Radix::Reduced) => TailCase::Three,
            (true, Radix::Reduced) => TailCase::Four,
        }
    }
}

/// A digit `a` weighted by `1/(r^n (r−2)^m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Term {
    pub digit: u32,
    pub n: u32,
    pub m: u32,
}

/// `lead + Σ_{i≥0} cycle shifted by (i, i)`: a maximal tail following a
/// digit whose weight is `1/(r^n (r−2)^m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailIdentity {
    pub case: TailCase,
    pub n: u32,
    pub m: u32,
    pub lead: Vec<Term>,
    pub cycle: Vec<Term>,
}

/// The maximal tail of each case; it sums to `1/(r^n (r−2)^m)`.
pub fn tail_identity(case: TailCase, n: u32, m: u32, param: FamilyParam) -> Result<TailIdentity> {
    param.require_codec()?;
    let r = param.r();
    let (hi, lo) = (r - 1, r - 3);
    let term = |digit, n, m| Term { digit, n, m };
    let (lead, cycle) = match case {
        TailCase::One => (
            vec![term(hi, n + 1, m)],
            vec![term(hi, n + 2, m), term(lo, n + 2, m + 1)],
        ),
        TailCase::Two => (vec![], vec![term(hi, n + 1, m), term(lo, n + 1, m + 1)]),
        TailCase::Three => (
            vec![term(lo, n, m + 1)],
            vec![term(lo, n, m + 2), term(hi, n + 1, m + 2)],
        ),
        TailCase::Four => (vec![], vec![term(lo, n, m + 1), term(hi, n + 1, m + 1)]),
    };
    Ok(TailIdentity {
        case,
        n,
        m,
        lead,
        cycle,
    })
}

impl TailIdentity {
    /// Closed-form sum; each cycle repetition is scaled by `1/(r(r−2))`.
    pub fn sum(&self, param: FamilyParam) -> BigRational {
        let value = |t: &Term| weight(param, t.n, t.m) * BigInt::from(t.digit);
        let lead: BigRational = self.lead.iter().map(value).sum();
        let cycle: BigRational = self.cycle.iter().map(value).sum();
        lead + cycle / (BigRational::one() - weight(param, 1, 1))
    }

    /// `1/(r^n (r−2)^m)`.
    pub fn target(&self, param: FamilyParam) -> BigRational {
        weight(param, self.n, self.m)
    }

    pub fn holds(&self, param: FamilyParam) -> bool {
        self.sum(param) == self.target(param)
    }
}

/// Whether `d` and `d′` name the same number: literally equal, or equal up
/// to position `k − 1` with one side continuing `a_k` then the largest digit
/// of every step and the other `a_k + 1` then zeros.
pub fn equal_expansions(param: FamilyParam, d: &MixedDigits, d2: &MixedDigits) -> Result<bool> {
    d.validate(param)?;
    d2.validate(param)?;
    let span = d.cycle(param).end.max(d2.cycle(param).end)
        + 2 * d.period_len().lcm(&d2.period_len()).lcm(&2);
    let first = d.take(span);
    let second = d2.take(span);
    let Some(k) = first.iter().zip(&second).position(|(x, y)| x != y) else {
        return Ok(true);
    };
    let (low, high) = if first[k] < second[k] {
        (&first, &second)
    } else {
        (&second, &first)
    };
    if high[k] != low[k] + 1 || high[k + 1..].iter().any(|&x| x != 0) {
        return Ok(false);
    }
    let rad = radices(param, low);
    Ok((k + 1..span).all(|j| low[j] == rad[j].max_digit(param)))
}

/// The identified pair with common digits `head`, then `a_k`: the first
/// carries the maximal tail, the second `a_k + 1` and zeros.
pub fn identified_pair(param: FamilyParam, head: &[u32], a_k: u32) -> Result<(MixedDigits, MixedDigits, TailCase)> {
    param.require_codec()?;
    let mut digits = head.to_vec();
    digits.push(a_k);
    let rad = radices(param, &digits);
    let k = digits.len();
    if a_k + 1 > rad[k - 1].max_digit(param) {
        return Err(Error::InvalidArgument("a_k + 1 exceeds the digit range"));
    }
    let mut current = next_radix(param, k, a_k, rad[k - 1]);
    let case = TailCase::classify(k, current);
    let mut tail = Vec::new();
    for j in k..k + 4 {
        let max = current.max_digit(param);
        tail.push(max);
        current = next_radix(param, j + 1, max, current);
    }
    let mut lead = digits.clone();
    lead.extend_from_slice(&tail[..2]);
    let maximal = MixedDigits::periodic(lead, tail[2..].to_vec())?;
    let mut partner = head.to_vec();
    partner.push(a_k + 1);
    Ok((maximal, MixedDigits::finite(partner), case))
}

/// Where on the boundary of the unit square a point sits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SquareEdge {
    /// `(0, y)`
    Left(BigRational),
    /// `(x, 1)`
    Top(BigRational),
    /// `(1, y)`
    Right(BigRational),
    /// `(x, 0)`
    Bottom(BigRational),
}

/// Distance within which a coordinate is snapped onto a side of the square.
pub const SQUARE_TOLERANCE: f64 = 1e-12;

impl SquareEdge {
    pub fn locate(x: f64, y: f64) -> Result<SquareEdge> {
        let snap = |v: f64| -> Option<f64> {
            if v.abs() <= SQUARE_TOLERANCE {
                Some(0.0)
            } else if (v - 1.0).abs() <= SQUARE_TOLERANCE {
                Some(1.0)
            } else {
                None
            }
        };
        let inside = |v: f64| (-SQUARE_TOLERANCE..=1.0 + SQUARE_TOLERANCE).contains(&v);
        if !inside(x) || !inside(y) {
            return Err(Error::NotOnSquare(x, y));
        }
        let clamp = |v: f64| rational_from_f64(v.clamp(0.0, 1.0));
        match (snap(x), snap(y)) {
            (Some(0.0), _) => Ok(SquareEdge::Left(clamp(y)?)),
            (_, Some(1.0)) => Ok(SquareEdge::Top(clamp(x)?)),
            (Some(_), _) => Ok(SquareEdge::Right(clamp(y)?)),
            (_, Some(_)) => Ok(SquareEdge::Bottom(clamp(x)?)),
            _ => Err(Error::NotOnSquare(x, y)),
        }
    }
}

/// `f: [0, 1] → B` and its extension to the boundary of the unit square.
#[derive(Clone, Debug)]
pub struct BoundaryParam {
    ifs: BoundaryIfs,
    f_numeric: [NumericMap; 3],
}

impl BoundaryParam {
    pub fn new(e: &Embedding) -> Result<Self> {
        let ifs = BoundaryIfs::new(e)?;
        let param = ifs.param();
        let f_numeric = [
            f_map(param, 1)?.embed(e),
            f_map(param, 2)?.embed(e),
            f_map(param, 3)?.embed(e),
        ];
        Ok(BoundaryParam { ifs, f_numeric })
    }

    pub fn ifs(&self) -> &BoundaryIfs {
        &self.ifs
    }

    pub fn param(&self) -> FamilyParam {
        self.ifs.param()
    }

    /// The code of `t` to `depth` digits.
    pub fn code(&self, t: &BigRational, depth: usize) -> Result<Vec<u32>> {
        psi(self.param(), &expand(t, self.param(), depth)?.digits)
    }

    pub fn f(&self, t: &BigRational, depth: usize) -> Result<CodePoint> {
        self.ifs.eval(&self.code(t, depth)?)
    }

    pub fn f_f64(&self, t: f64, depth: usize) -> Result<CodePoint> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::ValueOutOfRange(t));
        }
        self.f(&rational_from_f64(t)?, depth)
    }

    /// `f` evaluated from given digits rather than from a number.
    pub fn f_digits(&self, d: &MixedDigits, depth: usize) -> Result<CodePoint> {
        self.ifs.eval(&psi(self.param(), &d.take(depth))?)
    }

    /// Exact depth-`depth` approximation in `Z[α]`.
    pub fn f_digits_exact(&self, d: &MixedDigits, depth: usize) -> Result<AlgNum> {
        self.ifs
            .eval_exact(&psi(self.param(), &d.take(depth))?, self.ifs.x0())
    }

    /// `F(0, y) = f(y)`, `F(x, 1) = f_2(f(x))`, `F(1, y) = f_3(f(y))`,
    /// `F(x, 0) = f_1(f(x))`.
    pub fn square(&self, x: f64, y: f64, depth: usize) -> Result<CodePoint> {
        let edge = SquareEdge::locate(x, y)?;
        self.square_edge(&edge, depth)
    }

    pub fn square_edge(&self, edge: &SquareEdge, depth: usize) -> Result<CodePoint> {
        let [f1, f2, f3] = &self.f_numeric;
        let (t, map): (&BigRational, Option<&NumericMap>) = match edge {
            SquareEdge::Left(y) => (y, None),
            SquareEdge::Top(x) => (x, Some(f2)),
            SquareEdge::Right(y) => (y, Some(f3)),
            SquareEdge::Bottom(x) => (x, Some(f1)),
        };
        let p = self.f(t, depth)?;
        Ok(match map {
            None => p,
            Some(m) => CodePoint {
                point: m.apply(p.point),
                error_bound: p.error_bound * m.scale.norm(),
            },
        })
    }

    /// A closed loop around the boundary: up the left side, right along the
    /// top, down the right side and back along the bottom.
    pub fn boundary_loop(&self, samples_per_side: usize, depth: usize) -> Result<Vec<Complex64>> {
        (0..loop_len(samples_per_side))
            .map(|i| Ok(self.square_edge(&loop_edge(samples_per_side, i), depth)?.point))
            .collect()
    }
}

/// Number of samples in [`BoundaryParam::boundary_loop`].
pub fn loop_len(samples_per_side: usize) -> usize {
    4 * samples_per_side.max(1)
}

/// The square point visited at position `index` of the boundary loop.
pub fn loop_edge(samples_per_side: usize, index: usize) -> SquareEdge {
    let n = samples_per_side.max(1);
    let step = |j: usize| BigRational::new(BigInt::from(j), BigInt::from(n));
    let (side, j) = (index / n % 4, index % n);
    match side {
        0 => SquareEdge::Left(step(j)),
        1 => SquareEdge::Top(step(j)),
        2 => SquareEdge::Right(step(n - j)),
        _ => SquareEdge::Bottom(step(n - j)),
    }
}
