//! Exact arithmetic in `Z[α]` for `p(x) = x³ − a·x² + x − 1`, and numerical
//! embeddings of the roots.
//!
//! Elements are kept in the canonical basis `c0 + c1·α + c2·α²` with
//! arbitrary-precision coefficients. Since `α·(α² − a·α + 1) = 1`, the
//! generator is a unit and division by `α` stays inside the ring.
//!
//! Two embeddings are provided:
//! * [`Embedding`]: `f64` roots with a certified absolute error bound.
//! * [`PreciseEmbedding`]: fixed-point roots with a configurable number of
//!   fractional bits, for evaluating elements whose coefficients are huge but
//!   whose value is tiny (long compositions of contractions).

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_rational::BigRational;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The integer `a` selecting `p(x) = x³ − a·x² + x − 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FamilyParam(u32);

impl FamilyParam {
    pub fn new(a: i64) -> Result<Self> {
        if !(2..=i64::from(u32::MAX / 4)).contains(&a) {
            return Err(Error::ParamOutOfRange(a, 2));
        }
        Ok(FamilyParam(a as u32))
    }

    pub fn a(self) -> u32 {
        self.0
    }

    /// The codec works with radices `r = 2a − 1` and `r − 2`, which
    /// degenerates at `a = 2`.
    pub fn require_codec(self) -> Result<Self> {
        if self.0 < 3 {
            return Err(Error::ParamOutOfRange(i64::from(self.0), 3));
        }
        Ok(self)
    }

    /// `r = 2a − 1`, the number of maps `g_i` and the main codec radix.
    pub fn r(self) -> u32 {
        2 * self.0 - 1
    }
}

impl fmt::Display for FamilyParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a={}", self.0)
    }
}

/// An element `c0 + c1·α + c2·α²` of `Z[α]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AlgNum {
    c: [BigInt; 3],
    param: FamilyParam,
}

impl AlgNum {
    pub fn new(
        param: FamilyParam,
        c0: impl Into<BigInt>,
        c1: impl Into<BigInt>,
        c2: impl Into<BigInt>,
    ) -> Self {
        AlgNum {
            c: [c0.into(), c1.into(), c2.into()],
            param,
        }
    }

    pub fn zero(param: FamilyParam) -> Self {
        Self::new(param, 0, 0, 0)
    }

    pub fn one(param: FamilyParam) -> Self {
        Self::new(param, 1, 0, 0)
    }

    pub fn from_int(param: FamilyParam, k: impl Into<BigInt>) -> Self {
        Self::new(param, k, 0, 0)
    }

    pub fn alpha(param: FamilyParam) -> Self {
        Self::new(param, 0, 1, 0)
    }

    /// `α⁻¹ = α² − a·α + 1`.
    pub fn alpha_inv(param: FamilyParam) -> Self {
        Self::new(param, 1, -i64::from(param.a()), 1)
    }

    pub fn param(&self) -> FamilyParam {
        self.param
    }

    pub fn coeffs(&self) -> &[BigInt; 3] {
        &self.c
    }

    /// Coefficients as machine integers, if they fit.
    pub fn to_i64s(&self) -> Option<[i64; 3]> {
        Some([self.c[0].to_i64()?, self.c[1].to_i64()?, self.c[2].to_i64()?])
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    /// `|c0| + |c1| + |c2|` as a float (saturating to infinity).
    pub fn l1_norm(&self) -> f64 {
        self.c
            .iter()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .sum()
    }

    /// Evaluates `Σ coeffs[k]·αᵏ` and reduces it to canonical form.
    pub fn reduce<T: Into<BigInt> + Clone>(param: FamilyParam, coeffs: &[T]) -> Self {
        coeffs
            .iter()
            .rev()
            .fold(AlgNum::zero(param), |acc, c| {
                let mut next = acc.mul_alpha();
                next.c[0] += c.clone().into();
                next
            })
    }

    /// `x·α`, using `α³ = a·α² − α + 1`.
    pub fn mul_alpha(&self) -> Self {
        let a = BigInt::from(self.param.a());
        let [c0, c1, c2] = &self.c;
        AlgNum {
            c: [c2.clone(), c0 - c2, c1 + &a * c2],
            param: self.param,
        }
    }

    /// `x / α`, exact because `α` is a unit.
    pub fn mul_alpha_inv(&self) -> Self {
        let a = BigInt::from(self.param.a());
        let [c0, c1, c2] = &self.c;
        AlgNum {
            c: [c0 + c1, c2 - &a * c0, c0.clone()],
            param: self.param,
        }
    }

    /// Exact `αⁿ` for any integer `n`.
    pub fn alpha_power(param: FamilyParam, n: i64) -> Self {
        let base = if n >= 0 {
            AlgNum::alpha(param)
        } else {
            AlgNum::alpha_inv(param)
        };
        base.pow(n.unsigned_abs())
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut result = AlgNum::one(self.param);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        AlgNum {
            c: [&self.c[0] * k, &self.c[1] * k, &self.c[2] * k],
            param: self.param,
        }
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        self.scale(&BigInt::from(k))
    }

    fn check(&self, other: &AlgNum) -> Result<()> {
        if self.param != other.param {
            return Err(Error::ParamMismatch(self.param.a(), other.param.a()));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &AlgNum) -> Result<AlgNum> {
        self.check(other)?;
        Ok(AlgNum {
            c: [
                &self.c[0] + &other.c[0],
                &self.c[1] + &other.c[1],
                &self.c[2] + &other.c[2],
            ],
            param: self.param,
        })
    }

    pub fn checked_sub(&self, other: &AlgNum) -> Result<AlgNum> {
        self.check(other)?;
        Ok(AlgNum {
            c: [
                &self.c[0] - &other.c[0],
                &self.c[1] - &other.c[1],
                &self.c[2] - &other.c[2],
            ],
            param: self.param,
        })
    }

    pub fn checked_mul(&self, other: &AlgNum) -> Result<AlgNum> {
        self.check(other)?;
        let mut p: [BigInt; 5] = Default::default();
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.c.iter().enumerate() {
                p[i + j] += x * y;
            }
        }
        let a = BigInt::from(self.param.a());
        // αᵏ = a·αᵏ⁻¹ − αᵏ⁻² + αᵏ⁻³
        for k in [4usize, 3] {
            let v = core::mem::take(&mut p[k]);
            if v.is_zero() {
                continue;
            }
            p[k - 1] += &a * &v;
            p[k - 2] -= &v;
            p[k - 3] += v;
        }
        let [c0, c1, c2, _, _] = p;
        Ok(AlgNum {
            c: [c0, c1, c2],
            param: self.param,
        })
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&AlgNum> for &AlgNum {
            type Output = AlgNum;
            /// Panics if the operands belong to different families; use the
            /// `checked_*` variant to get an error instead.
            fn $method(self, rhs: &AlgNum) -> AlgNum {
                self.$checked(rhs).expect("AlgNum family mismatch")
            }
        }
        impl $tr<AlgNum> for AlgNum {
            type Output = AlgNum;
            fn $method(self, rhs: AlgNum) -> AlgNum {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&AlgNum> for AlgNum {
            type Output = AlgNum;
            fn $method(self, rhs: &AlgNum) -> AlgNum {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &AlgNum {
    type Output = AlgNum;
    fn neg(self) -> AlgNum {
        AlgNum {
            c: [-&self.c[0], -&self.c[1], -&self.c[2]],
            param: self.param,
        }
    }
}

impl Neg for AlgNum {
    type Output = AlgNum;
    fn neg(self) -> AlgNum {
        -&self
    }
}

/// Polynomial notation, e.g. `1 - 2α + 3α²`; the zero element prints as `0`.
impl fmt::Display for AlgNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.sign() == Sign::Minus;
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let unit = mag.is_one();
            match k {
                0 => write!(f, "{mag}")?,
                1 if unit => f.write_str("α")?,
                1 => write!(f, "{mag}α")?,
                _ if unit => f.write_str("α²")?,
                _ => write!(f, "{mag}α²")?,
            }
        }
        Ok(())
    }
}

/// Absolute root error targeted by [`Embedding::new`] for `a ≤ 10`; larger
/// families scale it with `a` since `β ≈ a` loses absolute precision.
pub const DEFAULT_ROOT_TARGET: f64 = 1e-14;

/// `f64` roots of `p`: the real root `β ∈ (a − 1, a)` and the complex root
/// `α` with positive imaginary part, both within `err`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Embedding {
    param: FamilyParam,
    beta: f64,
    alpha: Complex64,
    err: f64,
}

fn p_f64(a: f64, x: f64) -> f64 {
    ((x - a) * x + 1.0) * x - 1.0
}

fn dp_f64(a: f64, x: f64) -> f64 {
    (3.0 * x - 2.0 * a) * x + 1.0
}

fn p_complex(a: f64, z: Complex64) -> Complex64 {
    ((z - a) * z + 1.0) * z - 1.0
}

fn dp_complex(a: f64, z: Complex64) -> Complex64 {
    (z * 3.0 - 2.0 * a) * z + 1.0
}

fn p_rational(a: &BigRational, x: &BigRational) -> BigRational {
    ((x - a) * x + BigRational::one()) * x - BigRational::one()
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// Smallest `δ` in a doubling sequence such that `p` changes sign across
/// `[β̃ − δ, β̃ + δ]`, evaluated exactly.
fn certify_real_root(a: u32, beta: f64) -> f64 {
    let ar = BigRational::from_integer(BigInt::from(a));
    let mut delta = f64::EPSILON * beta;
    for _ in 0..64 {
        let lo = beta - delta;
        let hi = beta + delta;
        let plo = p_rational(&ar, &rational(lo));
        let phi = p_rational(&ar, &rational(hi));
        if plo.is_negative() && phi.is_positive() {
            return (beta - lo).max(hi - beta);
        }
        delta *= 2.0;
    }
    f64::INFINITY
}

/// A polynomial of degree `n` has a root within `n·|p(z)|/|p'(z)|` of `z`;
/// `|p(z)|` is evaluated exactly.
fn certify_complex_root(a: u32, z: Complex64) -> f64 {
    let ar = BigRational::from_integer(BigInt::from(a));
    let x = rational(z.re);
    let y = rational(z.im);
    let one = BigRational::one();
    // z² and z³ in exact arithmetic
    let z2 = (&x * &x - &y * &y, (&x * &y) * BigRational::from_integer(2.into()));
    let z3 = (&z2.0 * &x - &z2.1 * &y, &z2.0 * &y + &z2.1 * &x);
    let re = &z3.0 - &ar * &z2.0 + &x - &one;
    let im = &z3.1 - &ar * &z2.1 + &y;
    let norm2 = &re * &re + &im * &im;
    let pz = norm2.to_f64().unwrap_or(f64::INFINITY).sqrt() * (1.0 + 1e-12);
    let dpz = dp_complex(f64::from(a), z).norm() * (1.0 - 1e-9);
    3.0 * pz / dpz
}

impl Embedding {
    pub fn new(param: FamilyParam) -> Result<Self> {
        let scale = (f64::from(param.a()) / 10.0).max(1.0);
        Self::with_target(param, DEFAULT_ROOT_TARGET * scale)
    }

    /// Bisection on `(a − 1, a)` followed by Newton for `β`; deflation
    /// (`α + ᾱ = a − β`, `|α|² = 1/β`) and a complex Newton polish for `α`.
    pub fn with_target(param: FamilyParam, target: f64) -> Result<Self> {
        let af = f64::from(param.a());
        let (mut lo, mut hi) = (af - 1.0, af);
        while hi - lo > 1e-6 {
            let mid = 0.5 * (lo + hi);
            if p_f64(af, mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut beta = 0.5 * (lo + hi);
        for _ in 0..50 {
            let step = p_f64(af, beta) / dp_f64(af, beta);
            let next = (beta - step).clamp(lo, hi);
            if next == beta {
                break;
            }
            beta = next;
        }

        let re = 0.5 * (af - beta);
        let im = (1.0 / beta - re * re).sqrt();
        let mut alpha = Complex64::new(re, im);
        for _ in 0..4 {
            alpha -= p_complex(af, alpha) / dp_complex(af, alpha);
        }

        let err_beta = certify_real_root(param.a(), beta);
        let err_alpha = certify_complex_root(param.a(), alpha);
        let err = err_beta.max(err_alpha);
        if err.is_nan() || err > target || err_alpha.is_nan() || err_alpha >= 0.5 * alpha.im {
            return Err(Error::Precision {
                achieved: err,
                target,
            });
        }
        Ok(Embedding {
            param,
            beta,
            alpha,
            err,
        })
    }

    pub fn param(&self) -> FamilyParam {
        self.param
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn err(&self) -> f64 {
        self.err
    }

    pub fn alpha_abs(&self) -> f64 {
        self.alpha.norm()
    }

    /// `c0 + c1·α + c2·α²`.
    pub fn embed(&self, x: &AlgNum) -> Complex64 {
        self.embed_with_error(x).0
    }

    /// Embedding plus a first-order bound covering root error and rounding.
    pub fn embed_with_error(&self, x: &AlgNum) -> (Complex64, f64) {
        let [c0, c1, c2] = x.coeffs().each_ref().map(|c| c.to_f64().unwrap_or(f64::NAN));
        let a2 = self.alpha * self.alpha;
        let value = Complex64::new(c0, 0.0) + self.alpha * c1 + a2 * c2;
        let m = self.alpha.norm();
        let root = self.err * (c1.abs() + 2.0 * c2.abs() * (m + self.err));
        let rounding = 4.0 * f64::EPSILON * (c0.abs() + c1.abs() * m + c2.abs() * m * m);
        (value, root + rounding)
    }

    /// The real embedding `c0 + c1·β + c2·β²`.
    pub fn embed_real(&self, x: &AlgNum) -> f64 {
        let [c0, c1, c2] = x.coeffs().each_ref().map(|c| c.to_f64().unwrap_or(f64::NAN));
        c0 + self.beta * (c1 + self.beta * c2)
    }
}

/// Free-function form of [`Embedding::with_target`].
pub fn roots(param: FamilyParam, target: f64) -> Result<Embedding> {
    Embedding::with_target(param, target)
}

/// Roots of `p` in binary fixed point with `bits` fractional bits.
///
/// `β` is bracketed by exact integer bisection; `α` follows from
/// `Re α = (a − β)/2` and `|α|² = 1/β`. All constants are within a few units
/// of `2^-bits`.
#[derive(Clone, Debug)]
pub struct PreciseEmbedding {
    param: FamilyParam,
    bits: u32,
    beta: BigInt,
    beta2: BigInt,
    re: BigInt,
    im: BigInt,
    re2: BigInt,
    im2: BigInt,
}

impl PreciseEmbedding {
    pub fn new(param: FamilyParam, bits: u32) -> Self {
        let one = BigInt::one() << bits;
        let a = BigInt::from(param.a());
        let p_scaled = |x: &BigInt| -> BigInt {
            // S³·p(x/S)
            let x2 = x * x;
            &x2 * x - &a * &x2 * &one + x * &one * &one - &one * &one * &one
        };
        let mut lo = (&a - 1) * &one;
        let mut hi = &a * &one;
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1;
            if p_scaled(&mid).is_negative() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let beta = lo;
        let beta2 = (&beta * &beta) >> bits;
        let re: BigInt = (&a * &one - &beta) >> 1;
        let modulus2 = (&one * &one) / &beta;
        let im_sq = (&modulus2 << bits) - &re * &re;
        let im = im_sq.sqrt();
        let re2 = (&re * &re - &im * &im) >> bits;
        let im2 = (&re * &im * 2) >> bits;
        PreciseEmbedding {
            param,
            bits,
            beta,
            beta2,
            re,
            im,
            re2,
            im2,
        }
    }

    pub fn param(&self) -> FamilyParam {
        self.param
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    fn to_f64(&self, n: &BigInt) -> f64 {
        // n·2^-bits without overflowing the intermediate conversion
        let shift = n.bits().saturating_sub(60);
        let head = (n >> shift).to_f64().unwrap_or(f64::NAN);
        head * 2f64.powi(shift as i32 - self.bits as i32)
    }

    /// Fixed-point numerators of the real and imaginary parts.
    fn raw(&self, x: &AlgNum) -> (BigInt, BigInt) {
        let [c0, c1, c2] = x.coeffs();
        let re = (c0 << self.bits) + c1 * &self.re + c2 * &self.re2;
        let im = c1 * &self.im + c2 * &self.im2;
        (re, im)
    }

    pub fn embed(&self, x: &AlgNum) -> Complex64 {
        let (re, im) = self.raw(x);
        Complex64::new(self.to_f64(&re), self.to_f64(&im))
    }

    /// Bound on the absolute error of [`embed`](Self::embed) before the
    /// final rounding to `f64`.
    pub fn error_bound(&self, x: &AlgNum) -> f64 {
        let [_, c1, c2] = x.coeffs();
        let w = c1.abs() * 4 + c2.abs() * 16 + 4;
        self.to_f64(&w)
    }

    pub fn embed_real(&self, x: &AlgNum) -> f64 {
        self.to_f64(&self.raw_real(x))
    }

    /// Fixed-point numerator of the real embedding (value times `2^bits`).
    pub fn real_fixed(&self, x: &AlgNum) -> BigInt {
        self.raw_real(x)
    }

    fn raw_real(&self, x: &AlgNum) -> BigInt {
        let [c0, c1, c2] = x.coeffs();
        (c0 << self.bits) + c1 * &self.beta + c2 * &self.beta2
    }

    /// Sign of the real embedding, or `None` when it is within the error
    /// bound of zero and `x ≠ 0`.
    pub fn real_sign(&self, x: &AlgNum) -> Option<Ordering> {
        if x.is_zero() {
            return Some(Ordering::Equal);
        }
        let v = self.raw_real(x);
        let [_, c1, c2] = x.coeffs();
        let margin = c1.abs() * 4 + c2.abs() * 32 + 4;
        if v.abs() <= margin {
            None
        } else {
            Some(v.sign().cmp(&Sign::NoSign))
        }
    }

    pub fn beta(&self) -> f64 {
        self.to_f64(&self.beta)
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.to_f64(&self.re), self.to_f64(&self.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::string::ToString;

    fn fp(a: i64) -> FamilyParam {
        FamilyParam::new(a).unwrap()
    }

    fn t(p: FamilyParam, c: [i64; 3]) -> AlgNum {
        AlgNum::new(p, c[0], c[1], c[2])
    }

    /// Companion-matrix oracle: column k of Cᵏ applied to e0 gives αᵏ.
    fn companion_power(a: i64, n: u32) -> [i64; 3] {
        // multiplication by α on basis (1, α, α²)
        let m = [[0, 0, 1], [1, 0, -1], [0, 1, a]];
        let mut v = [1i64, 0, 0];
        for _ in 0..n {
            let mut w = [0i64; 3];
            for (i, row) in m.iter().enumerate() {
                w[i] = row.iter().zip(v.iter()).map(|(x, y)| x * y).sum();
            }
            v = w;
        }
        v
    }

    #[test]
    fn reduce_examples() {
        let p3 = fp(3);
        assert_eq!(AlgNum::reduce(p3, &[0, 0, 0, 1]), t(p3, [1, -1, 3]));
        for a in 2..8 {
            let p = fp(a);
            assert_eq!(AlgNum::reduce(p, &[0, 0, 0, 1]), t(p, [1, -1, a]));
        }
        assert_eq!(AlgNum::reduce(p3, &[0, 0, 0, 0, 1]), t(p3, companion_power(3, 4)));
        assert_eq!(companion_power(3, 4), [3, -2, 8]);
        assert_eq!(AlgNum::reduce::<i64>(p3, &[]), AlgNum::zero(p3));
        // p's own coefficient vector
        for a in 2..10 {
            let p = fp(a);
            assert!(AlgNum::reduce(p, &[-1, 1, -a, 1]).is_zero());
        }
    }

    #[test]
    fn ring_examples() {
        let p = fp(5);
        let alpha = AlgNum::alpha(p);
        assert_eq!(&alpha * &alpha, t(p, [0, 0, 1]));
        assert_eq!(t(p, [0, 0, 1]) * t(p, [0, 1, 0]), t(p, [1, -1, 5]));
        assert!((t(p, [1, 0, 0]) + t(p, [-1, 0, 0])).is_zero());
        assert_eq!(
            AlgNum::one(p).checked_add(&AlgNum::one(fp(3))),
            Err(Error::ParamMismatch(5, 3))
        );
    }

    #[test]
    fn alpha_inverse() {
        for a in 2..10 {
            let p = fp(a);
            assert_eq!(AlgNum::alpha(p).mul_alpha_inv(), AlgNum::one(p));
            assert_eq!(AlgNum::one(p).mul_alpha_inv(), t(p, [1, -a, 1]));
            assert_eq!(t(p, [0, 0, 1]).mul_alpha_inv(), AlgNum::alpha(p));
            assert_eq!(&t(p, [1, -a, 1]) * &AlgNum::alpha(p), AlgNum::one(p));
        }
    }

    #[test]
    fn alpha_powers() {
        let p = fp(3);
        assert_eq!(AlgNum::alpha_power(p, 0), AlgNum::one(p));
        assert_eq!(AlgNum::alpha_power(p, -1), t(p, [1, -3, 1]));
        assert_eq!(AlgNum::alpha_power(p, 4), t(p, [3, -2, 8]));
        for n in 0..20u32 {
            assert_eq!(AlgNum::alpha_power(p, i64::from(n)), t(p, companion_power(3, n)));
        }
        for n in -15..15 {
            let x = AlgNum::alpha_power(p, n) * AlgNum::alpha_power(p, -n);
            assert_eq!(x, AlgNum::one(p));
        }
    }

    #[test]
    fn roots_match_known_values() {
        let e3 = Embedding::new(fp(3)).unwrap();
        assert!((e3.beta() - 2.769292).abs() < 1e-6);
        assert!((e3.alpha_abs() - 0.6009185).abs() < 1e-6);
        assert!((e3.alpha_abs() - e3.beta().powf(-0.5)).abs() < 1e-14);
        let e2 = Embedding::new(fp(2)).unwrap();
        assert!((e2.beta() - 1.754878).abs() < 1e-6);
        for a in 2..=10 {
            let e = Embedding::new(fp(a)).unwrap();
            assert!(e.err() <= DEFAULT_ROOT_TARGET);
            assert!(e.alpha().im > 0.0);
            let af = a as f64;
            assert!(af - 1.0 < e.beta() && e.beta() < af);
            assert!((e.alpha().norm_sqr() * e.beta() - 1.0).abs() < 10.0 * e.err());
        }
    }

    #[test]
    fn roots_report_unreachable_target() {
        match roots(fp(3), 1e-30) {
            Err(Error::Precision { achieved, target }) => {
                assert!(achieved > target);
                assert!(achieved < 1e-13);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn embed_examples() {
        let p = fp(3);
        let e = Embedding::new(p).unwrap();
        assert_eq!(e.embed(&AlgNum::one(p)), Complex64::new(1.0, 0.0));
        assert_eq!(e.embed(&AlgNum::alpha(p)), e.alpha());
        let v = t(p, [-1, 1, -1]);
        let direct = e.alpha() - e.alpha() * e.alpha() - 1.0;
        assert!((e.embed(&v) - direct).norm() < 1e-15);
        // v = −(a−1)α − α⁻¹
        let inv = Complex64::new(1.0, 0.0) / e.alpha();
        assert!((e.embed(&v) - (-(e.alpha() * 2.0) - inv)).norm() < 1e-14);
    }

    #[test]
    fn precise_embedding_agrees_with_f64() {
        for a in 2..=10 {
            let p = fp(a);
            let e = Embedding::new(p).unwrap();
            let pe = PreciseEmbedding::new(p, 200);
            assert!((pe.beta() - e.beta()).abs() <= e.err());
            assert!((pe.alpha() - e.alpha()).norm() <= 2.0 * e.err());
        }
    }

    #[test]
    fn precise_embedding_resolves_cancellation() {
        let p = fp(3);
        let pe = PreciseEmbedding::new(p, 256);
        let e = Embedding::new(p).unwrap();
        // α^90 has coefficients near β^90 but modulus |α|^90
        let x = AlgNum::alpha_power(p, 90);
        let expect = e.alpha().powi(90);
        let got = pe.embed(&x);
        assert!((got - expect).norm() < 1e-12 * expect.norm());
        assert!(pe.error_bound(&x) < 1e-30);
    }

    #[test]
    fn real_sign() {
        let p = fp(3);
        let pe = PreciseEmbedding::new(p, 128);
        assert_eq!(pe.real_sign(&AlgNum::one(p)), Some(Ordering::Greater));
        assert_eq!(pe.real_sign(&-AlgNum::alpha(p)), Some(Ordering::Less));
        assert_eq!(pe.real_sign(&AlgNum::zero(p)), Some(Ordering::Equal));
        // β^-30 is tiny but positive
        let x = AlgNum::alpha_power(p, -30);
        assert!(x.coeffs().iter().any(|c| c.bits() > 20));
        assert_eq!(pe.real_sign(&AlgNum::alpha_power(p, 30)), Some(Ordering::Greater));
    }

    #[test]
    fn display() {
        let p = fp(3);
        assert_eq!(AlgNum::zero(p).to_string(), "0");
        assert_eq!(t(p, [1, -2, 3]).to_string(), "1 - 2α + 3α²");
        assert_eq!(t(p, [0, -1, 1]).to_string(), "-α + α²");
        assert_eq!(t(p, [-1, 0, 0]).to_string(), "-1");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small() -> impl Strategy<Value = [i64; 3]> {
            [-20i64..20, -20i64..20, -20i64..20]
        }

        proptest! {
            #[test]
            fn alpha_roundtrip(c in small(), a in 2i64..12) {
                let p = fp(a);
                let x = t(p, c);
                prop_assert_eq!((&x * &AlgNum::alpha(p)).mul_alpha_inv(), x.clone());
                prop_assert_eq!(x.mul_alpha().mul_alpha_inv(), x);
            }

            #[test]
            fn ring_laws(x in small(), y in small(), z in small(), a in 2i64..12) {
                let p = fp(a);
                let (x, y, z) = (t(p, x), t(p, y), t(p, z));
                prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
                prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
                prop_assert_eq!(&x * &y, &y * &x);
            }

            #[test]
            fn embed_is_homomorphism(x in small(), y in small(), a in 2i64..11) {
                let p = fp(a);
                let e = Embedding::new(p).unwrap();
                let (x, y) = (t(p, x), t(p, y));
                let lhs = e.embed(&(&x * &y));
                let rhs = e.embed(&x) * e.embed(&y);
                // the err-driven term plus rounding of the products
                let tol = 10.0 * e.err() * (x.l1_norm() + y.l1_norm())
                    + 1e-13 * (1.0 + x.l1_norm() * y.l1_norm());
                prop_assert!((lhs - rhs).norm() <= tol, "{} vs {}", lhs, rhs);
            }
        }
    }
}
