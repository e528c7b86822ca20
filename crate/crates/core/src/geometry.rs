//! Affine maps on `Z[α]` describing the boundary piece `B = R ∩ (R + α − 1)`
//! as a graph-directed self-similar set, and evaluation of map codes.
//!
//! The maps `g_0 … g_{2a−2}` cut `B` into pieces:
//! * `g_{2k+1}(z) = −1 − kα³ + α³z` for `k = 0 … a−2`, defined on all of `B`;
//! * `g_{2k}(z) = α − 1 + (a−1−k)α³ + α²z` for `k = 0 … a−1`, defined on the
//!   sub-piece `B′` of points whose third digit is not `a − 1` (for
//!   `k = a − 1` the domain is all of `B`).
//!
//! Since `g_0(B)` and `g_1(B)` are exactly the points of `B` with third digit
//! `a − 1`, a code may not follow an even index other than `2a − 2` with
//! `0` or `1`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::algebra::{AlgNum, Embedding, FamilyParam};
use crate::error::{Error, Result};

/// `z ↦ translation + scale·z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub translation: AlgNum,
    pub scale: AlgNum,
}

impl AffineMap {
    pub fn identity(param: FamilyParam) -> Self {
        AffineMap {
            translation: AlgNum::zero(param),
            scale: AlgNum::one(param),
        }
    }

    pub fn param(&self) -> FamilyParam {
        self.scale.param()
    }

    pub fn apply(&self, z: &AlgNum) -> AlgNum {
        &self.translation + &(&self.scale * z)
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &AffineMap) -> AffineMap {
        AffineMap {
            translation: self.apply(&inner.translation),
            scale: &self.scale * &inner.scale,
        }
    }

    pub fn embed(&self, e: &Embedding) -> NumericMap {
        NumericMap {
            translation: e.embed(&self.translation),
            scale: e.embed(&self.scale),
        }
    }
}

/// Floating-point image of an [`AffineMap`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericMap {
    pub translation: Complex64,
    pub scale: Complex64,
}

impl NumericMap {
    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.translation + self.scale * z
    }
}

/// `m_1 ∘ m_2 ∘ … ∘ m_n`; the identity for an empty slice.
pub fn compose(param: FamilyParam, maps: &[AffineMap]) -> Result<AffineMap> {
    let mut acc = AffineMap::identity(param);
    for m in maps.iter().rev() {
        if m.param() != param {
            return Err(Error::ParamMismatch(param.a(), m.param().a()));
        }
        acc = m.after(&acc);
    }
    Ok(acc)
}

/// The map `g_i`, `0 ≤ i ≤ 2a − 2`.
pub fn g_map(param: FamilyParam, i: u32) -> Result<AffineMap> {
    let max = param.r() - 1;
    if i > max {
        return Err(Error::MapIndex { index: i, max });
    }
    let a = i64::from(param.a());
    let k = i64::from(i / 2);
    let alpha3 = AlgNum::alpha_power(param, 3);
    Ok(if i % 2 == 1 {
        AffineMap {
            translation: AlgNum::from_int(param, -1) - alpha3.scale_i64(k),
            scale: alpha3,
        }
    } else {
        AffineMap {
            translation: AlgNum::new(param, -1, 1, 0) + alpha3.scale_i64(a - 1 - k),
            scale: AlgNum::alpha_power(param, 2),
        }
    })
}

/// The maps `f_1(z) = α⁻¹ − 1 + α⁻¹z`, `f_2(z) = −(a−1)α + α⁻¹z` and
/// `f_3(z) = 1 − α + z` relating the four boundary pieces.
pub fn f_map(param: FamilyParam, j: u32) -> Result<AffineMap> {
    let a = i64::from(param.a());
    let inv = AlgNum::alpha_inv(param);
    match j {
        1 => Ok(AffineMap {
            translation: &inv - &AlgNum::one(param),
            scale: inv,
        }),
        2 => Ok(AffineMap {
            translation: AlgNum::new(param, 0, 1 - a, 0),
            scale: inv,
        }),
        3 => Ok(AffineMap {
            translation: AlgNum::new(param, 1, -1, 0),
            scale: AlgNum::one(param),
        }),
        _ => Err(Error::MapIndex { index: j, max: 3 }),
    }
}

/// A code `b_1 b_2 …` over `{0, …, 2a − 2}`: a finite prefix followed by an
/// optional period repeated forever.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GCode {
    prefix: Vec<u32>,
    period: Vec<u32>,
}

impl GCode {
    pub fn finite(digits: Vec<u32>) -> Self {
        GCode {
            prefix: digits,
            period: Vec::new(),
        }
    }

    pub fn periodic(prefix: Vec<u32>, period: Vec<u32>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::NotPeriodic);
        }
        Ok(GCode { prefix, period })
    }

    pub fn prefix(&self) -> &[u32] {
        &self.prefix
    }

    pub fn period(&self) -> &[u32] {
        &self.period
    }

    /// Number of digits, `None` when infinite.
    pub fn len(&self) -> Option<usize> {
        self.period.is_empty().then_some(self.prefix.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// Digit `b_{j+1}` (0-based position `j`).
    pub fn get(&self, j: usize) -> Option<u32> {
        match self.prefix.get(j) {
            Some(&d) => Some(d),
            None if self.period.is_empty() => None,
            None => Some(self.period[(j - self.prefix.len()) % self.period.len()]),
        }
    }

    /// The first `n` digits, or an error if the code is shorter.
    pub fn take(&self, n: usize) -> Result<Vec<u32>> {
        (0..n)
            .map(|j| self.get(j).ok_or(Error::InvalidArgument("code shorter than depth")))
            .collect()
    }

    /// Checks digit ranges and the follow rule on every distinct position.
    pub fn validate(&self, param: FamilyParam) -> Result<()> {
        let span = self.prefix.len() + 2 * self.period.len();
        let digits: Vec<u32> = (0..span).map_while(|j| self.get(j)).collect();
        check_code(param, &digits)
    }
}

/// Digit ranges plus: an even digit other than `2a − 2` is never followed by
/// `0` or `1`. The error carries the 0-based position of the offending digit.
pub fn check_code(param: FamilyParam, digits: &[u32]) -> Result<()> {
    let max = param.r() - 1;
    for (j, &b) in digits.iter().enumerate() {
        if b > max {
            return Err(Error::MapIndex { index: b, max });
        }
        if j > 0 && !may_follow(param, digits[j - 1], b) {
            return Err(Error::FollowConstraint(j));
        }
    }
    Ok(())
}

pub fn may_follow(param: FamilyParam, previous: u32, next: u32) -> bool {
    !(previous.is_multiple_of(2) && previous != param.r() - 1 && next <= 1)
}

/// The points `u = −1`, `v = −(a−1)α − α⁻¹` and `w = −1 − α³`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyPoints {
    pub u: AlgNum,
    pub v: AlgNum,
    pub w: AlgNum,
}

impl KeyPoints {
    pub fn new(param: FamilyParam) -> Self {
        let a = i64::from(param.a());
        KeyPoints {
            u: AlgNum::new(param, -1, 0, 0),
            v: AlgNum::new(param, -1, 1, -1),
            w: AlgNum::new(param, -2, 1, -a),
        }
    }
}

/// Where the images of two consecutive maps touch: `g_even(from_even) = g_odd(from_odd) = point`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluingPoint {
    pub even: u32,
    pub odd: u32,
    pub point: AlgNum,
}

/// The touching points of consecutive pieces, each verified exactly:
/// `g_{2k}(w) = g_{2k+1}(v) = −1 − α² − kα³ − (a−1)α⁴` and
/// `g_{2k+1}(u) = g_{2k+2}(v) = −1 − (k+1)α³`.
pub fn gluing_points(param: FamilyParam) -> Result<Vec<GluingPoint>> {
    let kp = KeyPoints::new(param);
    let a = i64::from(param.a());
    let alpha2 = AlgNum::alpha_power(param, 2);
    let alpha3 = AlgNum::alpha_power(param, 3);
    let alpha4 = AlgNum::alpha_power(param, 4);
    let minus_one = AlgNum::from_int(param, -1);
    let mut out = Vec::new();
    for k in 0..param.a() - 1 {
        let kk = i64::from(k);
        let (even, odd) = (2 * k, 2 * k + 1);
        let left = g_map(param, even)?.apply(&kp.w);
        let right = g_map(param, odd)?.apply(&kp.v);
        let closed = &minus_one - &alpha2 - alpha3.scale_i64(kk) - alpha4.scale_i64(a - 1);
        if left != right || left != closed {
            return Err(Error::IdentityFailure("g_2k(w) = g_2k+1(v)"));
        }
        out.push(GluingPoint { even, odd, point: left });

        let left = g_map(param, odd)?.apply(&kp.u);
        let right = g_map(param, even + 2)?.apply(&kp.v);
        let closed = &minus_one - &alpha3.scale_i64(kk + 1);
        if left != right || left != closed {
            return Err(Error::IdentityFailure("g_2k+1(u) = g_2k+2(v)"));
        }
        out.push(GluingPoint {
            even: even + 2,
            odd,
            point: left,
        });
    }
    Ok(out)
}

/// A corner identity `f_j(input) = output`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corner {
    pub map: u32,
    pub input: AlgNum,
    pub output: AlgNum,
}

/// `f_1(u) = u`, `f_2(u) = v`, `f_3(u) = −α`, `f_1(v) = −α`,
/// `f_2(v) = −α²`, `f_3(v) = −α²`, verified exactly.
pub fn corner_identities(param: FamilyParam) -> Result<Vec<Corner>> {
    let kp = KeyPoints::new(param);
    let minus_alpha = -AlgNum::alpha(param);
    let minus_alpha2 = -AlgNum::alpha_power(param, 2);
    let expected = [
        (1, &kp.u, &kp.u),
        (2, &kp.u, &kp.v),
        (3, &kp.u, &minus_alpha),
        (1, &kp.v, &minus_alpha),
        (2, &kp.v, &minus_alpha2),
        (3, &kp.v, &minus_alpha2),
    ];
    expected
        .into_iter()
        .map(|(j, input, output)| {
            if f_map(param, j)?.apply(input) != *output {
                return Err(Error::IdentityFailure("corner identity"));
            }
            Ok(Corner {
                map: j,
                input: input.clone(),
                output: output.clone(),
            })
        })
        .collect()
}

/// A point `g_{b_1} ∘ … ∘ g_{b_n}(x_0)` with its distance bound to the limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CodePoint {
    pub point: Complex64,
    pub error_bound: f64,
}

/// Minimum distance between sampled images of two maps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DisjointnessReport {
    pub min_distance: f64,
    pub truncation_error: f64,
    pub samples: usize,
}

/// The maps `g_i` with their numeric images, the start point `x_0 = w` and
/// a bound `C` on the diameter of the piece.
#[derive(Clone, Debug)]
pub struct BoundaryIfs {
    param: FamilyParam,
    embedding: Embedding,
    maps: Vec<AffineMap>,
    numeric: Vec<NumericMap>,
    x0: AlgNum,
    x0_numeric: Complex64,
    diam: f64,
}

impl BoundaryIfs {
    pub fn new(e: &Embedding) -> Result<Self> {
        let param = e.param().require_codec()?;
        let maps = (0..param.r())
            .map(|i| g_map(param, i))
            .collect::<Result<Vec<_>>>()?;
        let numeric = maps.iter().map(|m| m.embed(e)).collect();
        let x0 = KeyPoints::new(param).w;
        let m = e.alpha_abs();
        // the piece lies in {Σ_{i≥2} a_i αⁱ}, a disc of radius (a−1)|α|²/(1−|α|)
        let diam = 2.0 * f64::from(param.a() - 1) * m * m / (1.0 - m);
        Ok(BoundaryIfs {
            param,
            embedding: *e,
            x0_numeric: e.embed(&x0),
            maps,
            numeric,
            x0,
            diam,
        })
    }

    pub fn param(&self) -> FamilyParam {
        self.param
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    pub fn map(&self, i: u32) -> &AffineMap {
        &self.maps[i as usize]
    }

    pub fn numeric_map(&self, i: u32) -> &NumericMap {
        &self.numeric[i as usize]
    }

    pub fn x0(&self) -> &AlgNum {
        &self.x0
    }

    pub fn diam(&self) -> f64 {
        self.diam
    }

    /// `|α|^{2n}·C`: distance from a depth-`n` evaluation to the limit.
    pub fn truncation_bound(&self, n: usize) -> f64 {
        self.embedding.alpha_abs().powi(2 * n as i32) * self.diam
    }

    /// Exact `g_{b_1} ∘ … ∘ g_{b_n}(x0)`.
    pub fn eval_exact(&self, digits: &[u32], x0: &AlgNum) -> Result<AlgNum> {
        check_code(self.param, digits)?;
        Ok(digits
            .iter()
            .rev()
            .fold(x0.clone(), |z, &b| self.maps[b as usize].apply(&z)))
    }

    /// Numeric `g_{b_1} ∘ … ∘ g_{b_n}(x_0)`, innermost map first.
    pub fn eval(&self, digits: &[u32]) -> Result<CodePoint> {
        check_code(self.param, digits)?;
        Ok(self.eval_unchecked(digits))
    }

    pub(crate) fn eval_unchecked(&self, digits: &[u32]) -> CodePoint {
        let point = digits
            .iter()
            .rev()
            .fold(self.x0_numeric, |z, &b| self.numeric[b as usize].apply(z));
        CodePoint {
            point,
            error_bound: self.truncation_bound(digits.len()),
        }
    }

    pub fn eval_code(&self, code: &GCode, depth: usize) -> Result<CodePoint> {
        self.eval(&code.take(depth)?)
    }

    /// A uniformly chosen valid code of length `n`, optionally with a fixed first digit.
    pub fn random_code<R: Rng + ?Sized>(&self, rng: &mut R, n: usize, first: Option<u32>) -> Vec<u32> {
        let r = self.param.r();
        let mut out: Vec<u32> = Vec::with_capacity(n);
        for j in 0..n {
            let b = match (j, first) {
                (0, Some(b)) => b,
                _ => match out.last() {
                    Some(&prev) if !may_follow(self.param, prev, 0) => rng.random_range(2..r),
                    _ => rng.random_range(0..r),
                },
            };
            out.push(b);
        }
        out
    }

    /// Samples `g_i(B)` and `g_j(B)` through random codes and reports the
    /// smallest cross distance.
    pub fn piece_disjointness_witness<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        i: u32,
        j: u32,
        depth: usize,
        samples: usize,
    ) -> Result<DisjointnessReport> {
        if i == j {
            return Err(Error::InvalidArgument("piece indices must differ"));
        }
        let max = self.param.r() - 1;
        for index in [i, j] {
            if index > max {
                return Err(Error::MapIndex { index, max });
            }
        }
        let n = depth.max(1);
        let mut sample = |first| -> Vec<Complex64> {
            (0..samples)
                .map(|_| {
                    let code = self.random_code(rng, n, Some(first));
                    self.eval_unchecked(&code).point
                })
                .collect()
        };
        let left = sample(i);
        let right = sample(j);
        let min_distance = left
            .iter()
            .flat_map(|p| right.iter().map(move |q| (p - q).norm()))
            .fold(f64::INFINITY, f64::min);
        Ok(DisjointnessReport {
            min_distance,
            truncation_error: self.truncation_bound(n),
            samples,
        })
    }
}
