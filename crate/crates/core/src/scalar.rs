//! Scalar backends.
//!
//! Every geometric routine in this crate is generic over a [`Scalar`]: either
//! the exact backend (arbitrary-precision rationals, where all ring operations
//! are lossless and every predicate is decided exactly) or the floating
//! backend (`f64`, where comparisons are made relative to a single global
//! tolerance τ).

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact backend scalar: an arbitrary-precision rational number.
pub type Exact = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("cannot parse scalar from {0:?}")]
    Parse(String),
    #[error("scalar operation out of range: {0}")]
    Range(String),
    #[error("no quaternion of the requested squared norm: {0}")]
    NormWitness(String),
}

static TOLERANCE_BITS: AtomicU64 = AtomicU64::new(0);
const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Set the global float-backend comparison tolerance τ.
pub fn set_tolerance(tau: f64) {
    TOLERANCE_BITS.store(tau.to_bits(), AtomicOrdering::Relaxed);
}

/// The global float-backend comparison tolerance τ (default `1e-9`).
pub fn tolerance() -> f64 {
    let bits = TOLERANCE_BITS.load(AtomicOrdering::Relaxed);
    if bits == 0 {
        DEFAULT_TOLERANCE
    } else {
        f64::from_bits(bits)
    }
}

/// τ-relative equality used throughout the float backend:
/// `|x − y| ≤ τ · max(1, |x|, |y|)`.
pub fn approx_eq_f64(x: f64, y: f64) -> bool {
    let tau = tolerance();
    (x - y).abs() <= tau * 1f64.max(x.abs()).max(y.abs())
}

/// Relative residual of an equality claim, `|lhs − rhs| / max(1, |lhs|, |rhs|)`.
pub fn relative_residual(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / 1f64.max(lhs.abs()).max(rhs.abs())
}

/// A field of characteristic zero the geometry can be built over.
///
/// The trait deliberately exposes only what the geometry needs: ring and
/// field operations, sign queries, equality (exact or τ-relative depending on
/// backend), and a witness for the quaternion norm form (used to rescale
/// lifts to a prescribed squared norm).
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is lossless and every comparison is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Backend equality: exact, or τ-relative on the float backend.
    fn eq_scalar(&self, other: &Self) -> bool;

    /// `eq_scalar` against zero.
    fn is_zero(&self) -> bool {
        self.eq_scalar(&Self::zero())
    }

    fn abs(&self) -> Self;

    /// Exact sign of the stored value (no tolerance): -1, 0, or +1.
    fn signum_int(&self) -> i8;

    fn to_f64(&self) -> f64;

    fn parse(text: &str) -> Result<Self, ScalarError>;

    /// Elimination pivot floor: entries with squared norm at or below this
    /// are treated as zero. Exact backend: zero; float backend: τ·max.
    fn pivot_floor(max_norm_sq: &Self) -> Self;

    /// Coefficients `(a, b, c, d)` of a quaternion with
    /// `a² + b² + c² + d² = target` (requires `target > 0`).
    ///
    /// On the float backend this is `(√target, 0, 0, 0)`; on the exact
    /// backend it is a rational four-square witness, which always exists.
    fn norm_sq_witness(target: &Self) -> Result<[Self; 4], ScalarError>;

    /// A positive factor clearing denominators of `values` (exact backend);
    /// `1` on the float backend.
    fn denominator_clearing(values: &[Self]) -> Self;

    /// Positive normalization factor of `values`: on the exact backend the
    /// rational content (dividing by it leaves coprime integers), on the
    /// float backend the largest magnitude. Rescaling lifts by it keeps
    /// exact integers small and float magnitudes near one through long
    /// constructions. `1` when all values vanish.
    fn content(values: &[Self]) -> Self;

    /// Exact square root if the value is a perfect square in the field.
    fn exact_sqrt(&self) -> Option<Self>;
}

/// Float-only analytic operations (distances, geodesic parametrization).
pub trait FloatScalar: Scalar {
    fn from_f64(v: f64) -> Self;
    fn sqrt(&self) -> Self;
    fn cosh(&self) -> Self;
    fn sinh(&self) -> Self;
    fn acosh(&self) -> Self;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn eq_scalar(&self, other: &Self) -> bool {
        approx_eq_f64(*self, *other)
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn signum_int(&self) -> i8 {
        if *self > 0.0 {
            1
        } else if *self < 0.0 {
            -1
        } else {
            0
        }
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse(text: &str) -> Result<Self, ScalarError> {
        // Accept both decimal floats and "p/q" rational notation.
        if let Some((num, den)) = text.split_once('/') {
            let n: f64 = num.trim().parse().map_err(|_| ScalarError::Parse(text.into()))?;
            let d: f64 = den.trim().parse().map_err(|_| ScalarError::Parse(text.into()))?;
            if d == 0.0 {
                return Err(ScalarError::Parse(text.into()));
            }
            return Ok(n / d);
        }
        text.trim().parse().map_err(|_| ScalarError::Parse(text.into()))
    }

    fn pivot_floor(max_norm_sq: &Self) -> Self {
        tolerance() * f64::abs(*max_norm_sq)
    }

    fn norm_sq_witness(target: &Self) -> Result<[Self; 4], ScalarError> {
        if *target <= 0.0 {
            return Err(ScalarError::NormWitness(format!("target {target} not positive")));
        }
        Ok([target.sqrt(), 0.0, 0.0, 0.0])
    }

    fn denominator_clearing(_values: &[Self]) -> Self {
        1.0
    }

    fn content(values: &[Self]) -> Self {
        let max = values.iter().fold(0.0f64, |acc, v| acc.max(f64::abs(*v)));
        if max > 0.0 {
            max
        } else {
            1.0
        }
    }

    fn exact_sqrt(&self) -> Option<Self> {
        if *self >= 0.0 {
            Some(f64::sqrt(*self))
        } else {
            None
        }
    }
}

impl FloatScalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn cosh(&self) -> Self {
        f64::cosh(*self)
    }
    fn sinh(&self) -> Self {
        f64::sinh(*self)
    }
    fn acosh(&self) -> Self {
        f64::acosh(*self)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn eq_scalar(&self, other: &Self) -> bool {
        self == other
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn signum_int(&self) -> i8 {
        match self.cmp(&<BigRational as Zero>::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse(text: &str) -> Result<Self, ScalarError> {
        BigRational::from_str(text.trim()).map_err(|_| ScalarError::Parse(text.into()))
    }

    fn pivot_floor(_max_norm_sq: &Self) -> Self {
        <BigRational as Zero>::zero()
    }

    fn norm_sq_witness(target: &Self) -> Result<[Self; 4], ScalarError> {
        if !Signed::is_positive(target) {
            return Err(ScalarError::NormWitness(format!("target {target} not positive")));
        }
        // target = p/q; p·q = a² + b² + c² + d² gives |(a+bi+cj+dk)/q|² = p/q.
        let p = target.numer().magnitude().clone();
        let q = target.denom().magnitude().clone();
        let n = &p * &q;
        let [a, b, c, d] = four_squares(&n)?;
        let den = BigInt::from(q);
        let coord = |v: BigUint| BigRational::new(BigInt::from(v), den.clone());
        Ok([coord(a), coord(b), coord(c), coord(d)])
    }

    fn denominator_clearing(values: &[Self]) -> Self {
        let mut l = BigInt::one();
        for v in values {
            l = l.lcm(v.denom());
        }
        BigRational::from_integer(Signed::abs(&l))
    }

    fn content(values: &[Self]) -> Self {
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for v in values {
            if !Zero::is_zero(v) {
                num_gcd = num_gcd.gcd(v.numer());
                den_lcm = den_lcm.lcm(v.denom());
            }
        }
        if Zero::is_zero(&num_gcd) {
            <BigRational as One>::one()
        } else {
            BigRational::new(Signed::abs(&num_gcd), Signed::abs(&den_lcm))
        }
    }

    fn exact_sqrt(&self) -> Option<Self> {
        if Signed::is_negative(self) {
            return None;
        }
        let num = self.numer().magnitude();
        let den = self.denom().magnitude();
        let sn = num.sqrt();
        let sd = den.sqrt();
        if &(&sn * &sn) == num && &(&sd * &sd) == den {
            Some(BigRational::new(BigInt::from(sn), BigInt::from(sd)))
        } else {
            None
        }
    }
}

/// Lagrange four-square decomposition of a nonnegative integer.
///
/// Descent on the largest square with a three-square inner step; the
/// 4^k(8m+7) obstruction test prunes branches with no three-square
/// representation. Inputs beyond u128 range are rejected (the geometry
/// reduces lifts before calling this, so desk-scale runs never get there).
pub fn four_squares(n: &BigUint) -> Result<[BigUint; 4], ScalarError> {
    let n128 = n
        .to_u128()
        .ok_or_else(|| ScalarError::Range(format!("four-square input too large: {n}")))?;
    let [a, b, c, d] = four_squares_u128(n128);
    Ok([BigUint::from(a), BigUint::from(b), BigUint::from(c), BigUint::from(d)])
}

fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128 + 2;
    while x.checked_mul(x).map(|s| s > n).unwrap_or(true) {
        x -= 1;
    }
    x
}

fn is_square_u128(n: u128) -> Option<u128> {
    let r = isqrt_u128(n);
    (r * r == n).then_some(r)
}

/// `m = x² + y²` by descent from ⌊√m⌋, or None.
fn two_squares_u128(m: u128) -> Option<(u128, u128)> {
    let mut x = isqrt_u128(m);
    loop {
        let rest = m - x * x;
        if let Some(y) = is_square_u128(rest) {
            return Some((x, y));
        }
        if x * x * 2 < m || x == 0 {
            return None;
        }
        x -= 1;
    }
}

fn three_squares_u128(m: u128) -> Option<(u128, u128, u128)> {
    // Strip factors of 4, then reject the 8k+7 residue class.
    let mut stripped = m;
    while stripped != 0 && stripped % 4 == 0 {
        stripped /= 4;
    }
    if stripped % 8 == 7 {
        return None;
    }
    let mut x = isqrt_u128(m);
    loop {
        if let Some((y, z)) = two_squares_u128(m - x * x) {
            return Some((x, y, z));
        }
        if x == 0 {
            return None;
        }
        x -= 1;
    }
}

fn four_squares_u128(n: u128) -> [u128; 4] {
    if n == 0 {
        return [0, 0, 0, 0];
    }
    let mut a = isqrt_u128(n);
    loop {
        if let Some((b, c, d)) = three_squares_u128(n - a * a) {
            return [a, b, c, d];
        }
        assert!(a > 0, "four-square descent exhausted for {n}");
        a -= 1;
    }
}
