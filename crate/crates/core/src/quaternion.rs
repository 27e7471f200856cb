//! Quaternion arithmetic and similarity theory.
//!
//! Quaternions `a = a₀ + a₁i + a₂j + a₃k` over a [`Scalar`] backend, with the
//! Hamilton relations `i² = j² = k² = −1`, `ij = −ji = k`, `jk = −kj = i`,
//! `ki = −ik = j`. Two quaternions are *similar* when one is a conjugate
//! `λbλ⁻¹` of the other; similarity is classified by the pair
//! (real part, squared imaginary norm), so it is decidable exactly on the
//! rational backend without square roots.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::scalar::{Scalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuaternionError {
    #[error("division by zero quaternion")]
    DivisionByZero,
    #[error("quaternions are not similar: invariants ({0}, {1}) vs ({2}, {3})")]
    NotSimilar(String, String, String, String),
    #[error("expected a nonzero imaginary quaternion, got {0}")]
    NotImaginary(String),
    #[error("expected a unit quaternion, |a|² = {0}")]
    NotUnit(String),
    #[error("cannot parse quaternion from {0:?}")]
    Parse(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A quaternion with coefficients `re + x·i + y·j + z·k`.
#[derive(Clone, PartialEq)]
pub struct Quaternion<S> {
    pub re: S,
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Scalar> Quaternion<S> {
    pub fn new(re: S, x: S, y: S, z: S) -> Self {
        Quaternion { re, x, y, z }
    }

    pub fn zero() -> Self {
        Quaternion::new(S::zero(), S::zero(), S::zero(), S::zero())
    }

    pub fn one() -> Self {
        Quaternion::from_real(S::one())
    }

    pub fn i() -> Self {
        Quaternion::new(S::zero(), S::one(), S::zero(), S::zero())
    }

    pub fn j() -> Self {
        Quaternion::new(S::zero(), S::zero(), S::one(), S::zero())
    }

    pub fn k() -> Self {
        Quaternion::new(S::zero(), S::zero(), S::zero(), S::one())
    }

    pub fn from_real(re: S) -> Self {
        Quaternion::new(re, S::zero(), S::zero(), S::zero())
    }

    pub fn from_int(v: i64) -> Self {
        Quaternion::from_real(S::from_int(v))
    }

    /// Shorthand for a quaternion with small rational coefficients.
    pub fn from_ratios(parts: [(i64, i64); 4]) -> Self {
        Quaternion::new(
            S::from_ratio(parts[0].0, parts[0].1),
            S::from_ratio(parts[1].0, parts[1].1),
            S::from_ratio(parts[2].0, parts[2].1),
            S::from_ratio(parts[3].0, parts[3].1),
        )
    }

    pub fn coords(&self) -> [S; 4] {
        [self.re.clone(), self.x.clone(), self.y.clone(), self.z.clone()]
    }

    pub fn conj(&self) -> Self {
        Quaternion::new(
            self.re.clone(),
            -self.x.clone(),
            -self.y.clone(),
            -self.z.clone(),
        )
    }

    /// `|a|² = a·conj(a)`, a nonnegative scalar.
    pub fn norm_sq(&self) -> S {
        self.re.clone() * self.re.clone()
            + self.x.clone() * self.x.clone()
            + self.y.clone() * self.y.clone()
            + self.z.clone() * self.z.clone()
    }

    /// Imaginary part `a₁i + a₂j + a₃k` as a quaternion.
    pub fn im(&self) -> Self {
        Quaternion::new(S::zero(), self.x.clone(), self.y.clone(), self.z.clone())
    }

    /// `|Im a|²`.
    pub fn im_norm_sq(&self) -> S {
        self.x.clone() * self.x.clone()
            + self.y.clone() * self.y.clone()
            + self.z.clone() * self.z.clone()
    }

    pub fn is_zero(&self) -> bool {
        self.norm_sq().is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im_norm_sq().is_zero()
    }

    pub fn is_imaginary(&self) -> bool {
        self.re.is_zero()
    }

    /// Backend equality (exact, or τ-relative componentwise).
    pub fn eq_q(&self, other: &Self) -> bool {
        self.re.eq_scalar(&other.re)
            && self.x.eq_scalar(&other.x)
            && self.y.eq_scalar(&other.y)
            && self.z.eq_scalar(&other.z)
    }

    pub fn scale(&self, s: &S) -> Self {
        Quaternion::new(
            self.re.clone() * s.clone(),
            self.x.clone() * s.clone(),
            self.y.clone() * s.clone(),
            self.z.clone() * s.clone(),
        )
    }

    /// `a⁻¹ = conj(a)/|a|²`.
    pub fn inverse(&self) -> Result<Self, QuaternionError> {
        let n = self.norm_sq();
        if n.is_zero() {
            return Err(QuaternionError::DivisionByZero);
        }
        Ok(self.conj().scale(&(S::one() / n)))
    }

    /// Euclidean ℝ⁴ inner product of coefficient vectors, `Re(conj(a)·b)`.
    pub fn dot(&self, other: &Self) -> S {
        self.re.clone() * other.re.clone()
            + self.x.clone() * other.x.clone()
            + self.y.clone() * other.y.clone()
            + self.z.clone() * other.z.clone()
    }

    /// True iff `ab = ba`. For non-real `a` this holds exactly when
    /// `b ∈ span_ℝ(1, a)`, the centralizer being the subfield C(a).
    pub fn commutes(&self, other: &Self) -> bool {
        let ab = self * other;
        let ba = other * self;
        ab.eq_q(&ba)
    }

    /// Similarity invariants `(Re a, |Im a|²)`; two quaternions are similar
    /// exactly when these agree.
    pub fn similarity_normal_form(&self) -> (S, S) {
        (self.re.clone(), self.im_norm_sq())
    }

    pub fn is_similar(&self, other: &Self) -> bool {
        let (r1, m1) = self.similarity_normal_form();
        let (r2, m2) = other.similarity_normal_form();
        r1.eq_scalar(&r2) && m1.eq_scalar(&m2)
    }

    /// A witness `λ ≠ 0` with `λ · other · λ⁻¹ = self`.
    ///
    /// For equal imaginary norms the sum of imaginary parts conjugates one
    /// onto the other; the antipodal case `Im self = −Im other` falls back to
    /// any imaginary direction orthogonal to `Im self`.
    pub fn similarity_witness(&self, other: &Self) -> Result<Self, QuaternionError> {
        if !self.is_similar(other) {
            let (r1, m1) = self.similarity_normal_form();
            let (r2, m2) = other.similarity_normal_form();
            return Err(QuaternionError::NotSimilar(
                r1.to_string(),
                m1.to_string(),
                r2.to_string(),
                m2.to_string(),
            ));
        }
        if self.is_real() {
            return Ok(Quaternion::one());
        }
        let u = self.im();
        let v = other.im();
        let sum = &u + &v;
        let lambda = if sum.is_zero() {
            ImaginaryDirection::new(u)?.orthogonal_imaginary().into_inner()
        } else {
            sum
        };
        // Clear denominators; conjugation is invariant under real scaling.
        let f = S::denominator_clearing(&lambda.coords());
        Ok(lambda.scale(&f))
    }
}

impl<S: Scalar> fmt::Debug for Quaternion<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {} i + {} j + {} k)", self.re, self.x, self.y, self.z)
    }
}

/// Text form `a0 + a1 i + a2 j + a3 k`, rationals printed as `p/q`.
impl<S: Scalar> fmt::Display for Quaternion<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {} i + {} j + {} k", self.re, self.x, self.y, self.z)
    }
}

impl<S: Scalar> Quaternion<S> {
    /// Parse the canonical text form emitted by `Display`.
    pub fn parse(text: &str) -> Result<Self, QuaternionError> {
        let cleaned = text.trim();
        let mut parts: Vec<&str> = cleaned.split('+').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(QuaternionError::Parse(text.into()));
        }
        let strip = |part: &str, suffix: &str| -> String {
            part.strip_suffix(suffix).unwrap_or(part).trim().to_string()
        };
        let z = strip(parts.pop().unwrap(), "k");
        let y = strip(parts.pop().unwrap(), "j");
        let x = strip(parts.pop().unwrap(), "i");
        let re = parts.pop().unwrap().to_string();
        let read = |s: &str| S::parse(s).map_err(|_| QuaternionError::Parse(text.into()));
        Ok(Quaternion::new(read(&re)?, read(&x)?, read(&y)?, read(&z)?))
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, |$a:ident, $b:ident| $body:expr) => {
        impl<'a, 'b, S: Scalar> $trait<&'b Quaternion<S>> for &'a Quaternion<S> {
            type Output = Quaternion<S>;
            fn $method(self, rhs: &'b Quaternion<S>) -> Quaternion<S> {
                let $a = self;
                let $b = rhs;
                $body
            }
        }
        impl<S: Scalar> $trait<Quaternion<S>> for Quaternion<S> {
            type Output = Quaternion<S>;
            fn $method(self, rhs: Quaternion<S>) -> Quaternion<S> {
                $trait::$method(&self, &rhs)
            }
        }
    };
}

impl_binop!(Add, add, |a, b| Quaternion::new(
    a.re.clone() + b.re.clone(),
    a.x.clone() + b.x.clone(),
    a.y.clone() + b.y.clone(),
    a.z.clone() + b.z.clone(),
));

impl_binop!(Sub, sub, |a, b| Quaternion::new(
    a.re.clone() - b.re.clone(),
    a.x.clone() - b.x.clone(),
    a.y.clone() - b.y.clone(),
    a.z.clone() - b.z.clone(),
));

impl_binop!(Mul, mul, |a, b| {
    let (a0, a1, a2, a3) = (&a.re, &a.x, &a.y, &a.z);
    let (b0, b1, b2, b3) = (&b.re, &b.x, &b.y, &b.z);
    Quaternion::new(
        a0.clone() * b0.clone() - a1.clone() * b1.clone() - a2.clone() * b2.clone()
            - a3.clone() * b3.clone(),
        a0.clone() * b1.clone() + a1.clone() * b0.clone() + a2.clone() * b3.clone()
            - a3.clone() * b2.clone(),
        a0.clone() * b2.clone() - a1.clone() * b3.clone() + a2.clone() * b0.clone()
            + a3.clone() * b1.clone(),
        a0.clone() * b3.clone() + a1.clone() * b2.clone() - a2.clone() * b1.clone()
            + a3.clone() * b0.clone(),
    )
});

impl<S: Scalar> Neg for &Quaternion<S> {
    type Output = Quaternion<S>;
    fn neg(self) -> Quaternion<S> {
        Quaternion::new(
            -self.re.clone(),
            -self.x.clone(),
            -self.y.clone(),
            -self.z.clone(),
        )
    }
}

impl<S: Scalar> Neg for Quaternion<S> {
    type Output = Quaternion<S>;
    fn neg(self) -> Quaternion<S> {
        -&self
    }
}

/// A nonzero imaginary quaternion representing the ray `ℝ₊·q`.
///
/// Not normalized to unit length: exact rationals cannot represent most unit
/// imaginaries, and everything built on these (subfields C(a), anticommuting
/// pairs, spans) is invariant under positive rescaling.
#[derive(Clone, Debug, PartialEq)]
pub struct ImaginaryDirection<S: Scalar>(Quaternion<S>);

impl<S: Scalar> ImaginaryDirection<S> {
    pub fn new(q: Quaternion<S>) -> Result<Self, QuaternionError> {
        if !q.is_imaginary() || q.is_zero() {
            return Err(QuaternionError::NotImaginary(q.to_string()));
        }
        // Normalize by the content: positive rescaling does not change the
        // direction and keeps both backends well conditioned.
        let f = S::content(&q.coords());
        Ok(ImaginaryDirection(q.scale(&(S::one() / f))))
    }

    pub fn from_coords(x: S, y: S, z: S) -> Result<Self, QuaternionError> {
        Self::new(Quaternion::new(S::zero(), x, y, z))
    }

    pub fn i() -> Self {
        ImaginaryDirection(Quaternion::i())
    }

    pub fn as_quaternion(&self) -> &Quaternion<S> {
        &self.0
    }

    pub fn into_inner(self) -> Quaternion<S> {
        self.0
    }

    /// Same ray: one is a positive real multiple of the other.
    pub fn same_direction(&self, other: &Self) -> bool {
        let a = &self.0;
        let b = &other.0;
        // Colinear with positive inner product.
        let cross_zero = (a.x.clone() * b.y.clone() - a.y.clone() * b.x.clone()).is_zero()
            && (a.x.clone() * b.z.clone() - a.z.clone() * b.x.clone()).is_zero()
            && (a.y.clone() * b.z.clone() - a.z.clone() * b.y.clone()).is_zero();
        cross_zero && a.dot(b).signum_int() > 0
    }

    /// True when `q` lies in the subfield C(a) = span_ℝ(1, a).
    pub fn contains_in_subfield(&self, q: &Quaternion<S>) -> bool {
        let a = &self.0;
        (q.x.clone() * a.y.clone() - q.y.clone() * a.x.clone()).is_zero()
            && (q.x.clone() * a.z.clone() - q.z.clone() * a.x.clone()).is_zero()
            && (q.y.clone() * a.z.clone() - q.z.clone() * a.y.clone()).is_zero()
    }

    /// An imaginary direction `b` orthogonal to this one, so that the two
    /// anticommute: `ab = −ba` exactly.
    ///
    /// Deterministic: axis directions map to a fixed partner
    /// (i ↦ j, j ↦ i, k ↦ i), everything else to `(y, −x, 0)`.
    pub fn orthogonal_imaginary(&self) -> Self {
        let a = &self.0;
        let b = if a.x.is_zero() && a.y.is_zero() {
            Quaternion::i()
        } else if a.y.is_zero() && a.z.is_zero() {
            Quaternion::j()
        } else if a.x.is_zero() && a.z.is_zero() {
            Quaternion::i()
        } else {
            Quaternion::new(S::zero(), a.y.clone(), -a.x.clone(), S::zero())
        };
        ImaginaryDirection(b)
    }

    /// A rational unit element of C(a): the Cayley transform
    /// `(1 + ta)(1 − ta)⁻¹`, which has `|u|² = 1` exactly for any rational t.
    pub fn unit_in_subfield(&self, t: &S) -> Quaternion<S> {
        let ta = self.0.scale(t);
        let num = Quaternion::one() + ta.clone();
        let den = (Quaternion::one() - ta).inverse().expect("1 - ta is nonzero");
        num * den
    }
}

impl<S: crate::scalar::FloatScalar> Quaternion<S> {
    /// The complex normal-form representative `b₀ + b₁·i` with `b₁ ≥ 0`
    /// (float backend): the unique complex number similar to this one.
    pub fn complex_representative(&self) -> Quaternion<S> {
        let (re, im_sq) = self.similarity_normal_form();
        Quaternion::new(re, im_sq.sqrt(), S::zero(), S::zero())
    }
}

/// A quaternion whose squared norm equals `target` exactly (float backend:
/// `√target`; exact backend: rational four-square witness).
pub fn quaternion_with_norm_sq<S: Scalar>(target: &S) -> Result<Quaternion<S>, QuaternionError> {
    let [a, b, c, d] = S::norm_sq_witness(target)?;
    Ok(Quaternion::new(a, b, c, d))
}
