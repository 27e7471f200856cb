//! The projective and ball models of quaternionic hyperbolic space.
//!
//! Points are negative right-lines in Q^{n,1}; the ball model divides out the
//! last coordinate. The exact backend never takes square roots: every metric
//! statement is phrased through the rational invariant `δ = cosh² d`, so
//! equidistance, the Pythagorean identity, and projection facts are all
//! polynomial and decided exactly. `dist` and geodesic parametrization by arc
//! length exist on the float backend only.

use thiserror::Error;

use crate::linalg::{
    gram, orth_project, HVector, HermitianSpace, LinAlgError, SignClass, Subspace, SubfieldTag,
};
use crate::quaternion::{quaternion_with_norm_sq, Quaternion, QuaternionError};
use crate::scalar::{FloatScalar, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("point is not interior (sign class {0:?})")]
    NotNegative(SignClass),
    #[error("coincident points")]
    CoincidentPoints,
    #[error("ball point must satisfy Σ|wᵢ|² < 1")]
    NotInBall,
    #[error("subspace is not hyperbolic: signature ({0}, {1}, {2})")]
    NotHyperbolic(usize, usize, usize),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Quaternion(#[from] QuaternionError),
}

/// A point of projective space: a nonzero vector up to right scaling, with
/// its cached sign class.
#[derive(Clone, Debug)]
pub struct ProjectivePoint<S: Scalar> {
    pub space: HermitianSpace,
    lift: HVector<S>,
    sign: SignClass,
}

impl<S: Scalar> ProjectivePoint<S> {
    pub fn from_lift(space: HermitianSpace, lift: HVector<S>) -> Result<Self, ModelError> {
        let sign = space.classify(&lift)?;
        Ok(ProjectivePoint { space, lift: lift.reduced(), sign })
    }

    /// Interior (negative) point from a lift; other classes are rejected.
    pub fn interior_from_lift(space: HermitianSpace, lift: HVector<S>) -> Result<Self, ModelError> {
        let p = Self::from_lift(space, lift)?;
        if p.sign != SignClass::Negative {
            return Err(ModelError::NotNegative(p.sign));
        }
        Ok(p)
    }

    pub fn sign(&self) -> SignClass {
        self.sign
    }

    pub fn is_interior(&self) -> bool {
        self.sign == SignClass::Negative
    }

    pub fn lift(&self) -> &HVector<S> {
        &self.lift
    }

    /// Canonical representative of a negative point: last coordinate 1.
    /// Kills any right prescaling of the input lift.
    pub fn canonical_lift(&self) -> Result<HVector<S>, ModelError> {
        if self.sign != SignClass::Negative {
            return Err(ModelError::NotNegative(self.sign));
        }
        let last = self.lift.coords.last().expect("nonempty lift");
        let inv = last.inverse()?;
        Ok(self.lift.scale_right(&inv))
    }

    /// Projective equality: the two lifts span a rank-one column space.
    pub fn same_point(&self, other: &Self) -> bool {
        use crate::linalg::quaternion_rank;
        quaternion_rank(&[self.lift.clone(), other.lift.clone()]) == 1
    }

    pub fn to_ball(&self) -> Result<BallPoint<S>, ModelError> {
        let canonical = self.canonical_lift()?;
        let n = self.space.n;
        Ok(BallPoint { coords: canonical.coords[..n].to_vec() })
    }
}

/// Ball-model coordinates: n quaternions with Σ|wᵢ|² < 1.
#[derive(Clone, Debug, PartialEq)]
pub struct BallPoint<S: Scalar> {
    coords: Vec<Quaternion<S>>,
}

impl<S: Scalar> BallPoint<S> {
    pub fn new(coords: Vec<Quaternion<S>>) -> Result<Self, ModelError> {
        let mut sum = S::zero();
        for c in &coords {
            sum = sum + c.norm_sq();
        }
        if (sum - S::one()).signum_int() >= 0 {
            return Err(ModelError::NotInBall);
        }
        Ok(BallPoint { coords })
    }

    pub fn origin(n: usize) -> Self {
        BallPoint { coords: vec![Quaternion::zero(); n] }
    }

    pub fn coords(&self) -> &[Quaternion<S>] {
        &self.coords
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    /// Lift with last coordinate 1.
    pub fn lift(&self) -> ProjectivePoint<S> {
        let space = HermitianSpace::new(self.n());
        let mut coords = self.coords.clone();
        coords.push(Quaternion::one());
        ProjectivePoint::interior_from_lift(space, HVector::new(coords))
            .expect("ball points are interior")
    }
}

/// The exact invariant `δ(p,q) = |⟨V,W⟩|² / (⟨V,V⟩⟨W,W⟩) = cosh² d(p,q)`.
///
/// Invariant under right rescaling of either lift; `δ ≥ 1` with equality iff
/// the points coincide.
pub fn delta<S: Scalar>(
    p: &ProjectivePoint<S>,
    q: &ProjectivePoint<S>,
) -> Result<S, ModelError> {
    for pt in [p, q] {
        if !pt.is_interior() {
            return Err(ModelError::NotNegative(pt.sign()));
        }
    }
    let space = p.space;
    let cross = space.herm(p.lift(), q.lift())?.norm_sq();
    let den = space.norm(p.lift())? * space.norm(q.lift())?;
    Ok(cross / den)
}

/// Bergman distance (float backend): `arccosh √δ`.
pub fn dist<S: FloatScalar>(
    p: &ProjectivePoint<S>,
    q: &ProjectivePoint<S>,
) -> Result<S, ModelError> {
    let d = delta(p, q)?;
    // Guard the branch cut: δ ≥ 1 up to rounding.
    let root = d.sqrt();
    let clamped = if root < S::one() { S::one() } else { root };
    Ok(clamped.acosh())
}

/// A real geodesic through a base point, stored as an orthogonal frame:
/// `V` negative, `W` positive, `⟨V,W⟩ = 0`, with the norms recorded.
#[derive(Clone, Debug)]
pub struct RealGeodesic<S: Scalar> {
    pub space: HermitianSpace,
    pub base: HVector<S>,
    pub direction: HVector<S>,
    pub base_norm: S,
    pub direction_norm: S,
}

impl<S: Scalar> RealGeodesic<S> {
    /// Frame invariant: Gram is real diagonal with the recorded norms.
    pub fn frame_checks(&self) -> Result<bool, ModelError> {
        let cross = self.space.herm(&self.base, &self.direction)?;
        let vb = self.space.norm(&self.base)?;
        let vd = self.space.norm(&self.direction)?;
        Ok(cross.is_zero()
            && vb.eq_scalar(&self.base_norm)
            && vd.eq_scalar(&self.direction_norm)
            && self.base_norm.signum_int() < 0
            && self.direction_norm.signum_int() > 0)
    }
}

/// The real geodesic through two distinct interior points.
///
/// The frame base is a lift of `p`; the aligned lift of `q` is
/// `base·α + direction` for the recorded real α.
pub fn geodesic_through<S: Scalar>(
    p: &ProjectivePoint<S>,
    q: &ProjectivePoint<S>,
) -> Result<RealGeodesic<S>, ModelError> {
    if p.same_point(q) {
        return Err(ModelError::CoincidentPoints);
    }
    let space = p.space;
    let v = p.canonical_lift()?;
    let (q_aligned, _) = align_against(&space, &v, q)?;
    let tau = space.herm(&v, &q_aligned)?.re;
    let rho = space.norm(&v)?;
    let alpha = tau / rho.clone();
    let w = q_aligned
        .sub(&v.scale_right(&Quaternion::from_real(alpha)))
        .reduced();
    let omega = space.norm(&w)?;
    debug_assert!(omega.signum_int() > 0);
    Ok(RealGeodesic {
        space,
        base: v,
        direction: w,
        base_norm: rho,
        direction_norm: omega,
    })
}

/// Lift of `q` rescaled so its product against `v` is real and negative.
fn align_against<S: Scalar>(
    space: &HermitianSpace,
    v: &HVector<S>,
    q: &ProjectivePoint<S>,
) -> Result<(HVector<S>, Quaternion<S>), ModelError> {
    let q_lift = q.canonical_lift()?;
    let t = space.herm(v, &q_lift)?;
    if t.im_norm_sq().is_zero() {
        if t.re.signum_int() > 0 {
            return Ok((q_lift.neg(), -t));
        }
        return Ok((q_lift, t));
    }
    let aligned = q_lift.scale_right(&-&t.conj()).reduced();
    let new_t = space.herm(v, &aligned)?;
    Ok((aligned, new_t))
}

/// Arc-length point `π(V cosh t + W sinh t)` (float backend).
pub fn point_at<S: FloatScalar>(
    g: &RealGeodesic<S>,
    t: &S,
) -> Result<ProjectivePoint<S>, ModelError> {
    let v_unit = g
        .base
        .scale_right(&Quaternion::from_real(S::one() / (-g.base_norm.clone()).sqrt()));
    let w_unit = g
        .direction
        .scale_right(&Quaternion::from_real(S::one() / g.direction_norm.clone().sqrt()));
    let lift = v_unit
        .scale_right(&Quaternion::from_real(t.cosh()))
        .add(&w_unit.scale_right(&Quaternion::from_real(t.sinh())));
    ProjectivePoint::interior_from_lift(g.space, lift)
}

/// Reflection of `q` through `p` along their common geodesic, in exact
/// closed form: with the aligned lift `Q̃ = V·α + W`, the symmetric point
/// is `V·2α − Q̃`.
pub fn symmetric_point<S: Scalar>(
    p: &ProjectivePoint<S>,
    q: &ProjectivePoint<S>,
) -> Result<ProjectivePoint<S>, ModelError> {
    if p.same_point(q) {
        return Err(ModelError::CoincidentPoints);
    }
    let space = p.space;
    let v = p.canonical_lift()?;
    let (q_aligned, t) = align_against(&space, &v, q)?;
    let rho = space.norm(&v)?;
    let alpha = t.re / rho;
    let doubled = v.scale_right(&Quaternion::from_real(S::from_int(2) * alpha));
    ProjectivePoint::interior_from_lift(space, doubled.sub(&q_aligned).reduced())
}

/// A pair of lifts rescaled to equal negative norms, with their common norm
/// and cross product. The cross product is real and negative whenever that
/// is rationally achievable (always, on the float backend).
#[derive(Clone, Debug)]
pub struct NormalizedPair<S: Scalar> {
    pub space: HermitianSpace,
    pub p1: HVector<S>,
    pub p2: HVector<S>,
    pub rho: S,
    pub cross: Quaternion<S>,
}

/// Rescale canonical lifts of two distinct interior points so both have the
/// same (negative) norm, preferring a real negative cross product.
pub fn normalize_pair<S: Scalar>(
    p1: &ProjectivePoint<S>,
    p2: &ProjectivePoint<S>,
) -> Result<NormalizedPair<S>, ModelError> {
    if p1.same_point(p2) {
        return Err(ModelError::CoincidentPoints);
    }
    let space = p1.space;
    let mut a = p1.canonical_lift()?;
    let (mut b, _) = align_against(&space, &a, p2)?;

    // Equalize norms: a rational square ratio needs only a real rescale,
    // anything else takes a quaternion norm witness on each side.
    let rho_a = space.norm(&a)?;
    let rho_b = space.norm(&b)?;
    let ratio = rho_a.clone() / rho_b.clone();
    if let Some(s) = ratio.exact_sqrt() {
        b = b.scale_right(&Quaternion::from_real(s));
    } else {
        let mu_a = quaternion_with_norm_sq(&-rho_b.clone())?;
        let mu_b = quaternion_with_norm_sq(&-rho_a.clone())?;
        a = a.scale_right(&mu_a);
        b = b.scale_right(&mu_b);
        // Joint content reduction keeps coordinates small without breaking
        // the equal norms; the square-ratio branch keeps canonical lifts.
        if S::EXACT {
            let mut parts = a.real_coords();
            parts.extend(b.real_coords());
            let f = S::content(&parts);
            let inv = Quaternion::from_real(S::one() / f);
            a = a.scale_right(&inv);
            b = b.scale_right(&inv);
        }
    }

    // Canonical sign: nonpositive real part of the cross product.
    let mut cross = space.herm(&a, &b)?;
    if cross.re.signum_int() > 0 {
        b = b.neg();
        cross = -cross;
    }

    let rho = space.norm(&a)?;
    debug_assert!(space.norm(&b)?.eq_scalar(&rho));
    Ok(NormalizedPair { space, p1: a, p2: b, rho, cross })
}

/// Midpoint of a symmetric pair: `π(P̂₁ + P̂₂)` on equal-norm lifts. The
/// result is exactly equidistant from both inputs.
pub fn midpoint<S: Scalar>(
    p1: &ProjectivePoint<S>,
    p2: &ProjectivePoint<S>,
) -> Result<ProjectivePoint<S>, ModelError> {
    let pair = normalize_pair(p1, p2)?;
    ProjectivePoint::interior_from_lift(pair.space, pair.p1.add(&pair.p2).reduced())
}

/// Kind of a totally geodesic submanifold, derived from the subfield tag.
#[derive(Clone, Debug, PartialEq)]
pub enum SubmanifoldKind {
    /// Real type of subfield dimension k (an ℝ^k-plane for k ≥ 2).
    RealPlane(usize),
    /// Complex type C(a) of complex dimension k.
    ComplexType(usize),
    /// Quaternionic of quaternionic dimension k.
    Quaternionic(usize),
}

/// A totally geodesic submanifold: the projectivization of a nondegenerate,
/// indefinite tagged subspace intersected with hyperbolic space.
#[derive(Clone, Debug)]
pub struct TotallyGeodesicSubmanifold<S: Scalar> {
    pub subspace: Subspace<S>,
}

impl<S: Scalar> TotallyGeodesicSubmanifold<S> {
    pub fn new(subspace: Subspace<S>) -> Result<Self, ModelError> {
        let (pos, neg, null) = subspace.signature()?;
        if null != 0 || neg != 1 || pos == 0 {
            return Err(ModelError::NotHyperbolic(pos, neg, null));
        }
        Ok(TotallyGeodesicSubmanifold { subspace })
    }

    /// Manifold kind and dimension over the tagged subfield.
    pub fn kind(&self) -> SubmanifoldKind {
        let k = self.subspace.dim() - 1;
        match self.subspace.tag {
            SubfieldTag::Real => SubmanifoldKind::RealPlane(k),
            SubfieldTag::ComplexType(_) => SubmanifoldKind::ComplexType(k),
            SubfieldTag::Quaternionic => SubmanifoldKind::Quaternionic(k),
        }
    }

    /// Membership of a point: some lift lands in the tagged right-span.
    pub fn contains(&self, p: &ProjectivePoint<S>) -> bool {
        self.subspace.contains_projective(p.lift())
    }
}

/// The unique quaternionic geodesic through two distinct points: the
/// 2-dimensional right span of their lifts, of signature (1,1).
pub fn quaternionic_span<S: Scalar>(
    p1: &ProjectivePoint<S>,
    p2: &ProjectivePoint<S>,
) -> Result<TotallyGeodesicSubmanifold<S>, ModelError> {
    if p1.same_point(p2) {
        return Err(ModelError::CoincidentPoints);
    }
    let space = p1.space;
    let subspace = Subspace {
        space,
        basis: vec![p1.lift().reduced(), p2.lift().reduced()],
        tag: SubfieldTag::Quaternionic,
    };
    let g = gram(&space, &subspace.basis)?;
    let sig = crate::linalg::signature(&g);
    if sig != (1, 1, 0) {
        return Err(ModelError::NotHyperbolic(sig.0, sig.1, sig.2));
    }
    Ok(TotallyGeodesicSubmanifold { subspace })
}

/// Orthogonal projection of an interior point onto a nondegenerate
/// submanifold whose complement is positive definite (e.g. a quaternionic
/// spine); the image stays interior.
pub fn project_point<S: Scalar>(
    m: &TotallyGeodesicSubmanifold<S>,
    p: &ProjectivePoint<S>,
) -> Result<ProjectivePoint<S>, ModelError> {
    let image = orth_project(&m.subspace, p.lift())?;
    ProjectivePoint::interior_from_lift(p.space, image.reduced())
}
