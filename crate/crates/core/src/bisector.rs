//! Bisectors: equidistant hypersurfaces, their spines, and slices.
//!
//! A bisector B(p₁,p₂) is the set of points with δ(p,p₁) = δ(p,p₂). With
//! lifts rescaled to equal negative norms the membership predicate becomes
//! the purely polynomial `|⟨P,P₁⟩|² = |⟨P,P₂⟩|²`, decided exactly on the
//! rational backend. The quaternionic spine Σ is the span of the defining
//! points, the real spine σ = B ∩ Σ, and the slice through s ∈ σ is the
//! quaternionic hyperplane spanned by s and the complement of Σ.
//!
//! The real spine has a concrete linear model: with equal-norm lifts, the
//! lifts of σ are exactly `P₁μ + P₂ν` with `|μ| = |ν|`, and every such point
//! rescales into the 4-dimensional real span `{P₁α + P₂ᾱ : α ∈ Q}` — the
//! spine frame used for recentering, sampling, and reconstruction.

use thiserror::Error;

use crate::linalg::{
    congruence_diagonalize, quaternion_rank, real_rank, rescale_into_real_span, HVector,
    HermitianSpace, LinAlgError, Mat, SignClass, Subspace, SubfieldTag,
};
use crate::model::{
    midpoint, normalize_pair, project_point, quaternionic_span, ModelError, ProjectivePoint,
    TotallyGeodesicSubmanifold,
};
use crate::quaternion::{Quaternion, QuaternionError};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BisectorError {
    #[error("point does not satisfy the bisector predicate")]
    NotOnBisector,
    #[error("point is not on the real spine")]
    NotOnSpine,
    #[error("spine parametrization requires |μ|² = |ν|²")]
    ParamNormMismatch,
    #[error("degenerate spine frame: {0}")]
    DegenerateFrame(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Quaternion(#[from] QuaternionError),
}

/// An equidistant hypersurface with its normalized defining data.
#[derive(Clone, Debug)]
pub struct Bisector<S: Scalar> {
    pub space: HermitianSpace,
    /// Equal-norm lifts of the defining points.
    pub lift1: HVector<S>,
    pub lift2: HVector<S>,
    /// Common value ⟨Pᵢ,Pᵢ⟩ < 0.
    pub rho: S,
    /// ⟨P₁,P₂⟩; real and negative whenever rationally achievable, and always
    /// with nonpositive real part.
    pub cross: Quaternion<S>,
    /// Quaternionic spine Σ.
    pub spine: TotallyGeodesicSubmanifold<S>,
    /// Default fan center: the equidistant point π(P₁+P₂) on σ.
    pub center: ProjectivePoint<S>,
}

impl<S: Scalar> Bisector<S> {
    /// Bisector of two distinct interior points.
    pub fn new(
        p1: &ProjectivePoint<S>,
        p2: &ProjectivePoint<S>,
    ) -> Result<Self, BisectorError> {
        let pair = normalize_pair(p1, p2)?;
        Self::from_normalized(pair.space, pair.p1, pair.p2)
    }

    /// Bisector of the symmetric pair `π(O ± W·s)` for an orthogonal frame
    /// (⟨O,W⟩ = 0, O negative, W positive). The pair is already normalized:
    /// equal norms and a real negative cross product.
    pub fn from_symmetric_frame(
        space: HermitianSpace,
        o_lift: &HVector<S>,
        w_dir: &HVector<S>,
        scale: &S,
    ) -> Result<Self, BisectorError> {
        let step = w_dir.scale_right(&Quaternion::from_real(scale.clone()));
        let p1 = o_lift.add(&step);
        let p2 = o_lift.sub(&step);
        Self::from_normalized(space, p1, p2)
    }

    fn from_normalized(
        space: HermitianSpace,
        lift1: HVector<S>,
        lift2: HVector<S>,
    ) -> Result<Self, BisectorError> {
        let rho = space.norm(&lift1)?;
        let cross = space.herm(&lift1, &lift2)?;
        debug_assert!(space.norm(&lift2)?.eq_scalar(&rho));
        let p1 = ProjectivePoint::interior_from_lift(space, lift1.clone())?;
        let p2 = ProjectivePoint::interior_from_lift(space, lift2.clone())?;
        let spine = quaternionic_span(&p1, &p2)?;
        let center = midpoint(&p1, &p2)?;
        Ok(Bisector { space, lift1, lift2, rho, cross, spine, center })
    }

    pub fn point1(&self) -> ProjectivePoint<S> {
        ProjectivePoint::interior_from_lift(self.space, self.lift1.clone())
            .expect("defining lift is interior")
    }

    pub fn point2(&self) -> ProjectivePoint<S> {
        ProjectivePoint::interior_from_lift(self.space, self.lift2.clone())
            .expect("defining lift is interior")
    }

    /// The two sides of the membership polynomial
    /// `|⟨P,P₁⟩|²·⟨P₂,P₂⟩ = |⟨P,P₂⟩|²·⟨P₁,P₁⟩` (the common norm cancels).
    fn membership_sides(&self, p: &ProjectivePoint<S>) -> Result<(S, S), BisectorError> {
        let lhs = self.space.herm(p.lift(), &self.lift1)?.norm_sq();
        let rhs = self.space.herm(p.lift(), &self.lift2)?.norm_sq();
        Ok((lhs, rhs))
    }

    /// Exact membership predicate (τ-relative on the float backend).
    pub fn contains(&self, p: &ProjectivePoint<S>) -> Result<bool, BisectorError> {
        if !p.is_interior() {
            return Err(BisectorError::Model(ModelError::NotNegative(p.sign())));
        }
        let (lhs, rhs) = self.membership_sides(p)?;
        Ok(lhs.eq_scalar(&rhs))
    }

    /// Relative residual of the membership identity, for reports.
    pub fn membership_residual(&self, p: &ProjectivePoint<S>) -> Result<f64, BisectorError> {
        let (lhs, rhs) = self.membership_sides(p)?;
        Ok(crate::scalar::relative_residual(lhs.to_f64(), rhs.to_f64()))
    }

    /// Membership in the real spine σ = B ∩ Σ.
    pub fn real_spine_contains(&self, p: &ProjectivePoint<S>) -> Result<bool, BisectorError> {
        Ok(self.contains(p)? && self.spine.contains(p))
    }

    /// The spine parametrization `π(P₁μ + P₂ν)`; on equal-norm lifts the
    /// result lies on σ exactly when `|μ|² = |ν|²`.
    pub fn spine_point(
        &self,
        mu: &Quaternion<S>,
        nu: &Quaternion<S>,
    ) -> Result<ProjectivePoint<S>, BisectorError> {
        if !mu.norm_sq().eq_scalar(&nu.norm_sq()) {
            return Err(BisectorError::ParamNormMismatch);
        }
        let lift = self.lift1.scale_right(mu).add(&self.lift2.scale_right(nu));
        Ok(ProjectivePoint::interior_from_lift(self.space, lift.reduced())?)
    }

    /// Orthogonal projection Π_Σ onto the quaternionic spine.
    pub fn project_to_spine(
        &self,
        p: &ProjectivePoint<S>,
    ) -> Result<ProjectivePoint<S>, BisectorError> {
        Ok(project_point(&self.spine, p)?)
    }

    /// Real-linear frame of the σ-lift space `{P₁α + P₂ᾱ}`: four vectors
    /// whose real span covers every lift class of the real spine.
    pub fn sigma_frame(&self) -> [HVector<S>; 4] {
        let build = |alpha: Quaternion<S>| {
            self.lift1
                .scale_right(&alpha)
                .add(&self.lift2.scale_right(&alpha.conj()))
                .reduced()
        };
        [
            build(Quaternion::one()),
            build(Quaternion::i()),
            build(Quaternion::j()),
            build(Quaternion::k()),
        ]
    }

    /// A lift of a σ-point landed inside the σ-frame real span.
    pub fn canonical_sigma_lift(
        &self,
        o: &ProjectivePoint<S>,
    ) -> Result<HVector<S>, BisectorError> {
        if !self.real_spine_contains(o)? {
            return Err(BisectorError::NotOnSpine);
        }
        let frame = self.sigma_frame();
        let lambda = rescale_into_real_span(&frame, o.lift())
            .ok_or(BisectorError::NotOnSpine)?;
        Ok(o.lift().scale_right(&lambda).reduced())
    }

    /// The geodesic direction through a σ-point orthogonal to the real
    /// spine, inside Σ: the unique (up to real scale) solution of
    /// `W ∈ Σ`, `⟨O,W⟩ = 0`, `Re⟨F,W⟩ = 0` for the σ-frame F.
    pub fn recentered_frame(
        &self,
        o: &ProjectivePoint<S>,
    ) -> Result<(HVector<S>, HVector<S>), BisectorError> {
        let o_lift = self.canonical_sigma_lift(o)?;
        let frame = self.sigma_frame();
        let w = spine_orthogonal_direction(
            &self.space,
            &frame,
            (&self.lift1, &self.lift2),
            &o_lift,
        )?;
        Ok((o_lift, w))
    }

    /// A symmetric defining pair for the same bisector recentered at `o`:
    /// `π(O ± W·s)` with s small enough to stay interior.
    pub fn recentered_pair(
        &self,
        o: &ProjectivePoint<S>,
    ) -> Result<Bisector<S>, BisectorError> {
        let (o_lift, w) = self.recentered_frame(o)?;
        let s = interior_step(&self.space, &o_lift, &w)?;
        Bisector::from_symmetric_frame(self.space, &o_lift, &w, &s)
    }

    /// The slice through a point s of the real spine: the quaternionic
    /// hyperplane `span{S} ⊕ Σ⊥`, of signature (n−1, 1).
    pub fn slice_at(&self, s: &ProjectivePoint<S>) -> Result<Slice<S>, BisectorError> {
        if !self.real_spine_contains(s)? {
            return Err(BisectorError::NotOnSpine);
        }
        let complement = crate::linalg::orth_complement(&self.spine.subspace)?;
        let mut basis = vec![s.lift().reduced()];
        basis.extend(complement.basis);
        let subspace = Subspace { space: self.space, basis, tag: SubfieldTag::Quaternionic };
        let (pos, neg, null) = subspace.signature()?;
        debug_assert!(neg == 1 && null == 0 && pos == self.space.n - 1);
        Ok(Slice { at: s.clone(), subspace })
    }

    /// The slice through a bisector point: `slice_at(Π_Σ(p))`.
    pub fn slice_of(&self, p: &ProjectivePoint<S>) -> Result<Slice<S>, BisectorError> {
        if !self.contains(p)? {
            return Err(BisectorError::NotOnBisector);
        }
        let s = self.project_to_spine(p)?;
        self.slice_at(&s)
    }

    /// Equality of bisectors as point sets, certified structurally: the
    /// quaternionic spines agree as subspaces and the defining points of
    /// one satisfy the membership predicate of the other is implied; the
    /// full sampled agreement lives in the property suites.
    pub fn same_spine(&self, other: &Bisector<S>) -> bool {
        self.spine.subspace.same_set(&other.spine.subspace)
    }
}

/// A Mostow slice: the fiber of Π_Σ over a spine point.
#[derive(Clone, Debug)]
pub struct Slice<S: Scalar> {
    pub at: ProjectivePoint<S>,
    pub subspace: Subspace<S>,
}

impl<S: Scalar> Slice<S> {
    /// The slices through distinct spine points are ultraparallel: their
    /// subspaces meet exactly in the positive-definite complement of Σ, so
    /// no interior point is shared.
    pub fn disjoint_from(&self, other: &Slice<S>) -> Result<bool, BisectorError> {
        let meet = crate::linalg::real_span_intersection(
            &self.subspace.real_span_generators(),
            &other.subspace.real_span_generators(),
        );
        if meet.is_empty() {
            return Ok(true);
        }
        // On a real span the quadratic form is the real part of the Gram:
        // positive definite there means no shared interior or null points.
        let space = self.subspace.space;
        let m = meet.len();
        let mut re_gram = Mat::zero(m, m);
        for r in 0..m {
            for c in 0..m {
                let entry = space.herm(&meet[r], &meet[c])?;
                *re_gram.at_mut(r, c) = Quaternion::from_real(entry.re);
            }
        }
        let (_, neg, null) = crate::linalg::signature(&re_gram);
        Ok(neg == 0 && null == 0)
    }
}

/// Hermitian triple product `⟨P,Q⟩⟨Q,R⟩⟨R,P⟩` on canonical lifts (last
/// coordinate 1). Real exactly for the projection configurations
/// (p, Π_Σ(p), r ∈ Σ); generic triples are not real.
pub fn hermitian_triple<S: Scalar>(
    p: &ProjectivePoint<S>,
    q: &ProjectivePoint<S>,
    r: &ProjectivePoint<S>,
) -> Result<Quaternion<S>, BisectorError> {
    let space = p.space;
    let pl = p.canonical_lift()?;
    let ql = q.canonical_lift()?;
    let rl = r.canonical_lift()?;
    let pq = space.herm(&pl, &ql)?;
    let qr = space.herm(&ql, &rl)?;
    let rp = space.herm(&rl, &pl)?;
    Ok(&(&pq * &qr) * &rp)
}

/// Smallest power-of-two step `s = 1/2^m` with `π(O ± W·s)` interior.
fn interior_step<S: Scalar>(
    space: &HermitianSpace,
    o_lift: &HVector<S>,
    w_dir: &HVector<S>,
) -> Result<S, BisectorError> {
    let rho = space.norm(o_lift)?;
    let omega = space.norm(w_dir)?;
    let mut s = S::one();
    let half = S::from_ratio(1, 2);
    for _ in 0..128 {
        let val = rho.clone() + s.clone() * s.clone() * omega.clone();
        if val.signum_int() < 0 {
            return Ok(s);
        }
        s = s * half.clone();
    }
    Err(BisectorError::DegenerateFrame("no interior symmetric pair".into()))
}

/// Direction of the geodesic through `o` orthogonal to the real spine,
/// inside the quaternionic spine: solves `W = b₁u + b₂v` subject to
/// `Re⟨F_r, W⟩ = 0` for every σ-frame vector and `⟨O, W⟩ = 0`.
fn spine_orthogonal_direction<S: Scalar>(
    space: &HermitianSpace,
    sigma_frame: &[HVector<S>],
    span: (&HVector<S>, &HVector<S>),
    o_lift: &HVector<S>,
) -> Result<HVector<S>, BisectorError> {
    let (b1, b2) = span;
    // Unknowns: the 8 real coordinates of (u, v).
    let mut rows: Vec<Vec<S>> = Vec::new();
    let herm_pair = |target: &HVector<S>| -> Result<(Quaternion<S>, Quaternion<S>), BisectorError> {
        Ok((space.herm(target, b1)?, space.herm(target, b2)?))
    };
    // Re⟨F_r, b₁u + b₂v⟩ = 0: one real row each.
    for f in sigma_frame {
        let (c1, c2) = herm_pair(f)?;
        let mut row = Vec::with_capacity(8);
        row.extend(re_of_product_row(&c1));
        row.extend(re_of_product_row(&c2));
        rows.push(row);
    }
    // ⟨O, b₁u + b₂v⟩ = 0: four real rows.
    let (c1, c2) = herm_pair(o_lift)?;
    let l1 = left_mult_rows(&c1);
    let l2 = left_mult_rows(&c2);
    for idx in 0..4 {
        let mut row = Vec::with_capacity(8);
        row.extend(l1[idx].clone());
        row.extend(l2[idx].clone());
        rows.push(row);
    }
    // Kernel over the reals.
    let kernel = crate::linalg::RMat::from_rows(rows).kernel();
    if kernel.len() != 1 {
        return Err(BisectorError::DegenerateFrame(format!(
            "orthogonal direction space has dimension {}",
            kernel.len()
        )));
    }
    let coeffs = &kernel[0];
    let u = Quaternion::new(coeffs[0].clone(), coeffs[1].clone(), coeffs[2].clone(), coeffs[3].clone());
    let v = Quaternion::new(coeffs[4].clone(), coeffs[5].clone(), coeffs[6].clone(), coeffs[7].clone());
    let w = b1.scale_right(&u).add(&b2.scale_right(&v)).reduced();
    if space.classify(&w)? != SignClass::Positive {
        return Err(BisectorError::DegenerateFrame("orthogonal direction is not positive".into()));
    }
    Ok(w)
}

/// Row of `u ↦ Re(c·u)` against the real coordinates of u.
fn re_of_product_row<S: Scalar>(c: &Quaternion<S>) -> [S; 4] {
    [c.re.clone(), -c.x.clone(), -c.y.clone(), -c.z.clone()]
}

/// Rows of the left multiplication `u ↦ c·u` against real coordinates.
fn left_mult_rows<S: Scalar>(c: &Quaternion<S>) -> [[S; 4]; 4] {
    let (c0, c1, c2, c3) = (c.re.clone(), c.x.clone(), c.y.clone(), c.z.clone());
    [
        [c0.clone(), -c1.clone(), -c2.clone(), -c3.clone()],
        [c1.clone(), c0.clone(), -c3.clone(), c2.clone()],
        [c2.clone(), c3.clone(), c0.clone(), -c1.clone()],
        [c3, -c2, c1, c0],
    ]
}

/// Rebuild a bisector from a frame of its real spine: lifts whose real span
/// is the 4-dimensional σ-lift space inside a quaternionic line.
///
/// Requirements: right-quaternionic rank 2, real rank 4, and the real part
/// of the form restricted to the span has signature (3,1). The construction
/// picks a negative vector O in the span, solves for the orthogonal
/// geodesic direction W, and returns the bisector of a symmetric pair.
pub fn bisector_from_real_spine<S: Scalar>(
    space: &HermitianSpace,
    frame: &[HVector<S>],
) -> Result<Bisector<S>, BisectorError> {
    if quaternion_rank(frame) != 2 {
        return Err(BisectorError::DegenerateFrame(format!(
            "quaternionic span has rank {}, expected the spanning line (rank 2)",
            quaternion_rank(frame)
        )));
    }
    if real_rank(frame) != 4 {
        return Err(BisectorError::DegenerateFrame(format!(
            "real rank {} frame cannot span a real spine (need 4)",
            real_rank(frame)
        )));
    }
    // Real part of the form on the frame: Re⟨f_r, f_s⟩, a real symmetric
    // Gram; its congruence diagonalization locates a negative combination.
    let m = frame.len();
    let mut re_gram = Mat::zero(m, m);
    for r in 0..m {
        for c in 0..m {
            let entry = space.herm(&frame[r], &frame[c])?;
            *re_gram.at_mut(r, c) = Quaternion::from_real(entry.re);
        }
    }
    let (trans, diag) = congruence_diagonalize(&re_gram);
    let negatives = diag.iter().filter(|d| d.signum_int() < 0).count();
    let positives = diag.iter().filter(|d| d.signum_int() > 0).count();
    if negatives != 1 || positives != 3 {
        return Err(BisectorError::DegenerateFrame(format!(
            "real-part signature ({positives}, {negatives}) is not (3, 1)"
        )));
    }
    let neg_idx = diag
        .iter()
        .position(|d| d.signum_int() < 0)
        .expect("one negative entry");
    let mut o_lift = HVector::zero(space.dim());
    for r in 0..m {
        let coeff = trans.at(r, neg_idx).re.clone();
        o_lift = o_lift.add(&frame[r].scale_right(&Quaternion::from_real(coeff)));
    }
    let o_lift = o_lift.reduced();
    debug_assert_eq!(space.classify(&o_lift)?, SignClass::Negative);

    // Two quaternionically independent frame vectors span the line Σ.
    let mut b1 = frame[0].clone();
    let mut b2 = frame[1].clone();
    for candidate in frame.iter().skip(1) {
        if quaternion_rank(&[b1.clone(), candidate.clone()]) == 2 {
            b2 = candidate.clone();
            break;
        }
    }
    if quaternion_rank(&[b1.clone(), b2.clone()]) != 2 {
        b1 = frame[m - 1].clone();
    }

    let w = spine_orthogonal_direction(space, frame, (&b1, &b2), &o_lift)?;
    let s = interior_step(space, &o_lift, &w)?;
    let b = Bisector::from_symmetric_frame(*space, &o_lift, &w, &s)?;

    // The rebuilt σ-frame must span the same real 4-space as the input.
    let rebuilt = b.sigma_frame();
    let mut all: Vec<HVector<S>> = frame.to_vec();
    all.extend(rebuilt.iter().cloned());
    if real_rank(&all) != 4 {
        return Err(BisectorError::DegenerateFrame(
            "frame is not the spine of a bisector".into(),
        ));
    }
    Ok(b)
}
