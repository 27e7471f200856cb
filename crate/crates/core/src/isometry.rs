//! The group Sp(n,1) acting on quaternionic hyperbolic space.
//!
//! Matrices act on lifts from the left and commute with right scalars, so
//! they descend to projective space. Membership is the exact identity
//! `g*Jg = J`; reflections built from non-unit imaginary directions satisfy
//! the conformal variant `g*Jg = c·J` with `c > 0` real, which still
//! preserves δ and sign classes, and all involution and commutation checks
//! are made modulo the center {±E} together with positive real scalings.

use thiserror::Error;

use crate::linalg::{
    gram, orth_complement, orth_project, HVector, HermitianSpace, LinAlgError, Mat, Subspace,
    SubfieldTag,
};
use crate::model::{ModelError, ProjectivePoint, TotallyGeodesicSubmanifold};
use crate::quaternion::{quaternion_with_norm_sq, ImaginaryDirection, Quaternion, QuaternionError};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IsometryError {
    #[error("matrix does not preserve the Hermitian form")]
    NotSymplectic,
    #[error("left multiplication requires |a|² = 1, got {0}")]
    NotUnit(String),
    #[error("Gram matrices of the two frames differ")]
    GramMismatch,
    #[error("frames are not bases of the same rank")]
    FrameRank,
    #[error("reflection data does not match its fixed set")]
    FixedSetMismatch,
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Quaternion(#[from] QuaternionError),
}

/// An element of Sp(n,1) (or a positive real multiple of one).
#[derive(Clone, Debug)]
pub struct Isometry<S: Scalar> {
    pub space: HermitianSpace,
    pub mat: Mat<S>,
}

impl<S: Scalar> Isometry<S> {
    pub fn new(space: HermitianSpace, mat: Mat<S>) -> Self {
        assert_eq!(mat.rows, space.dim());
        assert_eq!(mat.cols, space.dim());
        Isometry { space, mat }
    }

    pub fn identity(space: HermitianSpace) -> Self {
        Isometry::new(space, Mat::identity(space.dim()))
    }

    fn form_matrix(&self) -> Mat<S> {
        let dim = self.space.dim();
        let mut j = Mat::identity(dim);
        *j.at_mut(dim - 1, dim - 1) = -Quaternion::<S>::one();
        j
    }

    /// Exact membership in U(n,1;Q) = Sp(n,1): `g*Jg = J`.
    pub fn verify(&self) -> bool {
        self.conformal_factor()
            .map(|c| c.eq_scalar(&S::one()))
            .unwrap_or(false)
    }

    /// The positive real `c` with `g*Jg = c·J`, when one exists. Such maps
    /// preserve δ, sign classes, and orthogonality, hence act as isometries
    /// projectively.
    pub fn conformal_factor(&self) -> Option<S> {
        let j = self.form_matrix();
        let lhs = self.mat.conj_transpose().mul(&j).mul(&self.mat);
        let c = lhs.at(0, 0).re.clone();
        if c.signum_int() <= 0 {
            return None;
        }
        let scaled = Mat::scalar(self.space.dim(), &Quaternion::from_real(c.clone()));
        let cj = scaled.mul(&j);
        lhs.eq_mat(&cj).then_some(c)
    }

    /// Apply to a point. Errors when the matrix is not (conformally)
    /// symplectic; the image keeps the sign class of the input.
    pub fn apply(&self, p: &ProjectivePoint<S>) -> Result<ProjectivePoint<S>, IsometryError> {
        if self.conformal_factor().is_none() {
            return Err(IsometryError::NotSymplectic);
        }
        let image = self.mat.mul_vec(p.lift()).reduced();
        Ok(ProjectivePoint::from_lift(self.space, image)?)
    }

    pub fn apply_vector(&self, v: &HVector<S>) -> HVector<S> {
        self.mat.mul_vec(v)
    }

    pub fn compose(&self, other: &Self) -> Self {
        Isometry::new(self.space, self.mat.mul(&other.mat))
    }

    /// Divide all entries by their common content. Projectively the same
    /// map (the conformal factor rescales by a positive square), with far
    /// smaller exact coordinates.
    pub fn reduced(&self) -> Self {
        let mut parts = Vec::new();
        for r in 0..self.mat.rows {
            for c in 0..self.mat.cols {
                parts.extend(self.mat.at(r, c).coords());
            }
        }
        let f = S::content(&parts);
        let inv = S::one() / f;
        let mut mat = self.mat.clone();
        for r in 0..mat.rows {
            for c in 0..mat.cols {
                *mat.at_mut(r, c) = mat.at(r, c).scale(&inv);
            }
        }
        Isometry::new(self.space, mat)
    }

    pub fn inverse(&self) -> Result<Self, IsometryError> {
        Ok(Isometry::new(self.space, self.mat.inverse()?))
    }

    /// Projective equality modulo the center and positive real scalars:
    /// `self = other·(r·E)` for some real r ≠ 0.
    pub fn same_projective(&self, other: &Self) -> bool {
        proportional_by_real(&self.mat, &other.mat)
    }

    /// `g² = r·E` for some real r ≠ 0 (a projective involution).
    pub fn is_projective_involution(&self) -> bool {
        let sq = self.mat.mul(&self.mat);
        proportional_by_real(&sq, &Mat::identity(self.space.dim()))
    }

    /// Commutation modulo center and positive reals: `gh = r·hg`.
    pub fn commutes_projectively(&self, other: &Self) -> bool {
        let gh = self.mat.mul(&other.mat);
        let hg = other.mat.mul(&self.mat);
        proportional_by_real(&gh, &hg)
    }
}

/// `a = r·b` entrywise for a single real r ≠ 0.
fn proportional_by_real<S: Scalar>(a: &Mat<S>, b: &Mat<S>) -> bool {
    if a.rows != b.rows || a.cols != b.cols {
        return false;
    }
    // Find the reference entry of b with the largest norm.
    let mut best: Option<(usize, usize)> = None;
    let mut best_norm = S::zero();
    for r in 0..b.rows {
        for c in 0..b.cols {
            let n = b.at(r, c).norm_sq();
            if n > best_norm {
                best_norm = n;
                best = Some((r, c));
            }
        }
    }
    let Some((r0, c0)) = best else {
        return a.eq_mat(b);
    };
    // r = (b̄/|b|²·a) at the reference entry must be real and nonzero.
    let ratio = &b.at(r0, c0).conj().scale(&(S::one() / best_norm)) * a.at(r0, c0);
    if !ratio.im_norm_sq().is_zero() || ratio.re.is_zero() {
        return false;
    }
    let scaled = Mat::scalar(b.rows, &Quaternion::from_real(ratio.re.clone()));
    a.eq_mat(&scaled.mul(b).clone())
}

/// The left multiplication `v ↦ a·v` as a matrix `a·E`; lies in Sp(n,1)
/// exactly when `|a|² = 1`.
pub fn left_mult<S: Scalar>(
    space: HermitianSpace,
    a: &Quaternion<S>,
) -> Result<Isometry<S>, IsometryError> {
    if !a.norm_sq().eq_scalar(&S::one()) {
        return Err(IsometryError::NotUnit(a.norm_sq().to_string()));
    }
    Ok(Isometry::new(space, Mat::scalar(space.dim(), a)))
}

/// A geodesic reflection with its fixed-set descriptor.
#[derive(Clone, Debug)]
pub struct Reflection<S: Scalar> {
    pub isometry: Isometry<S>,
    pub fixed_set: TotallyGeodesicSubmanifold<S>,
}

impl<S: Scalar> Reflection<S> {
    /// Structural checks: conformally symplectic, projective involution,
    /// and the descriptor basis is fixed pointwise (as projective points).
    pub fn validate(&self) -> Result<(), IsometryError> {
        if self.isometry.conformal_factor().is_none() {
            return Err(IsometryError::NotSymplectic);
        }
        if !self.isometry.is_projective_involution() {
            return Err(IsometryError::FixedSetMismatch);
        }
        for b in &self.fixed_set.subspace.basis {
            let image = self.isometry.apply_vector(b);
            if crate::linalg::quaternion_rank(&[b.clone(), image]) != 1 {
                return Err(IsometryError::FixedSetMismatch);
            }
        }
        Ok(())
    }
}

/// Reflection in a nondegenerate quaternionic subspace:
/// `v = v_W + v_⊥ ↦ v_W − v_⊥`, an exact involution in Sp(n,1).
pub fn reflection_in_quaternionic<S: Scalar>(
    w: &Subspace<S>,
) -> Result<Reflection<S>, IsometryError> {
    let space = w.space;
    let dim = space.dim();
    let mut mat = Mat::zero(dim, dim);
    for idx in 0..dim {
        let e = space.basis_vector::<S>(idx);
        let projected = orth_project(w, &e)?;
        let reflected = projected.scale_right(&Quaternion::from_int(2)).sub(&e);
        for r in 0..dim {
            *mat.at_mut(r, idx) = reflected.coords[r].clone();
        }
    }
    let isometry = Isometry::new(space, mat);
    let fixed_set = TotallyGeodesicSubmanifold::new(w.clone())?;
    let refl = Reflection { isometry, fixed_set };
    refl.validate()?;
    Ok(refl)
}

/// Reflection in a maximal complex-type submanifold, by frame conjugation.
///
/// For a full frame `h` (columns spanning Q^{n,1}) whose Gram entries all lie
/// in C(a), the matrix `h·(a·E)·h⁻¹` fixes exactly the C(a)-span of the
/// frame and satisfies `g*Jg = |a|²·J`: the real-Gram condition is what makes
/// the conjugation conformally symplectic.
pub fn reflection_in_complex_type<S: Scalar>(
    n_sub: &TotallyGeodesicSubmanifold<S>,
) -> Result<Reflection<S>, IsometryError> {
    let SubfieldTag::ComplexType(a) = &n_sub.subspace.tag else {
        return Err(IsometryError::FixedSetMismatch);
    };
    let space = n_sub.subspace.space;
    if n_sub.subspace.dim() != space.dim() {
        // Only maximal complex-type submanifolds are reflective this way.
        return Err(IsometryError::FrameRank);
    }
    let h = Mat::from_columns(&n_sub.subspace.basis);
    let h_inv = h.inverse()?;
    let scalar = Mat::scalar(space.dim(), a.as_quaternion());
    let mat = h.mul(&scalar).mul(&h_inv);
    let isometry = Isometry::new(space, mat).reduced();
    let refl = Reflection { isometry, fixed_set: n_sub.clone() };
    refl.validate()?;
    Ok(refl)
}

/// Extends matching frames to an isometry: given tuples with equal Gram
/// matrices, returns `g ∈ Sp(n,1)` with `g·B1ᵣ = B2ᵣ`.
///
/// Both frames are completed by orthogonal complements; the complements are
/// orthogonalized and rescaled by quaternion norm witnesses so their Grams
/// agree exactly, and then `g = F₂·F₁⁻¹`.
pub fn frame_transport<S: Scalar>(
    space: &HermitianSpace,
    b1: &[HVector<S>],
    b2: &[HVector<S>],
) -> Result<Isometry<S>, IsometryError> {
    if b1.len() != b2.len() {
        return Err(IsometryError::FrameRank);
    }
    let g1 = gram(space, b1)?;
    let g2 = gram(space, b2)?;
    if !g1.eq_mat(&g2) {
        return Err(IsometryError::GramMismatch);
    }
    if crate::linalg::quaternion_rank(b1) != b1.len()
        || crate::linalg::quaternion_rank(b2) != b2.len()
    {
        return Err(IsometryError::FrameRank);
    }

    let mut f1 = b1.to_vec();
    let mut f2 = b2.to_vec();
    if b1.len() < space.dim() {
        let c1 = completion_frame(space, b1)?;
        let c2 = completion_frame(space, b2)?;
        // Rescale the second completion so the two diagonal Grams agree.
        for (u1, u2) in c1.iter().zip(&c2) {
            let d1 = space.norm(u1)?;
            let d2 = space.norm(u2)?;
            let ratio = d1.clone() / d2.clone();
            let adjusted = if let Some(s) = ratio.exact_sqrt() {
                u2.scale_right(&Quaternion::from_real(s))
            } else {
                let mu = quaternion_with_norm_sq(&ratio)?;
                u2.scale_right(&mu)
            };
            f1.push(u1.clone());
            f2.push(adjusted);
        }
    }
    let m1 = Mat::from_columns(&f1);
    let m2 = Mat::from_columns(&f2);
    let g = m2.mul(&m1.inverse()?);
    let iso = Isometry::new(*space, g);
    if !iso.verify() {
        return Err(IsometryError::NotSymplectic);
    }
    Ok(iso)
}

/// Orthogonalized basis of the complement of `basis`, positive diagonal Gram.
fn completion_frame<S: Scalar>(
    space: &HermitianSpace,
    basis: &[HVector<S>],
) -> Result<Vec<HVector<S>>, IsometryError> {
    let sub = Subspace { space: *space, basis: basis.to_vec(), tag: SubfieldTag::Quaternionic };
    let comp = orth_complement(&sub)?;
    // Gram–Schmidt over the quaternions (complement of a hyperbolic frame is
    // positive definite, so the diagonal never vanishes).
    let mut ortho: Vec<HVector<S>> = Vec::with_capacity(comp.basis.len());
    for v in &comp.basis {
        let mut u = v.clone();
        for w in &ortho {
            let coeff = space.herm(w, &u)?;
            let d = space.norm(w)?;
            u = u.sub(&w.scale_right(&coeff.scale(&(S::one() / d))));
        }
        ortho.push(u.reduced());
    }
    Ok(ortho)
}

/// Block-form predicate for the stabilizer of a totally geodesic submanifold
/// in standard position: coordinates ordered so the submanifold occupies the
/// leading block (including the negative direction).
///
/// Checks: `g` symplectic, off-diagonal blocks zero, the leading block of
/// the shape `A·λ` with `A` over the subfield and `λ` normalizing it, and
/// the trailing block unitary. `leading` counts the leading coordinates.
pub fn stabilizer_block_check<S: Scalar>(
    g: &Isometry<S>,
    leading: usize,
    tag: &SubfieldTag<S>,
) -> bool {
    if !g.verify() {
        return false;
    }
    let dim = g.space.dim();
    let mat = permute_to_standard(g);
    // Off-diagonal blocks vanish.
    for r in 0..dim {
        for c in 0..dim {
            let in_leading_r = r < leading;
            let in_leading_c = c < leading;
            if in_leading_r != in_leading_c && !mat.at(r, c).is_zero() {
                return false;
            }
        }
    }
    // Leading block T = A·λ: all pairwise left ratios lie in the subfield,
    // and the reference entry normalizes it.
    let mut reference: Option<Quaternion<S>> = None;
    let mut ref_norm = S::zero();
    for r in 0..leading {
        for c in 0..leading {
            let n = mat.at(r, c).norm_sq();
            if n > ref_norm {
                ref_norm = n;
                reference = Some(mat.at(r, c).clone());
            }
        }
    }
    let Some(t0) = reference else { return false };
    let t0_inv = t0.inverse().expect("reference entry nonzero");
    for r in 0..leading {
        for c in 0..leading {
            let ratio = mat.at(r, c) * &t0_inv;
            if !tag.admits(&ratio) {
                return false;
            }
        }
    }
    // t0 ∈ F·N⁺(F, Q): conjugation by t0 maps the subfield to itself.
    match tag {
        SubfieldTag::Quaternionic | SubfieldTag::Real => {}
        SubfieldTag::ComplexType(a) => {
            let conj = &(&t0 * a.as_quaternion()) * &t0_inv;
            // Must be ±a up to the positive factor |t0|² of the sandwich.
            let aligned = ImaginaryDirection::new(conj.clone())
                .map(|d| d.same_direction(a) || d.same_direction(&ImaginaryDirection::new(-a.as_quaternion().clone()).unwrap()))
                .unwrap_or(false);
            if !aligned {
                return false;
            }
        }
    }
    true
}

/// Shape predicate of the real-spine stabilizer block: the leading 2×2 block
/// is `[[a, b], [−εb, εa]]` for ε = ±1, the rest block-diagonal unitary.
pub fn real_spine_block_check<S: Scalar>(g: &Isometry<S>) -> bool {
    if !g.verify() {
        return false;
    }
    let dim = g.space.dim();
    let mat = permute_to_standard(g);
    for r in 0..dim {
        for c in 0..dim {
            if (r < 2) != (c < 2) && !mat.at(r, c).is_zero() {
                return false;
            }
        }
    }
    let a = mat.at(0, 0);
    let b = mat.at(0, 1);
    for eps in [S::one(), -S::one()] {
        let lower_left_ok = mat.at(1, 0).eq_q(&-b.scale(&eps));
        let lower_right_ok = mat.at(1, 1).eq_q(&a.scale(&eps));
        if lower_left_ok && lower_right_ok {
            return true;
        }
    }
    false
}

/// Reorder coordinates so the block structure pairs the first spatial
/// coordinates with the negative direction: (x₁, …, x_m, x_{n+1} | rest)
/// becomes the leading block. The permutation conjugation keeps the form
/// diagonal with the −1 moved into the leading block.
fn permute_to_standard<S: Scalar>(g: &Isometry<S>) -> Mat<S> {
    // The callers' standard position places the submanifold block first and
    // the negative coordinate second; for the form J = diag(1,…,1,−1) used
    // throughout, the natural adapted order is (x₁, x_{n+1}, x₂, …, xₙ) for
    // the quaternionic-line cases exercised here.
    let dim = g.space.dim();
    let mut order: Vec<usize> = Vec::with_capacity(dim);
    order.push(0);
    order.push(dim - 1);
    for idx in 1..dim - 1 {
        order.push(idx);
    }
    let mut out = Mat::zero(dim, dim);
    for (r_new, &r_old) in order.iter().enumerate() {
        for (c_new, &c_old) in order.iter().enumerate() {
            *out.at_mut(r_new, c_new) = g.mat.at(r_old, c_old).clone();
        }
    }
    out
}
