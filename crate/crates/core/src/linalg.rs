//! Right-module linear algebra over the quaternions with the indefinite
//! Hermitian form of signature (n,1).
//!
//! Vectors live in Q^{n,1}, a *right* module: scalars multiply coordinates on
//! the right, matrices act on the left. All elimination routines stick to
//! left row operations, so noncommutativity errors are impossible to express.
//! The form is `⟨v,w⟩ = v̄₁w₁ + … + v̄ₙwₙ − v̄ₙ₊₁wₙ₊₁`; signatures are
//! computed by congruence elimination with real diagonal pivots, never by
//! eigenvalues, so everything stays rational on the exact backend.

use std::fmt;

use thiserror::Error;

use crate::quaternion::{ImaginaryDirection, Quaternion, QuaternionError};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinAlgError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("zero vector has no sign class")]
    ZeroVector,
    #[error("rank-deficient system: echelon rank {rank}")]
    RankDeficient { rank: usize },
    #[error("degenerate subspace: Gram matrix is singular")]
    DegenerateSubspace,
    #[error("representatives not aligned: Gram entry {0} outside the tagged subfield")]
    NotInSubfield(String),
    #[error(transparent)]
    Quaternion(#[from] QuaternionError),
}

/// Sign class of a vector under the Hermitian form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignClass {
    Negative,
    Null,
    Positive,
}

/// The ambient space Q^{n,1}: dimension n+1 with form matrix
/// J = diag(1, …, 1, −1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermitianSpace {
    pub n: usize,
}

impl HermitianSpace {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "hyperbolic dimension must be positive");
        HermitianSpace { n }
    }

    /// Ambient (module) dimension n+1.
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Diagonal form entry: +1 except −1 in the last slot.
    fn j_sign(&self, idx: usize) -> i8 {
        if idx + 1 == self.dim() {
            -1
        } else {
            1
        }
    }

    pub fn basis_vector<S: Scalar>(&self, idx: usize) -> HVector<S> {
        assert!(idx < self.dim());
        let mut coords = vec![Quaternion::zero(); self.dim()];
        coords[idx] = Quaternion::one();
        HVector { coords }
    }

    /// The Hermitian form `⟨v,w⟩`.
    pub fn herm<S: Scalar>(
        &self,
        v: &HVector<S>,
        w: &HVector<S>,
    ) -> Result<Quaternion<S>, LinAlgError> {
        if v.dim() != self.dim() || w.dim() != self.dim() {
            return Err(LinAlgError::DimensionMismatch(v.dim(), w.dim()));
        }
        let mut acc = Quaternion::zero();
        for idx in 0..self.dim() {
            let term = &v.coords[idx].conj() * &w.coords[idx];
            acc = if self.j_sign(idx) > 0 { acc + term } else { acc - term };
        }
        Ok(acc)
    }

    /// `⟨v,v⟩` as a scalar (it is always real).
    pub fn norm<S: Scalar>(&self, v: &HVector<S>) -> Result<S, LinAlgError> {
        Ok(self.herm(v, v)?.re)
    }

    /// Sign classification of a nonzero vector. On the float backend a value
    /// with `|⟨v,v⟩| ≤ τ·‖v‖²` reports Null, where ‖v‖² is the positive
    /// coordinate norm.
    pub fn classify<S: Scalar>(&self, v: &HVector<S>) -> Result<SignClass, LinAlgError> {
        if v.dim() != self.dim() {
            return Err(LinAlgError::DimensionMismatch(v.dim(), self.dim()));
        }
        let mut pos_norm = S::zero();
        for c in &v.coords {
            pos_norm = pos_norm + c.norm_sq();
        }
        if pos_norm.is_zero() {
            return Err(LinAlgError::ZeroVector);
        }
        let val = self.norm(v)?;
        if S::EXACT {
            Ok(match val.signum_int() {
                0 => SignClass::Null,
                s if s < 0 => SignClass::Negative,
                _ => SignClass::Positive,
            })
        } else {
            let floor = S::pivot_floor(&pos_norm);
            if val.abs() <= floor {
                Ok(SignClass::Null)
            } else if val.signum_int() < 0 {
                Ok(SignClass::Negative)
            } else {
                Ok(SignClass::Positive)
            }
        }
    }
}

/// A coordinate vector in Q^{n,1} with right-module semantics.
#[derive(Clone, PartialEq)]
pub struct HVector<S> {
    pub coords: Vec<Quaternion<S>>,
}

impl<S: Scalar> HVector<S> {
    pub fn new(coords: Vec<Quaternion<S>>) -> Self {
        HVector { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn zero(dim: usize) -> Self {
        HVector { coords: vec![Quaternion::zero(); dim] }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Quaternion::is_zero)
    }

    /// Right scalar multiplication `v·λ`.
    pub fn scale_right(&self, lambda: &Quaternion<S>) -> Self {
        HVector { coords: self.coords.iter().map(|c| c * lambda).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        HVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        HVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        HVector { coords: self.coords.iter().map(|c| -c).collect() }
    }

    pub fn eq_vec(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self.coords.iter().zip(&other.coords).all(|(a, b)| a.eq_q(b))
    }

    /// Divide out the rational content so coordinates stay small across long
    /// exact constructions. No-op on the float backend.
    pub fn reduced(&self) -> Self {
        if !S::EXACT || self.is_zero() {
            return self.clone();
        }
        let mut parts = Vec::with_capacity(4 * self.dim());
        for c in &self.coords {
            parts.extend(c.coords());
        }
        let content = S::content(&parts);
        let inv = S::one() / content;
        HVector {
            coords: self.coords.iter().map(|c| c.scale(&inv)).collect(),
        }
    }

    /// Flatten to 4(n+1) real coordinates.
    pub fn real_coords(&self) -> Vec<S> {
        let mut out = Vec::with_capacity(4 * self.dim());
        for c in &self.coords {
            out.extend(c.coords());
        }
        out
    }
}

impl<S: Scalar> fmt::Debug for HVector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords.iter().map(|c| format!("{c}"))).finish()
    }
}

/// Dense matrix of quaternions, row-major. Matrices act on column vectors
/// from the left; coefficient columns multiply from the right.
#[derive(Clone, PartialEq)]
pub struct Mat<S> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Quaternion<S>>,
}

impl<S: Scalar> fmt::Debug for Mat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.at(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl<S: Scalar> Mat<S> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![Quaternion::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for r in 0..n {
            *m.at_mut(r, r) = Quaternion::one();
        }
        m
    }

    /// The scalar matrix q·E.
    pub fn scalar(n: usize, q: &Quaternion<S>) -> Self {
        let mut m = Mat::zero(n, n);
        for r in 0..n {
            *m.at_mut(r, r) = q.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Quaternion<S>>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c));
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_columns(cols: &[HVector<S>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, HVector::dim);
        let mut m = Mat::zero(r, c);
        for (ci, col) in cols.iter().enumerate() {
            assert_eq!(col.dim(), r);
            for ri in 0..r {
                *m.at_mut(ri, ci) = col.coords[ri].clone();
            }
        }
        m
    }

    pub fn at(&self, r: usize, c: usize) -> &Quaternion<S> {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Quaternion<S> {
        &mut self.data[r * self.cols + c]
    }

    pub fn column(&self, c: usize) -> HVector<S> {
        HVector::new((0..self.rows).map(|r| self.at(r, c).clone()).collect())
    }

    pub fn columns(&self) -> Vec<HVector<S>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = Quaternion::zero();
                for k in 0..self.cols {
                    acc = acc + self.at(r, k) * other.at(k, c);
                }
                *out.at_mut(r, c) = acc;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &HVector<S>) -> HVector<S> {
        assert_eq!(self.cols, v.dim());
        let mut out = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let mut acc = Quaternion::zero();
            for k in 0..self.cols {
                acc = acc + self.at(r, k) * &v.coords[k];
            }
            out.push(acc);
        }
        HVector::new(out)
    }

    pub fn conj_transpose(&self) -> Self {
        let mut out = Mat::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *out.at_mut(c, r) = self.at(r, c).conj();
            }
        }
        out
    }

    pub fn eq_mat(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.eq_q(b))
    }

    /// Entrywise maximum squared norm; the reference scale for pivot floors.
    fn max_norm_sq(&self) -> S {
        let mut max = S::zero();
        for q in &self.data {
            let n = q.norm_sq();
            if n > max {
                max = n;
            }
        }
        max
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduced row echelon form via left row operations with partial
    /// pivoting by largest squared norm. Returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let floor = S::pivot_floor(&self.max_norm_sq());
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            // Largest |entry|² at or below `row`.
            let mut best = row;
            let mut best_norm = self.at(row, col).norm_sq();
            for r in row + 1..self.rows {
                let n = self.at(r, col).norm_sq();
                if n > best_norm {
                    best = r;
                    best_norm = n;
                }
            }
            if best_norm <= floor {
                continue;
            }
            self.swap_rows(row, best);
            // Normalize the pivot to 1 by a left multiplication.
            let inv = self.at(row, col).inverse().expect("pivot is nonzero");
            for c in 0..self.cols {
                *self.at_mut(row, c) = &inv * self.at(row, c);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.at(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for c in 0..self.cols {
                    let delta = &factor * self.at(row, c);
                    *self.at_mut(r, c) = self.at(r, c) - &delta;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        work.rref().len()
    }

    /// Basis of the right kernel `{λ : A·λ = 0}`.
    pub fn kernel(&self) -> Vec<HVector<S>> {
        let mut work = self.clone();
        let pivots = work.rref();
        let pivot_set: Vec<usize> = pivots.clone();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut lambda = vec![Quaternion::zero(); self.cols];
            lambda[free] = Quaternion::one();
            for (pivot_row, &pivot_col) in pivot_set.iter().enumerate() {
                lambda[pivot_col] = -work.at(pivot_row, free).clone();
            }
            basis.push(HVector::new(lambda));
        }
        basis
    }

    /// Solve `A·λ = c` for square invertible `A`.
    pub fn solve_right(&self, c: &HVector<S>) -> Result<HVector<S>, LinAlgError> {
        if self.rows != self.cols || c.dim() != self.rows {
            return Err(LinAlgError::DimensionMismatch(self.rows, c.dim()));
        }
        let n = self.rows;
        let mut aug = Mat::zero(n, n + 1);
        for r in 0..n {
            for col in 0..n {
                *aug.at_mut(r, col) = self.at(r, col).clone();
            }
            *aug.at_mut(r, n) = c.coords[r].clone();
        }
        let pivots = aug.rref();
        let rank = pivots.iter().filter(|&&p| p < n).count();
        if rank < n {
            return Err(LinAlgError::RankDeficient { rank });
        }
        Ok(HVector::new((0..n).map(|r| aug.at(r, n).clone()).collect()))
    }

    pub fn inverse(&self) -> Result<Mat<S>, LinAlgError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::zero(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                *aug.at_mut(r, c) = self.at(r, c).clone();
            }
            *aug.at_mut(r, n + r) = Quaternion::one();
        }
        let pivots = aug.rref();
        let rank = pivots.iter().filter(|&&p| p < n).count();
        if rank < n {
            return Err(LinAlgError::RankDeficient { rank });
        }
        let mut out = Mat::zero(n, n);
        for r in 0..n {
            for c in 0..n {
                *out.at_mut(r, c) = aug.at(r, n + c).clone();
            }
        }
        Ok(out)
    }
}

/// Gram matrix `G_rs = ⟨b_r, b_s⟩` of a list of vectors.
pub fn gram<S: Scalar>(
    space: &HermitianSpace,
    basis: &[HVector<S>],
) -> Result<Mat<S>, LinAlgError> {
    let m = basis.len();
    let mut g = Mat::zero(m, m);
    for r in 0..m {
        for s in 0..m {
            *g.at_mut(r, s) = space.herm(&basis[r], &basis[s])?;
        }
    }
    Ok(g)
}

/// Congruence diagonalization of a Hermitian matrix: returns `(T, diag)`
/// with `T*·G·T` diagonal with the real entries `diag` (then padded with
/// zeros for the null part). Columns of `T` are the diagonalizing
/// combinations of the original basis.
pub fn congruence_diagonalize<S: Scalar>(g: &Mat<S>) -> (Mat<S>, Vec<S>) {
    assert_eq!(g.rows, g.cols);
    let m = g.rows;
    let mut work = g.clone();
    let mut trans = Mat::identity(m);
    let floor = S::pivot_floor(&work.max_norm_sq());

    let col_add =
        |w: &mut Mat<S>, t_mat: &mut Mat<S>, target: usize, source: usize, mu: &Quaternion<S>| {
            // b_target ← b_target + b_source·μ: column update, conjugate row
            // update, and the same column update on the transform.
            for t in 0..w.rows {
                let delta = w.at(t, source) * mu;
                *w.at_mut(t, target) = w.at(t, target) + &delta;
            }
            let mu_conj = mu.conj();
            for t in 0..w.cols {
                let delta = &mu_conj * w.at(source, t);
                *w.at_mut(target, t) = w.at(target, t) + &delta;
            }
            for t in 0..t_mat.rows {
                let delta = t_mat.at(t, source) * mu;
                *t_mat.at_mut(t, target) = t_mat.at(t, target) + &delta;
            }
        };

    let swap = |w: &mut Mat<S>, t_mat: &mut Mat<S>, a: usize, b: usize| {
        if a == b {
            return;
        }
        for t in 0..w.rows {
            let tmp = w.at(t, a).clone();
            *w.at_mut(t, a) = w.at(t, b).clone();
            *w.at_mut(t, b) = tmp;
        }
        for t in 0..w.cols {
            let tmp = w.at(a, t).clone();
            *w.at_mut(a, t) = w.at(b, t).clone();
            *w.at_mut(b, t) = tmp;
        }
        for t in 0..t_mat.rows {
            let tmp = t_mat.at(t, a).clone();
            *t_mat.at_mut(t, a) = t_mat.at(t, b).clone();
            *t_mat.at_mut(t, b) = tmp;
        }
    };

    let mut diag = Vec::new();
    for r in 0..m {
        // Prefer a nonzero diagonal pivot.
        let diag_pivot = (r..m).find(|&p| work.at(p, p).norm_sq() > floor);
        let p = match diag_pivot {
            Some(p) => p,
            None => {
                // Try to create one from an off-diagonal entry.
                let mut found = None;
                'outer: for a in r..m {
                    for b in r..m {
                        if a != b && work.at(a, b).norm_sq() > floor {
                            found = Some((a, b));
                            break 'outer;
                        }
                    }
                }
                match found {
                    Some((a, b)) => {
                        let mu = work.at(a, b).conj();
                        col_add(&mut work, &mut trans, a, b, &mu);
                        a
                    }
                    None => break, // remaining block is zero
                }
            }
        };
        swap(&mut work, &mut trans, r, p);
        let d = work.at(r, r).re.clone();
        debug_assert!(work.at(r, r).im_norm_sq().is_zero() || !S::EXACT);
        diag.push(d.clone());
        let d_inv = S::one() / d;
        for s in r + 1..m {
            let coeff = work.at(r, s).scale(&d_inv);
            if coeff.is_zero() {
                continue;
            }
            col_add(&mut work, &mut trans, s, r, &-&coeff);
        }
    }
    (trans, diag)
}

/// Signature (positive, negative, null) of a Hermitian matrix, by congruence
/// elimination with real diagonal pivots.
pub fn signature<S: Scalar>(g: &Mat<S>) -> (usize, usize, usize) {
    let (_, diag) = congruence_diagonalize(g);
    let pos = diag.iter().filter(|d| d.signum_int() > 0).count();
    let neg = diag.iter().filter(|d| d.signum_int() < 0).count();
    (pos, neg, g.rows - pos - neg)
}

/// Subfield tag of a [`Subspace`]: the field the span coefficients live in.
#[derive(Clone, Debug, PartialEq)]
pub enum SubfieldTag<S: Scalar> {
    Real,
    ComplexType(ImaginaryDirection<S>),
    Quaternionic,
}

impl<S: Scalar> SubfieldTag<S> {
    /// True when a Gram entry lies in the tagged subfield.
    pub fn admits(&self, q: &Quaternion<S>) -> bool {
        match self {
            SubfieldTag::Real => q.is_real(),
            SubfieldTag::ComplexType(a) => a.contains_in_subfield(q),
            SubfieldTag::Quaternionic => true,
        }
    }

    /// Right multipliers spanning the tagged subfield over ℝ.
    pub fn multipliers(&self) -> Vec<Quaternion<S>> {
        match self {
            SubfieldTag::Real => vec![Quaternion::one()],
            SubfieldTag::ComplexType(a) => {
                vec![Quaternion::one(), a.as_quaternion().clone()]
            }
            SubfieldTag::Quaternionic => vec![
                Quaternion::one(),
                Quaternion::i(),
                Quaternion::j(),
                Quaternion::k(),
            ],
        }
    }
}

/// A right-subspace of Q^{n,1} over a tagged subfield, given by a basis.
#[derive(Clone, Debug)]
pub struct Subspace<S: Scalar> {
    pub space: HermitianSpace,
    pub basis: Vec<HVector<S>>,
    pub tag: SubfieldTag<S>,
}

impl<S: Scalar> Subspace<S> {
    /// Dimension over the tagged subfield.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn gram(&self) -> Result<Mat<S>, LinAlgError> {
        gram(&self.space, &self.basis)
    }

    pub fn signature(&self) -> Result<(usize, usize, usize), LinAlgError> {
        Ok(signature(&self.gram()?))
    }

    pub fn is_nondegenerate(&self) -> Result<bool, LinAlgError> {
        let (_, _, null) = self.signature()?;
        Ok(null == 0)
    }

    /// Generators of the same set viewed as a *real* span: each basis vector
    /// times each subfield multiplier.
    pub fn real_span_generators(&self) -> Vec<HVector<S>> {
        let mults = self.tag.multipliers();
        let mut gens = Vec::with_capacity(self.basis.len() * mults.len());
        for b in &self.basis {
            for m in &mults {
                gens.push(b.scale_right(m));
            }
        }
        gens
    }

    /// Membership of a projective class: is there λ ≠ 0 with v·λ in the span?
    pub fn contains_projective(&self, v: &HVector<S>) -> bool {
        self.rescale_into(v).is_some()
    }

    /// A witness λ with `v·λ` in the span, if one exists.
    pub fn rescale_into(&self, v: &HVector<S>) -> Option<Quaternion<S>> {
        rescale_into_real_span(&self.real_span_generators(), v)
    }

    /// Set equality of two subspaces (over possibly different tags), tested
    /// on the real spans — or directly over the quaternions when both tags
    /// are quaternionic.
    pub fn same_set(&self, other: &Subspace<S>) -> bool {
        if matches!(self.tag, SubfieldTag::Quaternionic)
            && matches!(other.tag, SubfieldTag::Quaternionic)
        {
            let ra = quaternion_rank(&self.basis);
            if quaternion_rank(&other.basis) != ra {
                return false;
            }
            let mut all = self.basis.clone();
            all.extend(other.basis.iter().cloned());
            return quaternion_rank(&all) == ra;
        }
        let a = self.real_span_generators();
        let b = other.real_span_generators();
        let ra = real_rank(&a);
        let rb = real_rank(&b);
        if ra != rb {
            return false;
        }
        let mut all = a;
        all.extend(b);
        real_rank(&all) == ra
    }
}

/// Dense matrix of scalars with the same elimination conventions as
/// [`Mat`]; used for all real-coordinate problems, where embedding reals
/// into quaternions would waste a 16× factor of arithmetic.
#[derive(Clone, Debug)]
pub struct RMat<S> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> RMat<S> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RMat { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c));
        RMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn at(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut S {
        &mut self.data[r * self.cols + c]
    }

    fn max_sq(&self) -> S {
        let mut max = S::zero();
        for v in &self.data {
            let sq = v.clone() * v.clone();
            if sq > max {
                max = sq;
            }
        }
        max
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rref(&mut self) -> Vec<usize> {
        let floor = S::pivot_floor(&self.max_sq());
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let mut best = row;
            let mut best_sq = self.at(row, col).clone() * self.at(row, col).clone();
            for r in row + 1..self.rows {
                let sq = self.at(r, col).clone() * self.at(r, col).clone();
                if sq > best_sq {
                    best = r;
                    best_sq = sq;
                }
            }
            if best_sq <= floor {
                continue;
            }
            self.swap_rows(row, best);
            let inv = S::one() / self.at(row, col).clone();
            for c in 0..self.cols {
                *self.at_mut(row, c) = inv.clone() * self.at(row, c).clone();
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.at(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for c in 0..self.cols {
                    let delta = factor.clone() * self.at(row, c).clone();
                    *self.at_mut(r, c) = self.at(r, c).clone() - delta;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        work.rref().len()
    }

    /// Basis of `{x : A·x = 0}` over the scalars.
    pub fn kernel(&self) -> Vec<Vec<S>> {
        let mut work = self.clone();
        let pivots = work.rref();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut x = vec![S::zero(); self.cols];
            x[free] = S::one();
            for (pivot_row, &pivot_col) in pivots.iter().enumerate() {
                x[pivot_col] = -work.at(pivot_row, free).clone();
            }
            basis.push(x);
        }
        basis
    }
}

/// Column matrix of flattened real coordinates.
fn real_matrix<S: Scalar>(vectors: &[HVector<S>]) -> RMat<S> {
    let rows = vectors.first().map_or(0, |v| 4 * v.dim());
    let mut m = RMat::zero(rows, vectors.len());
    for (c, v) in vectors.iter().enumerate() {
        for (r, s) in v.real_coords().into_iter().enumerate() {
            *m.at_mut(r, c) = s;
        }
    }
    m
}

/// Rank of a list of vectors viewed as a real span.
pub fn real_rank<S: Scalar>(vectors: &[HVector<S>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    real_matrix(vectors).rank()
}

/// Rank of a list of vectors over the right quaternions.
pub fn quaternion_rank<S: Scalar>(vectors: &[HVector<S>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Mat::from_columns(vectors).rank()
}

/// Greedy reduction of `vectors` to a prefix-independent basis over the span
/// measured by `rank_fn`.
fn independent_subset<S: Scalar>(
    vectors: &[HVector<S>],
    rank_fn: impl Fn(&[HVector<S>]) -> usize,
) -> Vec<HVector<S>> {
    let mut kept: Vec<HVector<S>> = Vec::new();
    for v in vectors {
        if v.is_zero() {
            continue;
        }
        kept.push(v.clone());
        if rank_fn(&kept) < kept.len() {
            kept.pop();
        }
    }
    kept
}

/// Searches for λ ≠ 0 with `v·λ` inside the real span of `gens`.
///
/// The unknown is the pair (real coefficients on `gens`, the four real
/// coefficients of λ); a kernel vector of the combined coordinate matrix
/// with nonzero λ-part is the witness.
pub fn rescale_into_real_span<S: Scalar>(
    gens: &[HVector<S>],
    v: &HVector<S>,
) -> Option<Quaternion<S>> {
    if gens.is_empty() {
        return None;
    }
    let dim = v.dim();
    let mut columns: Vec<HVector<S>> = gens.to_vec();
    let mults = [
        Quaternion::one(),
        Quaternion::i(),
        Quaternion::j(),
        Quaternion::k(),
    ];
    for m in &mults {
        columns.push(v.scale_right(m).neg());
    }
    debug_assert!(columns.iter().all(|c| c.dim() == dim));
    let kernel = real_matrix(&columns).kernel();
    for k in kernel {
        let lambda = Quaternion::new(
            k[gens.len()].clone(),
            k[gens.len() + 1].clone(),
            k[gens.len() + 2].clone(),
            k[gens.len() + 3].clone(),
        );
        if !lambda.is_zero() {
            return Some(lambda);
        }
    }
    None
}

/// Basis (as a real span) of the intersection of two real spans.
pub fn real_span_intersection<S: Scalar>(
    gens_a: &[HVector<S>],
    gens_b: &[HVector<S>],
) -> Vec<HVector<S>> {
    if gens_a.is_empty() || gens_b.is_empty() {
        return Vec::new();
    }
    let dim = gens_a[0].dim();
    let mut columns: Vec<HVector<S>> = gens_a.to_vec();
    columns.extend(gens_b.iter().map(HVector::neg));
    let kernel = real_matrix(&columns).kernel();
    let mut vectors = Vec::new();
    for k in kernel {
        let mut v = HVector::zero(dim);
        for (idx, g) in gens_a.iter().enumerate() {
            let coeff = k[idx].clone();
            v = v.add(&g.scale_right(&Quaternion::from_real(coeff)));
        }
        if !v.is_zero() {
            vectors.push(v.reduced());
        }
    }
    if real_rank(&vectors) == vectors.len() {
        return vectors;
    }
    independent_subset(&vectors, real_rank)
}

/// Orthogonal projection of `v` onto a nondegenerate subspace:
/// `v_W = Σ b_r λ_r` with `λ = G⁻¹(⟨b_r, v⟩)_r`.
pub fn orth_project<S: Scalar>(
    w: &Subspace<S>,
    v: &HVector<S>,
) -> Result<HVector<S>, LinAlgError> {
    let g = w.gram()?;
    let c = HVector::new(
        w.basis
            .iter()
            .map(|b| w.space.herm(b, v))
            .collect::<Result<Vec<_>, _>>()?,
    );
    let lambda = g.solve_right(&c).map_err(|e| match e {
        LinAlgError::RankDeficient { .. } => LinAlgError::DegenerateSubspace,
        other => other,
    })?;
    let mut out = HVector::zero(v.dim());
    for (b, l) in w.basis.iter().zip(&lambda.coords) {
        out = out.add(&b.scale_right(l));
    }
    Ok(out)
}

/// Basis of `{u : ⟨b, u⟩ = 0 for every basis vector b}` of a nondegenerate
/// subspace, tagged quaternionic.
pub fn orth_complement<S: Scalar>(w: &Subspace<S>) -> Result<Subspace<S>, LinAlgError> {
    if !w.is_nondegenerate()? {
        return Err(LinAlgError::DegenerateSubspace);
    }
    let dim = w.space.dim();
    // ⟨b_r, u⟩ = Σ_i conj(b_r[i])·J_ii·u_i: a right-linear system M·u = 0.
    let mut m = Mat::zero(w.basis.len(), dim);
    for (r, b) in w.basis.iter().enumerate() {
        for i in 0..dim {
            let entry = b.coords[i].conj();
            *m.at_mut(r, i) = if w.space.j_sign(i) > 0 { entry } else { -entry };
        }
    }
    let kernel = m.kernel();
    let basis = kernel.into_iter().map(|k| k.reduced()).collect();
    Ok(Subspace { space: w.space, basis, tag: SubfieldTag::Quaternionic })
}

/// The right span of `vectors` over the tagged subfield.
///
/// Preconditions per tag: for Real and ComplexType(a), every pairwise Gram
/// entry of the given representatives must already lie in the subfield
/// (callers rescale first; see the fan construction).
pub fn subfield_span<S: Scalar>(
    space: &HermitianSpace,
    vectors: &[HVector<S>],
    tag: SubfieldTag<S>,
) -> Result<Subspace<S>, LinAlgError> {
    for (r, vr) in vectors.iter().enumerate() {
        for vs in vectors.iter().skip(r) {
            let entry = space.herm(vr, vs)?;
            if !tag.admits(&entry) {
                return Err(LinAlgError::NotInSubfield(entry.to_string()));
            }
        }
    }
    let tag_for_rank = tag.clone();
    let reduced: Vec<HVector<S>> = vectors.iter().map(HVector::reduced).collect();
    let basis = independent_subset(&reduced, move |subset| {
        let sub = Subspace {
            space: *space,
            basis: subset.to_vec(),
            tag: tag_for_rank.clone(),
        };
        let gens = sub.real_span_generators();
        let mult_count = sub.tag.multipliers().len();
        real_rank(&gens) / mult_count
    });
    Ok(Subspace { space: *space, basis, tag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    type Q = Quaternion<Exact>;
    type V = HVector<Exact>;

    fn s(n: i64, d: i64) -> Exact {
        <Exact as Scalar>::from_ratio(n, d)
    }

    fn qs(n: i64, d: i64) -> Q {
        Q::from_real(s(n, d))
    }

    fn v(coords: Vec<Q>) -> V {
        HVector::new(coords)
    }

    #[test]
    fn herm_examples() {
        let h1 = HermitianSpace::new(1);
        let e2 = v(vec![Q::zero(), Q::one()]);
        assert_eq!(h1.norm(&e2).unwrap(), s(-1, 1));
        assert_eq!(h1.classify(&e2).unwrap(), SignClass::Negative);

        let null = v(vec![Q::j(), Q::one()]);
        assert_eq!(h1.norm(&null).unwrap(), s(0, 1));
        assert_eq!(h1.classify(&null).unwrap(), SignClass::Null);

        let h2 = HermitianSpace::new(2);
        let a = v(vec![Q::j().scale(&s(1, 2)), Q::k().scale(&s(1, 2)), Q::one()]);
        let b = v(vec![qs(1, 2), Q::zero(), Q::one()]);
        let val = h2.herm(&a, &b).unwrap();
        // conj(j/2)(1/2) − 1 = −j/4 − 1
        assert!(val.eq_q(&Quaternion::new(s(-1, 1), s(0, 1), s(-1, 4), s(0, 1))));
        // Conjugate symmetry.
        assert!(h2.herm(&b, &a).unwrap().eq_q(&val.conj()));
    }

    #[test]
    fn classify_errors() {
        let h2 = HermitianSpace::new(2);
        assert_eq!(h2.classify(&V::zero(3)), Err(LinAlgError::ZeroVector));
        assert_eq!(
            h2.classify(&V::zero(2)),
            Err(LinAlgError::DimensionMismatch(2, 3))
        );
        let e1 = h2.basis_vector::<Exact>(0);
        assert_eq!(h2.classify(&e1).unwrap(), SignClass::Positive);
    }

    #[test]
    fn solve_right_examples() {
        // A = [[i]], c = [k]  →  λ = i⁻¹k = −ik = j.
        let a = Mat::from_rows(vec![vec![Q::i()]]);
        let lam = a.solve_right(&v(vec![Q::k()])).unwrap();
        assert!(lam.coords[0].eq_q(&Q::j()));

        // Identity passes c through.
        let id = Mat::<Exact>::identity(3);
        let c = v(vec![Q::i(), Q::j(), qs(7, 3)]);
        assert!(id.solve_right(&c).unwrap().eq_vec(&c));

        // 2×2: A = [[1, j],[0, 1]], c = (j+k, k)  →  λ = (j+k−i, k).
        let a = Mat::from_rows(vec![
            vec![Q::one(), Q::j()],
            vec![Q::zero(), Q::one()],
        ]);
        let c = v(vec![Q::j() + Q::k(), Q::k()]);
        let lam = a.solve_right(&c).unwrap();
        assert!(lam.coords[0].eq_q(&(Q::j() + Q::k() - Q::i())));
        assert!(lam.coords[1].eq_q(&Q::k()));
        // Substitute back.
        assert!(a.mul_vec(&lam).eq_vec(&c));

        // Singular matrix reports its echelon rank.
        let sing = Mat::from_rows(vec![
            vec![Q::one(), Q::one()],
            vec![Q::one(), Q::one()],
        ]);
        assert_eq!(
            sing.solve_right(&v(vec![Q::one(), Q::zero()])),
            Err(LinAlgError::RankDeficient { rank: 1 })
        );
    }

    #[test]
    fn solve_right_random_round_trip() {
        // Back-substitution check on pseudorandom invertible systems.
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 9) as i64 - 4
        };
        for size in 1..=4 {
            for _ in 0..25 {
                let a = Mat::from_rows(
                    (0..size)
                        .map(|_| {
                            (0..size)
                                .map(|_| Quaternion::new(s(next(), 1), s(next(), 2), s(next(), 1), s(next(), 3)))
                                .collect()
                        })
                        .collect(),
                );
                let lam = v((0..size)
                    .map(|_| Quaternion::new(s(next(), 1), s(next(), 1), s(next(), 2), s(next(), 1)))
                    .collect());
                let c = a.mul_vec(&lam);
                match a.solve_right(&c) {
                    Ok(sol) => assert!(a.mul_vec(&sol).eq_vec(&c)),
                    Err(LinAlgError::RankDeficient { .. }) => {} // singular draw
                    Err(e) => panic!("unexpected error {e}"),
                }
            }
        }
    }

    #[test]
    fn gram_and_signature_examples() {
        let h2 = HermitianSpace::new(2);
        let e1 = h2.basis_vector::<Exact>(0);
        let e3 = h2.basis_vector::<Exact>(2);
        let g = gram(&h2, &[e1, e3]).unwrap();
        assert!(g.at(0, 0).eq_q(&Q::one()));
        assert!(g.at(1, 1).eq_q(&-Q::one()));
        assert_eq!(signature(&g), (1, 1, 0));

        // Lifts of the running example's p₁, p₂.
        let p1 = v(vec![qs(1, 2), Q::zero(), Q::one()]);
        let p2 = v(vec![qs(-1, 2), Q::zero(), Q::one()]);
        let g = gram(&h2, &[p1, p2]).unwrap();
        assert!(g.at(0, 0).eq_q(&qs(-3, 4)));
        assert!(g.at(0, 1).eq_q(&qs(-5, 4)));
        assert!(g.at(1, 0).eq_q(&qs(-5, 4)));
        assert!(g.at(1, 1).eq_q(&qs(-3, 4)));
        assert_eq!(signature(&g), (1, 1, 0));
    }

    #[test]
    fn signature_needs_off_diagonal_pivot() {
        // Zero diagonal, nonzero off-diagonal: hyperbolic plane, signature (1,1).
        let g = Mat::from_rows(vec![
            vec![Q::zero(), Q::one()],
            vec![Q::one(), Q::zero()],
        ]);
        assert_eq!(signature(&g), (1, 1, 0));
    }

    #[test]
    fn orth_project_examples() {
        let h2 = HermitianSpace::new(2);
        let spine = Subspace {
            space: h2,
            basis: vec![h2.basis_vector::<Exact>(0), h2.basis_vector::<Exact>(2)],
            tag: SubfieldTag::Quaternionic,
        };
        // v = (j/2, k/2, 1) projects to (j/2, 0, 1); the residual is positive.
        let p = v(vec![Q::j().scale(&s(1, 2)), Q::k().scale(&s(1, 2)), Q::one()]);
        let proj = orth_project(&spine, &p).unwrap();
        assert!(proj.eq_vec(&v(vec![Q::j().scale(&s(1, 2)), Q::zero(), Q::one()])));
        let residual = p.sub(&proj);
        assert_eq!(h2.classify(&residual).unwrap(), SignClass::Positive);
        // Projection fixes the subspace pointwise.
        let inside = v(vec![Q::i(), Q::zero(), qs(3, 1)]);
        assert!(orth_project(&spine, &inside).unwrap().eq_vec(&inside));
        // Orthogonality of the residual against every basis vector.
        for b in &spine.basis {
            assert!(h2.herm(b, &residual).unwrap().is_zero());
        }
        // Pythagoras split.
        let total = h2.norm(&p).unwrap();
        let split = h2.norm(&proj).unwrap() + h2.norm(&residual).unwrap();
        assert_eq!(total, split);
    }

    #[test]
    fn orth_complement_examples() {
        let h2 = HermitianSpace::new(2);
        let spine = Subspace {
            space: h2,
            basis: vec![h2.basis_vector::<Exact>(0), h2.basis_vector::<Exact>(2)],
            tag: SubfieldTag::Quaternionic,
        };
        let comp = orth_complement(&spine).unwrap();
        assert_eq!(comp.dim(), 1);
        assert!(comp.contains_projective(&h2.basis_vector::<Exact>(1)));
        assert_eq!(comp.signature().unwrap(), (1, 0, 0));

        let last = Subspace {
            space: h2,
            basis: vec![h2.basis_vector::<Exact>(2)],
            tag: SubfieldTag::Quaternionic,
        };
        let comp = orth_complement(&last).unwrap();
        assert_eq!(comp.dim(), 2);
        assert_eq!(comp.signature().unwrap(), (2, 0, 0));

        // A null line is degenerate and rejected.
        let null_line = Subspace {
            space: h2,
            basis: vec![v(vec![Q::one(), Q::zero(), Q::one()])],
            tag: SubfieldTag::Quaternionic,
        };
        assert!(matches!(
            orth_complement(&null_line),
            Err(LinAlgError::DegenerateSubspace)
        ));
    }

    #[test]
    fn subfield_span_examples() {
        let h2 = HermitianSpace::new(2);
        // Canonical C(i)-submanifold from the standard basis.
        let basis: Vec<V> = (0..3).map(|r| h2.basis_vector::<Exact>(r)).collect();
        let w = subfield_span(&h2, &basis, SubfieldTag::ComplexType(ImaginaryDirection::i()))
            .unwrap();
        assert_eq!(w.dim(), 3);
        // Contains (1/2 + i/3, 0, 1), misses (j/2, 0, 1) under any rescaling.
        let inside = v(vec![Quaternion::new(s(1, 2), s(1, 3), s(0, 1), s(0, 1)), Q::zero(), Q::one()]);
        assert!(w.contains_projective(&inside));
        let outside = v(vec![Q::j().scale(&s(1, 2)), Q::zero(), Q::one()]);
        assert!(!w.contains_projective(&outside));

        // A real form: Gram is diag(1,1,−1), all real.
        let real_frame = vec![
            v(vec![Q::i(), Q::zero(), Q::zero()]),
            v(vec![Q::zero(), Q::one(), Q::zero()]),
            v(vec![Q::zero(), Q::zero(), Q::one()]),
        ];
        let r = subfield_span(&h2, &real_frame, SubfieldTag::Real).unwrap();
        assert_eq!(r.dim(), 3);
        assert_eq!(r.signature().unwrap(), (2, 1, 0));

        // Misaligned representatives are rejected: ⟨e₁, j·e₁⟩ = j ∉ C(i).
        let bad = vec![
            v(vec![Q::one(), Q::zero(), Q::zero()]),
            v(vec![Q::j(), Q::zero(), Q::zero()]),
        ];
        let err = subfield_span(&h2, &bad, SubfieldTag::ComplexType(ImaginaryDirection::i()));
        assert!(matches!(err, Err(LinAlgError::NotInSubfield(_))));
    }

    #[test]
    fn subfield_span_reduces_dependent_generators() {
        let h2 = HermitianSpace::new(2);
        let e1 = h2.basis_vector::<Exact>(0);
        // e₁ and e₁·i are the same C(i)-line.
        let w = subfield_span(
            &h2,
            &[e1.clone(), e1.scale_right(&Q::i())],
            SubfieldTag::ComplexType(ImaginaryDirection::i()),
        )
        .unwrap();
        assert_eq!(w.dim(), 1);
        // Real tag: a rescaled copy spans the same real line.
        let r = subfield_span(&h2, &[e1.clone(), e1.scale_right(&qs(2, 1))], SubfieldTag::Real)
            .unwrap();
        assert_eq!(r.dim(), 1);
        // ... while ⟨e₁, e₁·i⟩ = i violates the real-Gram precondition.
        let err = subfield_span(&h2, &[e1.clone(), e1.scale_right(&Q::i())], SubfieldTag::Real);
        assert!(matches!(err, Err(LinAlgError::NotInSubfield(_))));
    }

    #[test]
    fn rescale_witness_is_verified() {
        let h2 = HermitianSpace::new(2);
        let basis: Vec<V> = (0..3).map(|r| h2.basis_vector::<Exact>(r)).collect();
        let w = subfield_span(&h2, &basis, SubfieldTag::ComplexType(ImaginaryDirection::i()))
            .unwrap();
        // (j/2, 0, j): rescaling by j⁻¹ lands in C(i)-coordinates.
        let p = v(vec![Q::j().scale(&s(1, 2)), Q::zero(), Q::j()]);
        let lam = w.rescale_into(&p).expect("member after rescale");
        let rescaled = p.scale_right(&lam);
        for c in &rescaled.coords {
            assert!(ImaginaryDirection::<Exact>::i().contains_in_subfield(c));
        }
    }

    #[test]
    fn real_span_intersection_of_complex_types() {
        let h1 = HermitianSpace::new(1);
        // C(i)-plane and C(j)-plane in Q^{1,1} intersect in the real plane.
        let e1 = h1.basis_vector::<Exact>(0);
        let e2 = h1.basis_vector::<Exact>(1);
        let ci = subfield_span(&h1, &[e1.clone(), e2.clone()], SubfieldTag::ComplexType(ImaginaryDirection::i())).unwrap();
        let cj = subfield_span(&h1, &[e1, e2], SubfieldTag::ComplexType(
            ImaginaryDirection::from_coords(s(0, 1), s(1, 1), s(0, 1)).unwrap(),
        ))
        .unwrap();
        let meet = real_span_intersection(&ci.real_span_generators(), &cj.real_span_generators());
        assert_eq!(real_rank(&meet), 2);
    }
}
