//! Fan decompositions of bisectors into complex blades.
//!
//! A blade through a center o on the real spine is built in stages: recenter
//! the defining pair symmetrically about o; span a maximal complex-type
//! submanifold M = C(a)-span containing the pair and a selector point (the
//! subfield direction a is forced by aligning the triple's Gram into one
//! subfield); cut a meridian S — a real form of M containing the recentered
//! spine direction; and extend S over the orthogonal subfield C(b),
//! b ⊥ a, giving N with S = M ∩ N. The reflection in N is the conjugated
//! scalar matrix `G·b·G⁻¹` of the real-Gram frame G; it swaps the defining
//! pair, which is exactly why N sits inside the bisector.
//!
//! Selector parameters expose the non-uniqueness of the decomposition: both
//! the submanifold M and the meridian inside it carry free choices, and
//! different selectors produce genuinely different blade families.

use thiserror::Error;

use crate::bisector::{Bisector, BisectorError};
use crate::isometry::{reflection_in_complex_type, IsometryError, Reflection};
use crate::linalg::{
    orth_complement, quaternion_rank, real_rank, real_span_intersection, subfield_span, HVector,
    HermitianSpace, LinAlgError, SignClass, Subspace, SubfieldTag,
};
use crate::model::{
    geodesic_through, point_at, ModelError, ProjectivePoint, TotallyGeodesicSubmanifold,
};
use crate::prng::SplitMix64;
use crate::quaternion::{ImaginaryDirection, Quaternion, QuaternionError};
use crate::scalar::{FloatScalar, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FanError {
    #[error("points must be pairwise distinct")]
    NotDistinct,
    #[error("meridian alignment impossible: the point is not on the bisector")]
    AlignmentImpossible,
    #[error("blade invariant violated: {0}")]
    BladeInvariant(String),
    #[error("selector produced a degenerate configuration: {0}")]
    DegenerateSelector(String),
    #[error(transparent)]
    Bisector(#[from] BisectorError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Isometry(#[from] IsometryError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Quaternion(#[from] QuaternionError),
}

/// Result of spanning three points by a complex-type submanifold.
#[derive(Clone, Debug)]
pub struct ComplexSpan<S: Scalar> {
    /// The subfield direction the Grams were aligned into.
    pub direction: ImaginaryDirection<S>,
    /// The C(a)-span of the aligned representatives (dimension ≤ 3).
    pub subspace: Subspace<S>,
}

/// Aligns lifts so all pairwise Grams lie in one subfield C(a): the second
/// lift is rescaled to make the first Gram real, the third to make the
/// second real; the remaining entry forces a (ties broken by i).
fn align_triple<S: Scalar>(
    space: &HermitianSpace,
    lifts: [HVector<S>; 3],
) -> Result<(ImaginaryDirection<S>, [HVector<S>; 3]), FanError> {
    let [p, q, r] = lifts;
    let t1 = space.herm(&p, &q)?;
    let q_aligned = if t1.im_norm_sq().is_zero() {
        q
    } else {
        q.scale_right(&t1.conj()).reduced()
    };
    let t2 = space.herm(&q_aligned, &r)?;
    let r_aligned = if t2.im_norm_sq().is_zero() {
        r
    } else {
        r.scale_right(&t2.conj()).reduced()
    };
    let forced = space.herm(&r_aligned, &p)?;
    let direction = if forced.im_norm_sq().is_zero() {
        ImaginaryDirection::i()
    } else {
        ImaginaryDirection::new(forced.im())?
    };
    Ok((direction, [p, q_aligned, r_aligned]))
}

/// The complex-type span of three pairwise distinct points: rescales
/// canonical lifts into a common subfield C(a) and returns the C(a)-span,
/// which has complex dimension 2 in general position and less for
/// degenerate triples (the achieved dimension is `subspace.dim() - 1`).
pub fn complex_span_3pts<S: Scalar>(
    p: &ProjectivePoint<S>,
    q: &ProjectivePoint<S>,
    r: &ProjectivePoint<S>,
) -> Result<ComplexSpan<S>, FanError> {
    if p.same_point(q) || p.same_point(r) || q.same_point(r) {
        return Err(FanError::NotDistinct);
    }
    let space = p.space;
    let lifts = [
        p.canonical_lift()?.reduced(),
        q.canonical_lift()?.reduced(),
        r.canonical_lift()?.reduced(),
    ];
    let (direction, aligned) = align_triple(&space, lifts)?;
    let subspace = subfield_span(&space, &aligned, SubfieldTag::ComplexType(direction.clone()))?;
    Ok(ComplexSpan { direction, subspace })
}

/// The carrier of a blade under construction: a maximal complex-type
/// submanifold M = C(a)-span containing the recentered symmetric pair, with
/// the spine data of the restricted bisector B_M.
#[derive(Clone, Debug)]
pub struct BladeCarrier<S: Scalar> {
    pub space: HermitianSpace,
    pub direction: ImaginaryDirection<S>,
    /// Basis of M over C(a): aligned triple followed by the orthogonalized
    /// quaternionic complement.
    pub basis: Vec<HVector<S>>,
    /// Center lift O (on the real spine of the parent).
    pub o_lift: HVector<S>,
    /// Direction of the recentered geodesic γ at o.
    pub w_dir: HVector<S>,
    /// σ_M direction U = W·a inside M.
    pub u_dir: HVector<S>,
    /// Recentered symmetric pair defining the parent bisector.
    pub pair: (HVector<S>, HVector<S>),
}

impl<S: Scalar> BladeCarrier<S> {
    pub fn submanifold(&self) -> Result<TotallyGeodesicSubmanifold<S>, FanError> {
        let sub = subfield_span(
            &self.space,
            &self.basis,
            SubfieldTag::ComplexType(self.direction.clone()),
        )?;
        Ok(TotallyGeodesicSubmanifold::new(sub)?)
    }

    /// Projects `v` off the C(a)-span of `seeds` (a herm-orthogonal list)
    /// inside the carrier; coefficients stay in C(a).
    fn project_off<S2>(&self, seeds: &[HVector<S>], v: &HVector<S>) -> Result<HVector<S>, FanError>
    where
        S2: Scalar,
    {
        let mut out = v.clone();
        for w in seeds {
            let num = self.space.herm(w, &out)?;
            let den = self.space.norm(w)?;
            out = out.sub(&w.scale_right(&num.scale(&(S::one() / den))));
        }
        Ok(out.reduced())
    }

    /// A meridian of B_M through `p` (or the default completion if `p` is
    /// trivial on the spine): a real-Gram frame of n+1 vectors containing
    /// the σ_M frame {O, U}.
    pub fn meridian_through(
        &self,
        p_aligned: Option<&HVector<S>>,
        selector: u64,
    ) -> Result<Subspace<S>, FanError> {
        let space = self.space;
        let mut frame: Vec<HVector<S>> = vec![self.o_lift.clone(), self.u_dir.clone()];

        if let Some(p_lift) = p_aligned {
            // Rescale within C(a) so the Grams against O and U are real:
            // λ = conj⟨O,P⟩ makes the first real; the second is then real
            // exactly when p satisfies the bisector membership.
            let c1 = space.herm(&self.o_lift, p_lift)?;
            let lambda = c1.conj();
            let rescaled = p_lift.scale_right(&lambda).reduced();
            let against_u = space.herm(&self.u_dir, &rescaled)?;
            if !against_u.im_norm_sq().is_zero() {
                return Err(FanError::AlignmentImpossible);
            }
            frame.push(rescaled);
        }

        // Complete with the herm-orthogonal complement of the frame inside
        // the carrier, orthogonalized and rotated by selector units of C(a).
        let mut rng = SplitMix64::new(0x4d45_5249_4449_414e ^ selector);
        let mut ortho_seeds = frame.clone();
        if frame.len() == 3 {
            // {O, U, P} is not herm-orthogonal; orthogonalize the seed list
            // first (coefficients stay in C(a)).
            let p_vec = frame[2].clone();
            let projected = self.project_off::<S>(&frame[..2].to_vec(), &p_vec)?;
            if projected.is_zero() {
                // p on the σ_M frame span: fall back to default completion.
                ortho_seeds = frame[..2].to_vec();
                frame.pop();
            } else {
                ortho_seeds = vec![frame[0].clone(), frame[1].clone(), projected];
            }
        }
        for v in &self.basis {
            if frame.len() == space.dim() {
                break;
            }
            let projected = self.project_off::<S>(&ortho_seeds, v)?;
            if projected.is_zero() {
                continue;
            }
            let reduced = projected.reduced();
            // Meridian selector: rotate the completion direction by a unit
            // of C(a) (Cayley transform of a small rational parameter).
            let t = S::from_ratio(rng.small_int(4), 5);
            let unit = self.direction.unit_in_subfield(&t);
            let rotated = reduced.scale_right(&unit).reduced();
            ortho_seeds.push(reduced);
            frame.push(rotated);
        }
        if frame.len() != space.dim() {
            return Err(FanError::DegenerateSelector(format!(
                "meridian frame has {} of {} vectors",
                frame.len(),
                space.dim()
            )));
        }
        size_reduce_frame(&mut frame);
        Ok(subfield_span(&space, &frame, SubfieldTag::Real)?)
    }
}

/// Lattice-style size reduction of a frame by integer combinations. Real
/// integer combinations keep pairwise Hermitian Grams real and leave the
/// real span unchanged, so the resulting blade is the same set — only the
/// coordinate heights shrink.
fn size_reduce_frame<S: Scalar>(frame: &mut [HVector<S>]) {
    let eucl = |a: &HVector<S>, b: &HVector<S>| -> f64 {
        a.real_coords()
            .iter()
            .zip(b.real_coords())
            .map(|(x, y)| x.to_f64() * y.to_f64())
            .sum()
    };
    // The σ_M frame vectors (center lift and spine direction) are small by
    // construction and anchor the sampling; reduce only the completions,
    // and only when their heights are genuinely out of scale.
    let needs_it = frame.iter().skip(2).any(|v| {
        v.real_coords().iter().any(|c| c.to_f64().abs() > 1e18)
    });
    if !needs_it {
        return;
    }
    for _pass in 0..2 {
        for i in 2..frame.len() {
            for j in 0..frame.len() {
                if i == j {
                    continue;
                }
                let own = eucl(&frame[i], &frame[i]);
                let den = eucl(&frame[j], &frame[j]);
                // Only reduce against strictly shorter vectors.
                if !(den.is_finite() && own.is_finite()) || den <= 0.0 || den >= own {
                    continue;
                }
                let ratio = eucl(&frame[i], &frame[j]) / den;
                if !ratio.is_finite() {
                    continue;
                }
                let rounded = ratio.round();
                if rounded == 0.0 || rounded.abs() > 1e15 {
                    continue;
                }
                let coeff = Quaternion::from_real(S::from_int(rounded as i64));
                let candidate = frame[i].sub(&frame[j].scale_right(&coeff)).reduced();
                // Keep the reduction only when it genuinely shrinks.
                if eucl(&candidate, &candidate) < own {
                    frame[i] = candidate;
                }
            }
        }
    }
}

/// A complex blade of a fan decomposition: a maximal totally geodesic
/// submanifold of complex type N sitting inside the parent bisector, through
/// the fan center, with its meridian S = M ∩ N and the reflection that swaps
/// the defining pair.
#[derive(Clone, Debug)]
pub struct Blade<S: Scalar> {
    pub center: ProjectivePoint<S>,
    /// Subfield direction of the carrier M.
    pub m_direction: ImaginaryDirection<S>,
    /// Subfield direction of the blade N (orthogonal to `m_direction`).
    pub n_direction: ImaginaryDirection<S>,
    pub carrier: TotallyGeodesicSubmanifold<S>,
    /// The shared real form S = M ∩ N.
    pub meridian: Subspace<S>,
    pub submanifold: TotallyGeodesicSubmanifold<S>,
    pub reflection: Reflection<S>,
    /// Recentered symmetric pair of the parent bisector.
    pub pair: (HVector<S>, HVector<S>),
}

impl<S: Scalar> Blade<S> {
    pub fn contains(&self, p: &ProjectivePoint<S>) -> bool {
        self.submanifold.contains(p)
    }

    pub fn same_set(&self, other: &Blade<S>) -> bool {
        self.submanifold.subspace.same_set(&other.submanifold.subspace)
    }

    /// Deterministic interior samples of the blade: the center lift mixed
    /// with small C(b)-coefficient combinations of the frame, rejecting
    /// non-negative lifts. Anchoring at the center keeps the acceptance
    /// rate high regardless of the frame's own sign pattern.
    pub fn sample_points(&self, rng: &mut SplitMix64, count: usize) -> Vec<ProjectivePoint<S>> {
        let space = self.submanifold.subspace.space;
        let basis = &self.submanifold.subspace.basis;
        let b_quat = self.n_direction.as_quaternion();
        // The center's canonical σ-lift is the first meridian frame vector,
        // so it survives as the first basis vector of the span; fall back to
        // the kernel search only if the frame was reordered.
        let anchor = {
            let first = ProjectivePoint::from_lift(space, basis[0].clone()).ok();
            match first {
                Some(f) if f.same_point(&self.center) => basis[0].clone(),
                _ => self
                    .submanifold
                    .subspace
                    .rescale_into(self.center.lift())
                    .map(|lam| self.center.lift().scale_right(&lam).reduced())
                    .unwrap_or_else(|| basis[0].clone()),
            }
        };
        // Mix with small integer coefficients and weight the anchor by an
        // integer large enough that the candidate is provably interior:
        // for `anchor·M + mix`, negativity holds once
        // `M·|ρ| > 2|Re⟨anchor,mix⟩| + max(⟨mix,mix⟩, 0) + |ρ|`. Reduced
        // lifts are integral, so candidates stay integral and the rational
        // arithmetic never normalizes a nontrivial denominator.
        let rho = space.norm(&anchor).expect("anchor in space");
        debug_assert!(rho.signum_int() < 0);
        let mut out = Vec::with_capacity(count);
        let mut guard = 0;
        while out.len() < count && guard < count * 8 {
            guard += 1;
            let mut mix = HVector::zero(space.dim());
            let mut nonzero = false;
            for vector in basis.iter() {
                let s0 = S::from_int(rng.small_int(2));
                let s1 = S::from_int(rng.small_int(2));
                if !(s0.is_zero() && s1.is_zero()) {
                    nonzero = true;
                }
                let coeff = Quaternion::from_real(s0) + b_quat.scale(&s1);
                mix = mix.add(&vector.scale_right(&coeff));
            }
            if !nonzero {
                continue;
            }
            let cross = space.herm(&anchor, &mix).expect("dims");
            let mix_norm = space.norm(&mix).expect("dims");
            let bound = (S::from_int(2) * cross.re.abs()
                + if mix_norm.signum_int() > 0 { mix_norm } else { S::zero() })
                / rho.clone().abs()
                + S::from_int(2);
            // 2^⌈log₂ bound⌉ as an exact integer; the f64 estimate is only a
            // starting point, the doubling loop below verifies interiority.
            let exp = bound.to_f64().max(2.0).log2().ceil().clamp(1.0, 2048.0) as u32;
            let mut weight = S::one();
            let two = S::from_int(2);
            for _ in 0..exp {
                weight = weight * two.clone();
            }
            for _ in 0..8 {
                let lift = anchor
                    .scale_right(&Quaternion::from_real(weight.clone()))
                    .add(&mix)
                    .reduced();
                if let Ok(p) = ProjectivePoint::interior_from_lift(space, lift) {
                    out.push(p);
                    break;
                }
                weight = weight * two.clone();
            }
        }
        out
    }

    /// The blade sits inside the bisector: reflection invariants plus a few
    /// sampled exact membership checks.
    pub fn validate(&self, parent: &Bisector<S>) -> Result<(), FanError> {
        self.reflection.validate()?;
        if !self.contains(&self.center) {
            return Err(FanError::BladeInvariant("center not on blade".into()));
        }
        // The reflection swaps the recentered defining pair.
        let space = parent.space;
        let p1 = ProjectivePoint::interior_from_lift(space, self.pair.0.clone())?;
        let p2 = ProjectivePoint::interior_from_lift(space, self.pair.1.clone())?;
        let image = self.reflection.isometry.apply(&p1)?;
        if !image.same_point(&p2) {
            return Err(FanError::BladeInvariant("reflection does not swap the pair".into()));
        }
        // Sampled membership in the parent bisector (exact on the exact
        // backend); the heavy sampling and the M ∩ N = S rank certificate
        // live in the property suites.
        let mut rng = SplitMix64::new(0xb1ad_e000);
        let samples = self.sample_points(&mut rng, 2);
        if samples.is_empty() {
            return Err(FanError::BladeInvariant("no interior blade samples found".into()));
        }
        for p in samples {
            if !parent.contains(&p)? {
                return Err(FanError::BladeInvariant("sampled blade point off bisector".into()));
            }
        }
        Ok(())
    }

    /// Exact rank certificate that the meridian is the full intersection
    /// M ∩ N of the carrier with the blade.
    ///
    /// The meridian frame sits inside both spans by construction, so
    /// S ⊆ M ∩ N always; equality then reduces to the rank identity
    /// `dim(M ∩ N) = dim M + dim N − dim(M + N) = dim S`.
    pub fn verify_meridian_intersection(&self) -> bool {
        let m_gens = self.carrier.subspace.real_span_generators();
        let n_gens = self.submanifold.subspace.real_span_generators();
        let s_rank = real_rank(&self.meridian.real_span_generators());
        let rank_m = real_rank(&m_gens);
        let rank_n = real_rank(&n_gens);
        let mut union = m_gens;
        union.extend(n_gens);
        let rank_union = real_rank(&union);
        rank_m + rank_n - rank_union == s_rank
    }

    /// Real-span basis of the set intersection with another blade.
    pub fn intersection_span(&self, other: &Blade<S>) -> Vec<HVector<S>> {
        real_span_intersection(
            &self.submanifold.subspace.real_span_generators(),
            &other.submanifold.subspace.real_span_generators(),
        )
    }

    /// The literal point-intersection test: every common vector is a right
    /// multiple of the center lift, so the blades share exactly {o}.
    ///
    /// For two maximal blades through a common center this is generically
    /// false: the subfield rotations of the spine direction give each blade
    /// a 2-plane of imaginary directions inside σ, and two 2-planes in the
    /// 3-dimensional imaginary space always share a line. The sharper true
    /// statement is [`Blade::intersection_is_spine_geodesic`].
    pub fn intersection_is_center(&self, other: &Blade<S>) -> bool {
        let meet = self.intersection_span(other);
        if meet.is_empty() {
            return false; // the center is always shared
        }
        let mut with_center = meet.clone();
        with_center.push(self.center.lift().clone());
        quaternion_rank(&with_center) == 1
    }

    /// Refined intersection law for blades with distinct carrier directions
    /// in general position: the common set is exactly one real geodesic of
    /// the parent's real spine through the center. Checks: the meet is a
    /// real 2-plane containing the center lift, and its interior classes
    /// lie on σ.
    pub fn intersection_is_spine_geodesic(
        &self,
        other: &Blade<S>,
        parent: &Bisector<S>,
    ) -> Result<bool, FanError> {
        let meet = self.intersection_span(other);
        if real_rank(&meet) != 2 {
            return Ok(false);
        }
        let mut with_center = meet.clone();
        with_center.push(self.center.lift().clone());
        if real_rank(&with_center) != 2 {
            return Ok(false);
        }
        // Interior classes of the meet plane lie on the real spine.
        let space = parent.space;
        for (r0, r1) in [(1i64, 1i64), (2, -1), (1, 3), (-3, 2), (5, 1)] {
            let lift = meet[0]
                .scale_right(&Quaternion::from_real(S::from_int(r0)))
                .add(&meet[1].scale_right(&Quaternion::from_real(S::from_int(r1))));
            if space.classify(&lift) == Ok(SignClass::Negative) {
                let point = ProjectivePoint::interior_from_lift(space, lift)?;
                if !parent.real_spine_contains(&point)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Full intersection verdict against another blade of the same fan,
    /// from a single meet computation.
    pub fn intersection_verdict(
        &self,
        other: &Blade<S>,
        parent: &Bisector<S>,
    ) -> Result<IntersectionVerdict, FanError> {
        let meet = self.intersection_span(other);
        let rank = real_rank(&meet);
        let mut verdict = IntersectionVerdict {
            rank,
            contains_center: false,
            inside_bisector: false,
            is_spine_geodesic: false,
        };
        if rank == 0 {
            return Ok(verdict);
        }
        let mut with_center = meet.clone();
        with_center.push(self.center.lift().clone());
        verdict.contains_center = real_rank(&with_center) == rank;

        // Universal law: interior classes of the meet satisfy the parent's
        // membership polynomial exactly.
        let space = parent.space;
        let mut mix = SplitMix64::new(0x6d65_6574);
        let mut inside = true;
        let mut on_spine = true;
        for _ in 0..12 {
            let mut lift = HVector::zero(space.dim());
            for v in &meet {
                let c = S::from_ratio(mix.small_int(3), (mix.below(3) + 1) as i64);
                lift = lift.add(&v.scale_right(&Quaternion::from_real(c)));
            }
            let lift = lift.reduced();
            if space.classify(&lift) == Ok(SignClass::Negative) {
                let point = ProjectivePoint::interior_from_lift(space, lift)?;
                if !parent.contains(&point)? {
                    inside = false;
                    break;
                }
                if rank == 2 && !parent.spine.contains(&point) {
                    on_spine = false;
                }
            }
        }
        verdict.inside_bisector = inside;
        // Sharp law (general position): the meet is exactly one geodesic of
        // the real spine through the center.
        verdict.is_spine_geodesic =
            rank == 2 && verdict.contains_center && inside && on_spine;
        Ok(verdict)
    }
}

/// Verdict of a pairwise blade-intersection test.
#[derive(Clone, Copy, Debug)]
pub struct IntersectionVerdict {
    /// Real rank of the meet of the two spans (2 in general position).
    pub rank: usize,
    pub contains_center: bool,
    /// Sampled interior classes satisfy the parent membership exactly.
    pub inside_bisector: bool,
    /// Rank-2 meets only: the shared set is a real-spine geodesic.
    pub is_spine_geodesic: bool,
}

/// Carrier construction shared by `fan_blade` and `blade_containing`:
/// recenters the pair at `o` and spans M from the pair plus a third lift.
fn build_carrier<S: Scalar>(
    parent: &Bisector<S>,
    frame: (HVector<S>, HVector<S>),
    third: HVector<S>,
) -> Result<(BladeCarrier<S>, HVector<S>), FanError> {
    let space = parent.space;
    let (o_lift, w_dir) = frame;
    let step = interior_scale(&space, &o_lift, &w_dir)?;
    let w_step = w_dir.scale_right(&Quaternion::from_real(step));
    let p1 = o_lift.add(&w_step).reduced();
    let p2 = o_lift.sub(&w_step).reduced();

    if quaternion_rank(&[p1.clone(), p2.clone(), third.clone()]) != 3 {
        return Err(FanError::DegenerateSelector(
            "third point lies on the quaternionic spine".into(),
        ));
    }
    let (direction, aligned) = align_triple(&space, [p1.clone(), p2.clone(), third])?;

    // Maximal extension: orthogonalized quaternionic complement of the
    // aligned triple (empty for n = 2).
    let triple_span = Subspace {
        space,
        basis: aligned.to_vec(),
        tag: SubfieldTag::Quaternionic,
    };
    let complement = orth_complement(&triple_span)?;
    let mut basis = aligned.to_vec();
    let mut ortho: Vec<HVector<S>> = Vec::new();
    for v in &complement.basis {
        let mut u = v.clone();
        for w in &ortho {
            let num = space.herm(w, &u)?;
            let den = space.norm(w)?;
            u = u.sub(&w.scale_right(&num.scale(&(S::one() / den))));
        }
        let u = u.reduced();
        if !u.is_zero() {
            ortho.push(u);
        }
    }
    basis.extend(ortho);
    if basis.len() != space.dim() {
        return Err(FanError::DegenerateSelector("carrier basis incomplete".into()));
    }

    let u_dir = w_dir.scale_right(direction.as_quaternion()).reduced();
    let aligned_third = basis[2].clone();
    let carrier = BladeCarrier {
        space,
        direction,
        basis,
        o_lift,
        w_dir,
        u_dir,
        pair: (p1, p2),
    };
    Ok((carrier, aligned_third))
}

/// Carrier over a prescribed subfield direction: the recentered pair plus
/// the orthogonalized complement of the spine. The pair's Grams are real
/// and the complement orthogonal, so every Gram lies in C(a) for any a —
/// the direction is a free choice here, unlike the generic three-point
/// carrier where the alignment forces it.
fn carrier_over_direction<S: Scalar>(
    parent: &Bisector<S>,
    frame: (HVector<S>, HVector<S>),
    direction: ImaginaryDirection<S>,
) -> Result<BladeCarrier<S>, FanError> {
    let space = parent.space;
    let (o_lift, w_dir) = frame;
    let step = interior_scale(&space, &o_lift, &w_dir)?;
    let w_step = w_dir.scale_right(&Quaternion::from_real(step));
    let p1 = o_lift.add(&w_step).reduced();
    let p2 = o_lift.sub(&w_step).reduced();
    let mut basis = vec![p1.clone(), p2.clone()];
    let complement = orth_complement(&parent.spine.subspace)?;
    let mut ortho: Vec<HVector<S>> = Vec::new();
    for v in &complement.basis {
        let mut u = v.clone();
        for w in &ortho {
            let num = space.herm(w, &u)?;
            let den = space.norm(w)?;
            u = u.sub(&w.scale_right(&num.scale(&(S::one() / den))));
        }
        let u = u.reduced();
        if !u.is_zero() {
            ortho.push(u);
        }
    }
    basis.extend(ortho);
    if basis.len() != space.dim() {
        return Err(FanError::DegenerateSelector("carrier basis incomplete".into()));
    }
    let u_dir = w_dir.scale_right(direction.as_quaternion()).reduced();
    Ok(BladeCarrier { space, direction, basis, o_lift, w_dir, u_dir, pair: (p1, p2) })
}

/// The imaginary direction of a real-spine point relative to the frame:
/// the σ-lift decomposes as `O·r + W·u` with u imaginary; `None` when the
/// point is the center itself (u = 0).
fn sigma_direction_of<S: Scalar>(
    _parent: &Bisector<S>,
    frame: &(HVector<S>, HVector<S>),
    p: &ProjectivePoint<S>,
) -> Result<Option<ImaginaryDirection<S>>, FanError> {
    let (o_lift, w_dir) = frame;
    // Land a lift of p in the σ-lift slice of the recentered frame (every
    // σ-point has one there), then read off its imaginary direction.
    let gens = [
        o_lift.clone(),
        w_dir.scale_right(&Quaternion::i()),
        w_dir.scale_right(&Quaternion::j()),
        w_dir.scale_right(&Quaternion::k()),
    ];
    let lambda = crate::linalg::rescale_into_real_span(&gens, p.lift())
        .ok_or_else(|| FanError::BladeInvariant("spine point outside the σ-lift frame".into()))?;
    let sigma_lift = p.lift().scale_right(&lambda).reduced();
    let mut columns = gens.to_vec();
    columns.push(sigma_lift.neg());
    let kernel = crate::linalg::RMat::from_rows(transpose_real(&columns)).kernel();
    for k in &kernel {
        if k[4].is_zero() {
            continue;
        }
        let inv = S::one() / k[4].clone();
        let u = Quaternion::new(
            S::zero(),
            k[1].clone() * inv.clone(),
            k[2].clone() * inv.clone(),
            k[3].clone() * inv,
        );
        if u.is_zero() {
            return Ok(None);
        }
        return Ok(Some(ImaginaryDirection::new(u)?));
    }
    Err(FanError::BladeInvariant("spine point outside the σ-lift frame".into()))
}

/// Real-coordinate rows of a list of vectors (columns of the linear system).
fn transpose_real<S: Scalar>(columns: &[HVector<S>]) -> Vec<Vec<S>> {
    let rows = columns.first().map_or(0, |v| 4 * v.dim());
    (0..rows)
        .map(|r| columns.iter().map(|c| c.real_coords()[r].clone()).collect())
        .collect()
}

/// Largest step `s = 1/2^m` with `π(O ± W·s)` interior.
fn interior_scale<S: Scalar>(
    space: &HermitianSpace,
    o_lift: &HVector<S>,
    w_dir: &HVector<S>,
) -> Result<S, FanError> {
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
    Err(FanError::DegenerateSelector("no interior symmetric step".into()))
}

/// Assembles the blade over the orthogonal subfield from a carrier and a
/// meridian (the real form S of the carrier): N = C(b)-span of the meridian
/// frame with b ⊥ a, so that S = M ∩ N and the reflections commute.
pub fn blade_from<S: Scalar>(
    parent: &Bisector<S>,
    o: &ProjectivePoint<S>,
    carrier: BladeCarrier<S>,
    meridian: Subspace<S>,
) -> Result<Blade<S>, FanError> {
    finish_blade(parent, o, carrier, meridian)
}

fn finish_blade<S: Scalar>(
    parent: &Bisector<S>,
    o: &ProjectivePoint<S>,
    carrier: BladeCarrier<S>,
    meridian: Subspace<S>,
) -> Result<Blade<S>, FanError> {
    let space = parent.space;
    let n_direction = carrier.direction.orthogonal_imaginary();
    let n_span = subfield_span(
        &space,
        &meridian.basis,
        SubfieldTag::ComplexType(n_direction.clone()),
    )?;
    let submanifold = TotallyGeodesicSubmanifold::new(n_span)?;
    let reflection = reflection_in_complex_type(&submanifold)?;
    let blade = Blade {
        center: o.clone(),
        m_direction: carrier.direction.clone(),
        n_direction,
        carrier: carrier.submanifold()?,
        meridian,
        submanifold,
        reflection,
        pair: carrier.pair.clone(),
    };
    blade.validate(parent)?;
    Ok(blade)
}

/// A blade of the fan decomposition of `parent` centered at `o ∈ σ`, keyed
/// by an (M-selector, meridian-selector) pair. Different M-selectors choose
/// different subfield directions; different meridian selectors rotate the
/// real form inside the same carrier.
pub fn fan_blade<S: Scalar>(
    parent: &Bisector<S>,
    o: &ProjectivePoint<S>,
    m_selector: u64,
    meridian_selector: u64,
) -> Result<Blade<S>, FanError> {
    let recentered = parent.recentered_frame(o)?;
    fan_blade_with_frame(parent, o, recentered, m_selector, meridian_selector)
}

fn fan_blade_with_frame<S: Scalar>(
    parent: &Bisector<S>,
    o: &ProjectivePoint<S>,
    recentered: (HVector<S>, HVector<S>),
    m_selector: u64,
    meridian_selector: u64,
) -> Result<Blade<S>, FanError> {
    let space = parent.space;
    // Selector point: mix the spine complement into the center, with
    // quaternion coefficients drawn from the selector stream.
    let complement = orth_complement(&parent.spine.subspace)?;
    let mut rng = SplitMix64::new(0xfa9b_1ade ^ m_selector.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    if complement.basis.is_empty() {
        // n = 1: the quaternionic spine is the whole space and there is no
        // off-spine selector point. The carrier is the full space over any
        // subfield direction (the normalized pair's Grams are real, hence
        // in every C(a)); the selector picks the direction itself.
        let direction = loop {
            let candidate = Quaternion::new(
                S::zero(),
                S::from_int(rng.small_int(3)),
                S::from_int(rng.small_int(3)),
                S::from_int(rng.small_int(3)),
            );
            if let Ok(dir) = ImaginaryDirection::new(candidate) {
                break dir;
            }
        };
        let carrier = carrier_over_direction(parent, recentered, direction)?;
        let meridian = carrier.meridian_through(None, meridian_selector)?;
        return finish_blade(parent, o, carrier, meridian);
    }
    let (o_lift, w_dir) = recentered.clone();
    for _attempt in 0..16 {
        let mut mix = HVector::zero(space.dim());
        for c in &complement.basis {
            let coeff = Quaternion::new(
                S::from_ratio(rng.small_int(3), 4),
                S::from_ratio(rng.small_int(3), 4),
                S::from_ratio(rng.small_int(3), 4),
                S::from_ratio(rng.small_int(3), 4),
            );
            mix = mix.add(&c.scale_right(&coeff));
        }
        if mix.is_zero() {
            continue;
        }
        // A component along the geodesic direction with a quaternion
        // coefficient is what varies the forced subfield direction a: it
        // makes the third Gram genuinely non-real.
        let eta = Quaternion::new(
            S::from_ratio(rng.small_int(3), 4),
            S::from_ratio(rng.small_int(3), 4),
            S::from_ratio(rng.small_int(3), 4),
            S::from_ratio(rng.small_int(3), 4),
        );
        mix = mix.add(&w_dir.scale_right(&eta));
        // Escalate the center weight until the lift is interior.
        let mut weight = S::one();
        let mut third = None;
        for _ in 0..64 {
            let candidate = o_lift
                .scale_right(&Quaternion::from_real(weight.clone()))
                .add(&mix)
                .reduced();
            if space.classify(&candidate) == Ok(SignClass::Negative) {
                third = Some(candidate);
                break;
            }
            weight = weight * S::from_int(2);
        }
        let Some(third) = third else { continue };
        match build_carrier(parent, recentered.clone(), third) {
            Ok((carrier, _)) => {
                let meridian = carrier.meridian_through(None, meridian_selector)?;
                return finish_blade(parent, o, carrier, meridian);
            }
            Err(FanError::DegenerateSelector(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(FanError::DegenerateSelector("no interior selector point found".into()))
}

/// The blade through a given bisector point: spans M from the recentered
/// pair and p itself, then takes the meridian of B_M through p.
pub fn blade_containing<S: Scalar>(
    parent: &Bisector<S>,
    o: &ProjectivePoint<S>,
    p: &ProjectivePoint<S>,
) -> Result<Blade<S>, FanError> {
    let recentered = parent.recentered_frame(o)?;
    blade_containing_with_frame(parent, o, recentered, p)
}

fn blade_containing_with_frame<S: Scalar>(
    parent: &Bisector<S>,
    o: &ProjectivePoint<S>,
    recentered: (HVector<S>, HVector<S>),
    p: &ProjectivePoint<S>,
) -> Result<Blade<S>, FanError> {
    if !parent.contains(p)? {
        return Err(FanError::Bisector(BisectorError::NotOnBisector));
    }
    // Real-spine points: a blade only holds the spine directions of its own
    // rotation plane, so span the carrier over the point's own direction.
    if parent.real_spine_contains(p)? {
        let carrier = match sigma_direction_of(parent, &recentered, p)? {
            Some(direction) => carrier_over_direction(parent, recentered, direction)?,
            // p is the center: every blade works, take the default.
            None => return fan_blade_with_frame(parent, o, recentered, 0, 0),
        };
        let meridian = carrier.meridian_through(None, 0)?;
        let blade = finish_blade(parent, o, carrier, meridian)?;
        if !blade.contains(p) {
            return Err(FanError::BladeInvariant("constructed blade misses the point".into()));
        }
        return Ok(blade);
    }
    let third = p.canonical_lift()?.reduced();
    let (carrier, aligned_p) = build_carrier(parent, recentered, third)?;
    let meridian = carrier.meridian_through(Some(&aligned_p), 0)?;
    let blade = finish_blade(parent, o, carrier, meridian)?;
    if !blade.contains(p) {
        return Err(FanError::BladeInvariant("constructed blade misses the point".into()));
    }
    Ok(blade)
}

/// A fan decomposition: the family of blades of `parent` through a center,
/// enumerable by selector pairs.
#[derive(Clone, Debug)]
pub struct FanDecomposition<S: Scalar> {
    pub parent: Bisector<S>,
    pub center: ProjectivePoint<S>,
    /// Cached recentered frame (O, W) at the center.
    frame: (HVector<S>, HVector<S>),
}

impl<S: Scalar> FanDecomposition<S> {
    pub fn new(parent: Bisector<S>, center: ProjectivePoint<S>) -> Result<Self, FanError> {
        let frame = parent.recentered_frame(&center)?;
        Ok(FanDecomposition { parent, center, frame })
    }

    /// Default decomposition centered at the midpoint.
    pub fn at_midpoint(parent: Bisector<S>) -> Result<Self, FanError> {
        let center = parent.center.clone();
        FanDecomposition::new(parent, center)
    }

    pub fn blade(&self, m_selector: u64, meridian_selector: u64) -> Result<Blade<S>, FanError> {
        fan_blade_with_frame(
            &self.parent,
            &self.center,
            self.frame.clone(),
            m_selector,
            meridian_selector,
        )
    }

    pub fn blade_through(&self, p: &ProjectivePoint<S>) -> Result<Blade<S>, FanError> {
        blade_containing_with_frame(&self.parent, &self.center, self.frame.clone(), p)
    }
}

/// Exact starlikeness certificate: the geodesic from o to p lies inside the
/// blade through p, whose lift plane sits inside the blade's span.
#[derive(Clone, Debug)]
pub struct StarlikeCertificate<S: Scalar> {
    pub blade: Blade<S>,
    /// In-blade geodesic frame (base at o, direction towards p): every point
    /// of the segment is a projective class of this real 2-plane.
    pub frame: (HVector<S>, HVector<S>),
}

/// Certify that the segment [o, p] lies in the bisector, via the blade
/// route: o, p lie in a common blade N ⊆ B, the in-blade geodesic frame
/// spans a real 2-plane inside N's span, and every interior class of that
/// plane is a point of N, hence of B.
pub fn starlike_certificate<S: Scalar>(
    parent: &Bisector<S>,
    o: &ProjectivePoint<S>,
    p: &ProjectivePoint<S>,
) -> Result<StarlikeCertificate<S>, FanError> {
    if o.same_point(p) {
        // Trivially starlike; certify with the default blade.
        let blade = fan_blade(parent, o, 0, 0)?;
        let frame = (blade.center.lift().clone(), blade.pair.0.clone());
        return Ok(StarlikeCertificate { blade, frame });
    }
    let blade = blade_containing(parent, o, p)?;
    let space = parent.space;
    // In-blade lifts of o and p.
    let lam_o = blade
        .submanifold
        .subspace
        .rescale_into(o.lift())
        .ok_or_else(|| FanError::BladeInvariant("center not in blade span".into()))?;
    let lam_p = blade
        .submanifold
        .subspace
        .rescale_into(p.lift())
        .ok_or_else(|| FanError::BladeInvariant("point not in blade span".into()))?;
    let o_in = o.lift().scale_right(&lam_o).reduced();
    let p_in = p.lift().scale_right(&lam_p).reduced();
    // Align within the blade: the cross Gram is a C(b)-value; conj lives in
    // C(b), so the aligned direction stays inside the span.
    let cross = space.herm(&o_in, &p_in)?;
    let p_aligned = p_in.scale_right(&-&cross.conj()).reduced();
    let tau = space.herm(&o_in, &p_aligned)?.re;
    let rho = space.norm(&o_in)?;
    let alpha = tau / rho;
    let direction = p_aligned
        .sub(&o_in.scale_right(&Quaternion::from_real(alpha)))
        .reduced();
    // The geodesic's lift plane must sit inside the blade span.
    let gens = blade.submanifold.subspace.real_span_generators();
    let base_rank = real_rank(&gens);
    let mut with_frame = gens;
    with_frame.push(o_in.clone());
    with_frame.push(direction.clone());
    if real_rank(&with_frame) != base_rank {
        return Err(FanError::BladeInvariant("geodesic frame escapes the blade".into()));
    }
    Ok(StarlikeCertificate { blade, frame: (o_in, direction) })
}

/// Float-backend residual scan: membership residuals at `samples` points of
/// the geodesic segment from o to p.
pub fn starlike_residuals<S: FloatScalar>(
    parent: &Bisector<S>,
    o: &ProjectivePoint<S>,
    p: &ProjectivePoint<S>,
    samples: usize,
) -> Result<Vec<f64>, FanError> {
    let geo = geodesic_through(o, p)?;
    let t_end = crate::model::dist(o, p)?;
    let mut out = Vec::with_capacity(samples);
    for idx in 0..samples {
        let frac = S::from_f64(idx as f64 / (samples.max(2) - 1) as f64);
        let t = frac * t_end.clone();
        let point = point_at(&geo, &t)?;
        out.push(parent.membership_residual(&point)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BallPoint;
    use crate::scalar::Exact;

    type Q = Quaternion<Exact>;

    fn s(n: i64, d: i64) -> Exact {
        <Exact as Scalar>::from_ratio(n, d)
    }

    fn ball2(a: Q, b: Q) -> ProjectivePoint<Exact> {
        BallPoint::new(vec![a, b]).unwrap().lift()
    }

    fn running_example() -> Bisector<Exact> {
        let p1 = ball2(Q::from_real(s(1, 2)), Q::zero());
        let p2 = ball2(Q::from_real(s(-1, 2)), Q::zero());
        Bisector::new(&p1, &p2).unwrap()
    }

    #[test]
    fn complex_span_examples() {
        // Points already in the canonical complex submanifold align with the
        // real Grams left intact: tie-break a = i.
        let p = ball2(Q::from_real(s(1, 4)), Q::zero());
        let q = ball2(Q::from_real(s(-1, 3)), Q::zero());
        let r = ball2(Q::zero(), Q::from_real(s(1, 5)));
        let span = complex_span_3pts(&p, &q, &r).unwrap();
        assert!(span.direction.same_direction(&ImaginaryDirection::i()));
        assert_eq!(span.subspace.dim(), 3);
        for point in [&p, &q, &r] {
            assert!(span.subspace.contains_projective(point.lift()));
        }

        // The running-example triple: alignment forces the Grams into one
        // subfield; the oracle is the subfield_span acceptance itself.
        let p = ball2(Q::j().scale(&s(1, 2)), Q::k().scale(&s(1, 2)));
        let q = ball2(Q::j().scale(&s(1, 2)), Q::zero());
        let r = ball2(Q::from_real(s(1, 2)), Q::zero());
        let span = complex_span_3pts(&p, &q, &r).unwrap();
        assert_eq!(span.subspace.dim(), 3);
        for point in [&p, &q, &r] {
            assert!(span.subspace.contains_projective(point.lift()));
        }

        // Collinear points on one real geodesic: dimension drops to 2 and
        // the tie-break direction i is reported.
        let p = ball2(Q::from_real(s(1, 4)), Q::zero());
        let q = ball2(Q::from_real(s(-1, 4)), Q::zero());
        let r = ball2(Q::from_real(s(1, 3)), Q::zero());
        let span = complex_span_3pts(&p, &q, &r).unwrap();
        assert!(span.direction.same_direction(&ImaginaryDirection::i()));
        assert_eq!(span.subspace.dim(), 2);

        // Distinctness is required.
        assert!(matches!(
            complex_span_3pts(&p, &p, &r),
            Err(FanError::NotDistinct)
        ));
    }

    #[test]
    fn fan_blade_running_example() {
        let b = running_example();
        let o = b.center.clone();
        let blade = fan_blade(&b, &o, 0, 0).unwrap();
        // The blade passes through the center and sits inside the bisector.
        assert!(blade.contains(&o));
        let mut rng = SplitMix64::new(99);
        for p in blade.sample_points(&mut rng, 32) {
            assert!(b.contains(&p).unwrap());
        }
        // Orthogonal subfield directions anticommute.
        let (aq, bq) = (
            blade.m_direction.as_quaternion(),
            blade.n_direction.as_quaternion(),
        );
        assert!((aq * bq).eq_q(&-&(bq * aq)));
        // The reflection swaps the recentered pair (validated), and maps the
        // original defining points onto each other here because the center
        // is the original midpoint.
        let p1 = b.point1();
        let p2 = b.point2();
        let image = blade.reflection.isometry.apply(&p1).unwrap();
        assert!(image.same_point(&p2));
    }

    #[test]
    fn fan_blade_off_center() {
        let b = running_example();
        // Center away from the midpoint: ball(−k/2, 0) ∈ σ.
        let o = ball2(Q::k().scale(&s(-1, 2)), Q::zero());
        let blade = fan_blade(&b, &o, 1, 0).unwrap();
        assert!(blade.contains(&o));
        let mut rng = SplitMix64::new(7);
        for p in blade.sample_points(&mut rng, 16) {
            assert!(b.contains(&p).unwrap());
        }
        // Errors: center off the spine.
        let bad = ball2(Q::from_real(s(1, 3)), Q::zero());
        assert!(fan_blade(&b, &bad, 0, 0).is_err());
    }

    #[test]
    fn blade_containing_examples() {
        let b = running_example();
        let o = b.center.clone();
        // p = ball(0, k/2): the classic slice point.
        let p = ball2(Q::zero(), Q::k().scale(&s(1, 2)));
        let blade = blade_containing(&b, &o, &p).unwrap();
        assert!(blade.contains(&p));
        assert!(blade.contains(&o));
        let mut rng = SplitMix64::new(11);
        for x in blade.sample_points(&mut rng, 32) {
            assert!(b.contains(&x).unwrap());
        }
        // A spine point gets the default blade.
        let on_spine = ball2(Q::i().scale(&s(1, 3)), Q::zero());
        let default_blade = blade_containing(&b, &o, &on_spine).unwrap();
        assert!(default_blade.contains(&o));
        // Off-bisector points are rejected.
        let off = ball2(Q::from_real(s(1, 3)), Q::zero());
        assert!(matches!(
            blade_containing(&b, &o, &off),
            Err(FanError::Bisector(BisectorError::NotOnBisector))
        ));
    }

    #[test]
    fn distinct_m_selectors_meet_in_a_spine_geodesic() {
        let b = running_example();
        let fan = FanDecomposition::at_midpoint(b.clone()).unwrap();
        let blade_a = fan.blade(0, 0).unwrap();
        let blade_b = fan.blade(1, 0).unwrap();
        // Different subfield directions, genuinely different blades.
        assert!(!blade_a.m_direction.same_direction(&blade_b.m_direction));
        assert!(!blade_a.same_set(&blade_b));
        // Recorded counterexample to the point-intersection shorthand: two
        // maximal blades through one center always share a geodesic of the
        // real spine, never just the center.
        assert!(!blade_a.intersection_is_center(&blade_b));
        let verdict = blade_a.intersection_verdict(&blade_b, &b).unwrap();
        assert!(verdict.contains_center && verdict.inside_bisector);
        if verdict.rank == 2 {
            assert!(verdict.is_spine_geodesic);
            assert!(blade_a.intersection_is_spine_geodesic(&blade_b, &b).unwrap());
        }
    }

    #[test]
    fn same_carrier_meridians_share_a_geodesic() {
        // Recorded counterexample to the point-intersection shorthand: two
        // blades with the same carrier direction share the complex geodesic
        // spanned by the σ_M frame, not just the center.
        let b = running_example();
        let fan = FanDecomposition::at_midpoint(b).unwrap();
        let blade_a = fan.blade(0, 0).unwrap();
        let blade_b = fan.blade(0, 1).unwrap();
        assert!(blade_a.m_direction.same_direction(&blade_b.m_direction));
        if !blade_a.same_set(&blade_b) {
            assert!(!blade_a.intersection_is_center(&blade_b));
        }
    }

    #[test]
    fn blades_at_distinct_centers_are_provably_distinct() {
        let b = running_example();
        let o1 = b.center.clone();
        let o2 = ball2(Q::i().scale(&s(1, 3)), Q::zero());
        let fan1 = FanDecomposition::new(b.clone(), o1).unwrap();
        let fan2 = FanDecomposition::new(b, o2.clone()).unwrap();
        let blade1 = fan1.blade(0, 0).unwrap();
        // Every blade of fan2 contains o2; this blade of fan1 does not, so
        // the two decompositions differ as families.
        assert!(!blade1.contains(&o2));
        let blade2 = fan2.blade(0, 0).unwrap();
        assert!(blade2.contains(&o2));
        assert!(!blade1.same_set(&blade2));
    }

    #[test]
    fn blade_membership_via_reflection_delta_chain() {
        // The proof step behind blade ⊆ B, at the δ level: for x in N,
        // δ(x, p₁) = δ(I_N x, I_N p₁) = δ(x, p₂), checked exactly.
        use crate::model::delta;
        let b = running_example();
        let o = b.center.clone();
        let blade = fan_blade(&b, &o, 3, 1).unwrap();
        let refl = &blade.reflection.isometry;
        let p1 = ProjectivePoint::interior_from_lift(b.space, blade.pair.0.clone()).unwrap();
        let p2 = ProjectivePoint::interior_from_lift(b.space, blade.pair.1.clone()).unwrap();
        let mut rng = SplitMix64::new(31);
        for x in blade.sample_points(&mut rng, 12) {
            let image = refl.apply(&x).unwrap();
            assert!(image.same_point(&x)); // x is fixed by I_N
            let lhs = delta(&x, &p1).unwrap();
            let mid = delta(&refl.apply(&x).unwrap(), &refl.apply(&p1).unwrap()).unwrap();
            let rhs = delta(&x, &p2).unwrap();
            assert_eq!(lhs, mid);
            assert_eq!(mid, rhs);
        }
    }

    #[test]
    fn projection_triangles_align_to_real_grams() {
        // (p, Π(p), r) admits representatives with all-real Grams: the
        // alignment's forced entry degenerates, so the tie-break i reports.
        let b = running_example();
        let p = ball2(Q::j().scale(&s(1, 2)), Q::k().scale(&s(1, 2)));
        let foot = b.project_to_spine(&p).unwrap();
        let r = ball2(Q::from_real(s(1, 2)), Q::zero());
        let span = complex_span_3pts(&p, &foot, &r).unwrap();
        assert!(span.direction.same_direction(&ImaginaryDirection::i()));
        // All pairwise Grams of the aligned basis are real.
        for (i, u) in span.subspace.basis.iter().enumerate() {
            for v in span.subspace.basis.iter().skip(i) {
                assert!(b.space.herm(u, v).unwrap().is_real());
            }
        }
    }

    #[test]
    fn starlike_certificate_and_controls() {
        let b = running_example();
        let o = b.center.clone();
        let p = ball2(Q::zero(), Q::k().scale(&s(1, 2)));
        let cert = starlike_certificate(&b, &o, &p).unwrap();
        assert!(cert.blade.contains(&p));
        // Trivial case p = o.
        let trivial = starlike_certificate(&b, &o, &o).unwrap();
        assert!(trivial.blade.contains(&o));
        // Negative control: points off the bisector are rejected.
        let off = ball2(Q::from_real(s(1, 3)), Q::zero());
        assert!(starlike_certificate(&b, &o, &off).is_err());
    }

    #[test]
    fn starlike_float_residuals() {
        let p1 = BallPoint::new(vec![Quaternion::<f64>::from_real(0.5), Quaternion::zero()])
            .unwrap()
            .lift();
        let p2 = BallPoint::new(vec![Quaternion::<f64>::from_real(-0.5), Quaternion::zero()])
            .unwrap()
            .lift();
        let b = Bisector::new(&p1, &p2).unwrap();
        let o = b.center.clone();
        let p = BallPoint::new(vec![Quaternion::zero(), Quaternion::<f64>::new(0.0, 0.0, 0.0, 0.5)])
            .unwrap()
            .lift();
        let residuals = starlike_residuals(&b, &o, &p, 20).unwrap();
        assert_eq!(residuals.len(), 20);
        for r in &residuals {
            assert!(*r <= 1e-12, "residual {r}");
        }
        // Negative control: aim at a point off the bisector; the residual
        // at the far end is decisively nonzero.
        let off = BallPoint::new(vec![Quaternion::<f64>::from_real(0.3), Quaternion::zero()])
            .unwrap()
            .lift();
        let bad = starlike_residuals(&b, &o, &off, 20).unwrap();
        assert!(bad[0] <= 1e-12);
        assert!(bad[19] > 1e-3);
    }
}
