//! Deterministic samplers for the property suites.
//!
//! All randomness flows from the splittable PRNG; rationals are drawn with
//! numerator and denominator at most 16 so exact arithmetic stays fast.
//! Bisector points come from a chord construction: along any line through a
//! known bisector point the membership polynomial is a quadratic with that
//! point as one root, so the other root is rational and exactly on the
//! bisector — no decomposition machinery is involved.

use crate::bisector::Bisector;
use crate::linalg::{HVector, HermitianSpace, SignClass};
use crate::model::{BallPoint, ProjectivePoint};
use crate::prng::SplitMix64;
use crate::quaternion::{ImaginaryDirection, Quaternion};
use crate::scalar::Scalar;

pub const MAX_NUMERATOR: u64 = 16;
pub const MAX_DENOMINATOR: u64 = 16;

pub fn rational<S: Scalar>(rng: &mut SplitMix64) -> S {
    let num = rng.small_int(MAX_NUMERATOR);
    let den = rng.below(MAX_DENOMINATOR) + 1;
    S::from_ratio(num, den as i64)
}

pub fn quaternion<S: Scalar>(rng: &mut SplitMix64) -> Quaternion<S> {
    Quaternion::new(rational(rng), rational(rng), rational(rng), rational(rng))
}

pub fn nonzero_quaternion<S: Scalar>(rng: &mut SplitMix64) -> Quaternion<S> {
    loop {
        let q = quaternion::<S>(rng);
        if !q.is_zero() {
            return q;
        }
    }
}

pub fn imaginary_direction<S: Scalar>(rng: &mut SplitMix64) -> ImaginaryDirection<S> {
    loop {
        let q = quaternion::<S>(rng).im();
        if let Ok(dir) = ImaginaryDirection::new(q) {
            return dir;
        }
    }
}

/// A rational unit quaternion: the Cayley transform of a random imaginary.
pub fn unit_quaternion<S: Scalar>(rng: &mut SplitMix64) -> Quaternion<S> {
    let dir = imaginary_direction::<S>(rng);
    let t = rational::<S>(rng);
    dir.unit_in_subfield(&t)
}

/// Low-height rational: numerator and denominator at most 4. The geometry
/// samplers use these so rational heights stay tame through the long exact
/// pipelines; the algebra suites keep the full ≤16 range.
pub fn small_rational<S: Scalar>(rng: &mut SplitMix64) -> S {
    let num = rng.small_int(4);
    let den = rng.below(4) + 1;
    S::from_ratio(num, den as i64)
}

pub fn small_quaternion<S: Scalar>(rng: &mut SplitMix64) -> Quaternion<S> {
    Quaternion::new(
        small_rational(rng),
        small_rational(rng),
        small_rational(rng),
        small_rational(rng),
    )
}

pub fn ball_point<S: Scalar>(rng: &mut SplitMix64, n: usize) -> BallPoint<S> {
    loop {
        let coords: Vec<Quaternion<S>> = (0..n)
            .map(|_| {
                let q = small_quaternion::<S>(rng);
                let shrink = S::from_ratio(1, 2 * n as i64);
                q.scale(&shrink)
            })
            .collect();
        if let Ok(point) = BallPoint::new(coords) {
            return point;
        }
    }
}

pub fn interior_point<S: Scalar>(rng: &mut SplitMix64, n: usize) -> ProjectivePoint<S> {
    ball_point::<S>(rng, n).lift()
}

/// Two distinct interior points and their bisector.
pub fn bisector<S: Scalar>(rng: &mut SplitMix64, n: usize) -> Bisector<S> {
    loop {
        let p1 = interior_point::<S>(rng, n);
        let p2 = interior_point::<S>(rng, n);
        if p1.same_point(&p2) {
            continue;
        }
        if let Ok(b) = Bisector::new(&p1, &p2) {
            return b;
        }
    }
}

/// An exact point of the real spine: `π(P₁μ + P₂·conj(μ)u)` for a random
/// quaternion μ and unit u, which satisfies the |μ| = |ν| parametrization.
pub fn sigma_point<S: Scalar>(b: &Bisector<S>, rng: &mut SplitMix64) -> ProjectivePoint<S> {
    for _ in 0..256 {
        let mu = loop {
            let q = small_quaternion::<S>(rng);
            if !q.is_zero() {
                break q;
            }
        };
        let u = small_unit_quaternion::<S>(rng);
        let nu = &mu.conj() * &u;
        if let Ok(p) = b.spine_point(&mu, &nu) {
            return p;
        }
    }
    // The center is always available.
    b.center.clone()
}

/// Rational unit quaternion of low height.
pub fn small_unit_quaternion<S: Scalar>(rng: &mut SplitMix64) -> Quaternion<S> {
    loop {
        let q = small_quaternion::<S>(rng).im();
        if let Ok(dir) = ImaginaryDirection::new(q) {
            return dir.unit_in_subfield(&S::from_ratio(rng.small_int(2), 2));
        }
    }
}

/// A sparse random lift (not necessarily interior) used as a chord
/// direction. Sparse small coordinates keep the chord root's rational
/// height low, which keeps everything downstream fast.
fn random_lift<S: Scalar>(rng: &mut SplitMix64, space: &HermitianSpace) -> HVector<S> {
    let dim = space.dim();
    let mut coords = vec![Quaternion::zero(); dim];
    let first = rng.below(dim as u64) as usize;
    let mut second = rng.below(dim as u64) as usize;
    if second == first {
        second = (second + 1) % dim;
    }
    for idx in [first, second] {
        coords[idx] = Quaternion::new(
            S::from_ratio(rng.small_int(2), 2),
            S::from_ratio(rng.small_int(2), 2),
            S::from_ratio(rng.small_int(2), 2),
            S::from_ratio(rng.small_int(2), 2),
        );
    }
    HVector::new(coords)
}

/// An exact bisector point by the chord construction through a seed point.
pub fn bisector_point<S: Scalar>(b: &Bisector<S>, rng: &mut SplitMix64) -> ProjectivePoint<S> {
    let space = b.space;
    for _ in 0..512 {
        // Seed alternates between the center and spine samples for spread.
        let seed = if rng.below(2) == 0 {
            b.center.lift().clone()
        } else {
            sigma_point(b, rng).lift().clone()
        };
        let dir = random_lift::<S>(rng, &space);
        let a1 = space.herm(&seed, &b.lift1).expect("dims");
        let a2 = space.herm(&seed, &b.lift2).expect("dims");
        let b1 = space.herm(&dir, &b.lift1).expect("dims");
        let b2 = space.herm(&dir, &b.lift2).expect("dims");
        // F(t) = |a₁ + t·b̄?…|² difference: quadratic c₂t² + c₁t (c₀ = 0).
        let c2 = b1.norm_sq() - b2.norm_sq();
        let c1 = S::from_int(2) * (a1.conj() * b1).re - S::from_int(2) * (a2.conj() * b2).re;
        if c2.is_zero() || c1.is_zero() {
            continue;
        }
        let t_star = -c1 / c2;
        let lift = seed
            .add(&dir.scale_right(&Quaternion::from_real(t_star)))
            .reduced();
        if space.classify(&lift) != Ok(SignClass::Negative) {
            continue;
        }
        let point = ProjectivePoint::interior_from_lift(space, lift).expect("negative lift");
        if b.contains(&point).unwrap_or(false) {
            return point;
        }
    }
    b.center.clone()
}

/// An interior point of a slice: a right combination of the slice basis
/// biased towards the spine point, rejected until negative.
pub fn slice_point<S: Scalar>(
    b: &Bisector<S>,
    slice: &crate::bisector::Slice<S>,
    rng: &mut SplitMix64,
) -> Option<ProjectivePoint<S>> {
    let space = b.space;
    let mut shrink = 4i64;
    for attempt in 0..192 {
        let mut lift = slice.subspace.basis[0].clone();
        for extra in &slice.subspace.basis[1..] {
            let coeff = small_quaternion::<S>(rng).scale(&S::from_ratio(1, shrink));
            lift = lift.add(&extra.scale_right(&coeff));
        }
        let lift = lift.reduced();
        if space.classify(&lift) == Ok(SignClass::Negative) {
            return ProjectivePoint::interior_from_lift(space, lift).ok();
        }
        // Rejections pull the mix closer to the negative spine point.
        if attempt % 24 == 23 {
            shrink = shrink.saturating_mul(4);
        }
    }
    None
}
