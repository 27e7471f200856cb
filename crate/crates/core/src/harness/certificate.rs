//! Machine-checkable certificates of exact runs.
//!
//! A certificate is a transcript of verified identities with their full
//! rational-quaternion operands. The checker re-evaluates every identity
//! from the recorded operands alone, so any corruption of the transcript is
//! detected either as a parse failure or as a violated identity.

use serde::{Deserialize, Serialize};

use crate::bisector::Bisector;
use crate::linalg::{quaternion_rank, HVector, HermitianSpace};
use crate::model::ProjectivePoint;
use crate::prng::SplitMix64;
use crate::scalar::{Exact, Scalar};

use super::{sampler, HarnessError, Scenario};

pub const CERTIFICATE_SCHEMA: &str = "qbisect/certificate/v1";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub n: usize,
    pub seed: u64,
    pub entries: Vec<CertEntry>,
}

/// One verified identity with its operand lifts.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CertEntry {
    /// `|⟨P,P₁⟩|²·⟨P₂,P₂⟩ = |⟨P,P₂⟩|²·⟨P₁,P₁⟩` with all three interior.
    BisectorMembership {
        p: HVector<Exact>,
        p1: HVector<Exact>,
        p2: HVector<Exact>,
    },
    /// `projection` is the orthogonal projection of `p` onto span{p1, p2}
    /// and lies on the real spine of the bisector of the pair.
    SpineProjection {
        p: HVector<Exact>,
        p1: HVector<Exact>,
        p2: HVector<Exact>,
        projection: HVector<Exact>,
    },
    /// The Hermitian triple product of the recorded lifts is real.
    TripleReality {
        p: HVector<Exact>,
        q: HVector<Exact>,
        r: HVector<Exact>,
    },
    /// `δ(p,r) = δ(p,projection)·δ(projection,r)` on the recorded lifts.
    PythagorasSplit {
        p: HVector<Exact>,
        projection: HVector<Exact>,
        r: HVector<Exact>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckFailure {
    pub index: usize,
    pub reason: String,
}

impl std::fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "entry {}: {}", self.index, self.reason)
    }
}

/// Emit a certificate for the scenario (exact backend only): membership,
/// projection, triple-reality, and Pythagoras transcripts at the scenario's
/// Mostow trial volumes.
pub fn certify(scenario: &Scenario) -> Result<Certificate, HarnessError> {
    if scenario.backend != super::Backend::Exact {
        return Err(HarnessError::CertifyNeedsExact);
    }
    scenario.validate()?;
    let n = scenario.n;
    let root = scenario.root_rng();
    let mut rng = root.split_labeled("certificate");
    let mut entries = Vec::new();

    let count = scenario.trials.mostow_reverse.max(1);
    for _ in 0..count {
        let b: Bisector<Exact> = sampler::bisector(&mut rng, n);
        // Membership via the chord sampler.
        let p = sampler::bisector_point(&b, &mut rng);
        entries.push(CertEntry::BisectorMembership {
            p: p.lift().clone(),
            p1: b.lift1.clone(),
            p2: b.lift2.clone(),
        });
        // A bisector point projects onto the real spine (the recorded
        // projection is the raw orthogonal projection of the recorded lift,
        // so the residual identity holds verbatim).
        if let Ok(projection) = crate::linalg::orth_project(&b.spine.subspace, p.lift()) {
            entries.push(CertEntry::SpineProjection {
                p: p.lift().clone(),
                p1: b.lift1.clone(),
                p2: b.lift2.clone(),
                projection,
            });
        }
        // Projection triangle of a generic interior point: triple-product
        // reality and the Pythagorean split (no spine claim involved).
        let x = sampler::interior_point::<Exact>(&mut rng, n);
        if let Ok(projection) = crate::linalg::orth_project(&b.spine.subspace, x.lift()) {
            let foot = ProjectivePoint::interior_from_lift(b.space, projection.clone());
            if let (Some(r), Ok(foot)) = (spine_sample(&b, &mut rng), foot) {
                if let (Ok(pc), Ok(qc), Ok(rc)) =
                    (x.canonical_lift(), foot.canonical_lift(), r.canonical_lift())
                {
                    entries.push(CertEntry::TripleReality { p: pc, q: qc, r: rc });
                }
                entries.push(CertEntry::PythagorasSplit {
                    p: x.lift().clone(),
                    projection,
                    r: r.lift().clone(),
                });
            }
        }
    }

    let cert = Certificate {
        schema: CERTIFICATE_SCHEMA.to_string(),
        n,
        seed: scenario.seed,
        entries,
    };
    // Never emit an unverifiable transcript.
    debug_assert!(check(&cert).is_ok());
    Ok(cert)
}

fn spine_sample(b: &Bisector<Exact>, rng: &mut SplitMix64) -> Option<ProjectivePoint<Exact>> {
    // Interior point of the quaternionic spine (not necessarily on σ).
    for _ in 0..64 {
        let mut lift = HVector::zero(b.space.dim());
        for basis in &b.spine.subspace.basis {
            lift = lift.add(&basis.scale_right(&sampler::quaternion::<Exact>(rng)));
        }
        let lift = lift.reduced();
        if b.space.classify(&lift) == Ok(crate::linalg::SignClass::Negative) {
            return ProjectivePoint::interior_from_lift(b.space, lift).ok();
        }
    }
    None
}

/// Re-verify every entry of a transcript from its operands.
pub fn check(cert: &Certificate) -> Result<(), CheckFailure> {
    if cert.schema != CERTIFICATE_SCHEMA {
        return Err(CheckFailure { index: 0, reason: format!("unknown schema {}", cert.schema) });
    }
    let space = HermitianSpace::new(cert.n);
    let fail = |index: usize, reason: &str| CheckFailure { index, reason: reason.to_string() };
    for (index, entry) in cert.entries.iter().enumerate() {
        match entry {
            CertEntry::BisectorMembership { p, p1, p2 } => {
                let lhs = space
                    .herm(p, p1)
                    .map_err(|e| fail(index, &e.to_string()))?
                    .norm_sq()
                    * space.norm(p2).map_err(|e| fail(index, &e.to_string()))?;
                let rhs = space
                    .herm(p, p2)
                    .map_err(|e| fail(index, &e.to_string()))?
                    .norm_sq()
                    * space.norm(p1).map_err(|e| fail(index, &e.to_string()))?;
                if lhs != rhs {
                    return Err(fail(index, "membership polynomial violated"));
                }
                for v in [p, p1, p2] {
                    if space.classify(v) != Ok(crate::linalg::SignClass::Negative) {
                        return Err(fail(index, "operand is not interior"));
                    }
                }
            }
            CertEntry::SpineProjection { p, p1, p2, projection } => {
                // Projection lives in the span and the residual is
                // orthogonal to it.
                if quaternion_rank(&[p1.clone(), p2.clone(), projection.clone()]) != 2 {
                    return Err(fail(index, "projection outside the spine span"));
                }
                let residual = p.sub(projection);
                for basis in [p1, p2] {
                    let inner = space
                        .herm(basis, &residual)
                        .map_err(|e| fail(index, &e.to_string()))?;
                    if !inner.is_zero() {
                        return Err(fail(index, "projection residual not orthogonal"));
                    }
                }
                // The foot is equidistant from the defining pair.
                let lhs = space
                    .herm(projection, p1)
                    .map_err(|e| fail(index, &e.to_string()))?
                    .norm_sq()
                    * space.norm(p2).map_err(|e| fail(index, &e.to_string()))?;
                let rhs = space
                    .herm(projection, p2)
                    .map_err(|e| fail(index, &e.to_string()))?
                    .norm_sq()
                    * space.norm(p1).map_err(|e| fail(index, &e.to_string()))?;
                if lhs != rhs {
                    return Err(fail(index, "projection foot is off the real spine"));
                }
            }
            CertEntry::TripleReality { p, q, r } => {
                let pq = space.herm(p, q).map_err(|e| fail(index, &e.to_string()))?;
                let qr = space.herm(q, r).map_err(|e| fail(index, &e.to_string()))?;
                let rp = space.herm(r, p).map_err(|e| fail(index, &e.to_string()))?;
                let triple = &(&pq * &qr) * &rp;
                if !triple.im_norm_sq().is_zero() {
                    return Err(fail(index, "triple product is not real"));
                }
            }
            CertEntry::PythagorasSplit { p, projection, r } => {
                let d = |a: &HVector<Exact>, b: &HVector<Exact>| -> Result<Exact, CheckFailure> {
                    let cross = space.herm(a, b).map_err(|e| fail(index, &e.to_string()))?;
                    let den = space.norm(a).map_err(|e| fail(index, &e.to_string()))?
                        * space.norm(b).map_err(|e| fail(index, &e.to_string()))?;
                    Ok(cross.norm_sq() / den)
                };
                let lhs = d(p, r)?;
                let rhs = d(p, projection)? * d(projection, r)?;
                if lhs != rhs {
                    return Err(fail(index, "Pythagorean identity violated"));
                }
            }
        }
    }
    Ok(())
}
