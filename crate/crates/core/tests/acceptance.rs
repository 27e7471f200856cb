//! Acceptance gate: every certified property at its full trial volume, with
//! one pass/fail line per criterion (run with `--nocapture` to see them all).
//!
//! The heavy criteria serialize on a global lock so that their wall-clock
//! budgets are measured without interference; trials inside each criterion
//! still parallelize across the thread budget.

use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::{Duration, Instant};

use qbisect_core::bisector::hermitian_triple;
use qbisect_core::fan::{blade_containing, fan_blade, starlike_certificate, FanDecomposition};
use qbisect_core::harness::{
    certificate, parallel_trials, sampler, Backend, Scenario, SuiteKind, TrialOutcome, Trials,
};
use qbisect_core::model::{delta, dist, project_point, quaternionic_span, BallPoint};
use qbisect_core::prng::SplitMix64;
use qbisect_core::scalar::{relative_residual, Exact, Scalar};
use qbisect_core::{Bisector, ProjectivePoint, Quaternion};

fn lock() -> MutexGuard<'static, ()> {
    static GATE: OnceLock<Mutex<()>> = OnceLock::new();
    GATE.get_or_init(|| Mutex::new(()))
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner())
}

struct Outcome {
    violations: usize,
    trials: usize,
    detail: String,
    witnesses: Vec<String>,
}

fn report(criterion: &str, started: Instant, limit: Duration, outcome: &Outcome) {
    let elapsed = started.elapsed();
    let status = if outcome.violations == 0 { "PASS" } else { "FAIL" };
    println!(
        "criterion {criterion}: {status} — {} ({} trials, {} violations, {:.2?} elapsed, limit {:.0?})",
        outcome.detail, outcome.trials, outcome.violations, elapsed, limit
    );
    for w in &outcome.witnesses {
        println!("criterion {criterion} witness: {w}");
    }
    assert_eq!(
        outcome.violations, 0,
        "criterion {criterion}: {} violations — {}; witnesses: {:?}",
        outcome.violations, outcome.detail, outcome.witnesses
    );
    assert!(
        elapsed < limit,
        "criterion {criterion}: exceeded the time budget: {elapsed:.2?} > {limit:.0?}"
    );
}

fn count_failures(outcomes: &[TrialOutcome]) -> usize {
    outcomes.iter().filter(|o| !o.ok).count()
}

fn witnesses_of(outcomes: &[TrialOutcome]) -> Vec<String> {
    outcomes
        .iter()
        .filter(|o| !o.ok)
        .take(4)
        .map(|o| o.witness.clone().unwrap_or_else(|| "unspecified".into()))
        .collect()
}

fn rat(n: i64, d: i64) -> Exact {
    <Exact as Scalar>::from_ratio(n, d)
}

/// An exact bisector point through the slice machinery (low rational height,
/// independent of the chord sampler used elsewhere).
fn light_bisector_point(
    b: &Bisector<Exact>,
    rng: &mut SplitMix64,
) -> Option<ProjectivePoint<Exact>> {
    let s = sampler::sigma_point(b, rng);
    let slice = b.slice_at(&s).ok()?;
    sampler::slice_point(b, &slice, rng)
}

// ---------------------------------------------------------------------------

#[test]
fn acceptance_01_quaternion_algebra() {
    let _gate = lock();
    let start = Instant::now();
    let root = SplitMix64::new(101);
    let outcomes = parallel_trials(&root, "acc-quaternion", 10_000, |_, rng| {
        let a: Quaternion<Exact> = sampler::quaternion(rng);
        let b: Quaternion<Exact> = sampler::quaternion(rng);
        let c: Quaternion<Exact> = sampler::quaternion(rng);
        let assoc = (&(&a * &b) * &c).eq_q(&(&a * &(&b * &c)));
        let norm_mult = (&a * &b).norm_sq() == a.norm_sq() * b.norm_sq();
        let conj_anti = (&a * &b).conj().eq_q(&(&b.conj() * &a.conj()));
        let similar_conj = a.is_similar(&a.conj());
        TrialOutcome::check(assoc && norm_mult && conj_anti && similar_conj, || {
            format!("a={a} b={b} c={c}")
        })
    });
    let outcome = Outcome {
        violations: count_failures(&outcomes),
        trials: outcomes.len(),
        detail: "ring axioms, norm multiplicativity, conjugation, self-conjugate similarity".into(),
        witnesses: witnesses_of(&outcomes),
    };
    report("1", start, Duration::from_secs(5), &outcome);
}

#[test]
fn acceptance_02_mostow_decomposition() {
    let _gate = lock();
    let start = Instant::now();
    let mut violations = 0;
    let mut trials = 0;
    let mut witnesses = Vec::new();
    for n in [2usize, 3] {
        let root = SplitMix64::new(200 + n as u64);
        // Forward: 10³ spine samples × 10 fiber samples, exact membership.
        let forward = parallel_trials(&root, "acc-mostow-fwd", 1000, |_, rng| {
            let b: Bisector<Exact> = sampler::bisector(rng, n);
            let s = sampler::sigma_point(&b, rng);
            let slice = match b.slice_at(&s) {
                Ok(slice) => slice,
                Err(e) => return TrialOutcome::check(false, || format!("slice: {e}")),
            };
            let mut placed = 0;
            for _ in 0..32 {
                if placed == 10 {
                    break;
                }
                let Some(p) = sampler::slice_point(&b, &slice, rng) else { continue };
                placed += 1;
                if !b.contains(&p).unwrap_or(false) {
                    return TrialOutcome::check(false, || "fiber point off bisector".into());
                }
            }
            TrialOutcome::check(placed == 10, || "fiber sampling starved".into())
        });
        violations += count_failures(&forward);
        witnesses.extend(witnesses_of(&forward));
        trials += forward.len() * 10;
        // Reverse: 10³ bisector points project onto the real spine, exactly.
        let reverse = parallel_trials(&root, "acc-mostow-rev", 1000, |_, rng| {
            let b: Bisector<Exact> = sampler::bisector(rng, n);
            let p = sampler::bisector_point(&b, rng);
            let foot = match b.project_to_spine(&p) {
                Ok(foot) => foot,
                Err(e) => return TrialOutcome::check(false, || format!("projection: {e}")),
            };
            TrialOutcome::check(b.real_spine_contains(&foot).unwrap_or(false), || {
                "projection missed σ".into()
            })
        });
        violations += count_failures(&reverse);
        witnesses.extend(witnesses_of(&reverse));
        trials += reverse.len();
    }
    let outcome = Outcome {
        violations,
        trials,
        detail: "slice fibers inside B and B projecting onto σ, n = 2 and 3".into(),
        witnesses,
    };
    report("2", start, Duration::from_secs(60), &outcome);
}

#[test]
fn acceptance_03_triple_product_reality() {
    let _gate = lock();
    let start = Instant::now();
    let root = SplitMix64::new(303);
    let outcomes = parallel_trials(&root, "acc-triple", 1000, |_, rng| {
        let n = 2 + (rng.below(2) as usize);
        let p1 = sampler::interior_point::<Exact>(rng, n);
        let p2 = sampler::interior_point::<Exact>(rng, n);
        if p1.same_point(&p2) {
            return TrialOutcome::pass();
        }
        let Ok(spine) = quaternionic_span(&p1, &p2) else {
            return TrialOutcome::pass();
        };
        let outside = sampler::interior_point::<Exact>(rng, n);
        let Ok(foot) = project_point(&spine, &outside) else {
            return TrialOutcome::check(false, || "projection failed".into());
        };
        // r: any interior point of the spine (rejection over combinations).
        let mut r = None;
        for _ in 0..64 {
            let lift = spine.subspace.basis[0]
                .scale_right(&sampler::small_quaternion::<Exact>(rng))
                .add(&spine.subspace.basis[1].scale_right(&sampler::small_quaternion::<Exact>(rng)))
                .reduced();
            if let Ok(pt) = ProjectivePoint::interior_from_lift(spine.subspace.space, lift) {
                r = Some(pt);
                break;
            }
        }
        let Some(r) = r else { return TrialOutcome::pass() };
        let triple = hermitian_triple(&outside, &foot, &r).expect("canonical lifts");
        TrialOutcome::check(triple.im_norm_sq().is_zero(), || {
            format!("non-real triple {triple}")
        })
    });
    let mut violations = count_failures(&outcomes);

    // The pinned instance: p = ball(j/2, k/2), r = ball(1/2, 0) → −51/64.
    let p = BallPoint::new(vec![
        Quaternion::<Exact>::j().scale(&rat(1, 2)),
        Quaternion::<Exact>::k().scale(&rat(1, 2)),
    ])
    .unwrap()
    .lift();
    let q = BallPoint::new(vec![Quaternion::<Exact>::j().scale(&rat(1, 2)), Quaternion::zero()])
        .unwrap()
        .lift();
    let r = BallPoint::new(vec![Quaternion::from_real(rat(1, 2)), Quaternion::zero()])
        .unwrap()
        .lift();
    let instance = hermitian_triple(&p, &q, &r).unwrap();
    if !instance.eq_q(&Quaternion::from_real(rat(-51, 64))) {
        violations += 1;
    }

    let outcome = Outcome {
        violations,
        trials: outcomes.len() + 1,
        detail: "triple products of projection triangles are real; instance −51/64".into(),
        witnesses: witnesses_of(&outcomes),
    };
    report("3", start, Duration::from_secs(5), &outcome);
}

#[test]
fn acceptance_04_pythagorean_identity() {
    let _gate = lock();
    let start = Instant::now();
    let root = SplitMix64::new(404);
    // Exact: 10³ configurations with exact equality.
    let exact = parallel_trials(&root, "acc-pyth-exact", 1000, |_, rng| {
        let n = 2 + (rng.below(2) as usize);
        pythagorean_trial::<Exact>(rng, n, None)
    });
    // Float: 10³ configurations with relative residual at most 1e-9.
    let float = parallel_trials(&root, "acc-pyth-float", 1000, |_, rng| {
        let n = 2 + (rng.below(2) as usize);
        pythagorean_trial::<f64>(rng, n, Some(1e-9))
    });
    let mut witnesses = witnesses_of(&exact);
    witnesses.extend(witnesses_of(&float));
    let outcome = Outcome {
        violations: count_failures(&exact) + count_failures(&float),
        trials: exact.len() + float.len(),
        detail: "δ(p,r) = δ(p,Πp)·δ(Πp,r), exact and residual ≤ 1e-9".into(),
        witnesses,
    };
    report("4", start, Duration::from_secs(10), &outcome);
}

fn pythagorean_trial<S: Scalar>(
    rng: &mut SplitMix64,
    n: usize,
    float_budget: Option<f64>,
) -> TrialOutcome {
    let p1 = sampler::interior_point::<S>(rng, n);
    let p2 = sampler::interior_point::<S>(rng, n);
    if p1.same_point(&p2) {
        return TrialOutcome::pass();
    }
    let Ok(spine) = quaternionic_span(&p1, &p2) else {
        return TrialOutcome::pass();
    };
    let outside = sampler::interior_point::<S>(rng, n);
    let Ok(foot) = project_point(&spine, &outside) else {
        return TrialOutcome::check(false, || "projection failed".into());
    };
    let lhs = delta(&outside, &p1).expect("interior");
    let rhs = delta(&outside, &foot).expect("interior") * delta(&foot, &p1).expect("interior");
    match float_budget {
        None => TrialOutcome::check(lhs == rhs, || "exact identity violated".into()),
        Some(budget) => {
            let residual = relative_residual(lhs.to_f64(), rhs.to_f64());
            TrialOutcome::check(residual <= budget, || format!("residual {residual:.3e}"))
                .with_residual(residual)
        }
    }
}

#[test]
fn acceptance_05_orthogonal_blade_pairs() {
    let _gate = lock();
    let start = Instant::now();
    let root = SplitMix64::new(505);
    let outcomes = parallel_trials(&root, "acc-pairs", 100, |idx, rng| {
        let n = 2 + (idx % 2);
        let b: Bisector<Exact> = sampler::bisector(rng, n);
        let o = b.center.clone();
        let blade = match fan_blade(&b, &o, rng.next_u64(), 0) {
            Ok(blade) => blade,
            Err(e) => return TrialOutcome::check(false, || format!("blade: {e}")),
        };
        let i_n = &blade.reflection.isometry;
        let Ok(refl_m) = qbisect_core::isometry::reflection_in_complex_type(&blade.carrier)
        else {
            return TrialOutcome::check(false, || "carrier reflection failed".into());
        };
        let i_m = &refl_m.isometry;
        let conformal = i_m.conformal_factor().is_some() && i_n.conformal_factor().is_some();
        let involutions = i_m.is_projective_involution() && i_n.is_projective_involution();
        let commute = i_m.commutes_projectively(i_n);
        let meridian = blade.verify_meridian_intersection();
        TrialOutcome::check(conformal && involutions && commute && meridian, || {
            format!(
                "conformal {conformal}, involutions {involutions}, commute {commute}, M∩N=S {meridian}"
            )
        })
    });
    let outcome = Outcome {
        violations: count_failures(&outcomes),
        trials: outcomes.len(),
        detail: "reflections conformally symplectic, involutive, commuting, with M ∩ N = S".into(),
        witnesses: witnesses_of(&outcomes),
    };
    report("5", start, Duration::from_secs(30), &outcome);
}

#[test]
fn acceptance_06_fan_decomposition() {
    let _gate = lock();
    let start = Instant::now();
    let mut violations = 0;
    let mut trials = 0;

    let mut witnesses = Vec::new();
    // 200 exact bisector points across n = 2 and n = 3: the blade through
    // each contains the point and the center, and 100 samples of it satisfy
    // the parent predicate exactly.
    for n in [2usize, 3] {
        let root = SplitMix64::new(600 + n as u64);
        let outcomes = parallel_trials(&root, "acc-fan-points", 100, |_, rng| {
            let b: Bisector<Exact> = sampler::bisector(rng, n);
            let o = b.center.clone();
            let Some(p) = light_bisector_point(&b, rng) else {
                return TrialOutcome::check(false, || "point sampling starved".into());
            };
            let blade = match blade_containing(&b, &o, &p) {
                Ok(blade) => blade,
                Err(e) => return TrialOutcome::check(false, || format!("blade_containing: {e}")),
            };
            if !blade.contains(&p) || !blade.contains(&o) {
                return TrialOutcome::check(false, || "blade misses p or o".into());
            }
            let samples = blade.sample_points(rng, 100);
            if samples.len() != 100 {
                return TrialOutcome::check(false, || "blade sampling starved".into());
            }
            for x in samples {
                if !b.contains(&x).unwrap_or(false) {
                    return TrialOutcome::check(false, || "blade sample off bisector".into());
                }
            }
            TrialOutcome::pass()
        });
        violations += count_failures(&outcomes);
        witnesses.extend(witnesses_of(&outcomes));
        trials += outcomes.len();
    }

    // 20 selector pairs: the sharp intersection law — one real-spine
    // geodesic through the center — verified by exact rank tests. The
    // literal point-only claim is measured alongside and reported below.
    use std::sync::atomic::{AtomicUsize, Ordering};
    let root = SplitMix64::new(666);
    let literal_counter = AtomicUsize::new(0);
    let sharp_counter = AtomicUsize::new(0);
    let exceptional_counter = AtomicUsize::new(0);
    let compared_counter = AtomicUsize::new(0);
    let pair_outcomes = parallel_trials(&root, "acc-fan-pairs", 20, |idx, rng| {
        let idx = idx as u64;
        let b: Bisector<Exact> = sampler::bisector(rng, 2);
        let fan = FanDecomposition::at_midpoint(b.clone()).expect("midpoint on spine");
        let (blade_a, blade_b) = match (fan.blade(2 * idx, 0), fan.blade(2 * idx + 1, 0)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return TrialOutcome::check(false, || "selector blade failed".into()),
        };
        if blade_a.m_direction.same_direction(&blade_b.m_direction) {
            return TrialOutcome::pass();
        }
        compared_counter.fetch_add(1, Ordering::Relaxed);
        if blade_a.intersection_is_center(&blade_b) {
            literal_counter.fetch_add(1, Ordering::Relaxed);
        }
        if blade_a.same_set(&blade_b) {
            return TrialOutcome::check(false, || "distinct selectors yielded one blade".into());
        }
        let verdict = match blade_a.intersection_verdict(&blade_b, &b) {
            Ok(v) => v,
            Err(e) => return TrialOutcome::check(false, || format!("intersection: {e}")),
        };
        // Universal law: the meet holds the center and sits inside B.
        if !verdict.contains_center || !verdict.inside_bisector {
            return TrialOutcome::check(false, || {
                format!("meet (rank {}) escapes the bisector or misses the center", verdict.rank)
            });
        }
        // Sharp law in general position: the meet is one spine geodesic.
        if verdict.rank == 2 {
            sharp_counter.fetch_add(1, Ordering::Relaxed);
            TrialOutcome::check(verdict.is_spine_geodesic, || {
                "rank-2 meet is not a spine geodesic through o".into()
            })
        } else {
            // Exceptional configuration: the two blade directions collide,
            // so the blades share a complex geodesic (or more) through o.
            exceptional_counter.fetch_add(1, Ordering::Relaxed);
            TrialOutcome::pass()
        }
    });
    let literal_holds = literal_counter.load(Ordering::Relaxed);
    let compared = compared_counter.load(Ordering::Relaxed);
    let sharp = sharp_counter.load(Ordering::Relaxed);
    let exceptional = exceptional_counter.load(Ordering::Relaxed);
    violations += count_failures(&pair_outcomes);
    witnesses.extend(witnesses_of(&pair_outcomes));
    trials += pair_outcomes.len();
    println!(
        "criterion 6 (pairwise intersections, as literally stated \"exactly {{o}}\"): FAIL — \
         holds for {literal_holds}/{compared} pairs; two maximal blades through one center \
         always share at least a real-spine geodesic (recorded counterexample). Verified \
         instead: meets contain o and sit inside B exactly on all {compared} pairs; \
         {sharp} general-position pairs meet in exactly one spine geodesic; \
         {exceptional} exceptional pairs share a larger totally geodesic set"
    );

    // At least two provably distinct fan decompositions of one bisector.
    let mut rng = SplitMix64::new(677);
    let b: Bisector<Exact> = sampler::bisector(&mut rng, 2);
    let o1 = b.center.clone();
    let mut o2 = sampler::sigma_point(&b, &mut rng);
    while o2.same_point(&o1) {
        o2 = sampler::sigma_point(&b, &mut rng);
    }
    let fan1 = FanDecomposition::new(b.clone(), o1).unwrap();
    let fan2 = FanDecomposition::new(b.clone(), o2.clone()).unwrap();
    let mut distinct_shown = false;
    for sel in 0..8u64 {
        let Ok(blade1) = fan1.blade(sel, 0) else { continue };
        if !blade1.contains(&o2) {
            let Ok(blade2) = fan2.blade(0, 0) else { continue };
            if blade2.contains(&o2) && !blade1.same_set(&blade2) {
                distinct_shown = true;
                break;
            }
        }
    }
    trials += 1;
    if !distinct_shown {
        violations += 1;
    }

    let outcome = Outcome {
        violations,
        trials,
        detail: "blade through each point inside B; sharp pairwise law; two distinct decompositions"
            .into(),
        witnesses,
    };
    report("6", start, Duration::from_secs(120), &outcome);
}

#[test]
fn acceptance_07_starlikeness() {
    let _gate = lock();
    let start = Instant::now();
    let root = SplitMix64::new(707);
    // Exact blade-route certificates for 100 (o, p) pairs.
    let exact = parallel_trials(&root, "acc-star", 100, |idx, rng| {
        let n = 2 + (idx % 2);
        let b: Bisector<Exact> = sampler::bisector(rng, n);
        let o = sampler::sigma_point(&b, rng);
        let Some(p) = light_bisector_point(&b, rng) else {
            return TrialOutcome::check(false, || "point sampling starved".into());
        };
        match starlike_certificate(&b, &o, &p) {
            Ok(cert) => TrialOutcome::check(
                cert.blade.contains(&o) && cert.blade.contains(&p),
                || "certificate misses an endpoint".into(),
            ),
            Err(e) => TrialOutcome::check(false, || format!("certificate: {e}")),
        }
    });
    // Float: 20-point residual scans at 1e-9.
    let float = parallel_trials(&root, "acc-star-float", 100, |_, rng| {
        let b: Bisector<f64> = sampler::bisector(rng, 2);
        let o = sampler::sigma_point(&b, rng);
        let p = sampler::bisector_point(&b, rng);
        if o.same_point(&p) {
            return TrialOutcome::pass();
        }
        match qbisect_core::fan::starlike_residuals(&b, &o, &p, 20) {
            Ok(residuals) => {
                let max = residuals.iter().cloned().fold(0.0f64, f64::max);
                TrialOutcome::check(max <= 1e-9, || format!("residual {max:.3e}"))
            }
            Err(e) => TrialOutcome::check(false, || format!("residual scan: {e}")),
        }
    });
    let mut witnesses = witnesses_of(&exact);
    witnesses.extend(witnesses_of(&float));
    let outcome = Outcome {
        violations: count_failures(&exact) + count_failures(&float),
        trials: exact.len() + float.len(),
        detail: "blade-route exact certificates and float residual scans".into(),
        witnesses,
    };
    report("7", start, Duration::from_secs(30), &outcome);
}

#[test]
fn acceptance_08_spine_uniqueness() {
    let _gate = lock();
    let start = Instant::now();
    let root = SplitMix64::new(808);
    let outcomes = parallel_trials(&root, "acc-spine", 50, |idx, rng| {
        let n = 2 + (idx % 2);
        let b: Bisector<Exact> = sampler::bisector(rng, n);
        let o = sampler::sigma_point(&b, rng);
        let rebuilt = match b.recentered_pair(&o) {
            Ok(r) => r,
            Err(e) => return TrialOutcome::check(false, || format!("rebuild: {e}")),
        };
        if !b.same_spine(&rebuilt) {
            return TrialOutcome::check(false, || "quaternionic spines differ".into());
        }
        // With Σ(B) = Σ(B′) certified, σ-agreement on spine samples reduces
        // to the equidistance polynomial of the rebuilt pair.
        for _ in 0..100 {
            let s = sampler::sigma_point(&b, rng);
            if !rebuilt.contains(&s).unwrap_or(false) {
                return TrialOutcome::check(false, || "σ-membership disagrees".into());
            }
        }
        TrialOutcome::pass()
    });
    let outcome = Outcome {
        violations: count_failures(&outcomes),
        trials: outcomes.len() * 100,
        detail: "rebuilt bisectors share the quaternionic spine and σ-membership".into(),
        witnesses: witnesses_of(&outcomes),
    };
    report("8", start, Duration::from_secs(30), &outcome);
}

#[test]
fn acceptance_09_h4_isometry_cross_check() {
    let _gate = lock();
    let start = Instant::now();
    let root = SplitMix64::new(909);
    let outcomes = parallel_trials(&root, "acc-h4", 1000, |_, rng| {
        // Points on a quaternionic line through the origin; the metric must
        // match the independently coded Poincaré 4-ball oracle (half
        // distances) to 1e-12 relative.
        let z: Quaternion<f64> = sampler::quaternion::<f64>(rng).scale(&0.45);
        let w: Quaternion<f64> = sampler::quaternion::<f64>(rng).scale(&0.45);
        let make = |q: &Quaternion<f64>| {
            BallPoint::new(vec![q.clone(), Quaternion::zero()]).ok().map(|b| b.lift())
        };
        let (Some(p), Some(q)) = (make(&z), make(&w)) else {
            return TrialOutcome::pass();
        };
        let d_model = dist(&p, &q).expect("interior");
        let diff = &z - &w;
        let den = (1.0 - z.norm_sq()) * (1.0 - w.norm_sq());
        let d_oracle = (1.0 + 2.0 * diff.norm_sq() / den).acosh() / 2.0;
        let residual = relative_residual(d_model, d_oracle);
        TrialOutcome::check(residual <= 1e-12, || format!("residual {residual:.3e}"))
            .with_residual(residual)
    });
    let outcome = Outcome {
        violations: count_failures(&outcomes),
        trials: outcomes.len(),
        detail: "spine metric vs Poincaré 4-ball oracle ≤ 1e-12 relative".into(),
        witnesses: witnesses_of(&outcomes),
    };
    report("9", start, Duration::from_secs(5), &outcome);
}

#[test]
fn acceptance_10_determinism() {
    let _gate = lock();
    let start = Instant::now();
    let scenario = Scenario {
        n: 2,
        backend: Backend::Exact,
        seed: 4242,
        tolerance: 1e-9,
        trials: Trials::default(),
        suites: SuiteKind::all(),
    };
    let report_a = qbisect_core::harness::run(&scenario).unwrap().to_json();
    let report_b = qbisect_core::harness::run(&scenario).unwrap().to_json();
    let cert_a = serde_json::to_string(&certificate::certify(&scenario).unwrap()).unwrap();
    let cert_b = serde_json::to_string(&certificate::certify(&scenario).unwrap()).unwrap();
    let violations = usize::from(report_a != report_b) + usize::from(cert_a != cert_b);
    let outcome = Outcome {
        violations,
        trials: 2,
        detail: "byte-identical reports and certificates across reruns".into(),
        witnesses: Vec::new(),
    };
    report("10", start, Duration::from_secs(120), &outcome);

    // Verify the certificate also checks.
    let cert: certificate::Certificate = serde_json::from_str(&cert_a).unwrap();
    assert!(certificate::check(&cert).is_ok());
}

/// The literal reading of the pairwise clause of criterion 6: blades with
/// distinct selectors intersect in exactly the center point. This is
/// mathematically unattainable — each maximal blade meets the real spine in
/// a 2-plane of directions, and two 2-planes in the 3-dimensional imaginary
/// space always share a line — so any two blades through one center share a
/// whole geodesic of σ. Kept runnable (`--ignored`) as the faithful
/// implementation of the stated test; expected to fail on every pair.
#[test]
#[ignore = "unattainable as literally stated; see the fan pairwise note and the sharp law in acceptance_06"]
fn acceptance_06b_literal_point_intersection() {
    let root = SplitMix64::new(666);
    let mut rng = root.split_labeled("literal");
    let b: Bisector<Exact> = sampler::bisector(&mut rng, 2);
    let fan = FanDecomposition::at_midpoint(b).expect("midpoint on spine");
    let blade_a = fan.blade(0, 0).unwrap();
    let blade_b = fan.blade(1, 0).unwrap();
    assert!(!blade_a.m_direction.same_direction(&blade_b.m_direction));
    assert!(
        blade_a.intersection_is_center(&blade_b),
        "blades intersect in more than the center (they share a spine geodesic)"
    );
}
