use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use qbisect_core::harness::sampler;
use qbisect_core::linalg::{orth_project, Mat};
use qbisect_core::prng::SplitMix64;
use qbisect_core::scalar::Exact;
use qbisect_core::{Bisector, HVector, HermitianSpace, Quaternion};

fn bench_form(c: &mut Criterion) {
    let space = HermitianSpace::new(3);
    let mut rng = SplitMix64::new(1);
    let v = HVector::<Exact>::new((0..4).map(|_| sampler::quaternion(&mut rng)).collect());
    let w = HVector::<Exact>::new((0..4).map(|_| sampler::quaternion(&mut rng)).collect());
    c.bench_function("herm_form_n3_exact", |b| {
        b.iter(|| space.herm(&v, &w).unwrap())
    });

    let vf = HVector::<f64>::new((0..4).map(|_| sampler::quaternion(&mut rng)).collect());
    let wf = HVector::<f64>::new((0..4).map(|_| sampler::quaternion(&mut rng)).collect());
    c.bench_function("herm_form_n3_float", |b| {
        b.iter(|| space.herm(&vf, &wf).unwrap())
    });
}

fn bench_solver(c: &mut Criterion) {
    let mut rng = SplitMix64::new(2);
    let size = 4;
    let mat = Mat::<Exact>::from_rows(
        (0..size)
            .map(|_| (0..size).map(|_| sampler::quaternion(&mut rng)).collect())
            .collect(),
    );
    let x = HVector::new((0..size).map(|_| sampler::quaternion(&mut rng)).collect());
    let rhs = mat.mul_vec(&x);
    c.bench_function("solve_right_4x4_exact", |b| {
        b.iter(|| mat.solve_right(&rhs).unwrap())
    });
}

fn bench_bisector(c: &mut Criterion) {
    let mut rng = SplitMix64::new(3);
    let b: Bisector<Exact> = sampler::bisector(&mut rng, 2);
    let p = sampler::bisector_point(&b, &mut rng);
    c.bench_function("membership_predicate_exact", |bench| {
        bench.iter(|| b.contains(&p).unwrap())
    });
    c.bench_function("chord_point_exact", |bench| {
        bench.iter_batched(
            || SplitMix64::new(rng.next_u64()),
            |mut r| sampler::bisector_point(&b, &mut r),
            BatchSize::SmallInput,
        )
    });
    c.bench_function("spine_projection_exact", |bench| {
        bench.iter(|| orth_project(&b.spine.subspace, p.lift()).unwrap())
    });
}

fn bench_fan(c: &mut Criterion) {
    let mut rng = SplitMix64::new(4);
    let b: Bisector<Exact> = sampler::bisector(&mut rng, 2);
    let o = b.center.clone();
    c.bench_function("fan_blade_n2_exact", |bench| {
        let mut sel = 0u64;
        bench.iter(|| {
            sel += 1;
            qbisect_core::fan::fan_blade(&b, &o, sel, 0).unwrap()
        })
    });
    let _ = Quaternion::<Exact>::one();
}

criterion_group!(benches, bench_form, bench_solver, bench_bisector, bench_fan);
criterion_main!(benches);
