use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weylith::tate::tate_segment;
use weylith::weyman::weyman_complex;
use weylith::{
    sylvester_resultant, DenseMatrix, FpDefault, Rat, SheafKind, SheafSpec,
};

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix<Rat> {
    DenseMatrix::from_fn(rows, cols, |_, _| Rat::from_int(rng.gen_range(-9..=9)))
}

fn bench_rref(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    c.bench_function("rref 40x60 over the rationals", |b| {
        b.iter_batched(
            || random_matrix(&mut rng, 40, 60),
            |m| m.rref(),
            BatchSize::SmallInput,
        )
    });
}

fn bench_segment(c: &mut Criterion) {
    let spec = SheafSpec::new(SheafKind::Veronese { d: 3, twist: 0 }, 4);
    c.bench_function("segment of the twisted cubic over [-3, 3]", |b| {
        b.iter(|| tate_segment::<Rat>(&spec, -3, 3).unwrap())
    });
    c.bench_function("same segment over the prime field", |b| {
        b.iter(|| tate_segment::<FpDefault>(&spec, -3, 3).unwrap())
    });
}

fn bench_complex(c: &mut Criterion) {
    let spec = SheafSpec::new(SheafKind::Veronese { d: 2, twist: 0 }, 3);
    c.bench_function("level-2 complex of the conic", |b| {
        b.iter(|| weyman_complex::<Rat>(&spec, 2).unwrap())
    });
}

fn bench_sylvester(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    c.bench_function("sylvester resultant of two sextics", |b| {
        b.iter_batched(
            || {
                let f: Vec<Rat> = (0..7).map(|_| Rat::from_int(rng.gen_range(-9..=9))).collect();
                let g: Vec<Rat> = (0..7).map(|_| Rat::from_int(rng.gen_range(-9..=9))).collect();
                (f, g)
            },
            |(f, g)| sylvester_resultant(&f, &g),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, bench_rref, bench_segment, bench_complex, bench_sylvester);
criterion_main!(benches);
