use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rfext_core::linearcode::random_error;
use rfext_core::{code_from_key, derive_fuzzy_params, derive_params, BitString, Extractor, FuzzyExtractor, Variant};

fn errorless(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for variant in [Variant::New, Variant::DkrsPost] {
        let p = derive_params(1024, 768, Rational64::from_integer(64), Rational64::from_integer(1), variant).unwrap();
        let ex = Extractor::new(p).unwrap();
        let w = BitString::random(1024, &mut rng);
        let (_, helper) = ex.gen(&w, &mut rng).unwrap();
        c.bench_function(&format!("gen_1024_{variant}"), |b| b.iter(|| ex.gen(black_box(&w), &mut rng).unwrap()));
        c.bench_function(&format!("rep_1024_{variant}"), |b| b.iter(|| ex.rep(black_box(&w), &helper).unwrap()));
    }
}

fn fuzzy(c: &mut Criterion) {
    let code = Arc::new(code_from_key("bch-255-8").unwrap());
    let p = derive_fuzzy_params(code, 255, Rational64::from_integer(8), Rational64::from_integer(2), true).unwrap();
    let fx = FuzzyExtractor::new(p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = BitString::random(255, &mut rng);
    let (_, helper) = fx.gen(&w, &mut rng).unwrap();
    let noisy = w.xor(&random_error(255, 8, &mut rng));
    c.bench_function("fuzzy_gen_bch255", |b| b.iter(|| fx.gen(black_box(&w), &mut rng).unwrap()));
    c.bench_function("fuzzy_rep_bch255_8_errors", |b| b.iter(|| fx.rep(black_box(&noisy), &helper).unwrap()));
}

criterion_group!(benches, errorless, fuzzy);
criterion_main!(benches);
