use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thetarep::gf::{Elt, FieldSpec};
use thetarep::group::GroupElement;
use thetarep::rep::RepSpace;

fn bench_action(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (p, f, r) in [(3u32, 2u32, vec![29u32, 29]), (5, 1, vec![200]), (3, 3, vec![8, 8, 8])] {
        let field = FieldSpec::build(p, f).unwrap();
        let space = RepSpace::weight(&field, &r).unwrap();
        let g = GroupElement::random(&field, &mut rng);
        let action = space.action(&g).unwrap();
        let v: Vec<Elt> = (0..space.dim()).map(|_| rng.gen_range(0..field.q()) as Elt).collect();
        c.bench_function(&format!("apply p={p} f={f} r={r:?}"), |b| b.iter(|| action.apply(black_box(&v)).unwrap()));
    }
    let field = FieldSpec::build(3, 2).unwrap();
    let space = RepSpace::tensor(&field, &[&[4, 4], &[8, 8]], 0).unwrap();
    let g = GroupElement::random(&field, &mut rng);
    c.bench_function("action setup tensor (4,4)x(8,8)", |b| b.iter(|| space.action(black_box(&g)).unwrap()));
}

criterion_group!(benches, bench_action);
criterion_main!(benches);
