use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use iqa_benches::textured;
use iqa_core::perturb::parse_condition;
use iqa_core::{apply_condition, GaussMode, ImageKey};
use std::hint::black_box;

fn conditions(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_condition");
    for (channels, dataset) in [(1, "mnist"), (3, "cifar10")] {
        let img = textured(channels, 1);
        for name in ["SP0.2GA0", "SP0GA0.2", "SP0.1GA0.1", "SP0RR30", "RL60SP0.2"] {
            let cond = parse_condition(name).unwrap();
            group.bench_with_input(BenchmarkId::new(dataset, name), &cond, |b, cond| {
                b.iter(|| {
                    let key = ImageKey {
                        seed: 1,
                        dataset,
                        image_id: 7,
                    };
                    apply_condition(black_box(&img), cond, key, GaussMode::Variance).unwrap()
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, conditions);
criterion_main!(benches);
