use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use realonline::entropy::{admissible_grid, check_cover_split, FiniteClass};
use realonline::exec::{stream_rng, Exec};
use realonline::losses::Loss;
use realonline::registry::{play, GameSpec};

fn games(c: &mut Criterion) {
    let spec = GameSpec { l: 2.0, d: 2, q: 2.0, t: 400, ..GameSpec::default() };
    let loss = Loss::squared();
    let mut group = c.benchmark_group("games");
    group.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        group.bench_with_input(BenchmarkId::new("far-endpoint x32", format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| {
                exec.map_range(32, |i| {
                    play("envelope", "far-endpoint", &spec, &loss, 1, i as u64).unwrap().transcript.cumulative_loss
                })
            })
        });
    }
    group.finish();
}

fn cover_splits(c: &mut Criterion) {
    let classes: Vec<FiniteClass> = (0..64)
        .map(|i| {
            let mut rng = stream_rng(2, i);
            FiniteClass::random(&mut rng, 12, 4, &[0.0, 0.25, 0.5, 0.75, 1.0], Loss::absolute()).unwrap()
        })
        .collect();
    let mut group = c.benchmark_group("cover-split");
    group.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        group.bench_with_input(BenchmarkId::new("random classes x64", format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| {
                exec.map_range(classes.len(), |i| {
                    let class = &classes[i];
                    let u = class.all();
                    let grid = admissible_grid(1.0, 1.0, 5);
                    check_cover_split(class, u, (0, 0.0, 1.0), &grid).map(|r| r.violations.len()).unwrap_or(0)
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, games, cover_splits);
criterion_main!(benches);
