use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use fidkit::batch;
use fidkit::dataset::{generate, Kind};
use fidkit::recfid::{Params, RecursiveFid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rank_batches(c: &mut Criterion) {
    let mut group = c.benchmark_group("rank1");
    for log_n in [12u32, 16] {
        let n = 1u64 << log_n;
        let m = n << 10;
        let data = generate(Kind::Uniform, n, m, 1).unwrap();
        let fid = RecursiveFid::build(&data.values, m, Params::default().with_v(4)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let queries: Vec<u64> = (0..10_000).map(|_| rng.gen_range(0..=m)).collect();
        group.throughput(Throughput::Elements(queries.len() as u64));
        group.bench_with_input(BenchmarkId::new("seq", n), &queries, |b, q| {
            b.iter(|| batch::rank1_seq(&fid, q))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("par", n), &queries, |b, q| {
            b.iter(|| batch::rank1_par(&fid, q))
        });
    }
    group.finish();
}

fn pred_batches(c: &mut Criterion) {
    let mut group = c.benchmark_group("pred");
    let n = 1u64 << 16;
    let m = n << 10;
    let data = generate(Kind::Clustered(8), n, m, 3).unwrap();
    let fid = RecursiveFid::build(&data.values, m, Params::default().with_v(4)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let queries: Vec<u64> = (0..10_000).map(|_| rng.gen_range(0..m)).collect();
    group.throughput(Throughput::Elements(queries.len() as u64));
    group.bench_function("seq", |b| b.iter(|| batch::pred_seq(&fid, &queries)));
    #[cfg(feature = "parallel")]
    group.bench_function("par", |b| b.iter(|| batch::pred_par(&fid, &queries)));
    group.finish();
}

criterion_group!(benches, rank_batches, pred_batches);
criterion_main!(benches);
