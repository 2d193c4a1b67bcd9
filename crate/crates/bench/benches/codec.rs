use anslab::dist::SymbolProbs;
use anslab::rng::SplitMix64;
use anslab::tuning::tune_spread;
use anslab::*;
use criterion::{black_box, criterion_group, criterion_main, Criterion, Throughput};

const FRAME: usize = 1 << 16;

fn codec(c: &mut Criterion) {
    let p = SymbolProbs::from_ratios(&[(1, 10), (2, 10), (3, 10), (4, 10)]).unwrap();
    let mut group = c.benchmark_group("codec");
    group.throughput(Throughput::Elements(FRAME as u64));
    for r in [6u32, 11] {
        let d = quantize(&p, r, QuantizeMode::BestFit).unwrap();
        let tables = CodingTables::build(&d, &tune_spread(&d)).unwrap();
        let mut rng = SplitMix64::new(9);
        let frame = SymbolFrame::new(
            (0..FRAME)
                .map(|_| match rng.below(10) {
                    0 => 0,
                    1 | 2 => 1,
                    3..=5 => 2,
                    _ => 3,
                })
                .collect(),
        );
        let encoded = encode(&frame, &tables, d.l()).unwrap();
        group.bench_function(format!("encode/L={}", d.l()), |b| {
            b.iter(|| encode(black_box(&frame), &tables, d.l()).unwrap())
        });
        group.bench_function(format!("decode/L={}", d.l()), |b| {
            b.iter(|| decode(black_box(&encoded), &tables, FRAME as u64).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, codec);
criterion_main!(benches);
