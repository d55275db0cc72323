use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fedosov_core::algebroid::{mixed, zero_anchor};
use fedosov_core::fedosov::{curvature, fedosov_construct, CurvatureClass};
use fedosov_core::par::set_parallel;
use fedosov_core::quantization::{bidiff_tensor, verify_star, Quantizer, SampleSpec};

const MODES: [(&str, bool); 2] = [("sequential", false), ("parallel", true)];

fn construct(c: &mut Criterion) {
    let chart = Arc::new(zero_anchor());
    let theta = CurvatureClass::symplectic(&chart, 2);
    let mut g = c.benchmark_group("fedosov_construct/zero_anchor/N4");
    g.sample_size(10);
    for (name, on) in MODES {
        set_parallel(on);
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| fedosov_construct(&chart, None, black_box(&theta), 4).unwrap())
        });
    }
    g.finish();
}

fn curvature_check(c: &mut Criterion) {
    let chart = Arc::new(zero_anchor());
    let theta = CurvatureClass::symplectic(&chart, 2);
    let conn = fedosov_construct(&chart, None, &theta, 5).unwrap();
    let mut g = c.benchmark_group("curvature/zero_anchor/N5");
    g.sample_size(10);
    for (name, on) in MODES {
        set_parallel(on);
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| curvature(black_box(&conn)).unwrap()));
    }
    g.finish();
}

fn star_checks(c: &mut Criterion) {
    let chart = Arc::new(mixed(1, 0, 1).unwrap());
    let theta = CurvatureClass::symplectic(&chart, 3);
    let q = Quantizer::new(&fedosov_construct(&chart, None, &theta, 6).unwrap()).unwrap();
    let spec = SampleSpec {
        count: 4,
        degree: 2,
        seed: 7,
    };
    let mut g = c.benchmark_group("star/mixed(1,0,1)/N6");
    g.sample_size(10);
    for (name, on) in MODES {
        set_parallel(on);
        g.bench_function(BenchmarkId::new("verify", name), |b| b.iter(|| verify_star(&q, black_box(&spec)).unwrap()));
        g.bench_function(BenchmarkId::new("tensor", name), |b| b.iter(|| bidiff_tensor(&q, 2, black_box(2)).unwrap()));
    }
    g.finish();
    set_parallel(true);
}

criterion_group!(benches, construct, curvature_check, star_checks);
criterion_main!(benches);
