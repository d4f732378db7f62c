use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sjg_core::berry::{berry_phase_loop, d_berry_residual, ClosedId};
use sjg_core::calculus::quad::{Circle, Disk};
use sjg_core::calculus::Rule;
use sjg_core::config::{HolonomyConvention, Tolerances};
use sjg_core::connections::christoffel_at;
use sjg_core::cosymplectic::{acos_check, extended_structure};
use sjg_core::dynamics::GeodesicFlow;
use sjg_core::dynamics::State;
use sjg_core::metrics::{AnyMetric, MetricSource};
use sjg_core::{ChartId, ChartPoint, ModelParams};

fn christoffel(c: &mut Criterion) {
    let p = ModelParams::default();
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("christoffel");
    for id in ["D1", "metrica", "begGG", "BIGM-n2"] {
        let m = AnyMetric::parse(id, p).unwrap();
        let x = m.chart().sample(&mut ChaCha8Rng::seed_from_u64(1)).full();
        group.bench_with_input(BenchmarkId::from_parameter(id), &x, |b, x| b.iter(|| christoffel_at(&m, black_box(x), &tol).unwrap()));
    }
    group.finish();
}

fn berry(c: &mut Criterion) {
    let p = ModelParams::default();
    let x = ChartId::DJ1.sample(&mut ChaCha8Rng::seed_from_u64(2)).full();
    c.bench_function("berry/dA+omega/DJ1", |b| b.iter(|| d_berry_residual(ClosedId::DJ1, p, black_box(&x)).unwrap()));

    let circle = Circle { center: ChartPoint::real(ChartId::D1Real, &[0.0, 0.0]).unwrap().coords, plane: (0, 1), r: 0.5 };
    let rule = Rule::composite(64, 1);
    c.bench_function("berry/loop-and-stokes/D1", |b| {
        b.iter(|| berry_phase_loop(ClosedId::D1Real, p, black_box(&circle), &Disk(circle.clone()), &rule, HolonomyConvention::OneW).unwrap())
    });
}

fn geodesic(c: &mut Criterion) {
    let p = ModelParams::default();
    let flow = GeodesicFlow::new(AnyMetric::parse("X1-real", p).unwrap(), Tolerances::default());
    let s0 = State::parse(ChartId::X1Real, "x=0,y=1,vx=1,vy=0").unwrap();
    c.bench_function("geodesic/X1-real/t=2", |b| b.iter(|| flow.integrate(black_box(&s0), 2.0, 1e-3).unwrap()));
}

fn cosymplectic(c: &mut Criterion) {
    let p = ModelParams::default();
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("acos-check");
    for n in [1, 2] {
        let s = extended_structure(n, p).unwrap();
        let x = ChartId::XJnExt(n).sample(&mut ChaCha8Rng::seed_from_u64(3)).full();
        group.bench_with_input(BenchmarkId::from_parameter(n), &x, |b, x| b.iter(|| acos_check(&s, black_box(x), &tol).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, christoffel, berry, geodesic, cosymplectic);
criterion_main!(benches);
