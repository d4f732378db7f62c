use super::fixtures::{bridge_gap, fixtures, triangle_holonomy, Triangle};
use super::*;
use crate::berry::energy::LinearHamiltonian;
use crate::calculus::quad::Circle;
use crate::calculus::{c, Field, Number, Rule, I};
use crate::metrics::{CatalogMetric, MetricId};
use crate::params::ModelParams;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn x1(p: ModelParams) -> GeodesicFlow<CatalogMetric> {
    GeodesicFlow::new(CatalogMetric::new(MetricId::X1Real, p), tol())
}

fn real_state(chart: ChartId, x: &[f64], v: &[f64]) -> State {
    State::new(ChartPoint::real(chart, x).unwrap(), v.iter().map(|&a| c(a)).collect()).unwrap()
}

#[test]
fn half_plane_acceleration_at_base_point() {
    let s = real_state(ChartId::X1Real, &[0.0, 1.0], &[1.0, 0.0]);
    for k in [1.0, 2.0, 3.7] {
        let a = geodesic_rhs(&CatalogMetric::new(MetricId::X1Real, ModelParams::new(k, 1.0, 1.0).unwrap()), &s, &tol()).unwrap();
        assert!((a[0] - c(0.0)).norm() < 1e-14);
        assert!((a[1] - c(-1.0)).norm() < 1e-14);
    }
}

#[test]
fn zero_velocity_stays_put() {
    let f = x1(ModelParams::default());
    let s = real_state(ChartId::X1Real, &[0.3, 0.7], &[0.0, 0.0]);
    assert!(f.rhs(&s.point.coords, &s.velocity).unwrap().iter().all(|a| a.norm() == 0.0));
    let tr = f.integrate(&s, 1.0, 1e-2).unwrap();
    assert!(tr.exit.is_none());
    for (_, y) in &tr.samples {
        assert_eq!(&y[..2], &s.point.coords[..]);
    }
}

/// The published geodesic equations on `(v, u)`, `u = m + in`.
fn published_half_plane_rhs(p: ModelParams, z: &[Scalar], w: &[Scalar]) -> [Scalar; 2] {
    let (v, u) = (z[0], z[1]);
    let (vd, ud) = (w[0], w[1]);
    let iota = p.k / p.nu;
    let y = v.im;
    let r = u.im / y;
    let f = I / iota;
    [
        -(f * (ud * ud - 2.0 * r * ud * vd + (iota / y + r * r) * vd * vd)),
        -(f * (r * ud * ud + (iota / y - 2.0 * r * r) * ud * vd + r * r * r * vd * vd)),
    ]
}

#[test]
fn half_plane_geodesic_equations_match_the_published_ones() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let p = ModelParams::new(rng.gen_range(0.5..3.0), rng.gen_range(0.3..2.0), 1.0).unwrap();
        let pt = ChartId::XJ1.sample(&mut rng);
        let w: Vec<Scalar> = (0..2).map(|_| Scalar::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let f = GeodesicFlow::new(CatalogMetric::new(MetricId::Kmb, p), tol());
        let a = f.rhs(&pt.coords, &w).unwrap();
        let b = published_half_plane_rhs(p, &pt.coords, &w);
        let scale = 1.0 + b.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!((a[0] - b[0]).norm() < 1e-10 * scale, "{a:?} vs {b:?}");
        assert!((a[1] - b[1]).norm() < 1e-10 * scale, "{a:?} vs {b:?}");
    }
}

#[test]
fn closed_form_fixtures() {
    for fx in fixtures() {
        for p in [ModelParams::default(), ModelParams::new(2.5, 0.7, 1.3).unwrap()] {
            let r = fx.check(p, tol(), 1e-3, 400).unwrap();
            assert!(r.residual < 1e-10, "{r:?}");
            assert!(r.deviation < 1e-7, "{r:?}");
            assert!(r.speed_drift < 1e-7, "{r:?}");
        }
    }
}

#[test]
fn half_plane_geodesic_in_the_complex_chart() {
    let p = ModelParams::new(1.5, 1.0, 1.0).unwrap();
    let f = GeodesicFlow::new(CatalogMetric::new(MetricId::HX1, p), tol());
    let s = State::new(ChartPoint::new(ChartId::X1, vec![I]).unwrap(), vec![c(1.0)]).unwrap();
    let tr = f.integrate(&s, 2.0, 1e-3).unwrap().complete().unwrap();
    for (t, y) in &tr.samples {
        let exact = Scalar::new(t.tanh(), 1.0 / t.cosh());
        assert!((y[0] - exact).norm() < 1e-7, "t = {t}");
    }
}

#[test]
fn real_and_holomorphic_geodesics_agree_under_the_bridge() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3 {
        let p = ModelParams::new(rng.gen_range(0.8..2.0), rng.gen_range(0.5..1.5), 1.0).unwrap();
        let x = [rng.gen_range(-0.5..0.5), rng.gen_range(0.8..1.5), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.3..0.3)).collect();
        let s = real_state(ChartId::XJ1Real, &x, &v);
        let gap = bridge_gap(p, tol(), &s, 1.0, 1e-3).unwrap();
        assert!(gap < 1e-6, "gap {gap}");
    }
}

#[test]
fn integration_stops_at_the_chart_boundary() {
    let tr = integrate(
        |_, y: &[f64]| Ok(vec![1.0 + 0.0 * y[0]]),
        |y: &[f64]| if y[0] < 1.5 { Ok(()) } else { Err(GeoError::domain("test", "y >= 1.5")) },
        0.0,
        vec![0.0],
        2.0,
        0.1,
    )
    .unwrap();
    let (t, y) = tr.last();
    assert!((t - 1.4).abs() < 1e-12 && (y[0] - 1.4).abs() < 1e-12);
    assert!(matches!(tr.exit, Some(t) if (t - 1.4).abs() < 1e-12));
    assert!(matches!(tr.complete(), Err(GeoError::DomainExit { .. })));
}

#[test]
fn starting_outside_the_chart_is_an_error() {
    let f = x1(ModelParams::default());
    let s = State { point: ChartPoint { chart: ChartId::X1Real, coords: vec![c(0.0), c(-1.0)] }, velocity: vec![c(1.0), c(0.0)] };
    assert!(f.integrate(&s, 1.0, 1e-3).unwrap_err().is_domain());
}

#[test]
fn state_parsing() {
    let s = State::parse(ChartId::X1Real, "x=0,y=1,vx=1,vy=0").unwrap();
    assert_eq!(s.point.coords, vec![c(0.0), c(1.0)]);
    assert_eq!(s.velocity, vec![c(1.0), c(0.0)]);
    let s = State::parse(ChartId::XJ1Real, "x=0,y=1,q=2,p=3,vp=0.5").unwrap();
    assert_eq!(s.velocity, vec![c(0.0), c(0.0), c(0.0), c(0.5)]);
    assert!(State::parse(ChartId::X1Real, "x=0,vx=1").is_err());
}

/// The Euclidean metric on the half-plane chart.
struct Flat;

impl Field for Flat {
    fn dim(&self) -> usize {
        2
    }
    fn len(&self) -> usize {
        4
    }
    fn eval<T: Number, const N: usize>(&self, _x: &[T; N]) -> Vec<T> {
        vec![T::one(), T::zero(), T::zero(), T::one()]
    }
}

impl MetricSource for Flat {
    fn chart(&self) -> ChartId {
        ChartId::X1Real
    }
    fn size(&self) -> usize {
        2
    }
}

fn loop_around(center: [f64; 2], r: f64) -> Circle {
    Circle { center: vec![c(center[0]), c(center[1])], plane: (0, 1), r }
}

#[test]
fn flat_transport_is_trivial() {
    let u0 = [c(0.3), c(-1.2)];
    let u1 = parallel_transport(&Flat, &loop_around([0.0, 2.0], 1.0), &u0, Transported::Vector, 50, &tol()).unwrap();
    assert_eq!(u0.to_vec(), u1);
}

#[test]
fn transport_preserves_the_metric_norm() {
    let p = ModelParams::new(1.3, 1.0, 1.0).unwrap();
    let m = CatalogMetric::new(MetricId::X1Real, p);
    let circle = loop_around([0.2, 1.5], 0.8);
    for kind in [Transported::Vector, Transported::OneForm] {
        let u0 = [c(0.4), c(0.9)];
        let u1 = parallel_transport(&m, &circle, &u0, kind, 2000, &tol()).unwrap();
        let x = circle.point(0.0);
        let n0 = transported_norm(&m, &x, &u0, kind, &tol()).unwrap();
        let n1 = transported_norm(&m, &x, &u1, kind, &tol()).unwrap();
        assert!((n0 - n1).abs() < 1e-7 * n0, "{kind:?}: {n0} vs {n1}");
    }
}

#[test]
fn transport_then_back_is_the_identity() {
    let p = ModelParams::new(0.9, 1.0, 1.0).unwrap();
    let m = CatalogMetric::new(MetricId::X1Real, p);
    let tri = Triangle::new([(-0.5, 1.0), (0.6, 0.8), (0.1, 2.0)]);
    for kind in [Transported::Vector, Transported::OneForm] {
        let u0 = [c(1.1), c(-0.4)];
        let there = parallel_transport(&m, &tri, &u0, kind, 1000, &tol()).unwrap();
        let back = parallel_transport(&m, &Reversed(&tri), &there, kind, 1000, &tol()).unwrap();
        for (a, b) in u0.iter().zip(&back) {
            assert!((a - b).norm() < 1e-8);
        }
    }
}

#[test]
fn triangle_holonomy_is_the_enclosed_curvature() {
    let rule = Rule::composite(32, 4);
    for (k, verts) in [
        (1.0, [(-0.5, 1.0), (0.6, 0.8), (0.1, 2.0)]),
        (3.0, [(0.0, 0.5), (1.0, 0.5), (1.0, 1.5)]),
    ] {
        let p = ModelParams::new(k, 1.0, 1.0).unwrap();
        let h = triangle_holonomy(p, tol(), &Triangle::new(verts), 1000, &rule).unwrap();
        assert!(h.curvature_integral.abs() > 0.1);
        assert!((h.angle - h.curvature_integral).abs() < 1e-4, "{h:?}");
        assert!((h.angle_defect - h.curvature_integral).abs() < 1e-8, "{h:?}");
    }
}

#[test]
fn transport_in_the_complex_disk_preserves_the_norm() {
    let m = CatalogMetric::new(MetricId::HD1, ModelParams::new(1.2, 1.0, 1.0).unwrap());
    let full = crate::calculus::quad::FnCurve {
        pos: |t: f64| {
            let w = Scalar::new(0.1, 0.0) + Scalar::from_polar(0.5, std::f64::consts::TAU * t);
            vec![w, w.conj()]
        },
        vel: |t: f64| {
            let dw = Scalar::from_polar(0.5, std::f64::consts::TAU * t) * I * std::f64::consts::TAU;
            vec![dw, dw.conj()]
        },
    };
    let u0 = [Scalar::new(0.3, 0.7)];
    for kind in [Transported::Vector, Transported::OneForm] {
        let u1 = parallel_transport(&m, &full, &u0, kind, 2000, &tol()).unwrap();
        let x = full.point(0.0);
        let n0 = transported_norm(&m, &x, &u0, kind, &tol()).unwrap();
        let n1 = transported_norm(&m, &x, &u1, kind, &tol()).unwrap();
        assert!((n0 - n1).abs() < 1e-7 * n0, "{kind:?}: {n0} vs {n1}");
        assert!((u1[0] - u0[0]).norm() > 1e-3, "a loop in a curved disk has holonomy");
    }
}

fn spec(a: f64, b: f64, cc: f64, m: f64, n: f64) -> HamiltonianSpec {
    HamiltonianSpec::new(LinearHamiltonian { a, b, c: cc, m, n }, KappaTerm::Zero)
}

#[test]
fn equations_of_motion_examples() {
    let p = ModelParams::default();
    let d = hamilton_eom_extended(&HamiltonianSpec::default(), &p, &[0.3, 1.2, -0.4, 0.8, 2.0]).unwrap();
    assert!(d[..4].iter().all(|v| *v == 0.0));
    let d = hamilton_eom_extended(&spec(0.0, 0.0, 1.0, 0.0, 0.0), &p, &[0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
    assert_eq!((d[0], d[1]), (0.0, 0.0));
    let d = hamilton_eom_extended(&spec(0.0, 1.0, 0.0, 0.0, 0.0), &p, &[0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
    assert_eq!((d[2], d[3]), (1.0, 0.0));
    assert!(hamilton_eom_extended(&spec(0.0, 1.0, 0.0, 0.0, 0.0), &p, &[0.0, -1.0, 0.0, 0.0, 0.0]).unwrap_err().is_domain());
}

fn fd_grad(f: impl Fn(&[f64]) -> f64, s: &[f64], h: f64) -> Vec<f64> {
    (0..s.len())
        .map(|i| {
            let (mut a, mut b) = (s.to_vec(), s.to_vec());
            a[i] += h;
            b[i] -= h;
            (f(&a) - f(&b)) / (2.0 * h)
        })
        .collect()
}

#[test]
fn equations_of_motion_are_hamiltonian() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let p = ModelParams::new(rng.gen_range(0.5..3.0), rng.gen_range(0.3..2.0), rng.gen_range(0.5..2.0)).unwrap();
        let mut g = || rng.gen_range(-1.0..1.0);
        let mut sp = spec(g(), g(), g(), g(), g());
        let (h1, h2) = (g(), g());
        sp.kappa = KappaTerm::Poly(vec![0.0, h1, h2]);
        let s = [g(), 1.5 + g(), g(), g(), g()];
        let e = |v: &[f64]| sp.energy(&p, v).unwrap();
        let dh = fd_grad(e, &s, 1e-5);
        let (k, nu) = (p.k, p.nu);
        let y2 = s[1] * s[1];
        let expect = [
            y2 / k * dh[1],
            -y2 / k * dh[0],
            dh[3] / (2.0 * nu) - s[2] / (2.0 * nu) * dh[4],
            -dh[2] / (2.0 * nu) - s[3] / (2.0 * nu) * dh[4],
            (s[3] * dh[3] + s[2] * dh[2]) / (2.0 * nu) - e(&s) / p.delta.sqrt(),
        ];
        let d = hamilton_eom_extended(&sp, &p, &s).unwrap();
        for i in 0..5 {
            assert!((d[i] - expect[i]).abs() < 1e-6 * (1.0 + expect[i].abs()), "component {i}: {} vs {}", d[i], expect[i]);
        }
    }
}

#[test]
fn kappa_rate_expansions() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let p = ModelParams::new(rng.gen_range(0.5..3.0), rng.gen_range(0.3..2.0), rng.gen_range(0.5..2.0)).unwrap();
        let mut g = || rng.gen_range(-1.0..1.0);
        let mut sp = spec(g(), g(), g(), g(), g());
        sp.kappa = KappaTerm::Poly(vec![g(), g()]);
        let s = [g(), 1.5 + g(), g(), g(), g()];
        let l = kappa_dot_lines(&sp, &p, &s).unwrap();
        assert!(l.derived_gap() < 1e-12 * (1.0 + l.primary.abs()), "{l:?}");
    }
    // Probe where the published expansion is off.
    let p = ModelParams::new(1.0, 0.5, 4.0).unwrap();
    let l = kappa_dot_lines(&spec(1.0, 1.0, 0.3, 0.2, 0.5), &p, &[0.7, 1.1, 0.4, -0.3, 0.0]).unwrap();
    assert!(l.printed_gap() > 1e-3, "{l:?}");
    // With ν = 1, n = −1 and x = 0 the two expansions coincide.
    let p = ModelParams::new(1.0, 1.0, 4.0).unwrap();
    let l = kappa_dot_lines(&spec(1.0, 1.0, 0.3, 0.2, -1.0), &p, &[0.7, 1.1, 0.4, -0.3, 0.0]).unwrap();
    assert!(l.printed_gap() < 1e-12, "{l:?}");
}

#[test]
fn energy_is_conserved_without_the_kappa_term() {
    let p = ModelParams::new(1.4, 0.8, 1.2).unwrap();
    let sp = spec(0.3, -0.2, 0.5, 0.1, 0.4);
    let s0 = [0.2, 1.1, 0.5, -0.6, 0.0];
    let tr = integrate_flow(&sp, &p, &s0, 2.0, 1e-3).unwrap().complete().unwrap();
    let e0 = sp.energy(&p, &s0).unwrap();
    let drift = tr.samples.iter().map(|(_, s)| (sp.energy(&p, s).unwrap() - e0).abs()).fold(0.0, f64::max);
    assert!(drift / 2.0 < 1e-6, "drift {drift}");
}

#[test]
fn zero_hamiltonian_flow_moves_only_kappa() {
    let p = ModelParams::default();
    let s0 = [0.2, 1.1, 0.5, -0.6, 0.3];
    let tr = integrate_flow(&HamiltonianSpec::default(), &p, &s0, 1.0, 1e-2).unwrap();
    for (_, s) in &tr.samples {
        assert_eq!(&s[..5], &s0[..]);
    }
}

#[test]
fn kappa_polynomials() {
    let h = KappaTerm::parse("1, 2, 3").unwrap();
    assert_eq!(h.eval(2.0), (17.0, 14.0));
    assert!(matches!(KappaTerm::parse("0,0").unwrap(), KappaTerm::Zero));
    assert!(KappaTerm::parse("1,x").is_err());
    let custom = KappaTerm::Custom(std::sync::Arc::new(|k: f64| (k.sin(), k.cos())));
    assert_eq!(custom.eval(0.0), (0.0, 1.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn acceleration_is_quadratic_in_the_velocity(x in -2.0f64..2.0, y in 0.2f64..4.0, vx in -1.0f64..1.0, vy in -1.0f64..1.0, s in -3.0f64..3.0) {
        let f = x1(ModelParams::new(1.7, 1.0, 1.0).unwrap());
        let pt = [c(x), c(y)];
        let a = f.rhs(&pt, &[c(vx), c(vy)]).unwrap();
        let b = f.rhs(&pt, &[c(s * vx), c(s * vy)]).unwrap();
        for i in 0..2 {
            prop_assert!((b[i] - a[i] * (s * s)).norm() < 1e-10 * (1.0 + a[i].norm() * s * s));
        }
    }

    #[test]
    fn energy_is_conserved_for_any_coefficients(
        a in -1.0f64..1.0, b in -1.0f64..1.0, cc in -1.0f64..1.0, m in -1.0f64..1.0, n in -1.0f64..1.0,
        x in -0.5f64..0.5, y in 0.8f64..1.5,
    ) {
        let p = ModelParams::new(1.0, 0.7, 1.0).unwrap();
        let sp = spec(a, b, cc, m, n);
        let s0 = [x, y, 0.2, -0.1, 0.0];
        let tr = integrate_flow(&sp, &p, &s0, 0.5, 1e-3).unwrap();
        prop_assume!(tr.exit.is_none());
        let e0 = sp.energy(&p, &s0).unwrap();
        let (t, s) = tr.last();
        prop_assert!((sp.energy(&p, s).unwrap() - e0).abs() < 1e-6 * t.max(1.0) * (1.0 + e0.abs()));
    }
}
