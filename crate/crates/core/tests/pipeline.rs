//! Potential → metric → connection → geodesic through the public API.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sjg_core::config::Tolerances;
use sjg_core::connections::{christoffel_at, christoffel_fd};
use sjg_core::dynamics::{GeodesicFlow, State};
use sjg_core::metrics::{catalog_for, default_potential, PotentialMetric};
use sjg_core::{ChartId, ChartPoint, ModelParams, Scalar};

#[test]
fn potential_and_catalog_connections_agree() {
    let tol = Tolerances::default();
    for chart in [ChartId::D1, ChartId::X1, ChartId::DJ1] {
        let p = ModelParams::new(1.7, 0.6, 1.0).unwrap();
        let cat = catalog_for(chart, p).unwrap();
        let pot = PotentialMetric(default_potential(chart, p).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let x = chart.sample(&mut rng).full();
            let a = christoffel_at(&cat, &x, &tol).unwrap();
            let b = christoffel_at(&pot, &x, &tol).unwrap();
            let c = christoffel_fd(&pot, &x, &tol).unwrap();
            for ((u, v), w) in a.c.iter().zip(&b.c).zip(&c.c) {
                assert!((u - v).norm() < 1e-10 * (1.0 + u.norm()), "{chart}: {u} vs {v}");
                assert!((u - w).norm() < 1e-6 * (1.0 + u.norm()), "{chart}: {u} vs fd {w}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Speed is constant along a geodesic, and time reversal retraces it.
    #[test]
    fn half_plane_geodesics(x in -2.0f64..2.0, y in 0.3f64..3.0, vx in -1.0f64..1.0, vy in -1.0f64..1.0) {
        let p = ModelParams::default();
        let m = catalog_for(ChartId::X1, p).unwrap();
        let flow = GeodesicFlow::new(m, Tolerances::default());
        let pt = ChartPoint::new(ChartId::X1, vec![Scalar::new(x, y)]).unwrap();
        let s0 = State::new(pt, vec![Scalar::new(vx, vy)]).unwrap();
        let tr = flow.integrate(&s0, 1.0, 1e-3).unwrap().complete().unwrap();
        let speed = |y: &[Scalar]| flow.speed(&y[..1], &y[1..]).unwrap();
        let s_start = speed(&tr.samples[0].1);
        for (_, y) in &tr.samples {
            prop_assert!((speed(y) - s_start).abs() < 1e-9 * (1.0 + s_start));
        }
        let end = &tr.samples.last().unwrap().1;
        let back = State::new(ChartPoint::new(ChartId::X1, vec![end[0]]).unwrap(), vec![-end[1]]).unwrap();
        let tr2 = flow.integrate(&back, 1.0, 1e-3).unwrap().complete().unwrap();
        let home = tr2.samples.last().unwrap().1[0];
        prop_assert!((home - Scalar::new(x, y)).norm() < 1e-9 * (1.0 + y));
    }
}
