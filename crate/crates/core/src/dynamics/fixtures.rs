//! Closed-form geodesics and the checks run against them.

use super::{parallel_transport, GeodesicFlow, State, Transported};
use crate::calculus::quad::FnSurface;
use crate::calculus::{c, surface_integral, Curve, FormField, Number, Rule, Scalar};
use crate::charts::{ChartId, ChartPoint, Transform, TransformMap};
use crate::config::Tolerances;
use crate::error::Result;
use crate::metrics::{CatalogMetric, MetricId, MetricSource};
use crate::params::ModelParams;
use serde::Serialize;

/// A geodesic known in closed form: position, velocity and acceleration at `t`.
#[derive(Clone, Copy, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub metric: MetricId,
    pub t_max: f64,
    pub exact: fn(f64) -> [Vec<Scalar>; 3],
}

fn x1_tanh_sech(t: f64) -> [Vec<Scalar>; 3] {
    let (th, sh) = (t.tanh(), 1.0 / t.cosh());
    [
        vec![c(th), c(sh)],
        vec![c(sh * sh), c(-sh * th)],
        vec![c(-2.0 * sh * sh * th), c(sh * (th * th - sh * sh))],
    ]
}

const GRASSMANN_B: f64 = 0.5;

fn grassmann_tanh(t: f64) -> [Vec<Scalar>; 3] {
    let b = GRASSMANN_B;
    let (th, sh) = ((b * t).tanh(), 1.0 / (b * t).cosh());
    [vec![c(th)], vec![c(b * sh * sh)], vec![c(-2.0 * b * b * sh * sh * th)]]
}

/// The half-plane geodesic `x = tanh t, y = sech t` and the unit-disk
/// geodesic `Z = tanh(t/2)` of the dual 1×1 Grassmannian.
pub fn fixtures() -> Vec<Fixture> {
    vec![
        Fixture { name: "X1-tanh-sech", metric: MetricId::X1Real, t_max: 2.0, exact: x1_tanh_sech },
        Fixture { name: "Gr1x1-dual-tanh", metric: MetricId::GrH { n: 1, m: 1, eps: -1 }, t_max: 2.0, exact: grassmann_tanh },
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct FixtureReport {
    pub name: String,
    /// `max |ẍ + Γẋẋ|` along the closed form.
    pub residual: f64,
    /// `max |x_RK4 − x|` over the integration grid.
    pub deviation: f64,
    /// `max |g(ẋ,ẋ) − g₀|` per unit time along the RK4 trajectory.
    pub speed_drift: f64,
}

impl Fixture {
    pub fn flow(&self, params: ModelParams, tol: Tolerances) -> GeodesicFlow<CatalogMetric> {
        GeodesicFlow::new(CatalogMetric::new(self.metric, params), tol)
    }

    pub fn chart(&self) -> ChartId {
        CatalogMetric::new(self.metric, ModelParams::default()).chart()
    }

    pub fn initial(&self) -> Result<State> {
        let [x, v, _] = (self.exact)(0.0);
        State::new(ChartPoint::new(self.chart(), x)?, v)
    }

    /// Residual on `residual_points` equally spaced times, and the RK4 run.
    pub fn check(&self, params: ModelParams, tol: Tolerances, step: f64, residual_points: usize) -> Result<FixtureReport> {
        let flow = self.flow(params, tol);
        let mut residual = 0.0f64;
        for i in 0..=residual_points.max(1) {
            let t = self.t_max * i as f64 / residual_points.max(1) as f64;
            let [x, v, a] = (self.exact)(t);
            let rhs = flow.rhs(&x, &v)?;
            residual = residual.max(a.iter().zip(&rhs).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max));
        }
        let s0 = self.initial()?;
        let traj = flow.integrate(&s0, self.t_max, step)?.complete()?;
        let n = s0.velocity.len();
        let g0 = flow.speed(&s0.point.coords, &s0.velocity)?;
        let (mut deviation, mut drift) = (0.0f64, 0.0f64);
        for (t, y) in &traj.samples {
            let [x, _, _] = (self.exact)(*t);
            deviation = deviation.max(x.iter().zip(&y[..n]).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max));
            drift = drift.max((flow.speed(&y[..n], &y[n..])? - g0).abs());
        }
        Ok(FixtureReport { name: self.name.into(), residual, deviation, speed_drift: drift / self.t_max })
    }
}

/// Largest distance between a geodesic of the real metric on `(x, y, q, p)`
/// mapped by `u = pv + q` and the geodesic of the balanced metric on `(v, u)`
/// started from the mapped data.
pub fn bridge_gap(params: ModelParams, tol: Tolerances, s0: &State, t_max: f64, step: f64) -> Result<f64> {
    let real = GeodesicFlow::new(CatalogMetric::new(MetricId::Metrs2, params), tol);
    let holo = GeodesicFlow::new(CatalogMetric::new(MetricId::Kmb, params), tol);
    let map = TransformMap::forward(Transform::BridgeU);
    let push = |y: &[Scalar]| -> Result<(Vec<Scalar>, Vec<Scalar>)> {
        let (img, j) = crate::calculus::jacobian_at(&map, &y[..4])?;
        let vel = (0..2).map(|i| (0..4).map(|a| j[i][a] * y[4 + a]).sum()).collect();
        Ok((img[..2].to_vec(), vel))
    };
    let y0: Vec<Scalar> = s0.point.coords.iter().chain(&s0.velocity).copied().collect();
    let (z0, w0) = push(&y0)?;
    let a = real.integrate(s0, t_max, step)?.complete()?;
    let b = holo.integrate(&State::new(ChartPoint::new(ChartId::XJ1, z0)?, w0)?, t_max, step)?.complete()?;
    let mut gap = 0.0f64;
    for ((_, ya), (_, yb)) in a.samples.iter().zip(&b.samples) {
        let (z, _) = push(ya)?;
        gap = gap.max(z.iter().zip(&yb[..2]).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max));
    }
    Ok(gap)
}

/// Geodesic segment of the half-plane between two points, `t ∈ [0, 1]`.
#[derive(Clone, Copy, Debug)]
pub struct HalfPlaneSegment {
    kind: SegmentKind,
}

#[derive(Clone, Copy, Debug)]
enum SegmentKind {
    Vertical { x: f64, y0: f64, y1: f64 },
    Arc { center: f64, r: f64, th0: f64, th1: f64 },
}

impl HalfPlaneSegment {
    pub fn new(a: (f64, f64), b: (f64, f64)) -> Self {
        let kind = if (a.0 - b.0).abs() < 1e-14 {
            SegmentKind::Vertical { x: a.0, y0: a.1, y1: b.1 }
        } else {
            let center = (b.0 * b.0 + b.1 * b.1 - a.0 * a.0 - a.1 * a.1) / (2.0 * (b.0 - a.0));
            let r = ((a.0 - center).powi(2) + a.1 * a.1).sqrt();
            SegmentKind::Arc { center, r, th0: a.1.atan2(a.0 - center), th1: b.1.atan2(b.0 - center) }
        };
        HalfPlaneSegment { kind }
    }

    fn eval(&self, t: f64) -> ([f64; 2], [f64; 2]) {
        match self.kind {
            SegmentKind::Vertical { x, y0, y1 } => ([x, y0 + t * (y1 - y0)], [0.0, y1 - y0]),
            SegmentKind::Arc { center, r, th0, th1 } => {
                let th = th0 + t * (th1 - th0);
                let w = th1 - th0;
                ([center + r * th.cos(), r * th.sin()], [-r * th.sin() * w, r * th.cos() * w])
            }
        }
    }
}

impl Curve for HalfPlaneSegment {
    fn point(&self, t: f64) -> Vec<Scalar> {
        self.eval(t).0.iter().map(|&v| c(v)).collect()
    }
    fn velocity(&self, t: f64) -> Vec<Scalar> {
        self.eval(t).1.iter().map(|&v| c(v)).collect()
    }
}

/// Closed loop through the three sides of a geodesic triangle.
pub struct Triangle {
    pub vertices: [(f64, f64); 3],
    sides: [HalfPlaneSegment; 3],
}

impl Triangle {
    pub fn new(vertices: [(f64, f64); 3]) -> Self {
        let [a, b, cc] = vertices;
        Triangle { vertices, sides: [HalfPlaneSegment::new(a, b), HalfPlaneSegment::new(b, cc), HalfPlaneSegment::new(cc, a)] }
    }

    fn side(&self, t: f64) -> (&HalfPlaneSegment, f64) {
        let s = (3.0 * t).floor().clamp(0.0, 2.0);
        (&self.sides[s as usize], 3.0 * t - s)
    }

    /// Interior angles, for the angle-defect form of Gauss–Bonnet.
    pub fn angles(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            let out_dir = self.sides[i].eval(0.0).1;
            let back = self.sides[(i + 2) % 3].eval(1.0).1;
            let inn = [-back[0], -back[1]];
            let dot = out_dir[0] * inn[0] + out_dir[1] * inn[1];
            let cross = out_dir[0] * inn[1] - out_dir[1] * inn[0];
            *o = cross.atan2(dot).abs();
        }
        out
    }

    /// `∫∫ dx dy / y²` over the enclosed region with the loop's orientation,
    /// as the sum of three fans from the first vertex.
    pub fn coordinate_area(&self, rule: &Rule) -> Result<f64> {
        let form = AreaForm;
        let apex = [self.vertices[0].0, self.vertices[0].1];
        let mut total = 0.0;
        for side in &self.sides {
            let fan = FnSurface {
                pos: |s: f64, t: f64| {
                    let (p, _) = side.eval(t);
                    vec![c(apex[0] + s * (p[0] - apex[0])), c(apex[1] + s * (p[1] - apex[1]))]
                },
                tan: |s: f64, t: f64| {
                    let (p, v) = side.eval(t);
                    (
                        vec![c(p[0] - apex[0]), c(p[1] - apex[1])],
                        vec![c(s * v[0]), c(s * v[1])],
                    )
                },
            };
            total += surface_integral(&form, &fan, rule)?.re;
        }
        Ok(total)
    }
}

impl Curve for Triangle {
    fn point(&self, t: f64) -> Vec<Scalar> {
        let (s, u) = self.side(t);
        s.point(u)
    }
    fn velocity(&self, t: f64) -> Vec<Scalar> {
        let (s, u) = self.side(t);
        s.velocity(u).into_iter().map(|v| v * 3.0).collect()
    }
    fn pieces(&self) -> usize {
        3
    }
}

/// `dx∧dy / y²` on `(x, y)`.
struct AreaForm;

impl crate::calculus::Field for AreaForm {
    fn dim(&self) -> usize {
        2
    }
    fn len(&self) -> usize {
        1
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        vec![(x[1] * x[1]).recip()]
    }
}

impl FormField for AreaForm {
    fn degree(&self) -> usize {
        2
    }
}

/// Rotation of a tangent vector transported once around a geodesic
/// triangle in the half-plane, and the enclosed curvature integral.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Holonomy {
    /// Signed angle from the initial to the final vector.
    pub angle: f64,
    /// `∫∫ K dA` with `K = −1/α` over the region.
    pub curvature_integral: f64,
    /// `−(π − Σ angles)`, equal to the curvature integral for a
    /// counter-clockwise triangle.
    pub angle_defect: f64,
}

pub fn triangle_holonomy(params: ModelParams, tol: Tolerances, tri: &Triangle, steps: usize, rule: &Rule) -> Result<Holonomy> {
    let metric = CatalogMetric::new(MetricId::X1Real, params);
    let v0 = [c(1.0), c(0.0)];
    let v1 = parallel_transport(&metric, tri, &v0, Transported::Vector, steps, &tol)?;
    // The metric is conformal, so Euclidean angles are metric angles.
    let angle = (v1[1].re).atan2(v1[0].re);
    // dA = α dx dy / y² and K = −1/α.
    let curvature_integral = -tri.coordinate_area(rule)?;
    let sum: f64 = tri.angles().iter().sum();
    Ok(Holonomy { angle, curvature_integral, angle_defect: -(std::f64::consts::PI - sum) })
}
