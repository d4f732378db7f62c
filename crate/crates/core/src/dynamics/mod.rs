//! Geodesic and Hamiltonian flows, parallel transport, and closed-form
//! geodesic fixtures.
//!
//! Every integrator is classical fixed-step RK4. A step whose stages leave
//! the chart is rejected and the integration stops at the last accepted
//! state, recording the time in [`Trajectory::exit`].

pub mod fixtures;
pub mod hamilton;

pub use hamilton::{hamilton_eom_extended, integrate_flow, kappa_dot_lines, HamiltonianSpec, KappaLines, KappaTerm};

use crate::calculus::{Curve, Scalar};
use crate::charts::{ChartId, ChartPoint};
use crate::config::Tolerances;
use crate::connections::{christoffel_at, GammaValue};
use crate::error::{GeoError, Result};
use crate::metrics::{metric_at, metric_inverse, MetricSource};
use serde::Serialize;
use std::ops::{Add, Mul};

/// Samples `(t, y)` and the time at which the chart was left, if it was.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory<T> {
    pub samples: Vec<(f64, Vec<T>)>,
    pub exit: Option<f64>,
}

impl<T> Trajectory<T> {
    pub fn last(&self) -> &(f64, Vec<T>) {
        self.samples.last().expect("a trajectory holds its initial state")
    }

    /// Turns an early stop into [`GeoError::DomainExit`].
    pub fn complete(self) -> Result<Self> {
        match self.exit {
            Some(t) => Err(GeoError::DomainExit { t }),
            None => Ok(self),
        }
    }
}

fn axpy<T: Copy + Add<Output = T> + Mul<f64, Output = T>>(y: &[T], h: f64, k: &[T]) -> Vec<T> {
    y.iter().zip(k).map(|(&a, &b)| a + b * h).collect()
}

/// One classical RK4 step of `ẏ = f(t, y)`.
pub fn rk4_step<T, F>(f: &F, t: f64, y: &[T], h: f64) -> Result<Vec<T>>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64, &[T]) -> Result<Vec<T>>,
{
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k1))?;
    let k3 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k2))?;
    let k4 = f(t + h, &axpy(y, h, &k3))?;
    Ok(y.iter()
        .enumerate()
        .map(|(i, &v)| v + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0))
        .collect())
}

/// Number of equal steps covering `[0, t_max]` with steps close to `step`.
fn step_count(t_max: f64, step: f64) -> Result<usize> {
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(GeoError::Parse(format!("integration time must be finite and non-negative, got {t_max}")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(GeoError::Parse(format!("step must be positive, got {step}")));
    }
    Ok((t_max / step).round().max(if t_max > 0.0 { 1.0 } else { 0.0 }) as usize)
}

/// Integrates `ẏ = f(t, y)` from `t0` over `t_max`, stopping before any
/// state that `inside` rejects or whose stages fail with a domain or
/// singularity error.
pub fn integrate<T, F, C>(f: F, inside: C, t0: f64, y0: Vec<T>, t_max: f64, step: f64) -> Result<Trajectory<T>>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64, &[T]) -> Result<Vec<T>>,
    C: Fn(&[T]) -> Result<()>,
{
    inside(&y0)?;
    let n = step_count(t_max, step)?;
    let h = if n == 0 { 0.0 } else { t_max / n as f64 };
    let mut samples = Vec::with_capacity(n + 1);
    samples.push((t0, y0));
    for i in 0..n {
        let (t, y) = samples.last().unwrap();
        let next = rk4_step(&f, *t, y, h).and_then(|y1| inside(&y1).map(|_| y1));
        match next {
            Ok(y1) => samples.push((t0 + (i + 1) as f64 * h, y1)),
            Err(e) if e.is_domain() || matches!(e, GeoError::SingularMetric(_)) => {
                let t = *t;
                return Ok(Trajectory { samples, exit: Some(t) });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Trajectory { samples, exit: None })
}

/// Position and velocity on a chart. Holomorphic charts carry the
/// holomorphic coordinates and their complex velocities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct State {
    pub point: ChartPoint,
    pub velocity: Vec<Scalar>,
}

impl State {
    pub fn new(point: ChartPoint, velocity: Vec<Scalar>) -> Result<Self> {
        if velocity.len() != point.chart.dim() {
            return Err(GeoError::Parse(format!(
                "{} needs {} velocity components, got {}",
                point.chart,
                point.chart.dim(),
                velocity.len()
            )));
        }
        Ok(State { point, velocity })
    }

    /// `x=..,y=..,vx=..,vy=..`: a coordinate name prefixed by `v` is its velocity.
    pub fn parse(chart: ChartId, spec: &str) -> Result<Self> {
        let names = chart.coord_names();
        let (mut pos, mut vel) = (Vec::new(), vec![Scalar::new(0.0, 0.0); names.len()]);
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| GeoError::Parse(format!("expected name=value, got `{part}`")))?;
            match k.trim().strip_prefix('v').and_then(|n| names.iter().position(|m| m == n)) {
                Some(i) if !names.iter().any(|m| m == k.trim()) => {
                    vel[i] = v.trim().parse().map_err(|_| GeoError::Parse(format!("bad number `{v}`")))?;
                }
                _ => pos.push(part),
            }
        }
        State::new(ChartPoint::parse(chart, &pos.join(","))?, vel)
    }
}

/// Geodesic equations of a metric: `ẍ^i = −Γ^i_{jk} ẋ^j ẋ^k` with Levi-Civita
/// symbols on real charts and Chern symbols on holomorphic ones.
#[derive(Clone, Copy, Debug)]
pub struct GeodesicFlow<M> {
    pub metric: M,
    pub tol: Tolerances,
}

fn full_vector(chart: ChartId, coords: &[Scalar]) -> Vec<Scalar> {
    if chart.is_complex() {
        coords.iter().copied().chain(coords.iter().map(|z| z.conj())).collect()
    } else {
        coords.to_vec()
    }
}

impl<M: MetricSource> GeodesicFlow<M> {
    pub fn new(metric: M, tol: Tolerances) -> Self {
        GeodesicFlow { metric, tol }
    }

    pub fn chart(&self) -> ChartId {
        self.metric.chart()
    }

    pub fn gamma(&self, coords: &[Scalar]) -> Result<GammaValue> {
        christoffel_at(&self.metric, &full_vector(self.chart(), coords), &self.tol)
    }

    /// Acceleration at a position and velocity.
    pub fn rhs(&self, coords: &[Scalar], vel: &[Scalar]) -> Result<Vec<Scalar>> {
        let g = self.gamma(coords)?;
        Ok(contract(&g, vel, vel).into_iter().map(|a| -a).collect())
    }

    /// `g(ẋ, ẋ)`, or `h(ż, ż̄)` on a holomorphic chart.
    pub fn speed(&self, coords: &[Scalar], vel: &[Scalar]) -> Result<f64> {
        let g = metric_at(&self.metric, &full_vector(self.chart(), coords))?;
        Ok(quadratic(&g, vel, self.chart().is_complex()))
    }

    /// RK4 on the first-order system `[x, ẋ]`.
    pub fn integrate(&self, s0: &State, t_max: f64, step: f64) -> Result<Trajectory<Scalar>> {
        if s0.point.chart != self.chart() {
            return Err(GeoError::Parse(format!("state on {}, metric on {}", s0.point.chart, self.chart())));
        }
        let n = self.chart().dim();
        let chart = self.chart();
        let y0: Vec<Scalar> = s0.point.coords.iter().chain(&s0.velocity).copied().collect();
        integrate(
            |_, y: &[Scalar]| {
                let mut d = y[n..].to_vec();
                d.extend(self.rhs(&y[..n], &y[n..])?);
                Ok(d)
            },
            |y: &[Scalar]| chart.check(&full_vector(chart, &y[..n])),
            0.0,
            y0,
            t_max,
            step,
        )
    }
}

/// `a^i = Γ^i_{jk} u^j v^k`.
fn contract(g: &GammaValue, u: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
    let n = g.n;
    (0..n)
        .map(|i| (0..n).flat_map(|j| (0..n).map(move |k| (j, k))).map(|(j, k)| g.get(i, j, k) * u[j] * v[k]).sum())
        .collect()
}

fn quadratic(g: &[Vec<Scalar>], v: &[Scalar], hermitian: bool) -> f64 {
    let n = v.len();
    let mut s = Scalar::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            s += g[i][j] * v[i] * if hermitian { v[j].conj() } else { v[j] };
        }
    }
    s.re
}

/// `ẍ^i + Γ^i_{jk} ẋ^j ẋ^k = 0` as a function of the state.
pub fn geodesic_rhs<M: MetricSource>(metric: &M, s: &State, tol: &Tolerances) -> Result<Vec<Scalar>> {
    GeodesicFlow::new(metric, *tol).rhs(&s.point.coords, &s.velocity)
}

pub fn integrate_geodesic<M: MetricSource>(metric: &M, s0: &State, t_max: f64, step: f64, tol: &Tolerances) -> Result<Trajectory<Scalar>> {
    GeodesicFlow::new(metric, *tol).integrate(s0, t_max, step)
}

/// What the transported components are.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Transported {
    /// `λ̇^a = −Γ^a_{bi} ċ^i λ^b`.
    Vector,
    /// `λ̇_a = Γ^b_{ai} ċ^i λ_b`.
    OneForm,
}

/// A curve run backwards.
pub struct Reversed<'a>(pub &'a dyn Curve);

impl Curve for Reversed<'_> {
    fn point(&self, t: f64) -> Vec<Scalar> {
        self.0.point(1.0 - t)
    }
    fn velocity(&self, t: f64) -> Vec<Scalar> {
        self.0.velocity(1.0 - t).into_iter().map(|v| -v).collect()
    }
    fn pieces(&self) -> usize {
        self.0.pieces()
    }
}

/// Parallel transport of `u0` along `c`, `t ∈ [0, 1]`, with `steps` RK4
/// steps on each smooth piece. The curve is given on full chart vectors.
pub fn parallel_transport<M: MetricSource>(
    metric: &M,
    c: &dyn Curve,
    u0: &[Scalar],
    kind: Transported,
    steps: usize,
    tol: &Tolerances,
) -> Result<Vec<Scalar>> {
    let n = metric.size();
    if u0.len() != n {
        return Err(GeoError::Parse(format!("expected {n} components, got {}", u0.len())));
    }
    let pieces = c.pieces().max(1) as f64;
    let steps = steps.max(1);
    let mut lam = u0.to_vec();
    for piece in 0..pieces as usize {
        // Stage times are kept inside the piece so that a corner is never
        // sampled from the wrong side.
        let (lo, hi) = (piece as f64 / pieces, (piece as f64 + 1.0) / pieces);
        let f = |u: f64, lam: &[Scalar]| -> Result<Vec<Scalar>> {
            let t = (lo + u / pieces).clamp(lo + 1e-13, hi - 1e-13);
            let g = christoffel_at(metric, &c.point(t), tol)?;
            let cd = c.velocity(t);
            Ok((0..n)
                .map(|a| {
                    let mut s = Scalar::new(0.0, 0.0);
                    for b in 0..n {
                        for i in 0..n {
                            s += match kind {
                                Transported::Vector => -(g.get(a, b, i) * cd[i] * lam[b]),
                                Transported::OneForm => g.get(b, a, i) * cd[i] * lam[b],
                            };
                        }
                    }
                    s / pieces
                })
                .collect())
        };
        let h = 1.0 / steps as f64;
        for i in 0..steps {
            lam = rk4_step(&f, i as f64 * h, &lam, h)?;
        }
    }
    Ok(lam)
}

/// Metric norm squared of transported components at a full vector.
pub fn transported_norm<M: MetricSource>(metric: &M, x: &[Scalar], lam: &[Scalar], kind: Transported, tol: &Tolerances) -> Result<f64> {
    let g = metric_at(metric, x)?;
    let g = match kind {
        Transported::Vector => g,
        // `λ⁺ h⁻¹ λ` in the Hermitian case, hence the transpose.
        Transported::OneForm => {
            let inv = metric_inverse(&g, tol)?;
            (0..inv.len()).map(|i| (0..inv.len()).map(|j| inv[j][i]).collect()).collect()
        }
    };
    Ok(quadratic(&g, lam, metric.is_hermitian()))
}

#[cfg(test)]
mod tests;
