//! Kähler potentials, the metrics they induce, and the catalog of metric
//! matrices written out in closed form.
//!
//! A Hermitian metric is stored as `h[α][β] = h_{αβ̄}` and evaluated on the
//! full Wirtinger vector; a Riemannian metric is a symmetric matrix on a
//! real chart. Both are [`Field`]s returning the matrix row-major, so
//! anything built from them can be differentiated again.

mod catalog;
mod potentials;
mod twoforms;

pub use catalog::{catalog_for, CatalogMetric, MetricId};
pub use potentials::{default_potential, zhz_plus, zzh_plus, PotKind, Potential};
pub use twoforms::{
    interleave_jacobian, real_route_form, to_real_basis, CatalogForm, FormId, HalfDc, KahlerForm, RealPotential,
    RealRouteForm,
};

use crate::calculus::{eval_at, jacobian_at, linalg, seed_dual, Field, Gradient, Number, Scalar};
use crate::charts::{ChartId, TransformMap};
use crate::config::Tolerances;
use crate::error::{GeoError, Result};
use crate::params::ModelParams;

/// A metric-valued field on a chart.
pub trait MetricSource: Field {
    fn chart(&self) -> ChartId;
    /// Side length of the matrix.
    fn size(&self) -> usize;
    fn is_hermitian(&self) -> bool {
        self.chart().is_complex()
    }
}

impl<M: MetricSource> MetricSource for &M {
    fn chart(&self) -> ChartId {
        (**self).chart()
    }
    fn size(&self) -> usize {
        (**self).size()
    }
}

pub fn unflatten<T: Copy>(v: &[T], n: usize) -> Vec<Vec<T>> {
    v.chunks(n).map(|r| r.to_vec()).collect()
}

/// `h_{αβ̄} = ∂²f/∂z_α∂z̄_β` from a potential.
#[derive(Clone, Copy, Debug)]
pub struct PotentialMetric(pub Potential);

impl Field for PotentialMetric {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn len(&self) -> usize {
        let n = self.size();
        n * n
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.0.check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        let hess = Gradient(Gradient(&self.0)).eval(x);
        let n = N / 2;
        let mut out = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                out.push(hess[a * N + n + b]);
            }
        }
        out
    }
}

impl MetricSource for PotentialMetric {
    fn chart(&self) -> ChartId {
        self.0.chart()
    }
    fn size(&self) -> usize {
        self.0.chart().dim()
    }
}

/// The Riemannian metric `g(X, Y) = Re Σ h_{αβ̄} X^α Ȳ^β` of a Hermitian
/// metric, written on a real chart whose coordinates are the interleaved
/// real and imaginary parts of the holomorphic ones.
#[derive(Clone, Copy, Debug)]
pub struct RealMetric<H> {
    pub h: H,
    pub chart: ChartId,
}

impl<H: MetricSource> RealMetric<H> {
    pub fn new(h: H, chart: ChartId) -> Result<Self> {
        if chart.complex_partner() != Some(h.chart()) {
            return Err(GeoError::Parse(format!("{chart} does not interleave {}", h.chart())));
        }
        Ok(RealMetric { h, chart })
    }
}

/// Full Wirtinger vector of an interleaved real point.
pub fn interleaved_to_full<T: Number, const N: usize>(x: &[T; N]) -> [T; N] {
    let n = N / 2;
    std::array::from_fn(|i| {
        let (a, b) = (x[2 * (i % n)], x[2 * (i % n) + 1]);
        if i < n {
            a + b * crate::calculus::I
        } else {
            a - b * crate::calculus::I
        }
    })
}

impl<H: MetricSource> Field for RealMetric<H> {
    fn dim(&self) -> usize {
        self.chart.nvars()
    }
    fn len(&self) -> usize {
        let n = self.size();
        n * n
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.chart.check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        let h = self.h.eval(&interleaved_to_full(x));
        let n = N / 2;
        let mut g = vec![T::zero(); N * N];
        for a in 0..n {
            for b in 0..n {
                let v = h[a * n + b];
                let re = (v + v.conj()) * 0.5;
                let im = (v - v.conj()) * Scalar::new(0.0, -0.5);
                g[(2 * a) * N + 2 * b] = re;
                g[(2 * a + 1) * N + 2 * b + 1] = re;
                g[(2 * a) * N + 2 * b + 1] = im;
                g[(2 * a + 1) * N + 2 * b] = -im;
            }
        }
        g
    }
}

impl<H: MetricSource> MetricSource for RealMetric<H> {
    fn chart(&self) -> ChartId {
        self.chart
    }
    fn size(&self) -> usize {
        self.chart.dim()
    }
}

/// Pullback of a metric through a transform landing in its chart:
/// `g' = Jᵀ g J` for real metrics, `h' = Jᵀ h J̄` (holomorphic blocks of the
/// full Jacobian) for Hermitian ones.
#[derive(Clone, Copy, Debug)]
pub struct PulledMetric<M> {
    pub m: M,
    pub map: TransformMap,
}

impl<M: MetricSource> PulledMetric<M> {
    pub fn new(m: M, map: TransformMap) -> Result<Self> {
        if map.target() != m.chart() || map.source().is_complex() != m.is_hermitian() {
            return Err(GeoError::Parse(format!("cannot pull {} back along {}", m.chart(), map.t)));
        }
        Ok(PulledMetric { m, map })
    }
}

impl<M: MetricSource> Field for PulledMetric<M> {
    fn dim(&self) -> usize {
        self.map.source().nvars()
    }
    fn len(&self) -> usize {
        let n = self.size();
        n * n
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.map.source().check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        let y = self.map.eval(&seed_dual(x));
        let vals: [T; N] = std::array::from_fn(|i| y[i].v);
        let g = self.m.eval(&vals);
        let n = self.m.size();
        let j = |i: usize, a: usize| y[i].d[a];
        let ns = self.size();
        let mut out = vec![T::zero(); ns * ns];
        if self.m.is_hermitian() {
            for a in 0..ns {
                for b in 0..ns {
                    let mut s = T::zero();
                    for i in 0..n {
                        for k in 0..n {
                            s += j(i, a) * g[i * n + k] * j(n + k, ns + b);
                        }
                    }
                    out[a * ns + b] = s;
                }
            }
        } else {
            for a in 0..ns {
                for b in 0..ns {
                    let mut s = T::zero();
                    for i in 0..n {
                        for k in 0..n {
                            s += j(i, a) * g[i * n + k] * j(k, b);
                        }
                    }
                    out[a * ns + b] = s;
                }
            }
        }
        out
    }
}

impl<M: MetricSource> MetricSource for PulledMetric<M> {
    fn chart(&self) -> ChartId {
        self.map.source()
    }
    fn size(&self) -> usize {
        self.map.source().dim()
    }
}

/// A catalog metric or the metric of a potential, chosen by id at run time.
#[derive(Clone, Copy, Debug)]
pub enum AnyMetric {
    Catalog(CatalogMetric),
    Potential(PotentialMetric),
}

impl AnyMetric {
    /// Catalog ids take precedence over potential ids.
    pub fn parse(id: &str, params: ModelParams) -> Result<Self> {
        if let Ok(m) = id.parse::<MetricId>() {
            return Ok(AnyMetric::Catalog(CatalogMetric::new(m, params)));
        }
        let kind: PotKind = id.parse()?;
        Ok(AnyMetric::Potential(PotentialMetric(Potential::new(kind, params))))
    }
}

impl Field for AnyMetric {
    fn dim(&self) -> usize {
        match self {
            AnyMetric::Catalog(m) => m.dim(),
            AnyMetric::Potential(m) => m.dim(),
        }
    }
    fn len(&self) -> usize {
        match self {
            AnyMetric::Catalog(m) => m.len(),
            AnyMetric::Potential(m) => m.len(),
        }
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        match self {
            AnyMetric::Catalog(m) => m.check(x),
            AnyMetric::Potential(m) => m.check(x),
        }
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        match self {
            AnyMetric::Catalog(m) => m.eval(x),
            AnyMetric::Potential(m) => m.eval(x),
        }
    }
}

impl MetricSource for AnyMetric {
    fn chart(&self) -> ChartId {
        match self {
            AnyMetric::Catalog(m) => m.chart(),
            AnyMetric::Potential(m) => m.chart(),
        }
    }
    fn size(&self) -> usize {
        match self {
            AnyMetric::Catalog(m) => m.size(),
            AnyMetric::Potential(m) => m.size(),
        }
    }
}

/// The metric matrix at a full coordinate vector.
pub fn metric_at<M: MetricSource>(m: &M, x: &[Scalar]) -> Result<Vec<Vec<Scalar>>> {
    Ok(unflatten(&eval_at(m, x)?, m.size()))
}

pub fn metric_from_potential(f: &Potential, x: &[Scalar]) -> Result<Vec<Vec<Scalar>>> {
    metric_at(&PotentialMetric(*f), x)
}

/// Largest deviation from Hermitian symmetry (`h = h⁺`); for a real metric
/// this is the deviation from symmetry.
pub fn hermiticity_residual(h: &[Vec<Scalar>]) -> f64 {
    let n = h.len();
    let mut r = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            r = r.max((h[a][b] - h[b][a].conj()).norm());
        }
    }
    r
}

/// Kähler residual `max |∂h_{αβ̄}/∂z_γ − ∂h_{γβ̄}/∂z_α|` together with the
/// verdict against `tol`.
pub fn kahler_condition<M: MetricSource>(h: &M, x: &[Scalar], tol: f64) -> Result<(bool, f64)> {
    let (_, d) = jacobian_at(h, x)?;
    let n = h.size();
    let mut r = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for g in 0..n {
                r = r.max((d[a * n + b][g] - d[g * n + b][a]).norm());
            }
        }
    }
    Ok((r <= tol, r))
}

/// Inverse with a condition-number guard.
pub fn metric_inverse(g: &[Vec<Scalar>], tol: &Tolerances) -> Result<Vec<Vec<Scalar>>> {
    linalg::checked_inverse(&g.to_vec(), tol.max_cond)
}

/// Smallest eigenvalue of a Hermitian (or real symmetric) matrix.
pub fn min_eigenvalue(g: &[Vec<Scalar>]) -> f64 {
    linalg::hermitian_eigenvalues(&g.to_vec()).into_iter().fold(f64::INFINITY, f64::min)
}
