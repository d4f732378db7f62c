//! Kähler two-forms: from a Hermitian metric, from a potential by a purely
//! real route, and the closed forms written out per chart.

use super::{interleaved_to_full, MetricSource, Potential};
use crate::calculus::forms::{binom, rank};
use crate::calculus::{seed_dual, Field, FormField, FormValue, Number, Scalar, I};
use crate::charts::ChartId;
use crate::config::TwoFormConvention;
use crate::error::{GeoError, Result};
use crate::params::ModelParams;
use std::fmt;
use std::str::FromStr;

/// Accumulates two-form coefficients in lexicographic pair order.
pub(crate) struct Two<T> {
    n: usize,
    pub c: Vec<T>,
}

impl<T: Number> Two<T> {
    pub fn new(n: usize) -> Self {
        Two { n, c: vec![T::zero(); binom(n, 2)] }
    }

    /// Adds `v dx^i ∧ dx^j`.
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.c[rank(self.n, &[i, j])] += v,
            std::cmp::Ordering::Greater => self.c[rank(self.n, &[j, i])] -= v,
            std::cmp::Ordering::Equal => {}
        }
    }

    /// Adds `v · a ∧ b` for one-forms given by coefficient lists.
    pub fn add_wedge(&mut self, v: T, a: &[T], b: &[T]) {
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    self.add(i, j, v * a[i] * b[j]);
                }
            }
        }
    }

    pub fn scale(mut self, s: Scalar) -> Self {
        self.c.iter_mut().for_each(|v| *v = *v * s);
        self
    }
}

/// `ω = i Σ h_{αβ̄} dz_α ∧ dz̄_β` on the full coordinate vector, scaled by
/// the convention factor.
#[derive(Clone, Copy, Debug)]
pub struct KahlerForm<H> {
    pub h: H,
    pub convention: TwoFormConvention,
}

impl<H: MetricSource> KahlerForm<H> {
    pub fn new(h: H) -> Result<Self> {
        if !h.is_hermitian() {
            return Err(GeoError::Parse(format!("{} carries no Hermitian metric", h.chart())));
        }
        Ok(KahlerForm { h, convention: TwoFormConvention::Full })
    }

    pub fn with_convention(mut self, c: TwoFormConvention) -> Self {
        self.convention = c;
        self
    }
}

impl<H: MetricSource> Field for KahlerForm<H> {
    fn dim(&self) -> usize {
        self.h.dim()
    }
    fn len(&self) -> usize {
        binom(self.h.dim(), 2)
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.h.check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        let h = self.h.eval(x);
        let n = N / 2;
        let mut w = Two::new(N);
        let f = I * self.convention.factor();
        for a in 0..n {
            for b in 0..n {
                w.add(a, n + b, h[a * n + b] * f);
            }
        }
        w.c
    }
}

impl<H: MetricSource> FormField for KahlerForm<H> {
    fn degree(&self) -> usize {
        2
    }
}

/// A potential read on a real chart: directly if it is written there,
/// otherwise through the interleaved real and imaginary parts.
#[derive(Clone, Copy, Debug)]
pub struct RealPotential {
    pub f: Potential,
    pub chart: ChartId,
}

impl RealPotential {
    pub fn new(f: Potential, chart: ChartId) -> Result<Self> {
        let ok = if f.chart().is_complex() { chart.complex_partner() == Some(f.chart()) } else { chart == f.chart() };
        if !ok {
            return Err(GeoError::Parse(format!("{} is not a real form of {}", chart, f.chart())));
        }
        Ok(RealPotential { f, chart })
    }
}

impl Field for RealPotential {
    fn dim(&self) -> usize {
        self.chart.nvars()
    }
    fn len(&self) -> usize {
        1
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.chart.check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        if self.f.chart().is_complex() {
            vec![self.f.value(&interleaved_to_full(x))]
        } else {
            vec![self.f.value(x)]
        }
    }
}

/// `s · ½ d^c f` with `d^c f = Σ (f_a db − f_b da)` over the real pairs
/// `(a, b)` of a real chart.
#[derive(Clone, Copy, Debug)]
pub struct HalfDc {
    pub f: RealPotential,
    pub s: f64,
}

impl Field for HalfDc {
    fn dim(&self) -> usize {
        self.f.dim()
    }
    fn len(&self) -> usize {
        self.f.dim()
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.f.check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        let g = self.f.eval(&seed_dual(x))[0].d;
        let mut out = vec![T::zero(); N];
        for k in 0..N / 2 {
            out[2 * k] = -g[2 * k + 1] * (0.5 * self.s);
            out[2 * k + 1] = g[2 * k] * (0.5 * self.s);
        }
        out
    }
}

impl FormField for HalfDc {
    fn degree(&self) -> usize {
        1
    }
}

/// Kähler form computed without complex differentiation:
/// `ω = d(½ d^c f)` on the real chart.
pub type RealRouteForm = crate::calculus::Exterior<HalfDc>;

pub fn real_route_form(f: Potential, chart: ChartId) -> Result<RealRouteForm> {
    Ok(crate::calculus::Exterior(HalfDc { f: RealPotential::new(f, chart)?, s: 1.0 }))
}

/// Jacobian `∂(z, z̄)/∂(a, b)` of the interleaved real coordinates, for
/// pulling full-vector forms down to the real chart.
pub fn interleave_jacobian(n: usize) -> Vec<Vec<Scalar>> {
    let mut j = vec![vec![Scalar::new(0.0, 0.0); 2 * n]; 2 * n];
    for a in 0..n {
        j[a][2 * a] = Scalar::new(1.0, 0.0);
        j[a][2 * a + 1] = I;
        j[n + a][2 * a] = Scalar::new(1.0, 0.0);
        j[n + a][2 * a + 1] = -I;
    }
    j
}

/// Expresses a full-vector form in the interleaved real basis.
pub fn to_real_basis(f: &FormValue) -> FormValue {
    f.pullback(&interleave_jacobian(f.dim / 2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormId {
    /// Invariant form on `(w, z)`.
    Kk1,
    /// After the fibre change, `(w, η)`.
    E32b,
    /// Its real form on `(α, β, q, p)`.
    E32bb,
    /// Form of the `GGG` kernel on `(w, η)`.
    F1,
    /// Its real form; differs from `E32bb`.
    F2,
    /// `(k/y²) dx∧dy + 2ν dq∧dp`.
    Om214b,
    /// The same on `(v, η)`.
    Om214a,
    /// Berndt–Kähler form on `(v, u)`.
    Bfr,
    /// Its real form on `(x, y, m, n)`.
    Brf,
    /// Form on `(x, y, q, p)` obtained from `F1`.
    AltaOm,
    /// Real form of the `P222b` metric; differs from `Om214b`.
    OmM,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatalogForm {
    pub id: FormId,
    pub params: ModelParams,
}

impl CatalogForm {
    pub fn new(id: FormId, params: ModelParams) -> Self {
        CatalogForm { id, params }
    }

    pub fn chart(&self) -> ChartId {
        use FormId::*;
        match self.id {
            Kk1 => ChartId::DJ1,
            E32b | F1 => ChartId::DJ1Eta,
            E32bb | F2 => ChartId::DJ1Real,
            Om214b | AltaOm | OmM => ChartId::XJ1Real,
            Om214a => ChartId::XJ1Eta,
            Bfr => ChartId::XJ1,
            Brf => ChartId::XJ1Mn,
        }
    }

    fn coeffs<T: Number>(&self, x: &[T]) -> Vec<T> {
        use FormId::*;
        let ModelParams { k, nu, .. } = self.params;
        let e = |i: usize| -> Vec<T> { (0..4).map(|j| if i == j { T::one() } else { T::zero() }).collect() };
        let mut w = Two::<T>::new(4);
        match self.id {
            Kk1 | E32b | F1 => {
                // −iω first, then multiplied by i
                let (wv, z, wb, zb) = (x[0], x[1], x[2], x[3]);
                let p = -(wv * wb) + 1.0;
                w.add(0, 2, (p * p).recip() * (2.0 * k));
                match self.id {
                    Kk1 => {
                        let eta = (z + zb * wv) / p;
                        let etab = (zb + z * wb) / p;
                        let a = vec![etab, T::one(), T::zero(), T::zero()];
                        let ab = vec![T::zero(), T::zero(), eta, T::one()];
                        w.add_wedge(p.recip() * nu, &a, &ab);
                    }
                    E32b => w.add(1, 3, T::re_(nu)),
                    _ => {
                        let (eta, etab) = (z, zb);
                        w.add(1, 3, T::re_(nu));
                        w.add(0, 3, -(etab * nu));
                        w.add(2, 1, eta * nu);
                    }
                }
                return w.scale(I).c;
            }
            E32bb | F2 => {
                let (a, b, q, p) = (x[0], x[1], x[2], x[3]);
                let d = -(a * a) - b * b + 1.0;
                w.add(0, 1, (d * d).recip() * (4.0 * k));
                w.add(2, 3, T::re_(2.0 * nu));
                if self.id == F2 {
                    let one1: Vec<T> = vec![p, -q, T::zero(), T::zero()];
                    let one2: Vec<T> = vec![q, p, T::zero(), T::zero()];
                    w.add_wedge(T::re_(2.0 * nu), &e(2), &one1);
                    w.add_wedge(T::re_(2.0 * nu), &e(3), &one2);
                }
            }
            Om214b => {
                let y = x[1];
                w.add(0, 1, (y * y).recip() * k);
                w.add(2, 3, T::re_(2.0 * nu));
            }
            Om214a => {
                let y = (x[0] - x[2]) * Scalar::new(0.0, -0.5);
                w.add(0, 2, (y * y).recip() * (k / 2.0));
                w.add(1, 3, T::re_(nu));
                return w.scale(I).c;
            }
            Bfr => {
                let (v, u, vb, ub) = (x[0], x[1], x[2], x[3]);
                let r = (u - ub) / (v - vb);
                let d = vb - v;
                w.add(0, 2, -((d * d).recip() * (2.0 * k)));
                let b = vec![-r, T::one(), T::zero(), T::zero()];
                let bb = vec![T::zero(), T::zero(), -r, T::one()];
                w.add_wedge((d * I).recip() * (2.0 * nu), &b, &bb);
                return w.scale(I).c;
            }
            Brf => {
                let (y, n) = (x[1], x[3]);
                let r = n / y;
                w.add(0, 1, (y * y).recip() * k);
                let a = vec![-r, T::zero(), T::one(), T::zero()];
                let b = vec![T::zero(), -r, T::zero(), T::one()];
                w.add_wedge(y.recip() * (2.0 * nu), &a, &b);
            }
            AltaOm => {
                let (xx, y, q, p) = (x[0], x[1], x[2], x[3]);
                let y1 = y + 1.0;
                let n = xx * xx + y1 * y1;
                let c = (n * n).recip() * (4.0 * nu);
                let s = xx * xx - y1 * y1;
                let a = q * s - p * xx * y1 * 2.0;
                let b = q * xx * y1 * 2.0 + p * s;
                w.add(0, 1, (y * y).recip() * k);
                w.add(0, 2, c * a);
                w.add(1, 3, c * a);
                w.add(0, 3, -(c * b));
                w.add(1, 2, c * b);
                w.add(2, 3, T::re_(2.0 * nu));
            }
            OmM => {
                let (y, p) = (x[1], x[3]);
                w.add(0, 1, (y * y).recip() * (k / 4.0));
                w.add(0, 3, p * (2.0 * nu));
                w.add(2, 1, p * (2.0 * nu));
                w.add(2, 3, y * (2.0 * nu));
            }
        }
        w.c
    }
}

impl Field for CatalogForm {
    fn dim(&self) -> usize {
        self.chart().nvars()
    }
    fn len(&self) -> usize {
        binom(self.dim(), 2)
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.chart().check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        self.coeffs(x)
    }
}

impl FormField for CatalogForm {
    fn degree(&self) -> usize {
        2
    }
}

impl fmt::Display for FormId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use FormId::*;
        let s = match self {
            Kk1 => "kk1",
            E32b => "E32b",
            E32bb => "E32bb",
            F1 => "F1",
            F2 => "F2",
            Om214b => "214b",
            Om214a => "214a",
            Bfr => "BFR",
            Brf => "BRF",
            AltaOm => "altaOM",
            OmM => "omM",
        };
        f.write_str(s)
    }
}

impl FormId {
    pub fn all() -> [FormId; 11] {
        use FormId::*;
        [Kk1, E32b, E32bb, F1, F2, Om214b, Om214a, Bfr, Brf, AltaOm, OmM]
    }
}

impl FromStr for FormId {
    type Err = GeoError;
    fn from_str(s: &str) -> Result<Self> {
        FormId::all().into_iter().find(|f| f.to_string() == s).ok_or_else(|| GeoError::UnknownId(s.into()))
    }
}
