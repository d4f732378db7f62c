//! Berry connections: derived from a Kähler potential, carried to other
//! charts by pullback, and written out in closed form per chart.
//!
//! Sign conventions: `A_B = (i/2) Σ (∂_α f dz_α − ∂̄_α f dz̄_α)`, so that
//! `dA_B = −ω` with `ω = i Σ h dz ∧ dz̄`.

pub mod energy;
pub mod kernels;

#[cfg(test)]
mod tests;

use crate::calculus::forms::{binom, combos};
use crate::calculus::quad::{surface_integral, Curve, Rule, Surface};
use crate::calculus::{exterior_derivative, form_at, line_integral, linalg, seed_dual, Field, FormField, FormValue, Number, Scalar, I};
use crate::charts::{ChartId, Route, Transform, TransformMap};
use crate::config::HolonomyConvention;
use crate::error::{GeoError, Result};
use crate::metrics::KahlerForm;
use crate::metrics::{PotKind, Potential, PotentialMetric};
use crate::params::ModelParams;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

pub use energy::LinearHamiltonian;
pub use kernels::{CsKernel, KernelKind};

/// `A_B` of a potential on the full coordinate vector of its chart.
#[derive(Clone, Copy, Debug)]
pub struct BerryConnection(pub Potential);

impl Field for BerryConnection {
    fn dim(&self) -> usize {
        self.0.chart().nvars()
    }
    fn len(&self) -> usize {
        self.dim()
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.0.chart().check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        let g = self.0.value(&seed_dual(x)).d;
        let n = N / 2;
        let h = I * 0.5;
        let mut out = vec![T::zero(); N];
        for a in 0..n {
            out[a] = g[a] * h;
            out[n + a] = -(g[n + a] * h);
        }
        out
    }
}

impl FormField for BerryConnection {
    fn degree(&self) -> usize {
        1
    }
}

/// `A_B` of a potential at a point of its own chart.
pub fn berry_connection(f: Potential, x: &[Scalar]) -> Result<FormValue> {
    form_at(&BerryConnection(f), x)
}

/// A one- or two-form field pulled back along a route whose charts have the
/// same number of variables.
#[derive(Clone, Debug)]
pub struct Pulled<F> {
    pub f: F,
    pub route: Route,
}

impl<F: FormField> Pulled<F> {
    pub fn new(f: F, route: Route) -> Result<Self> {
        let (s, t) = (route.source().nvars(), route.target().nvars());
        if t != f.dim() || s != t {
            return Err(GeoError::Parse(format!("cannot pull a form on {} variables back along {} -> {}", f.dim(), route.source(), route.target())));
        }
        if f.degree() > 2 {
            return Err(GeoError::Parse("only one- and two-forms are pulled back".into()));
        }
        Ok(Pulled { f, route })
    }
}

impl<F: FormField> Field for Pulled<F> {
    fn dim(&self) -> usize {
        self.route.source().nvars()
    }
    fn len(&self) -> usize {
        binom(self.dim(), self.f.degree())
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.route.check(x)?;
        self.route.apply_full(x).map(|_| ())
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        let y = self.route.eval(&seed_dual(x));
        let yv: [T; N] = std::array::from_fn(|i| y[i].v);
        let a = self.f.eval(&yv);
        let j = |i: usize, b: usize| y[i].d[b];
        match self.f.degree() {
            0 => a,
            1 => (0..N).map(|b| (0..N).fold(T::zero(), |s, i| s + a[i] * j(i, b))).collect(),
            _ => {
                let pairs = combos(N, 2);
                pairs
                    .iter()
                    .map(|bc| {
                        let (b, c) = (bc[0], bc[1]);
                        pairs.iter().zip(&a).fold(T::zero(), |s, (ij, &v)| {
                            let (p, q) = (ij[0], ij[1]);
                            s + v * (j(p, b) * j(q, c) - j(q, b) * j(p, c))
                        })
                    })
                    .collect()
            }
        }
    }
}

impl<F: FormField> FormField for Pulled<F> {
    fn degree(&self) -> usize {
        self.f.degree()
    }
}

/// Closed-form Berry connections, one per chart they are written in. The
/// `*Printed` variants reproduce published expressions that disagree with
/// the derived connection; they exist to measure that disagreement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClosedId {
    /// `ik(w̄dw − wdw̄)/P` on the disk.
    D1,
    /// `2k(βdα − αdβ)/P`.
    D1Real,
    /// The disk connection carried to `(x, y)`.
    X1Real,
    /// `(i/2)(A − Ā)`, `A = (2kw̄/P + (ν/2)η̄²)dw + νη̄ dz`.
    DJ1,
    /// The same after the fibre change, on `(w, η)`.
    DJ1Eta,
    /// Its real form on `(α, β, q, p)`.
    DJ1Real,
    /// The published real form on `(α, β, q, p)`.
    DJ1RealPrinted,
    /// `(1/y)[−(k/4 + νn²/y)dx + 2νn dm]`.
    XJ1Mn,
    /// `−(k/y)dx + 2νp dq`.
    XJ1Real,
    /// The disk connection carried to `(x, y, q, p)` by the second partial
    /// Cayley transform.
    XJ1Disk,
    /// The published expanded form of the same; its fibre `dx`, `dy` terms
    /// are twice the derived ones.
    XJ1DiskPrinted,
    /// The published collected form, which also moves a bracket in `dy`.
    XJ1DiskCollected,
    /// `ij(z̄dz − zdz̄)/(1 + |z|²)` with `j = k/2`.
    S2,
    /// The unified sphere/disk expression with `J = −2j`.
    S2Printed,
    /// `(i/2) Tr[(dZ Z⁺ − Z dZ⁺)(1 + εZZ⁺)⁻¹]`.
    Gr { n: usize, m: usize, eps: i8 },
    /// `(i/2)(z̄·dz − z·dz̄)/(1 + ε|z|²)`.
    Cp { n: usize, eps: i8 },
}

impl ClosedId {
    /// Every closed form with the given Grassmann and projective sizes.
    pub fn catalog() -> Vec<ClosedId> {
        use ClosedId::*;
        let mut v = vec![D1, D1Real, X1Real, DJ1, DJ1Eta, DJ1Real, XJ1Mn, XJ1Real, XJ1Disk, S2];
        for eps in [1, -1] {
            for n in 1..=2 {
                for m in 1..=2 {
                    v.push(Gr { n, m, eps });
                }
            }
            for n in 1..=3 {
                v.push(Cp { n, eps });
            }
        }
        v
    }

    pub fn printed_variants() -> [ClosedId; 4] {
        [ClosedId::DJ1RealPrinted, ClosedId::XJ1DiskPrinted, ClosedId::XJ1DiskCollected, ClosedId::S2Printed]
    }

    /// The variant derived independently for a printed one.
    pub fn reference(&self) -> ClosedId {
        match self {
            ClosedId::DJ1RealPrinted => ClosedId::DJ1Real,
            ClosedId::XJ1DiskPrinted | ClosedId::XJ1DiskCollected => ClosedId::XJ1Disk,
            ClosedId::S2Printed => ClosedId::S2,
            other => *other,
        }
    }

    pub fn chart(&self) -> ChartId {
        use ClosedId::*;
        match *self {
            D1 => ChartId::D1,
            D1Real => ChartId::D1Real,
            X1Real => ChartId::X1Real,
            DJ1 => ChartId::DJ1,
            DJ1Eta => ChartId::DJ1Eta,
            DJ1Real | DJ1RealPrinted => ChartId::DJ1Real,
            XJ1Mn => ChartId::XJ1Mn,
            XJ1Real | XJ1Disk | XJ1DiskPrinted | XJ1DiskCollected => ChartId::XJ1Real,
            S2 | S2Printed => ChartId::S2,
            Gr { n, m, eps } => ChartId::Gr { n, m, eps },
            Cp { n, eps } => ChartId::CP { n, eps },
        }
    }

    /// Potential and route that produce the same connection by derivation.
    pub fn derivation(&self, params: ModelParams) -> (Potential, Route) {
        use ClosedId::*;
        use Transform as T;
        let f = |t: Transform| TransformMap::forward(t);
        let (kind, maps) = match *self {
            D1 => (PotKind::D1, vec![]),
            D1Real => (PotKind::D1, vec![f(T::BridgeD1)]),
            X1Real => (PotKind::X1D, vec![f(T::BridgeX1)]),
            DJ1 => (PotKind::Scwz, vec![]),
            DJ1Eta => (PotKind::Scwz, vec![f(T::Fc)]),
            DJ1Real | DJ1RealPrinted => (PotKind::Scwz, vec![f(T::BridgeDJ1), f(T::Fc)]),
            XJ1Mn => (PotKind::P222a, vec![f(T::BridgeMn)]),
            XJ1Real => (PotKind::Kk1, vec![f(T::BridgeEta)]),
            XJ1Disk | XJ1DiskPrinted | XJ1DiskCollected => (PotKind::Scwz, vec![f(T::BridgeEta), f(T::Phi1)]),
            S2 | S2Printed => (PotKind::S2 { j: params.k / 2.0 }, vec![]),
            Gr { n, m, eps } => (PotKind::Gr { n, m, eps }, vec![]),
            Cp { n, eps } => (PotKind::Cp { n, eps }, vec![]),
        };
        let pot = Potential::new(kind, params);
        let route = if maps.is_empty() { Route::identity(pot.chart()) } else { Route::new(maps).expect("routes in the catalog chain") };
        (pot, route)
    }
}

impl fmt::Display for ClosedId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ClosedId::*;
        match *self {
            DJ1RealPrinted => write!(f, "DJ1-real-printed"),
            XJ1Disk => write!(f, "XJ1-disk"),
            XJ1DiskPrinted => write!(f, "XJ1-disk-printed"),
            XJ1DiskCollected => write!(f, "XJ1-disk-collected"),
            S2Printed => write!(f, "S2-printed"),
            other => write!(f, "{}", other.chart()),
        }
    }
}

impl FromStr for ClosedId {
    type Err = GeoError;
    fn from_str(s: &str) -> Result<Self> {
        use ClosedId::*;
        Ok(match s {
            "DJ1-real-printed" => DJ1RealPrinted,
            "XJ1-disk" => XJ1Disk,
            "XJ1-disk-printed" => XJ1DiskPrinted,
            "XJ1-disk-collected" => XJ1DiskCollected,
            "S2-printed" => S2Printed,
            _ => match s.parse::<ChartId>()? {
                ChartId::D1 => D1,
                ChartId::D1Real => D1Real,
                ChartId::X1Real => X1Real,
                ChartId::DJ1 => DJ1,
                ChartId::DJ1Eta => DJ1Eta,
                ChartId::DJ1Real => DJ1Real,
                ChartId::XJ1Mn => XJ1Mn,
                ChartId::XJ1Real => XJ1Real,
                ChartId::S2 => S2,
                ChartId::Gr { n, m, eps } => Gr { n, m, eps },
                ChartId::CP { n, eps } => Cp { n, eps },
                _ => return Err(GeoError::UnknownId(s.into())),
            },
        })
    }
}

/// A closed-form connection as a form field on its chart.
#[derive(Clone, Copy, Debug)]
pub struct ClosedBerry {
    pub id: ClosedId,
    pub params: ModelParams,
}

impl ClosedBerry {
    pub fn new(id: ClosedId, params: ModelParams) -> Self {
        ClosedBerry { id, params }
    }
}

impl Field for ClosedBerry {
    fn dim(&self) -> usize {
        self.id.chart().nvars()
    }
    fn len(&self) -> usize {
        self.dim()
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.id.chart().check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        closed_berry(self.id, self.params, x)
    }
}

impl FormField for ClosedBerry {
    fn degree(&self) -> usize {
        1
    }
}

fn closed_berry<T: Number>(id: ClosedId, p: ModelParams, x: &[T]) -> Vec<T> {
    use ClosedId::*;
    let ModelParams { k, nu, .. } = p;
    let ih = |v: T| v * (I * 0.5);
    match id {
        D1 => {
            let (w, wb) = (x[0], x[1]);
            let pp = -(w * wb) + 1.0;
            vec![wb / pp * (I * k), -(w / pp * (I * k))]
        }
        D1Real => {
            let (a, b) = (x[0], x[1]);
            let pp = -(a * a) - b * b + 1.0;
            vec![b / pp * (2.0 * k), -(a / pp * (2.0 * k))]
        }
        X1Real => {
            let (xx, y) = (x[0], x[1]);
            let n = xx * xx + (y + 1.0) * (y + 1.0);
            vec![(-(xx * xx) + y * y - 1.0) / (y * n) * k, -(xx * y * 2.0 * k) / (y * n)]
        }
        DJ1 => {
            let (w, z, wb, zb) = (x[0], x[1], x[2], x[3]);
            let pp = -(w * wb) + 1.0;
            let etab = (zb + z * wb) / pp;
            let eta = (z + zb * w) / pp;
            let a_w = wb / pp * (2.0 * k) + etab * etab * (nu / 2.0);
            let a_wb = w / pp * (2.0 * k) + eta * eta * (nu / 2.0);
            vec![ih(a_w), ih(etab * nu), -ih(a_wb), -ih(eta * nu)]
        }
        DJ1Eta => {
            let (w, e, wb, eb) = (x[0], x[1], x[2], x[3]);
            let pp = -(w * wb) + 1.0;
            vec![
                ih(wb / pp * (2.0 * k) - eb * eb * (nu / 2.0)),
                ih((eb + e * wb) * nu),
                -ih(w / pp * (2.0 * k) - e * e * (nu / 2.0)),
                -ih((e + eb * w) * nu),
            ]
        }
        DJ1Real => {
            let (a, b, q, pp) = (x[0], x[1], x[2], x[3]);
            let den = -(a * a) - b * b + 1.0;
            vec![
                b / den * (2.0 * k) - q * pp * nu,
                -(a / den * (2.0 * k)) + (q * q - pp * pp) * (nu / 2.0),
                ((-a + 1.0) * pp + b * q) * nu,
                -(((a + 1.0) * q + b * pp) * nu),
            ]
        }
        DJ1RealPrinted => {
            let (a, b, q, pp) = (x[0], x[1], x[2], x[3]);
            let den = -(a * a) - b * b + 1.0;
            vec![
                b / den * (2.0 * k),
                -(a / den * (2.0 * k)) + (q * q - pp * pp) * (nu / 2.0),
                -((a - b * q - 1.0) * nu),
                -((a * q + b) * nu),
            ]
        }
        XJ1Mn => {
            let (y, n) = (x[1], x[3]);
            vec![-((n * n / y * nu + k / 4.0) / y), T::zero(), n / y * (2.0 * nu), T::zero()]
        }
        XJ1Real => vec![-(x[1].recip() * k), T::zero(), x[3] * (2.0 * nu), T::zero()],
        XJ1Disk | XJ1DiskPrinted | XJ1DiskCollected => {
            let (xx, y, q, pp) = (x[0], x[1], x[2], x[3]);
            let y1 = y + 1.0;
            let n = xx * xx + y1 * y1;
            let d = xx * xx - y1 * y1;
            let s = q * q - pp * pp;
            // weight of the fibre dx, dy terms: ν derived, 2ν as published
            let g = if id == XJ1Disk { nu } else { 2.0 * nu };
            let dx = (-(xx * xx) + y * y - 1.0) / (n * y) * k + (-(xx * y1 * q * pp * 4.0) + d * s) * g / (n * n);
            let dy = if id == XJ1DiskCollected {
                (-(xx * k) + d * pp * q * g / n + xx * y1 * s) * 2.0 / n
            } else {
                -(xx * (2.0 * k) / n) + (d * q * pp + xx * y1 * s) * (2.0 * g) / (n * n)
            };
            let dq = (y1 * pp - xx * q) * (2.0 * nu) / n;
            let dp = -(((xx * xx + y * y1) * q - xx * pp) * (2.0 * nu) / n);
            vec![dx, dy, dq, dp]
        }
        S2 | S2Printed => {
            let j = k / 2.0;
            let c = if id == S2 { j } else { 2.0 * j };
            let (z, zb) = (x[0], x[1]);
            let s = z * zb + 1.0;
            vec![zb / s * (I * c), -(z / s * (I * c))]
        }
        Gr { n, m, eps } => {
            let nm = n * m;
            let a = crate::metrics::zzh_plus(x, n, m, eps as f64);
            let minv = linalg::inverse(&a).unwrap_or_else(|| linalg::zeros(n, n));
            let mut out = vec![T::zero(); 2 * nm];
            for r in 0..n {
                for c in 0..m {
                    // (Z⁺M)_{cr} and (MZ)_{rc}
                    let zpm = (0..n).fold(T::zero(), |s, l| s + x[nm + l * m + c] * minv[l][r]);
                    let mz = (0..n).fold(T::zero(), |s, l| s + minv[r][l] * x[l * m + c]);
                    out[r * m + c] = ih(zpm);
                    out[nm + r * m + c] = -ih(mz);
                }
            }
            out
        }
        Cp { n, eps } => {
            let e = eps as f64;
            let s = (0..n).fold(T::zero(), |acc, a| acc + x[a] * x[n + a]) * e + 1.0;
            let mut out = vec![T::zero(); 2 * n];
            for a in 0..n {
                out[a] = ih(x[n + a] / s);
                out[n + a] = -ih(x[a] / s);
            }
            out
        }
    }
}

/// The same connection obtained from its potential and route.
pub fn derived_berry(id: ClosedId, params: ModelParams) -> Pulled<BerryConnection> {
    let (f, route) = id.derivation(params);
    Pulled::new(BerryConnection(f), route).expect("catalog routes preserve dimension")
}

/// The Kähler form of the derivation's potential, pulled to the chart of
/// the closed form.
pub fn pulled_omega(id: ClosedId, params: ModelParams) -> Result<Pulled<KahlerForm<PotentialMetric>>> {
    let (f, route) = id.derivation(params);
    Pulled::new(KahlerForm::new(PotentialMetric(f))?, route)
}

/// Largest coefficient gap between the closed form and the derived one.
pub fn closed_vs_derived(id: ClosedId, params: ModelParams, x: &[Scalar]) -> Result<f64> {
    let a = form_at(&ClosedBerry::new(id, params), x)?;
    let b = form_at(&derived_berry(id, params), x)?;
    Ok(a.max_abs_diff(&b))
}

/// Largest coefficient of `dA_B + ω`, with `A_B` the closed form.
pub fn d_berry_residual(id: ClosedId, params: ModelParams, x: &[Scalar]) -> Result<f64> {
    let da = exterior_derivative(&ClosedBerry::new(id, params), x)?;
    let w = form_at(&pulled_omega(id, params)?, x)?;
    Ok(da.add(&w).max_abs())
}

/// `dA_B` on the Grassmannian as written in trace form,
/// `−i Tr[dZ(1 + εZ⁺Z)⁻¹ ∧ dZ⁺(1 + εZZ⁺)⁻¹]`, on the full vector `[Z, Z̄]`.
pub fn grassmann_d_berry(n: usize, m: usize, eps: i8, x: &[Scalar]) -> FormValue {
    grassmann_trace_form(n, m, eps, x, -I)
}

/// The Kähler form in trace form, `i Tr[(1 + εZZ⁺)⁻¹dZ ∧ (1 + εZ⁺Z)⁻¹dZ⁺]`.
pub fn grassmann_omega(n: usize, m: usize, eps: i8, x: &[Scalar]) -> FormValue {
    grassmann_trace_form(n, m, eps, x, I)
}

/// `c Σ A_{bc} B_{da} dZ_{ab} ∧ dZ̄_{dc}` with `A = (1 + εZ⁺Z)⁻¹`,
/// `B = (1 + εZZ⁺)⁻¹`.
fn grassmann_trace_form(n: usize, m: usize, eps: i8, x: &[Scalar], c: Scalar) -> FormValue {
    let e = eps as f64;
    let nm = n * m;
    let a = linalg::inverse(&crate::metrics::zhz_plus(x, n, m, e)).expect("1 + εZ⁺Z invertible in the domain");
    let b = linalg::inverse(&crate::metrics::zzh_plus(x, n, m, e)).expect("1 + εZZ⁺ invertible in the domain");
    let mut mat = vec![vec![Scalar::new(0.0, 0.0); 2 * nm]; 2 * nm];
    for ra in 0..n {
        for cb in 0..m {
            for rd in 0..n {
                for cc in 0..m {
                    let v = c * a[cb][cc] * b[rd][ra];
                    let (i, j) = (ra * m + cb, nm + rd * m + cc);
                    mat[i][j] += v;
                    mat[j][i] -= v;
                }
            }
        }
    }
    FormValue::from_upper(&mat)
}

/// Loop integral of `A_B` and the surface integral of `−ω` over a surface
/// it bounds, both scaled by the holonomy convention.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LoopPhase {
    pub loop_value: f64,
    pub surface_value: f64,
    pub diff: f64,
}

pub fn berry_phase_loop(
    id: ClosedId,
    params: ModelParams,
    curve: &dyn Curve,
    surface: &dyn Surface,
    rule: &Rule,
    conv: HolonomyConvention,
) -> Result<LoopPhase> {
    let s = conv.factor();
    let l = line_integral(&ClosedBerry::new(id, params), curve, rule)?;
    let w = surface_integral(&pulled_omega(id, params)?, surface, rule)?;
    let (loop_value, surface_value) = (s * l.re, -s * w.re);
    Ok(LoopPhase { loop_value, surface_value, diff: (loop_value - surface_value).abs() })
}
