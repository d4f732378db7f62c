//! Metric matrices written out in closed form.

use super::potentials::{zhz_plus, zzh_plus};
use super::MetricSource;
use crate::calculus::{linalg, Field, Number, Scalar};
use crate::charts::{vech_pairs, ChartId};
use crate::error::{GeoError, Result};
use crate::params::ModelParams;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MetricId {
    /// Balanced metric on the Siegel–Jacobi disk, rows `(w, z)`.
    Metrica,
    /// Its inverse.
    Hinv,
    /// Balanced metric on `(v, u)`.
    Kmb,
    KmbInv,
    /// Metric of the potential `P222b` on `(v, η)`.
    Hs,
    /// `2k/(1 − |w|²)²`.
    HD1,
    /// `k/(2y²)`.
    HX1,
    /// `2j/(1 + |z|²)²`.
    HS2 { j: f64 },
    /// Fubini–Study metric of `ℂPⁿ` and its noncompact dual.
    Fb { n: usize, eps: i8 },
    /// Invariant metric on Grassmann charts, `h = A⁻¹ ⊗ B⁻¹`.
    GrH { n: usize, m: usize, eps: i8 },
    /// Two-parameter balanced metric on `(x, y, q, p)`.
    Metrs2,
    /// Three-parameter metric on `(x, y, q, p, κ)`.
    BegGG,
    /// `(k/2y²)(dx² + dy²) + ν(dq² + dp²)`.
    NewM,
    /// Balanced metric on `(x, y, m, n)`.
    NewMM,
    /// `α(dx² + dy²)/y²`.
    X1Real,
    /// Matrix-argument metric on `(vech x, vech y, q, p[, κ])`.
    Bigm { n: usize, ext: bool },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatalogMetric {
    pub id: MetricId,
    pub params: ModelParams,
}

impl CatalogMetric {
    pub fn new(id: MetricId, params: ModelParams) -> Self {
        CatalogMetric { id, params }
    }

    /// Ids usable from the command line, parameter-free variants only.
    pub fn ids() -> Vec<&'static str> {
        vec![
            "metrica", "hinv", "kmb", "kmbINV", "hs", "D1", "X1", "METRS2", "begGG", "linvG", "newM", "NEWMM",
            "X1-real", "BIGM-n1", "BIGM-n2",
        ]
    }

    fn matrix<T: Number>(&self, x: &[T]) -> Vec<Vec<T>> {
        use MetricId::*;
        let ModelParams { k, nu, delta } = self.params;
        let (alpha, gamma) = (self.params.alpha(), self.params.gamma());
        let half_im = |v: T, vb: T| (v - vb) * Scalar::new(0.0, -0.5);
        match self.id {
            Metrica | Hinv => {
                let (w, z, wb, zb) = (x[0], x[1], x[2], x[3]);
                let p = -(w * wb) + 1.0;
                let eta = (z + zb * w) / p;
                let etab = (zb + z * wb) / p;
                let e2 = eta * etab;
                if self.id == Metrica {
                    vec![
                        vec![(p * p).recip() * (2.0 * k) + e2 / p * nu, etab / p * nu],
                        vec![eta / p * nu, p.recip() * nu],
                    ]
                } else {
                    let q = p * p / (2.0 * k);
                    vec![vec![q, -(q * etab)], vec![-(q * eta), p / nu + q * e2]]
                }
            }
            Kmb | KmbInv => {
                let (v, u, vb, ub) = (x[0], x[1], x[2], x[3]);
                let y = half_im(v, vb);
                let r = (u - ub) / (v - vb);
                if self.id == Kmb {
                    vec![
                        vec![(y * y).recip() * (k / 2.0) + r * r / y * nu, -(r / y * nu)],
                        vec![-(r / y * nu), y.recip() * nu],
                    ]
                } else {
                    let q = y * y * (2.0 / k);
                    vec![vec![q, q * r], vec![q * r, y / nu + q * r * r]]
                }
            }
            Hs => {
                let y = half_im(x[0], x[2]);
                let p = half_im(x[1], x[3]);
                vec![vec![(y * y).recip() * (k / 8.0), p * nu], vec![p * nu, y * nu]]
            }
            HD1 => {
                let p = -(x[0] * x[1]) + 1.0;
                vec![vec![(p * p).recip() * (2.0 * k)]]
            }
            HX1 => {
                let y = half_im(x[0], x[1]);
                vec![vec![(y * y).recip() * (k / 2.0)]]
            }
            HS2 { j } => {
                let d = x[0] * x[1] + 1.0;
                vec![vec![(d * d).recip() * (2.0 * j)]]
            }
            Fb { n, eps } => {
                let e = eps as f64;
                let s = (0..n).fold(T::zero(), |acc, a| acc + x[a] * x[n + a]) * e + 1.0;
                (0..n)
                    .map(|a| {
                        (0..n)
                            .map(|b| {
                                let d = if a == b { s } else { T::zero() };
                                (d - x[n + a] * x[b] * e) / (s * s)
                            })
                            .collect()
                    })
                    .collect()
            }
            GrH { n, m, eps } => {
                let e = eps as f64;
                let ai = linalg::inverse(&zzh_plus(x, n, m, e)).expect("1 + εZZ⁺ is invertible on the chart");
                let bi = linalg::inverse(&zhz_plus(x, n, m, e)).expect("1 + εZ⁺Z is invertible on the chart");
                let nm = n * m;
                let mut h = linalg::zeros(nm, nm);
                for i in 0..n {
                    for j in 0..m {
                        for a in 0..n {
                            for l in 0..m {
                                h[i * m + j][a * m + l] = ai[a][i] * bi[j][l];
                            }
                        }
                    }
                }
                h
            }
            Metrs2 | BegGG => {
                let (xx, y, q, p) = (x[0], x[1], x[2], x[3]);
                let s = xx * xx + y * y;
                let ext = self.id == BegGG;
                let d = if ext { delta } else { 0.0 };
                let mut g = linalg::zeros(if ext { 5 } else { 4 }, if ext { 5 } else { 4 });
                g[0][0] = (y * y).recip() * alpha;
                g[1][1] = g[0][0];
                g[2][2] = y.recip() * gamma + p * p * d;
                g[3][3] = s / y * gamma + q * q * d;
                g[2][3] = xx / y * gamma - p * q * d;
                g[3][2] = g[2][3];
                if ext {
                    g[3][4] = q * delta;
                    g[4][3] = g[3][4];
                    g[2][4] = -(p * delta);
                    g[4][2] = g[2][4];
                    g[4][4] = T::re_(delta);
                }
                g
            }
            NewM => {
                let y = x[1];
                let mut g = linalg::zeros(4, 4);
                g[0][0] = (y * y).recip() * (k / 2.0);
                g[1][1] = g[0][0];
                g[2][2] = T::re_(nu);
                g[3][3] = T::re_(nu);
                g
            }
            NewMM => {
                let (y, n) = (x[1], x[3]);
                let r = n / y;
                let mut g = linalg::zeros(4, 4);
                g[0][0] = (n * n / y * nu + k / 2.0) / (y * y);
                g[1][1] = g[0][0];
                g[2][2] = y.recip() * nu;
                g[3][3] = g[2][2];
                g[0][2] = -(r / y * nu);
                g[2][0] = g[0][2];
                g[1][3] = g[0][2];
                g[3][1] = g[0][2];
                g
            }
            X1Real => {
                let y = x[1];
                let a = (y * y).recip() * alpha;
                vec![vec![a, T::zero()], vec![T::zero(), a]]
            }
            Bigm { n, ext } => bigm(x, n, ext, alpha, gamma, delta),
        }
    }
}

fn unvech<T: Number>(v: &[T], n: usize) -> Vec<Vec<T>> {
    let mut a = linalg::zeros(n, n);
    for (t, (i, j)) in vech_pairs(n).into_iter().enumerate() {
        a[i][j] = v[t];
        a[j][i] = v[t];
    }
    a
}

fn trace<T: Number>(a: &[Vec<T>]) -> T {
    (0..a.len()).fold(T::zero(), |s, i| s + a[i][i])
}

fn row_mat_col<T: Number>(r: &[T], m: &[Vec<T>], c: &[T]) -> T {
    let mut s = T::zero();
    for i in 0..r.len() {
        for j in 0..c.len() {
            s += r[i] * m[i][j] * c[j];
        }
    }
    s
}

/// The quadratic form of the matrix-argument metric, polarised into a
/// matrix. `ξ` runs over the chart's coordinate directions.
fn bigm<T: Number>(x: &[T], n: usize, ext: bool, alpha: f64, gamma: f64, delta: f64) -> Vec<Vec<T>> {
    let n1 = n * (n + 1) / 2;
    let dim = 2 * n1 + 2 * n + usize::from(ext);
    let xm = unvech(&x[..n1], n);
    let ym = unvech(&x[n1..2 * n1], n);
    let q = &x[2 * n1..2 * n1 + n];
    let p = &x[2 * n1 + n..2 * n1 + 2 * n];
    let yi = linalg::inverse(&ym).expect("y is positive definite on the chart");
    let xyx = linalg::matmul(&linalg::matmul(&xm, &yi), &xm);
    let mut pp = xyx.clone();
    for i in 0..n {
        for j in 0..n {
            pp[i][j] += ym[i][j];
        }
    }
    let xy = linalg::matmul(&xm, &yi);
    let quad = |xi: &[f64]| -> T {
        let lift = |s: &[f64]| s.iter().map(|&v| T::re_(v)).collect::<Vec<T>>();
        let dx = unvech(&lift(&xi[..n1]), n);
        let dy = unvech(&lift(&xi[n1..2 * n1]), n);
        let dq = lift(&xi[2 * n1..2 * n1 + n]);
        let dp = lift(&xi[2 * n1 + n..2 * n1 + 2 * n]);
        let a = linalg::matmul(&yi, &dx);
        let b = linalg::matmul(&yi, &dy);
        let mut s = trace(&linalg::matmul(&a, &a)) * alpha + trace(&linalg::matmul(&b, &b)) * alpha;
        s += (row_mat_col(&dp, &pp, &dp) + row_mat_col(&dq, &yi, &dq) + row_mat_col(&dp, &xy, &dq) * 2.0) * gamma;
        if ext {
            let mut l = T::re_(xi[dim - 1]);
            for i in 0..n {
                l = l - p[i] * dq[i] + q[i] * dp[i];
            }
            s += l * l * delta;
        }
        s
    };
    let e = |i: usize, j: Option<usize>| {
        let mut v = vec![0.0; dim];
        v[i] += 1.0;
        if let Some(j) = j {
            v[j] += 1.0;
        }
        v
    };
    let diag: Vec<T> = (0..dim).map(|i| quad(&e(i, None))).collect();
    let mut g = linalg::zeros(dim, dim);
    for i in 0..dim {
        g[i][i] = diag[i];
        for j in i + 1..dim {
            let v = (quad(&e(i, Some(j))) - diag[i] - diag[j]) * 0.5;
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    g
}

impl Field for CatalogMetric {
    fn dim(&self) -> usize {
        self.chart().nvars()
    }
    fn len(&self) -> usize {
        let n = self.size();
        n * n
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.chart().check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        self.matrix(x).into_iter().flatten().collect()
    }
}

impl MetricSource for CatalogMetric {
    fn chart(&self) -> ChartId {
        use MetricId::*;
        match self.id {
            Metrica | Hinv => ChartId::DJ1,
            Kmb | KmbInv => ChartId::XJ1,
            Hs => ChartId::XJ1Eta,
            HD1 => ChartId::D1,
            HX1 => ChartId::X1,
            HS2 { .. } => ChartId::S2,
            Fb { n, eps } => ChartId::CP { n, eps },
            GrH { n, m, eps } => ChartId::Gr { n, m, eps },
            Metrs2 | NewM => ChartId::XJ1Real,
            BegGG => ChartId::XJ1Ext,
            NewMM => ChartId::XJ1Mn,
            X1Real => ChartId::X1Real,
            Bigm { n, ext: true } => ChartId::XJnExt(n),
            Bigm { n, ext: false } => ChartId::XJnReal(n),
        }
    }
    fn size(&self) -> usize {
        self.chart().dim()
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use MetricId::*;
        match *self {
            Metrica => write!(f, "metrica"),
            Hinv => write!(f, "hinv"),
            Kmb => write!(f, "kmb"),
            KmbInv => write!(f, "kmbINV"),
            Hs => write!(f, "hs"),
            HD1 => write!(f, "D1"),
            HX1 => write!(f, "X1"),
            HS2 { j } => write!(f, "S2:j={j}"),
            Fb { n, eps } => write!(f, "FB:CP{n}{}", if eps < 0 { "-dual" } else { "" }),
            GrH { n, m, eps } => write!(f, "Gr{n}x{m}{}", if eps < 0 { "-dual" } else { "" }),
            Metrs2 => write!(f, "METRS2"),
            BegGG => write!(f, "begGG"),
            NewM => write!(f, "newM"),
            NewMM => write!(f, "NEWMM"),
            X1Real => write!(f, "X1-real"),
            Bigm { n, ext: true } => write!(f, "BIGM-n{n}"),
            Bigm { n, ext: false } => write!(f, "BIGM0-n{n}"),
        }
    }
}

impl FromStr for MetricId {
    type Err = GeoError;
    fn from_str(s: &str) -> Result<Self> {
        use MetricId::*;
        Ok(match s {
            "metrica" => Metrica,
            "hinv" => Hinv,
            "kmb" => Kmb,
            "kmbINV" => KmbInv,
            "hs" => Hs,
            "D1" => HD1,
            "X1" => HX1,
            "METRS2" => Metrs2,
            "begGG" | "linvG" => BegGG,
            "newM" => NewM,
            "NEWMM" => NewMM,
            "X1-real" => X1Real,
            "BIGM-n1" => Bigm { n: 1, ext: true },
            "BIGM-n2" => Bigm { n: 2, ext: true },
            "BIGM0-n1" => Bigm { n: 1, ext: false },
            "BIGM0-n2" => Bigm { n: 2, ext: false },
            _ => {
                if let Some(j) = s.strip_prefix("S2:j=") {
                    return j.parse().map(|j| HS2 { j }).map_err(|_| GeoError::UnknownId(s.into()));
                }
                if let Some(rest) = s.strip_prefix("FB:") {
                    if let ChartId::CP { n, eps } = rest.parse()? {
                        return Ok(Fb { n, eps });
                    }
                }
                match s.parse::<ChartId>() {
                    Ok(ChartId::Gr { n, m, eps }) => GrH { n, m, eps },
                    _ => return Err(GeoError::UnknownId(s.into())),
                }
            }
        })
    }
}

/// Catalog metric matching the natural potential of a holomorphic chart.
pub fn catalog_for(chart: ChartId, params: ModelParams) -> Option<CatalogMetric> {
    use MetricId::*;
    let id = match chart {
        ChartId::D1 => HD1,
        ChartId::X1 => HX1,
        ChartId::DJ1 => Metrica,
        ChartId::XJ1 => Kmb,
        ChartId::S2 => HS2 { j: params.k / 2.0 },
        ChartId::CP { n, eps } => Fb { n, eps },
        ChartId::Gr { n, m, eps } => GrH { n, m, eps },
        _ => return None,
    };
    Some(CatalogMetric::new(id, params))
}
