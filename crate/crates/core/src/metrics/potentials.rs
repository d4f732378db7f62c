//! Kähler potentials as scalar fields on full coordinate vectors.

use crate::calculus::{linalg, Field, Number, Scalar, I};
use crate::charts::ChartId;
use crate::error::{GeoError, Result};
use crate::params::ModelParams;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PotKind {
    /// `−2k log(1 − ww̄)`.
    D1,
    /// `−2k log((v − v̄)/2i)`.
    X1,
    /// `−2k log(4y/|v + i|²)`, the disk potential carried to the half-plane.
    X1D,
    /// Logarithm of the coherent-state kernel on the Siegel–Jacobi disk.
    Scwz,
    /// The same kernel after the fibre change `z = η − wη̄`.
    Ggg,
    /// `−2k log y − (ν/2)(η − η̄)²` on `(v, η)`.
    Kk1,
    /// `−2k log y − iν(u − ū)²/(v − v̄)`; its metric is the two-parameter
    /// balanced metric on `(v, u)`.
    Fvu,
    /// `−(k/2) log y − iν(u − ū)²/(v − v̄)`.
    P222a,
    /// `−(k/2) log y + (iν/4)(η − η̄)²(v − v̄)`.
    P222b,
    /// `−(k/2) log y + 2νyp²` on `(x, y, q, p)`.
    P222c,
    /// `P222a` with `ν → πν`.
    Pot1,
    /// `−2k log(4y/N) + νF` on `(x, y, q, p)`.
    Fxy,
    /// `−2k log(P/((1 − w)(1 − w̄))) − (ν/2)(η − η̄)²` on `(w, η)`.
    Kk2,
    /// `2j log(1 + zz̄)`.
    S2 { j: f64 },
    /// `ε log(1 + ε|Z|²)`.
    Cp { n: usize, eps: i8 },
    /// `ε log det(1 + εZZ⁺)`.
    Gr { n: usize, m: usize, eps: i8 },
}

/// A potential together with the parameters it depends on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Potential {
    pub kind: PotKind,
    pub params: ModelParams,
}

impl Potential {
    pub fn new(kind: PotKind, params: ModelParams) -> Self {
        Potential { kind, params }
    }

    pub fn chart(&self) -> ChartId {
        use PotKind::*;
        match self.kind {
            D1 => ChartId::D1,
            X1 | X1D => ChartId::X1,
            Scwz => ChartId::DJ1,
            Ggg | Kk2 => ChartId::DJ1Eta,
            Kk1 | P222b => ChartId::XJ1Eta,
            Fvu | P222a | Pot1 => ChartId::XJ1,
            P222c | Fxy => ChartId::XJ1Real,
            S2 { .. } => ChartId::S2,
            Cp { n, eps } => ChartId::CP { n, eps },
            Gr { n, m, eps } => ChartId::Gr { n, m, eps },
        }
    }

    /// Evaluates on a full coordinate vector.
    pub fn value<T: Number>(&self, x: &[T]) -> T {
        use PotKind::*;
        let ModelParams { k, nu, .. } = self.params;
        let i = |s: f64| T::cst(I * s);
        // (v − v̄)/2i, the imaginary part on a half-plane chart
        let half_im = |v: T, vb: T| (v - vb) / i(2.0);
        match self.kind {
            D1 => (-(x[0] * x[1]) + 1.0).ln() * (-2.0 * k),
            X1 => half_im(x[0], x[1]).ln() * (-2.0 * k),
            X1D => (half_im(x[0], x[1]) * 4.0 / ((x[0] + i(1.0)) * (x[1] - i(1.0)))).ln() * (-2.0 * k),
            Scwz => {
                let (w, z, wb, zb) = (x[0], x[1], x[2], x[3]);
                let p = -(w * wb) + 1.0;
                p.ln() * (-2.0 * k) + (z * zb * 2.0 + z * z * wb + zb * zb * w) / (p * 2.0) * nu
            }
            Ggg => {
                let (w, e, wb, eb) = (x[0], x[1], x[2], x[3]);
                let p = -(w * wb) + 1.0;
                p.ln() * (-2.0 * k) + (e * eb - (wb * e * e + w * eb * eb) * 0.5) * nu
            }
            Kk1 => {
                let d = x[1] - x[3];
                half_im(x[0], x[2]).ln() * (-2.0 * k) - d * d * (nu / 2.0)
            }
            Fvu | P222a | Pot1 => {
                let c = if matches!(self.kind, Fvu) { -2.0 * k } else { -k / 2.0 };
                let g = if matches!(self.kind, Pot1) { std::f64::consts::PI * nu } else { nu };
                let (v, u, vb, ub) = (x[0], x[1], x[2], x[3]);
                let du = u - ub;
                half_im(v, vb).ln() * c - du * du / (v - vb) * i(g)
            }
            P222b => {
                let (v, e, vb, eb) = (x[0], x[1], x[2], x[3]);
                let d = e - eb;
                half_im(v, vb).ln() * (-k / 2.0) + d * d * (v - vb) * i(nu / 4.0)
            }
            P222c => x[1].ln() * (-k / 2.0) + x[1] * x[3] * x[3] * (2.0 * nu),
            Fxy => {
                let (xx, y, q, p) = (x[0], x[1], x[2], x[3]);
                let n = xx * xx + (y + 1.0) * (y + 1.0);
                let f = ((y + 1.0) * q * q + (xx * xx + y * y + y) * p * p + q * p * xx * 2.0) * 2.0 / n;
                (y * 4.0 / n).ln() * (-2.0 * k) + f * nu
            }
            Kk2 => {
                let (w, e, wb, eb) = (x[0], x[1], x[2], x[3]);
                let p = -(w * wb) + 1.0;
                let d = e - eb;
                (p / ((-w + 1.0) * (-wb + 1.0))).ln() * (-2.0 * k) - d * d * (nu / 2.0)
            }
            S2 { j } => (x[0] * x[1] + 1.0).ln() * (2.0 * j),
            Cp { n, eps } => {
                let e = eps as f64;
                let s = (0..n).fold(T::zero(), |acc, a| acc + x[a] * x[n + a]);
                (s * e + 1.0).ln() * e
            }
            Gr { n, m, eps } => {
                let e = eps as f64;
                let a = zzh_plus(x, n, m, e);
                linalg::det(&a).ln() * e
            }
        }
    }
}

/// `1 + εZZ⁺` from a full vector `[Z, Z̄]`, both row-major `n × m`.
pub fn zzh_plus<T: Number>(x: &[T], n: usize, m: usize, eps: f64) -> Vec<Vec<T>> {
    let nm = n * m;
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let s = (0..m).fold(T::zero(), |acc, l| acc + x[a * m + l] * x[nm + b * m + l]);
                    s * eps + if a == b { 1.0 } else { 0.0 }
                })
                .collect()
        })
        .collect()
}

/// `1 + εZ⁺Z`, an `m × m` matrix.
pub fn zhz_plus<T: Number>(x: &[T], n: usize, m: usize, eps: f64) -> Vec<Vec<T>> {
    let nm = n * m;
    (0..m)
        .map(|a| {
            (0..m)
                .map(|b| {
                    let s = (0..n).fold(T::zero(), |acc, l| acc + x[nm + l * m + a] * x[l * m + b]);
                    s * eps + if a == b { 1.0 } else { 0.0 }
                })
                .collect()
        })
        .collect()
}

impl Field for Potential {
    fn dim(&self) -> usize {
        self.chart().nvars()
    }
    fn len(&self) -> usize {
        1
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.chart().check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        vec![self.value(x)]
    }
}

impl fmt::Display for PotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use PotKind::*;
        match *self {
            D1 => write!(f, "D1"),
            X1 => write!(f, "X1"),
            X1D => write!(f, "X1D"),
            Scwz => write!(f, "SCWZ"),
            Ggg => write!(f, "GGG"),
            Kk1 => write!(f, "KK1"),
            Fvu => write!(f, "Fvu"),
            P222a => write!(f, "222a"),
            P222b => write!(f, "222b"),
            P222c => write!(f, "222c"),
            Pot1 => write!(f, "POT1"),
            Fxy => write!(f, "FXY"),
            Kk2 => write!(f, "KK2"),
            S2 { j } => write!(f, "S2:j={j}"),
            Cp { n, eps } => write!(f, "CP{n}{}", if eps < 0 { "-dual" } else { "" }),
            Gr { n, m, eps } => write!(f, "Gr{n}x{m}{}", if eps < 0 { "-dual" } else { "" }),
        }
    }
}

impl FromStr for PotKind {
    type Err = GeoError;
    fn from_str(s: &str) -> Result<Self> {
        use PotKind::*;
        Ok(match s {
            "D1" => D1,
            "X1" => X1,
            "X1D" => X1D,
            "SCWZ" => Scwz,
            "GGG" => Ggg,
            "KK1" => Kk1,
            "Fvu" => Fvu,
            "222a" => P222a,
            "222b" => P222b,
            "222c" => P222c,
            "POT1" => Pot1,
            "FXY" => Fxy,
            "KK2" => Kk2,
            _ => {
                if let Some(j) = s.strip_prefix("S2:j=") {
                    return j.parse().map(|j| S2 { j }).map_err(|_| GeoError::UnknownId(s.into()));
                }
                match s.parse::<ChartId>()? {
                    ChartId::CP { n, eps } => Cp { n, eps },
                    ChartId::Gr { n, m, eps } => Gr { n, m, eps },
                    _ => return Err(GeoError::UnknownId(s.into())),
                }
            }
        })
    }
}

/// The natural potential of a chart, if it has one.
pub fn default_potential(chart: ChartId, params: ModelParams) -> Option<Potential> {
    use ChartId as C;
    let kind = match chart {
        C::D1 => PotKind::D1,
        C::X1 => PotKind::X1,
        C::DJ1 => PotKind::Scwz,
        C::DJ1Eta => PotKind::Ggg,
        C::XJ1 => PotKind::Fvu,
        C::XJ1Eta => PotKind::Kk1,
        C::S2 => PotKind::S2 { j: params.k / 2.0 },
        C::CP { n, eps } => PotKind::Cp { n, eps },
        C::Gr { n, m, eps } => PotKind::Gr { n, m, eps },
        _ => return None,
    };
    Some(Potential::new(kind, params))
}
