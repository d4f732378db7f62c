//! Coordinate charts, points and the transforms between them.
//!
//! A point on a holomorphic chart is stored by its holomorphic coordinates.
//! Everything that differentiates works on the *full* vector
//! `[z_1..z_n, z̄_1..z̄_n]`, where `z` and `z̄` are independent (Wirtinger)
//! variables. Real charts use their real coordinates directly; each of them
//! interleaves the real and imaginary parts of a holomorphic partner.

mod transforms;

pub use transforms::{apply, jacobian, transform_jacobian, GroupElem, Route, Transform, TransformMap};

use crate::calculus::{linalg, Scalar};
use crate::error::{GeoError, Result};
use rand::Rng;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChartId {
    /// Unit disk, `w`.
    D1,
    /// Unit disk in `(α, β)`, `w = α + iβ`.
    D1Real,
    /// Upper half-plane, `v`.
    X1,
    /// Upper half-plane in `(x, y)`.
    X1Real,
    /// Siegel–Jacobi disk, `(w, z)`.
    DJ1,
    /// Siegel–Jacobi disk after the fibre change, `(w, η)`.
    DJ1Eta,
    /// `(α, β, q, p)` with `η = q + ip`.
    DJ1Real,
    /// Siegel–Jacobi upper half-plane, `(v, u)`.
    XJ1,
    /// `(v, η)`.
    XJ1Eta,
    /// `(x, y, q, p)`.
    XJ1Real,
    /// `(x, y, m, n)` with `u = m + in`.
    XJ1Mn,
    /// Extended half-plane `(x, y, q, p, κ)`.
    XJ1Ext,
    /// Riemann sphere, `z`.
    S2,
    /// `ℂPⁿ` for `eps = 1`, its dual ball for `eps = -1`.
    CP { n: usize, eps: i8 },
    /// Pontrjagin coordinates `Z ∈ M(n, m)`, row-major.
    Gr { n: usize, m: usize, eps: i8 },
    /// `𝒳ᴶₙ` in `(vech x, vech y, q, p)`.
    XJnReal(usize),
    /// `𝒳̃ᴶₙ`, the above plus `κ`.
    XJnExt(usize),
}

impl ChartId {
    pub fn is_complex(&self) -> bool {
        use ChartId::*;
        matches!(self, D1 | X1 | DJ1 | DJ1Eta | XJ1 | XJ1Eta | S2 | CP { .. } | Gr { .. })
    }

    /// Number of stored coordinates (complex ones for holomorphic charts).
    pub fn dim(&self) -> usize {
        use ChartId::*;
        match *self {
            D1 | X1 | S2 => 1,
            D1Real | X1Real | DJ1 | DJ1Eta | XJ1 | XJ1Eta => 2,
            DJ1Real | XJ1Real | XJ1Mn => 4,
            XJ1Ext => 5,
            CP { n, .. } => n,
            Gr { n, m, .. } => n * m,
            XJnReal(n) => n * (n + 1) + 2 * n,
            XJnExt(n) => n * (n + 1) + 2 * n + 1,
        }
    }

    /// Length of the full coordinate vector fields are evaluated on.
    pub fn nvars(&self) -> usize {
        if self.is_complex() {
            2 * self.dim()
        } else {
            self.dim()
        }
    }

    pub fn coord_names(&self) -> Vec<String> {
        use ChartId::*;
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect();
        match *self {
            D1 => s(&["w"]),
            D1Real => s(&["alpha", "beta"]),
            X1 => s(&["v"]),
            X1Real => s(&["x", "y"]),
            DJ1 => s(&["w", "z"]),
            DJ1Eta => s(&["w", "eta"]),
            DJ1Real => s(&["alpha", "beta", "q", "p"]),
            XJ1 => s(&["v", "u"]),
            XJ1Eta => s(&["v", "eta"]),
            XJ1Real => s(&["x", "y", "q", "p"]),
            XJ1Mn => s(&["x", "y", "m", "n"]),
            XJ1Ext => s(&["x", "y", "q", "p", "kappa"]),
            S2 => s(&["z"]),
            CP { n, .. } => (1..=n).map(|i| format!("z{i}")).collect(),
            Gr { n, m, .. } => (1..=n).flat_map(|i| (1..=m).map(move |j| format!("z{i}{j}"))).collect(),
            XJnReal(n) | XJnExt(n) => {
                let mut v = Vec::new();
                for name in ["x", "y"] {
                    for (i, j) in vech_pairs(n) {
                        v.push(format!("{name}{}{}", i + 1, j + 1));
                    }
                }
                v.extend((1..=n).map(|i| format!("q{i}")));
                v.extend((1..=n).map(|i| format!("p{i}")));
                if matches!(self, XJnExt(_)) {
                    v.push("kappa".into());
                }
                v
            }
        }
    }

    /// Holomorphic chart whose real and imaginary parts this real chart lists.
    pub fn complex_partner(&self) -> Option<ChartId> {
        use ChartId::*;
        match self {
            D1Real => Some(D1),
            X1Real => Some(X1),
            DJ1Real => Some(DJ1Eta),
            XJ1Real => Some(XJ1Eta),
            XJ1Mn => Some(XJ1),
            _ => None,
        }
    }

    /// Domain predicate on a full coordinate vector.
    pub fn check(&self, x: &[Scalar]) -> Result<()> {
        use ChartId::*;
        let name = self.to_string();
        let fail = |why: &str| Err(GeoError::domain(&name, why));
        if x.len() != self.nvars() {
            return Err(GeoError::Parse(format!("{name} expects {} coordinates, got {}", self.nvars(), x.len())));
        }
        let n = self.dim();
        match *self {
            D1 | DJ1 | DJ1Eta => {
                if (x[0] * x[n]).re >= 1.0 {
                    return fail("|w| >= 1");
                }
            }
            X1 | XJ1 | XJ1Eta => {
                if ((x[0] - x[n]) / Scalar::new(0.0, 2.0)).re <= 0.0 {
                    return fail("Im v <= 0");
                }
            }
            D1Real | DJ1Real => {
                if (x[0] * x[0] + x[1] * x[1]).re >= 1.0 {
                    return fail("alpha^2 + beta^2 >= 1");
                }
            }
            X1Real | XJ1Real | XJ1Mn | XJ1Ext => {
                if x[1].re <= 0.0 {
                    return fail("y <= 0");
                }
            }
            S2 => {}
            CP { eps, .. } => {
                let s: Scalar = (0..n).map(|i| x[i] * x[n + i]).sum();
                if eps < 0 && s.re >= 1.0 {
                    return fail("|Z| >= 1");
                }
            }
            Gr { n: rows, m, eps } => {
                if eps < 0 {
                    let z: Vec<Scalar> = x[..n].to_vec();
                    let a = one_plus_eps_zzh(&z, rows, m, -1.0);
                    if linalg::hermitian_eigenvalues(&a).iter().any(|&e| e <= 0.0) {
                        return fail("1 - Z Z^+ not positive definite");
                    }
                }
            }
            XJnReal(k) | XJnExt(k) => {
                let y = unvech_values(&x[k * (k + 1) / 2..k * (k + 1)], k);
                if linalg::hermitian_eigenvalues(&y).iter().any(|&e| e <= 0.0) {
                    return fail("y not positive definite");
                }
            }
        }
        Ok(())
    }

    /// Random point inside the sampling margins: `y ∈ [0.2, 5]`, `|w| ≤ 0.9`,
    /// real fibre coordinates in `[-3, 3]`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ChartPoint {
        use ChartId::*;
        let u = |rng: &mut R, a: f64, b: f64| rng.gen_range(a..b);
        let disk = |rng: &mut R| {
            let r = 0.9 * rng.gen_range(0.0f64..1.0).sqrt();
            Scalar::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
        };
        let plane = |rng: &mut R| Scalar::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.2..5.0));
        let fibre = |rng: &mut R| Scalar::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let r = |v: f64| Scalar::new(v, 0.0);
        let coords: Vec<Scalar> = match *self {
            D1 => vec![disk(rng)],
            D1Real => {
                let w = disk(rng);
                vec![r(w.re), r(w.im)]
            }
            X1 => vec![plane(rng)],
            X1Real => vec![r(u(rng, -3.0, 3.0)), r(u(rng, 0.2, 5.0))],
            DJ1 | DJ1Eta => vec![disk(rng), fibre(rng)],
            DJ1Real => {
                let w = disk(rng);
                vec![r(w.re), r(w.im), r(u(rng, -3.0, 3.0)), r(u(rng, -3.0, 3.0))]
            }
            XJ1 | XJ1Eta => vec![plane(rng), fibre(rng)],
            XJ1Real | XJ1Mn => vec![r(u(rng, -3.0, 3.0)), r(u(rng, 0.2, 5.0)), r(u(rng, -3.0, 3.0)), r(u(rng, -3.0, 3.0))],
            XJ1Ext => (0..5).map(|i| if i == 1 { r(u(rng, 0.2, 5.0)) } else { r(u(rng, -3.0, 3.0)) }).collect(),
            S2 => vec![Scalar::new(u(rng, -2.0, 2.0), u(rng, -2.0, 2.0))],
            CP { n, eps } => {
                let mut z: Vec<Scalar> = (0..n).map(|_| Scalar::new(u(rng, -1.0, 1.0), u(rng, -1.0, 1.0))).collect();
                if eps < 0 {
                    let norm = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                    let target = 0.9 * rng.gen_range(0.0f64..1.0);
                    z.iter_mut().for_each(|v| *v *= target / norm.max(1e-300));
                }
                z
            }
            Gr { n, m, eps } => {
                let mut z: Vec<Scalar> = (0..n * m).map(|_| Scalar::new(u(rng, -1.0, 1.0), u(rng, -1.0, 1.0))).collect();
                if eps < 0 {
                    let a = linalg::to_na(&(0..n).map(|i| z[i * m..(i + 1) * m].to_vec()).collect());
                    let smax = a.singular_values().max();
                    let target = 0.9 * rng.gen_range(0.05f64..1.0);
                    z.iter_mut().for_each(|v| *v *= target / smax.max(1e-300));
                }
                z
            }
            XJnReal(k) | XJnExt(k) => {
                let n1 = k * (k + 1) / 2;
                let mut v: Vec<Scalar> = (0..n1).map(|_| r(u(rng, -3.0, 3.0))).collect();
                // y = B Bᵗ + 0.2·1 keeps the eigenvalues away from zero
                let b: Vec<Vec<f64>> = (0..k).map(|_| (0..k).map(|_| u(rng, -1.5, 1.5)).collect()).collect();
                for (i, j) in vech_pairs(k) {
                    let s: f64 = (0..k).map(|l| b[i][l] * b[j][l]).sum();
                    v.push(r(s + if i == j { 0.2 } else { 0.0 }));
                }
                v.extend((0..2 * k).map(|_| r(u(rng, -3.0, 3.0))));
                if matches!(self, XJnExt(_)) {
                    v.push(r(u(rng, -3.0, 3.0)));
                }
                v
            }
        };
        ChartPoint { chart: *self, coords }
    }
}

/// Row-wise upper-triangle index pairs: `(0,0), (0,1), …, (1,1), …`.
pub fn vech_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
}

fn unvech_values(v: &[Scalar], n: usize) -> Vec<Vec<Scalar>> {
    let mut a = vec![vec![Scalar::new(0.0, 0.0); n]; n];
    for (t, (i, j)) in vech_pairs(n).into_iter().enumerate() {
        a[i][j] = v[t];
        a[j][i] = v[t];
    }
    a
}

/// `1 + ε Z Z⁺` from the holomorphic entries of `Z` (row-major `n × m`).
pub fn one_plus_eps_zzh(z: &[Scalar], n: usize, m: usize, eps: f64) -> Vec<Vec<Scalar>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let s: Scalar = (0..m).map(|l| z[i * m + l] * z[j * m + l].conj()).sum();
                    s * eps + if i == j { 1.0 } else { 0.0 }
                })
                .collect()
        })
        .collect()
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ChartId::*;
        match *self {
            D1 => write!(f, "D1"),
            D1Real => write!(f, "D1-real"),
            X1 => write!(f, "X1"),
            X1Real => write!(f, "X1-real"),
            DJ1 => write!(f, "DJ1"),
            DJ1Eta => write!(f, "DJ1-eta"),
            DJ1Real => write!(f, "DJ1-real"),
            XJ1 => write!(f, "XJ1"),
            XJ1Eta => write!(f, "XJ1-eta"),
            XJ1Real => write!(f, "XJ1-real"),
            XJ1Mn => write!(f, "XJ1-mn"),
            XJ1Ext => write!(f, "XJ1-ext"),
            S2 => write!(f, "S2"),
            CP { n, eps } => write!(f, "CP{n}{}", if eps < 0 { "-dual" } else { "" }),
            Gr { n, m, eps } => write!(f, "Gr{n}x{m}{}", if eps < 0 { "-dual" } else { "" }),
            XJnReal(n) => write!(f, "XJ{n}-real"),
            XJnExt(n) => write!(f, "XJ{n}-ext"),
        }
    }
}

impl FromStr for ChartId {
    type Err = GeoError;
    fn from_str(s: &str) -> Result<Self> {
        use ChartId::*;
        let fixed = [D1, D1Real, X1, X1Real, DJ1, DJ1Eta, DJ1Real, XJ1, XJ1Eta, XJ1Real, XJ1Mn, XJ1Ext, S2];
        if let Some(c) = fixed.iter().find(|c| c.to_string() == s) {
            return Ok(*c);
        }
        let unknown = || GeoError::UnknownId(s.to_string());
        let (body, eps) = match s.strip_suffix("-dual") {
            Some(b) => (b, -1),
            None => (s, 1),
        };
        if let Some(n) = body.strip_prefix("CP") {
            let n: usize = n.parse().map_err(|_| unknown())?;
            if n == 0 {
                return Err(unknown());
            }
            return Ok(CP { n, eps });
        }
        if let Some(nm) = body.strip_prefix("Gr") {
            let (n, m) = nm.split_once('x').ok_or_else(unknown)?;
            let (n, m): (usize, usize) = (n.parse().map_err(|_| unknown())?, m.parse().map_err(|_| unknown())?);
            if n == 0 || m == 0 {
                return Err(unknown());
            }
            return Ok(Gr { n, m, eps });
        }
        if eps > 0 {
            if let Some(rest) = s.strip_prefix("XJ") {
                if let Some(n) = rest.strip_suffix("-real") {
                    return n.parse().map(XJnReal).map_err(|_| unknown());
                }
                if let Some(n) = rest.strip_suffix("-ext") {
                    return n.parse().map(XJnExt).map_err(|_| unknown());
                }
            }
        }
        Err(unknown())
    }
}

impl Serialize for ChartId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Coordinates tagged by their chart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChartPoint {
    pub chart: ChartId,
    pub coords: Vec<Scalar>,
}

impl ChartPoint {
    pub fn new(chart: ChartId, coords: Vec<Scalar>) -> Result<Self> {
        let p = ChartPoint { chart, coords };
        p.chart.check(&p.full())?;
        Ok(p)
    }

    pub fn real(chart: ChartId, coords: &[f64]) -> Result<Self> {
        Self::new(chart, coords.iter().map(|&v| Scalar::new(v, 0.0)).collect())
    }

    /// Wirtinger vector `[z, z̄]` for holomorphic charts, the coordinates otherwise.
    pub fn full(&self) -> Vec<Scalar> {
        if self.chart.is_complex() {
            self.coords.iter().copied().chain(self.coords.iter().map(|z| z.conj())).collect()
        } else {
            self.coords.clone()
        }
    }

    /// Inverse of [`full`](Self::full); the conjugate half is dropped.
    pub fn from_full(chart: ChartId, x: &[Scalar]) -> ChartPoint {
        ChartPoint { chart, coords: x[..chart.dim()].to_vec() }
    }

    /// Parses `name=value` pairs; complex values use `a+bi` syntax.
    pub fn parse(chart: ChartId, spec: &str) -> Result<Self> {
        let names = chart.coord_names();
        let mut coords = vec![None; names.len()];
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| GeoError::Parse(format!("expected name=value, got `{part}`")))?;
            let k = match k.trim() {
                "κ" => "kappa",
                "η" => "eta",
                "α" => "alpha",
                "β" => "beta",
                other => other,
            };
            let idx = names.iter().position(|n| n == k).ok_or_else(|| GeoError::UnknownId(k.to_string()))?;
            let val = Scalar::from_str(v.trim()).map_err(|_| GeoError::Parse(format!("bad number `{v}`")))?;
            if !chart.is_complex() && val.im != 0.0 {
                return Err(GeoError::Parse(format!("{k} must be real on {chart}")));
            }
            coords[idx] = Some(val);
        }
        let coords = coords
            .into_iter()
            .zip(&names)
            .map(|(c, n)| c.ok_or_else(|| GeoError::Parse(format!("missing coordinate {n}"))))
            .collect::<Result<Vec<_>>>()?;
        ChartPoint::new(chart, coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ids_round_trip() {
        let ids = [
            ChartId::D1,
            ChartId::XJ1Ext,
            ChartId::CP { n: 3, eps: -1 },
            ChartId::Gr { n: 2, m: 1, eps: 1 },
            ChartId::XJnExt(2),
        ];
        for id in ids {
            assert_eq!(id.to_string().parse::<ChartId>().unwrap(), id);
        }
        assert!("nowhere".parse::<ChartId>().is_err());
    }

    #[test]
    fn samples_lie_in_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ids = [
            ChartId::D1,
            ChartId::DJ1Real,
            ChartId::XJ1,
            ChartId::XJ1Ext,
            ChartId::CP { n: 3, eps: -1 },
            ChartId::Gr { n: 2, m: 2, eps: -1 },
            ChartId::XJnExt(2),
        ];
        for id in ids {
            for _ in 0..50 {
                let p = id.sample(&mut rng);
                assert_eq!(p.coords.len(), id.dim());
                id.check(&p.full()).unwrap();
            }
        }
    }

    #[test]
    fn parse_point() {
        let p = ChartPoint::parse(ChartId::XJ1Real, "x=1,y=2,p=3,q=4").unwrap();
        assert_eq!(p.coords, vec![Scalar::new(1.0, 0.0), Scalar::new(2.0, 0.0), Scalar::new(4.0, 0.0), Scalar::new(3.0, 0.0)]);
        let w = ChartPoint::parse(ChartId::DJ1, "w=0.1+0.2i,z=1").unwrap();
        assert_eq!(w.full()[2], Scalar::new(0.1, -0.2));
        assert!(ChartPoint::parse(ChartId::X1Real, "x=0,y=-1").unwrap_err().is_domain());
    }
}
