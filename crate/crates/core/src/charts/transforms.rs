//! Forward and inverse maps between charts, written on full coordinate
//! vectors so that non-holomorphic changes of fibre variable differentiate
//! like any other map.

use super::{ChartId, ChartPoint};
use crate::calculus::{jacobian_at, Field, Number, Scalar, I};
use crate::error::{GeoError, Result};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Element `(M, (p, q), κ)` of the real Jacobi group, `M = [[a, b], [c, d]]`
/// with unit determinant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GroupElem {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub p: f64,
    pub q: f64,
    pub kappa: f64,
}

impl GroupElem {
    /// Builds an element from `(a, b, c)` and solves for `d`; `a` must not vanish.
    pub fn new(a: f64, b: f64, c: f64, p: f64, q: f64, kappa: f64) -> Result<Self> {
        if a.abs() < 1e-12 {
            return Err(GeoError::Parse("group element needs a != 0".into()));
        }
        Ok(GroupElem { a, b, c, d: (1.0 + b * c) / a, p, q, kappa })
    }

    /// `(λ, μ) = (p, q) M`.
    pub fn lambda_mu(&self) -> (f64, f64) {
        (self.p * self.a + self.q * self.c, self.p * self.b + self.q * self.d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Transform {
    /// `X1 → D1`, `w = (v − i)/(v + i)`.
    Cayley,
    BridgeX1,
    BridgeD1,
    /// `X1-real → D1-real`: `α = (x² + y² − 1)/N`, `β = −2x/N`.
    Alfab,
    /// Partial Cayley transform `XJ1 → DJ1`.
    Phi,
    /// Second partial Cayley transform `XJ1-eta → DJ1`.
    Phi1,
    /// Fibre change `DJ1-eta → DJ1`, `z = η − w η̄`.
    Fc,
    /// Fibre change `XJ1-eta → XJ1`, `2iu = (v + i)η − (v − i)η̄`.
    Fc1,
    /// `XJ1-real → XJ1-eta`.
    BridgeEta,
    /// `XJ1-real → XJ1`, `u = pv + q`.
    BridgeU,
    /// `XJ1-mn → XJ1`, `u = m + in`.
    BridgeMn,
    /// `XJ1-real → XJ1-mn`, `m = px + q`, `n = py`.
    Mn,
    /// `DJ1-real → DJ1-eta`.
    BridgeDJ1,
    /// Jacobi-group action on `(v, u)`.
    Ac1(GroupElem),
    /// The same action on `(x, y, q, p)`.
    Ac11(GroupElem),
    /// Action on the extended half-plane.
    Ac2(GroupElem),
}

impl Transform {
    pub fn source(&self) -> ChartId {
        use ChartId as C;
        use Transform::*;
        match self {
            Cayley => C::X1,
            BridgeX1 | Alfab => C::X1Real,
            BridgeD1 => C::D1Real,
            Phi | Ac1(_) => C::XJ1,
            Phi1 | Fc1 => C::XJ1Eta,
            Fc => C::DJ1Eta,
            BridgeEta | BridgeU | Mn | Ac11(_) => C::XJ1Real,
            BridgeMn => C::XJ1Mn,
            BridgeDJ1 => C::DJ1Real,
            Ac2(_) => C::XJ1Ext,
        }
    }

    pub fn target(&self) -> ChartId {
        use ChartId as C;
        use Transform::*;
        match self {
            Cayley | BridgeD1 => C::D1,
            BridgeX1 => C::X1,
            Alfab => C::D1Real,
            Phi | Phi1 | Fc => C::DJ1,
            Fc1 | BridgeU | BridgeMn | Ac1(_) => C::XJ1,
            BridgeEta => C::XJ1Eta,
            Mn => C::XJ1Mn,
            BridgeDJ1 => C::DJ1Eta,
            Ac11(_) => C::XJ1Real,
            Ac2(_) => C::XJ1Ext,
        }
    }

    pub fn all_parameter_free() -> Vec<Transform> {
        use Transform::*;
        vec![Cayley, BridgeX1, BridgeD1, Alfab, Phi, Phi1, Fc, Fc1, BridgeEta, BridgeU, BridgeMn, Mn, BridgeDJ1]
    }

    /// Maps a full source vector to a full target vector.
    pub fn forward<T: Number>(&self, x: &[T]) -> Vec<T> {
        use Transform::*;
        let i = |s: f64| T::cst(I * s);
        match *self {
            Cayley => {
                let (v, vb) = (x[0], x[1]);
                vec![(v - i(1.0)) / (v + i(1.0)), (vb + i(1.0)) / (vb - i(1.0))]
            }
            BridgeX1 | BridgeD1 => vec![x[0] + x[1] * I, x[0] - x[1] * I],
            Alfab => {
                let (xx, y) = (x[0], x[1]);
                let n = xx * xx + (y + 1.0) * (y + 1.0);
                vec![(xx * xx + y * y - 1.0) / n, -(xx * 2.0) / n]
            }
            Phi => {
                let (v, u, vb, ub) = (x[0], x[1], x[2], x[3]);
                vec![
                    (v - i(1.0)) / (v + i(1.0)),
                    u * i(2.0) / (v + i(1.0)),
                    (vb + i(1.0)) / (vb - i(1.0)),
                    ub * i(-2.0) / (vb - i(1.0)),
                ]
            }
            Phi1 => {
                let (v, e, vb, eb) = (x[0], x[1], x[2], x[3]);
                let w = (v - i(1.0)) / (v + i(1.0));
                let wb = (vb + i(1.0)) / (vb - i(1.0));
                vec![w, e - eb * w, wb, eb - e * wb]
            }
            Fc => {
                let (w, e, wb, eb) = (x[0], x[1], x[2], x[3]);
                vec![w, e - w * eb, wb, eb - wb * e]
            }
            Fc1 => {
                let (v, e, vb, eb) = (x[0], x[1], x[2], x[3]);
                let u = ((v + i(1.0)) * e - (v - i(1.0)) * eb) / i(2.0);
                let ub = ((vb - i(1.0)) * eb - (vb + i(1.0)) * e) / i(-2.0);
                vec![v, u, vb, ub]
            }
            BridgeEta | BridgeDJ1 => {
                let (a, b, q, p) = (x[0], x[1], x[2], x[3]);
                vec![a + b * I, q + p * I, a - b * I, q - p * I]
            }
            BridgeU => {
                let (xx, y, q, p) = (x[0], x[1], x[2], x[3]);
                let v = xx + y * I;
                let vb = xx - y * I;
                vec![v, p * v + q, vb, p * vb + q]
            }
            BridgeMn => {
                let (xx, y, m, n) = (x[0], x[1], x[2], x[3]);
                vec![xx + y * I, m + n * I, xx - y * I, m - n * I]
            }
            Mn => {
                let (xx, y, q, p) = (x[0], x[1], x[2], x[3]);
                vec![xx, y, p * xx + q, p * y]
            }
            Ac1(g) => {
                let (lam, mu) = g.lambda_mu();
                let (v, u, vb, ub) = (x[0], x[1], x[2], x[3]);
                let den = v * g.c + g.d;
                let denb = vb * g.c + g.d;
                vec![
                    (v * g.a + g.b) / den,
                    (u + v * lam + mu) / den,
                    (vb * g.a + g.b) / denb,
                    (ub + vb * lam + mu) / denb,
                ]
            }
            Ac11(g) => ac11(&g, x),
            Ac2(g) => {
                let mut out = ac11(&g, &x[..4]);
                let (lam, mu) = g.lambda_mu();
                out.push(x[4] + g.kappa + x[2] * lam - x[3] * mu);
                out
            }
        }
    }

    /// Maps a full target vector back to the source chart.
    pub fn inverse<T: Number>(&self, x: &[T]) -> Vec<T> {
        use Transform::*;
        let i = |s: f64| T::cst(I * s);
        let cayley_inv = |w: T, wb: T| ((w + 1.0) * i(1.0) / (-w + 1.0), (wb + 1.0) * i(-1.0) / (-wb + 1.0));
        match *self {
            Cayley => {
                let (v, vb) = cayley_inv(x[0], x[1]);
                vec![v, vb]
            }
            BridgeX1 | BridgeD1 => vec![(x[0] + x[1]) * 0.5, (x[0] - x[1]) * Scalar::new(0.0, -0.5)],
            Alfab => {
                let w = x[0] + x[1] * I;
                let wb = x[0] - x[1] * I;
                let (v, vb) = cayley_inv(w, wb);
                vec![(v + vb) * 0.5, (v - vb) * Scalar::new(0.0, -0.5)]
            }
            Phi => {
                let (w, z, wb, zb) = (x[0], x[1], x[2], x[3]);
                let (v, vb) = cayley_inv(w, wb);
                vec![v, z / (-w + 1.0), vb, zb / (-wb + 1.0)]
            }
            Phi1 => {
                let (w, z, wb, zb) = (x[0], x[1], x[2], x[3]);
                let (v, vb) = cayley_inv(w, wb);
                let p = -(w * wb) + 1.0;
                vec![v, (z + zb * w) / p, vb, (zb + z * wb) / p]
            }
            Fc => {
                let (w, z, wb, zb) = (x[0], x[1], x[2], x[3]);
                let p = -(w * wb) + 1.0;
                vec![w, (z + zb * w) / p, wb, (zb + z * wb) / p]
            }
            Fc1 => {
                let (v, u, vb, ub) = (x[0], x[1], x[2], x[3]);
                let r = (u - ub) / (v - vb);
                vec![v, (u * vb - ub * v) / (vb - v) + r * I, vb, (ub * v - u * vb) / (v - vb) - r * I]
            }
            BridgeEta | BridgeDJ1 => {
                let h = Scalar::new(0.0, -0.5);
                vec![(x[0] + x[2]) * 0.5, (x[0] - x[2]) * h, (x[1] + x[3]) * 0.5, (x[1] - x[3]) * h]
            }
            BridgeU => {
                let (v, u, vb, ub) = (x[0], x[1], x[2], x[3]);
                let p = (u - ub) / (v - vb);
                vec![(v + vb) * 0.5, (v - vb) * Scalar::new(0.0, -0.5), u - p * v, p]
            }
            BridgeMn => {
                let h = Scalar::new(0.0, -0.5);
                vec![(x[0] + x[2]) * 0.5, (x[0] - x[2]) * h, (x[1] + x[3]) * 0.5, (x[1] - x[3]) * h]
            }
            Mn => {
                let (xx, y, m, n) = (x[0], x[1], x[2], x[3]);
                let p = n / y;
                vec![xx, y, m - p * xx, p]
            }
            Ac1(g) => {
                let (lam, mu) = g.lambda_mu();
                let (v1, u1, vb1, ub1) = (x[0], x[1], x[2], x[3]);
                let v = (v1 * g.d - g.b) / (-(v1 * g.c) + g.a);
                let vb = (vb1 * g.d - g.b) / (-(vb1 * g.c) + g.a);
                vec![v, u1 * (v * g.c + g.d) - v * lam - mu, vb, ub1 * (vb * g.c + g.d) - vb * lam - mu]
            }
            Ac11(g) => ac11_inv(&g, x),
            Ac2(g) => {
                let mut out = ac11_inv(&g, &x[..4]);
                let (lam, mu) = g.lambda_mu();
                let k = x[4] - g.kappa - out[2] * lam + out[3] * mu;
                out.push(k);
                out
            }
        }
    }
}

fn mobius_real<T: Number>(a: f64, b: f64, c: f64, d: f64, x: T, y: T) -> (T, T) {
    let den = (x * c + d) * (x * c + d) + y * y * (c * c);
    (((x * a + b) * (x * c + d) + y * y * (a * c)) / den, y / den)
}

fn ac11<T: Number>(g: &GroupElem, x: &[T]) -> Vec<T> {
    let (xx, y, q, p) = (x[0], x[1], x[2], x[3]);
    let (x1, y1) = mobius_real(g.a, g.b, g.c, g.d, xx, y);
    vec![x1, y1, q * g.a - p * g.b + g.q, p * g.d - q * g.c + g.p]
}

fn ac11_inv<T: Number>(g: &GroupElem, x: &[T]) -> Vec<T> {
    let (x1, y1, q1, p1) = (x[0], x[1], x[2] - g.q, x[3] - g.p);
    let (xx, y) = mobius_real(g.d, -g.b, -g.c, g.a, x1, y1);
    vec![xx, y, q1 * g.d + p1 * g.b, p1 * g.a + q1 * g.c]
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Transform::*;
        let s = match self {
            Cayley => "cayley",
            BridgeX1 => "bridge-X1",
            BridgeD1 => "bridge-D1",
            Alfab => "alfab",
            Phi => "Phi",
            Phi1 => "Phi1",
            Fc => "FC",
            Fc1 => "FC1",
            BridgeEta => "bridge-eta",
            BridgeU => "bridge-u",
            BridgeMn => "bridge-mn",
            Mn => "mn",
            BridgeDJ1 => "bridge-DJ1",
            Ac1(_) => "AC1",
            Ac11(_) => "AC11",
            Ac2(_) => "AC2",
        };
        f.write_str(s)
    }
}

impl FromStr for Transform {
    type Err = GeoError;
    fn from_str(s: &str) -> Result<Self> {
        Transform::all_parameter_free()
            .into_iter()
            .find(|t| t.to_string() == s)
            .ok_or_else(|| GeoError::UnknownId(s.to_string()))
    }
}

/// A transform, or its inverse, as a field on the full source vector.
#[derive(Clone, Copy, Debug)]
pub struct TransformMap {
    pub t: Transform,
    pub inverse: bool,
}

impl TransformMap {
    pub fn forward(t: Transform) -> Self {
        TransformMap { t, inverse: false }
    }
    pub fn backward(t: Transform) -> Self {
        TransformMap { t, inverse: true }
    }
    pub fn source(&self) -> ChartId {
        if self.inverse {
            self.t.target()
        } else {
            self.t.source()
        }
    }
    pub fn target(&self) -> ChartId {
        if self.inverse {
            self.t.source()
        } else {
            self.t.target()
        }
    }
}

impl Field for TransformMap {
    fn dim(&self) -> usize {
        self.source().nvars()
    }
    fn len(&self) -> usize {
        self.target().nvars()
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.source().check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        if self.inverse {
            self.t.inverse(x)
        } else {
            self.t.forward(x)
        }
    }
}

/// A chain of maps applied left to right, from the source chart of the
/// first to the target chart of the last. The empty route is the identity
/// on `chart`.
#[derive(Clone, Debug)]
pub struct Route {
    pub chart: ChartId,
    pub maps: Vec<TransformMap>,
}

impl Route {
    pub fn identity(chart: ChartId) -> Self {
        Route { chart, maps: Vec::new() }
    }

    pub fn new(maps: Vec<TransformMap>) -> Result<Self> {
        let first = maps.first().ok_or_else(|| GeoError::Parse("empty route".into()))?;
        for w in maps.windows(2) {
            if w[0].target() != w[1].source() {
                return Err(GeoError::Parse(format!("{} lands in {}, {} starts from {}", w[0].t, w[0].target(), w[1].t, w[1].source())));
            }
        }
        Ok(Route { chart: first.source(), maps })
    }

    pub fn source(&self) -> ChartId {
        self.chart
    }

    pub fn target(&self) -> ChartId {
        self.maps.last().map_or(self.chart, |m| m.target())
    }

    pub fn apply_full(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        let y = crate::calculus::eval_at(self, x)?;
        self.target().check(&y).map_err(|e| match e {
            GeoError::Domain { chart, reason } => GeoError::ImageDomain { chart, reason },
            other => other,
        })?;
        Ok(y)
    }

    /// `J[i][a] = ∂y^i/∂x^a` of the whole chain.
    pub fn jacobian(&self, x: &[Scalar]) -> Result<Vec<Vec<Scalar>>> {
        if self.maps.is_empty() {
            let n = x.len();
            return Ok((0..n).map(|i| (0..n).map(|a| Scalar::new(if i == a { 1.0 } else { 0.0 }, 0.0)).collect()).collect());
        }
        Ok(jacobian_at(self, x)?.1)
    }
}

impl Field for Route {
    fn dim(&self) -> usize {
        self.source().nvars()
    }
    fn len(&self) -> usize {
        self.target().nvars()
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.source().check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        let mut y = x.to_vec();
        for m in &self.maps {
            y = if m.inverse { m.t.inverse(&y) } else { m.t.forward(&y) };
        }
        y
    }
}

/// Applies a transform to a point, reporting an image outside the target
/// domain separately from a bad input.
pub fn apply(m: TransformMap, p: &ChartPoint) -> Result<ChartPoint> {
    if p.chart != m.source() {
        return Err(GeoError::Parse(format!("{} maps from {}, not {}", m.t, m.source(), p.chart)));
    }
    let x = p.full();
    m.source().check(&x)?;
    let y = crate::calculus::eval_at(&m, &x)?;
    m.target().check(&y).map_err(|e| match e {
        GeoError::Domain { chart, reason } => GeoError::ImageDomain { chart, reason },
        other => other,
    })?;
    Ok(ChartPoint::from_full(m.target(), &y))
}

/// Full Jacobian `J[i][a] = ∂y^i/∂x^a` on full coordinate vectors.
pub fn transform_jacobian(m: TransformMap, x: &[Scalar]) -> Result<Vec<Vec<Scalar>>> {
    Ok(jacobian_at(&m, x)?.1)
}

/// Jacobian at a chart point. Between holomorphic charts this is the
/// holomorphic block `∂w^i/∂v^a`; otherwise the full real Jacobian.
pub fn jacobian(m: TransformMap, p: &ChartPoint) -> Result<Vec<Vec<Scalar>>> {
    let j = transform_jacobian(m, &p.full())?;
    if m.source().is_complex() && m.target().is_complex() {
        let (n, k) = (m.target().dim(), m.source().dim());
        Ok(j[..n].iter().map(|r| r[..k].to_vec()).collect())
    } else {
        Ok(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::linalg;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(re: f64, im: f64) -> Scalar {
        Scalar::new(re, im)
    }

    #[test]
    fn phi_base_point() {
        let p = ChartPoint::new(ChartId::XJ1, vec![s(0.0, 1.0), s(1.0, 0.0)]).unwrap();
        let q = apply(TransformMap::forward(Transform::Phi), &p).unwrap();
        assert!((q.coords[0]).norm() < 1e-15);
        assert!((q.coords[1] - s(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn real_bridge_example() {
        let p = ChartPoint::real(ChartId::XJ1Real, &[1.0, 2.0, 4.0, 3.0]).unwrap();
        let u = apply(TransformMap::forward(Transform::BridgeU), &p).unwrap();
        assert!((u.coords[0] - s(1.0, 2.0)).norm() < 1e-15);
        assert!((u.coords[1] - s(7.0, 6.0)).norm() < 1e-14);
        let e = apply(TransformMap::forward(Transform::BridgeEta), &p).unwrap();
        assert!((e.coords[1] - s(4.0, 3.0)).norm() < 1e-15);
    }

    #[test]
    fn round_trips_and_jacobian_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = GroupElem::new(1.3, -0.4, 0.7, 0.5, -1.1, 0.3).unwrap();
        let mut all = Transform::all_parameter_free();
        all.extend([Transform::Ac1(g), Transform::Ac11(g), Transform::Ac2(g)]);
        for t in all {
            for _ in 0..40 {
                let p = t.source().sample(&mut rng);
                let f = TransformMap::forward(t);
                let b = TransformMap::backward(t);
                let q = apply(f, &p).unwrap();
                let back = apply(b, &q).unwrap();
                for (a, c) in p.coords.iter().zip(&back.coords) {
                    assert!((a - c).norm() < 1e-10 * (1.0 + a.norm()), "{t}: {a} vs {c}");
                }
                let ja = transform_jacobian(f, &p.full()).unwrap();
                let jb = transform_jacobian(b, &q.full()).unwrap();
                assert!(linalg::max_abs_dev_from_identity(&linalg::matmul(&jb, &ja)) < 1e-8, "{t}");
            }
        }
    }
}
