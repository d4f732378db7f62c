//! Composite Gauss–Legendre quadrature and line/surface integrals of forms.

use super::field::eval_at;
use super::forms::{combos, FormField, FormValue};
use super::number::Scalar;
use crate::error::Result;
use gauss_quad::legendre::GaussLegendre;
use std::num::NonZeroUsize;

/// Nodes and weights on `[0, 1]`.
#[derive(Clone, Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn composite(per_segment: usize, segments: usize) -> Rule {
        let gl = GaussLegendre::new(NonZeroUsize::new(per_segment.max(1)).unwrap());
        let segments = segments.max(1);
        let h = 1.0 / segments as f64;
        let mut nodes = Vec::with_capacity(per_segment * segments);
        let mut weights = Vec::with_capacity(per_segment * segments);
        for s in 0..segments {
            let a = s as f64 * h;
            for &(x, w) in gl.as_node_weight_pairs() {
                nodes.push(a + 0.5 * h * (x + 1.0));
                weights.push(0.5 * h * w);
            }
        }
        Rule { nodes, weights }
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> Scalar) -> Scalar {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| f(t) * w).sum()
    }
}

impl Default for Rule {
    fn default() -> Self {
        Rule::composite(64, 1)
    }
}

/// A parametrised curve `t ∈ [0,1]` in chart variables.
pub trait Curve: Sync {
    fn point(&self, t: f64) -> Vec<Scalar>;
    fn velocity(&self, t: f64) -> Vec<Scalar>;
    /// Number of equal smooth pieces; the rule is applied on each.
    fn pieces(&self) -> usize {
        1
    }
}

fn piecewise(rule: &Rule, pieces: usize) -> Vec<(f64, f64)> {
    let h = 1.0 / pieces as f64;
    (0..pieces)
        .flat_map(|p| rule.nodes.iter().zip(&rule.weights).map(move |(&t, &w)| ((p as f64 + t) * h, w * h)))
        .collect()
}

/// A parametrised surface `(s,t) ∈ [0,1]²`.
pub trait Surface: Sync {
    fn point(&self, s: f64, t: f64) -> Vec<Scalar>;
    /// Tangents `(∂_s, ∂_t)`.
    fn tangents(&self, s: f64, t: f64) -> (Vec<Scalar>, Vec<Scalar>);
}

pub fn line_integral<F: FormField>(a: &F, c: &dyn Curve, rule: &Rule) -> Result<Scalar> {
    assert_eq!(a.degree(), 1);
    let mut acc = Scalar::new(0.0, 0.0);
    for (t, w) in piecewise(rule, c.pieces()) {
        let coef = eval_at(a, &c.point(t))?;
        let v = c.velocity(t);
        acc += coef.iter().zip(&v).map(|(x, y)| x * y).sum::<Scalar>() * w;
    }
    Ok(acc)
}

pub fn surface_integral<F: FormField>(a: &F, s: &dyn Surface, rule: &Rule) -> Result<Scalar> {
    assert_eq!(a.degree(), 2);
    let n = a.dim();
    let idx = combos(n, 2);
    let mut acc = Scalar::new(0.0, 0.0);
    for (&u, &wu) in rule.nodes.iter().zip(&rule.weights) {
        for (&t, &wt) in rule.nodes.iter().zip(&rule.weights) {
            let coef = eval_at(a, &s.point(u, t))?;
            let (ts, tt) = s.tangents(u, t);
            let mut val = Scalar::new(0.0, 0.0);
            for (ij, cf) in idx.iter().zip(&coef) {
                val += cf * (ts[ij[0]] * tt[ij[1]] - ts[ij[1]] * tt[ij[0]]);
            }
            acc += val * (wu * wt);
        }
    }
    Ok(acc)
}

/// Integrates a pointwise-evaluated form value (no field structure needed).
pub fn line_integral_values(
    a: impl Fn(&[Scalar]) -> Result<FormValue>,
    c: &dyn Curve,
    rule: &Rule,
) -> Result<Scalar> {
    let mut acc = Scalar::new(0.0, 0.0);
    for (t, w) in piecewise(rule, c.pieces()) {
        let f = a(&c.point(t))?;
        acc += f.apply(&[&c.velocity(t)]) * w;
    }
    Ok(acc)
}

fn embed(base: &[Scalar], i: usize, j: usize, a: f64, b: f64) -> Vec<Scalar> {
    let mut p = base.to_vec();
    p[i] += a;
    p[j] += b;
    p
}

fn tangent(n: usize, i: usize, j: usize, a: f64, b: f64) -> Vec<Scalar> {
    let mut v = vec![Scalar::new(0.0, 0.0); n];
    v[i] = Scalar::new(a, 0.0);
    v[j] = Scalar::new(b, 0.0);
    v
}

/// Counter-clockwise circle of radius `r` in the `(i, j)` coordinate plane
/// through `center`.
#[derive(Clone, Debug)]
pub struct Circle {
    pub center: Vec<Scalar>,
    pub plane: (usize, usize),
    pub r: f64,
}

impl Curve for Circle {
    fn point(&self, t: f64) -> Vec<Scalar> {
        let th = std::f64::consts::TAU * t;
        embed(&self.center, self.plane.0, self.plane.1, self.r * th.cos(), self.r * th.sin())
    }
    fn velocity(&self, t: f64) -> Vec<Scalar> {
        let th = std::f64::consts::TAU * t;
        let s = std::f64::consts::TAU * self.r;
        tangent(self.center.len(), self.plane.0, self.plane.1, -s * th.sin(), s * th.cos())
    }
}

/// The disk bounded by a [`Circle`], oriented so that Stokes holds.
#[derive(Clone, Debug)]
pub struct Disk(pub Circle);

impl Surface for Disk {
    fn point(&self, s: f64, t: f64) -> Vec<Scalar> {
        Circle { r: self.0.r * s, ..self.0.clone() }.point(t)
    }
    fn tangents(&self, s: f64, t: f64) -> (Vec<Scalar>, Vec<Scalar>) {
        let c = &self.0;
        let th = std::f64::consts::TAU * t;
        let n = c.center.len();
        let ds = tangent(n, c.plane.0, c.plane.1, c.r * th.cos(), c.r * th.sin());
        let dt = Circle { r: c.r * s, ..c.clone() }.velocity(t);
        (ds, dt)
    }
}

/// Counter-clockwise boundary of the rectangle `[a0,a1]×[b0,b1]` in the
/// `(i, j)` plane, with the other coordinates taken from `base`. The
/// offsets are absolute values of coordinates `i` and `j`.
#[derive(Clone, Debug)]
pub struct RectLoop {
    pub base: Vec<Scalar>,
    pub plane: (usize, usize),
    pub a: (f64, f64),
    pub b: (f64, f64),
}

impl RectLoop {
    fn corner(&self) -> Vec<Scalar> {
        let mut p = self.base.clone();
        p[self.plane.0] = Scalar::new(0.0, 0.0);
        p[self.plane.1] = Scalar::new(0.0, 0.0);
        p
    }
    fn side(&self, t: f64) -> (f64, f64, f64, f64) {
        let (a0, a1) = self.a;
        let (b0, b1) = self.b;
        let u = 4.0 * t;
        let k = (u.floor() as usize).min(3);
        let s = u - k as f64;
        match k {
            0 => (a0 + s * (a1 - a0), b0, 4.0 * (a1 - a0), 0.0),
            1 => (a1, b0 + s * (b1 - b0), 0.0, 4.0 * (b1 - b0)),
            2 => (a1 - s * (a1 - a0), b1, -4.0 * (a1 - a0), 0.0),
            _ => (a0, b1 - s * (b1 - b0), 0.0, -4.0 * (b1 - b0)),
        }
    }
}

impl Curve for RectLoop {
    fn pieces(&self) -> usize {
        4
    }
    fn point(&self, t: f64) -> Vec<Scalar> {
        let (a, b, _, _) = self.side(t);
        embed(&self.corner(), self.plane.0, self.plane.1, a, b)
    }
    fn velocity(&self, t: f64) -> Vec<Scalar> {
        let (_, _, da, db) = self.side(t);
        tangent(self.base.len(), self.plane.0, self.plane.1, da, db)
    }
}

/// The filled rectangle bounded by a [`RectLoop`].
#[derive(Clone, Debug)]
pub struct RectPatch(pub RectLoop);

impl Surface for RectPatch {
    fn point(&self, s: f64, t: f64) -> Vec<Scalar> {
        let r = &self.0;
        let a = r.a.0 + s * (r.a.1 - r.a.0);
        let b = r.b.0 + t * (r.b.1 - r.b.0);
        embed(&r.corner(), r.plane.0, r.plane.1, a, b)
    }
    fn tangents(&self, _s: f64, _t: f64) -> (Vec<Scalar>, Vec<Scalar>) {
        let r = &self.0;
        let n = r.base.len();
        (
            tangent(n, r.plane.0, r.plane.1, r.a.1 - r.a.0, 0.0),
            tangent(n, r.plane.0, r.plane.1, 0.0, r.b.1 - r.b.0),
        )
    }
}

/// A curve given by closures for position and velocity.
pub struct FnCurve<P, V> {
    pub pos: P,
    pub vel: V,
}

impl<P, V> Curve for FnCurve<P, V>
where
    P: Fn(f64) -> Vec<Scalar> + Sync,
    V: Fn(f64) -> Vec<Scalar> + Sync,
{
    fn point(&self, t: f64) -> Vec<Scalar> {
        (self.pos)(t)
    }
    fn velocity(&self, t: f64) -> Vec<Scalar> {
        (self.vel)(t)
    }
}

/// A surface given by closures for position and the two tangents.
pub struct FnSurface<P, T> {
    pub pos: P,
    pub tan: T,
}

impl<P, T> Surface for FnSurface<P, T>
where
    P: Fn(f64, f64) -> Vec<Scalar> + Sync,
    T: Fn(f64, f64) -> (Vec<Scalar>, Vec<Scalar>) + Sync,
{
    fn point(&self, s: f64, t: f64) -> Vec<Scalar> {
        (self.pos)(s, t)
    }
    fn tangents(&self, s: f64, t: f64) -> (Vec<Scalar>, Vec<Scalar>) {
        (self.tan)(s, t)
    }
}
