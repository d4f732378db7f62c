//! Fields evaluated generically over forward numbers.

use super::number::{lift, seed_dual, seed_jet, Dual, Jet, Number, Scalar};
use crate::error::{GeoError, Result};
use crate::with_dim;
use serde::Serialize;

/// A vector-valued function of `dim()` variables, written once and evaluated
/// over any [`Number`]. `eval` is only ever called with `N == dim()`.
pub trait Field: Sync {
    fn dim(&self) -> usize;
    fn len(&self) -> usize;
    fn check(&self, _x: &[Scalar]) -> Result<()> {
        Ok(())
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T>;
}

impl<F: Field> Field for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn len(&self) -> usize {
        (**self).len()
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        (**self).check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        (**self).eval(x)
    }
}

/// Value, gradient and Hessian of one scalar component.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Jet2 {
    pub value: Scalar,
    pub grad: Vec<Scalar>,
    pub hess: Vec<Vec<Scalar>>,
}

fn guard<F: Field>(f: &F, x: &[Scalar]) -> Result<()> {
    if x.len() != f.dim() {
        return Err(GeoError::Parse(format!("expected {} coordinates, got {}", f.dim(), x.len())));
    }
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(GeoError::domain("point", "non-finite coordinate"));
    }
    f.check(x)
}

fn finite(v: &[Scalar]) -> Result<()> {
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(GeoError::domain("field", "non-finite value"))
    }
}

pub fn eval_at<F: Field>(f: &F, x: &[Scalar]) -> Result<Vec<Scalar>> {
    guard(f, x)?;
    let out = with_dim!(f.dim(), N => f.eval::<Scalar, N>(&lift(x)), return Err(GeoError::UnsupportedN(f.dim())));
    finite(&out)?;
    Ok(out)
}

/// Values and first derivatives, `d[component][variable]`.
pub fn jacobian_at<F: Field>(f: &F, x: &[Scalar]) -> Result<(Vec<Scalar>, Vec<Vec<Scalar>>)> {
    guard(f, x)?;
    fn go<F: Field, const N: usize>(f: &F, x: &[Scalar]) -> (Vec<Scalar>, Vec<Vec<Scalar>>) {
        let xs: [Scalar; N] = lift(x);
        let out: Vec<Dual<Scalar, N>> = f.eval(&seed_dual(&xs));
        (out.iter().map(|d| d.v).collect(), out.iter().map(|d| d.d.to_vec()).collect())
    }
    let r = with_dim!(f.dim(), N => go::<F, N>(f, x), return Err(GeoError::UnsupportedN(f.dim())));
    finite(&r.0)?;
    r.1.iter().try_for_each(|v| finite(v))?;
    Ok(r)
}

/// Second-order jets of every component.
pub fn jet_eval<F: Field>(f: &F, x: &[Scalar]) -> Result<Vec<Jet2>> {
    guard(f, x)?;
    fn go<F: Field, const N: usize>(f: &F, x: &[Scalar]) -> Vec<Jet2> {
        let xs: [Scalar; N] = lift(x);
        let out: Vec<Jet<Scalar, N>> = f.eval(&seed_jet(&xs));
        out.iter()
            .map(|j| Jet2 {
                value: j.v,
                grad: j.g.to_vec(),
                hess: j.h.iter().map(|r| r.to_vec()).collect(),
            })
            .collect()
    }
    let r = with_dim!(f.dim(), N => go::<F, N>(f, x), return Err(GeoError::UnsupportedN(f.dim())));
    for j in &r {
        finite(&[j.value])?;
        finite(&j.grad)?;
        j.hess.iter().try_for_each(|v| finite(v))?;
    }
    Ok(r)
}

/// Central finite-difference Jacobian, the independent oracle for
/// [`jacobian_at`]. Each variable is perturbed along the real axis; fields
/// written in Wirtinger variables are holomorphic in each of them, so the
/// same stencil applies.
pub fn fd_jacobian<F: Field>(f: &F, x: &[Scalar], h: f64) -> Result<Vec<Vec<Scalar>>> {
    let m = f.len();
    let mut d = vec![vec![Scalar::new(0.0, 0.0); x.len()]; m];
    for j in 0..x.len() {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let fp = eval_at(f, &xp)?;
        let fm = eval_at(f, &xm)?;
        for i in 0..m {
            d[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(d)
}

/// Central finite-difference Hessians `h[component][i][j]` from
/// differences of the jet-free gradient stencil.
pub fn fd_hessian<F: Field>(f: &F, x: &[Scalar], h: f64) -> Result<Vec<Vec<Vec<Scalar>>>> {
    let n = x.len();
    let m = f.len();
    let mut out = vec![vec![vec![Scalar::new(0.0, 0.0); n]; n]; m];
    let f0 = eval_at(f, x)?;
    for i in 0..n {
        for j in i..n {
            let at = |si: f64, sj: f64| {
                let mut y = x.to_vec();
                y[i] += si * h;
                y[j] += sj * h;
                eval_at(f, &y)
            };
            if i == j {
                let p = at(1.0, 0.0)?;
                let q = at(-1.0, 0.0)?;
                for c in 0..m {
                    out[c][i][i] = (p[c] - f0[c] * 2.0 + q[c]) / (h * h);
                }
            } else {
                let pp = at(1.0, 1.0)?;
                let pm = at(1.0, -1.0)?;
                let mp = at(-1.0, 1.0)?;
                let mm = at(-1.0, -1.0)?;
                for c in 0..m {
                    let v = (pp[c] - pm[c] - mp[c] + mm[c]) / (4.0 * h * h);
                    out[c][i][j] = v;
                    out[c][j][i] = v;
                }
            }
        }
    }
    Ok(out)
}

/// Gradient of a scalar field as a field with `dim` components.
pub struct Gradient<F>(pub F);

impl<F: Field> Field for Gradient<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn len(&self) -> usize {
        self.0.dim() * self.0.len()
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.0.check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        let v = self.0.eval(&seed_dual(x));
        v.iter().flat_map(|d| d.d.to_vec()).collect()
    }
}
