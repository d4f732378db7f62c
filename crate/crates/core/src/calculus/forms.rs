//! Dense differential forms on coordinate charts.
//!
//! A degree-k form on n variables stores one coefficient per strictly
//! increasing index tuple, in lexicographic order; `α = Σ_{I} α_I dx^I`.

use super::field::{eval_at, Field};
use super::number::{seed_dual, Number, Scalar};
use crate::error::{GeoError, Result};
use serde::Serialize;

/// Strictly increasing k-tuples of `0..n` in lexicographic order.
pub fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

pub fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Lexicographic rank of a strictly increasing tuple.
pub fn rank(n: usize, idx: &[usize]) -> usize {
    let k = idx.len();
    let mut r = 0;
    let mut prev = 0;
    for (pos, &i) in idx.iter().enumerate() {
        for skipped in prev..i {
            r += binom(n - skipped - 1, k - pos - 1);
        }
        prev = i + 1;
    }
    r
}

/// Sorts an index tuple, returning the permutation sign, or `None` on repeats.
pub fn sort_sign(idx: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut v = idx.to_vec();
    let mut sign = 1.0;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// Wedge product of coefficient arrays.
pub fn wedge_coeffs<T: Number>(n: usize, ka: usize, a: &[T], kb: usize, b: &[T]) -> Vec<T> {
    let ca = combos(n, ka);
    let cb = combos(n, kb);
    let mut out = vec![T::zero(); binom(n, ka + kb)];
    for (i, ia) in ca.iter().enumerate() {
        for (j, ib) in cb.iter().enumerate() {
            let mut idx = ia.clone();
            idx.extend_from_slice(ib);
            if let Some((s, sign)) = sort_sign(&idx) {
                out[rank(n, &s)] += a[i] * b[j] * sign;
            }
        }
    }
    out
}

/// `dα` from first derivatives of the coefficients, `d[I][var]`.
pub fn exterior_from_grad<T: Number>(n: usize, k: usize, d: &[Vec<T>]) -> Vec<T> {
    combos(n, k + 1)
        .iter()
        .map(|big| {
            let mut acc = T::zero();
            for j in 0..big.len() {
                let mut small = big.clone();
                let var = small.remove(j);
                let term = d[rank(n, &small)][var];
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormValue {
    pub dim: usize,
    pub degree: usize,
    pub c: Vec<Scalar>,
}

impl FormValue {
    pub fn zero(dim: usize, degree: usize) -> Self {
        FormValue { dim, degree, c: vec![Scalar::new(0.0, 0.0); binom(dim, degree)] }
    }

    pub fn from_coeffs(dim: usize, degree: usize, c: Vec<Scalar>) -> Self {
        assert_eq!(c.len(), binom(dim, degree));
        FormValue { dim, degree, c }
    }

    /// `dx^{i0}∧…∧dx^{ik}` for any index order.
    pub fn basis(dim: usize, idx: &[usize]) -> Self {
        let mut f = Self::zero(dim, idx.len());
        if let Some((s, sign)) = sort_sign(idx) {
            f.c[rank(dim, &s)] = Scalar::new(sign, 0.0);
        }
        f
    }

    pub fn one_form(c: Vec<Scalar>) -> Self {
        let n = c.len();
        FormValue { dim: n, degree: 1, c }
    }

    /// Two-form `Σ_{i<j} m[i][j] dx^i∧dx^j` read from the upper triangle.
    pub fn from_upper(m: &[Vec<Scalar>]) -> Self {
        let n = m.len();
        let c = combos(n, 2).iter().map(|ij| m[ij[0]][ij[1]]).collect();
        FormValue { dim: n, degree: 2, c }
    }

    /// Antisymmetric matrix `M` with `ω(u, v) = uᵀ M v` for a two-form.
    pub fn to_matrix(&self) -> Vec<Vec<Scalar>> {
        assert_eq!(self.degree, 2);
        let n = self.dim;
        let mut m = vec![vec![Scalar::new(0.0, 0.0); n]; n];
        for (ij, v) in combos(n, 2).iter().zip(&self.c) {
            m[ij[0]][ij[1]] = *v;
            m[ij[1]][ij[0]] = -*v;
        }
        m
    }

    /// Coefficient of `dx^{idx}` for an arbitrary index order.
    pub fn get(&self, idx: &[usize]) -> Scalar {
        match sort_sign(idx) {
            Some((s, sign)) => self.c[rank(self.dim, &s)] * sign,
            None => Scalar::new(0.0, 0.0),
        }
    }

    pub fn wedge(&self, o: &FormValue) -> Result<FormValue> {
        if self.degree + o.degree > self.dim {
            return Err(GeoError::Degree(self.degree + o.degree, self.dim));
        }
        Ok(FormValue {
            dim: self.dim,
            degree: self.degree + o.degree,
            c: wedge_coeffs(self.dim, self.degree, &self.c, o.degree, &o.c),
        })
    }

    pub fn add(&self, o: &FormValue) -> FormValue {
        assert_eq!((self.dim, self.degree), (o.dim, o.degree));
        FormValue {
            dim: self.dim,
            degree: self.degree,
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &FormValue) -> FormValue {
        self.add(&o.scale(Scalar::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Scalar) -> FormValue {
        FormValue { dim: self.dim, degree: self.degree, c: self.c.iter().map(|a| a * s).collect() }
    }

    /// Evaluates the form on `degree` tangent vectors (determinant pairing).
    pub fn apply(&self, vs: &[&[Scalar]]) -> Scalar {
        assert_eq!(vs.len(), self.degree);
        let mut acc = Scalar::new(0.0, 0.0);
        for (idx, coef) in combos(self.dim, self.degree).iter().zip(&self.c) {
            if coef.norm() == 0.0 {
                continue;
            }
            let m: Vec<Vec<Scalar>> =
                idx.iter().map(|&i| vs.iter().map(|v| v[i]).collect()).collect();
            acc += coef * det_small(&m);
        }
        acc
    }

    /// Pulls back through a linear map `J` with `J[i][a] = ∂x^i/∂y^a`.
    pub fn pullback(&self, j: &[Vec<Scalar>]) -> FormValue {
        let m = j[0].len();
        let cols: Vec<Vec<Scalar>> = (0..m).map(|a| j.iter().map(|r| r[a]).collect()).collect();
        let c = combos(m, self.degree)
            .iter()
            .map(|idx| {
                let vs: Vec<&[Scalar]> = idx.iter().map(|&a| cols[a].as_slice()).collect();
                self.apply(&vs)
            })
            .collect();
        FormValue { dim: m, degree: self.degree, c }
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, o: &FormValue) -> f64 {
        self.sub(o).max_abs()
    }

    pub fn max_imag(&self) -> f64 {
        self.c.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

fn det_small(m: &[Vec<Scalar>]) -> Scalar {
    match m.len() {
        0 => Scalar::new(1.0, 0.0),
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => super::linalg::det(&m.to_vec()),
    }
}

/// A field of k-form coefficients in the order of [`combos`].
pub trait FormField: Field {
    fn degree(&self) -> usize;
}

impl<F: FormField> FormField for &F {
    fn degree(&self) -> usize {
        (**self).degree()
    }
}

pub fn form_at<F: FormField>(f: &F, x: &[Scalar]) -> Result<FormValue> {
    Ok(FormValue { dim: f.dim(), degree: f.degree(), c: eval_at(f, x)? })
}

/// `dα` as a form field; composes, so `Exterior(Exterior(α))` is `d∘d`.
pub struct Exterior<F>(pub F);

impl<F: FormField> Field for Exterior<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn len(&self) -> usize {
        binom(self.0.dim(), self.0.degree() + 1)
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.0.check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        let a = self.0.eval(&seed_dual(x));
        let d: Vec<Vec<T>> = a.iter().map(|c| c.d.to_vec()).collect();
        exterior_from_grad(N, self.0.degree(), &d)
    }
}

impl<F: FormField> FormField for Exterior<F> {
    fn degree(&self) -> usize {
        self.0.degree() + 1
    }
}

/// Pointwise wedge product of two form fields.
pub struct Wedge<A, B>(pub A, pub B);

impl<A: FormField, B: FormField> Field for Wedge<A, B> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn len(&self) -> usize {
        binom(self.0.dim(), self.0.degree() + self.1.degree())
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.0.check(x)?;
        self.1.check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        wedge_coeffs(N, self.0.degree(), &self.0.eval(x), self.1.degree(), &self.1.eval(x))
    }
}

impl<A: FormField, B: FormField> FormField for Wedge<A, B> {
    fn degree(&self) -> usize {
        self.0.degree() + self.1.degree()
    }
}

/// Sum of two form fields of equal degree.
pub struct Sum<A, B>(pub A, pub B);

impl<A: FormField, B: FormField> Field for Sum<A, B> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn len(&self) -> usize {
        self.0.len()
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.0.check(x)?;
        self.1.check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        self.0.eval(x).into_iter().zip(self.1.eval(x)).map(|(a, b)| a + b).collect()
    }
}

impl<A: FormField, B: FormField> FormField for Sum<A, B> {
    fn degree(&self) -> usize {
        self.0.degree()
    }
}

/// Treats a scalar field as a zero-form.
pub struct ZeroForm<F>(pub F);

impl<F: Field> Field for ZeroForm<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn len(&self) -> usize {
        1
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.0.check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        self.0.eval(x)
    }
}

impl<F: Field> FormField for ZeroForm<F> {
    fn degree(&self) -> usize {
        0
    }
}

pub fn exterior_derivative<F: FormField>(a: &F, x: &[Scalar]) -> Result<FormValue> {
    form_at(&Exterior(a), x)
}
