//! Almost cosymplectic structures `(θ, Ω)` on the extended Siegel–Jacobi
//! half-spaces, Darboux coordinates for the Kähler two-form, and the
//! half-vectorisation used to index them.
//!
//! `vech` stacks the upper triangle row by row, `a₁₁, a₁₂, …, a₁ₙ, a₂₂, …`,
//! so the first row holds `n` entries and the last one. This is the layout
//! of the matrix charts, not the column-stacking convention common in
//! statistics.

use crate::calculus::{jacobian_at, linalg, Field, FormField, FormValue, Number, Scalar};
use crate::charts::{vech_pairs, ChartId};
use crate::config::Tolerances;
use crate::error::{GeoError, Result};
use crate::params::ModelParams;
use serde::Serialize;

/// `N₁ = n(n+1)/2`.
pub fn n1(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Row-major vectorisation.
pub fn vec_rows<T: Copy>(a: &[Vec<T>]) -> Vec<T> {
    a.iter().flatten().copied().collect()
}

/// Half-vectorisation of a symmetric matrix.
pub fn vech(a: &[Vec<Scalar>]) -> Result<Vec<Scalar>> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(GeoError::Parse("vech needs a square matrix".into()));
    }
    let scale = a.iter().flatten().map(|v| v.norm()).fold(1.0, f64::max);
    for i in 0..n {
        for j in i + 1..n {
            if (a[i][j] - a[j][i]).norm() > 1e-12 * scale {
                return Err(GeoError::NonSymmetric);
            }
        }
    }
    Ok(vech_pairs(n).into_iter().map(|(i, j)| a[i][j]).collect())
}

/// Inverse of [`vech`].
pub fn unvech<T: Number>(v: &[T], n: usize) -> Result<Vec<Vec<T>>> {
    if v.len() != n1(n) {
        return Err(GeoError::Parse(format!("vech of a {n}×{n} matrix has {} entries, got {}", n1(n), v.len())));
    }
    let mut a = linalg::zeros(n, n);
    for (t, (i, j)) in vech_pairs(n).into_iter().enumerate() {
        a[i][j] = v[t];
        a[j][i] = v[t];
    }
    Ok(a)
}

/// Row bookkeeping of `vech`: the row holding `i` entries starts after
/// `i_d = N₁ − i(i+1)/2` entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VechIndexing {
    pub n: usize,
}

impl VechIndexing {
    pub fn n1(&self) -> usize {
        n1(self.n)
    }

    /// `i_d` for `i = 1, …, n`.
    pub fn i_d(&self, i: usize) -> Option<usize> {
        (1..=self.n).contains(&i).then(|| self.n1() - i * (i + 1) / 2)
    }

    /// One-based indices `I` of the row with `i` entries.
    pub fn row(&self, i: usize) -> Option<std::ops::RangeInclusive<usize>> {
        self.i_d(i).map(|d| d + 1..=d + i)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PairKind {
    /// `(k/4 x_ii, −(y⁻¹)_ii)`.
    Diagonal,
    /// `(k/2 x_ij, −(y⁻¹)_ij)`, `i < j`.
    OffDiagonal,
    /// `(2ν q_i, p_i)`.
    Fibre,
}

/// One Darboux pair `(Q^I, P^I)`; `row`, `col` are zero-based matrix
/// indices (`row = col = i` for the fibre).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DarbouxPair {
    pub index: usize,
    pub kind: PairKind,
    pub row: usize,
    pub col: usize,
    pub weight: f64,
}

/// Darboux coordinates of the Kähler two-form on `(x, y, q, p)` with
/// symmetric `n × n` blocks, `n ≤ 2`. As a field it returns
/// `[Q¹, …, Q^𝗇, P¹, …, P^𝗇]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Darboux {
    pub n: usize,
    pub params: ModelParams,
}

pub fn darboux_vectorize(n: usize, params: ModelParams) -> Result<Darboux> {
    if !(1..=2).contains(&n) {
        return Err(GeoError::UnsupportedN(n));
    }
    Ok(Darboux { n, params })
}

impl Darboux {
    pub fn chart(&self) -> ChartId {
        ChartId::XJnReal(self.n)
    }

    /// `𝗇 = n(n+3)/2`.
    pub fn half_dim(&self) -> usize {
        n1(self.n) + self.n
    }

    pub fn pairs(&self) -> Vec<DarbouxPair> {
        let ModelParams { k, nu, .. } = self.params;
        let idx = VechIndexing { n: self.n };
        let mut out: Vec<DarbouxPair> = vech_pairs(self.n)
            .into_iter()
            .enumerate()
            .map(|(t, (row, col))| {
                let diag = (1..=self.n).any(|i| idx.i_d(i) == Some(t));
                DarbouxPair {
                    index: t + 1,
                    kind: if diag { PairKind::Diagonal } else { PairKind::OffDiagonal },
                    row,
                    col,
                    weight: if diag { k / 4.0 } else { k / 2.0 },
                }
            })
            .collect();
        let m = n1(self.n);
        out.extend((0..self.n).map(|i| DarbouxPair { index: m + i + 1, kind: PairKind::Fibre, row: i, col: i, weight: 2.0 * nu }));
        out
    }

    /// `Σ dQ^I ∧ dP^I` at a point of the chart.
    pub fn two_form(&self, x: &[Scalar]) -> Result<FormValue> {
        let (_, j) = jacobian_at(self, x)?;
        let h = self.half_dim();
        let dim = x.len();
        let mut w = FormValue::zero(dim, 2);
        for i in 0..h {
            w = w.add(&FormValue::one_form(j[i].clone()).wedge(&FormValue::one_form(j[h + i].clone()))?);
        }
        Ok(w)
    }
}

impl Field for Darboux {
    fn dim(&self) -> usize {
        self.chart().nvars()
    }
    fn len(&self) -> usize {
        2 * self.half_dim()
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.chart().check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        let (n, m) = (self.n, n1(self.n));
        let y = unvech(&x[m..2 * m], n).expect("chart layout");
        let yi = linalg::inverse(&y).unwrap_or_else(|| linalg::zeros(n, n));
        let pairs = self.pairs();
        let mut q = Vec::with_capacity(pairs.len());
        let mut p = Vec::with_capacity(pairs.len());
        for (t, pr) in pairs.iter().enumerate() {
            if pr.kind == PairKind::Fibre {
                q.push(x[2 * m + pr.row] * pr.weight);
                p.push(x[2 * m + n + pr.row]);
            } else {
                q.push(x[t] * pr.weight);
                p.push(-yi[pr.row][pr.col]);
            }
        }
        q.extend(p);
        q
    }
}

/// Which closed two-form `Ω` is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OmegaKind {
    /// `(k/y²) dx∧dy + 2ν dq∧dp`, `n = 1` only.
    HalfPlane,
    /// `(k/4) tr(y⁻¹dx ∧ y⁻¹dy) + 2ν dqᵗ∧dp`.
    Trace,
}

/// `Ω` on `XJ{n}-real`, or on `XJ{n}-ext` with no `dκ` terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Omega {
    pub kind: OmegaKind,
    pub n: usize,
    pub params: ModelParams,
    pub extended: bool,
}

impl Omega {
    pub fn new(kind: OmegaKind, n: usize, params: ModelParams, extended: bool) -> Result<Self> {
        if !(1..=2).contains(&n) || (kind == OmegaKind::HalfPlane && n != 1) {
            return Err(GeoError::UnsupportedN(n));
        }
        Ok(Omega { kind, n, params, extended })
    }

    pub fn chart(&self) -> ChartId {
        match (self.kind, self.extended) {
            (OmegaKind::HalfPlane, false) => ChartId::XJ1Real,
            (OmegaKind::HalfPlane, true) => ChartId::XJ1Ext,
            (OmegaKind::Trace, false) => ChartId::XJnReal(self.n),
            (OmegaKind::Trace, true) => ChartId::XJnExt(self.n),
        }
    }
}

impl Field for Omega {
    fn dim(&self) -> usize {
        self.chart().nvars()
    }
    fn len(&self) -> usize {
        let d = self.dim();
        d * (d - 1) / 2
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.chart().check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        let ModelParams { k, nu, .. } = self.params;
        let d = self.dim();
        let mut m = linalg::zeros::<T>(d, d);
        let (n, n1) = (self.n, n1(self.n));
        match self.kind {
            OmegaKind::HalfPlane => {
                m[0][1] = (x[1] * x[1]).recip() * k;
            }
            OmegaKind::Trace => {
                let y = unvech(&x[n1..2 * n1], n).expect("chart layout");
                let yi = linalg::inverse(&y).unwrap_or_else(|| linalg::zeros(n, n));
                let basis = |t: usize| {
                    let mut e = vec![T::zero(); n1];
                    e[t] = T::one();
                    unvech(&e, n).expect("length")
                };
                for a in 0..n1 {
                    let ya = linalg::matmul(&yi, &basis(a));
                    for b in 0..n1 {
                        let yb = linalg::matmul(&yi, &basis(b));
                        let tr = (0..n).fold(T::zero(), |s, i| (0..n).fold(s, |s, j| s + ya[i][j] * yb[j][i]));
                        m[a][n1 + b] = tr * (k / 4.0);
                    }
                }
            }
        }
        let fibre = d - n - if self.extended { 1 } else { 0 } - n;
        for i in 0..n {
            m[fibre + i][fibre + n + i] = T::re_(2.0 * nu);
        }
        crate::calculus::forms::combos(d, 2).iter().map(|ij| m[ij[0]][ij[1]]).collect()
    }
}

impl FormField for Omega {
    fn degree(&self) -> usize {
        2
    }
}

/// `θ = √δ(dκ − Σ pᵢ dqᵢ + Σ qᵢ dpᵢ)` on `XJ{n}-ext` (`XJ1-ext` for `n = 1`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Theta {
    pub n: usize,
    pub params: ModelParams,
}

impl Theta {
    pub fn chart(&self) -> ChartId {
        if self.n == 1 {
            ChartId::XJ1Ext
        } else {
            ChartId::XJnExt(self.n)
        }
    }
}

impl Field for Theta {
    fn dim(&self) -> usize {
        self.chart().nvars()
    }
    fn len(&self) -> usize {
        self.dim()
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.chart().check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        let s = self.params.delta.sqrt();
        let d = self.dim();
        let n = self.n;
        let fibre = d - 1 - 2 * n;
        let mut c = vec![T::zero(); d];
        for i in 0..n {
            c[fibre + i] = -(x[fibre + n + i] * s);
            c[fibre + n + i] = x[fibre + i] * s;
        }
        c[d - 1] = T::re_(s);
        c
    }
}

impl FormField for Theta {
    fn degree(&self) -> usize {
        1
    }
}

/// The coefficients of `θ = Σ (a_I dQ^I + b_I dP^I) + c dκ` in Darboux
/// coordinates: zero on the `x, y` pairs, `a = −(√δ/2ν) p`, `b = √δ q` on
/// the fibre pairs and `c = √δ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaCoefficients {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
}

/// Reads `q`, `p` from a point of `XJ{n}-ext`.
pub fn theta_coefficients(n: usize, params: ModelParams, x: &[Scalar]) -> Result<ThetaCoefficients> {
    let d = darboux_vectorize(n, params)?;
    let m = n1(n);
    let s = params.delta.sqrt();
    let (mut a, mut b) = (vec![0.0; d.half_dim()], vec![0.0; d.half_dim()]);
    for i in 0..n {
        a[m + i] = -s / (2.0 * params.nu) * x[2 * m + n + i].re;
        b[m + i] = s * x[2 * m + i].re;
    }
    Ok(ThetaCoefficients { a, b, c: s })
}

/// `Σ a_I dQ^I + b_I dP^I + c dκ` on `XJ{n}-ext` through the Darboux map.
pub fn theta_from_coefficients(n: usize, params: ModelParams, x: &[Scalar]) -> Result<FormValue> {
    let d = darboux_vectorize(n, params)?;
    let co = theta_coefficients(n, params, x)?;
    let base = &x[..x.len() - 1];
    let (_, j) = jacobian_at(&d, base)?;
    let h = d.half_dim();
    let mut c = vec![Scalar::new(0.0, 0.0); x.len()];
    for i in 0..h {
        for (v, cv) in c.iter_mut().enumerate().take(base.len()) {
            *cv += j[i][v] * co.a[i] + j[h + i][v] * co.b[i];
        }
    }
    c[x.len() - 1] = Scalar::new(co.c, 0.0);
    Ok(FormValue::one_form(c))
}

/// An odd-dimensional pair `(θ, Ω)` claimed to be almost cosymplectic.
#[derive(Clone, Copy, Debug)]
pub struct Acos<A, W> {
    pub theta: A,
    pub omega: W,
    /// `𝗇`, with `dim = 2𝗇 + 1`.
    pub half_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcosReport {
    pub rank: usize,
    pub expected_rank: usize,
    /// Coefficient of `θ ∧ Ω^𝗇` on the coordinate volume form.
    pub top_coefficient: f64,
    /// `max |dΩ|`.
    pub d_omega: f64,
    /// `θ` has a non-zero `dκ` component.
    pub c_nonzero: bool,
}

impl AcosReport {
    /// Rank `2𝗇`, `θ∧Ω^𝗇 ≠ 0` and `c ≠ 0`.
    pub fn is_acos(&self) -> bool {
        self.rank == self.expected_rank && self.top_coefficient.abs() > 1e-12 && self.c_nonzero
    }

    /// The generalized transitive case, `dΩ = 0` as well.
    pub fn is_closed(&self, tol: f64) -> bool {
        self.d_omega <= tol
    }
}

/// Numerical rank of a real antisymmetric matrix.
pub fn numerical_rank(m: &[Vec<Scalar>], rel: f64) -> usize {
    let sv = linalg::to_na(&m.to_vec()).svd(false, false).singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel * top).count()
}

pub fn acos_check<A: FormField, W: FormField>(s: &Acos<A, W>, x: &[Scalar], tol: &Tolerances) -> Result<AcosReport> {
    let dim = s.omega.dim();
    if s.theta.dim() != dim || dim != 2 * s.half_rank + 1 || s.theta.degree() != 1 || s.omega.degree() != 2 {
        return Err(GeoError::Parse(format!("(θ, Ω) of degrees ({}, {}) on {dim} variables is not an odd-dimensional pair", s.theta.degree(), s.omega.degree())));
    }
    let theta = crate::calculus::form_at(&s.theta, x)?;
    let omega = crate::calculus::form_at(&s.omega, x)?;
    let mut top = theta.clone();
    for _ in 0..s.half_rank {
        top = top.wedge(&omega)?;
    }
    let d_omega = crate::calculus::exterior_derivative(&s.omega, x)?.max_abs();
    Ok(AcosReport {
        rank: numerical_rank(&omega.to_matrix(), tol.abs),
        expected_rank: 2 * s.half_rank,
        top_coefficient: top.c[0].re,
        d_omega,
        c_nonzero: theta.c[dim - 1].norm() > 0.0,
    })
}

/// `θ∧ω² = (4kν√δ/y²) dx∧dy∧dq∧dp∧dκ` on the extended half-plane.
pub fn expected_top_coefficient(params: &ModelParams, y: f64) -> f64 {
    4.0 * params.k * params.nu * params.delta.sqrt() / (y * y)
}

/// The structure on `XJ1-ext` and, for `n = 2`, the trace form on `XJ2-ext`.
pub fn extended_structure(n: usize, params: ModelParams) -> Result<Acos<Theta, Omega>> {
    let kind = if n == 1 { OmegaKind::HalfPlane } else { OmegaKind::Trace };
    Ok(Acos { theta: Theta { n, params }, omega: Omega::new(kind, n, params, true)?, half_rank: n1(n) + n })
}
