//! Christoffel symbols, connection matrices and their curvature.
//!
//! Index conventions: `Γ^i_{jk}` is stored at `i·n² + j·n + k`. The
//! connection matrix is `θ^i_j = Γ^i_{jk} dx^k`, so `∇∂_j = θ^i_j ∂_i`.
//! Printed matrices put the lower index on the rows; [`FormMat`] values
//! returned by the transformation law use that layout (`M = θᵀ`), under which
//! a frame change `e' = A e` acts as `M' = dA·A⁻¹ + A·M·A⁻¹` and the
//! curvature reads `Ω = dM − M∧M`.
//!
//! On holomorphic charts only unbarred indices carry symbols and the
//! one-forms are written in the holomorphic differentials.

pub mod cayley;
pub mod tables;

use crate::calculus::{
    eval_at, fd_jacobian, jacobian_at, jet_eval, linalg, seed_dual, Field, FormValue, Number, Scalar,
};
use crate::calculus::forms::exterior_from_grad;
use crate::charts::{ChartId, TransformMap};
use crate::config::Tolerances;
use crate::error::{GeoError, Result};
use crate::metrics::{metric_at, MetricSource};

/// Matrix of one-forms, `m[row][col][k]` the coefficient of `dx^k`.
pub type FormMat = Vec<Vec<Vec<Scalar>>>;

/// The Levi-Civita symbols of a Riemannian metric, or the Chern symbols
/// `Γ^γ_{αβ} = h^{γε̄} ∂_α h_{βε̄}` of a Hermitian one.
#[derive(Clone, Copy, Debug)]
pub struct Christoffel<M>(pub M);

fn nan<T: Number>() -> T {
    T::cst(Scalar::new(f64::NAN, f64::NAN))
}

/// Symbols from the metric matrix and its first derivatives;
/// `dg(r, c, v)` is `∂g_{rc}/∂x^v`.
fn gamma_from<T: Number>(n: usize, hermitian: bool, g: &[Vec<T>], dg: impl Fn(usize, usize, usize) -> T) -> Vec<T> {
    let inv = linalg::inverse(&g.to_vec()).unwrap_or_else(|| vec![vec![nan(); n]; n]);
    let mut out = vec![T::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = T::zero();
                for l in 0..n {
                    if hermitian {
                        s += dg(k, l, j) * inv[l][i];
                    } else {
                        s += inv[i][l] * (dg(l, k, j) + dg(l, j, k) - dg(j, k, l)) * 0.5;
                    }
                }
                out[i * n * n + j * n + k] = s;
            }
        }
    }
    out
}

impl<M: MetricSource> Field for Christoffel<M> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn len(&self) -> usize {
        self.0.size().pow(3)
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        self.0.check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        let n = self.0.size();
        let d = self.0.eval(&seed_dual(x));
        let g: Vec<Vec<T>> = (0..n).map(|r| (0..n).map(|c| d[r * n + c].v).collect()).collect();
        gamma_from(n, self.0.is_hermitian(), &g, |r, c, v| d[r * n + c].d[v])
    }
}

/// Christoffel symbols at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaValue {
    pub n: usize,
    pub c: Vec<Scalar>,
}

impl GammaValue {
    pub fn get(&self, i: usize, j: usize, k: usize) -> Scalar {
        self.c[i * self.n * self.n + j * self.n + k]
    }

    /// `max |Γ^i_{jk} − Γ^i_{kj}|`.
    pub fn torsion(&self) -> f64 {
        let n = self.n;
        let mut r = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    r = r.max((self.get(i, j, k) - self.get(i, k, j)).norm());
                }
            }
        }
        r
    }

    pub fn max_abs_diff(&self, o: &GammaValue) -> f64 {
        self.c.iter().zip(&o.c).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

fn guard_metric<M: MetricSource>(m: &M, x: &[Scalar], tol: &Tolerances) -> Result<Vec<Vec<Scalar>>> {
    let g = metric_at(m, x)?;
    let cond = linalg::cond(&g);
    if !cond.is_finite() || cond > tol.max_cond {
        return Err(GeoError::SingularMetric(cond));
    }
    Ok(g)
}

/// Symbols at a full coordinate vector, refusing near-singular metrics.
pub fn christoffel_at<M: MetricSource>(m: &M, x: &[Scalar], tol: &Tolerances) -> Result<GammaValue> {
    guard_metric(m, x, tol)?;
    Ok(GammaValue { n: m.size(), c: eval_at(&Christoffel(m), x)? })
}

/// The same symbols with the metric differentiated by central differences.
pub fn christoffel_fd<M: MetricSource>(m: &M, x: &[Scalar], tol: &Tolerances) -> Result<GammaValue> {
    let g = guard_metric(m, x, tol)?;
    let d = fd_jacobian(m, x, tol.fd_step)?;
    let n = m.size();
    Ok(GammaValue { n, c: gamma_from(n, m.is_hermitian(), &g, |r, c, v| d[r * n + c][v]) })
}

/// Real symbols on the interleaved chart `(x¹, y¹, x², y², …)` from the
/// holomorphic ones of a Kähler metric: with `i ↦ xⁱ`, `i' ↦ yⁱ`,
/// `Γ̃^i_{jk} = Γ̃^{i'}_{j'k} = −Γ̃^i_{j'k'} = Re Γ^i_{jk}` and
/// `−Γ̃^i_{jk'} = Γ̃^{i'}_{jk} = −Γ̃^{i'}_{j'k'} = Im Γ^i_{jk}`.
pub fn real_from_complex(gc: &GammaValue) -> GammaValue {
    let n = gc.n;
    let m = 2 * n;
    let mut c = vec![Scalar::new(0.0, 0.0); m * m * m];
    let mut set = |i: usize, j: usize, k: usize, v: f64| c[i * m * m + j * m + k] = Scalar::new(v, 0.0);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let g = gc.get(i, j, k);
                let (re, im) = (g.re, g.im);
                let (x, y) = (|a: usize| 2 * a, |a: usize| 2 * a + 1);
                set(x(i), x(j), x(k), re);
                set(y(i), y(j), x(k), re);
                set(y(i), x(j), y(k), re);
                set(x(i), y(j), y(k), -re);
                set(x(i), x(j), y(k), -im);
                set(x(i), y(j), x(k), -im);
                set(y(i), x(j), x(k), im);
                set(y(i), y(j), y(k), -im);
            }
        }
    }
    GammaValue { n: m, c }
}

/// `θ^i_j` at a point, `c[i][j][k]` the coefficient of `dx^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionMatrix {
    pub n: usize,
    pub c: FormMat,
}

impl ConnectionMatrix {
    pub fn from_gamma(g: &GammaValue) -> Self {
        let n = g.n;
        let c = (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| g.get(i, j, k)).collect()).collect()).collect();
        ConnectionMatrix { n, c }
    }

    /// Rows indexed by the lower index: `M[j][i] = θ^i_j`.
    pub fn printed_layout(&self) -> FormMat {
        transpose_forms(&self.c)
    }

    pub fn from_printed_layout(m: &FormMat) -> Self {
        ConnectionMatrix { n: m.len(), c: transpose_forms(m) }
    }

    pub fn max_abs_diff(&self, o: &ConnectionMatrix) -> f64 {
        form_mat_diff(&self.c, &o.c)
    }
}

pub fn connection_matrix<M: MetricSource>(m: &M, x: &[Scalar], tol: &Tolerances) -> Result<ConnectionMatrix> {
    Ok(ConnectionMatrix::from_gamma(&christoffel_at(m, x, tol)?))
}

pub fn transpose_forms(m: &FormMat) -> FormMat {
    let n = m.len();
    (0..n).map(|a| (0..n).map(|b| m[b][a].clone()).collect()).collect()
}

pub fn form_mat_diff(a: &FormMat, b: &FormMat) -> f64 {
    let mut r = 0.0f64;
    for (ra, rb) in a.iter().zip(b) {
        for (ea, eb) in ra.iter().zip(rb) {
            for (x, y) in ea.iter().zip(eb) {
                r = r.max((x - y).norm());
            }
        }
    }
    r
}

/// `F·B` for a matrix of forms `F` and a scalar matrix `B`.
pub fn forms_times(f: &FormMat, b: &[Vec<Scalar>]) -> FormMat {
    let (rows, cols, dim) = (f.len(), b[0].len(), f[0][0].len());
    (0..rows)
        .map(|r| {
            (0..cols)
                .map(|c| (0..dim).map(|k| (0..b.len()).map(|m| f[r][m][k] * b[m][c]).sum()).collect())
                .collect()
        })
        .collect()
}

/// `B·F`.
pub fn times_forms(b: &[Vec<Scalar>], f: &FormMat) -> FormMat {
    let (rows, cols, dim) = (b.len(), f[0].len(), f[0][0].len());
    (0..rows)
        .map(|r| {
            (0..cols)
                .map(|c| (0..dim).map(|k| (0..f.len()).map(|m| b[r][m] * f[m][c][k]).sum()).collect())
                .collect()
        })
        .collect()
}

fn add_forms(a: &FormMat, b: &FormMat) -> FormMat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect()).collect())
        .collect()
}

/// The pieces of the transformation law, all in the row-lower layout and
/// written in the new differentials.
#[derive(Clone, Debug)]
pub struct TransformedConnection {
    /// `A[i][a] = ∂old^a/∂new^i`.
    pub a: Vec<Vec<Scalar>>,
    pub a_inv: Vec<Vec<Scalar>>,
    pub da: FormMat,
    /// `dA·A⁻¹`.
    pub inhomogeneous: FormMat,
    /// `A·Φ*(M)·A⁻¹`.
    pub conjugated: FormMat,
    /// Their sum.
    pub total: FormMat,
}

/// Frame-change matrix, its differential and inverse for a map from the new
/// chart to the old one. On holomorphic charts only the holomorphic blocks
/// enter.
pub fn frame_change(map: TransformMap, x_new: &[Scalar], tol: &Tolerances) -> Result<(Vec<Vec<Scalar>>, FormMat, Vec<Vec<Scalar>>)> {
    let (old, new) = (map.target(), map.source());
    let (no, nn) = (old.dim(), new.dim());
    if old.is_complex() != new.is_complex() {
        return Err(GeoError::Parse(format!("{} and {} are not both holomorphic or both real", new, old)));
    }
    let jets = jet_eval(&map, x_new)?;
    let a: Vec<Vec<Scalar>> = (0..nn).map(|i| (0..no).map(|c| jets[c].grad[i]).collect()).collect();
    if no != nn {
        return Err(GeoError::SingularJacobian);
    }
    let cond = linalg::cond(&a);
    if !cond.is_finite() || cond > tol.max_cond {
        return Err(GeoError::SingularJacobian);
    }
    let a_inv = linalg::inverse(&a).ok_or(GeoError::SingularJacobian)?;
    let da = (0..nn).map(|i| (0..no).map(|c| (0..nn).map(|k| jets[c].hess[i][k]).collect()).collect()).collect();
    Ok((a, da, a_inv))
}

/// `M' = dA·A⁻¹ + A·Φ*(M)·A⁻¹` for the connection of `m` (on the old chart)
/// seen from the source chart of `map`.
pub fn transform_connection<M: MetricSource>(
    m: &M,
    map: TransformMap,
    x_new: &[Scalar],
    tol: &Tolerances,
) -> Result<TransformedConnection> {
    if map.target() != m.chart() {
        return Err(GeoError::Parse(format!("{} does not land in {}", map.t, m.chart())));
    }
    let y = eval_at(&map, x_new)?;
    map.target().check(&y).map_err(|e| match e {
        GeoError::Domain { chart, reason } => GeoError::ImageDomain { chart, reason },
        other => other,
    })?;
    let (a, da, a_inv) = frame_change(map, x_new, tol)?;
    let old = connection_matrix(m, &y, tol)?.printed_layout();
    // pull the one-forms back: dx_old^c = Σ_k ∂old^c/∂new^k dx_new^k = A[k][c]
    let n = a.len();
    let pulled: FormMat = old
        .iter()
        .map(|row| row.iter().map(|f| (0..n).map(|k| (0..n).map(|c| f[c] * a[k][c]).sum()).collect()).collect())
        .collect();
    let inhomogeneous = forms_times(&da, &a_inv);
    let conjugated = forms_times(&times_forms(&a, &pulled), &a_inv);
    let total = add_forms(&inhomogeneous, &conjugated);
    Ok(TransformedConnection { a, a_inv, da, inhomogeneous, conjugated, total })
}

/// One-form `θ^i_j` on the full coordinate vector of the chart, as a
/// degree-one coefficient array (zero along barred differentials).
fn theta_full(g: &[Scalar], n: usize, dim: usize, i: usize, j: usize) -> Vec<Scalar> {
    (0..dim).map(|k| if k < n { g[i * n * n + j * n + k] } else { Scalar::new(0.0, 0.0) }).collect()
}

/// `Ω^i_j = dθ^i_j + θ^i_h∧θ^h_j`, one two-form per entry, on the full
/// coordinate vector.
#[derive(Clone, Debug)]
pub struct CurvatureMatrix {
    pub n: usize,
    pub dim: usize,
    pub c: Vec<Vec<FormValue>>,
}

impl CurvatureMatrix {
    /// Rows indexed by the lower index, matching `dM − M∧M`.
    pub fn printed_layout(&self) -> Vec<Vec<FormValue>> {
        (0..self.n).map(|a| (0..self.n).map(|b| self.c[b][a].clone()).collect()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().flatten().map(FormValue::max_abs).fold(0.0, f64::max)
    }
}

/// Curvature through exterior calculus on the entries of the connection matrix.
pub fn curvature_matrix<M: MetricSource>(m: &M, x: &[Scalar], tol: &Tolerances) -> Result<CurvatureMatrix> {
    guard_metric(m, x, tol)?;
    let n = m.size();
    let dim = m.dim();
    let (g, dg) = jacobian_at(&Christoffel(m), x)?;
    let theta = |i: usize, j: usize| FormValue::one_form(theta_full(&g, n, dim, i, j));
    let mut c = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let grad: Vec<Vec<Scalar>> = (0..dim)
                .map(|k| if k < n { dg[i * n * n + j * n + k].clone() } else { vec![Scalar::new(0.0, 0.0); dim] })
                .collect();
            let mut om = FormValue::from_coeffs(dim, 2, exterior_from_grad(dim, 1, &grad));
            for h in 0..n {
                om = om.add(&theta(i, h).wedge(&theta(h, j))?);
            }
            row.push(om);
        }
        c.push(row);
    }
    Ok(CurvatureMatrix { n, dim, c })
}

/// `R^j_{ikl} = ∂_kΓ^j_{il} − ∂_lΓ^j_{ik} + Γ^h_{il}Γ^j_{hk} − Γ^h_{ik}Γ^j_{hl}`,
/// indexed `r[j][i][k][l]` over the full coordinate vector.
pub fn riemann_components<M: MetricSource>(m: &M, x: &[Scalar]) -> Result<Vec<Vec<Vec<Vec<Scalar>>>>> {
    let n = m.size();
    let dim = m.dim();
    let (g, dg) = jacobian_at(&Christoffel(m), x)?;
    let gam = |a: usize, b: usize, c: usize| if c < n { g[a * n * n + b * n + c] } else { Scalar::new(0.0, 0.0) };
    let dgam = |a: usize, b: usize, c: usize, v: usize| {
        if c < n {
            dg[a * n * n + b * n + c][v]
        } else {
            Scalar::new(0.0, 0.0)
        }
    };
    let mut r = vec![vec![vec![vec![Scalar::new(0.0, 0.0); dim]; dim]; n]; n];
    for j in 0..n {
        for i in 0..n {
            for k in 0..dim {
                for l in 0..dim {
                    let mut s = dgam(j, i, l, k) - dgam(j, i, k, l);
                    for h in 0..n {
                        let gjk = if k < n { gam(j, h, k) } else { Scalar::new(0.0, 0.0) };
                        let gjl = if l < n { gam(j, h, l) } else { Scalar::new(0.0, 0.0) };
                        s += gam(h, i, l) * gjk - gam(h, i, k) * gjl;
                    }
                    r[j][i][k][l] = s;
                }
            }
        }
    }
    Ok(r)
}

/// Largest gap between the two curvature routes.
pub fn curvature_route_gap<M: MetricSource>(m: &M, x: &[Scalar], tol: &Tolerances) -> Result<f64> {
    let om = curvature_matrix(m, x, tol)?;
    let r = riemann_components(m, x)?;
    let mut gap = 0.0f64;
    for j in 0..om.n {
        for i in 0..om.n {
            for k in 0..om.dim {
                for l in (k + 1)..om.dim {
                    gap = gap.max((om.c[j][i].get(&[k, l]) - r[j][i][k][l]).norm());
                }
            }
        }
    }
    Ok(gap)
}

/// `max |Ωg + gΩᵀ|` in the row-lower layout, the antisymmetry of
/// `Ω_{ij} = g_{il}Ω^l_j` for a Riemannian metric.
pub fn curvature_antisymmetry<M: MetricSource>(m: &M, x: &[Scalar], tol: &Tolerances) -> Result<f64> {
    let om = curvature_matrix(m, x, tol)?;
    let g = metric_at(m, x)?;
    let n = om.n;
    let mut r = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut s = FormValue::zero(om.dim, 2);
            for l in 0..n {
                s = s.add(&om.c[l][j].scale(g[i][l])).add(&om.c[l][i].scale(g[j][l]));
            }
            r = r.max(s.max_abs());
        }
    }
    Ok(r)
}

/// `AΦ*(Ω)A⁻¹` in the row-lower layout; equals the curvature of the
/// transformed connection.
pub fn transform_curvature(
    om: &CurvatureMatrix,
    map: TransformMap,
    x_new: &[Scalar],
    tol: &Tolerances,
) -> Result<Vec<Vec<FormValue>>> {
    let (a, _, a_inv) = frame_change(map, x_new, tol)?;
    let jfull = crate::charts::transform_jacobian(map, x_new)?;
    let pulled: Vec<Vec<FormValue>> =
        om.printed_layout().iter().map(|row| row.iter().map(|f| f.pullback(&jfull)).collect()).collect();
    let n = a.len();
    let dim = map.source().nvars();
    let mut out = vec![vec![FormValue::zero(dim, 2); n]; n];
    for r in 0..n {
        for c in 0..n {
            let mut s = FormValue::zero(dim, 2);
            for p in 0..n {
                for q in 0..n {
                    s = s.add(&pulled[p][q].scale(a[r][p] * a_inv[q][c]));
                }
            }
            out[r][c] = s;
        }
    }
    Ok(out)
}

/// `∇u = (∂_j u_k − Γ^l_{jk} u_l) dx^j ⊗ dx^k`; `du[k][j] = ∂_j u_k`.
pub fn covariant_derivative_oneform(u: &[Scalar], du: Option<&[Vec<Scalar>]>, g: &GammaValue) -> Vec<Vec<Scalar>> {
    let n = g.n;
    (0..n)
        .map(|j| {
            (0..n)
                .map(|k| {
                    let d = du.map_or(Scalar::new(0.0, 0.0), |du| du[k][j]);
                    d - (0..n).map(|l| g.get(l, j, k) * u[l]).sum::<Scalar>()
                })
                .collect()
        })
        .collect()
}

/// `D(dxⁱ)`, the covariant derivative of a coordinate differential.
pub fn covariant_of_coordinate(g: &GammaValue, i: usize) -> Vec<Vec<Scalar>> {
    let mut u = vec![Scalar::new(0.0, 0.0); g.n];
    u[i] = Scalar::new(1.0, 0.0);
    covariant_derivative_oneform(&u, None, g)
}

/// Fibre metric `h = (1 − ww̄)^e` of a line bundle over the disk, treated as
/// a `1 × 1` Hermitian metric so its Chern connection is `∂ log h`.
#[derive(Clone, Copy, Debug)]
pub struct DiskLineMetric {
    pub exponent: f64,
}

impl Field for DiskLineMetric {
    fn dim(&self) -> usize {
        2
    }
    fn len(&self) -> usize {
        1
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        ChartId::D1.check(x)
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        vec![(-(x[0] * x[1]) + 1.0).powf(self.exponent)]
    }
}

impl MetricSource for DiskLineMetric {
    fn chart(&self) -> ChartId {
        ChartId::D1
    }
    fn size(&self) -> usize {
        1
    }
}

#[cfg(test)]
mod tests;
