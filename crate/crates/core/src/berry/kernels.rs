//! Coherent-state kernels `K(z̄, z′)`, antiholomorphic in the bra point and
//! holomorphic in the ket point.

use crate::calculus::{jacobian_at, linalg, Field, FormValue, Number, Scalar, I};
use crate::charts::ChartId;
use crate::error::{GeoError, Result};
use crate::metrics::{zzh_plus, PotKind, Potential};
use crate::params::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelKind {
    /// Siegel–Jacobi disk, `(w, z)`.
    Hot,
    /// `(1 − z̄z′)^{−2k}` on the unit disk.
    D1,
    /// `(1 + z̄z′)^{2j}` on the sphere, `j = k/2`.
    S2,
    /// `(1 + ε z̄·z′)^ε`.
    Cp { n: usize, eps: i8 },
    /// `det(1 + ε Z′Z⁺)^ε`.
    Gr { n: usize, m: usize, eps: i8 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsKernel {
    pub kind: KernelKind,
    pub params: ModelParams,
}

impl CsKernel {
    pub fn new(kind: KernelKind, params: ModelParams) -> Self {
        CsKernel { kind, params }
    }

    pub fn chart(&self) -> ChartId {
        match self.kind {
            KernelKind::Hot => ChartId::DJ1,
            KernelKind::D1 => ChartId::D1,
            KernelKind::S2 => ChartId::S2,
            KernelKind::Cp { n, eps } => ChartId::CP { n, eps },
            KernelKind::Gr { n, m, eps } => ChartId::Gr { n, m, eps },
        }
    }

    /// The potential `log K(z̄, z)`.
    pub fn potential(&self) -> Potential {
        let kind = match self.kind {
            KernelKind::Hot => PotKind::Scwz,
            KernelKind::D1 => PotKind::D1,
            KernelKind::S2 => PotKind::S2 { j: self.params.k / 2.0 },
            KernelKind::Cp { n, eps } => PotKind::Cp { n, eps },
            KernelKind::Gr { n, m, eps } => PotKind::Gr { n, m, eps },
        };
        Potential::new(kind, self.params)
    }

    /// `K` from the conjugated bra coordinates and the ket coordinates.
    pub fn value<T: Number>(&self, bar: &[T], z: &[T]) -> T {
        let ModelParams { k, nu, .. } = self.params;
        match self.kind {
            KernelKind::Hot => {
                let (wb, zb, w, zz) = (bar[0], bar[1], z[0], z[1]);
                let p = -(wb * w) + 1.0;
                p.powf(-2.0 * k) * ((zb * zz * 2.0 + zz * zz * wb + zb * zb * w) / (p * 2.0) * nu).exp()
            }
            KernelKind::D1 => (-(bar[0] * z[0]) + 1.0).powf(-2.0 * k),
            KernelKind::S2 => (bar[0] * z[0] + 1.0).powf(k),
            KernelKind::Cp { n, eps } => {
                let e = eps as f64;
                let s = (0..n).fold(T::zero(), |acc, a| acc + bar[a] * z[a]);
                (s * e + 1.0).powf(e)
            }
            KernelKind::Gr { n, m, eps } => {
                let e = eps as f64;
                let full: Vec<T> = z.iter().chain(bar).copied().collect();
                linalg::det(&zzh_plus(&full, n, m, e)).powf(e)
            }
        }
    }

    /// `K(ā, b)` for chart coordinates `a`, `b`.
    pub fn eval(&self, a: &[Scalar], b: &[Scalar]) -> Result<Scalar> {
        let chart = self.chart();
        for p in [a, b] {
            let full: Vec<Scalar> = p.iter().copied().chain(p.iter().map(|v| v.conj())).collect();
            chart.check(&full)?;
        }
        let bar: Vec<Scalar> = a.iter().map(|v| v.conj()).collect();
        Ok(self.value(&bar, b))
    }

    /// `log K` on the diagonal, read from a full vector `[z, z̄]`.
    pub fn diag_log<T: Number>(&self, x: &[T]) -> T {
        let n = x.len() / 2;
        self.value(&x[n..], &x[..n]).ln()
    }
}

/// `log K(ā, ·)` as a field of the ket coordinates.
struct KetLog<'a> {
    kernel: &'a CsKernel,
    bar: Vec<Scalar>,
}

impl Field for KetLog<'_> {
    fn dim(&self) -> usize {
        self.bar.len()
    }
    fn len(&self) -> usize {
        1
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        let bar: Vec<T> = self.bar.iter().map(|&v| T::cst(v)).collect();
        vec![self.kernel.value(&bar, x).ln()]
    }
}

/// `A_B = −Im(∂_b K(ā, b)/K)` at `b = a`, on the full vector `[a, ā]`.
pub fn kernel_berry(kernel: &CsKernel, a: &[Scalar]) -> Result<FormValue> {
    let n = a.len();
    if kernel.value(&a.iter().map(|v| v.conj()).collect::<Vec<_>>(), a).re <= 0.0 {
        return Err(GeoError::domain(&kernel.chart().to_string(), "kernel not positive on the diagonal"));
    }
    let f = KetLog { kernel, bar: a.iter().map(|v| v.conj()).collect() };
    let (_, j) = jacobian_at(&f, a)?;
    let h = I * 0.5;
    let mut c = vec![Scalar::new(0.0, 0.0); 2 * n];
    for i in 0..n {
        c[i] = j[0][i] * h;
        c[n + i] = -(j[0][i].conj() * h);
    }
    Ok(FormValue::one_form(c))
}

/// The published kernel on the half-plane `(v, u)`, on the full vector
/// `[v, u, v̄, ū]`.
pub fn half_plane_kernel<T: Number>(p: ModelParams, x: &[T]) -> T {
    let (v, u, vb, ub) = (x[0], x[1], x[2], x[3]);
    let i = |s: f64| T::cst(I * s);
    let m2 = (v + i(1.0)) * (vb - i(1.0));
    let den = (vb - v) * i(2.0);
    let inner = u * ub - ((u * vb - ub * v) * (u * vb - ub * v) + (ub - u) * (ub - u)) / den;
    (m2 / den).powf(2.0 * p.k) * (inner * (2.0 * p.nu) / m2).exp()
}

/// The published kernel on `(w, η)`, on the full vector `[w, η, w̄, η̄]`.
pub fn fibre_kernel<T: Number>(p: ModelParams, x: &[T]) -> T {
    let (w, e, wb, eb) = (x[0], x[1], x[2], x[3]);
    (-(w * wb) + 1.0).powf(-2.0 * p.k) * ((e * eb - (wb * e * e + w * eb * eb) * 0.5) * p.nu).exp()
}
