//! Small dense linear algebra. The generic routines run over any
//! [`Number`] so that solves can be differentiated; spectral quantities go
//! through nalgebra.

use super::number::{Number, Scalar};
use crate::error::{GeoError, Result};
use nalgebra::DMatrix;

pub type Mat<T> = Vec<Vec<T>>;

pub fn zeros<T: Number>(n: usize, m: usize) -> Mat<T> {
    vec![vec![T::zero(); m]; n]
}

pub fn identity<T: Number>(n: usize) -> Mat<T> {
    let mut a = zeros(n, n);
    for (i, r) in a.iter_mut().enumerate() {
        r[i] = T::one();
    }
    a
}

pub fn matmul<T: Number>(a: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    let (n, m, p) = (a.len(), b.len(), b[0].len());
    let mut c = zeros(n, p);
    for i in 0..n {
        for k in 0..m {
            let aik = a[i][k];
            for j in 0..p {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

pub fn transpose<T: Number>(a: &Mat<T>) -> Mat<T> {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting on the
/// magnitude of the leading value. Returns `None` for an exactly singular
/// pivot.
pub fn solve<T: Number>(a: &Mat<T>, b: &Mat<T>) -> Option<Mat<T>> {
    let n = a.len();
    let m = b[0].len();
    let mut a = a.clone();
    let mut b = b.clone();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            a[i][col].value().norm().partial_cmp(&a[j][col].value().norm()).unwrap()
        })?;
        if a[piv][col].value().norm() == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for r in col + 1..n {
            let f = a[r][col] * inv;
            if f.value().norm() == 0.0 {
                continue;
            }
            for cc in col..n {
                let t = a[col][cc];
                a[r][cc] -= f * t;
            }
            for cc in 0..m {
                let t = b[col][cc];
                b[r][cc] -= f * t;
            }
        }
    }
    let mut x = zeros(n, m);
    for r in (0..n).rev() {
        for cc in 0..m {
            let mut s = b[r][cc];
            for k in r + 1..n {
                s -= a[r][k] * x[k][cc];
            }
            x[r][cc] = s / a[r][r];
        }
    }
    Some(x)
}

pub fn inverse<T: Number>(a: &Mat<T>) -> Option<Mat<T>> {
    solve(a, &identity(a.len()))
}

pub fn det<T: Number>(a: &Mat<T>) -> T {
    let n = a.len();
    match n {
        0 => return T::one(),
        1 => return a[0][0],
        2 => return a[0][0] * a[1][1] - a[0][1] * a[1][0],
        _ => {}
    }
    let mut a = a.clone();
    let mut d = T::one();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                a[i][col].value().norm().partial_cmp(&a[j][col].value().norm()).unwrap()
            })
            .unwrap();
        if a[piv][col].value().norm() == 0.0 {
            return T::zero();
        }
        if piv != col {
            a.swap(col, piv);
            d = -d;
        }
        d *= a[col][col];
        let inv = a[col][col].recip();
        for r in col + 1..n {
            let f = a[r][col] * inv;
            for cc in col..n {
                let t = a[col][cc];
                a[r][cc] -= f * t;
            }
        }
    }
    d
}

pub fn to_na(a: &Mat<Scalar>) -> DMatrix<Scalar> {
    DMatrix::from_fn(a.len(), a[0].len(), |i, j| a[i][j])
}

/// 2-norm condition number from the singular values.
pub fn cond(a: &Mat<Scalar>) -> f64 {
    let sv = to_na(a).singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Inverse with the singular-metric guard.
pub fn checked_inverse(a: &Mat<Scalar>, max_cond: f64) -> Result<Mat<Scalar>> {
    let k = cond(a);
    if !(k <= max_cond) {
        return Err(GeoError::SingularMetric(k));
    }
    inverse(a).ok_or(GeoError::SingularMetric(f64::INFINITY))
}

/// Eigenvalues of the Hermitian part of `a`, ascending.
pub fn hermitian_eigenvalues(a: &Mat<Scalar>) -> Vec<f64> {
    let m = to_na(a);
    let h = (&m + m.adjoint()) * Scalar::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

pub fn max_abs_diff(a: &Mat<Scalar>, b: &Mat<Scalar>) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(r, s)| r.iter().zip(s).map(|(x, y)| (x - y).norm()))
        .fold(0.0, f64::max)
}

pub fn max_abs_dev_from_identity(a: &Mat<Scalar>) -> f64 {
    max_abs_diff(a, &identity(a.len()))
}
