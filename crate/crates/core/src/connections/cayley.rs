//! The connection of the balanced metric carried from the Siegel–Jacobi disk
//! to the upper half-plane by the partial Cayley transform, compared block by
//! block with closed forms.
//!
//! One-forms here are coefficient pairs over `(dv, du)`.

use super::{form_mat_diff, transform_connection, FormMat};
use crate::calculus::{linalg, Scalar, I};
use crate::charts::{ChartId, ChartPoint, Transform, TransformMap};
use crate::config::Tolerances;
use crate::error::Result;
use crate::metrics::{CatalogMetric, MetricId};
use crate::params::ModelParams;

type F1 = [Scalar; 2];

fn s(f: F1, c: Scalar) -> F1 {
    [f[0] * c, f[1] * c]
}
fn add(a: F1, b: F1) -> F1 {
    [a[0] + b[0], a[1] + b[1]]
}
fn diff(a: F1, b: F1) -> f64 {
    (a[0] - b[0]).norm().max((a[1] - b[1]).norm())
}
fn mat(m: [[F1; 2]; 2]) -> FormMat {
    m.iter().map(|r| r.iter().map(|f| f.to_vec()).collect()).collect()
}

/// Residuals of the individual comparisons at one point.
#[derive(Clone, Debug)]
pub struct CayleyCheck {
    pub residuals: Vec<(&'static str, f64)>,
}

impl CayleyCheck {
    pub fn max(&self) -> f64 {
        self.residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }
    pub fn get(&self, name: &str) -> f64 {
        self.residuals.iter().find(|r| r.0 == name).map_or(f64::NAN, |r| r.1)
    }
}

/// Everything needed on the half-plane side, in closed form.
struct Closed {
    a: Vec<Vec<Scalar>>,
    a_inv: Vec<Vec<Scalar>>,
    da: [[F1; 2]; 2],
    aam: [[F1; 2]; 2],
    conj: [[F1; 2]; 2],
    target: [[F1; 2]; 2],
    /// The four identities used to match the blocks, as residuals.
    identities: [f64; 4],
}

fn closed(p: ModelParams, v: Scalar, u: Scalar) -> Closed {
    let one = Scalar::new(1.0, 0.0);
    let zero = Scalar::new(0.0, 0.0);
    let (lam, iota) = (p.lambda(), p.iota());
    let vi = v + I;
    let y = v.im;
    // disk side
    let w = (v - I) / vi;
    let z = I * 2.0 * u / vi;
    let (wb, zb) = (w.conj(), z.conj());
    let pp = one - w * wb;
    let etab = (zb + z * wb) / pp;
    let dv: F1 = [one, zero];
    let du: F1 = [zero, one];
    let dw: F1 = s(dv, I * 2.0 / (vi * vi));
    let dz: F1 = add(s(dv, -I * 2.0 * u / (vi * vi)), s(du, I * 2.0 / vi));
    let cal_a = add(dz, s(dw, etab));
    let r = (u - u.conj()) / (v - v.conj());
    let cal_b = add(du, s(dv, -r));
    let wp = wb / pp;

    let a = vec![vec![I * 2.0 / (vi * vi), -I * 2.0 * u / (vi * vi)], vec![zero, I * 2.0 / vi]];
    let a_inv = vec![vec![vi * (-I / 2.0) * vi, vi * (-I / 2.0) * u], vec![zero, vi * (-I / 2.0)]];
    let pre = I * 2.0 / (vi * vi);
    let da = [
        [s(dv, -pre * 2.0 / vi), s(add(s(du, -vi), s(dv, u * 2.0)), pre / vi)],
        [[zero, zero], s(dv, -pre)],
    ];
    let m = -one / vi;
    let aam = [[s(dv, m * 2.0), s(du, m)], [[zero, zero], s(dv, m)]];
    let conj = [
        [
            add(s(cal_a, (etab - u) * lam), s(dw, wp * 2.0)),
            s(add(s(cal_a, -(u - etab) * (u - etab) * lam), s(add(s(dw, u), dz), wp)), one / vi),
        ],
        [s(cal_a, vi * lam), add(s(cal_a, (u - etab) * lam), s(dw, wp))],
    ];
    let f = I / iota;
    let target = [
        [add(s(cal_b, -r * f), s(dv, I / y)), add(s(cal_b, -r * r * f), s(du, I / (2.0 * y)))],
        [s(cal_b, f), add(s(cal_b, r * f), s(dv, I / (2.0 * y)))],
    ];
    let identities = [
        diff(add(s(dw, wp * 2.0), s(dv, -2.0 / vi)), s(dv, I / y)),
        diff(s(du, I / (2.0 * y)), add(s(du, -one / vi), s(add(s(dw, u), dz), wp / vi))),
        diff(s(cal_b, f), s(cal_a, lam * vi)),
        diff(add(s(dw, wp), s(dv, -one / vi)), s(dv, I / (2.0 * y))),
    ];
    Closed { a, a_inv, da, aam, conj, target, identities }
}

/// Compares the transformation law evaluated by jets with the closed forms
/// and with the connection computed directly on the half-plane.
pub fn cayley_check(p: ModelParams, pt: &ChartPoint, tol: &Tolerances) -> Result<CayleyCheck> {
    let (v, u) = (pt.coords[0], pt.coords[1]);
    let c = closed(p, v, u);
    let disk = CatalogMetric::new(MetricId::Metrica, p);
    let half = CatalogMetric::new(MetricId::Kmb, p);
    let map = TransformMap::forward(Transform::Phi);
    let t = transform_connection(&disk, map, &pt.full(), tol)?;
    let direct = super::connection_matrix(&half, &pt.full(), tol)?.printed_layout();
    let target = mat(c.target);
    let sum: [[F1; 2]; 2] = std::array::from_fn(|i| std::array::from_fn(|j| add(c.conj[i][j], c.aam[i][j])));
    let block = |i: usize, j: usize, id: usize| {
        diff(sum[i][j], c.target[i][j])
            .max(c.identities[id])
            .max(t.total[i][j].iter().zip(&direct[i][j]).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    };
    Ok(CayleyCheck {
        residuals: vec![
            ("A", linalg::max_abs_diff(&t.a, &c.a)),
            ("A^-1", linalg::max_abs_diff(&t.a_inv, &c.a_inv)),
            ("dA", form_mat_diff(&t.da, &mat(c.da))),
            ("dA.A^-1", form_mat_diff(&t.inhomogeneous, &mat(c.aam))),
            ("A.M.A^-1", form_mat_diff(&t.conjugated, &mat(c.conj))),
            ("transformed", form_mat_diff(&t.total, &mat(sum))),
            ("direct", form_mat_diff(&t.total, &direct)),
            ("closed", form_mat_diff(&direct, &target)),
            ("11", block(0, 0, 0)),
            ("12", block(0, 1, 1)),
            ("21", block(1, 0, 2)),
            ("22", block(1, 1, 3)),
        ],
    })
}

/// The half-plane chart the check runs on.
pub const CHART: ChartId = ChartId::XJ1;
