//! Equations of motion of the linear Hamiltonian plus a κ-term on the
//! extended half-plane `(x, y, q, p, κ)`.

use super::{integrate, Trajectory};
use crate::berry::energy::LinearHamiltonian;
use crate::error::{GeoError, Result};
use crate::params::ModelParams;
use std::fmt;
use std::sync::Arc;

/// The scalar `h(κ)` added to the energy, with its derivative.
#[derive(Clone, Default)]
pub enum KappaTerm {
    #[default]
    Zero,
    /// `Σ c_i κ^i`.
    Poly(Vec<f64>),
    /// `κ ↦ (h(κ), h′(κ))`.
    Custom(Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>),
}

impl fmt::Debug for KappaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KappaTerm::Zero => write!(f, "Zero"),
            KappaTerm::Poly(c) => write!(f, "Poly({c:?})"),
            KappaTerm::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl KappaTerm {
    /// Comma-separated polynomial coefficients, constant first.
    pub fn parse(spec: &str) -> Result<Self> {
        let c = spec
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|_| GeoError::Parse(format!("bad number `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(if c.iter().all(|&v| v == 0.0) { KappaTerm::Zero } else { KappaTerm::Poly(c) })
    }

    /// `(h, h′)` at `κ`.
    pub fn eval(&self, kappa: f64) -> (f64, f64) {
        match self {
            KappaTerm::Zero => (0.0, 0.0),
            KappaTerm::Poly(c) => c.iter().rev().fold((0.0, 0.0), |(h, dh), &ci| (h * kappa + ci, dh * kappa + h)),
            KappaTerm::Custom(f) => f(kappa),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct HamiltonianSpec {
    pub linear: LinearHamiltonian,
    pub kappa: KappaTerm,
}

impl HamiltonianSpec {
    pub fn new(linear: LinearHamiltonian, kappa: KappaTerm) -> Self {
        HamiltonianSpec { linear, kappa }
    }

    /// `ℋ(q, p) + ℋ(x, y) + h(κ)` at `[x, y, q, p, κ]`.
    pub fn energy(&self, params: &ModelParams, s: &[f64]) -> Result<f64> {
        Ok(self.linear.energy(params, &s[..4])? + self.kappa.eval(s[4]).0)
    }
}

fn check(s: &[f64]) -> Result<()> {
    if s.len() != 5 {
        return Err(GeoError::Parse(format!("expected (x, y, q, p, kappa), got {} values", s.len())));
    }
    if s[1] <= 0.0 || !s.iter().all(|v| v.is_finite()) {
        return Err(GeoError::domain("XJ1-ext", "y <= 0"));
    }
    Ok(())
}

/// `(ẋ, ẏ, q̇, ṗ, κ̇)`, with `κ̇` from its unexpanded form.
pub fn hamilton_eom_extended(spec: &HamiltonianSpec, params: &ModelParams, s: &[f64]) -> Result<[f64; 5]> {
    check(s)?;
    let LinearHamiltonian { a, b, c, m, n } = spec.linear;
    let [x, y, q, p] = [s[0], s[1], s[2], s[3]];
    let dh = spec.kappa.eval(s[4]).1;
    let nu = params.nu;
    Ok([
        (c + m) * (y * y - x * x) + 2.0 * n * x - c + m,
        -2.0 * y * ((c + m) * x - n),
        (c - m) * p - q * n + b - q / (2.0 * nu) * dh,
        -(m + c) * q + n * p - a - p / (2.0 * nu) * dh,
        kappa_primary(spec, params, s)?,
    ])
}

fn kappa_primary(spec: &HamiltonianSpec, params: &ModelParams, s: &[f64]) -> Result<f64> {
    let LinearHamiltonian { a, b, c, m, n } = spec.linear;
    let (q, p) = (s[2], s[3]);
    Ok((c + m) * q * q + (c - m) * p * p + a * q + b * p - 2.0 * n * p * q - spec.energy(params, s)? / params.delta.sqrt())
}

/// The `κ̇` expansion with the coefficients given: `w` multiplies `aq + bp`
/// inside `1 − w/√δ`, and `x_term` is the coefficient of `k x/(√δ y)`.
fn kappa_expanded(spec: &HamiltonianSpec, params: &ModelParams, s: &[f64], w: f64, x_term: f64) -> f64 {
    let LinearHamiltonian { a, b, c, m, n } = spec.linear;
    let [x, y, q, p] = [s[0], s[1], s[2], s[3]];
    let ModelParams { k, nu, delta } = *params;
    let sd = delta.sqrt();
    let r = 1.0 - nu / sd;
    (m + c) * (r * q * q - k / sd * (x * x + y * y) / y) + (c - m) * (r * p * p - k / (sd * y)) - 2.0 * r * n * p * q
        + (1.0 - w / sd) * (a * q + b * p)
        + x_term * k * x / (sd * y)
        - spec.kappa.eval(s[4]).0 / sd
}

/// The three forms of `κ̇` at one point.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct KappaLines {
    /// From `q, p` and the total energy.
    pub primary: f64,
    /// The published expansion.
    pub expanded_printed: f64,
    /// Expansion of the primary form.
    pub expanded_derived: f64,
}

impl KappaLines {
    pub fn printed_gap(&self) -> f64 {
        (self.primary - self.expanded_printed).abs()
    }
    pub fn derived_gap(&self) -> f64 {
        (self.primary - self.expanded_derived).abs()
    }
}

/// Evaluates `κ̇` from the primary line and both expansions. The published
/// expansion reads `1 − 2/√δ` on `aq + bp` and `−2k x/(√δ y)`; expanding
/// the primary line gives `1 − 2ν/√δ` and `+2kn x/(√δ y)`.
pub fn kappa_dot_lines(spec: &HamiltonianSpec, params: &ModelParams, s: &[f64]) -> Result<KappaLines> {
    check(s)?;
    let n = spec.linear.n;
    Ok(KappaLines {
        primary: kappa_primary(spec, params, s)?,
        expanded_printed: kappa_expanded(spec, params, s, 2.0, -2.0),
        expanded_derived: kappa_expanded(spec, params, s, 2.0 * params.nu, 2.0 * n),
    })
}

/// RK4 flow of [`hamilton_eom_extended`].
pub fn integrate_flow(spec: &HamiltonianSpec, params: &ModelParams, s0: &[f64], t_max: f64, step: f64) -> Result<Trajectory<f64>> {
    integrate(
        |_, s: &[f64]| hamilton_eom_extended(spec, params, s).map(|d| d.to_vec()),
        check,
        0.0,
        s0.to_vec(),
        t_max,
        step,
    )
}
