//! Energy function of the linear Hamiltonian in the Jacobi-algebra
//! generators, on `(x, y, q, p)`.

use crate::error::{GeoError, Result};
use crate::params::ModelParams;
use serde::{Deserialize, Serialize};

/// Real coefficients `ε_a = a + ib`, `ε₊ = m − in`, `ε₀ = 2c`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LinearHamiltonian {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub m: f64,
    pub n: f64,
}

impl LinearHamiltonian {
    /// Parses `a=..,b=..,c=..,m=..,n=..`; missing coefficients are zero.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut h = LinearHamiltonian::default();
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| GeoError::Parse(format!("expected name=value, got `{part}`")))?;
            let v: f64 = v.trim().parse().map_err(|_| GeoError::Parse(format!("bad number `{v}`")))?;
            match k.trim() {
                "a" => h.a = v,
                "b" => h.b = v,
                "c" => h.c = v,
                "m" => h.m = v,
                "n" => h.n = v,
                other => return Err(GeoError::UnknownId(other.into())),
            }
        }
        Ok(h)
    }

    pub fn fibre(&self, p: &ModelParams, q: f64, pp: f64) -> f64 {
        let LinearHamiltonian { a, b, c, m, n } = *self;
        p.nu * ((m + c) * q * q + (c - m) * pp * pp - 2.0 * n * q * pp + 2.0 * (a * q + b * pp))
    }

    pub fn base(&self, p: &ModelParams, x: f64, y: f64) -> Result<f64> {
        if y <= 0.0 {
            return Err(GeoError::domain("XJ1-real", "y <= 0"));
        }
        let LinearHamiltonian { c, m, n, .. } = *self;
        Ok(p.k / y * ((m + c) * (x * x + y * y) - 2.0 * (n * x + c * y) + c - m) + 2.0 * p.k * c)
    }

    /// `ℋ = ℋ(q, p) + ℋ(x, y)` at `[x, y, q, p]`.
    pub fn energy(&self, p: &ModelParams, v: &[f64]) -> Result<f64> {
        Ok(self.base(p, v[0], v[1])? + self.fibre(p, v[2], v[3]))
    }

    /// `(∂_x, ∂_y, ∂_q, ∂_p) ℋ`.
    pub fn gradient(&self, p: &ModelParams, v: &[f64]) -> Result<[f64; 4]> {
        let [x, y, q, pp] = [v[0], v[1], v[2], v[3]];
        if y <= 0.0 {
            return Err(GeoError::domain("XJ1-real", "y <= 0"));
        }
        let LinearHamiltonian { a, b, c, m, n } = *self;
        let k = p.k;
        Ok([
            2.0 * k / y * ((m + c) * x - n),
            k / (y * y) * ((m + c) * (y * y - x * x) + m - c + 2.0 * n * x),
            2.0 * p.nu * ((m + c) * q - n * pp + a),
            2.0 * p.nu * ((c - m) * pp - n * q + b),
        ])
    }

    /// The gradient as published, with `+np` and `+nq` in the fibre terms.
    pub fn printed_gradient(&self, p: &ModelParams, v: &[f64]) -> Result<[f64; 4]> {
        let mut g = self.gradient(p, v)?;
        let LinearHamiltonian { n, .. } = *self;
        g[2] += 4.0 * p.nu * n * v[3];
        g[3] += 4.0 * p.nu * n * v[2];
        Ok(g)
    }
}

/// `φ_D = −∫ ℋ dt` over samples `(t, [x, y, q, p])` by the trapezoidal rule.
pub fn dynamical_phase(h: &LinearHamiltonian, p: &ModelParams, samples: &[(f64, Vec<f64>)]) -> Result<f64> {
    let mut acc = 0.0;
    for w in samples.windows(2) {
        let (t0, v0) = &w[0];
        let (t1, v1) = &w[1];
        acc += 0.5 * (t1 - t0) * (h.energy(p, v0)? + h.energy(p, v1)?);
    }
    Ok(-acc)
}
