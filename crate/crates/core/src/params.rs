//! Representation parameters and the ratios derived from them.

use crate::error::{GeoError, Result};
use serde::{Deserialize, Serialize};

/// `k` indexes the discrete series, `ν` the Heisenberg part and `δ` the
/// weight of the extra fibre coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub k: f64,
    pub nu: f64,
    pub delta: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { k: 1.0, nu: 1.0, delta: 1.0 }
    }
}

impl ModelParams {
    pub fn new(k: f64, nu: f64, delta: f64) -> Result<Self> {
        let p = ModelParams { k, nu, delta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("k", self.k), ("nu", self.nu), ("delta", self.delta)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(GeoError::Parse(format!("parameter {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.k / 2.0
    }
    pub fn gamma(&self) -> f64 {
        self.nu
    }
    /// `ε = γ/α = 2ν/k`.
    pub fn eps(&self) -> f64 {
        2.0 * self.nu / self.k
    }
    /// `λ = ν/2k`.
    pub fn lambda(&self) -> f64 {
        self.nu / (2.0 * self.k)
    }
    /// `ι = k/ν`.
    pub fn iota(&self) -> f64 {
        self.k / self.nu
    }
    /// `τ = δ/γ`.
    pub fn tau(&self) -> f64 {
        self.delta / self.nu
    }

    /// Parses `k=2,nu=1,delta=0.5`; omitted keys keep their current values.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| GeoError::Parse(format!("expected key=value, got `{part}`")))?;
            let v: f64 = val.trim().parse().map_err(|_| GeoError::Parse(format!("bad number `{val}`")))?;
            match key.trim() {
                "k" => self.k = v,
                "nu" | "ν" => self.nu = v,
                "delta" | "δ" => self.delta = v,
                other => return Err(GeoError::UnknownId(other.to_string())),
            }
        }
        self.validate()?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn derived_ratios_consistent(k in 0.1f64..10.0, nu in 0.1f64..10.0) {
            let p = ModelParams::new(k, nu, 1.0).unwrap();
            prop_assert!((p.eps() * p.iota() - 2.0).abs() < 1e-12);
            prop_assert!((p.lambda() * p.iota() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(ModelParams::new(0.0, 1.0, 1.0).is_err());
        assert!(ModelParams::default().with_overrides("nu=-1").is_err());
        let p = ModelParams::default().with_overrides("k=2, delta=3").unwrap();
        assert_eq!((p.k, p.nu, p.delta), (2.0, 1.0, 3.0));
    }
}
