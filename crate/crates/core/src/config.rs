//! Central numerical defaults.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute tolerance for unit-scale results.
    pub abs: f64,
    /// Relative tolerance otherwise.
    pub rel: f64,
    /// Condition number above which a metric or Jacobian counts as singular.
    pub max_cond: f64,
    /// Central finite-difference step used by the oracle.
    pub fd_step: f64,
    /// Relative agreement demanded between jets and finite differences.
    pub fd_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { abs: 1e-9, rel: 1e-8, max_cond: 1e12, fd_step: 1e-5, fd_rel: 1e-6 }
    }
}

/// Normalisation of the Kähler two-form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwoFormConvention {
    /// `ω = i Σ h dz∧dz̄`.
    #[default]
    Full,
    /// `ω = (i/2) Σ h dz∧dz̄`.
    Half,
}

impl TwoFormConvention {
    pub fn factor(self) -> f64 {
        match self {
            TwoFormConvention::Full => 1.0,
            TwoFormConvention::Half => 0.5,
        }
    }
}

/// Relation between line-bundle curvature and the Kähler form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum HolonomyConvention {
    /// `Ω_L = −iω`.
    #[default]
    OneW,
    /// `Ω_L = −2iω`.
    TwoW,
}

impl HolonomyConvention {
    pub fn factor(self) -> f64 {
        match self {
            HolonomyConvention::OneW => 1.0,
            HolonomyConvention::TwoW => 2.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumConfig {
    pub tol: Tolerances,
    /// Gauss–Legendre nodes per segment.
    pub nodes: usize,
    /// Segments per unit parameter interval.
    pub segments: usize,
    /// RK4 step.
    pub step: f64,
    pub two_form: TwoFormConvention,
    pub holonomy: HolonomyConvention,
}

impl Default for NumConfig {
    fn default() -> Self {
        NumConfig {
            tol: Tolerances::default(),
            nodes: 64,
            segments: 1,
            step: 1e-3,
            two_form: TwoFormConvention::Full,
            holonomy: HolonomyConvention::OneW,
        }
    }
}
