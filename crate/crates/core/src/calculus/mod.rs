//! Derivative, form and quadrature kernel.

pub mod field;
pub mod forms;
pub mod linalg;
pub mod number;
pub mod quad;

pub use field::{eval_at, fd_hessian, fd_jacobian, jacobian_at, jet_eval, Field, Gradient, Jet2};
pub use forms::{exterior_derivative, form_at, Exterior, FormField, FormValue, Sum, Wedge, ZeroForm};
pub use number::{c, lift, seed_dual, seed_jet, Dual, Jet, Number, Scalar, I};
pub use quad::{line_integral, surface_integral, Curve, Rule, Surface};
