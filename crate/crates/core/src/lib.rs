//! Computational differential geometry of the Jacobi-group homogeneous
//! spaces: Siegel–Jacobi disk and upper half-plane, their extension, and
//! the classical comparison spaces.

pub mod berry;
pub mod calculus;
pub mod charts;
pub mod config;
pub mod connections;
pub mod cosymplectic;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod metrics;
pub mod params;

pub use calculus::{Jet2, Number, Scalar};
pub use charts::{ChartId, ChartPoint};
pub use config::NumConfig;
pub use error::{GeoError, Result};
pub use params::ModelParams;
