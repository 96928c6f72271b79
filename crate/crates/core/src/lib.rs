//! Numerical laboratory for the stability of capillary surfaces of constant
//! mean curvature in flat regions of ℝ³.

pub mod error;
pub mod geometry;
pub mod jet;
pub mod quadrature;

pub use error::{Error, Result};
pub mod functionals;
pub mod variation_lab;
pub mod spectral;
pub mod bounds;
pub mod cli;
