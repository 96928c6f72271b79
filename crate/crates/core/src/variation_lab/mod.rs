//! Variation fields and families, finite-difference oracles, the conformal
//! deficit, closed-form Hessians and the conformal reparametrization solve.

pub mod family;
pub mod fd;
pub mod field;
pub mod griddiff;

pub use family::{Profile, Retraction, VariationFamily};
pub use fd::{fd_derivative, fd_derivative_with_step, fd_scalar, FdEstimate};
pub use field::{make_variation, make_variation_raw, FieldRecipe, ScalarRecipe, VariationField};
pub mod deficit;
pub use deficit::{conformal_deficit, verify_comparison, ComparisonRecord, DeficitField};
pub mod hessian;
pub mod reparam;
pub use hessian::{
    analytic_hessian, capillary_frame_a_nn, hessian_oracle, hessian_oracle_check, HessianCheck, HessianFormula,
    HessianParams, HessianValue, OracleValue,
};
pub use reparam::{solve_conformal_reparam, ConformalReparam, ReparamRecord};
