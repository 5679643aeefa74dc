//! Coherent-state mean-field treatment of the Dicke model.
//!
//! * [`hp_series`]: the truncated Poisson series `F(rho, j)` and its large-`j` limit.
//! * [`energy_surface`]: finite-`j` and thermodynamic energy surfaces, exact gradient.
//! * [`variational_solver`]: critical coupling, closed-form and numerical minima.
//! * [`exact_oracle`]: sparse exact diagonalization used to check the mean field.
//! * [`sweep_io`]: deterministic parallel parameter sweeps and CSV/JSON tables.
//!
//! The mean-field layers are generic over [`Scalar`]; the aliases below fix
//! them to `f64`.

// `!(x >= 0)` is used on purpose so NaN lands in the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod brent;
pub mod cli;
pub mod energy_surface;
pub mod error;
pub mod exact_oracle;
pub mod hp_series;
mod scalar;
pub mod spin;
pub mod sweep_io;
pub mod variational_solver;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use spin::Spin;

pub type ModelParams = energy_surface::ModelParams<f64>;
pub type VariationalPoint = energy_surface::VariationalPoint<f64>;
pub type GradientVector = energy_surface::GradientVector<f64>;
pub type MeanFieldSolution = variational_solver::MeanFieldSolution<f64>;
pub type MinimizerOptions = variational_solver::MinimizerOptions<f64>;
pub type SeriesEval = hp_series::SeriesEval<f64>;

pub type ModelParams32 = energy_surface::ModelParams<f32>;
pub type VariationalPoint32 = energy_surface::VariationalPoint<f32>;
pub type MeanFieldSolution32 = variational_solver::MeanFieldSolution<f32>;
