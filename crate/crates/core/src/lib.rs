//! Solution functions of parametric linear and quadratic programs, treated
//! as composable computational units.

pub mod dc;
pub mod gadgets;
pub mod linalg;
pub mod mp;
pub mod lp;
pub mod net;
pub mod recon;
pub mod scalar;
pub mod target;
pub mod taylor;

pub use scalar::Scalar;

pub type LinearProgramF64 = lp::LinearProgram<f64>;
pub type LinearProgramF32 = lp::LinearProgram<f32>;
pub type QuadraticProgramF64 = lp::QuadraticProgram<f64>;
pub type QuadraticProgramF32 = lp::QuadraticProgram<f32>;
pub type NetworkF64 = net::SolutionNetwork<f64>;
pub type NetworkF32 = net::SolutionNetwork<f32>;
