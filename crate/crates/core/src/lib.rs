//! Verification and simulation toolkit for diffusive Lotka–Volterra systems
//!
//! `λ_i ∂_t u_i = ∂_xx u_i + u_i (a_i + Σ_j b_ij u_j)`.
//!
//! The crate provides the model type with exact rational coefficients, a
//! catalog of closed-form solutions with analytic jets, symmetry operators and
//! their flows, ansatz reductions to ODE systems, a tanh-expansion solver for
//! front coefficients and a method-of-lines simulator.

pub mod error;
pub mod io;
pub mod model;
pub mod ode;
pub mod quadrature;
pub mod reduction;
pub mod simulate;
pub mod solutions;
pub mod symmetry;
pub mod tanh_engine;
pub mod value;

pub use error::*;
pub use model::{DlvModel, JetPoint};
pub use solutions::{instantiate, ClosedFormSolution, PdeField, SolutionId};
pub use value::Value;
