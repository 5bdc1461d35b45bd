//! Finite-volume-element solver for the nonlocal thermistor problem
//!
//! ```text
//! u_t − ∇·(k(u)∇u) = λ f(u) / (∫_Ω f(u) dx)²   in Ω × (0, T)
//! u = 0 on ∂Ω,   u(·, 0) = u₀
//! ```
//!
//! on a convex polygon. The solution is piecewise linear on a non-obtuse
//! triangulation; the equation is tested against indicators of the boxes of
//! the circumcenter dual mesh. Time stepping is backward Euler with a Picard
//! iteration that freezes `k` and the nonlocal source at the previous iterate.

// `!(x > 0.0)` is used deliberately so that NaN fails the guard.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod coefficients;
pub mod dual;
pub mod error;
pub mod field;
pub mod io;
pub mod linalg;
pub mod mesh;
pub mod operators;
pub mod solver;
pub mod verification;

pub use coefficients::{Coefficient, CoefficientModel, HypothesisConstants};
pub use dual::DualMesh;
pub use error::Error;
pub use field::{NodalField, QuadratureRule};
pub use mesh::{Mesh, MeshReport, Point};
