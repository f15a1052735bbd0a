//! Moisil-Theodoresco operator, its right-acting variant, and the derived
//! second-order operators (scalar, vector, quaternionic and Bitsadze-type
//! Laplacians, Lamé-Navier) in orthogonal curvilinear coordinates.
//!
//! Fields are quaternion-valued with complex components, written in the
//! local frame `u1, u2, u3` of a [`geometry::Chart`]. Derivatives are exact
//! (symbolic, via [`expr`]) by default; finite differences are available as a
//! cross-check mode.

pub mod expr;
pub mod geometry;
pub mod harness;
pub mod operators;
pub mod quat;

pub use expr::{parse, Expr};
pub use quat::{ComplexScalar, Quaternion};
