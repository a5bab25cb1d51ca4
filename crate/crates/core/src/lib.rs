//! Numerics for pseudo-processes driven by `∂u/∂t = κ_N ∂^N u/∂x^N`.
//!
//! The crate evaluates the fundamental kernel and its λ-potentials, the joint laws
//! of the process with its running maximum or minimum, first hitting times with the
//! multipole (Dirac-derivative) structure of the hitting place, and a signed-lattice
//! dynamic program that serves as a brute-force oracle for the transform formulas.

pub mod algebra;
pub mod error;
pub mod extrema;
pub mod hitting;
pub mod inversion;
pub mod kernel;
pub mod lattice;
pub mod verify;

pub use algebra::{build_root_system, cardinalities, Half, ParamSet, RootSystem};
pub use error::{Error, Result};
