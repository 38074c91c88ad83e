//! Index computations for linear Hamiltonian and Morse–Sturm systems on the
//! real line and on half-lines.
//!
//! The numerical core is generic over the scalar type (`f32` or `f64`) through
//! [`Real`]. The aliases at the crate root fix the scalar to `f64`, which is
//! what the certified tolerances are calibrated for.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expr;
pub mod hamiltonian;
pub mod index;
pub mod linalg;
pub mod maslov;
pub mod problem;
pub mod random;
mod scalar;
pub mod sturm_liouville;
pub mod symplectic;
mod tolerances;
pub mod verify;

pub use error::{Error, Result};
pub use index::{hormander_index, hormander_index_dual, q_form, triple_index, InertiaTriple};
pub use scalar::Real;
pub use symplectic::{graph_matrix, intersect, is_transversal, omega, standard_j};
pub use tolerances::Tolerances;

pub type Frame = symplectic::LagrangianFrame<f64>;
pub type Tol = Tolerances<f64>;
pub type Structure = symplectic::SymplecticStructure<f64>;
pub type Intersection = symplectic::SubspaceIntersection<f64>;
pub type Form = index::QForm<f64>;
pub type Path = maslov::LagrangianPath<f64>;
pub type Maslov = maslov::MaslovResult<f64>;
pub type System = hamiltonian::CoefficientSystem<f64>;
pub type Bundle = hamiltonian::InvariantBundle<f64>;
pub type Operator = sturm_liouville::DiscreteOperator<f64>;
pub type Config = verify::VerifyConfig<f64>;
pub type Problem = problem::ProblemSpec;
