//! Excitation and measurement pattern (EMP) design for dynamic networks whose
//! topology is a directed acyclic graph.
//!
//! The numeric core is generic over a [`Scalar`] field. Exact rational
//! arithmetic is the default for every oracle and synthesis routine; `f64`
//! and `f32` are available for the algebra layer.

pub mod algebra;
pub mod emp;
pub mod error;
pub mod graph;
pub mod networks;
pub mod scalar;
pub mod synthesis;
pub mod verify;

pub use emp::{cardinality_bounds, check_necessary, CardinalityBounds, Emp, NecessityReport};
pub use error::{AlgebraError, EmpError, GraphError, SynthesisError, VerifyError};
pub use graph::{classify, topological_relabel, validate_dag, Dag, NodeClassification, RawGraph};
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub type ExactGMatrix = algebra::GMatrix<Rational>;
pub type ExactTMatrix = algebra::TMatrix<Rational>;
pub type FloatGMatrix = algebra::GMatrix<f64>;
pub type FloatTMatrix = algebra::TMatrix<f64>;
