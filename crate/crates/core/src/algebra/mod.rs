//! Exact algebra over the network matrices: `T = (I - G)^-1`, `S = T^-1`,
//! chain expansions and structural-zero relations.

pub mod chain;
pub mod linalg;
pub mod network;

pub use chain::{chain_expand, zero_constraint, ChainExpansion, Monomial, ZeroConstraint};
pub use linalg::Matrix;
pub use network::{compute_m, compute_s, compute_t, compute_t_by_columns, sample_weight, GMatrix, TMatrix, UnitLower};
