//! Exact-arithmetic moduli computations for formal affine homogeneous
//! structures: connection–curvature–torsion triples over Q, their
//! stabilizer filtrations and Singer invariant, membership tests for the
//! moduli space (with torsion-free, reductive and 𝔨-restricted variants),
//! skew-algebra assembly, Spencer cohomology of the stabilizer comodule,
//! SU(n) model structures and the tridiagonal example family.
//!
//! All arithmetic is exact rational; every verdict is a precise algebraic
//! statement, never a numerical approximation.

// index-based loops are kept where they mirror the tensor index
// conventions (slot positions carry mathematical meaning)
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod families;
pub mod filtration;
pub mod io;
pub mod kstructures;
pub mod matrix;
pub mod rat;
pub mod skew;
pub mod spencer;
pub mod subspace;
pub mod tensor;
pub mod triple;

pub use error::{Error, Result};
pub use matrix::{wedge_to_endo, Matrix};
pub use rat::Rat;
pub use subspace::Subspace;
pub use tensor::{circledast, multi_indices, pullback_tensor, star_action, Tensor, ValueKind};
pub use triple::{Component, Triple};
