//! Multilevel lifting wavelets on dyadic grids of `[0, 1]` built from
//! piecewise-polynomial Lagrange elements of arbitrary order.
//!
//! Each level splits the nodal values into coarse and surplus nodes, predicts
//! the surplus values by order-`q` Lagrange interpolation, and updates the
//! coarse values so that they hold the nodal values of a projection onto the
//! coarse space. Three projector families are provided:
//!
//! * [`ProjectorKind::Interpolation`]: no update (hierarchical basis).
//! * [`ProjectorKind::Cg`]: global L2-orthogonal projection; dense update
//!   applied through a banded Gram solve, globally supported wavelets.
//! * [`ProjectorKind::Dg`]: element-wise L2 projection followed by nodal
//!   averaging; block-sparse update, compactly supported wavelets.
//!
//! Order zero with either stable projector reproduces the orthogonal Haar
//! basis. On top of the 1D transform the crate provides tensor-product
//! transforms (fully separable and level-by-level), cascade evaluation of
//! primal and dual basis functions, and a threshold codec with a compact
//! binary format.

pub mod basis;
pub mod blockops;
pub mod codec;
pub mod commands;
pub mod error;
pub mod gram;
pub mod lifting;
pub mod grid;
pub mod predictor;
pub mod quadrature;
pub mod selftest;
pub mod tensor;
pub mod update;

pub use blockops::{BandedSpdMatrix, DenseMatrix, IndexSets};
pub use error::{Error, Result};
pub use grid::{CoefficientPyramid, GridHierarchy};
pub use lifting::TransformPlan;
pub use tensor::{Ordering, TensorArray, TensorTransform};
pub use update::{ProjectorKind, UpdateMatrix};
