//! Best-conditioned square submatrices of semi-orthogonal matrices.
//!
//! For every `n×k` matrix with orthonormal columns there is a `k×k` row
//! submatrix whose smallest singular value is at least `1/√n`, or so it is
//! conjectured. This crate provides:
//!
//! - [`stiefel`]: exhaustive best-submatrix selection, Haar sampling and
//!   principal angles;
//! - [`worstcase`]: a minimax search for subspaces that make the best
//!   submatrix as bad as possible;
//! - [`pluecker`], [`csdecomp`] and [`certify`]: the machinery for the
//!   `4×2` case, where the bound `1/2` is sharp, and a numerical
//!   certificate of each step of that argument.

pub mod certify;
pub mod csdecomp;
pub mod error;
pub mod json;
pub mod matrix;
pub mod pluecker;
pub mod stiefel;
pub mod worstcase;

pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use stiefel::StiefelMatrix;
