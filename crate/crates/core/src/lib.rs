//! Exact tools for Jacobi-Lie bialgebras, their classical r-matrices and the
//! Jacobi structures they induce on low-dimensional groups.

pub mod bialgebra_catalog;
pub mod cli;
pub mod data;
pub mod error;
pub mod expoly;
pub mod exterior;
pub mod group_geom;
pub mod integrable;
pub mod jacobi_bracket;
pub mod lie_core;
pub mod linalg;
pub mod numeric;
pub mod rmatrix_solver;
pub mod scalar;
pub mod symexpr;

pub use error::{Error, Result};
