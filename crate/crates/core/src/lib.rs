//! Finite-dimensional toolkit for linear relations, Stieltjes and inverse
//! Stieltjes families, and passive selfadjoint discrete-time systems.

pub mod cli;
pub mod error;
pub mod families;
pub mod linalg;
pub mod models;
pub mod relation;
pub mod sample;
pub mod systems;
pub mod transforms;

pub use error::{Error, Result};
pub use linalg::{CMatrix, Subspace, Tolerance};
pub use relation::{LinearRelation, SpaceSplit};
