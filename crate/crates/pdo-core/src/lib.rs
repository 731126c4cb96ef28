//! Desk-scale numerical laboratory for pseudodifferential operator calculus
//! with limited-smoothness (Hölder) symbols on periodic lattices.

pub mod cmat;
pub mod dyadic;
pub mod error;
pub mod fd;
pub mod fredholm;
pub mod grid;
pub mod calculus;
pub mod linalg;
pub mod oscint;
pub mod seminorm;
pub mod spaces;
pub mod symbol;

pub use error::{Error, Result};
