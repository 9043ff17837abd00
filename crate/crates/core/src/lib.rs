//! Construction, verification and linearization of matrix-valued holomorphic
//! semicocycles over one-parameter semigroups on the unit disk.

pub mod algebra;
pub mod cocycle;
pub mod demos;
pub mod dynamics;
pub mod error;
pub mod linearize;
pub mod ode;
pub mod quad;
pub mod scenario;
pub mod series;

pub use algebra::{CMatrix, C64};
pub use error::{Error, Result};
