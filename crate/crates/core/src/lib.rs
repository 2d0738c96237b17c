//! Unitary pseudonatural transformations between fibre functors on finite
//! groups, with the surrounding machinery: concrete pivotal dagger categories,
//! special Frobenius monoids, dagger bimodules and Morita equivalence.

pub mod bimodule;
pub mod cdagcat;
pub mod diagram;
pub mod error;
pub mod fixtures;
pub mod frobenius;
pub mod json;
pub mod matkernel;
pub mod par;
pub mod random;
pub mod repg;
pub mod report;
pub mod upt;

pub use error::{Error, Result};
pub use matkernel::{CMatrix, Tolerance, C64};
pub use report::{Report, Status};
