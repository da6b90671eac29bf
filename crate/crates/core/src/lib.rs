pub mod action;
pub mod cli;
pub mod connect;
pub mod error;
pub mod fieldlang;
pub mod geodesic;
pub mod geometry;
pub mod gpw;
pub mod obstruction;
pub mod optimize;
pub mod scenario;
pub mod spacetime;
pub mod tol;

pub use error::{Error, Result};
