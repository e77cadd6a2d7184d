pub mod cli;
pub mod coupling;
pub mod error;
pub mod fock;
pub mod io;
pub mod geometry;
pub mod modes;
pub mod pv;
pub mod quadrature;
pub mod tensor;

pub use error::{Error, Result};
