pub mod decomposition;
pub mod diffqnn;
pub mod error;
pub mod experiment;
pub mod losses;
pub mod problems;
pub mod qsim;
pub mod runner;
pub mod quadrature;
pub mod training;

pub use error::{Error, Result};
