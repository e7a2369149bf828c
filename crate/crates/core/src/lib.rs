pub mod analytic;
pub mod btp;
pub mod error;
pub mod experiments;
pub mod fpp;
pub mod hypercube;
pub mod quadrature;
pub mod rng;
pub mod walks;

pub use error::{Error, Result};
