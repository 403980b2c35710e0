pub mod config;
pub mod discs;
pub mod error;
pub mod function;
pub mod estimates;
pub mod generator;
pub mod moments;
pub mod parse;
pub mod pde;
pub mod quadrature;
pub mod space;
pub mod suite;

pub use error::{Error, Result};
