#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod cli;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod kernels;
pub mod lab;
pub mod linalg;
pub mod quadrature;
pub mod sampler;
pub mod sobolev;
pub mod special;

pub use error::{Error, Result};
pub use kernels::Hurst;
