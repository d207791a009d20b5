#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod besseen;
pub mod cli;
pub mod config;
pub mod constants;
pub mod distributions;
pub mod enumeration;
pub mod error;
pub mod exec;
pub mod mc;
pub mod quadrature;
pub mod renewal;
pub mod special_fn;
pub mod stein;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
