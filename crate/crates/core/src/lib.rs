#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)] // NaN-rejecting guards are written as !(a <= b)
extern crate alloc;

pub mod error;
pub mod linalg;
pub mod qobjects;
pub mod random;
pub mod distances;
pub mod noise;
pub mod ensembles;
pub mod montecarlo;

pub use error::{Error, Result};
