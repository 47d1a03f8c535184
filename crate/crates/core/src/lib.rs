//! Ground-state quantum kernels and the kernel Alphatron for quantum phase
//! recognition on spin chains.

// `!(x > 0.0)` style guards deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alphatron;
pub mod error;
pub mod kernel;
pub mod observables;
pub mod pauli;
pub mod ptdist;
pub mod rng;
pub mod shadows;
pub mod statevec;
pub mod varcirc;

pub use error::{Error, Result};
