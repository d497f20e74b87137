//! Certified measures of balls and cones for fractal measures.
//!
//! The crate is `no_std` with `alloc`. Enable the `std` feature to get
//! `std::error::Error` impls through the dependencies.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod constructions;
pub mod dimension;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod math;
pub mod packing;
pub mod refinable;
pub mod rng;
pub mod symbolic;

pub use error::{Error, Result};
