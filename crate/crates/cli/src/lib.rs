//! Command line support for conical-core: system files, CSV tables,
//! configuration and the experiments E1–E11.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod sysfile;
pub mod table;
