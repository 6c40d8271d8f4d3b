#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod numeric;
pub mod oracle;
pub mod problems;
pub mod prox;
pub mod schedules;
pub mod solvers;
pub mod harness;
