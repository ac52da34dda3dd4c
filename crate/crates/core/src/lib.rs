// `!(x >= 0.0)` style checks are deliberate: they reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entropy;
pub mod linalg;
pub mod states;
pub mod measures;
pub mod bounds;
pub mod harness;
