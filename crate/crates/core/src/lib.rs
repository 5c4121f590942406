#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod finite_decomp;
pub mod group;
pub mod linalg;
pub mod quadrature;
pub mod rankings;
pub mod rng;
pub mod starshaped;
pub mod stats;
pub mod verify;
pub mod wishart;
