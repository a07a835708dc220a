#![no_std]
//! Exact symbolic summation over hypergeometric terms and nested harmonic sums.

extern crate alloc;

pub mod arith;
pub mod domain;
pub mod expr;
pub mod form;
pub mod gosper;
pub mod hyper;
pub mod indefinite;
pub mod pipeline;
pub mod recsolve;
pub mod sums;
pub mod zeilberger;
