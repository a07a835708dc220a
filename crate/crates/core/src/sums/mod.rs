//! Harmonic sums and S-sums: conversion, quasi-shuffle algebra and basis reduction.

mod algebra;
mod basis;
mod canon;
mod convert;

pub use algebra::{harmonic_word, quasi_shuffle, synchronize, weight, word_value, Letter, SumMonomial, SumPoly, Word};
pub use basis::{constant_poly, is_lyndon, lyndon_factors, reduce_to_basis, BasisError, BasisReport};
pub use canon::{chain_as_word, form_to_sumpoly, to_basis_form};
pub use convert::{partial_fractions, rational_to_harmonic, PartialFractions};
