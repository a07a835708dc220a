//! Exact arithmetic: rationals, univariate and multivariate polynomials,
//! rational functions and linear algebra over fields.

pub mod linalg;
pub mod mpoly;
pub mod mratfunc;
pub mod poly;
pub mod ratfunc;
pub mod rational;
pub mod symbol;

pub use mpoly::{mpoly_gcd, mpoly_lcm, MPoly, Monomial};
pub use mratfunc::MRatFunc;
pub use poly::{
    dispersion, integer_roots, interpolate, poly_gcd, rational_roots, resultant, shift_set, Polynomial,
};
pub use ratfunc::{rf_normalize, RationalFunction};
pub use rational::{int, rat, Rational};
pub use symbol::{sym, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("division by zero")]
    DivisionByZero,
}
