//! Reduced quotients of univariate polynomials.

use core::fmt;

use num_traits::{One, Zero};

use super::poly::{poly_gcd, Polynomial};
use super::rational::Rational;
use super::ArithError;

/// `num / den` with `gcd(num, den) = 1` and `den` monic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

/// Reduces `num / den` to lowest terms with a monic denominator.
pub fn rf_normalize(num: Polynomial, den: Polynomial) -> Result<RationalFunction, ArithError> {
    if den.is_zero() {
        return Err(ArithError::DivisionByZero);
    }
    if num.is_zero() {
        return Ok(RationalFunction {
            den: Polynomial::one(num.var()),
            num,
        });
    }
    let g = poly_gcd(&num, &den);
    let num = num.exact_div(&g).expect("gcd divides numerator");
    let den = den.exact_div(&g).expect("gcd divides denominator");
    let lc = den.lc().recip();
    Ok(RationalFunction {
        num: num.scale(&lc),
        den: den.scale(&lc),
    })
}

impl RationalFunction {
    pub fn from_poly(p: Polynomial) -> Self {
        let var = p.var();
        RationalFunction {
            num: p,
            den: Polynomial::one(var),
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational, ArithError> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(self.num.eval(x) / d)
    }

    pub fn add(&self, o: &Self) -> Self {
        rf_normalize(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
        .expect("nonzero denominators")
    }

    pub fn mul(&self, o: &Self) -> Self {
        rf_normalize(&self.num * &o.num, &self.den * &o.den).expect("nonzero denominators")
    }

    pub fn is_one(&self) -> bool {
        self.den.is_constant() && self.num.is_constant() && self.num.lc().is_one()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        (self.num.is_constant() && self.den.is_constant())
            .then(|| if self.num.is_zero() { Rational::zero() } else { self.num.lc() / self.den.lc() })
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
