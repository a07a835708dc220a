//! Multivariate rational functions over the rationals in reduced form.

use alloc::collections::{BTreeMap, BTreeSet};
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::mpoly::{mpoly_gcd, MPoly};
use super::rational::Rational;
use super::{ArithError, Symbol};

/// `num / den` with `gcd(num, den) = 1` and `den` of leading coefficient 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MRatFunc {
    num: MPoly,
    den: MPoly,
}

impl MRatFunc {
    pub fn new(num: MPoly, den: MPoly) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(MRatFunc::zero());
        }
        if let Some(c) = den.constant_value() {
            return Ok(MRatFunc { num: num.scale(&c.recip()), den: MPoly::one() });
        }
        let g = mpoly_gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let l = den.lc().recip();
        Ok(MRatFunc { num: num.scale(&l), den: den.scale(&l) })
    }

    pub fn zero() -> Self {
        MRatFunc { num: MPoly::zero(), den: MPoly::one() }
    }

    pub fn one() -> Self {
        MRatFunc::from_poly(MPoly::one())
    }

    pub fn constant(c: Rational) -> Self {
        MRatFunc::from_poly(MPoly::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        MRatFunc::from_poly(MPoly::from_int(n))
    }

    pub fn var(s: Symbol) -> Self {
        MRatFunc::from_poly(MPoly::var(s))
    }

    pub fn from_poly(p: MPoly) -> Self {
        MRatFunc { num: p, den: MPoly::one() }
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.num.contains(s) || self.den.contains(s)
    }

    pub fn inv(&self) -> Result<Self, ArithError> {
        MRatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        MRatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, e: i64) -> Result<Self, ArithError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        Ok(MRatFunc { num: base.num.pow(k), den: base.den.pow(k) })
    }

    pub fn subst(&self, s: Symbol, value: &MRatFunc) -> Result<Self, ArithError> {
        if !self.contains(s) {
            return Ok(self.clone());
        }
        let n = subst_poly(&self.num, s, value);
        let d = subst_poly(&self.den, s, value);
        n.checked_div(&d)
    }

    /// Replaces `s` by `s + h`.
    pub fn shift(&self, s: Symbol, h: i64) -> Self {
        if !self.contains(s) || h == 0 {
            return self.clone();
        }
        let v = &MPoly::var(s) + &MPoly::from_int(h);
        let num = self.num.subst(s, &v);
        let den = self.den.subst(s, &v);
        MRatFunc { num, den }.renormalize_den()
    }

    fn renormalize_den(self) -> Self {
        let l = self.den.lc().recip();
        MRatFunc { num: self.num.scale(&l), den: self.den.scale(&l) }
    }

    pub fn eval_partial(&self, env: &BTreeMap<Symbol, Rational>) -> Result<Self, ArithError> {
        MRatFunc::new(self.num.eval_partial(env), self.den.eval_partial(env))
    }

    /// Full evaluation; `Ok(None)` when some variable is unbound.
    pub fn eval(&self, env: &BTreeMap<Symbol, Rational>) -> Result<Option<Rational>, ArithError> {
        let (Some(n), Some(d)) = (self.num.eval(env), self.den.eval(env)) else {
            return Ok(None);
        };
        if d.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Some(n / d))
    }

    pub fn checked_div(&self, rhs: &MRatFunc) -> Result<Self, ArithError> {
        if rhs.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(self * &rhs.inv()?)
    }
}

fn subst_poly(p: &MPoly, s: Symbol, value: &MRatFunc) -> MRatFunc {
    let coeffs = p.to_univariate(s);
    let mut acc = MRatFunc::zero();
    for c in coeffs.iter().rev() {
        acc = &(&acc * value) + &MRatFunc::from_poly(c.clone());
    }
    acc
}

impl From<MPoly> for MRatFunc {
    fn from(p: MPoly) -> Self {
        MRatFunc::from_poly(p)
    }
}

impl From<Rational> for MRatFunc {
    fn from(c: Rational) -> Self {
        MRatFunc::constant(c)
    }
}

impl Add for &MRatFunc {
    type Output = MRatFunc;
    fn add(self, rhs: &MRatFunc) -> MRatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return MRatFunc::new(&self.num + &rhs.num, self.den.clone()).expect("nonzero den");
        }
        if self.den.is_one() {
            return MRatFunc::new(&(&self.num * &rhs.den) + &rhs.num, rhs.den.clone()).expect("nonzero den");
        }
        if rhs.den.is_one() {
            return MRatFunc::new(&self.num + &(&rhs.num * &self.den), self.den.clone()).expect("nonzero den");
        }
        let g = mpoly_gcd(&self.den, &rhs.den);
        let a = self.den.div_exact(&g).expect("gcd divides");
        let b = rhs.den.div_exact(&g).expect("gcd divides");
        let num = &(&self.num * &b) + &(&rhs.num * &a);
        MRatFunc::new(num, &a * &rhs.den).expect("nonzero den")
    }
}

impl Sub for &MRatFunc {
    type Output = MRatFunc;
    fn sub(self, rhs: &MRatFunc) -> MRatFunc {
        self + &(-rhs)
    }
}

impl Mul for &MRatFunc {
    type Output = MRatFunc;
    fn mul(self, rhs: &MRatFunc) -> MRatFunc {
        if self.is_zero() || rhs.is_zero() {
            return MRatFunc::zero();
        }
        if let Some(c) = rhs.constant_value() {
            return self.scale(&c);
        }
        if let Some(c) = self.constant_value() {
            return rhs.scale(&c);
        }
        let g1 = mpoly_gcd(&self.num, &rhs.den);
        let g2 = mpoly_gcd(&rhs.num, &self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = rhs.den.div_exact(&g1).expect("gcd divides");
        let n2 = rhs.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        MRatFunc { num: &n1 * &n2, den: &d1 * &d2 }.renormalize_den()
    }
}

impl Div for &MRatFunc {
    type Output = MRatFunc;
    fn div(self, rhs: &MRatFunc) -> MRatFunc {
        self.checked_div(rhs).expect("division by zero rational function")
    }
}

impl Neg for &MRatFunc {
    type Output = MRatFunc;
    fn neg(self) -> MRatFunc {
        MRatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl fmt::Display for MRatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.num_terms() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        if self.den.num_terms() > 1 || self.den.total_degree() > 1 && self.den.vars().len() > 1 {
            write!(f, "/({})", self.den)
        } else {
            write!(f, "/{}", self.den)
        }
    }
}

impl fmt::Debug for MRatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Zero for MRatFunc {
    fn zero() -> Self {
        MRatFunc::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl Add for MRatFunc {
    type Output = MRatFunc;
    fn add(self, rhs: MRatFunc) -> MRatFunc {
        &self + &rhs
    }
}

impl One for MRatFunc {
    fn one() -> Self {
        MRatFunc::one()
    }
}

impl Mul for MRatFunc {
    type Output = MRatFunc;
    fn mul(self, rhs: MRatFunc) -> MRatFunc {
        &self * &rhs
    }
}
