//! Sparse multivariate polynomials over the rationals, with a recursive
//! primitive-PRS greatest common divisor.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::{poly_gcd, Polynomial};
use super::rational::{denominator_lcm, rat_pow, Rational};
use super::Symbol;

/// Power product, stored with symbols in descending order so that the derived
/// `Ord` is the lexicographic order with larger symbols more significant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(s: Symbol, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(s, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exp(&self, s: Symbol) -> u32 {
        self.0.iter().find(|(v, _)| *v == s).map_or(0, |(_, e)| *e)
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < o.0.len() {
            let (a, ea) = self.0[i];
            let (b, eb) = o.0[j];
            if a == b {
                out.push((a, ea + eb));
                i += 1;
                j += 1;
            } else if a > b {
                out.push((a, ea));
                i += 1;
            } else {
                out.push((b, eb));
                j += 1;
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&o.0[j..]);
        Monomial(out)
    }

    pub fn div(&self, o: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(a, ea) in &self.0 {
            if j < o.0.len() && o.0[j].0 == a {
                let eb = o.0[j].1;
                if eb > ea {
                    return None;
                }
                if ea > eb {
                    out.push((a, ea - eb));
                }
                j += 1;
            } else if j < o.0.len() && o.0[j].0 > a {
                return None;
            } else {
                out.push((a, ea));
            }
        }
        (j == o.0.len()).then_some(Monomial(out))
    }

    pub fn without(&self, s: Symbol) -> Monomial {
        Monomial(self.0.iter().copied().filter(|(v, _)| *v != s).collect())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut vars: Vec<_> = self.0.clone();
        vars.reverse();
        for (k, (v, e)) in vars.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn one() -> Self {
        MPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = MPoly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn from_int(n: i64) -> Self {
        MPoly::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn var(s: Symbol) -> Self {
        let mut p = MPoly::zero();
        p.add_term(Monomial::var(s, 1), Rational::one());
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    /// Constant term.
    pub fn constant_term(&self) -> Rational {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn lc(&self) -> Rational {
        self.leading().map_or_else(Rational::zero, |(_, c)| c.clone())
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for (v, _) in &m.0 {
                out.insert(*v);
            }
        }
        out
    }

    pub fn max_var(&self) -> Option<Symbol> {
        self.terms.keys().filter_map(|m| m.0.first().map(|(v, _)| *v)).max()
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.terms.keys().any(|m| m.exp(s) > 0)
    }

    pub fn degree_in(&self, s: Symbol) -> u32 {
        self.terms.keys().map(|m| m.exp(s)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Coefficients of `s^0, s^1, ...` (trailing entry nonzero unless zero polynomial).
    pub fn to_univariate(&self, s: Symbol) -> Vec<MPoly> {
        let mut out = vec![MPoly::zero(); self.degree_in(s) as usize + 1];
        for (m, c) in &self.terms {
            let e = m.exp(s) as usize;
            out[e].terms.insert(m.without(s), c.clone());
        }
        if self.is_zero() {
            out.clear();
        }
        out
    }

    pub fn from_univariate(s: Symbol, coeffs: &[MPoly]) -> MPoly {
        let mut out = MPoly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            let xm = Monomial::var(s, e as u32);
            for (m, a) in &c.terms {
                out.add_term(m.mul(&xm), a.clone());
            }
        }
        out
    }

    pub fn subst(&self, s: Symbol, value: &MPoly) -> MPoly {
        if !self.contains(s) {
            return self.clone();
        }
        let coeffs = self.to_univariate(s);
        let mut acc = MPoly::zero();
        for c in coeffs.iter().rev() {
            acc = &(&acc * value) + c;
        }
        acc
    }

    /// Substitutes numeric values for the given variables, leaving others symbolic.
    pub fn eval_partial(&self, env: &BTreeMap<Symbol, Rational>) -> MPoly {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for &(v, e) in &m.0 {
                match env.get(&v) {
                    Some(val) => coeff *= rat_pow(val, e as i64),
                    None => rest.push((v, e)),
                }
            }
            out.add_term(Monomial(rest), coeff);
        }
        out
    }

    /// Full evaluation; `None` if some variable is unbound.
    pub fn eval(&self, env: &BTreeMap<Symbol, Rational>) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                t *= rat_pow(env.get(&v)?, e as i64);
            }
            acc += t;
        }
        Some(acc)
    }

    pub fn derivative(&self, s: Symbol) -> MPoly {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(s);
            if e == 0 {
                continue;
            }
            let mut rest = m.without(s);
            rest = rest.mul(&Monomial::var(s, e - 1));
            out.add_term(rest, c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Exact quotient if `d` divides `self`.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (lm_d, lc_d) = d.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut r = self.clone();
        let mut q = MPoly::zero();
        while let Some((lm_r, lc_r)) = r.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let m = lm_r.div(&lm_d)?;
            let c = lc_r / &lc_d;
            for (dm, dc) in &d.terms {
                r.add_term(dm.mul(&m), -(&c * dc));
            }
            q.add_term(m, c);
        }
        Some(q)
    }

    pub fn monic(&self) -> MPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lc().recip())
    }

    /// Integer-coefficient primitive form with positive leading coefficient,
    /// returned with the scalar `c` such that `self = c * primitive`.
    pub fn primitive_integer(&self) -> (Rational, MPoly) {
        if self.is_zero() {
            return (Rational::one(), MPoly::zero());
        }
        let l = denominator_lcm(self.terms.values());
        let g = self
            .terms
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(&(c * Rational::from_integer(l.clone())).to_integer()));
        let mut scalar = Rational::new(g, l);
        if self.lc().is_negative() {
            scalar = -scalar;
        }
        (scalar.clone(), self.scale(&scalar.recip()))
    }

    pub fn to_polynomial(&self, s: Symbol) -> Option<Polynomial> {
        let coeffs = self.to_univariate(s);
        let mut out = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            out.push(c.constant_value()?);
        }
        Some(Polynomial::new(s, out))
    }

    pub fn from_polynomial(p: &Polynomial) -> MPoly {
        let mut out = MPoly::zero();
        for (i, c) in p.coeffs().iter().enumerate() {
            out.add_term(Monomial::var(p.var(), i as u32), c.clone());
        }
        out
    }

    /// Content with respect to `s`: gcd of the coefficients of powers of `s`.
    pub fn content_in(&self, s: Symbol) -> MPoly {
        content(&self.to_univariate(s))
    }
}

/// Gcd of a list of polynomials (monic, or zero if all are zero).
pub fn content(polys: &[MPoly]) -> MPoly {
    let mut g = MPoly::zero();
    for p in polys {
        if p.is_zero() {
            continue;
        }
        g = mpoly_gcd(&g, p);
        if g.is_one() {
            break;
        }
    }
    g
}

fn trim(v: &mut Vec<MPoly>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

/// Sparse pseudo-remainder over the coefficient ring (up to a power of lc(v)).
fn prem(u: &[MPoly], v: &[MPoly]) -> Vec<MPoly> {
    let mut r = u.to_vec();
    let dv = v.len() - 1;
    let lcv = &v[dv];
    trim(&mut r);
    while r.len() > dv && !r.is_empty() {
        let dr = r.len() - 1;
        let lcr = r[dr].clone();
        for c in r.iter_mut() {
            *c = &*c * lcv;
        }
        for (i, vc) in v.iter().enumerate() {
            let t = &lcr * vc;
            r[i + dr - dv] = &r[i + dr - dv] - &t;
        }
        trim(&mut r);
    }
    r
}

/// Divides out the polynomial content and scales to coprime integer coefficients.
fn primitive_part(v: &[MPoly]) -> Vec<MPoly> {
    let c = content(v);
    let v: Vec<MPoly> = v.iter().map(|p| p.div_exact(&c).expect("content divides")).collect();
    let coeffs: Vec<&Rational> = v.iter().flat_map(|p| p.terms().map(|(_, c)| c)).collect();
    let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let num = coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(&(c.numer() * (&den / c.denom()))));
    if num.is_zero() {
        return v;
    }
    let s = Rational::new(den, num);
    v.iter().map(|p| p.scale(&s)).collect()
}

/// Greatest common divisor, normalized to leading coefficient 1 (lex order).
pub fn mpoly_gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return MPoly::one();
    }
    if a == b {
        return a.monic();
    }
    let x = a.max_var().max(b.max_var()).expect("nonconstant");
    if let (Some(pa), Some(pb)) = (a.to_polynomial(x), b.to_polynomial(x)) {
        return MPoly::from_polynomial(&poly_gcd(&pa, &pb));
    }
    let ua = a.to_univariate(x);
    let ub = b.to_univariate(x);
    if ua.len() == 1 {
        return mpoly_gcd(a, &content(&ub));
    }
    if ub.len() == 1 {
        return mpoly_gcd(&content(&ua), b);
    }
    let ca = content(&ua);
    let cb = content(&ub);
    let c = mpoly_gcd(&ca, &cb);
    let mut u: Vec<MPoly> = ua.iter().map(|p| p.div_exact(&ca).expect("content divides")).collect();
    let mut v: Vec<MPoly> = ub.iter().map(|p| p.div_exact(&cb).expect("content divides")).collect();
    if u.len() < v.len() {
        core::mem::swap(&mut u, &mut v);
    }
    let g = loop {
        if v.len() == 1 {
            break vec![MPoly::one()];
        }
        let r = prem(&u, &v);
        if r.is_empty() {
            break v;
        }
        u = v;
        v = primitive_part(&r);
    };
    (&c * &MPoly::from_univariate(x, &g)).monic()
}

pub fn mpoly_lcm(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() || b.is_zero() {
        return MPoly::zero();
    }
    let g = mpoly_gcd(a, b);
    (a * &b.div_exact(&g).expect("gcd divides")).monic()
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        if let Some(c) = rhs.constant_value() {
            return self.scale(&c);
        }
        if let Some(c) = self.constant_value() {
            return rhs.scale(&c);
        }
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;
    use crate::arith::sym;

    fn v(name: &str) -> MPoly {
        MPoly::var(sym(name))
    }

    fn c(n: i64) -> MPoly {
        MPoly::from_int(n)
    }

    #[test]
    fn lex_leading_term() {
        let p = &(&v("N") * &v("N")) + &v("j");
        assert_eq!(p.leading().unwrap().0, &Monomial::var(sym("j"), 1));
    }

    #[test]
    fn exact_division() {
        let a = &v("N") + &v("j");
        let b = &v("N") - &c(2);
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert!(prod.div_exact(&(&v("N") + &c(7))).is_none());
    }

    #[test]
    fn multivariate_gcd() {
        let x = v("x");
        let y = v("y");
        let f1 = &(&x + &y) - &c(1);
        let f2 = &(&x * &y) + &c(3);
        let f3 = &x - &(&y * &y);
        let a = &(&f1 * &f2) * &f1;
        let b = &(&f1 * &f3).scale(&int(6));
        assert_eq!(mpoly_gcd(&a, &b), f1.monic());
        assert!(mpoly_gcd(&f2, &f3).is_one());
    }

    #[test]
    fn gcd_with_content() {
        let n = v("N");
        let j = v("j");
        let a = &(&n - &c(1)) * &(&j + &c(2));
        let b = &(&n - &c(1)) * &(&n + &j);
        assert_eq!(mpoly_gcd(&a, &b), &n - &c(1));
    }

    #[test]
    fn substitution() {
        let p = &(&v("x") * &v("x")) + &v("y");
        let q = p.subst(sym("x"), &(&v("y") + &c(1)));
        let expect = &(&(&v("y") * &v("y")) + &v("y").scale(&int(3))) + &c(1);
        assert_eq!(q, expect);
    }
}
