//! Hypergeometric terms in factorial normal form.
//!
//! A term is `coeff · Π L_k!^{e_k} · Π p^{M_p} · (-1)^S` where every `L_k`,
//! `M_p`, `S` is a linear form without constant term. Shifting a factorial
//! argument by a constant only changes the rational coefficient, so two terms
//! are similar (rational ratio) exactly when their kernels agree.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::rational::{factorial, rat_pow};
use crate::arith::{MPoly, MRatFunc, Rational, Symbol};
use crate::domain::Domain;
use crate::expr::factorial_quotient;
use crate::expr::{Affine, Atom, Env};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HyperError {
    #[error("term is singular at the requested point")]
    Singular,
    #[error("unbound variable {0}")]
    Unbound(Symbol),
    #[error("cannot express {0} as a hypergeometric term on this domain")]
    Unsupported(alloc::string::String),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Kernel {
    facts: Vec<(Affine, i32)>,
    bases: Vec<(BigInt, Affine)>,
    sign: Affine,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HyperTerm {
    coeff: MRatFunc,
    kernel: Kernel,
}

fn mpoly_of(a: &Affine) -> MPoly {
    a.to_mpoly()
}

/// `(lin + c)!^e` rewritten as `coeff · lin!^e`; `lin` must be nonconstant.
fn shift_factorial(lin: &Affine, c: i64, e: i32) -> MRatFunc {
    let base = mpoly_of(lin);
    let mut acc = MRatFunc::one();
    if c > 0 {
        for t in 1..=c {
            acc = &acc * &MRatFunc::from_poly(&base + &MPoly::from_int(t));
        }
    } else {
        for t in 0..(-c) {
            acc = &acc / &MRatFunc::from_poly(&base - &MPoly::from_int(t));
        }
    }
    acc.pow(e as i64).expect("nonzero product")
}

/// Trial-division factorization; a cofactor without small divisors is kept whole.
fn factor_small(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut out = Vec::new();
    let mut n = n.abs();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(100_000);
    while &p * &p <= n && p <= limit {
        let mut k = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            k += 1;
        }
        if k > 0 {
            out.push((p.clone(), k));
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

impl Kernel {
    pub fn one() -> Self {
        Kernel::default()
    }

    pub fn is_one(&self) -> bool {
        self.facts.is_empty() && self.bases.is_empty() && self.sign.is_zero()
    }

    pub fn facts(&self) -> &[(Affine, i32)] {
        &self.facts
    }

    pub fn bases(&self) -> &[(BigInt, Affine)] {
        &self.bases
    }

    pub fn sign(&self) -> &Affine {
        &self.sign
    }

    pub fn from_parts(facts: Vec<(Affine, i32)>, bases: Vec<(BigInt, Affine)>, sign: Affine) -> Kernel {
        let mut k = Kernel::one();
        for (l, e) in facts {
            k.add_fact(l, e);
        }
        for (b, m) in bases {
            k.add_base(b, m);
        }
        k.sign = sign.mod2();
        k
    }

    fn add_fact(&mut self, lin: Affine, e: i32) {
        debug_assert_eq!(lin.constant_term(), 0);
        match self.facts.binary_search_by(|(l, _)| l.cmp(&lin)) {
            Ok(i) => {
                self.facts[i].1 += e;
                if self.facts[i].1 == 0 {
                    self.facts.remove(i);
                }
            }
            Err(i) => {
                if e != 0 {
                    self.facts.insert(i, (lin, e));
                }
            }
        }
    }

    fn add_base(&mut self, b: BigInt, m: Affine) {
        match self.bases.binary_search_by(|(x, _)| x.cmp(&b)) {
            Ok(i) => {
                let s = self.bases[i].1.add(&m);
                if s.is_zero() {
                    self.bases.remove(i);
                } else {
                    self.bases[i].1 = s;
                }
            }
            Err(i) => {
                if !m.is_zero() {
                    self.bases.insert(i, (b, m));
                }
            }
        }
    }

    pub fn mul(&self, o: &Kernel) -> Kernel {
        let mut k = self.clone();
        for (l, e) in &o.facts {
            k.add_fact(l.clone(), *e);
        }
        for (b, m) in &o.bases {
            k.add_base(b.clone(), m.clone());
        }
        k.sign = k.sign.add(&o.sign).mod2();
        k
    }

    pub fn inv(&self) -> Kernel {
        Kernel {
            facts: self.facts.iter().map(|(l, e)| (l.clone(), -e)).collect(),
            bases: self.bases.iter().map(|(b, m)| (b.clone(), m.neg())).collect(),
            sign: self.sign.clone(),
        }
    }

    pub fn pow(&self, k: i32) -> Kernel {
        if k == 0 {
            return Kernel::one();
        }
        Kernel {
            facts: self.facts.iter().map(|(l, e)| (l.clone(), e * k)).collect(),
            bases: self.bases.iter().map(|(b, m)| (b.clone(), m.scale(k as i64))).collect(),
            sign: self.sign.scale(k as i64).mod2(),
        }
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for (l, _) in &self.facts {
            out.extend(l.vars());
        }
        for (_, m) in &self.bases {
            out.extend(m.vars());
        }
        out.extend(self.sign.vars());
        out
    }

    pub fn depends_on(&self, v: Symbol) -> bool {
        self.facts.iter().any(|(l, _)| l.contains(v))
            || self.bases.iter().any(|(_, m)| m.contains(v))
            || self.sign.contains(v)
    }

    /// `K(v+1)/K(v)`.
    pub fn quotient(&self, v: Symbol) -> MRatFunc {
        let mut acc = MRatFunc::one();
        for (l, e) in &self.facts {
            if l.contains(v) {
                acc = &acc * &factorial_quotient(l, v).pow(*e as i64).expect("nonzero");
            }
        }
        let mut c = Rational::one();
        for (b, m) in &self.bases {
            let a = m.coeff(v);
            if a != 0 {
                c *= rat_pow(&Rational::from_integer(b.clone()), a);
            }
        }
        if self.sign.coeff(v) % 2 != 0 {
            c = -c;
        }
        acc.scale(&c)
    }

    /// Splits into the part depending on `v` and the part free of it.
    pub fn split(&self, v: Symbol) -> (Kernel, Kernel) {
        let mut dep = Kernel::one();
        let mut free = Kernel::one();
        for (l, e) in &self.facts {
            if l.contains(v) {
                dep.add_fact(l.clone(), *e);
            } else {
                free.add_fact(l.clone(), *e);
            }
        }
        for (b, m) in &self.bases {
            let a = m.coeff(v);
            let vpart = Affine::from_terms([(v, a)], 0);
            dep.add_base(b.clone(), vpart.clone());
            free.add_base(b.clone(), m.sub(&vpart));
        }
        let a = self.sign.coeff(v);
        let vpart = Affine::from_terms([(v, a)], 0);
        dep.sign = vpart.mod2();
        free.sign = self.sign.sub(&vpart).mod2();
        (dep, free)
    }
}

impl HyperTerm {
    pub fn new(coeff: MRatFunc, kernel: Kernel) -> Self {
        if coeff.is_zero() {
            return HyperTerm::zero();
        }
        HyperTerm { coeff, kernel }
    }

    pub fn zero() -> Self {
        HyperTerm { coeff: MRatFunc::zero(), kernel: Kernel::one() }
    }

    pub fn one() -> Self {
        HyperTerm::from_coeff(MRatFunc::one())
    }

    pub fn from_coeff(coeff: MRatFunc) -> Self {
        HyperTerm::new(coeff, Kernel::one())
    }

    pub fn constant(c: Rational) -> Self {
        HyperTerm::from_coeff(MRatFunc::constant(c))
    }

    pub fn coeff(&self) -> &MRatFunc {
        &self.coeff
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.kernel.is_one()
    }

    /// `a!^e` for an arbitrary affine argument.
    pub fn factorial(a: &Affine, e: i32) -> Result<Self, HyperError> {
        let lin = a.linear_part();
        let c = a.constant_term();
        if lin.is_zero() {
            if c >= 0 {
                let f = Rational::from_integer(factorial(c as u64));
                return Ok(HyperTerm::constant(rat_pow(&f, e as i64)));
            }
            return if e < 0 { Ok(HyperTerm::zero()) } else { Err(HyperError::Singular) };
        }
        let mut k = Kernel::one();
        k.add_fact(lin.clone(), e);
        Ok(HyperTerm::new(shift_factorial(&lin, c, e), k))
    }

    /// `b^e` for a nonzero rational base.
    pub fn power(b: &Rational, e: &Affine) -> Self {
        assert!(!b.is_zero(), "zero power base");
        let c = e.constant_term();
        let lin = e.linear_part();
        let coeff = rat_pow(b, c);
        let mut k = Kernel::one();
        if b.is_negative() {
            k.sign = lin.mod2();
        }
        for (p, a) in factor_small(b.numer()) {
            k.add_base(p, lin.scale(a as i64));
        }
        for (p, a) in factor_small(b.denom()) {
            k.add_base(p, lin.scale(-(a as i64)));
        }
        HyperTerm::new(MRatFunc::constant(coeff), k)
    }

    pub fn mul(&self, o: &HyperTerm) -> HyperTerm {
        HyperTerm::new(&self.coeff * &o.coeff, self.kernel.mul(&o.kernel))
    }

    pub fn inv(&self) -> Result<HyperTerm, HyperError> {
        let c = self.coeff.inv().map_err(|_| HyperError::Singular)?;
        Ok(HyperTerm::new(c, self.kernel.inv()))
    }

    pub fn div(&self, o: &HyperTerm) -> Result<HyperTerm, HyperError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<HyperTerm, HyperError> {
        let c = self.coeff.pow(k).map_err(|_| HyperError::Singular)?;
        Ok(HyperTerm::new(c, self.kernel.pow(k as i32)))
    }

    pub fn scale(&self, c: &MRatFunc) -> HyperTerm {
        HyperTerm::new(&self.coeff * c, self.kernel.clone())
    }

    pub fn with_coeff(&self, c: MRatFunc) -> HyperTerm {
        HyperTerm::new(c, self.kernel.clone())
    }

    pub fn neg(&self) -> HyperTerm {
        HyperTerm::new(-&self.coeff, self.kernel.clone())
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        let mut v = self.coeff.vars();
        v.extend(self.kernel.vars());
        v
    }

    pub fn depends_on(&self, v: Symbol) -> bool {
        self.coeff.contains(v) || self.kernel.depends_on(v)
    }

    pub fn similar(&self, o: &HyperTerm) -> bool {
        self.kernel == o.kernel
    }

    /// `T(v+1)/T(v)`; the term must be nonzero.
    pub fn quotient(&self, v: Symbol) -> MRatFunc {
        &(&self.coeff.shift(v, 1) / &self.coeff) * &self.kernel.quotient(v)
    }

    /// `T(v + k)`.
    pub fn shift(&self, v: Symbol, k: i64) -> HyperTerm {
        if k == 0 || !self.depends_on(v) {
            return self.clone();
        }
        self.subst(v, &Affine::var(v).add_const(k)).expect("shifts of symbolic terms are regular")
    }

    /// Substitutes an affine form for `v`, resolving factorials that become
    /// negative constants as limits through the rational coefficient.
    pub fn subst(&self, v: Symbol, value: &Affine) -> Result<HyperTerm, HyperError> {
        let mut map = BTreeMap::new();
        map.insert(v, value.clone());
        self.subst_all(&map)
    }

    pub fn subst_all(&self, map: &BTreeMap<Symbol, Affine>) -> Result<HyperTerm, HyperError> {
        if self.is_zero() {
            return Ok(HyperTerm::zero());
        }
        let touches = |a: &Affine| a.terms().iter().any(|(s, _)| map.contains_key(s));
        let mut pre = self.coeff.clone();
        let mut out_kernel = Kernel::one();
        let mut post = MRatFunc::one();
        for (l, e) in &self.kernel.facts {
            if !touches(l) {
                out_kernel.add_fact(l.clone(), *e);
                continue;
            }
            let nl = l.subst_all(map);
            match nl.as_constant() {
                Some(c) if c < 0 => {
                    // L! = (L+m)!/((L+1)...(L+m)) with (L+m)! -> 0! = 1.
                    let m = -c;
                    pre = &pre * &shift_factorial(l, m, *e).inv().map_err(|_| HyperError::Singular)?;
                }
                Some(c) => {
                    let f = Rational::from_integer(factorial(c as u64));
                    post = post.scale(&rat_pow(&f, *e as i64));
                }
                None => {
                    let lin = nl.linear_part();
                    post = &post * &shift_factorial(&lin, nl.constant_term(), *e);
                    out_kernel.add_fact(lin, *e);
                }
            }
        }
        if pre.is_zero() {
            return Ok(HyperTerm::zero());
        }
        let mut c = pre;
        for (s, a) in map {
            if c.contains(*s) {
                c = c.subst(*s, &MRatFunc::from_poly(a.to_mpoly())).map_err(|_| HyperError::Singular)?;
            }
        }
        let mut scalar = Rational::one();
        for (b, m) in &self.kernel.bases {
            let nm = m.subst_all(map);
            scalar *= rat_pow(&Rational::from_integer(b.clone()), nm.constant_term());
            out_kernel.add_base(b.clone(), nm.linear_part());
        }
        let ns = self.kernel.sign.subst_all(map);
        if ns.constant_term().rem_euclid(2) == 1 {
            scalar = -scalar;
        }
        out_kernel.sign = ns.linear_part().mod2();
        Ok(HyperTerm::new((&c * &post).scale(&scalar), out_kernel))
    }

    /// Exact value at a point; removable singularities are resolved as limits.
    pub fn eval(&self, env: &Env) -> Result<Rational, HyperError> {
        if self.is_zero() {
            return Ok(Rational::zero());
        }
        match self.eval_fast(env)? {
            Some(v) => Ok(v),
            None => self.eval_limit(env),
        }
    }

    fn env_q(&self, env: &Env) -> BTreeMap<Symbol, Rational> {
        env.iter().map(|(s, v)| (*s, Rational::from_integer(BigInt::from(*v)))).collect()
    }

    fn eval_kernel_rest(&self, env: &Env) -> Result<Rational, HyperError> {
        let mut acc = Rational::one();
        for (b, m) in &self.kernel.bases {
            let e = m.eval(env).ok_or_else(|| self.unbound(env))?;
            acc *= rat_pow(&Rational::from_integer(b.clone()), e);
        }
        let s = self.kernel.sign.eval(env).ok_or_else(|| self.unbound(env))?;
        if s.rem_euclid(2) == 1 {
            acc = -acc;
        }
        Ok(acc)
    }

    fn unbound(&self, env: &Env) -> HyperError {
        let v = self.vars().into_iter().find(|s| !env.contains_key(s)).unwrap_or_else(|| crate::arith::sym("_"));
        HyperError::Unbound(v)
    }

    fn eval_fast(&self, env: &Env) -> Result<Option<Rational>, HyperError> {
        let mut zero = false;
        let mut acc = Rational::one();
        for (l, e) in &self.kernel.facts {
            let x = l.eval(env).ok_or_else(|| self.unbound(env))?;
            if x < 0 {
                if *e > 0 {
                    return Ok(None);
                }
                zero = true;
            } else if !zero {
                acc *= rat_pow(&Rational::from_integer(factorial(x as u64)), *e as i64);
            }
        }
        let c = match self.coeff.eval(&self.env_q(env)) {
            Ok(Some(c)) => c,
            Ok(None) => return Err(self.unbound(env)),
            Err(_) => return Ok(None),
        };
        if zero {
            return Ok(Some(Rational::zero()));
        }
        Ok(Some(c * acc * self.eval_kernel_rest(env)?))
    }

    fn eval_limit(&self, env: &Env) -> Result<Rational, HyperError> {
        let mut coeff = self.coeff.clone();
        let mut acc = Rational::one();
        for (l, e) in &self.kernel.facts {
            let x = l.eval(env).ok_or_else(|| self.unbound(env))?;
            if x < 0 {
                coeff = &coeff * &shift_factorial(l, -x, *e).inv().map_err(|_| HyperError::Singular)?;
            } else {
                acc *= rat_pow(&Rational::from_integer(factorial(x as u64)), *e as i64);
            }
        }
        let c = match coeff.eval(&self.env_q(env)) {
            Ok(Some(c)) => c,
            Ok(None) => return Err(self.unbound(env)),
            Err(_) => return Err(HyperError::Singular),
        };
        Ok(c * acc * self.eval_kernel_rest(env)?)
    }

    /// Factors into `(part depending on v, part free of v)`.
    pub fn split(&self, v: Symbol) -> (HyperTerm, HyperTerm) {
        let (kd, kf) = self.kernel.split(v);
        let num = self.coeff.num();
        let den = self.coeff.den();
        let cn = if num.contains(v) { num.content_in(v) } else { num.clone() };
        let cd = if den.contains(v) { den.content_in(v) } else { den.clone() };
        let free_c = MRatFunc::new(cn.clone(), cd.clone()).expect("nonzero content");
        let dep_c = MRatFunc::new(
            num.div_exact(&cn).expect("content divides"),
            den.div_exact(&cd).expect("content divides"),
        )
        .expect("nonzero den");
        (HyperTerm::new(dep_c, kd), HyperTerm::new(free_c, kf))
    }

    /// Builds the term for a single atom; binomials and Pochhammer symbols are
    /// rewritten through factorials according to the sign of their arguments
    /// on `domain`.
    pub fn from_atom(a: &Atom, domain: &Domain) -> Result<HyperTerm, HyperError> {
        let unsupported = || HyperError::Unsupported(alloc::format!("{a}"));
        match a {
            Atom::Rational(f) => Ok(HyperTerm::from_coeff(f.clone())),
            Atom::Power(b, e) => Ok(HyperTerm::power(b, e)),
            Atom::Factorial(x) => HyperTerm::factorial(x, 1),
            Atom::Binomial(n, k) => {
                if let (Some(nc), Some(kc)) = (n.as_constant(), k.as_constant()) {
                    return Ok(HyperTerm::constant(Rational::from_integer(crate::expr::binomial(nc, kc))));
                }
                if domain.nonnegative(n) {
                    let t = HyperTerm::factorial(n, 1)?;
                    let d1 = HyperTerm::factorial(k, -1)?;
                    let d2 = HyperTerm::factorial(&n.sub(k), -1)?;
                    Ok(t.mul(&d1).mul(&d2))
                } else if domain.negative(n) {
                    // binomial(n, k) = (-1)^k (k-n-1)! / (k! (-n-1)!)
                    let t = HyperTerm::factorial(&k.sub(n).add_const(-1), 1)?;
                    let d1 = HyperTerm::factorial(k, -1)?;
                    let d2 = HyperTerm::factorial(&n.neg().add_const(-1), -1)?;
                    Ok(t.mul(&d1).mul(&d2).mul(&HyperTerm::power(&-Rational::one(), k)))
                } else {
                    Err(unsupported())
                }
            }
            Atom::Pochhammer(x, k) => {
                if let (Some(xc), Some(kc)) = (x.as_constant(), k.as_constant()) {
                    let mut acc = BigInt::one();
                    for t in 0..kc.max(0) {
                        acc *= BigInt::from(xc + t);
                    }
                    return Ok(HyperTerm::constant(Rational::from_integer(acc)));
                }
                let top = x.add(k).add_const(-1);
                if domain.min_of(x).is_some_and(|m| m >= 1) {
                    let t = HyperTerm::factorial(&top, 1)?;
                    Ok(t.mul(&HyperTerm::factorial(&x.add_const(-1), -1)?))
                } else if domain.max_of(x).is_some_and(|m| m <= 0) && domain.max_of(&top).is_some_and(|m| m <= -1) {
                    // (x)_k = (-1)^k (-x)! / (-x-k)!
                    let t = HyperTerm::factorial(&x.neg(), 1)?;
                    let d = HyperTerm::factorial(&x.neg().sub(k), -1)?;
                    Ok(t.mul(&d).mul(&HyperTerm::power(&-Rational::one(), k)))
                } else if domain.max_of(x).is_some_and(|m| m <= 0) && domain.nonnegative(&top) {
                    Ok(HyperTerm::zero())
                } else {
                    Err(unsupported())
                }
            }
        }
    }

    /// The integer value of `coeff` at a constant term, if it is one.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.kernel.is_one() {
            self.coeff.constant_value()
        } else {
            None
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            Ok(())
        };
        if !self.sign.is_zero() {
            sep(f)?;
            write!(f, "(-1)^({})", self.sign)?;
        }
        for (b, m) in &self.bases {
            sep(f)?;
            write!(f, "{b}^({m})")?;
        }
        for (l, e) in &self.facts {
            sep(f)?;
            if *e == 1 {
                write!(f, "Factorial({l})")?;
            } else {
                write!(f, "Factorial({l})^({e})")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for HyperTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kernel.is_one() {
            write!(f, "{}", self.coeff)
        } else {
            write!(f, "({})*{}", self.coeff, self.kernel)
        }
    }
}

impl fmt::Debug for HyperTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
