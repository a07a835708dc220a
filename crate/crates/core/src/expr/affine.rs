//! Integer affine forms `c + Σ a_v·v`, the shape of every bound and atom argument.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{MPoly, Rational, Symbol};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Affine {
    /// Sorted by symbol, no zero coefficients.
    terms: Vec<(Symbol, i64)>,
    constant: i64,
}

pub type Env = BTreeMap<Symbol, i64>;

impl Affine {
    pub fn constant(c: i64) -> Self {
        Affine { terms: Vec::new(), constant: c }
    }

    pub fn var(s: Symbol) -> Self {
        Affine { terms: alloc::vec![(s, 1)], constant: 0 }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Symbol, i64)>, constant: i64) -> Self {
        let mut map: BTreeMap<Symbol, i64> = BTreeMap::new();
        for (s, a) in terms {
            *map.entry(s).or_insert(0) += a;
        }
        Affine { terms: map.into_iter().filter(|(_, a)| *a != 0).collect(), constant }
    }

    pub fn terms(&self) -> &[(Symbol, i64)] {
        &self.terms
    }

    pub fn constant_term(&self) -> i64 {
        self.constant
    }

    pub fn coeff(&self, s: Symbol) -> i64 {
        self.terms.iter().find(|(v, _)| *v == s).map_or(0, |(_, a)| *a)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<i64> {
        self.is_constant().then_some(self.constant)
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.coeff(s) != 0
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        self.terms.iter().map(|(s, _)| *s).collect()
    }

    /// The form without its constant term.
    pub fn linear_part(&self) -> Affine {
        Affine { terms: self.terms.clone(), constant: 0 }
    }

    pub fn add(&self, o: &Affine) -> Affine {
        Affine::from_terms(self.terms.iter().chain(o.terms.iter()).copied(), self.constant + o.constant)
    }

    pub fn sub(&self, o: &Affine) -> Affine {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Affine {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> Affine {
        Affine::from_terms(self.terms.iter().map(|(s, a)| (*s, a * k)), self.constant * k)
    }

    pub fn add_const(&self, c: i64) -> Affine {
        Affine { terms: self.terms.clone(), constant: self.constant + c }
    }

    pub fn subst(&self, s: Symbol, value: &Affine) -> Affine {
        let a = self.coeff(s);
        if a == 0 {
            return self.clone();
        }
        let rest = Affine::from_terms(self.terms.iter().copied().filter(|(v, _)| *v != s), self.constant);
        rest.add(&value.scale(a))
    }

    pub fn subst_all(&self, map: &BTreeMap<Symbol, Affine>) -> Affine {
        let mut out = Affine::constant(self.constant);
        for (s, a) in &self.terms {
            match map.get(s) {
                Some(v) => out = out.add(&v.scale(*a)),
                None => out = out.add(&Affine::from_terms([(*s, *a)], 0)),
            }
        }
        out
    }

    pub fn eval(&self, env: &Env) -> Option<i64> {
        let mut acc = self.constant;
        for (s, a) in &self.terms {
            acc = acc.checked_add(a.checked_mul(*env.get(s)?)?)?;
        }
        Some(acc)
    }

    /// Evaluates the bound part, leaving unbound symbols symbolic.
    pub fn eval_partial(&self, env: &Env) -> Affine {
        let mut c = self.constant;
        let mut rest = Vec::new();
        for (s, a) in &self.terms {
            match env.get(s) {
                Some(v) => c += a * v,
                None => rest.push((*s, *a)),
            }
        }
        Affine { terms: rest, constant: c }
    }

    pub fn to_mpoly(&self) -> MPoly {
        let mut p = MPoly::from_int(self.constant);
        for (s, a) in &self.terms {
            p = &p + &MPoly::var(*s).scale(&Rational::from_integer(BigInt::from(*a)));
        }
        p
    }

    /// Inverse of [`Affine::to_mpoly`] for polynomials of total degree ≤ 1 with integer coefficients.
    pub fn from_mpoly(p: &MPoly) -> Option<Affine> {
        let mut terms = Vec::new();
        let mut constant = 0;
        for (m, c) in p.terms() {
            if !c.is_integer() {
                return None;
            }
            let c = c.to_integer().to_i64()?;
            match m.factors() {
                [] => constant = c,
                [(s, 1)] => terms.push((*s, c)),
                _ => return None,
            }
        }
        Some(Affine::from_terms(terms, constant))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.constant.is_zero()
    }

    /// Greatest common divisor of the variable coefficients (0 for constants).
    pub fn content(&self) -> i64 {
        self.terms.iter().fold(0i64, |g, (_, a)| num_integer::gcd(g, *a))
    }

    /// Reduces every coefficient into `{0, 1}`, as appropriate for a `(-1)` exponent.
    pub fn mod2(&self) -> Affine {
        Affine::from_terms(self.terms.iter().map(|(s, a)| (*s, a.rem_euclid(2))), self.constant.rem_euclid(2))
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (s, a) in &self.terms {
            match (*a, first) {
                (1, true) => write!(f, "{s}")?,
                (-1, _) => write!(f, "-{s}")?,
                (1, false) => write!(f, "+{s}")?,
                (a, true) => write!(f, "{a}*{s}")?,
                (a, false) if a < 0 => write!(f, "{a}*{s}")?,
                (a, false) => write!(f, "+{a}*{s}")?,
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant > 0 {
            write!(f, "+{}", self.constant)
        } else if self.constant < 0 {
            write!(f, "{}", self.constant)
        } else {
            Ok(())
        }
    }
}

impl fmt::Debug for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
