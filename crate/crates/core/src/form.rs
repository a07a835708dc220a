//! Sums of products of hypergeometric terms and nested indefinite sums.
//!
//! This is the working representation of the simplifier: a [`Form`] is a list
//! of [`Term`]s, each a hypergeometric factor times a product of [`Chain`]s,
//! where a chain `Σ_{var=lower}^{upper} body` nests another form.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::arith::{MRatFunc, Rational, Symbol};
use crate::domain::Domain;
use crate::expr::{Affine, Atom, Env, Expr, HarmonicSumRef, SSumRef};
use crate::hyper::{HyperError, HyperTerm, Kernel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormError {
    #[error(transparent)]
    Hyper(#[from] HyperError),
    #[error("unsupported expression: {0}")]
    Unsupported(String),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chain {
    pub var: Symbol,
    pub lower: Affine,
    pub upper: Affine,
    pub body: Form,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub hyper: HyperTerm,
    pub chains: Vec<Chain>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Form {
    pub terms: Vec<Term>,
}

fn bound_name(depth: usize) -> Symbol {
    let mut s = String::from("__");
    s.push_str(&alloc::format!("{depth}"));
    Symbol::new(&s).expect("short bound name")
}

impl Chain {
    pub fn new(var: Symbol, lower: Affine, upper: Affine, body: Form) -> Chain {
        Chain { var, lower, upper, body }
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        let mut v = self.body.vars();
        v.remove(&self.var);
        v.extend(self.lower.vars());
        v.extend(self.upper.vars());
        v
    }

    pub fn depends_on(&self, v: Symbol) -> bool {
        self.vars().contains(&v)
    }

    fn subst_all(&self, map: &BTreeMap<Symbol, Affine>) -> Result<Chain, HyperError> {
        let mut inner = map.clone();
        inner.remove(&self.var);
        Ok(Chain {
            var: self.var,
            lower: self.lower.subst_all(map),
            upper: self.upper.subst_all(map),
            body: self.body.subst_all(&inner)?,
        })
    }

    pub fn eval(&self, env: &Env) -> Result<Rational, FormError> {
        let (Some(lo), Some(hi)) = (self.lower.eval(env), self.upper.eval(env)) else {
            return Err(FormError::Unsupported(alloc::format!("unbound bound in {self}")));
        };
        let mut acc = Rational::zero();
        let mut e = env.clone();
        for i in lo..=hi {
            e.insert(self.var, i);
            acc += self.body.eval(&e)?;
        }
        Ok(acc)
    }

    /// Renames bound variables to depth-indexed names, for comparisons up to renaming.
    pub fn alpha_normal(&self, depth: usize) -> Chain {
        let name = bound_name(depth);
        let mut map = BTreeMap::new();
        map.insert(self.var, Affine::var(name));
        let body = self.body.subst_all(&map).expect("renaming is regular");
        Chain {
            var: name,
            lower: self.lower.clone(),
            upper: self.upper.clone(),
            body: body.alpha_normal(depth + 1),
        }
    }

    /// Rebinds the chain to a fresh variable.
    pub fn refresh(&self) -> Chain {
        let v = Symbol::fresh();
        let mut map = BTreeMap::new();
        map.insert(self.var, Affine::var(v));
        Chain {
            var: v,
            lower: self.lower.clone(),
            upper: self.upper.clone(),
            body: self.body.subst_all(&map).expect("renaming is regular"),
        }
    }

    /// Nesting depth (1 for a chain over a chain-free body).
    pub fn depth(&self) -> usize {
        1 + self.body.depth()
    }
}

impl Term {
    pub fn hyper(h: HyperTerm) -> Term {
        Term { hyper: h, chains: Vec::new() }
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        let mut v = self.hyper.vars();
        for c in &self.chains {
            v.extend(c.vars());
        }
        v
    }

    pub fn depends_on(&self, v: Symbol) -> bool {
        self.hyper.depends_on(v) || self.chains.iter().any(|c| c.depends_on(v))
    }

    pub fn mul(&self, o: &Term) -> Term {
        let mut chains = self.chains.clone();
        chains.extend(o.chains.iter().cloned());
        Term { hyper: self.hyper.mul(&o.hyper), chains }
    }

    pub fn eval(&self, env: &Env) -> Result<Rational, FormError> {
        let h = self.hyper.eval(env)?;
        if h.is_zero() {
            return Ok(h);
        }
        let mut acc = h;
        for c in &self.chains {
            acc *= c.eval(env)?;
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    fn subst_all(&self, map: &BTreeMap<Symbol, Affine>) -> Result<Term, HyperError> {
        Ok(Term {
            hyper: self.hyper.subst_all(map)?,
            chains: self.chains.iter().map(|c| c.subst_all(map)).collect::<Result<_, _>>()?,
        })
    }

    /// Chains in alpha-normal form, sorted; the merge key of a term.
    fn chain_key(&self, depth: usize) -> Vec<Chain> {
        let mut v: Vec<Chain> = self.chains.iter().map(|c| c.alpha_normal(depth)).collect();
        v.sort();
        v
    }
}

impl Form {
    pub fn zero() -> Form {
        Form::default()
    }

    pub fn one() -> Form {
        Form::from_hyper(HyperTerm::one())
    }

    pub fn from_hyper(h: HyperTerm) -> Form {
        if h.is_zero() {
            return Form::zero();
        }
        Form { terms: alloc::vec![Term::hyper(h)] }
    }

    pub fn from_terms(terms: Vec<Term>) -> Form {
        Form { terms }.collect()
    }

    pub fn rational(c: MRatFunc) -> Form {
        Form::from_hyper(HyperTerm::from_coeff(c))
    }

    pub fn chain(c: Chain) -> Form {
        Form { terms: alloc::vec![Term { hyper: HyperTerm::one(), chains: alloc::vec![c] }] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        let mut v = BTreeSet::new();
        for t in &self.terms {
            v.extend(t.vars());
        }
        v
    }

    pub fn depends_on(&self, v: Symbol) -> bool {
        self.terms.iter().any(|t| t.depends_on(v))
    }

    pub fn depth(&self) -> usize {
        self.terms.iter().flat_map(|t| t.chains.iter().map(|c| c.depth())).max().unwrap_or(0)
    }

    pub fn has_chains(&self) -> bool {
        self.terms.iter().any(|t| !t.chains.is_empty())
    }

    pub fn add(&self, o: &Form) -> Form {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Form { terms }.collect()
    }

    pub fn sub(&self, o: &Form) -> Form {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Form {
        self.mul_hyper(&HyperTerm::constant(-Rational::one()))
    }

    pub fn mul(&self, o: &Form) -> Form {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &o.terms {
                terms.push(a.mul(b));
            }
        }
        Form { terms }.collect()
    }

    pub fn mul_hyper(&self, h: &HyperTerm) -> Form {
        if h.is_zero() {
            return Form::zero();
        }
        Form {
            terms: self
                .terms
                .iter()
                .map(|t| Term { hyper: t.hyper.mul(h), chains: t.chains.clone() })
                .filter(|t| !t.hyper.is_zero())
                .collect(),
        }
    }

    pub fn scale(&self, c: &MRatFunc) -> Form {
        self.mul_hyper(&HyperTerm::from_coeff(c.clone()))
    }

    pub fn subst(&self, v: Symbol, value: &Affine) -> Result<Form, HyperError> {
        let mut map = BTreeMap::new();
        map.insert(v, value.clone());
        self.subst_all(&map)
    }

    pub fn subst_all(&self, map: &BTreeMap<Symbol, Affine>) -> Result<Form, HyperError> {
        let terms = self.terms.iter().map(|t| t.subst_all(map)).collect::<Result<Vec<_>, _>>()?;
        Ok(Form { terms }.collect())
    }

    pub fn shift(&self, v: Symbol, k: i64) -> Form {
        self.subst(v, &Affine::var(v).add_const(k)).expect("shift of symbolic form is regular")
    }

    pub fn eval(&self, env: &Env) -> Result<Rational, FormError> {
        let mut acc = Rational::zero();
        for t in &self.terms {
            acc += t.eval(env)?;
        }
        Ok(acc)
    }

    pub fn alpha_normal(&self, depth: usize) -> Form {
        Form {
            terms: self
                .terms
                .iter()
                .map(|t| Term { hyper: t.hyper.clone(), chains: t.chain_key(depth) })
                .collect(),
        }
    }

    /// Merges terms with similar hypergeometric parts and equal chains; drops zeros.
    pub fn collect(self) -> Form {
        let mut groups: BTreeMap<(Kernel, Vec<Chain>), (MRatFunc, Vec<Chain>)> = BTreeMap::new();
        let mut order = Vec::new();
        for t in self.terms {
            if t.hyper.is_zero() {
                continue;
            }
            if t.chains.iter().any(|c| c.body.is_zero() || chain_empty(c)) {
                continue;
            }
            let key = (t.hyper.kernel().clone(), t.chain_key(0));
            match groups.get_mut(&key) {
                Some((c, _)) => *c = &*c + t.hyper.coeff(),
                None => {
                    order.push(key.clone());
                    groups.insert(key, (t.hyper.coeff().clone(), t.chains));
                }
            }
        }
        let mut terms = Vec::new();
        for key in order {
            let (c, chains) = groups.remove(&key).expect("key present");
            if !c.is_zero() {
                terms.push(Term { hyper: HyperTerm::new(c, key.0), chains });
            }
        }
        Form { terms }
    }

    /// Converts an expression tree; `domain` supplies signs for binomial and
    /// Pochhammer rewriting.
    pub fn from_expr(e: &Expr, domain: &Domain) -> Result<Form, FormError> {
        match e {
            Expr::Atom(a) => Ok(Form::from_hyper(HyperTerm::from_atom(a, domain)?)),
            Expr::Harmonic(h) => {
                let signs: Vec<(u32, Rational)> = h
                    .indices
                    .iter()
                    .map(|m| (m.unsigned_abs() as u32, if *m < 0 { -Rational::one() } else { Rational::one() }))
                    .collect();
                Ok(Form::chain(nested_power_chain(&signs, &h.arg)))
            }
            Expr::SSum(s) => {
                let layers: Vec<(u32, Rational)> =
                    s.indices.iter().copied().zip(s.weights.iter().cloned()).collect();
                Ok(Form::chain(nested_power_chain(&layers, &s.arg)))
            }
            Expr::Add(ts) => {
                let mut acc = Form::zero();
                for t in ts {
                    acc = acc.add(&Form::from_expr(t, domain)?);
                }
                Ok(acc)
            }
            Expr::Mul(fs) => {
                let mut acc = Form::one();
                for f in fs {
                    acc = acc.mul(&Form::from_expr(f, domain)?);
                }
                Ok(acc)
            }
            Expr::Pow(b, k) => {
                let base = Form::from_expr(b, domain)?;
                if *k >= 0 {
                    let mut acc = Form::one();
                    for _ in 0..*k {
                        acc = acc.mul(&base);
                    }
                    return Ok(acc);
                }
                match base.terms.as_slice() {
                    [t] if t.chains.is_empty() => Ok(Form::from_hyper(t.hyper.pow(*k)?)),
                    _ => Err(FormError::Unsupported(alloc::format!("negative power of a sum: {e}"))),
                }
            }
            Expr::Sum(s) => {
                let inner = domain.rebound(s.var, s.lower.clone(), Some(s.upper.clone()));
                let body = Form::from_expr(&s.body, &inner)?;
                Ok(Form::chain(Chain::new(s.var, s.lower.clone(), s.upper.clone(), body).refresh()))
            }
        }
    }

    /// Expression tree with the same value.
    pub fn to_expr(&self) -> Expr {
        let mut terms = Vec::new();
        for t in &self.terms {
            let mut factors = hyper_to_factors(&t.hyper);
            for c in &t.chains {
                factors.push(chain_to_expr(c));
            }
            terms.push(match factors.len() {
                0 => Expr::int(1),
                1 => factors.pop().expect("one factor"),
                _ => Expr::Mul(factors),
            });
        }
        match terms.len() {
            0 => Expr::int(0),
            1 => terms.pop().expect("one term"),
            _ => Expr::Add(terms),
        }
    }
}

fn chain_to_expr(c: &Chain) -> Expr {
    if let Some((w, arg)) = crate::sums::chain_as_word(c) {
        let harmonic: Option<Vec<i64>> = w.iter().map(|l| l.as_harmonic()).collect();
        let made = match harmonic {
            Some(indices) => HarmonicSumRef::new(indices, arg).map(Expr::Harmonic),
            None => SSumRef::new(w.iter().map(|l| l.m).collect(), w.iter().map(|l| l.x.clone()).collect(), arg).map(Expr::SSum),
        };
        if let Ok(e) = made {
            return e;
        }
    }
    Expr::sum(c.var, c.lower.clone(), c.upper.clone(), c.body.to_expr())
}

fn chain_empty(c: &Chain) -> bool {
    match c.upper.sub(&c.lower).as_constant() {
        Some(d) => d < 0,
        None => false,
    }
}

/// `Σ_{i=1}^{arg} x_1^i/i^{m_1} Σ_{k=1}^{i} ...` for the given layers.
pub(crate) fn nested_power_chain(layers: &[(u32, Rational)], arg: &Affine) -> Chain {
    let var = Symbol::fresh();
    let iv = Affine::var(var);
    let (m, x) = &layers[0];
    let mut h = HyperTerm::from_coeff(MRatFunc::from_poly(iv.to_mpoly()).pow(-(*m as i64)).expect("nonzero"));
    if !x.is_one() {
        h = h.mul(&HyperTerm::power(x, &iv));
    }
    let mut body = Form::from_hyper(h);
    if layers.len() > 1 {
        body = body.mul(&Form::chain(nested_power_chain(&layers[1..], &iv)));
    }
    Chain::new(var, Affine::constant(1), arg.clone(), body)
}

/// `S_{m_1,...}(x_1,...; arg)` as a form.
pub fn ssum_form(layers: &[(u32, Rational)], arg: &Affine) -> Form {
    Form::chain(nested_power_chain(layers, arg))
}

/// Atoms whose product is the hypergeometric term.
pub fn hyper_to_factors(h: &HyperTerm) -> Vec<Expr> {
    let mut out = Vec::new();
    let c = h.coeff();
    if !c.is_one() || h.kernel().is_one() {
        out.push(Expr::rational(c.clone()));
    }
    let k = h.kernel();
    if !k.sign().is_zero() {
        out.push(Expr::power(-Rational::one(), k.sign().clone()));
    }
    for (b, m) in k.bases() {
        out.push(Expr::power(Rational::from_integer(b.clone()), m.clone()));
    }
    let mut facts: Vec<(Affine, i32)> = k.facts().to_vec();
    while let Some((top, a, b, s)) = binomial_triple(&facts) {
        for (l, d) in [(&top, s), (&a, -s), (&b, -s)] {
            let e = facts.iter_mut().find(|(x, _)| x == l).expect("present");
            e.1 -= d;
        }
        facts.retain(|(_, e)| *e != 0);
        let f = Expr::Atom(Atom::Binomial(top, a));
        out.push(if s == 1 { f } else { Expr::Pow(Box::new(f), -1) });
    }
    for (l, e) in &facts {
        let f = Expr::Atom(Atom::Factorial(l.clone()));
        out.push(if *e == 1 { f } else { Expr::Pow(Box::new(f), *e as i64) });
    }
    out
}

/// `top!/(a!·b!)` with `a + b = top`, all nonconstant, as found among the
/// factorials with exponent sign `s` on `top` and `−s` on `a` and `b`.
fn binomial_triple(facts: &[(Affine, i32)]) -> Option<(Affine, Affine, Affine, i32)> {
    for (top, et) in facts {
        if top.is_constant() {
            continue;
        }
        let s = et.signum();
        for (a, ea) in facts {
            if ea.signum() != -s || a.is_constant() {
                continue;
            }
            let b = top.sub(a);
            if b.is_constant() {
                continue;
            }
            let need = if &b == a { 2 } else { 1 };
            let ok = facts.iter().any(|(x, e)| x == &b && e.signum() == -s && e.abs() >= need);
            if ok {
                return Some((top.clone(), a.clone(), b, s));
            }
        }
    }
    None
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sum({},{},{},{})", self.var, self.lower, self.upper, self.body)
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.hyper)?;
        for c in &self.chains {
            write!(f, "*{c}")?;
        }
        Ok(())
    }
}
