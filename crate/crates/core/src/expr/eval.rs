//! Exact evaluation by direct summation.

use alloc::collections::BTreeMap;
use alloc::string::String;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{atom_label, Atom, Env, Expr, HarmonicSumRef, SSumRef};
use crate::arith::rational::{factorial, rat_pow};
use crate::arith::{ArithError, Rational, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound variable {0}")]
    Unbound(Symbol),
    #[error("domain error in {atom}: {reason}")]
    Domain { atom: String, reason: &'static str },
    #[error("evaluation budget exhausted")]
    Budget,
}

pub fn evaluate(expr: &Expr, env: &Env) -> Result<Rational, EvalError> {
    let mut budget = u64::MAX;
    evaluate_counted(expr, env, &mut budget)
}

/// Like [`evaluate`], charging one unit per summand evaluation against `budget`.
pub fn evaluate_counted(expr: &Expr, env: &Env, budget: &mut u64) -> Result<Rational, EvalError> {
    match expr {
        Expr::Atom(a) => eval_atom(a, env),
        Expr::Harmonic(h) => {
            let n = h.arg.eval(env).ok_or_else(|| unbound(&h.arg.vars(), env))?;
            charge(budget, n.max(0) as u64)?;
            Ok(harmonic_value(&h.indices, n))
        }
        Expr::SSum(s) => {
            let n = s.arg.eval(env).ok_or_else(|| unbound(&s.arg.vars(), env))?;
            charge(budget, n.max(0) as u64)?;
            Ok(ssum_value(&s.indices, &s.weights, n))
        }
        Expr::Add(v) => {
            let mut acc = Rational::zero();
            for t in v {
                acc += evaluate_counted(t, env, budget)?;
            }
            Ok(acc)
        }
        Expr::Mul(v) => {
            let mut acc = Rational::one();
            for t in v {
                let x = evaluate_counted(t, env, budget)?;
                if x.is_zero() {
                    // Remaining factors must still be defined.
                    for rest in v {
                        evaluate_counted(rest, env, budget)?;
                    }
                    return Ok(x);
                }
                acc *= x;
            }
            Ok(acc)
        }
        Expr::Pow(b, k) => {
            let x = evaluate_counted(b, env, budget)?;
            if x.is_zero() && *k < 0 {
                return Err(EvalError::Domain { atom: alloc::format!("{expr}"), reason: "zero to a negative power" });
            }
            Ok(rat_pow(&x, *k))
        }
        Expr::Sum(s) => {
            let lo = s.lower.eval(env).ok_or_else(|| unbound(&s.lower.vars(), env))?;
            let hi = s.upper.eval(env).ok_or_else(|| unbound(&s.upper.vars(), env))?;
            let mut acc = Rational::zero();
            if hi < lo {
                return Ok(acc);
            }
            charge(budget, (hi - lo + 1) as u64)?;
            let mut inner = env.clone();
            for v in lo..=hi {
                inner.insert(s.var, v);
                acc += evaluate_counted(&s.body, &inner, budget)?;
            }
            Ok(acc)
        }
    }
}

fn charge(budget: &mut u64, n: u64) -> Result<(), EvalError> {
    if *budget < n {
        return Err(EvalError::Budget);
    }
    *budget -= n;
    Ok(())
}

fn unbound(vars: &alloc::collections::BTreeSet<Symbol>, env: &Env) -> EvalError {
    let s = vars.iter().find(|v| !env.contains_key(v)).copied().unwrap_or_else(|| crate::arith::sym("?"));
    EvalError::Unbound(s)
}

fn domain(a: &Atom, reason: &'static str) -> EvalError {
    EvalError::Domain { atom: atom_label(a), reason }
}

fn eval_atom(a: &Atom, env: &Env) -> Result<Rational, EvalError> {
    let ev = |x: &super::Affine| x.eval(env).ok_or_else(|| unbound(&x.vars(), env));
    match a {
        Atom::Factorial(x) => {
            let n = ev(x)?;
            if n < 0 {
                return Err(domain(a, "negative factorial argument"));
            }
            Ok(Rational::from_integer(factorial(n as u64)))
        }
        Atom::Binomial(n, k) => Ok(Rational::from_integer(binomial(ev(n)?, ev(k)?))),
        Atom::Pochhammer(x, k) => {
            let (x, k) = (ev(x)?, ev(k)?);
            if k < 0 {
                return Err(domain(a, "negative Pochhammer length"));
            }
            let mut acc = BigInt::one();
            for t in 0..k {
                acc *= BigInt::from(x + t);
            }
            Ok(Rational::from_integer(acc))
        }
        Atom::Power(b, e) => {
            let e = ev(e)?;
            if b.is_zero() && e < 0 {
                return Err(domain(a, "zero to a negative power"));
            }
            Ok(rat_pow(b, e))
        }
        Atom::Rational(f) => {
            let env_q: BTreeMap<Symbol, Rational> =
                env.iter().map(|(s, v)| (*s, Rational::from_integer(BigInt::from(*v)))).collect();
            match f.eval(&env_q) {
                Ok(Some(v)) => Ok(v),
                Ok(None) => Err(unbound(&f.vars(), env)),
                Err(ArithError::DivisionByZero) | Err(ArithError::ZeroPolynomial) => {
                    Err(domain(a, "division by zero"))
                }
            }
        }
    }
}

/// `binomial(n, k)`: falling factorial over `k!` for `k ≥ 0`, zero for `k < 0`
/// and for `k > n ≥ 0`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || (n >= 0 && k > n) {
        return BigInt::zero();
    }
    let k = if n >= 0 && 2 * k > n { n - k } else { k };
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for t in 0..k {
        num *= BigInt::from(n - t);
        den *= BigInt::from(t + 1);
    }
    num / den
}

/// Nested harmonic sum with signed indices; zero for `n ≤ 0`.
pub fn harmonic_value(indices: &[i64], n: i64) -> Rational {
    // layer[k] holds S_{m_k,...,m_last}(i) as i runs upward.
    let depth = indices.len();
    let mut layer = alloc::vec![Rational::zero(); depth];
    for i in 1..=n.max(0) {
        let ib = Rational::from_integer(BigInt::from(i));
        for k in (0..depth).rev() {
            let m = indices[k];
            let mut term = rat_pow(&ib, -(m.abs()));
            if m < 0 && i % 2 == 1 {
                term = -term;
            }
            let inner = if k + 1 < depth { layer[k + 1].clone() } else { Rational::one() };
            layer[k] += term * inner;
        }
    }
    layer.into_iter().next().unwrap_or_else(Rational::one)
}

/// Nested S-sum `Σ x_1^{i_1}/i_1^{m_1} Σ_{i_2 ≤ i_1} ...`; zero for `n ≤ 0`.
pub fn ssum_value(indices: &[u32], weights: &[Rational], n: i64) -> Rational {
    let depth = indices.len();
    let mut layer = alloc::vec![Rational::zero(); depth];
    let mut powers: alloc::vec::Vec<Rational> = weights.iter().map(|_| Rational::one()).collect();
    for i in 1..=n.max(0) {
        let ib = Rational::from_integer(BigInt::from(i));
        for k in 0..depth {
            powers[k] *= &weights[k];
        }
        for k in (0..depth).rev() {
            let term = &powers[k] * rat_pow(&ib, -(indices[k] as i64));
            let inner = if k + 1 < depth { layer[k + 1].clone() } else { Rational::one() };
            layer[k] += term * inner;
        }
    }
    layer.into_iter().next().unwrap_or_else(Rational::one)
}

impl HarmonicSumRef {
    pub fn value_at(&self, n: i64) -> Rational {
        harmonic_value(&self.indices, n)
    }
}

impl SSumRef {
    pub fn value_at(&self, n: i64) -> Rational {
        ssum_value(&self.indices, &self.weights, n)
    }
}
