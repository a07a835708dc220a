//! The summand language: atoms, harmonic sums, S-sums and nested sums.

mod affine;
mod eval;
mod normalize;
mod quotient;

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

pub use affine::{Affine, Env};
pub use eval::{binomial, evaluate, evaluate_counted, harmonic_value, ssum_value, EvalError};
pub use normalize::normalize;
pub use quotient::{factorial_quotient, shift_quotient};

use crate::arith::{MRatFunc, Rational, Symbol};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    Factorial(Affine),
    Binomial(Affine, Affine),
    /// Rising factorial `(base)_count`.
    Pochhammer(Affine, Affine),
    /// `base^exponent` with a nonzero rational base.
    Power(Rational, Affine),
    Rational(MRatFunc),
}

/// `S_{m_1,...,m_k}(arg)` with nonzero signed indices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct HarmonicSumRef {
    pub indices: Vec<i64>,
    pub arg: Affine,
}

/// `S_{m_1,...,m_k}(x_1,...,x_k; arg)` with positive indices and nonzero weights.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SSumRef {
    pub indices: Vec<u32>,
    pub weights: Vec<Rational>,
    pub arg: Affine,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct IndefiniteSum {
    pub var: Symbol,
    pub lower: Affine,
    pub upper: Affine,
    pub body: Box<Expr>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Expr {
    Atom(Atom),
    Harmonic(HarmonicSumRef),
    SSum(SSumRef),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, i64),
    Sum(IndefiniteSum),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Layer {
    pub var: Symbol,
    pub lower: Affine,
    pub upper: Affine,
}

/// A definite multi-sum: layers listed outermost first, innermost last.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DefiniteSum {
    pub layers: Vec<Layer>,
    pub summand: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("harmonic sum needs a nonempty index list of nonzero integers")]
    BadHarmonicIndices,
    #[error("S-sum needs equally long lists of positive indices and nonzero weights")]
    BadSSumIndices,
    #[error("power base must be nonzero")]
    ZeroBase,
    #[error("summation variable {0} is used as a bound of an outer layer")]
    Inadmissible(Symbol),
}

impl HarmonicSumRef {
    pub fn new(indices: Vec<i64>, arg: Affine) -> Result<Self, ExprError> {
        if indices.is_empty() || indices.contains(&0) {
            return Err(ExprError::BadHarmonicIndices);
        }
        Ok(HarmonicSumRef { indices, arg })
    }

    pub fn weight(&self) -> u64 {
        self.indices.iter().map(|m| m.unsigned_abs()).sum()
    }
}

impl SSumRef {
    pub fn new(indices: Vec<u32>, weights: Vec<Rational>, arg: Affine) -> Result<Self, ExprError> {
        if indices.is_empty()
            || indices.len() != weights.len()
            || indices.contains(&0)
            || weights.iter().any(|w| w.is_zero())
        {
            return Err(ExprError::BadSSumIndices);
        }
        Ok(SSumRef { indices, weights, arg })
    }
}

impl Expr {
    pub fn constant(c: Rational) -> Expr {
        Expr::Atom(Atom::Rational(MRatFunc::constant(c)))
    }

    pub fn int(n: i64) -> Expr {
        Expr::Atom(Atom::Rational(MRatFunc::from_int(n)))
    }

    pub fn var(s: Symbol) -> Expr {
        Expr::Atom(Atom::Rational(MRatFunc::var(s)))
    }

    pub fn rational(f: MRatFunc) -> Expr {
        Expr::Atom(Atom::Rational(f))
    }

    pub fn factorial(a: Affine) -> Expr {
        Expr::Atom(Atom::Factorial(a))
    }

    pub fn binomial(n: Affine, k: Affine) -> Expr {
        Expr::Atom(Atom::Binomial(n, k))
    }

    pub fn pochhammer(a: Affine, k: Affine) -> Expr {
        Expr::Atom(Atom::Pochhammer(a, k))
    }

    pub fn power(base: Rational, exp: Affine) -> Expr {
        Expr::Atom(Atom::Power(base, exp))
    }

    pub fn sum(var: Symbol, lower: Affine, upper: Affine, body: Expr) -> Expr {
        Expr::Sum(IndefiniteSum { var, lower, upper, body: Box::new(body) })
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        Expr::Mul(factors)
    }

    pub fn add(terms: Vec<Expr>) -> Expr {
        Expr::Add(terms)
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self {
            Expr::Atom(Atom::Rational(f)) => f.constant_value(),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_zero())
    }

    /// Free variables (bound summation variables excluded).
    pub fn free_vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Expr::Atom(a) => match a {
                Atom::Factorial(x) => out.extend(x.vars()),
                Atom::Binomial(x, y) | Atom::Pochhammer(x, y) => {
                    out.extend(x.vars());
                    out.extend(y.vars());
                }
                Atom::Power(_, e) => out.extend(e.vars()),
                Atom::Rational(f) => out.extend(f.vars()),
            },
            Expr::Harmonic(h) => out.extend(h.arg.vars()),
            Expr::SSum(s) => out.extend(s.arg.vars()),
            Expr::Add(v) | Expr::Mul(v) => v.iter().for_each(|e| e.collect_free(out)),
            Expr::Pow(b, _) => b.collect_free(out),
            Expr::Sum(s) => {
                let mut inner = s.body.free_vars();
                inner.remove(&s.var);
                out.extend(inner);
                out.extend(s.lower.vars());
                out.extend(s.upper.vars());
            }
        }
    }

    pub fn depends_on(&self, v: Symbol) -> bool {
        self.free_vars().contains(&v)
    }
}

impl DefiniteSum {
    /// Peels the leading chain of `Sum` nodes into layers.
    pub fn from_expr(e: Expr) -> DefiniteSum {
        let mut layers = Vec::new();
        let mut cur = e;
        while let Expr::Sum(s) = cur {
            layers.push(Layer { var: s.var, lower: s.lower, upper: s.upper });
            cur = *s.body;
        }
        DefiniteSum { layers, summand: cur }
    }

    pub fn to_expr(&self) -> Expr {
        let mut e = self.summand.clone();
        for l in self.layers.iter().rev() {
            e = Expr::sum(l.var, l.lower.clone(), l.upper.clone(), e);
        }
        e
    }

    /// Free variables of the whole sum: the parameters.
    pub fn params(&self) -> BTreeSet<Symbol> {
        self.to_expr().free_vars()
    }

    /// Checks that no layer bound mentions its own or an inner summation variable.
    pub fn check_admissible(&self) -> Result<(), ExprError> {
        for (k, l) in self.layers.iter().enumerate() {
            for inner in &self.layers[k..] {
                if l.lower.contains(inner.var) || l.upper.contains(inner.var) {
                    return Err(ExprError::Inadmissible(inner.var));
                }
            }
        }
        Ok(())
    }
}

fn write_affine_arg(f: &mut fmt::Formatter<'_>, a: &Affine) -> fmt::Result {
    write!(f, "{a}")
}

fn write_exponent(f: &mut fmt::Formatter<'_>, e: &Affine) -> fmt::Result {
    match (e.terms(), e.constant_term()) {
        ([(s, 1)], 0) => write!(f, "{s}"),
        ([], c) if c >= 0 => write!(f, "{c}"),
        _ => write!(f, "({e})"),
    }
}

fn write_rational_const(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    write!(f, "{c}")
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Factorial(a) => {
                f.write_str("Factorial(")?;
                write_affine_arg(f, a)?;
                f.write_str(")")
            }
            Atom::Binomial(n, k) => write!(f, "Binomial({n},{k})"),
            Atom::Pochhammer(a, k) => write!(f, "Pochhammer({a},{k})"),
            Atom::Power(b, e) => {
                if b.is_integer() && !b.is_negative() {
                    write_rational_const(f, b)?;
                } else {
                    f.write_str("(")?;
                    write_rational_const(f, b)?;
                    f.write_str(")")?;
                }
                f.write_str("^")?;
                write_exponent(f, e)
            }
            Atom::Rational(r) => write!(f, "{r}"),
        }
    }
}

/// Binding strength used to decide on parentheses when printing.
fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(v) if v.len() > 1 => 1,
        Expr::Add(_) => 4,
        Expr::Mul(v) if v.len() > 1 => 2,
        Expr::Mul(_) => 4,
        Expr::Atom(Atom::Rational(r)) => {
            if let Some(c) = r.constant_value() {
                if c.is_integer() && !c.is_negative() {
                    4
                } else {
                    1
                }
            } else if !r.is_polynomial() || r.num().num_terms() > 1 || r.num().lc().is_negative() {
                1
            } else if r.num().terms().next().is_some_and(|(m, c)| !c.is_one() || m.factors().len() > 1) {
                2
            } else {
                4
            }
        }
        Expr::Atom(Atom::Power(..)) => 3,
        Expr::Pow(..) => 3,
        _ => 4,
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Atom(a) => write!(f, "{a}"),
            Expr::Harmonic(h) => {
                f.write_str("S[")?;
                for (k, m) in h.indices.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, "]({})", h.arg)
            }
            Expr::SSum(s) => {
                f.write_str("SS[")?;
                for (k, m) in s.indices.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{m}")?;
                }
                f.write_str("][")?;
                for (k, w) in s.weights.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{w}")?;
                }
                write!(f, "]({})", s.arg)
            }
            Expr::Add(v) => {
                if v.is_empty() {
                    return f.write_str("0");
                }
                for (k, t) in v.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" + ")?;
                    }
                    write_wrapped(f, t, 2)?;
                }
                Ok(())
            }
            Expr::Mul(v) => {
                if v.is_empty() {
                    return f.write_str("1");
                }
                for (k, t) in v.iter().enumerate() {
                    if k > 0 {
                        f.write_str("*")?;
                    }
                    write_wrapped(f, t, 3)?;
                }
                Ok(())
            }
            Expr::Pow(b, k) => {
                write_wrapped(f, b, 4)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Expr::Sum(s) => write!(f, "Sum({},{},{},{})", s.var, s.lower, s.upper, s.body),
        }
    }
}

impl fmt::Display for DefiniteSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

pub(crate) fn atom_label(a: &Atom) -> String {
    alloc::format!("{a}")
}
