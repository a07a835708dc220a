//! Words of S-sum letters, the quasi-shuffle product and polynomials in
//! S-sums with hypergeometric coefficients.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::{MRatFunc, Rational, Symbol};
use crate::expr::{ssum_value, Affine, Env};
use crate::form::{ssum_form, Form, FormError};
use crate::hyper::{HyperTerm, Kernel};

/// One layer `x^i/i^m` of an S-sum; harmonic index `±m` is `x = ±1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Letter {
    pub m: u32,
    pub x: Rational,
}

impl Letter {
    pub fn new(m: u32, x: Rational) -> Letter {
        Letter { m, x }
    }

    pub fn harmonic(index: i64) -> Letter {
        let x = if index < 0 { -Rational::one() } else { Rational::one() };
        Letter { m: index.unsigned_abs() as u32, x }
    }

    /// The signed harmonic index, if the weight is `±1`.
    pub fn as_harmonic(&self) -> Option<i64> {
        if self.x.is_one() {
            Some(self.m as i64)
        } else if (-&self.x).is_one() {
            Some(-(self.m as i64))
        } else {
            None
        }
    }

    fn contract(&self, o: &Letter) -> Letter {
        Letter { m: self.m + o.m, x: &self.x * &o.x }
    }

    fn rank(&self) -> (u32, u8, Rational, Rational) {
        let class = if self.x.is_one() {
            0
        } else if (-&self.x).is_one() {
            1
        } else if self.x.is_positive() {
            2
        } else {
            3
        };
        (self.m, class, self.x.abs(), self.x.clone())
    }
}

impl Ord for Letter {
    fn cmp(&self, o: &Self) -> Ordering {
        self.rank().cmp(&o.rank())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

pub type Word = Vec<Letter>;

pub fn weight(w: &[Letter]) -> u32 {
    w.iter().map(|l| l.m).sum()
}

pub fn harmonic_word(indices: &[i64]) -> Word {
    indices.iter().map(|&m| Letter::harmonic(m)).collect()
}

pub fn word_value(w: &[Letter], n: i64) -> Rational {
    if w.is_empty() {
        return Rational::one();
    }
    let ms: Vec<u32> = w.iter().map(|l| l.m).collect();
    let xs: Vec<Rational> = w.iter().map(|l| l.x.clone()).collect();
    ssum_value(&ms, &xs, n)
}

/// `S_a · S_b` as an integer combination of single words.
pub fn quasi_shuffle(a: &[Letter], b: &[Letter]) -> BTreeMap<Word, i64> {
    let mut out = BTreeMap::new();
    if a.is_empty() || b.is_empty() {
        let w: Word = if a.is_empty() { b.to_vec() } else { a.to_vec() };
        out.insert(w, 1);
        return out;
    }
    let mut put = |head: &Letter, tail: BTreeMap<Word, i64>, sign: i64| {
        for (w, c) in tail {
            let mut full = alloc::vec![head.clone()];
            full.extend(w);
            *out.entry(full).or_insert(0) += sign * c;
        }
    };
    put(&a[0], quasi_shuffle(&a[1..], b), 1);
    put(&b[0], quasi_shuffle(a, &b[1..]), 1);
    put(&a[0].contract(&b[0]), quasi_shuffle(&a[1..], &b[1..]), -1);
    out.retain(|_, c| *c != 0);
    out
}

/// A term `coeff·x^…` with the product `Π S_{w}(arg)` of sorted words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumMonomial {
    pub coeff: HyperTerm,
    pub sums: Vec<Word>,
}

/// Linear combination of S-sum products at one common argument.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SumPoly {
    pub terms: BTreeMap<(Kernel, Vec<Word>), MRatFunc>,
}

impl SumPoly {
    pub fn zero() -> SumPoly {
        SumPoly::default()
    }

    pub fn one() -> SumPoly {
        SumPoly::from_hyper(&HyperTerm::one())
    }

    pub fn from_hyper(h: &HyperTerm) -> SumPoly {
        let mut p = SumPoly::zero();
        p.push(h.kernel().clone(), Vec::new(), h.coeff().clone());
        p
    }

    pub fn word(w: Word) -> SumPoly {
        let mut p = SumPoly::zero();
        let sums = if w.is_empty() { Vec::new() } else { alloc::vec![w] };
        p.push(Kernel::one(), sums, MRatFunc::one());
        p
    }

    pub fn monomial(coeff: &HyperTerm, mut sums: Vec<Word>) -> SumPoly {
        sums.retain(|w| !w.is_empty());
        sums.sort();
        let mut p = SumPoly::zero();
        p.push(coeff.kernel().clone(), sums, coeff.coeff().clone());
        p
    }

    fn push(&mut self, k: Kernel, sums: Vec<Word>, c: MRatFunc) {
        if c.is_zero() {
            return;
        }
        let key = (k, sums);
        let e = self.terms.entry(key.clone()).or_insert_with(MRatFunc::zero);
        *e = &*e + &c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &SumPoly) -> SumPoly {
        let mut out = self.clone();
        for ((k, s), c) in &o.terms {
            out.push(k.clone(), s.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &SumPoly) -> SumPoly {
        self.add(&o.scale_hyper(&HyperTerm::constant(-Rational::one())))
    }

    pub fn scale_hyper(&self, h: &HyperTerm) -> SumPoly {
        let mut out = SumPoly::zero();
        for ((k, s), c) in &self.terms {
            let t = HyperTerm::new(c.clone(), k.clone()).mul(h);
            out.push(t.kernel().clone(), s.clone(), t.coeff().clone());
        }
        out
    }

    pub fn mul(&self, o: &SumPoly) -> SumPoly {
        let mut out = SumPoly::zero();
        for ((k1, s1), c1) in &self.terms {
            for ((k2, s2), c2) in &o.terms {
                let t = HyperTerm::new(c1.clone(), k1.clone()).mul(&HyperTerm::new(c2.clone(), k2.clone()));
                let mut s = s1.clone();
                s.extend(s2.iter().cloned());
                s.sort();
                out.push(t.kernel().clone(), s, t.coeff().clone());
            }
        }
        out
    }

    pub fn monomials(&self) -> Vec<SumMonomial> {
        self.terms
            .iter()
            .map(|((k, s), c)| SumMonomial { coeff: HyperTerm::new(c.clone(), k.clone()), sums: s.clone() })
            .collect()
    }

    /// Every word occurring, each once.
    pub fn words(&self) -> Vec<Word> {
        let mut ws: Vec<Word> = self.terms.keys().flat_map(|(_, s)| s.iter().cloned()).collect();
        ws.sort();
        ws.dedup();
        ws
    }

    pub fn max_weight(&self) -> u32 {
        self.words().iter().map(|w| weight(w)).max().unwrap_or(0)
    }

    /// Products of sums expanded into single words.
    pub fn linearize(&self) -> SumPoly {
        let mut out = SumPoly::zero();
        for ((k, s), c) in &self.terms {
            let mut acc: BTreeMap<Word, i64> = BTreeMap::new();
            acc.insert(Vec::new(), 1);
            for w in s {
                let mut next = BTreeMap::new();
                for (u, cu) in &acc {
                    for (v, cv) in quasi_shuffle(u, w) {
                        *next.entry(v).or_insert(0) += cu * cv;
                    }
                }
                next.retain(|_, c| *c != 0);
                acc = next;
            }
            for (w, cw) in acc {
                let sums = if w.is_empty() { Vec::new() } else { alloc::vec![w] };
                out.push(k.clone(), sums, c.scale(&Rational::from_integer(cw.into())));
            }
        }
        out
    }

    pub fn to_form(&self, arg: &Affine) -> Form {
        let mut out = Form::zero();
        for ((k, s), c) in &self.terms {
            let mut t = Form::from_hyper(HyperTerm::new(c.clone(), k.clone()));
            for w in s {
                let layers: Vec<(u32, Rational)> = w.iter().map(|l| (l.m, l.x.clone())).collect();
                t = t.mul(&ssum_form(&layers, arg));
            }
            out = out.add(&t);
        }
        out
    }

    /// Value with the sums taken at `env[n]`.
    pub fn eval(&self, n: Symbol, env: &Env) -> Result<Rational, FormError> {
        let at = *env.get(&n).ok_or_else(|| FormError::Unsupported(alloc::format!("{n} unbound")))?;
        let mut acc = Rational::zero();
        for ((k, s), c) in &self.terms {
            let mut v = HyperTerm::new(c.clone(), k.clone()).eval(env)?;
            for w in s {
                v *= word_value(w, at);
            }
            acc += v;
        }
        Ok(acc)
    }
}

/// `S_w(n + c)` in terms of sums at `n`.
pub fn synchronize(w: &[Letter], n: Symbol, c: i64) -> SumPoly {
    if w.is_empty() {
        return SumPoly::one();
    }
    if c == 0 {
        return SumPoly::word(w.to_vec());
    }
    let step = |k: i64| -> HyperTerm {
        let at = Affine::var(n).add_const(k);
        let inv = MRatFunc::from_poly(at.to_mpoly()).pow(-(w[0].m as i64)).expect("nonzero");
        HyperTerm::power(&w[0].x, &at).scale(&inv)
    };
    if c > 0 {
        synchronize(w, n, c - 1).add(&synchronize(&w[1..], n, c).scale_hyper(&step(c)))
    } else {
        synchronize(w, n, c + 1).sub(&synchronize(&w[1..], n, c + 1).scale_hyper(&step(c + 1)))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_harmonic() {
            Some(m) => write!(f, "{m}"),
            None => write!(f, "{}@{}", self.m, self.x),
        }
    }
}

impl fmt::Debug for SumPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for ((k, s), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{:?}", HyperTerm::new(c.clone(), k.clone()))?;
            for w in s {
                write!(f, "*S[")?;
                for (i, l) in w.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{l}")?;
                }
                write!(f, "]")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
