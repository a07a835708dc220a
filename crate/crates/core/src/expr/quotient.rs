//! Shift quotients `e(v+1)/e(v)` of hypergeometric expressions.

use super::{Affine, Atom, Expr};
use crate::arith::{MRatFunc, Symbol};

/// `(a(v+1))! / a(v)!` as a rational function, for an affine `a`.
pub fn factorial_quotient(a: &Affine, v: Symbol) -> MRatFunc {
    let c = a.coeff(v);
    let base = a.to_mpoly();
    let mut acc = MRatFunc::one();
    if c > 0 {
        for t in 1..=c {
            acc = &acc * &MRatFunc::from_poly(&base + &crate::arith::MPoly::from_int(t));
        }
    } else {
        for t in 0..(-c) {
            acc = &acc / &MRatFunc::from_poly(&base - &crate::arith::MPoly::from_int(t));
        }
    }
    acc
}

fn atom_quotient(a: &Atom, v: Symbol) -> Option<MRatFunc> {
    Some(match a {
        Atom::Factorial(x) => factorial_quotient(x, v),
        Atom::Binomial(n, k) => {
            let num = factorial_quotient(n, v);
            let den = &factorial_quotient(k, v) * &factorial_quotient(&n.sub(k), v);
            &num / &den
        }
        Atom::Pochhammer(x, k) => {
            let top = x.add(k).add_const(-1);
            &factorial_quotient(&top, v) / &factorial_quotient(&x.add_const(-1), v)
        }
        Atom::Power(b, e) => MRatFunc::constant(crate::arith::rational::rat_pow(b, e.coeff(v))),
        Atom::Rational(f) => {
            if f.is_zero() {
                return None;
            }
            &f.shift(v, 1) / f
        }
    })
}

/// Returns `r` with `e(v+1) = r(v)·e(v)`, or `None` when `e` is not
/// recognisably hypergeometric in `v`.
pub fn shift_quotient(e: &Expr, v: Symbol) -> Option<MRatFunc> {
    if !e.depends_on(v) {
        return (!e.is_zero()).then(MRatFunc::one);
    }
    match e {
        Expr::Atom(a) => atom_quotient(a, v),
        Expr::Harmonic(_) | Expr::SSum(_) | Expr::Sum(_) => None,
        Expr::Mul(fs) => {
            let mut acc = MRatFunc::one();
            for f in fs {
                acc = &acc * &shift_quotient(f, v)?;
            }
            Some(acc)
        }
        Expr::Pow(b, k) => shift_quotient(b, v)?.pow(*k).ok(),
        Expr::Add(ts) => {
            let mut common: Option<MRatFunc> = None;
            for t in ts {
                if t.is_zero() {
                    continue;
                }
                let q = shift_quotient(t, v)?;
                match &common {
                    None => common = Some(q),
                    Some(c) if *c == q => {}
                    Some(_) => return None,
                }
            }
            common
        }
    }
}
