//! Structural normalization: flattening and merging of rational and power factors.

use alloc::boxed::Box;
use alloc::vec::Vec;

use num_traits::One;

use super::{evaluate, Affine, Atom, Env, Expr};
use crate::arith::rational::rat_pow;
use crate::arith::{MRatFunc, Rational};

pub fn normalize(e: &Expr) -> Expr {
    match e {
        Expr::Atom(a) => normalize_atom(a),
        Expr::Harmonic(_) | Expr::SSum(_) => e.clone(),
        Expr::Add(ts) => normalize_add(ts.iter().map(normalize).collect()),
        Expr::Mul(fs) => normalize_mul(fs.iter().map(normalize).collect()),
        Expr::Pow(b, k) => normalize_pow(normalize(b), *k),
        Expr::Sum(s) => {
            let body = normalize(&s.body);
            if body.is_zero() {
                return Expr::int(0);
            }
            Expr::sum(s.var, s.lower.clone(), s.upper.clone(), body)
        }
    }
}

fn normalize_atom(a: &Atom) -> Expr {
    match a {
        Atom::Power(b, ex) => {
            if b.is_one() {
                return Expr::int(1);
            }
            let ex = if *b == -Rational::one() { ex.mod2() } else { ex.clone() };
            if let Some(c) = ex.as_constant() {
                return Expr::constant(rat_pow(b, c));
            }
            Expr::power(b.clone(), ex)
        }
        Atom::Pochhammer(_, k) if k.as_constant() == Some(0) => Expr::int(1),
        Atom::Factorial(x) | Atom::Pochhammer(x, _) | Atom::Binomial(x, _) if x.is_constant() => {
            let all_const = match a {
                Atom::Pochhammer(_, k) | Atom::Binomial(_, k) => k.is_constant(),
                _ => true,
            };
            match all_const.then(|| evaluate(&Expr::Atom(a.clone()), &Env::new())) {
                Some(Ok(v)) => Expr::constant(v),
                _ => Expr::Atom(a.clone()),
            }
        }
        _ => Expr::Atom(a.clone()),
    }
}

fn normalize_add(ts: Vec<Expr>) -> Expr {
    let mut rational = MRatFunc::zero();
    let mut rest = Vec::new();
    let mut flat = Vec::new();
    for t in ts {
        match t {
            Expr::Add(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    for t in flat {
        match t {
            Expr::Atom(Atom::Rational(r)) => rational = &rational + &r,
            other => rest.push(other),
        }
    }
    if !rational.is_zero() {
        rest.push(Expr::rational(rational));
    }
    match rest.len() {
        0 => Expr::int(0),
        1 => rest.pop().expect("one term"),
        _ => Expr::Add(rest),
    }
}

fn normalize_mul(fs: Vec<Expr>) -> Expr {
    let mut flat = Vec::new();
    for f in fs {
        match f {
            Expr::Mul(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    let mut rational = MRatFunc::one();
    let mut powers: Vec<(Rational, Affine)> = Vec::new();
    let mut rest = Vec::new();
    for f in flat {
        match f {
            Expr::Atom(Atom::Rational(r)) => rational = &rational * &r,
            Expr::Atom(Atom::Power(b, e)) => match powers.iter_mut().find(|(pb, _)| *pb == b) {
                Some((_, pe)) => *pe = pe.add(&e),
                None => powers.push((b, e)),
            },
            other => rest.push(other),
        }
    }
    if rational.is_zero() {
        return Expr::int(0);
    }
    let mut out = Vec::new();
    let mut power_exprs = Vec::new();
    for (b, e) in powers {
        match normalize_atom(&Atom::Power(b, e)) {
            Expr::Atom(Atom::Rational(r)) => rational = &rational * &r,
            p => power_exprs.push(p),
        }
    }
    if !rational.is_one() {
        out.push(Expr::rational(rational));
    }
    power_exprs.sort();
    rest.sort();
    out.extend(power_exprs);
    out.extend(rest);
    match out.len() {
        0 => Expr::int(1),
        1 => out.pop().expect("one factor"),
        _ => Expr::Mul(out),
    }
}

fn normalize_pow(b: Expr, k: i64) -> Expr {
    if k == 0 {
        return Expr::int(1);
    }
    if k == 1 {
        return b;
    }
    match b {
        Expr::Atom(Atom::Rational(r)) => match r.pow(k) {
            Ok(p) => Expr::rational(p),
            Err(_) => match r.pow(k.abs()) {
                Ok(p) => Expr::Pow(Box::new(Expr::rational(p)), -1),
                Err(_) => Expr::Pow(Box::new(Expr::rational(r)), k),
            },
        },
        Expr::Atom(Atom::Power(base, e)) => normalize_atom(&Atom::Power(base, e.scale(k))),
        Expr::Pow(inner, k2) => normalize_pow(*inner, k * k2),
        Expr::Mul(fs) => normalize_mul(fs.into_iter().map(|f| normalize_pow(f, k)).collect()),
        other => Expr::Pow(Box::new(other), k),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, sym};

    #[test]
    fn rational_factors_cancel() {
        let x = MRatFunc::var(sym("x"));
        let a = Expr::rational(&x / &MRatFunc::from_int(2));
        let b = Expr::rational(&MRatFunc::from_int(2) / &x);
        assert_eq!(normalize(&Expr::Mul(alloc::vec![a, b])), Expr::int(1));
    }

    #[test]
    fn sign_powers_cancel() {
        let j = Affine::var(sym("j"));
        let p = Expr::power(rat(-1, 1), j);
        assert_eq!(normalize(&Expr::Mul(alloc::vec![p.clone(), p])), Expr::int(1));
    }

    #[test]
    fn sums_flatten() {
        let h = |m| Expr::Harmonic(crate::expr::HarmonicSumRef::new(alloc::vec![m], Affine::var(sym("N"))).unwrap());
        let e = Expr::Add(alloc::vec![h(1), Expr::Add(alloc::vec![h(2), h(3)])]);
        assert_eq!(normalize(&e), Expr::Add(alloc::vec![h(1), h(2), h(3)]));
    }
}
