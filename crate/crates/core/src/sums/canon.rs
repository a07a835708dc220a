//! Recognition of nested sums as S-sums and the final normalization pass.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::arith::{MPoly, MRatFunc, Rational, Symbol};
use crate::expr::{Affine, Env};
use crate::form::{Chain, Form};
use crate::gosper::parameterized_gosper;
use crate::hyper::{HyperTerm, Kernel};

use super::algebra::{synchronize, word_value, Letter, SumPoly, Word};
use super::basis::reduce_to_basis;
use super::convert::{geometric_base, partial_fractions};

/// The chain as `S_w(arg)`, when it has exactly the shape built by [`crate::form::ssum_form`].
pub fn chain_as_word(c: &Chain) -> Option<(Word, Affine)> {
    if c.lower != Affine::constant(1) {
        return None;
    }
    let [t] = c.body.terms.as_slice() else { return None };
    let i = c.var;
    let x = geometric_base(&t.hyper, i)?;
    if !t.hyper.kernel().split(i).1.is_one() {
        return None;
    }
    let coeff = t.hyper.coeff();
    let m = match (coeff.num().constant_value(), coeff.den().to_univariate(i)) {
        (Some(num), den) if num.is_one() && den.len() >= 2 => {
            let deg = den.len() - 1;
            let mono = den.iter().enumerate().all(|(k, c)| if k == deg { c.is_one() } else { c.is_zero() });
            if !mono {
                return None;
            }
            deg as u32
        }
        _ => return None,
    };
    // HyperTerm::power folds x^0 into the coefficient, so x is the full weight.
    let head = Letter::new(m, x);
    let mut w = alloc::vec![head];
    match t.chains.as_slice() {
        [] => {}
        [inner] => {
            let (rest, arg) = chain_as_word(inner)?;
            if arg != Affine::var(i) {
                return None;
            }
            w.extend(rest);
        }
        _ => return None,
    }
    Some((w, c.upper.clone()))
}

/// `Σ_{i=lo}^{n+k} r(i)·S_w(i)` for `r = ρ(i)·x^i` with `ρ` a proper rational
/// function whose poles are at integers.
fn sum_times_word(r: &HyperTerm, w: &[Letter], i: Symbol, lo: i64, n: Symbol, k: i64) -> Option<SumPoly> {
    if r.is_zero() {
        return Some(SumPoly::zero());
    }
    if !r.vars().iter().all(|v| *v == i) {
        return None;
    }
    let x = geometric_base(r, i)?;
    let rho = r.div(&HyperTerm::power(&x, &Affine::var(i))).ok()?;
    if rho.kernel().depends_on(i) {
        return None;
    }
    let konst = HyperTerm::new(MRatFunc::one(), rho.kernel().clone());
    let pf = partial_fractions(rho.coeff(), i)?;
    let mut out = SumPoly::zero();
    if !pf.poly.is_zero() {
        out = poly_times_word(&pf.poly, &x, w, i, lo, n, k)?.scale_hyper(&konst);
    }
    for (root, p, c) in &pf.parts {
        let c = c.constant_value()?;
        let a_rat = -root.constant_value()?;
        if !a_rat.is_integer() {
            return None;
        }
        let a: i64 = a_rat.to_integer().try_into().ok()?;
        // u = i + a runs over lo + a ..= n + k + a.
        let u_lo = lo + a;
        if u_lo < 1 {
            return None;
        }
        let u = Symbol::fresh();
        let scale = HyperTerm::power(&x, &Affine::constant(-a)).scale(&MRatFunc::constant(c)).mul(&konst);
        let head = Letter::new(*p, x.clone());
        for ((kern, sums), coef) in &synchronize(w, u, -a).terms {
            let base = HyperTerm::new(coef.clone(), kern.clone());
            let inner: Word = match sums.as_slice() {
                [] => Vec::new(),
                [s] => s.clone(),
                _ => return None,
            };
            let piece = if !base.depends_on(u) {
                let mut word = alloc::vec![head.clone()];
                word.extend(inner.iter().cloned());
                let tail = word_value(&word, u_lo - 1);
                synchronize(&word, n, k + a).sub(&SumPoly::from_hyper(&HyperTerm::constant(tail))).scale_hyper(&base)
            } else {
                let uv = MRatFunc::from_poly(MPoly::var(u)).pow(-(*p as i64)).ok()?;
                let term = base.mul(&HyperTerm::power(&x, &Affine::var(u)).scale(&uv));
                sum_times_word(&term, &inner, u, u_lo, n, k + a)?
            };
            out = out.add(&piece.scale_hyper(&scale));
        }
    }
    Some(out)
}

/// `Σ_t c_t·binomial(a, t)` for the forward differences `c_t` of `vals` at `0, 1, ...`.
fn newton(vals: &[Rational], a: &MPoly) -> MPoly {
    let mut diffs = vals.to_vec();
    let mut out = MPoly::zero();
    let mut basis = MPoly::one();
    for t in 0..vals.len() {
        out = &out + &basis.scale(&diffs[0]);
        basis = (&basis * &(a - &MPoly::from_int(t as i64))).scale(&(Rational::one() / Rational::from_integer((t as i64 + 1).into())));
        diffs = diffs.windows(2).map(|d| &d[1] - &d[0]).collect();
    }
    out
}

/// Values at `0..=deg` of the polynomial `Q` with `x·Q(i+1) − Q(i) = P(i)`.
fn geometric_antidifference(p: &MRatFunc, x: &Rational, i: Symbol) -> Option<Vec<Rational>> {
    let dp = p.num().degree_in(i) as usize;
    let at = |t: usize| -> Option<Rational> { p.eval(&[(i, Rational::from_integer((t as i64).into()))].into_iter().collect()).ok().flatten() };
    if x.is_one() {
        let mut vals = alloc::vec![Rational::zero()];
        for t in 0..=dp {
            let next = vals[t].clone() + at(t)?;
            vals.push(next);
        }
        return Some(vals);
    }
    // Q = Σ_k (−x/(x−1))^k Δ^k P / (x−1)
    let pv: Vec<Rational> = (0..=2 * dp).map(at).collect::<Option<_>>()?;
    let xm1 = x - Rational::one();
    let ratio = -(x / &xm1);
    let mut table = alloc::vec![pv];
    for _ in 0..dp {
        let last = table.last().expect("nonempty");
        let next: Vec<Rational> = last.windows(2).map(|d| &d[1] - &d[0]).collect();
        table.push(next);
    }
    let vals = (0..=dp)
        .map(|t| {
            let mut acc = Rational::zero();
            let mut pw = Rational::one();
            for row in &table {
                acc += &pw * &row[t];
                pw *= &ratio;
            }
            acc / &xm1
        })
        .collect();
    Some(vals)
}

/// `Σ_{i=lo}^{n+k} P(i)·x^i·S_w(i)` for a polynomial `P`, by summation by parts
/// with `T(i) = x^i·Q(i)`, `ΔT = x^i·P`.
fn poly_times_word(p: &MRatFunc, x: &Rational, w: &[Letter], i: Symbol, lo: i64, n: Symbol, k: i64) -> Option<SumPoly> {
    if lo < 1 {
        return None;
    }
    let vals = geometric_antidifference(p, x, i)?;
    let t_at = |a: &Affine| HyperTerm::power(x, a).scale(&MRatFunc::from_poly(newton(&vals, &a.to_mpoly())));
    let top = t_at(&Affine::var(n).add_const(k + 1));
    let bottom = t_at(&Affine::constant(lo)).scale(&MRatFunc::constant(word_value(w, lo - 1)));
    let mut out = synchronize(w, n, k).scale_hyper(&top).sub(&SumPoly::from_hyper(&bottom));
    if let Some((head, rest)) = w.split_first() {
        // S_w(i) − S_w(i−1) = x1^i/i^m1 · S_rest(i)
        let step = MRatFunc::from_poly(MPoly::var(i)).pow(-(head.m as i64)).ok()?;
        let r = t_at(&Affine::var(i)).mul(&HyperTerm::power(&head.x, &Affine::var(i)).scale(&step));
        out = out.sub(&sum_times_word(&r, rest, i, lo, n, k)?);
    }
    Some(out)
}

/// The chain as a polynomial in S-sums at `n`.
fn chain_to_sumpoly(c: &Chain, n: Symbol) -> Option<SumPoly> {
    if c.upper.coeff(n) != 1 || c.upper.terms().len() != 1 {
        return None;
    }
    let k = c.upper.constant_term();
    let lo = c.lower.as_constant()?;
    if !c.body.vars().iter().all(|v| *v == c.var) {
        return None;
    }
    let (inner, left) = form_to_sumpoly(&c.body, c.var);
    if !left.is_zero() {
        return None;
    }
    let mut out = SumPoly::zero();
    for ((kern, sums), coef) in &inner.linearize().terms {
        let w: Word = match sums.as_slice() {
            [] => Vec::new(),
            [s] => s.clone(),
            _ => return None,
        };
        let r = HyperTerm::new(coef.clone(), kern.clone());
        out = out.add(&sum_times_word(&r, &w, c.var, lo, n, k)?);
    }
    Some(out)
}

/// Splits `f` into a polynomial in S-sums at `n` and the terms that resist.
pub fn form_to_sumpoly(f: &Form, n: Symbol) -> (SumPoly, Form) {
    let mut poly = SumPoly::zero();
    let mut left = Form::zero();
    for t in &f.terms {
        let mut acc = Some(SumPoly::from_hyper(&t.hyper));
        for c in &t.chains {
            acc = acc.and_then(|a| Some(a.mul(&chain_to_sumpoly(c, n)?)));
        }
        match acc {
            Some(p) => poly = poly.add(&p),
            None => left = left.add(&Form::from_terms(alloc::vec![t.clone()])),
        }
    }
    (poly, left)
}

/// Coefficients tried, in order, for the reduced summand of a hypergeometric sum.
fn candidates(i: Symbol) -> Vec<MRatFunc> {
    let iv = MPoly::var(i);
    let mut out = alloc::vec![MRatFunc::one()];
    for s in [0, 1, -1, 2] {
        let lin = &iv + &MPoly::from_int(s);
        out.push(MRatFunc::from_poly(lin).inv().expect("nonzero"));
    }
    out.push(MRatFunc::from_poly(iv.clone()));
    out
}

/// `Σ_{i=lo}^{n+k} h(i)` as `c·Σ_{i=1}^{n} q(i)·K(i)` plus boundary terms,
/// with `q` the first candidate for which the difference telescopes.
fn reduce_hyper_chain(c: &Chain, n: Symbol) -> Option<Form> {
    if c.upper.coeff(n) != 1 || c.upper.terms().len() != 1 {
        return None;
    }
    let k = c.upper.constant_term();
    let lo = c.lower.as_constant()?;
    let [t] = c.body.terms.as_slice() else { return None };
    if !t.chains.is_empty() || !c.body.vars().iter().all(|v| *v == c.var) {
        return None;
    }
    let i = c.var;
    let kernel: Kernel = t.hyper.kernel().clone();
    let r = t.hyper.coeff().clone();
    let kh = HyperTerm::new(MRatFunc::one(), kernel.clone());
    for q in candidates(i) {
        let (scale, cert) = if q == r {
            (Rational::one(), Form::zero())
        } else {
            let Some(pt) = parameterized_gosper(&kernel, &[r.clone(), q.clone()], i) else { continue };
            let (Some(c0), Some(c1)) = (pt.coeffs[0].constant_value(), pt.coeffs[1].constant_value()) else { continue };
            if c0.is_zero() || c1.is_zero() {
                continue;
            }
            // r·K = −(c1/c0)·q·K + Δ(cert/c0)
            let inv = MRatFunc::constant(Rational::one() / &c0);
            (-(c1 / &c0), Form::from_hyper(pt.cert.scale(&inv)))
        };
        let body = Form::from_hyper(kh.scale(&q));
        let upper = c.upper.clone();
        let boundary = match (cert.subst(i, &upper.add_const(1)), cert.subst(i, &Affine::constant(lo))) {
            (Ok(a), Ok(b)) => a.sub(&b),
            _ => continue,
        };
        // Σ_{lo}^{n+k} = Σ_1^{n} − Σ_1^{lo−1} + (Σ_{n+1}^{n+k} or −Σ_{n+k+1}^{n}).
        let mut head = Rational::zero();
        let mut ok = true;
        for x in 1..lo {
            let env: Env = [(i, x)].into_iter().collect();
            match body.eval(&env) {
                Ok(v) => head += v,
                Err(_) => ok = false,
            }
        }
        if !ok || lo < 1 {
            continue;
        }
        let mut edge = Form::zero();
        for s in 1..=k.abs() {
            let at = if k > 0 { Affine::var(n).add_const(s) } else { Affine::var(n).add_const(1 - s) };
            let Ok(v) = body.subst(i, &at) else {
                ok = false;
                break;
            };
            edge = if k > 0 { edge.add(&v) } else { edge.sub(&v) };
        }
        if !ok {
            continue;
        }
        let main = Form::chain(Chain::new(i, Affine::constant(1), Affine::var(n), body));
        let total = main.add(&edge).sub(&Form::from_hyper(HyperTerm::constant(head)));
        return Some(total.scale(&MRatFunc::constant(scale)).add(&boundary));
    }
    None
}

/// Rewrites the recognizable nested sums of `f` into basis S-sums at
/// argument `n`; other hypergeometric sums are reduced to a simple summand
/// running over `1..=n`.
pub fn to_basis_form(f: &Form, n: Symbol, weight_cap: u32) -> Form {
    let (poly, left) = form_to_sumpoly(f, n);
    let poly = match reduce_to_basis(&poly, weight_cap) {
        Ok((q, _)) => q,
        Err(_) => poly,
    };
    let mut out = poly.to_form(&Affine::var(n));
    for t in &left.terms {
        let mut acc = Form::from_hyper(t.hyper.clone());
        for c in &t.chains {
            let part = reduce_hyper_chain(c, n).unwrap_or_else(|| Form::chain(c.clone()));
            acc = acc.mul(&part);
        }
        out = out.add(&acc);
    }
    out
}

