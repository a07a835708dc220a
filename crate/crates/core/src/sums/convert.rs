//! Partial fractions and the rewriting of rational sums into S-sums.

use alloc::vec::Vec;

use num_traits::One;

use crate::arith::{MPoly, MRatFunc, Rational, Symbol};
use crate::domain::Domain;
use crate::expr::{ssum_value, Affine};
use crate::form::{ssum_form, Form};
use crate::gosper::telescope_definite;
use crate::hyper::HyperTerm;
use crate::recsolve::linear_factors;

use super::algebra::{synchronize, Letter};

/// `r = poly + Σ coeff/(v − root)^power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFractions {
    pub poly: MRatFunc,
    pub parts: Vec<(MPoly, u32, MRatFunc)>,
}

fn series_quotient(p: &[MPoly], q: &[MPoly], len: usize) -> Vec<MRatFunc> {
    let at = |xs: &[MPoly], k: usize| MRatFunc::from_poly(xs.get(k).cloned().unwrap_or_else(MPoly::zero));
    let q0 = at(q, 0);
    let mut s: Vec<MRatFunc> = Vec::with_capacity(len);
    for k in 0..len {
        let mut acc = at(p, k);
        for l in 1..=k {
            acc = &acc - &(&at(q, l) * &s[k - l]);
        }
        s.push(&acc / &q0);
    }
    s
}

/// Decomposes `r` over its linear denominator factors in `v`; `None` if
/// the denominator has a nonlinear factor in `v`.
pub fn partial_fractions(r: &MRatFunc, v: Symbol) -> Option<PartialFractions> {
    let den = r.den();
    let (roots, rest) = linear_factors(den, v);
    if rest.degree_in(v) > 0 {
        return None;
    }
    let mut parts = Vec::new();
    let mut remainder = r.clone();
    let t = Symbol::fresh();
    for (rho, m) in &roots {
        let m = *m as usize;
        let shift = &MPoly::var(t) + rho;
        // r = P / ((v-ρ)^m Q)
        let lin = &MPoly::var(v) - rho;
        let q = den.div_exact(&lin.pow(m as u32)).expect("factor divides");
        let p_t = r.num().subst(v, &shift).to_univariate(t);
        let q_t = q.subst(v, &shift).to_univariate(t);
        let s = series_quotient(&p_t, &q_t, m);
        for (k, c) in s.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let power = (m - k) as u32;
            let term = &c / &MRatFunc::from_poly(lin.pow(power));
            remainder = &remainder - &term;
            parts.push((rho.clone(), power, c));
        }
    }
    if remainder.den().contains(v) {
        return None;
    }
    Some(PartialFractions { poly: remainder, parts })
}

/// `x` with `kernel = x^v`, when the kernel depends on `v` through a
/// geometric factor only.
pub(crate) fn geometric_base(h: &HyperTerm, v: Symbol) -> Option<Rational> {
    let k = h.kernel();
    if k.facts().iter().any(|(l, _)| l.contains(v)) {
        return None;
    }
    let mut x = Rational::one();
    for (b, m) in k.bases() {
        let a = m.coeff(v);
        x *= crate::arith::rational::rat_pow(&Rational::from_integer(b.clone()), a);
    }
    if k.sign().coeff(v) % 2 != 0 {
        x = -x;
    }
    Some(x)
}

/// `Σ_{v=lower}^{upper} h(v)` in terms of S-sums for `h = x^v · r(v)` with
/// `r` split into linear factors with unit slope in `v`; `None` otherwise.
/// `domain` must contain `v` with the given range.
pub fn rational_to_harmonic(h: &HyperTerm, v: Symbol, lower: &Affine, upper: &Affine, domain: &Domain) -> Option<Form> {
    let (dep, free) = h.split(v);
    let x = geometric_base(&dep, v)?;
    // dep = c(v) · x^v · (constant kernel part)
    let kernel_only = HyperTerm::new(MRatFunc::one(), dep.kernel().clone());
    let r = dep.coeff().clone();
    let pf = partial_fractions(&r, v)?;
    let mut out = Form::zero();
    if !pf.poly.is_zero() {
        let t = kernel_only.scale(&pf.poly);
        out = out.add(&telescope_definite(&t, v, lower, upper)?);
    }
    let xv = |e: &Affine| HyperTerm::power(&x, e);
    for (rho, m, c) in &pf.parts {
        let (rc, raff) = affine_of(rho)?;
        // Σ_v x^v/(v − ρ)^m with k = v − ρ.
        let shift = raff.add_const(rc);
        let klo = lower.sub(&shift);
        let khi = upper.sub(&shift);
        let kernel_scale = kernel_only.mul(&xv(&Affine::var(v)).inv().ok()?);
        let coeff = HyperTerm::from_coeff(c.clone()).mul(&kernel_scale);
        let piece = if domain.min_of(&klo).is_some_and(|m| m >= 1) {
            // x^ρ (S_m(x; khi) − S_m(x; klo − 1))
            let s = layer_sum(*m, &x, &khi).sub(&layer_sum(*m, &x, &klo.add_const(-1)));
            s.mul_hyper(&xv(&shift))
        } else if domain.max_of(&khi).is_some_and(|m| m <= -1) {
            // k' = ρ − v ≥ 1: x^ρ (−1)^m Σ_{k'} x^{−k'}/k'^m
            let xi = Rational::one() / &x;
            let hi2 = klo.neg();
            let lo2 = khi.neg();
            let s = layer_sum(*m, &xi, &hi2).sub(&layer_sum(*m, &xi, &lo2.add_const(-1)));
            let sign = if m % 2 == 1 { -Rational::one() } else { Rational::one() };
            s.mul_hyper(&xv(&shift).scale(&MRatFunc::constant(sign)))
        } else {
            return None;
        };
        out = out.add(&piece.mul_hyper(&coeff));
    }
    // `coeff` carries no `v` once the factor x^v is divided off.
    if out.depends_on(v) {
        return None;
    }
    Some(out.mul_hyper(&free))
}

/// `S_m(x; arg)`, evaluated at constant arguments and synchronized to the
/// bare variable at arguments `var + c`.
fn layer_sum(m: u32, x: &Rational, arg: &Affine) -> Form {
    if let Some(c) = arg.as_constant() {
        return Form::rational(MRatFunc::constant(ssum_value(&[m], core::slice::from_ref(x), c)));
    }
    if let [(v, 1)] = arg.terms() {
        let c = arg.constant_term();
        if c.abs() <= 8 {
            return synchronize(&[Letter::new(m, x.clone())], *v, c).to_form(&Affine::var(*v));
        }
    }
    ssum_form(&[(m, x.clone())], arg)
}

fn affine_of(p: &MPoly) -> Option<(i64, Affine)> {
    let c = p.constant_term();
    if !c.is_integer() {
        return None;
    }
    let ci: i64 = c.to_integer().try_into().ok()?;
    let lin = p - &MPoly::constant(c);
    Some((ci, Affine::from_mpoly(&lin)?))
}
