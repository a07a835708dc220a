//! Summation of forms over a range whose bounds may be symbolic.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::arith::{MRatFunc, Symbol};
use crate::domain::Domain;
use crate::expr::Affine;
use crate::form::{Chain, Form, Term};
use crate::gosper::telescope_definite;
use crate::hyper::{HyperTerm, Kernel};
use crate::sums::rational_to_harmonic;

/// Longest constant range expanded term by term.
pub const EXPAND_LIMIT: i64 = 24;

/// `Σ_{v=lower}^{upper} body`: telescoped, rewritten into S-sums, or kept
/// as a nested sum.
pub fn indefinite_sum(body: &Form, v: Symbol, lower: &Affine, upper: &Affine, domain: &Domain) -> Form {
    if let Some(len) = upper.sub(lower).as_constant() {
        if len < 0 {
            return Form::zero();
        }
        if len < EXPAND_LIMIT {
            if let Some(f) = expand(body, v, lower, len + 1) {
                return f;
            }
        }
    }
    let inner = domain.rebound(v, lower.clone(), Some(upper.clone()));
    let mut groups: BTreeMap<Kernel, MRatFunc> = BTreeMap::new();
    let mut chained: Vec<Term> = Vec::new();
    let mut out = Form::zero();
    for t in &body.terms {
        if !t.depends_on(v) {
            let len = MRatFunc::from_poly(upper.sub(lower).add_const(1).to_mpoly());
            out = out.add(&Form::from_terms(alloc::vec![t.clone()]).scale(&len));
        } else if t.chains.is_empty() {
            let e = groups.entry(t.hyper.kernel().clone()).or_insert_with(MRatFunc::zero);
            *e = &*e + t.hyper.coeff();
        } else {
            chained.push(t.clone());
        }
    }
    let mut leftover: Vec<Term> = Vec::new();
    for (k, c) in groups {
        if c.is_zero() {
            continue;
        }
        let h = HyperTerm::new(c, k);
        if let Some(f) = telescope_definite(&h, v, lower, upper) {
            out = out.add(&f);
        } else if let Some(f) = rational_to_harmonic(&h, v, lower, upper, &inner) {
            out = out.add(&f);
        } else {
            leftover.push(Term::hyper(h));
        }
    }
    leftover.extend(chained);
    for t in leftover {
        let (outside, inside) = factor_out(&t, v);
        let c = Chain::new(v, lower.clone(), upper.clone(), Form::from_terms(alloc::vec![inside])).refresh();
        out = out.add(&Form::chain(c).mul_hyper(&outside));
    }
    out
}

/// Splits the part of the hypergeometric factor free of `v` off a term.
fn factor_out(t: &Term, v: Symbol) -> (HyperTerm, Term) {
    let (dep, free) = t.hyper.split(v);
    (free, Term { hyper: dep, chains: t.chains.clone() })
}

fn expand(body: &Form, v: Symbol, lower: &Affine, count: i64) -> Option<Form> {
    let mut acc = Form::zero();
    for k in 0..count {
        acc = acc.add(&body.subst(v, &lower.add_const(k)).ok()?);
    }
    Some(acc)
}
