//! Innermost-first simplification of definite multi-sums.
//!
//! Each layer is summed by expansion, telescoping or creative telescoping.
//! Recurrences are solved by order reduction and their constants pinned
//! against initial values that are simplified recursively. Every layer is
//! compared with brute-force summation before the next one starts.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::Zero;

use crate::arith::{Rational, Symbol};
use crate::domain::Domain;
use crate::expr::{evaluate_counted, Affine, DefiniteSum, Env, EvalError, Expr, ExprError};
use crate::form::{Chain, Form, FormError};
use crate::gosper::telescope_definite;
use crate::hyper::{HyperTerm, Kernel};
use crate::indefinite::EXPAND_LIMIT;
use crate::recsolve::{dalembertian_solutions, simplify_solution_depth, SolveContext};
use crate::zeilberger::{creative_telescoping, sum_recurrence, SummandRecurrence};

/// Summand evaluations allowed per oracle point.
pub const ORACLE_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug)]
pub struct Config {
    pub max_order: usize,
    pub weight_cap: u32,
    pub oracle_budget: u64,
    pub depth_limit: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { max_order: 5, weight_cap: 4, oracle_budget: ORACLE_BUDGET, depth_limit: 6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Expansion,
    Telescoping,
    CreativeTelescoping,
    Exchange,
    Numeric,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Expansion => "expansion",
            Method::Telescoping => "telescoping",
            Method::CreativeTelescoping => "creative-telescoping",
            Method::Exchange => "exchange",
            Method::Numeric => "numeric",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub point: Env,
    pub ok: bool,
}

/// One summation step: a layer of the input or a sum met on the way.
#[derive(Clone, Debug)]
pub struct LayerRecord {
    pub var: Symbol,
    pub lower: Affine,
    pub upper: Affine,
    pub depth: usize,
    pub methods: Vec<Method>,
    pub recurrence: Option<String>,
    pub solutions: Vec<String>,
    pub initial_values: Vec<String>,
    pub checks: Vec<Check>,
    pub outcome: Result<String, String>,
}

#[derive(Clone, Debug, Default)]
pub struct SimplificationTrace {
    pub layers: Vec<LayerRecord>,
}

#[derive(Clone, Debug)]
pub struct ClosedForm {
    pub expression: Expr,
    pub form: Form,
    pub params: Vec<Symbol>,
    /// The identity holds for every parameter value `>= valid_from`.
    pub valid_from: i64,
    pub parity_split: Option<(Expr, Expr)>,
}

impl ClosedForm {
    /// Value with every parameter set to `n`.
    pub fn eval(&self, n: i64) -> Result<Rational, FormError> {
        let env: Env = self.params.iter().map(|p| (*p, n)).collect();
        self.form.eval(&env)
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum PipelineError {
    #[error("UNSOLVED at {layer}: {reason}")]
    Unsolved { layer: Symbol, reason: String, trace: SimplificationTrace },
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl PipelineError {
    pub fn trace(&self) -> Option<&SimplificationTrace> {
        match self {
            PipelineError::Unsolved { trace, .. } => Some(trace),
            _ => None,
        }
    }
}

/// Brute-force value with every parameter set to `n`.
pub fn oracle(s: &DefiniteSum, n: i64, budget: u64) -> Result<Rational, EvalError> {
    let env: Env = s.params().into_iter().map(|p| (p, n)).collect();
    let mut b = budget;
    evaluate_counted(&s.to_expr(), &env, &mut b)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyPoint {
    pub n: i64,
    pub expected: Rational,
    pub got: Result<Rational, String>,
}

impl VerifyPoint {
    pub fn ok(&self) -> bool {
        self.got.as_ref().is_ok_and(|g| *g == self.expected)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub points: Vec<VerifyPoint>,
    /// Points the oracle could not evaluate within its budget or domain.
    pub skipped: Vec<i64>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.points.iter().all(VerifyPoint::ok)
    }

    pub fn first_mismatch(&self) -> Option<&VerifyPoint> {
        self.points.iter().find(|p| !p.ok())
    }
}

/// Exact comparison of a closed form with the oracle on `from..=to`.
pub fn verify(cf: &ClosedForm, s: &DefiniteSum, from: i64, to: i64, budget: u64) -> VerifyReport {
    let mut report = VerifyReport::default();
    for n in from..=to {
        match oracle(s, n, budget) {
            Ok(expected) => {
                let got = cf.eval(n).map_err(|e| e.to_string());
                report.points.push(VerifyPoint { n, expected, got });
            }
            Err(_) => report.skipped.push(n),
        }
    }
    report
}

/// Smallest common parameter value at which every layer range can be nonempty.
fn first_parameter_value(dom: &Domain) -> Option<i64> {
    (0..=64).find(|n| !dom.sample_points(&[*n], 1).is_empty())
}

/// Simplifies a definite multi-sum into a verified closed form.
pub fn simplify(s: &DefiniteSum, cfg: &Config) -> Result<(ClosedForm, SimplificationTrace), PipelineError> {
    s.check_admissible()?;
    let params: Vec<Symbol> = s.params().into_iter().collect();
    let mut probe = Domain::new();
    for p in &params {
        probe = probe.with_param(*p, 0);
    }
    for l in &s.layers {
        probe = probe.with_range(l.var, l.lower.clone(), l.upper.clone());
    }
    let n_min = if params.is_empty() { 0 } else { first_parameter_value(&probe).unwrap_or(0) };
    let mut outer = Domain::new();
    for p in &params {
        outer = outer.with_param(*p, n_min);
    }
    let mut full = outer.clone();
    for l in &s.layers {
        full = full.with_range(l.var, l.lower.clone(), l.upper.clone());
    }
    let body = Form::from_expr(&s.summand, &full).map_err(|e| PipelineError::Unsupported(e.to_string()))?;
    let mut eng = Engine { cfg, trace: SimplificationTrace::default(), valid_from: BTreeMap::new() };
    let fail = |e: Fail, trace: SimplificationTrace| PipelineError::Unsolved { layer: e.layer, reason: e.reason, trace };
    let mut cur = body;
    for k in (0..s.layers.len()).rev() {
        let mut dom = outer.clone();
        for l in &s.layers[..k] {
            dom = dom.with_range(l.var, l.lower.clone(), l.upper.clone());
        }
        let l = &s.layers[k];
        match eng.definite_sum(&cur, l.var, &l.lower, &l.upper, &dom, 0) {
            Ok(f) => cur = f,
            Err(e) => return Err(fail(e, eng.trace)),
        }
    }
    let valid_from = eng.valid_from.values().copied().fold(n_min, i64::max);
    let outer = match params.first() {
        Some(p) if valid_from > n_min => outer.restrict_lower(*p, Affine::constant(valid_from)),
        _ => outer,
    };
    cur = match eng.resolve(&cur, &outer, 0) {
        Ok(f) => f,
        Err(e) => return Err(fail(e, eng.trace)),
    };
    if let Some(p) = params.first() {
        let reduced = crate::sums::to_basis_form(&cur, *p, cfg.weight_cap);
        let agrees = (valid_from..valid_from + 6).all(|k| {
            let env: Env = [(*p, k)].into_iter().collect();
            matches!((reduced.eval(&env), cur.eval(&env)), (Ok(a), Ok(b)) if a == b)
        });
        if agrees {
            cur = reduced;
        }
    }
    let cf = ClosedForm { expression: cur.to_expr(), form: cur, params: params.clone(), valid_from, parity_split: None };
    let report = verify(&cf, s, valid_from, valid_from + 8, cfg.oracle_budget);
    if let Some(bad) = report.first_mismatch() {
        let layer = params.first().copied().unwrap_or_else(|| s.layers[0].var);
        return Err(fail(Fail::new(layer, format!("closed form disagrees with the oracle at {}", bad.n)), eng.trace));
    }
    Ok((cf, eng.trace))
}

struct Fail {
    layer: Symbol,
    reason: String,
}

impl Fail {
    fn new(layer: Symbol, reason: impl Into<String>) -> Fail {
        Fail { layer, reason: reason.into() }
    }
}

/// Replaces a form without free variables by its value.
fn settle(f: Form) -> Form {
    if f.vars().is_empty() {
        if let Ok(v) = f.eval(&Env::new()) {
            return Form::from_hyper(HyperTerm::constant(v));
        }
    }
    f
}

fn invert(f: &Form) -> Option<Form> {
    let f = settle(f.clone());
    match f.terms.as_slice() {
        [t] if t.chains.is_empty() => Some(Form::from_hyper(t.hyper.inv().ok()?)),
        _ => None,
    }
}

/// Leibniz determinant; orders stay small.
fn determinant(m: &[Vec<Form>]) -> Form {
    let d = m.len();
    let mut perm: Vec<usize> = (0..d).collect();
    let mut acc = Form::zero();
    permute(&mut perm, 0, &mut |p| {
        let mut sign = 1;
        for i in 0..d {
            for j in i + 1..d {
                if p[i] > p[j] {
                    sign = -sign;
                }
            }
        }
        let mut prod = Form::one();
        for (i, &j) in p.iter().enumerate() {
            prod = prod.mul(&m[i][j]);
        }
        acc = if sign > 0 { acc.add(&prod) } else { acc.sub(&prod) };
    });
    acc
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

fn expand(body: &Form, v: Symbol, lower: &Affine, count: i64) -> Option<Form> {
    let mut acc = Form::zero();
    for k in 0..count {
        acc = acc.add(&body.subst(v, &lower.add_const(k)).ok()?);
    }
    Some(acc)
}

/// A nested sum that is not a plain indefinite sum of its upper bound.
fn is_definite(c: &Chain) -> bool {
    if c.upper.sub(&c.lower).is_constant() {
        return true;
    }
    let mut body = c.body.vars();
    body.remove(&c.var);
    let mut bounds = c.lower.vars();
    bounds.extend(c.upper.vars());
    !bounds.is_disjoint(&body)
}

struct Engine<'a> {
    cfg: &'a Config,
    trace: SimplificationTrace,
    valid_from: BTreeMap<Symbol, i64>,
}

impl Engine<'_> {
    fn note(&mut self, idx: usize, m: Method) {
        let ms = &mut self.trace.layers[idx].methods;
        if !ms.contains(&m) {
            ms.push(m);
        }
    }

    /// `Σ_{v=lower}^{upper} body` as a form free of `v`, valid on `dom`.
    fn definite_sum(&mut self, body: &Form, v: Symbol, lower: &Affine, upper: &Affine, dom: &Domain, depth: usize) -> Result<Form, Fail> {
        if depth > self.cfg.depth_limit {
            return Err(Fail::new(v, "recursion depth limit reached"));
        }
        let idx = self.trace.layers.len();
        self.trace.layers.push(LayerRecord {
            var: v,
            lower: lower.clone(),
            upper: upper.clone(),
            depth,
            methods: Vec::new(),
            recurrence: None,
            solutions: Vec::new(),
            initial_values: Vec::new(),
            checks: Vec::new(),
            outcome: Err(String::from("unfinished")),
        });
        let res = self.sum_layer(body, v, lower, upper, dom, depth, idx);
        self.trace.layers[idx].outcome = match &res {
            Ok(f) => Ok(f.to_string()),
            Err(e) => Err(e.reason.clone()),
        };
        res
    }

    #[allow(clippy::too_many_arguments)]
    fn sum_layer(&mut self, body: &Form, v: Symbol, lower: &Affine, upper: &Affine, dom: &Domain, depth: usize, idx: usize) -> Result<Form, Fail> {
        if let Some(len) = upper.sub(lower).as_constant() {
            if len < 0 {
                self.note(idx, Method::Expansion);
                return Ok(Form::zero());
            }
            if len < EXPAND_LIMIT {
                if let Some(f) = expand(body, v, lower, len + 1) {
                    self.note(idx, Method::Expansion);
                    let f = self.resolve(&f, dom, depth)?;
                    return self.checked(body, v, lower, upper, dom, f, idx);
                }
            }
        }
        if lower.is_constant() && upper.is_constant() && body.vars().iter().all(|x| *x == v) {
            self.note(idx, Method::Numeric);
            let f = self.numeric(body, v, lower, upper)?;
            return Ok(f);
        }
        let (f, used_gosper) = self.sum_general(body, v, lower, upper, dom, depth, idx, true)?;
        match self.checked(body, v, lower, upper, dom, f, idx) {
            Ok(f) => Ok(f),
            Err(e) if !used_gosper => Err(e),
            Err(_) => {
                let (f, _) = self.sum_general(body, v, lower, upper, dom, depth, idx, false)?;
                self.checked(body, v, lower, upper, dom, f, idx)
            }
        }
    }

    fn numeric(&self, body: &Form, v: Symbol, lower: &Affine, upper: &Affine) -> Result<Form, Fail> {
        let (lo, hi) = (lower.constant_term(), upper.constant_term());
        if (hi - lo).max(0) as u64 > self.cfg.oracle_budget {
            return Err(Fail::new(v, "range exceeds the evaluation budget"));
        }
        let mut acc = Rational::zero();
        for x in lo..=hi {
            let env: Env = [(v, x)].into_iter().collect();
            acc += body.eval(&env).map_err(|e| Fail::new(v, e.to_string()))?;
        }
        Ok(Form::from_hyper(HyperTerm::constant(acc)))
    }

    #[allow(clippy::too_many_arguments)]
    fn sum_general(
        &mut self,
        body: &Form,
        v: Symbol,
        lower: &Affine,
        upper: &Affine,
        dom: &Domain,
        depth: usize,
        idx: usize,
        gosper: bool,
    ) -> Result<(Form, bool), Fail> {
        let count = upper.sub(lower).add_const(1);
        let count_ok = dom.min_of(&count).is_some_and(|m| m >= 0);
        let mut out = Form::zero();
        let mut rest = Form::zero();
        let mut groups: BTreeMap<Kernel, crate::arith::MRatFunc> = BTreeMap::new();
        for t in &body.terms {
            let tf = Form::from_terms(alloc::vec![t.clone()]);
            if !t.depends_on(v) && count_ok {
                out = out.add(&tf.scale(&crate::arith::MRatFunc::from_poly(count.to_mpoly())));
            } else if t.chains.is_empty() {
                let e = groups.entry(t.hyper.kernel().clone()).or_insert_with(crate::arith::MRatFunc::zero);
                *e = &*e + t.hyper.coeff();
            } else {
                rest = rest.add(&tf);
            }
        }
        let mut used = false;
        for (k, c) in groups {
            if c.is_zero() {
                continue;
            }
            let h = HyperTerm::new(c, k);
            if gosper {
                if let Some(f) = telescope_definite(&h, v, lower, upper) {
                    out = out.add(&f);
                    used = true;
                    continue;
                }
            }
            rest = rest.add(&Form::from_hyper(h));
        }
        if used {
            self.note(idx, Method::Telescoping);
        }
        if !rest.is_zero() {
            let f = self.creative(&rest, v, lower, upper, dom, depth, idx)?;
            out = out.add(&f);
        }
        Ok((self.resolve(&out, dom, depth)?, used))
    }

    #[allow(clippy::too_many_arguments)]
    fn creative(&mut self, rest: &Form, v: Symbol, lower: &Affine, upper: &Affine, dom: &Domain, depth: usize, idx: usize) -> Result<Form, Fail> {
        let mut cand = rest.vars();
        cand.extend(lower.vars());
        cand.extend(upper.vars());
        cand.remove(&v);
        let Some(n) = dom.innermost_of(&cand) else {
            return Err(Fail::new(v, "no parameter to recur in"));
        };
        let err = match creative_telescoping(rest, n, v, self.cfg.max_order) {
            Ok(Some(rec)) => {
                self.note(idx, Method::CreativeTelescoping);
                match self.solve_recurrence(rest, v, lower, upper, dom, depth, idx, &rec) {
                    Ok(f) => return Ok(f),
                    Err(e) => e,
                }
            }
            Ok(None) => Fail::new(v, format!("no telescoper of order <= {}", self.cfg.max_order)),
            Err(e) => Fail::new(v, e.to_string()),
        };
        if rest.has_chains() {
            self.note(idx, Method::Exchange);
            if let Ok(f) = self.exchange(rest, v, lower, upper, dom, depth) {
                return Ok(f);
            }
        }
        Err(err)
    }

    #[allow(clippy::too_many_arguments)]
    fn solve_recurrence(
        &mut self,
        rest: &Form,
        v: Symbol,
        lower: &Affine,
        upper: &Affine,
        dom: &Domain,
        depth: usize,
        idx: usize,
        rec: &SummandRecurrence,
    ) -> Result<Form, Fail> {
        let n = rec.n;
        let mut lr = sum_recurrence(rest, lower, upper, rec).map_err(|e| Fail::new(v, e.to_string()))?;
        self.trace.layers[idx].recurrence = Some(lr.to_string());
        lr.rhs = self.resolve(&lr.rhs, dom, depth + 1)?;
        let d = lr.order();
        let nd = dom.get(n).expect("recurrence variable is in the domain").clone();
        let max_shift = if nd.upper.is_some() { 0 } else { 4 };
        let mut last = Fail::new(n, "no anchor for the initial values");
        for s in 0..=max_shift {
            let anchor = nd.lower.add_const(s);
            let sub = if s == 0 { dom.clone() } else { dom.restrict_lower(n, anchor.clone()) };
            let ctx = SolveContext::new(sub.clone(), anchor.clone());
            let sols = simplify_solution_depth(&dalembertian_solutions(&lr, &ctx), n, self.cfg.weight_cap);
            if !sols.complete || sols.homogeneous.len() != d {
                return Err(Fail::new(n, format!("recurrence has no complete d'Alembertian solution: {lr}")));
            }
            let particular = match &sols.particular {
                Some(p) => p.clone(),
                None if lr.rhs.is_zero() => Form::zero(),
                None => return Err(Fail::new(n, "no particular solution")),
            };
            if self.trace.layers[idx].solutions.is_empty() {
                let rec_sols = &mut self.trace.layers[idx].solutions;
                rec_sols.extend(sols.homogeneous.iter().map(|h| h.to_string()));
                rec_sols.push(particular.to_string());
            }
            let pinned = self.pin(rest, v, lower, upper, &sub, depth, idx, n, &anchor, &sols.homogeneous, &particular);
            match pinned.and_then(|f| self.check_points(rest, v, lower, upper, &sub, &f).map(|_| f)) {
                Ok(f) => {
                    if s > 0 {
                        let a = anchor.constant_term();
                        let e = self.valid_from.entry(n).or_insert(a);
                        *e = (*e).max(a);
                    }
                    return Ok(f);
                }
                Err(e) => last = e,
            }
        }
        Err(last)
    }

    /// Fixes the homogeneous constants from initial values at `anchor + t`.
    #[allow(clippy::too_many_arguments)]
    fn pin(
        &mut self,
        rest: &Form,
        v: Symbol,
        lower: &Affine,
        upper: &Affine,
        dom: &Domain,
        depth: usize,
        idx: usize,
        n: Symbol,
        anchor: &Affine,
        hom: &[Form],
        particular: &Form,
    ) -> Result<Form, Fail> {
        let d = hom.len();
        let pole = |e: crate::hyper::HyperError| Fail::new(n, format!("pole at the initial values: {e}"));
        let mut m: Vec<Vec<Form>> = Vec::new();
        let mut rhs: Vec<Form> = Vec::new();
        for t in 0..d as i64 {
            let at = anchor.add_const(t);
            let inner = dom.eliminate(n, &at);
            let b = rest.subst(n, &at).map_err(pole)?;
            let val = self.definite_sum(&b, v, &lower.subst(n, &at), &upper.subst(n, &at), &inner, depth + 1)?;
            self.trace.layers[idx].initial_values.push(format!("{n}={at}: {val}"));
            let mut row = Vec::new();
            for h in hom {
                let hv = self.resolve(&h.subst(n, &at).map_err(pole)?, &inner, depth + 1)?;
                row.push(settle(hv));
            }
            m.push(row);
            let pv = self.resolve(&particular.subst(n, &at).map_err(pole)?, &inner, depth + 1)?;
            rhs.push(settle(val.sub(&pv)));
        }
        let det = determinant(&m);
        let inv = invert(&det).ok_or_else(|| Fail::new(n, format!("cannot pin constants: determinant {det}")))?;
        let mut out = particular.clone();
        for (k, h) in hom.iter().enumerate() {
            let mut mk = m.clone();
            for (row, r) in mk.iter_mut().zip(&rhs) {
                row[k] = r.clone();
            }
            let c = settle(determinant(&mk).mul(&inv));
            out = out.add(&c.mul(h));
        }
        Ok(out)
    }

    /// `Σ_{v=L}^{U} h(v)·Σ_{i=l}^{v+o} b(i)` summed over `v` first.
    fn exchange(&mut self, rest: &Form, v: Symbol, lower: &Affine, upper: &Affine, dom: &Domain, depth: usize) -> Result<Form, Fail> {
        let mut out = Form::zero();
        let mut plain = Form::zero();
        for t in &rest.terms {
            let [c] = t.chains.as_slice() else {
                if t.chains.is_empty() {
                    plain = plain.add(&Form::from_terms(alloc::vec![t.clone()]));
                    continue;
                }
                return Err(Fail::new(v, "products of nested sums"));
            };
            let off = c.upper.sub(&Affine::var(v)).as_constant();
            let (Some(off), 1) = (off, c.upper.coeff(v)) else {
                return Err(Fail::new(v, "nested sum is not indefinite in the summation variable"));
            };
            if c.lower.contains(v) || c.body.depends_on(v) {
                return Err(Fail::new(v, "nested sum is not indefinite in the summation variable"));
            }
            let Some(k) = lower.add_const(off).sub(&c.lower).as_constant() else {
                return Err(Fail::new(v, "lower bounds are not comparable"));
            };
            let h = Form::from_hyper(t.hyper.clone());
            let i = Symbol::fresh();
            let b = c.body.subst(c.var, &Affine::var(i)).map_err(|e| Fail::new(v, e.to_string()))?;
            if k > 0 {
                if k >= EXPAND_LIMIT {
                    return Err(Fail::new(v, "offset between the sums is too large"));
                }
                let head = expand(&b, i, &c.lower, k).ok_or_else(|| Fail::new(v, "pole in the nested sum"))?;
                let total = self.definite_sum(&h, v, lower, upper, dom, depth + 1)?;
                out = out.add(&head.mul(&total));
            }
            let i_lo = if k > 0 { lower.add_const(off) } else { c.lower.clone() };
            let i_hi = upper.add_const(off);
            let dom_i = dom.clone().with_range(i, i_lo.clone(), i_hi.clone());
            let tail = self.definite_sum(&h, v, &Affine::var(i).add_const(-off), upper, &dom_i, depth + 1)?;
            out = out.add(&self.definite_sum(&b.mul(&tail), i, &i_lo, &i_hi, dom, depth + 1)?);
        }
        if !plain.is_zero() {
            out = out.add(&self.definite_sum(&plain, v, lower, upper, dom, depth + 1)?);
        }
        Ok(out)
    }

    /// Replaces every definite nested sum by its simplification.
    fn resolve(&mut self, f: &Form, dom: &Domain, depth: usize) -> Result<Form, Fail> {
        let mut out = Form::zero();
        for t in &f.terms {
            let mut acc = Form::from_hyper(t.hyper.clone());
            for c in &t.chains {
                let inner = dom.clone().with_range(c.var, c.lower.clone(), c.upper.clone());
                let body = self.resolve(&c.body, &inner, depth)?;
                let part = if is_definite(c) {
                    self.definite_sum(&body, c.var, &c.lower, &c.upper, dom, depth + 1)?
                } else {
                    Form::chain(Chain::new(c.var, c.lower.clone(), c.upper.clone(), body))
                };
                acc = acc.mul(&part);
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn checked(&mut self, body: &Form, v: Symbol, lower: &Affine, upper: &Affine, dom: &Domain, f: Form, idx: usize) -> Result<Form, Fail> {
        let checks = self.check_points(body, v, lower, upper, dom, &f)?;
        self.trace.layers[idx].checks = checks;
        Ok(f)
    }

    /// Brute-force comparison on sample points of `dom`.
    fn check_points(&self, body: &Form, v: Symbol, lower: &Affine, upper: &Affine, dom: &Domain, f: &Form) -> Result<Vec<Check>, Fail> {
        let start = dom.vars().iter().filter(|d| d.upper.is_none()).filter_map(|d| d.lower.as_constant()).max().unwrap_or(0);
        let values: Vec<i64> = (start..start + 10).collect();
        let mut seen = BTreeSet::new();
        let mut checks = Vec::new();
        for env in dom.sample_points(&values, 32) {
            if !seen.insert(env.clone()) {
                continue;
            }
            let (Some(lo), Some(hi)) = (lower.eval(&env), upper.eval(&env)) else { continue };
            let mut expected = Rational::zero();
            let mut defined = true;
            for x in lo..=hi {
                let mut e = env.clone();
                e.insert(v, x);
                match body.eval(&e) {
                    Ok(y) => expected += y,
                    Err(_) => {
                        defined = false;
                        break;
                    }
                }
            }
            if !defined {
                continue;
            }
            let ok = f.eval(&env).is_ok_and(|g| g == expected);
            checks.push(Check { point: env.clone(), ok });
            if !ok {
                let at: Vec<String> = env.iter().map(|(k, x)| format!("{k}={x}")).collect();
                return Err(Fail::new(v, format!("sum over {v} disagrees with brute force at {}", at.join(", "))));
            }
        }
        Ok(checks)
    }
}
