//! Creative telescoping and the recurrences it yields for definite sums.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{mpoly_gcd, mpoly_lcm, MPoly, MRatFunc, Rational, Symbol};
use crate::expr::Affine;
use crate::form::{Chain, Form, Term};
use crate::gosper::{param_gosper_space, parameterized_gosper_multi};
use crate::hyper::{HyperError, HyperTerm, Kernel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ZeilbergerError {
    #[error("summand outside the supported class: {0}")]
    Unsupported(String),
    #[error("bound {0} has a non-integer or nonlinear dependence")]
    Bound(String),
    #[error(transparent)]
    Hyper(#[from] HyperError),
}

/// `Σ_i c_i(n)·f(n+i, v) = g(n, v+1) − g(n, v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummandRecurrence {
    pub n: Symbol,
    pub v: Symbol,
    pub coeffs: Vec<MPoly>,
    pub cert: Form,
}

/// `Σ_i coeffs[i]·F(var+i) = rhs(var)`, claimed for `var >= valid_from`.
#[derive(Clone, PartialEq, Eq)]
pub struct LinearRecurrence {
    pub var: Symbol,
    pub coeffs: Vec<MPoly>,
    pub rhs: Form,
    pub valid_from: Option<i64>,
}

impl SummandRecurrence {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }
}

impl LinearRecurrence {
    pub fn new(var: Symbol, coeffs: Vec<MPoly>, rhs: Form) -> Self {
        LinearRecurrence { var, coeffs, rhs, valid_from: None }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_homogeneous(&self) -> bool {
        self.rhs.is_zero()
    }

    /// Applies the recurrence operator to a candidate solution.
    pub fn apply(&self, f: &Form) -> Form {
        let mut acc = Form::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&f.shift(self.var, i as i64).scale(&MRatFunc::from_poly(c.clone())));
        }
        acc
    }

    pub fn homogeneous(&self) -> LinearRecurrence {
        LinearRecurrence { rhs: Form::zero(), ..self.clone() }
    }
}

/// Groups a chain-free form by kernel.
pub(crate) fn kernel_groups(f: &Form) -> Result<BTreeMap<Kernel, MRatFunc>, ZeilbergerError> {
    let mut groups: BTreeMap<Kernel, MRatFunc> = BTreeMap::new();
    for t in &f.terms {
        if !t.chains.is_empty() {
            return Err(ZeilbergerError::Unsupported(alloc::format!("nested sum in summand: {f}")));
        }
        let e = groups.entry(t.hyper.kernel().clone()).or_insert_with(MRatFunc::zero);
        *e = &*e + t.hyper.coeff();
    }
    groups.retain(|_, c| !c.is_zero());
    Ok(groups)
}

/// Clears denominators and content; fixes the sign of the last coefficient.
/// Returns the polynomials and the factor they were multiplied by.
pub fn normalize_coeffs(cs: &[MRatFunc]) -> (Vec<MPoly>, MRatFunc) {
    let den = cs.iter().fold(MPoly::one(), |acc, c| mpoly_lcm(&acc, c.den()));
    let polys: Vec<MPoly> = cs.iter().map(|c| c.num() * &den.div_exact(c.den()).expect("lcm divides")).collect();
    let g = polys.iter().filter(|p| !p.is_zero()).fold(MPoly::zero(), |acc, p| mpoly_gcd(&acc, p));
    let mut polys: Vec<MPoly> = polys.iter().map(|p| p.div_exact(&g).expect("gcd divides")).collect();
    // Integer content over all coefficients.
    let mut lcm_den = num_bigint::BigInt::one();
    let mut gcd_num = num_bigint::BigInt::zero();
    for p in &polys {
        for (_, c) in p.terms() {
            lcm_den = lcm_den.lcm(c.denom());
            gcd_num = gcd_num.gcd(c.numer());
        }
    }
    let mut scale = Rational::new(lcm_den, if gcd_num.is_zero() { num_bigint::BigInt::one() } else { gcd_num });
    let last = polys.iter().rev().find(|p| !p.is_zero()).map(|p| p.lc());
    if last.is_some_and(|c| c.is_negative()) {
        scale = -scale;
    }
    polys = polys.iter().map(|p| p.scale(&scale)).collect();
    let factor = MRatFunc::new(den, g).expect("nonzero content").scale(&scale);
    (polys, factor)
}

/// Solutions `(λ, g)` of `Σ_l λ_l·inputs[l] = g(v+1) − g(v)` for chain-free
/// inputs, as a basis of the solution space.
pub fn param_telescope_forms(inputs: &[Form], v: Symbol) -> Result<Vec<(Vec<MRatFunc>, Form)>, ZeilbergerError> {
    let m = inputs.len();
    let mut table: BTreeMap<Kernel, Vec<MRatFunc>> = BTreeMap::new();
    for (l, f) in inputs.iter().enumerate() {
        for (k, c) in kernel_groups(f)? {
            let row = table.entry(k).or_insert_with(|| alloc::vec![MRatFunc::zero(); m]);
            row[l] = c;
        }
    }
    if table.is_empty() {
        // Every input vanishes: any λ works with g = 0.
        return Ok((0..m)
            .map(|l| {
                let mut e = alloc::vec![MRatFunc::zero(); m];
                e[l] = MRatFunc::one();
                (e, Form::zero())
            })
            .collect());
    }
    let groups: Vec<(Kernel, Vec<MRatFunc>)> = table.into_iter().collect();
    let space = param_gosper_space(&groups, v);
    Ok(space
        .into_iter()
        .map(|(c, certs)| (c, Form::from_terms(certs.into_iter().filter(|g| !g.is_zero()).map(Term::hyper).collect())))
        .collect())
}

/// Creative telescoping of `f(n, v)` in `v`, trying orders `1..=d_max`.
/// Terms may carry one nested sum whose upper bound is `v` plus a constant.
pub fn creative_telescoping(f: &Form, n: Symbol, v: Symbol, d_max: usize) -> Result<Option<SummandRecurrence>, ZeilbergerError> {
    if f.is_zero() {
        return Ok(Some(SummandRecurrence { n, v, coeffs: alloc::vec![MPoly::one()], cert: Form::zero() }));
    }
    let ext = if f.has_chains() { Some(ChainSummand::new(f, n, v)?) } else { None };
    for d in 1..=d_max {
        let found = match &ext {
            None => telescoper_of_order(f, n, v, d)?,
            Some(cs) => cs.telescoper_of_order(d)?,
        };
        if let Some(rec) = found {
            return Ok(Some(rec));
        }
    }
    Ok(None)
}

/// The order-`d` ansatz alone, for a chain-free summand.
pub fn telescoper_of_order(f: &Form, n: Symbol, v: Symbol, d: usize) -> Result<Option<SummandRecurrence>, ZeilbergerError> {
    let groups = kernel_groups(f)?;
    let mut sys = Vec::new();
    for (k, c) in &groups {
        let base = HyperTerm::new(c.clone(), k.clone());
        let mut qs = Vec::with_capacity(d + 1);
        for i in 0..=d {
            let s = base.shift(n, i as i64);
            if s.kernel() != k {
                return Err(ZeilbergerError::Unsupported(alloc::format!("shift in {n} leaves the kernel class of {base}")));
            }
            qs.push(s.coeff().clone());
        }
        sys.push((k.clone(), qs));
    }
    let Some((coeffs, certs)) = parameterized_gosper_multi(&sys, v) else {
        return Ok(None);
    };
    if coeffs.iter().any(|c| c.contains(v)) {
        return Ok(None);
    }
    let (polys, factor) = normalize_coeffs(&coeffs);
    let cert = Form::from_terms(certs.iter().map(|g| Term::hyper(g.scale(&factor))).collect());
    let rec = SummandRecurrence { n, v, coeffs: polys, cert };
    if !check_summand_recurrence(f, &rec)? {
        return Err(ZeilbergerError::Unsupported(String::from("certificate failed its symbolic check")));
    }
    Ok(Some(rec))
}

/// Exact check of a summand recurrence for a chain-free summand, after
/// dividing by each kernel.
pub fn check_summand_recurrence(f: &Form, rec: &SummandRecurrence) -> Result<bool, ZeilbergerError> {
    let (n, v) = (rec.n, rec.v);
    let mut lhs = Form::zero();
    for (i, c) in rec.coeffs.iter().enumerate() {
        lhs = lhs.add(&f.shift(n, i as i64).scale(&MRatFunc::from_poly(c.clone())));
    }
    let rhs = rec.cert.shift(v, 1).sub(&rec.cert);
    Ok(kernel_groups(&lhs.sub(&rhs))?.is_empty())
}

/// `g` with `g(v+1) − g(v) = f(v)`, searched among hypergeometric terms times
/// the nested sums already present in `f`. `None` when that ansatz fails.
pub fn plain_telescoping_tower(f: &Form, v: Symbol) -> Result<Option<Form>, ZeilbergerError> {
    if f.is_zero() {
        return Ok(Some(Form::zero()));
    }
    if !f.has_chains() {
        for (lam, g) in param_telescope_forms(core::slice::from_ref(f), v)? {
            if !lam[0].is_zero() && !lam[0].contains(v) {
                return Ok(Some(g.scale(&lam[0].inv().expect("nonzero"))));
            }
        }
        return Ok(None);
    }
    let Some(rec) = ChainSummand::new(f, Symbol::fresh(), v)?.telescoper_of_order(0)? else {
        return Ok(None);
    };
    let c = MRatFunc::from_poly(rec.coeffs[0].clone());
    Ok(Some(rec.cert.scale(&c.inv().expect("nonzero telescoper"))))
}

/// `C(n+1, v) = alpha(n)·C(n, v) + beta(n, v)` for a nested sum `C`.
#[derive(Clone, Debug)]
struct ChainShift {
    alpha: MRatFunc,
    beta: Form,
}

/// A summand `H_0 + Σ_k P_k·C_k` with nested sums `C_k(n, v)` whose upper
/// bound is `v + off_k`.
struct ChainSummand {
    n: Symbol,
    v: Symbol,
    free: Form,
    chains: Vec<(Chain, i64, Form, ChainShift)>,
}

/// Value of the chain body at `v + off + 1`, i.e. `C(v+1) − C(v)`.
fn chain_step(c: &Chain, v: Symbol, off: i64) -> Result<Form, ZeilbergerError> {
    Ok(c.body.subst(c.var, &Affine::var(v).add_const(off + 1))?)
}

impl ChainSummand {
    fn new(f: &Form, n: Symbol, v: Symbol) -> Result<Self, ZeilbergerError> {
        let mut free = Form::zero();
        let mut chains: Vec<(Chain, i64, Form, ChainShift)> = Vec::new();
        for t in &f.terms {
            match t.chains.as_slice() {
                [] => free = free.add(&Form::from_terms(alloc::vec![t.clone()])),
                [c] => {
                    let key = c.alpha_normal(0);
                    let coeff = Form::from_hyper(t.hyper.clone());
                    if let Some(e) = chains.iter_mut().find(|e| e.0.alpha_normal(0) == key) {
                        e.2 = e.2.add(&coeff);
                        continue;
                    }
                    let up = &c.upper;
                    if up.coeff(v) != 1 || c.lower.contains(v) || c.lower.contains(n) || c.body.depends_on(v) {
                        return Err(ZeilbergerError::Unsupported(alloc::format!("nested sum {c} is not indefinite in {v}")));
                    }
                    let off = up.sub(&Affine::var(v)).as_constant();
                    let Some(off) = off else {
                        return Err(ZeilbergerError::Unsupported(alloc::format!("upper bound of {c} depends on other variables")));
                    };
                    let shift = chain_shift(c, n, v, off)?;
                    chains.push((c.clone(), off, coeff, shift));
                }
                _ => return Err(ZeilbergerError::Unsupported(String::from("products of nested sums in a summand"))),
            }
        }
        Ok(ChainSummand { n, v, free, chains })
    }

    /// `(A_i, B_i)` with `C(n+i) = A_i C(n) + B_i` for `i = 0..=d`.
    fn shifts(&self, k: usize, d: usize) -> Vec<(MRatFunc, Form)> {
        let sh = &self.chains[k].3;
        let mut out = alloc::vec![(MRatFunc::one(), Form::zero())];
        for i in 0..d {
            let (a, b) = out[i].clone();
            let al = sh.alpha.shift(self.n, i as i64);
            let be = sh.beta.shift(self.n, i as i64);
            out.push((&al * &a, b.scale(&al).add(&be)));
        }
        out
    }

    fn telescoper_of_order(&self, d: usize) -> Result<Option<SummandRecurrence>, ZeilbergerError> {
        let (n, v) = (self.n, self.v);
        let shifts: Vec<Vec<(MRatFunc, Form)>> = (0..self.chains.len()).map(|k| self.shifts(k, d)).collect();
        // Chain-free part of T(n+i).
        let rest: Vec<Form> = (0..=d)
            .map(|i| {
                let mut r = self.free.shift(n, i as i64);
                for (k, (_, _, p, _)) in self.chains.iter().enumerate() {
                    r = r.add(&p.shift(n, i as i64).mul(&shifts[k][i].1));
                }
                r
            })
            .collect();
        // Stage 1: coefficient of each chain telescopes with shared c.
        let mut eqs: Vec<(Kernel, Vec<MRatFunc>)> = Vec::new();
        let mut owner: Vec<usize> = Vec::new();
        for (k, (_, _, p, _)) in self.chains.iter().enumerate() {
            let mut table: BTreeMap<Kernel, Vec<MRatFunc>> = BTreeMap::new();
            for i in 0..=d {
                let pi = p.shift(n, i as i64).scale(&shifts[k][i].0);
                for (kern, c) in kernel_groups(&pi)? {
                    table.entry(kern).or_insert_with(|| alloc::vec![MRatFunc::zero(); d + 1])[i] = c;
                }
            }
            for (kern, qs) in table {
                eqs.push((kern, qs));
                owner.push(k);
            }
        }
        let stage1: Vec<(Vec<MRatFunc>, Vec<HyperTerm>)> = param_gosper_space(&eqs, v)
            .into_iter()
            .filter(|(c, _)| c.iter().any(|x| !x.is_zero()))
            .collect();
        if stage1.is_empty() {
            return Ok(None);
        }
        let gk = |sol: &(Vec<MRatFunc>, Vec<HyperTerm>), k: usize| -> Form {
            Form::from_terms(
                sol.1.iter().zip(&owner).filter(|(_, o)| **o == k).map(|(g, _)| Term::hyper(g.clone())).collect(),
            )
        };
        // Stage 2: the chain-free remainder telescopes.
        let steps: Vec<Form> =
            self.chains.iter().map(|(c, off, _, _)| chain_step(c, v, *off)).collect::<Result<_, _>>()?;
        let mut inputs = Vec::new();
        for sol in &stage1 {
            let mut e = Form::zero();
            for (i, ci) in sol.0.iter().enumerate() {
                e = e.add(&rest[i].scale(ci));
            }
            for k in 0..self.chains.len() {
                e = e.sub(&gk(sol, k).shift(v, 1).mul(&steps[k]));
            }
            inputs.push(e);
        }
        for step in &steps {
            inputs.push(step.neg());
        }
        let nl = stage1.len();
        let space = param_telescope_forms(&inputs, v)?;
        for (lam, g0) in space {
            let mut c = alloc::vec![MRatFunc::zero(); d + 1];
            for (l, sol) in stage1.iter().enumerate() {
                for i in 0..=d {
                    c[i] = &c[i] + &(&lam[l] * &sol.0[i]);
                }
            }
            if c.iter().all(|x| x.is_zero()) || c.iter().any(|x| x.contains(v)) {
                continue;
            }
            let mut cert = g0;
            for (k, (chain, _, _, _)) in self.chains.iter().enumerate() {
                let mut gc = Form::rational(lam[nl + k].clone());
                for (l, sol) in stage1.iter().enumerate() {
                    gc = gc.add(&gk(sol, k).scale(&lam[l]));
                }
                cert = cert.add(&gc.mul(&Form::chain(chain.clone())));
            }
            let (polys, factor) = normalize_coeffs(&c);
            let rec = SummandRecurrence { n, v, coeffs: polys, cert: cert.scale(&factor) };
            if !self.check(&rec, d)? {
                return Err(ZeilbergerError::Unsupported(String::from("certificate failed its symbolic check")));
            }
            return Ok(Some(rec));
        }
        Ok(None)
    }

    /// Exact check in the chain-linear representation.
    fn check(&self, rec: &SummandRecurrence, d: usize) -> Result<bool, ZeilbergerError> {
        let (n, v) = (self.n, self.v);
        let nk = self.chains.len();
        let shifts: Vec<Vec<(MRatFunc, Form)>> = (0..nk).map(|k| self.shifts(k, d)).collect();
        let mut free = Form::zero();
        let mut coef = alloc::vec![Form::zero(); nk];
        for (i, ci) in rec.coeffs.iter().enumerate() {
            let c = MRatFunc::from_poly(ci.clone());
            free = free.add(&self.free.shift(n, i as i64).scale(&c));
            for (k, (_, _, p, _)) in self.chains.iter().enumerate() {
                let pi = p.shift(n, i as i64).scale(&c);
                coef[k] = coef[k].add(&pi.scale(&shifts[k][i].0));
                free = free.add(&pi.mul(&shifts[k][i].1));
            }
        }
        // Right side: G(v+1) − G(v) with C_k(v+1) = C_k(v) + step_k.
        for t in &rec.cert.terms {
            let h = Form::from_hyper(t.hyper.clone());
            match t.chains.as_slice() {
                [] => free = free.sub(&h.shift(v, 1).sub(&h)),
                [c] => {
                    let k = self
                        .chains
                        .iter()
                        .position(|e| e.0.alpha_normal(0) == c.alpha_normal(0))
                        .ok_or_else(|| ZeilbergerError::Unsupported(String::from("foreign sum in certificate")))?;
                    let step = chain_step(&self.chains[k].0, v, self.chains[k].1)?;
                    let h1 = h.shift(v, 1);
                    coef[k] = coef[k].sub(&h1.sub(&h));
                    free = free.sub(&h1.mul(&step));
                }
                _ => return Ok(false),
            }
        }
        if !kernel_groups(&free)?.is_empty() {
            return Ok(false);
        }
        for c in coef {
            if !kernel_groups(&c)?.is_empty() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// First-order relation in `n` for the nested sum `C(n, v) = Σ_{i=a}^{v+off} b(n, i)`.
fn chain_shift(c: &Chain, n: Symbol, v: Symbol, off: i64) -> Result<ChainShift, ZeilbergerError> {
    if !c.body.depends_on(n) {
        return Ok(ChainShift { alpha: MRatFunc::one(), beta: Form::zero() });
    }
    if c.body.has_chains() {
        return Err(ZeilbergerError::Unsupported(alloc::format!("nested sum {c} depends on {n} below the top level")));
    }
    let Some(rec) = telescoper_of_order(&c.body, n, c.var, 1)? else {
        return Err(ZeilbergerError::Unsupported(alloc::format!("no first-order relation in {n} for {c}")));
    };
    // c0 C(n) + c1 C(n+1) = w(U+1) − w(a)
    let c0 = MRatFunc::from_poly(rec.coeffs[0].clone());
    let c1 = MRatFunc::from_poly(rec.coeffs[1].clone());
    let inv1 = c1.inv().map_err(|_| ZeilbergerError::Unsupported(String::from("vanishing leading coefficient")))?;
    let alpha = -&(&c0 * &inv1);
    let top = rec.cert.subst(c.var, &Affine::var(v).add_const(off + 1))?;
    let bottom = rec.cert.subst(c.var, &c.lower)?;
    Ok(ChainShift { alpha, beta: top.sub(&bottom).scale(&inv1) })
}

/// Finite sum `Σ_{t=0}^{len-1} f(v = start + t)`.
fn slice(f: &Form, v: Symbol, start: &Affine, len: i64) -> Result<Form, HyperError> {
    let mut acc = Form::zero();
    for t in 0..len {
        acc = acc.add(&f.subst(v, &start.add_const(t))?);
    }
    Ok(acc)
}

/// Telescopes the summand recurrence over `lower..=upper` into a recurrence
/// for `F(n) = Σ_{v=lower}^{upper} f(n, v)`, folding in boundary slices.
///
/// `skip` moves the telescoping window inward by that many points on each
/// side, summing the excluded points of the summand recurrence explicitly;
/// this avoids evaluating the certificate at its poles.
pub fn sum_recurrence_with_skip(
    f: &Form,
    lower: &Affine,
    upper: &Affine,
    rec: &SummandRecurrence,
    skip: (i64, i64),
) -> Result<LinearRecurrence, ZeilbergerError> {
    let (n, v) = (rec.n, rec.v);
    let step = |a: &Affine| -> i64 { a.coeff(n) };
    let (sl, su) = (step(lower), step(upper));
    let g = rec.cert.clone();
    let lo_in = lower.add_const(skip.0);
    let hi_in = upper.add_const(-skip.1);
    let mut rhs = g.subst(v, &hi_in.add_const(1))?.sub(&g.subst(v, &lo_in)?);
    // Points of the summand recurrence excluded from the telescoping window.
    let mut lhs_edge = Form::zero();
    for (i, c) in rec.coeffs.iter().enumerate() {
        let fi = f.shift(n, i as i64).scale(&MRatFunc::from_poly(c.clone()));
        lhs_edge = lhs_edge.add(&slice(&fi, v, lower, skip.0)?);
        lhs_edge = lhs_edge.add(&slice(&fi, v, &hi_in.add_const(1), skip.1)?);
    }
    rhs = rhs.add(&lhs_edge);
    // F(n+i) = Σ_{lower(n)}^{upper(n)} f(n+i, v) + upper slice − lower slice.
    for (i, c) in rec.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let i = i as i64;
        let fi = f.shift(n, i).scale(&MRatFunc::from_poly(c.clone()));
        let du = su * i;
        if du > 0 {
            rhs = rhs.add(&slice(&fi, v, &upper.add_const(1), du)?);
        } else if du < 0 {
            rhs = rhs.sub(&slice(&fi, v, &upper.add_const(du + 1), -du)?);
        }
        let dl = sl * i;
        if dl > 0 {
            rhs = rhs.sub(&slice(&fi, v, lower, dl)?);
        } else if dl < 0 {
            rhs = rhs.add(&slice(&fi, v, &lower.add_const(dl), -dl)?);
        }
    }
    Ok(LinearRecurrence::new(n, rec.coeffs.clone(), rhs))
}

/// [`sum_recurrence_with_skip`] with the smallest window that avoids certificate poles.
pub fn sum_recurrence(f: &Form, lower: &Affine, upper: &Affine, rec: &SummandRecurrence) -> Result<LinearRecurrence, ZeilbergerError> {
    let mut last = None;
    for total in 0..6 {
        for a in 0..=total {
            match sum_recurrence_with_skip(f, lower, upper, rec, (a, total - a)) {
                Ok(r) => return Ok(r),
                Err(e) => last = Some(e),
            }
        }
    }
    Err(last.expect("at least one attempt"))
}

impl fmt::Display for LinearRecurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 {
                write!(f, "({c})*F({})", self.var)?;
            } else {
                write!(f, "({c})*F({}+{i})", self.var)?;
            }
        }
        write!(f, " = {}", self.rhs)
    }
}

impl fmt::Debug for LinearRecurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
