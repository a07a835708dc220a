//! Solving linear recurrences with polynomial coefficients: polynomial,
//! rational, hypergeometric and d'Alembertian solutions.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::arith::linalg::solve_affine;
use crate::arith::{mpoly_gcd, mpoly_lcm, poly, MPoly, MRatFunc, Rational, Symbol};
use crate::domain::Domain;
use crate::expr::Affine;
use crate::form::{Chain, Form};
use crate::gosper::{param_point, shift_poly};
use crate::hyper::HyperTerm;
use crate::indefinite::indefinite_sum;
use crate::zeilberger::LinearRecurrence;

/// Solutions of a recurrence; `complete` means the homogeneous list spans
/// the full solution space of the recurrence's order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    pub homogeneous: Vec<Form>,
    pub particular: Option<Form>,
    pub complete: bool,
}

/// The variable's range and the surrounding domain; controls sign-dependent
/// factorial forms and the lower anchor of the sums introduced by order
/// reduction.
#[derive(Clone, Debug)]
pub struct SolveContext {
    pub domain: Domain,
    pub anchor: Affine,
}

impl SolveContext {
    pub fn new(domain: Domain, anchor: Affine) -> Self {
        SolveContext { domain, anchor }
    }
}

fn poly_form(p: &MRatFunc) -> Form {
    Form::rational(p.clone())
}

/// The rhs as a rational function, when it is one.
fn rational_rhs(rhs: &Form) -> Option<MRatFunc> {
    let mut acc = MRatFunc::zero();
    for t in &rhs.terms {
        if !t.chains.is_empty() || !t.hyper.kernel().is_one() {
            return None;
        }
        acc = &acc + t.hyper.coeff();
    }
    Some(acc)
}

/// Nonnegative integer roots common to the polynomial at two generic
/// specializations of its parameters.
fn nonneg_int_roots(p: &MPoly, d: Symbol) -> Vec<i64> {
    let mut params = p.vars();
    params.remove(&d);
    let mut common: Option<BTreeSet<i64>> = None;
    for attempt in 0..2 {
        let env = param_point(&params, attempt);
        let Some(q) = p.eval_partial(&env).to_polynomial(d) else { return Vec::new() };
        if q.is_zero() {
            continue;
        }
        let roots: BTreeSet<i64> = poly::integer_roots(&q)
            .unwrap_or_default()
            .into_iter()
            .filter(|r| !r.is_negative())
            .filter_map(|r| i64::try_from(r).ok())
            .collect();
        common = Some(match common {
            None => roots,
            Some(c) => c.intersection(&roots).copied().collect(),
        });
        if params.is_empty() {
            break;
        }
    }
    common.map(|c| c.into_iter().collect()).unwrap_or_default()
}

fn binom_u(k: usize, j: usize) -> Rational {
    Rational::from_integer(crate::expr::binomial(k as i64, j as i64))
}

/// Polynomial solutions of `rec` when its rhs is polynomial in the variable.
pub fn polynomial_solutions(rec: &LinearRecurrence) -> SolutionSet {
    let empty = SolutionSet { homogeneous: Vec::new(), particular: None, complete: false };
    let n = rec.var;
    let Some(rhs) = rational_rhs(&rec.rhs) else { return empty };
    if rhs.den().contains(n) {
        return empty;
    }
    let d = rec.order();
    // Operator in the forward-difference basis: Σ q_j Δ^j.
    let q: Vec<MPoly> = (0..=d)
        .map(|j| (j..=d).fold(MPoly::zero(), |acc, k| &acc + &rec.coeffs[k].scale(&binom_u(k, j))))
        .collect();
    let b = q.iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(j, p)| p.degree_in(n) as i64 - j as i64).max();
    let Some(b) = b else { return empty };
    // Indicial polynomial in a fresh symbol for the solution degree.
    let ds = Symbol::fresh();
    let dp = MPoly::var(ds);
    let mut ind = MPoly::zero();
    for (j, p) in q.iter().enumerate() {
        if p.is_zero() || p.degree_in(n) as i64 - j as i64 != b {
            continue;
        }
        let lc = p.to_univariate(n).pop().expect("nonzero");
        let mut ff = MPoly::one();
        for t in 0..j {
            ff = &ff * &(&dp - &MPoly::from_int(t as i64));
        }
        ind = &ind + &(&lc * &ff);
    }
    let rhs_deg = if rhs.is_zero() { -1 } else { rhs.num().degree_in(n) as i64 };
    let mut bound = rhs_deg - b;
    for r in nonneg_int_roots(&ind, ds) {
        bound = bound.max(r);
    }
    if bound < 0 {
        let particular = if rhs.is_zero() { Some(Form::zero()) } else { None };
        return SolutionSet { homogeneous: Vec::new(), particular, complete: false };
    }
    let nun = bound as usize + 1;
    let np = MPoly::var(n);
    let mut cols: Vec<Vec<MPoly>> = Vec::with_capacity(nun);
    for k in 0..nun {
        let mut col = MPoly::zero();
        for (i, c) in rec.coeffs.iter().enumerate() {
            col = &col + &(c * &(&np + &MPoly::from_int(i as i64)).pow(k as u32));
        }
        cols.push(col.to_univariate(n));
    }
    let rhs_num = rhs.num() * &MPoly::one();
    let rhs_scale = MRatFunc::new(MPoly::one(), rhs.den().clone()).expect("nonzero");
    let rhs_coeffs = rhs_num.to_univariate(n);
    let rows = cols.iter().map(|c| c.len()).chain(core::iter::once(rhs_coeffs.len())).max().unwrap_or(0);
    let a: Vec<Vec<MRatFunc>> = (0..rows)
        .map(|i| cols.iter().map(|c| MRatFunc::from_poly(c.get(i).cloned().unwrap_or_else(MPoly::zero))).collect())
        .collect();
    let bvec: Vec<MRatFunc> = (0..rows)
        .map(|i| &MRatFunc::from_poly(rhs_coeffs.get(i).cloned().unwrap_or_else(MPoly::zero)) * &rhs_scale)
        .collect();
    let to_poly = |xs: &[MRatFunc]| {
        let mut acc = MRatFunc::zero();
        let mut pw = MRatFunc::one();
        for x in xs {
            acc = &acc + &(x * &pw);
            pw = &pw * &MRatFunc::var(n);
        }
        acc
    };
    match solve_affine(&a, &bvec, nun) {
        Some((x, kernel)) => SolutionSet {
            homogeneous: kernel.iter().map(|k| poly_form(&to_poly(k))).collect(),
            particular: Some(poly_form(&to_poly(&x))),
            complete: false,
        },
        None => {
            let kernel = crate::arith::linalg::nullspace(&a, nun);
            SolutionSet { homogeneous: kernel.iter().map(|k| poly_form(&to_poly(k))).collect(), particular: None, complete: false }
        }
    }
}

/// Abramov's universal denominator for `Σ c_k F(n+k) = rhs` with rational rhs.
pub fn universal_denominator(rec: &LinearRecurrence) -> MPoly {
    let n = rec.var;
    let hom = match rational_rhs(&rec.rhs) {
        Some(f) if !f.is_zero() => annihilate_rhs(rec, &f),
        _ => rec.homogeneous(),
    };
    let d = hom.order() as i64;
    let mut a = hom.coeffs[0].clone();
    let mut b = shift_poly(&hom.coeffs[d as usize], n, -d);
    let mut u = MPoly::one();
    let hs = crate::gosper::shift_candidates(&a, &b, n);
    for &h in hs.iter().rev() {
        let h = h as i64;
        let g = mpoly_gcd(&a, &shift_poly(&b, n, h));
        if g.degree_in(n) == 0 {
            continue;
        }
        a = a.div_exact(&g).expect("gcd divides");
        b = b.div_exact(&shift_poly(&g, n, -h)).expect("gcd divides");
        for i in 0..=h {
            u = &u * &shift_poly(&g, n, -i);
        }
    }
    u
}

/// `(f(n) E − f(n+1)) L`, a homogeneous operator killing every solution of `L y = f`.
fn annihilate_rhs(rec: &LinearRecurrence, f: &MRatFunc) -> LinearRecurrence {
    let n = rec.var;
    let d = rec.order();
    let f1 = f.shift(n, 1);
    let mut cs = alloc::vec![MRatFunc::zero(); d + 2];
    for (k, c) in rec.coeffs.iter().enumerate() {
        let c = MRatFunc::from_poly(c.clone());
        cs[k + 1] = &cs[k + 1] + &(f * &c.shift(n, 1));
        cs[k] = &cs[k] - &(&f1 * &c);
    }
    let l = cs.iter().fold(MPoly::one(), |acc, c| mpoly_lcm(&acc, c.den()));
    let lr = MRatFunc::from_poly(l);
    LinearRecurrence::new(n, cs.iter().map(|c| (c * &lr).num().clone()).collect(), Form::zero())
}

/// Rational solutions via the universal denominator.
pub fn rational_solutions(rec: &LinearRecurrence) -> SolutionSet {
    let n = rec.var;
    let u = universal_denominator(rec);
    let dens: Vec<MPoly> = (0..=rec.order()).map(|k| shift_poly(&u, n, k as i64)).collect();
    let l = dens.iter().fold(MPoly::one(), |acc, p| mpoly_lcm(&acc, p));
    let coeffs: Vec<MPoly> = rec
        .coeffs
        .iter()
        .zip(&dens)
        .map(|(c, dk)| c * &l.div_exact(dk).expect("lcm divides"))
        .collect();
    let rhs = rec.rhs.scale(&MRatFunc::from_poly(l));
    let sub = LinearRecurrence::new(n, coeffs, rhs);
    let ps = polynomial_solutions(&sub);
    let ur = MRatFunc::from_poly(u);
    let div = |f: &Form| f.scale(&ur.inv().expect("nonzero"));
    SolutionSet {
        homogeneous: ps.homogeneous.iter().map(div).collect(),
        particular: ps.particular.as_ref().map(div),
        complete: false,
    }
}

/// Roots `ρ(params)` of the linear factors `v − ρ` of `p`, with multiplicity,
/// and the cofactor.
pub fn linear_factors(p: &MPoly, v: Symbol) -> (Vec<(MPoly, u32)>, MPoly) {
    let mut rest = p.clone();
    let mut out: Vec<(MPoly, u32)> = Vec::new();
    let mut params = p.vars();
    params.remove(&v);
    let params: Vec<Symbol> = params.into_iter().collect();
    'outer: loop {
        if rest.degree_in(v) == 0 {
            break;
        }
        let pset: BTreeSet<Symbol> = params.iter().copied().collect();
        let base = param_point(&pset, 0);
        let roots_at = |env: &alloc::collections::BTreeMap<Symbol, Rational>| -> Vec<Rational> {
            let q = rest.eval_partial(env);
            if q.degree_in(v) != rest.degree_in(v) {
                return Vec::new();
            }
            q.to_polynomial(v).and_then(|q| poly::rational_roots(&q).ok()).unwrap_or_default()
        };
        let roots0 = roots_at(&base);
        let mut per_param: Vec<Vec<Rational>> = Vec::new();
        for s in &params {
            let mut env = base.clone();
            *env.get_mut(s).expect("param present") += Rational::one();
            per_param.push(roots_at(&env));
        }
        for r0 in &roots0 {
            // Enumerate slope choices, one per parameter.
            let choices: Vec<Vec<Rational>> = per_param.iter().map(|rs| rs.iter().map(|r| r - r0).collect()).collect();
            let total: usize = choices.iter().map(|c| c.len().max(1)).product();
            for idx in 0..total.min(256) {
                let mut k = idx;
                let mut rho = MPoly::constant(r0.clone());
                let mut ok = true;
                for (pi, s) in params.iter().enumerate() {
                    let c = &choices[pi];
                    if c.is_empty() {
                        ok = false;
                        break;
                    }
                    let slope = &c[k % c.len()];
                    k /= c.len();
                    let shifted = &MPoly::var(*s) - &MPoly::constant(base[s].clone());
                    rho = &rho + &shifted.scale(slope);
                }
                if !ok {
                    continue;
                }
                let lin = &MPoly::var(v) - &rho;
                if let Some(q) = rest.div_exact(&lin) {
                    rest = q;
                    match out.iter_mut().find(|(r, _)| *r == rho) {
                        Some((_, m)) => *m += 1,
                        None => out.push((rho, 1)),
                    }
                    continue 'outer;
                }
            }
        }
        break;
    }
    (out, rest)
}

/// A term `T` with `T(n+1)/T(n) = r(n)`, expressed through factorials,
/// or `None` if `r` does not split into supported linear factors.
pub fn hyper_product(r: &MRatFunc, n: Symbol, ctx: &SolveContext) -> Option<HyperTerm> {
    let mut t = HyperTerm::one();
    for (p, sign) in [(r.num(), 1i32), (r.den(), -1i32)] {
        let (roots, rest) = linear_factors(p, n);
        if rest.degree_in(n) > 0 {
            return None;
        }
        let z = rest.constant_value()?;
        if z != Rational::one() {
            let zt = HyperTerm::power(&z, &Affine::var(n));
            t = t.mul(&if sign > 0 { zt } else { zt.inv().ok()? });
        }
        for (rho, m) in roots {
            let f = linear_product(&rho, n, ctx)?;
            t = t.mul(&f.pow((sign * m as i32) as i64).ok()?);
        }
    }
    Some(t)
}

/// `T(n)` with `T(n+1)/T(n) = n − ρ`.
fn linear_product(rho: &MPoly, n: Symbol, ctx: &SolveContext) -> Option<HyperTerm> {
    let beta = -rho;
    let (c, mut aff) = affine_parts(&beta)?;
    let nv = Affine::var(n);
    if c.is_integer() {
        let bi: i64 = c.to_integer().try_into().ok()?;
        aff = aff.add_const(bi);
        let top = nv.add(&aff).add_const(-1);
        if ctx.domain.max_of(&top).is_some_and(|m| m < 0) {
            // Π (k + β) = (−1)^n / (−β − n)!
            let f = HyperTerm::factorial(&nv.add(&aff).neg(), -1).ok()?;
            return Some(f.mul(&HyperTerm::power(&-Rational::one(), &nv)));
        }
        return HyperTerm::factorial(&top, 1).ok();
    }
    if (&c * Rational::from_integer(2.into())).is_integer() {
        // β = B + 1/2: Π (k + β) ∝ (2n + 2B)! / (4^n (n + B)!).
        let bi: i64 = (c - Rational::new(1.into(), 2.into())).to_integer().try_into().ok()?;
        let b = aff.add_const(bi);
        let num = HyperTerm::factorial(&nv.scale(2).add(&b.scale(2)), 1).ok()?;
        let den = HyperTerm::factorial(&nv.add(&b), -1).ok()?;
        let four = HyperTerm::power(&Rational::from_integer(4.into()), &nv).inv().ok()?;
        return Some(num.mul(&den).mul(&four));
    }
    None
}

/// Splits a linear polynomial into its constant and an integer affine form
/// of the remaining part.
fn affine_parts(p: &MPoly) -> Option<(Rational, Affine)> {
    let c = p.constant_term();
    let lin = p - &MPoly::constant(c.clone());
    let aff = Affine::from_mpoly(&lin)?;
    Some((c, aff))
}

/// Petkovšek's algorithm on the homogeneous part.
pub fn hypergeometric_solutions(rec: &LinearRecurrence, ctx: &SolveContext) -> Vec<HyperTerm> {
    let n = rec.var;
    let d = rec.order();
    if d == 0 {
        return Vec::new();
    }
    if d == 1 {
        let r = -&(&MRatFunc::from_poly(rec.coeffs[0].clone()) / &MRatFunc::from_poly(rec.coeffs[1].clone()));
        return hyper_product(&r, n, ctx).into_iter().collect();
    }
    let c0 = &rec.coeffs[0];
    let cd = shift_poly(&rec.coeffs[d], n, -(d as i64) + 1);
    let (fa, _) = linear_factors(c0, n);
    let (fb, _) = linear_factors(&cd, n);
    let expand = |fs: &[(MPoly, u32)]| -> Vec<MPoly> { fs.iter().flat_map(|(r, m)| (0..*m).map(move |_| r.clone())).collect() };
    let ra = expand(&fa);
    let rb = expand(&fb);
    let mut found: Vec<(MRatFunc, HyperTerm)> = Vec::new();
    let subsets = |rs: &[MPoly]| -> Vec<MPoly> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for mask in 0u32..(1u32 << rs.len().min(16)) {
            let mut p = MPoly::one();
            for (i, r) in rs.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    p = &p * &(&MPoly::var(n) - r);
                }
            }
            if seen.insert(p.clone()) {
                out.push(p);
            }
        }
        out
    };
    let sa = subsets(&ra);
    let sb = subsets(&rb);
    for a in &sa {
        for b in &sb {
            let pk: Vec<MPoly> = (0..=d)
                .map(|k| {
                    let mut p = rec.coeffs[k].clone();
                    for i in 0..k {
                        p = &p * &shift_poly(a, n, i as i64);
                    }
                    for i in k..d {
                        p = &p * &shift_poly(b, n, i as i64);
                    }
                    p
                })
                .collect();
            let m = pk.iter().map(|p| p.degree_in(n)).max().unwrap_or(0);
            let zs = MPoly::var(Symbol::fresh());
            let zsym = zs.max_var().expect("var");
            let mut aux = MPoly::zero();
            for (k, p) in pk.iter().enumerate() {
                if p.degree_in(n) == m {
                    let lc = p.to_univariate(n).pop().expect("nonzero");
                    aux = &aux + &(&lc * &zs.pow(k as u32));
                }
            }
            let Some(auxp) = aux.to_polynomial(zsym) else { continue };
            let Ok(zroots) = poly::rational_roots(&auxp) else { continue };
            for z in zroots.into_iter().filter(|z| !z.is_zero()) {
                let coeffs: Vec<MPoly> = pk
                    .iter()
                    .enumerate()
                    .map(|(k, p)| p.scale(&crate::arith::rational::rat_pow(&z, k as i64)))
                    .collect();
                let sub = LinearRecurrence::new(n, coeffs, Form::zero());
                let ps = polynomial_solutions(&sub);
                for c in ps.homogeneous {
                    let Some(cr) = rational_rhs(&c) else { continue };
                    if cr.is_zero() {
                        continue;
                    }
                    let ratio = &(&MRatFunc::from_poly(a.clone()) / &MRatFunc::from_poly(b.clone())).scale(&z)
                        * &(&cr.shift(n, 1) / &cr);
                    if found.iter().any(|(r, _)| *r == ratio) {
                        continue;
                    }
                    let Some(h) = hyper_product(&(&MRatFunc::from_poly(a.clone()) / &MRatFunc::from_poly(b.clone())).scale(&z), n, ctx)
                    else {
                        continue;
                    };
                    let h = h.scale(&cr);
                    found.push((ratio, h));
                }
            }
        }
    }
    found.into_iter().map(|(_, h)| h).collect()
}

/// `Σ_{i=anchor}^{n-1} t(i)`.
fn sum_to(t: &Form, n: Symbol, ctx: &SolveContext) -> Form {
    let i = Symbol::fresh();
    let body = t.subst(n, &Affine::var(i)).expect("renaming is regular");
    indefinite_sum(&body, i, &ctx.anchor, &Affine::var(n).add_const(-1), &ctx.domain)
}

/// d'Alembertian solutions by repeated order reduction.
pub fn dalembertian_solutions(rec: &LinearRecurrence, ctx: &SolveContext) -> SolutionSet {
    dalembertian_with(rec, ctx, &|r, c| hypergeometric_solutions(r, c))
}

/// As [`dalembertian_solutions`], with the hypergeometric-solution finder supplied.
pub fn dalembertian_with(
    rec: &LinearRecurrence,
    ctx: &SolveContext,
    hyper: &dyn Fn(&LinearRecurrence, &SolveContext) -> Vec<HyperTerm>,
) -> SolutionSet {
    let n = rec.var;
    let d = rec.order();
    if d == 0 {
        let c0 = MRatFunc::from_poly(rec.coeffs[0].clone());
        let Ok(inv) = c0.inv() else {
            return SolutionSet { homogeneous: Vec::new(), particular: None, complete: false };
        };
        return SolutionSet { homogeneous: Vec::new(), particular: Some(rec.rhs.scale(&inv)), complete: true };
    }
    let h = hyper(&rec.homogeneous(), ctx).into_iter().next();
    let Some(h) = h else {
        return SolutionSet { homogeneous: Vec::new(), particular: None, complete: false };
    };
    // F = h·y, Σ_k a_k y(n+k) = rhs/h with a_k = c_k h(n+k)/h(n).
    let a: Vec<MRatFunc> = (0..=d)
        .map(|k| {
            let q = h.shift(n, k as i64).div(&h).expect("nonzero");
            debug_assert!(q.kernel().is_one());
            &MRatFunc::from_poly(rec.coeffs[k].clone()) * q.coeff()
        })
        .collect();
    // Δy = H satisfies Σ_{t<d} b_t H(n+t) = rhs/h with b_t = Σ_{k>t} a_k.
    let b: Vec<MRatFunc> = (0..d).map(|t| ((t + 1)..=d).fold(MRatFunc::zero(), |acc, k| &acc + &a[k])).collect();
    let hinv = h.inv().expect("nonzero");
    let rhs_h = rec.rhs.mul_hyper(&hinv);
    let l = b.iter().fold(MPoly::one(), |acc, c| mpoly_lcm(&acc, c.den()));
    let lr = MRatFunc::from_poly(l.clone());
    let bcoeffs: Vec<MPoly> = b.iter().map(|c| (c * &lr).num().clone()).collect();
    let sub = LinearRecurrence::new(n, bcoeffs, rhs_h.scale(&lr));
    let inner = dalembertian_with(&sub, ctx, hyper);
    let hf = Form::from_hyper(h.clone());
    let mut homogeneous = alloc::vec![hf.clone()];
    for hh in &inner.homogeneous {
        homogeneous.push(hf.mul(&sum_to(hh, n, ctx)));
    }
    let particular = inner.particular.as_ref().map(|p| hf.mul(&sum_to(p, n, ctx)));
    SolutionSet { homogeneous, particular, complete: inner.complete }
}

/// Rewrites nested sums in every solution into the harmonic-sum basis where possible.
pub fn simplify_solution_depth(sols: &SolutionSet, n: Symbol, weight_cap: u32) -> SolutionSet {
    let f = |x: &Form| crate::sums::to_basis_form(x, n, weight_cap);
    SolutionSet {
        homogeneous: sols.homogeneous.iter().map(f).collect(),
        particular: sols.particular.as_ref().map(f),
        complete: sols.complete,
    }
}

/// True if `chain` is a sum whose body depends only on its own variable.
pub fn is_indefinite(chain: &Chain) -> bool {
    chain.body.vars().iter().all(|v| *v == chain.var)
}
