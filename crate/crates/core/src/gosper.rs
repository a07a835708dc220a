//! Gosper's algorithm over `Q(params)[v]`, with the parameterized variant used
//! by creative telescoping.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_traits::Signed;

use crate::arith::linalg::nullspace;
use crate::arith::{mpoly_gcd, mpoly_lcm, poly, MPoly, MRatFunc, Rational, Symbol};
use crate::expr::Affine;
use crate::form::Form;
use crate::hyper::{HyperTerm, Kernel};

/// `g = ratio · f` is an antidifference of `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TelescoperCertificate {
    pub ratio: MRatFunc,
}

/// `Σ coeffs[i]·f_i(v) = g(v+1) − g(v)` with `g = cert`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamTelescoper {
    pub coeffs: Vec<MRatFunc>,
    pub cert: HyperTerm,
}

/// `r(v) = a(v)/b(v) · c(v+1)/c(v)` with `gcd(a(v), b(v+h)) = 1` for all `h >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GosperForm {
    pub a: MPoly,
    pub b: MPoly,
    pub c: MPoly,
}

pub(crate) fn shift_poly(p: &MPoly, v: Symbol, h: i64) -> MPoly {
    if h == 0 {
        return p.clone();
    }
    p.subst(v, &Affine::var(v).add_const(h).to_mpoly())
}

const SPECIAL: [(i64, i64); 8] = [(13, 7), (29, 11), (47, 13), (61, 17), (83, 19), (103, 23), (131, 29), (151, 31)];

/// Values for `params` at which generic behaviour is expected.
pub(crate) fn param_point(params: &BTreeSet<Symbol>, attempt: usize) -> BTreeMap<Symbol, Rational> {
    params
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let (n, d) = SPECIAL[(i + 3 * attempt) % SPECIAL.len()];
            (*s, Rational::new((n + 10 * attempt as i64).into(), d.into()))
        })
        .collect()
}

/// Candidate shifts `h >= 0` where `a(v)` and `b(v+h)` may share a factor.
pub(crate) fn shift_candidates(a: &MPoly, b: &MPoly, v: Symbol) -> Vec<u64> {
    if a.degree_in(v) == 0 || b.degree_in(v) == 0 {
        return Vec::new();
    }
    let mut params = a.vars();
    params.extend(b.vars());
    params.remove(&v);
    for attempt in 0..6 {
        let env = param_point(&params, attempt);
        let pa = a.eval_partial(&env);
        let pb = b.eval_partial(&env);
        if pa.degree_in(v) != a.degree_in(v) || pb.degree_in(v) != b.degree_in(v) {
            continue;
        }
        let (Some(pa), Some(pb)) = (pa.to_polynomial(v), pb.to_polynomial(v)) else { continue };
        if let Ok(hs) = poly::shift_set(&pa, &pb) {
            return hs;
        }
    }
    // Degenerate specializations everywhere: try a generous range symbolically.
    (0..=(a.degree_in(v) * b.degree_in(v) * 8) as u64).collect()
}

/// Gosper–Petkovšek normal form of the rational function `r` in `v`.
pub fn gosper_form(r: &MRatFunc, v: Symbol) -> GosperForm {
    let mut a = r.num().clone();
    let mut b = r.den().clone();
    let mut c = MPoly::one();
    loop {
        let mut changed = false;
        for h in shift_candidates(&a, &b, v) {
            let h = h as i64;
            let g = mpoly_gcd(&a, &shift_poly(&b, v, h));
            if g.degree_in(v) == 0 {
                continue;
            }
            a = a.div_exact(&g).expect("gcd divides");
            b = b.div_exact(&shift_poly(&g, v, -h)).expect("shifted gcd divides");
            for i in 1..=h {
                c = &c * &shift_poly(&g, v, -i);
            }
            changed = true;
        }
        if !changed {
            return GosperForm { a, b, c };
        }
    }
}

fn coeff_at(p: &[MPoly], i: usize) -> MPoly {
    p.get(i).cloned().unwrap_or_else(MPoly::zero)
}

fn nonneg_int(r: &MRatFunc) -> Option<i64> {
    let c = r.constant_value()?;
    if c.is_integer() && !c.is_negative() {
        c.to_integer().try_into().ok()
    } else {
        None
    }
}

/// Degree bound for polynomial `x` with `A x(v+1) − B x(v) = rhs`, `deg rhs <= rhs_deg`.
fn degree_bound(big_a: &MPoly, big_b: &MPoly, rhs_deg: i64, v: Symbol) -> i64 {
    let plus = (big_a + big_b).to_univariate(v);
    let minus = (big_a - big_b).to_univariate(v);
    let dp = plus.len() as i64 - 1;
    let dm = minus.len() as i64 - 1;
    if dm >= dp {
        return rhs_deg - dm;
    }
    let mut d = rhs_deg - dp + 1;
    let lp = MRatFunc::from_poly(coeff_at(&plus, dp as usize));
    let lm = MRatFunc::from_poly(coeff_at(&minus, (dp - 1) as usize));
    let cand = &(&lm * &MRatFunc::from_int(-2)) / &lp;
    if let Some(k) = nonneg_int(&cand) {
        d = d.max(k);
    }
    d
}

/// Finds `c_0..c_m` (not all zero, free of `v`) and `g` with
/// `g(v+1) − g(v) = Σ c_i·q_i·K`, where every `q_i` is rational in `v`.
pub fn parameterized_gosper(kernel: &Kernel, qs: &[MRatFunc], v: Symbol) -> Option<ParamTelescoper> {
    let (coeffs, mut certs) = parameterized_gosper_multi(&[(kernel.clone(), qs.to_vec())], v)?;
    let out = ParamTelescoper { coeffs, cert: certs.pop().expect("one group") };
    debug_assert!(check_param_telescoper(kernel, qs, v, &out));
    Some(out)
}

/// Per-group unknown columns and certificate denominators for one kernel class.
struct GroupSystem {
    cols: Vec<Vec<MPoly>>,
    nx: usize,
    big_b: MPoly,
    cden: MPoly,
}

fn group_system(kernel: &Kernel, qs: &[MRatFunc], v: Symbol) -> GroupSystem {
    let den = qs.iter().fold(MPoly::one(), |acc, q| mpoly_lcm(&acc, q.den()));
    let ps: Vec<MPoly> = qs
        .iter()
        .map(|q| {
            let f = den.div_exact(q.den()).expect("lcm divides");
            q.num() * &f
        })
        .collect();
    let den_q = MRatFunc::from_poly(den.clone());
    let r = &(&kernel.quotient(v) * &den_q) / &MRatFunc::from_poly(shift_poly(&den, v, 1));
    let GosperForm { a, b, c } = gosper_form(&r, v);
    let big_b = shift_poly(&b, v, -1);
    let pdeg = ps.iter().map(|p| p.degree_in(v) as i64).max().unwrap_or(0);
    let rhs_deg = c.degree_in(v) as i64 + pdeg;
    let d = degree_bound(&a, &big_b, rhs_deg, v).min(MAX_DEGREE);
    let nx = (d.max(-1) + 1) as usize;
    let mut cols = Vec::with_capacity(nx + ps.len());
    let vp = MPoly::var(v);
    let v1 = &vp + &MPoly::one();
    for k in 0..nx {
        let col = &(&a * &v1.pow(k as u32)) - &(&big_b * &vp.pow(k as u32));
        cols.push(col.to_univariate(v));
    }
    for p in &ps {
        cols.push((-&(&c * p)).to_univariate(v));
    }
    GroupSystem { cols, nx, big_b, cden: &c * &den }
}

const MAX_DEGREE: i64 = 64;

/// Shared-coefficient version over several independent telescoping
/// equations: finds `c` and one certificate per equation with
/// `g_k(v+1) − g_k(v) = Σ_i c_i q_{k,i} K_k` for every `k`.
pub fn parameterized_gosper_multi(groups: &[(Kernel, Vec<MRatFunc>)], v: Symbol) -> Option<(Vec<MRatFunc>, Vec<HyperTerm>)> {
    param_gosper_space(groups, v).into_iter().find(|(c, _)| c.iter().any(|x| !x.is_zero()))
}

/// All solutions of the system in [`parameterized_gosper_multi`], as a basis
/// of the solution space (including solutions with `c = 0` only when a
/// certificate is nonzero).
pub fn param_gosper_space(groups: &[(Kernel, Vec<MRatFunc>)], v: Symbol) -> Vec<(Vec<MRatFunc>, Vec<HyperTerm>)> {
    let Some(m) = groups.first().map(|g| g.1.len()) else { return Vec::new() };
    let systems: Vec<GroupSystem> = groups.iter().map(|(k, qs)| group_system(k, qs, v)).collect();
    let total_x: usize = systems.iter().map(|s| s.nx).sum();
    let ncols = total_x + m;
    let mut matrix: Vec<Vec<MRatFunc>> = Vec::new();
    let mut off = 0;
    for s in &systems {
        let rows = s.cols.iter().map(|c| c.len()).max().unwrap_or(0);
        for i in 0..rows {
            let mut row = alloc::vec![MRatFunc::zero(); ncols];
            for k in 0..s.nx {
                row[off + k] = MRatFunc::from_poly(coeff_at(&s.cols[k], i));
            }
            for j in 0..m {
                row[total_x + j] = MRatFunc::from_poly(coeff_at(&s.cols[s.nx + j], i));
            }
            if row.iter().any(|x| !x.is_zero()) {
                matrix.push(row);
            }
        }
        off += s.nx;
    }
    let vr = MRatFunc::var(v);
    let mut out = Vec::new();
    for sol in nullspace(&matrix, ncols) {
        let coeffs: Vec<MRatFunc> = sol[total_x..].to_vec();
        let mut certs = Vec::new();
        let mut off = 0;
        for (s, (kernel, _)) in systems.iter().zip(groups) {
            let mut x = MRatFunc::zero();
            let mut pw = MRatFunc::one();
            for xk in &sol[off..off + s.nx] {
                x = &x + &(xk * &pw);
                pw = &pw * &vr;
            }
            off += s.nx;
            let ratio = &(&MRatFunc::from_poly(s.big_b.clone()) * &x) / &MRatFunc::from_poly(s.cden.clone());
            certs.push(HyperTerm::new(ratio, kernel.clone()));
        }
        out.push((coeffs, certs));
    }
    out
}

/// Symbolic check of `g(v+1) − g(v) = Σ c_i q_i K` after dividing by `K`.
pub fn check_param_telescoper(kernel: &Kernel, qs: &[MRatFunc], v: Symbol, t: &ParamTelescoper) -> bool {
    if t.cert.is_zero() {
        return qs.iter().zip(&t.coeffs).fold(MRatFunc::zero(), |acc, (q, c)| &acc + &(q * c)).is_zero();
    }
    if t.cert.kernel() != kernel {
        return false;
    }
    let g = t.cert.coeff();
    let lhs = &(&g.shift(v, 1) * &kernel.quotient(v)) - g;
    let rhs = qs.iter().zip(&t.coeffs).fold(MRatFunc::zero(), |acc, (q, c)| &acc + &(q * c));
    lhs == rhs
}

/// Antidifference of `f` in `v` as a rational multiple of `f`, or `None` if
/// no hypergeometric antidifference exists.
pub fn gosper(f: &HyperTerm, v: Symbol) -> Option<TelescoperCertificate> {
    if f.is_zero() {
        return Some(TelescoperCertificate { ratio: MRatFunc::zero() });
    }
    let t = parameterized_gosper(f.kernel(), core::slice::from_ref(f.coeff()), v)?;
    let c0 = &t.coeffs[0];
    let ratio = &(t.cert.coeff() / c0) / f.coeff();
    let cert = TelescoperCertificate { ratio };
    if !check_certificate(f, v, &cert) {
        return None;
    }
    Some(cert)
}

/// `r(v)·R(v+1) − R(v) = 1` with `r` the shift quotient of `f`.
pub fn check_certificate(f: &HyperTerm, v: Symbol, cert: &TelescoperCertificate) -> bool {
    let r = f.quotient(v);
    let big_r = &cert.ratio;
    &(&r * &big_r.shift(v, 1)) - big_r == MRatFunc::one()
}

impl TelescoperCertificate {
    pub fn antidifference(&self, f: &HyperTerm) -> HyperTerm {
        f.scale(&self.ratio)
    }
}

/// `Σ_{v=lower}^{upper} f(v)` as `g(upper+1) − g(lower)`.
pub fn telescope_definite(f: &HyperTerm, v: Symbol, lower: &Affine, upper: &Affine) -> Option<Form> {
    if let Some(len) = upper.sub(lower).as_constant() {
        if len < 0 {
            return Some(Form::zero());
        }
    }
    let cert = gosper(f, v)?;
    let g = cert.antidifference(f);
    let hi = g.subst(v, &upper.add_const(1)).ok()?;
    let lo = g.subst(v, lower).ok()?;
    Some(Form::from_hyper(hi).sub(&Form::from_hyper(lo)))
}
