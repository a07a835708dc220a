//! Dense univariate polynomials over the rationals.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::{denominator_lcm, int, positive_divisors, Rational};
use super::{ArithError, Symbol};

/// `coeffs[i]` is the coefficient of `var^i`; the last entry is nonzero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    var: Symbol,
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(var: Symbol, mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { var, coeffs }
    }

    pub fn from_ints(var: Symbol, coeffs: &[i64]) -> Self {
        Self::new(var, coeffs.iter().map(|c| int(*c)).collect())
    }

    pub fn zero(var: Symbol) -> Self {
        Polynomial { var, coeffs: Vec::new() }
    }

    pub fn one(var: Symbol) -> Self {
        Self::constant(var, Rational::one())
    }

    pub fn constant(var: Symbol, c: Rational) -> Self {
        Self::new(var, vec![c])
    }

    /// The polynomial `var`.
    pub fn x(var: Symbol) -> Self {
        Self::new(var, vec![Rational::zero(), Rational::one()])
    }

    pub fn var(&self) -> Symbol {
        self.var
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.var, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.lc();
        self.scale(&lc.recip())
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * int(i as i64))
            .collect();
        Self::new(self.var, coeffs)
    }

    /// `p(x + h)`.
    pub fn shift(&self, h: &Rational) -> Self {
        let mut acc = Polynomial::zero(self.var);
        let lin = Polynomial::new(self.var, vec![h.clone(), Rational::one()]);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Polynomial::constant(self.var, c.clone());
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut rem = self.coeffs.clone();
        let dd = d.coeffs.len() - 1;
        if rem.len() <= dd {
            return (Polynomial::zero(self.var), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        let lc_inv = d.lc().recip();
        for k in (0..quot.len()).rev() {
            let q = &rem[k + dd] * &lc_inv;
            if !q.is_zero() {
                for (i, dc) in d.coeffs.iter().enumerate() {
                    rem[k + i] -= &q * dc;
                }
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        (Polynomial::new(self.var, quot), Polynomial::new(self.var, rem))
    }

    pub fn exact_div(&self, d: &Polynomial) -> Option<Polynomial> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Clears denominators and removes the integer content; the leading
    /// coefficient of the result is positive.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let l = denominator_lcm(self.coeffs.iter());
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(l.clone())).to_integer())
            .collect();
        int_primitive(ints)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Polynomial::one(self.var);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Squarefree part (monic).
    pub fn squarefree_part(&self) -> Polynomial {
        if self.is_constant() {
            return Polynomial::one(self.var);
        }
        let g = poly_gcd(self, &self.derivative());
        self.exact_div(&g).expect("gcd divides").monic()
    }
}

fn int_primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for c in v.iter_mut() {
            *c /= &g;
        }
    }
    if v.last().is_some_and(|c| c.is_negative()) {
        for c in v.iter_mut() {
            *c = -&*c;
        }
    }
    v
}

fn int_trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

/// Sparse pseudo-remainder of integer polynomials (result up to a power of lc(v)).
fn int_prem(u: &[BigInt], v: &[BigInt]) -> Vec<BigInt> {
    let mut r = u.to_vec();
    let dv = v.len() - 1;
    let lcv = &v[dv];
    int_trim(&mut r);
    while r.len() > dv && !r.is_empty() {
        let dr = r.len() - 1;
        let lcr = r[dr].clone();
        for c in r.iter_mut() {
            *c *= lcv;
        }
        for (i, vc) in v.iter().enumerate() {
            r[i + dr - dv] -= &lcr * vc;
        }
        int_trim(&mut r);
    }
    r
}

/// Monic greatest common divisor via a primitive pseudo-remainder sequence.
pub fn poly_gcd(p: &Polynomial, q: &Polynomial) -> Polynomial {
    let var = p.var;
    if p.is_zero() {
        return q.monic();
    }
    if q.is_zero() {
        return p.monic();
    }
    let mut u = p.primitive_integer();
    let mut v = q.primitive_integer();
    if u.len() < v.len() {
        core::mem::swap(&mut u, &mut v);
    }
    loop {
        if v.len() == 1 {
            return Polynomial::one(var);
        }
        let r = int_prem(&u, &v);
        if r.is_empty() {
            let g = Polynomial::new(var, v.into_iter().map(Rational::from_integer).collect());
            return g.monic();
        }
        u = v;
        v = int_primitive(r);
    }
}

/// Determinant by fraction-free elimination (Bareiss).
pub fn det(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    if n == 0 {
        return Rational::one();
    }
    let mut sign = Rational::one();
    let mut prev = Rational::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Rational::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let val = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = val;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Sylvester matrix of `p` (degree m) and `q` (degree n): n rows of p, m rows of q.
pub fn sylvester_matrix(p: &Polynomial, q: &Polynomial) -> Vec<Vec<Rational>> {
    let m = p.degree().unwrap_or(0);
    let n = q.degree().unwrap_or(0);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![Rational::zero(); size];
        for (k, c) in p.coeffs.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![Rational::zero(); size];
        for (k, c) in q.coeffs.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Bareiss elimination over the integers; every division is exact.
fn det_int(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

fn int_sylvester(p: &[BigInt], q: &[BigInt]) -> Vec<Vec<BigInt>> {
    let (m, n) = (p.len() - 1, q.len() - 1);
    let mut rows = Vec::with_capacity(m + n);
    for (count, src) in [(n, p), (m, q)] {
        for i in 0..count {
            let mut row = vec![BigInt::zero(); m + n];
            for (k, c) in src.iter().rev().enumerate() {
                row[i + k] = c.clone();
            }
            rows.push(row);
        }
    }
    rows
}

/// `p = scale · primitive`, with the primitive part as integers.
fn integer_split(p: &Polynomial) -> (Rational, Vec<BigInt>) {
    let prim = p.primitive_integer();
    let scale = p.lc() / Rational::from_integer(prim.last().expect("nonzero").clone());
    (scale, prim)
}

/// Resultant as the determinant of the Sylvester matrix.
pub fn resultant(p: &Polynomial, q: &Polynomial) -> Result<Rational, ArithError> {
    if p.is_zero() || q.is_zero() {
        return Err(ArithError::ZeroPolynomial);
    }
    let (sp, ip) = integer_split(p);
    let (sq, iq) = integer_split(q);
    let (m, n) = (ip.len() - 1, iq.len() - 1);
    let d = Rational::from_integer(det_int(int_sylvester(&ip, &iq)));
    Ok(d * super::rational::rat_pow(&sp, n as i64) * super::rational::rat_pow(&sq, m as i64))
}

/// Fujiwara bound on the absolute value of the roots, rounded up to an integer.
fn root_bound(coeffs: &[BigInt]) -> BigInt {
    let n = coeffs.len() - 1;
    let lc = coeffs[n].abs();
    let mut best = BigInt::zero();
    for i in 1..=n {
        let a = coeffs[n - i].abs();
        if a.is_zero() {
            continue;
        }
        // Smallest t with t^i · |lc| >= |a|, halved for the constant term.
        let target = if i == n { &a / 2u32 + 1u32 } else { a };
        let mut t = (&target / &lc).nth_root(i as u32);
        while num_traits::pow(t.clone(), i) * &lc < target {
            t += 1u32;
        }
        best = best.max(t);
    }
    best * 2u32
}

const SCAN_LIMIT: u64 = 1 << 16;

const PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    acc
}

/// Determinant modulo `2^61 - 1`.
fn det_mod(m: &[Vec<BigInt>]) -> u64 {
    let p = BigInt::from(PRIME);
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .map(|row| row.iter().map(|x| x.mod_floor(&p).to_u64().expect("reduced")).collect())
        .collect();
    let n = a.len();
    let mut det = 1;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| a[i][k] != 0) else { return 0 };
        if piv != k {
            a.swap(k, piv);
            det = PRIME - det;
        }
        det = mul_mod(det, a[k][k]);
        let inv = pow_mod(a[k][k], PRIME - 2);
        for i in k + 1..n {
            let f = mul_mod(a[i][k], inv);
            if f == 0 {
                continue;
            }
            for j in k..n {
                let t = mul_mod(f, a[k][j]);
                a[i][j] = (a[i][j] + PRIME - t) % PRIME;
            }
        }
    }
    det % PRIME
}

/// The distinct integer roots of `p`, ascending.
pub fn integer_roots(p: &Polynomial) -> Result<Vec<BigInt>, ArithError> {
    if p.is_zero() {
        return Err(ArithError::ZeroPolynomial);
    }
    let mut coeffs = p.primitive_integer();
    let mut roots = Vec::new();
    let lead_zeros = coeffs.iter().take_while(|c| c.is_zero()).count();
    if lead_zeros > 0 {
        roots.push(BigInt::zero());
        coeffs.drain(..lead_zeros);
    }
    if coeffs.len() > 1 {
        let a0 = coeffs[0].clone();
        let bound = root_bound(&coeffs);
        // Divisors of the trailing coefficient inside the root bound.
        let cands: Vec<BigInt> = match bound.to_u64().filter(|b| *b <= SCAN_LIMIT) {
            Some(b) => (1..=b).map(BigInt::from).filter(|d| (&a0 % d).is_zero()).collect(),
            None => positive_divisors(&a0).into_iter().filter(|d| *d <= bound).collect(),
        };
        for d in cands {
            for cand in [d.clone(), -d] {
                if int_eval(&coeffs, &cand).is_zero() {
                    roots.push(cand);
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    Ok(roots)
}

fn int_eval(coeffs: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// The distinct rational roots of `p`, ascending.
pub fn rational_roots(p: &Polynomial) -> Result<Vec<Rational>, ArithError> {
    if p.is_zero() {
        return Err(ArithError::ZeroPolynomial);
    }
    let coeffs = p.primitive_integer();
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    // y = lc * x turns the polynomial monic with integer coefficients.
    let lc = coeffs[n].clone();
    let mut monic = Vec::with_capacity(n + 1);
    let mut pw = BigInt::one();
    for k in (0..=n).rev() {
        monic.push(&coeffs[k] * &pw);
        pw *= &lc;
    }
    monic.reverse();
    let y = Polynomial::new(p.var, monic.into_iter().map(Rational::from_integer).collect());
    let mut out: Vec<Rational> = integer_roots(&y)?
        .into_iter()
        .map(|r| Rational::new(r, lc.clone()))
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Multiplicity of `root` in `p` (p nonzero).
pub fn root_multiplicity(p: &Polynomial, root: &Rational) -> usize {
    let lin = Polynomial::new(p.var, vec![-root.clone(), Rational::one()]);
    let mut cur = p.clone();
    let mut m = 0;
    while let Some(q) = cur.exact_div(&lin) {
        if cur.is_zero() {
            break;
        }
        cur = q;
        m += 1;
    }
    m
}

/// Newton interpolation through `(x_k, y_k)`.
pub fn interpolate(var: Symbol, xs: &[Rational], ys: &[Rational]) -> Polynomial {
    let n = xs.len();
    let mut coef: Vec<Rational> = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut acc = Polynomial::zero(var);
    for i in (0..n).rev() {
        let lin = Polynomial::new(var, vec![-xs[i].clone(), Rational::one()]);
        acc = &(&acc * &lin) + &Polynomial::constant(var, coef[i].clone());
    }
    acc
}

/// `h ↦ resultant(p(x), q(x + h))` as a polynomial in `h`, by interpolation.
pub fn shifted_resultant(p: &Polynomial, q: &Polynomial, h_var: Symbol) -> Result<Polynomial, ArithError> {
    if p.is_zero() || q.is_zero() {
        return Err(ArithError::ZeroPolynomial);
    }
    let bound = p.degree().unwrap() * q.degree().unwrap();
    let xs: Vec<Rational> = (0..=bound as i64).map(int).collect();
    let mut ys = Vec::with_capacity(xs.len());
    for h in &xs {
        ys.push(resultant(p, &q.shift(h))?);
    }
    Ok(interpolate(h_var, &xs, &ys))
}

/// All `h >= 0` with `gcd(p(x), q(x + h))` nonconstant, ascending.
pub fn shift_set(p: &Polynomial, q: &Polynomial) -> Result<Vec<u64>, ArithError> {
    if p.is_zero() || q.is_zero() {
        return Err(ArithError::ZeroPolynomial);
    }
    if p.is_constant() || q.is_constant() {
        return Ok(Vec::new());
    }
    // Roots of the resultant in h are differences of roots of q and p.
    let (_, ip) = integer_split(p);
    let (_, iq) = integer_split(q);
    let bound = root_bound(&ip) + root_bound(&iq);
    if let Some(b) = bound.to_u64().filter(|b| *b <= SCAN_LIMIT) {
        let mut out = Vec::new();
        for h in 0..=b {
            let qh = q.shift(&Rational::from_integer(BigInt::from(h)));
            let (_, shifted) = integer_split(&qh);
            // A nonzero residue proves the resultant nonzero; zero is confirmed exactly.
            if det_mod(&int_sylvester(&ip, &shifted)) == 0 && !poly_gcd(p, &qh).is_constant() {
                out.push(h);
            }
        }
        return Ok(out);
    }
    let res = shifted_resultant(p, q, p.var)?;
    let mut out = Vec::new();
    for h in integer_roots(&res)? {
        if !h.is_negative() {
            out.push(u64::try_from(h).expect("shift fits in u64"));
        }
    }
    Ok(out)
}

/// Largest `h >= 0` with `gcd(p(x), q(x + h))` nonconstant.
pub fn dispersion(p: &Polynomial, q: &Polynomial) -> Result<Option<u64>, ArithError> {
    Ok(shift_set(p, q)?.last().copied())
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        Polynomial::new(self.var, coeffs)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect();
        Polynomial::new(self.var, coeffs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero(self.var);
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(self.var, out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.var, self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = i == 0 || !a.is_one();
            if show_coeff {
                write!(f, "{a}")?;
                if i > 0 {
                    f.write_str("*")?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "{}", self.var)?,
                _ => write!(f, "{}^{}", self.var, i)?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
