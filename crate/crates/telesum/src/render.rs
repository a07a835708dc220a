//! Plain-text rendering that the parser reads back.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use telesum_core::arith::{MPoly, MRatFunc, Monomial, Rational, Symbol};
use telesum_core::expr::{Affine, Atom, Expr, IndefiniteSum};
use telesum_core::recsolve::linear_factors;

/// Loosest operator at the top of a rendered piece.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Sum,
    Product,
    Power,
    Atom,
}

struct Piece {
    text: String,
    prec: Prec,
}

impl Piece {
    fn new(text: String, prec: Prec) -> Piece {
        Piece { text, prec }
    }

    fn at_least(&self, p: Prec) -> String {
        if self.prec < p {
            format!("({})", self.text)
        } else {
            self.text.clone()
        }
    }
}

/// Renders `e`; summation variables generated internally get short names.
pub fn plain(e: &Expr) -> String {
    expr(&tidy_names(e)).text
}

pub fn affine(a: &Affine) -> String {
    let mut out = String::new();
    for (s, c) in a.terms() {
        let sign = if *c < 0 { "-" } else if out.is_empty() { "" } else { "+" };
        out.push_str(sign);
        if c.abs() != 1 {
            out.push_str(&format!("{}*", c.abs()));
        }
        out.push_str(s.as_str());
    }
    let c = a.constant_term();
    if out.is_empty() {
        out = c.to_string();
    } else if c != 0 {
        out.push_str(&format!("{}{}", if c < 0 { "-" } else { "+" }, c.abs()));
    }
    out
}

fn affine_piece(a: &Affine) -> Piece {
    let prec = match (a.terms(), a.constant_term()) {
        ([], c) if c >= 0 => Prec::Atom,
        ([(_, 1)], 0) => Prec::Atom,
        _ => Prec::Sum,
    };
    Piece::new(affine(a), prec)
}

pub fn rational(c: &Rational) -> String {
    c.to_string()
}

fn rational_piece(c: &Rational) -> Piece {
    let prec = if c.is_negative() {
        Prec::Sum
    } else if c.is_integer() {
        Prec::Atom
    } else {
        Prec::Product
    };
    Piece::new(rational(c), prec)
}

fn monomial(m: &Monomial) -> String {
    let parts: Vec<String> = m
        .factors()
        .iter()
        .rev()
        .map(|(s, e)| if *e == 1 { s.to_string() } else { format!("{s}^{e}") })
        .collect();
    parts.join("*")
}

fn poly(p: &MPoly) -> Piece {
    if p.is_zero() {
        return Piece::new("0".into(), Prec::Atom);
    }
    let mut out = String::new();
    for (m, c) in p.terms().rev() {
        let neg = c.is_negative();
        let a = c.abs();
        out.push_str(if neg { "-" } else if out.is_empty() { "" } else { "+" });
        if m.is_one() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&monomial(m));
        } else {
            out.push_str(&format!("{a}*{}", monomial(m)));
        }
    }
    let prec = if p.num_terms() > 1 || out.starts_with('-') {
        Prec::Sum
    } else if p.terms().next().is_some_and(|(m, c)| !c.is_one() || m.factors().len() > 1) {
        Prec::Product
    } else if p.terms().next().is_some_and(|(m, _)| m.factors().iter().any(|(_, e)| *e > 1)) {
        Prec::Power
    } else {
        Prec::Atom
    };
    Piece::new(out, prec)
}

/// `p = c · Π f_i^{m_i}` with integer-primitive factors of positive leading coefficient.
fn factor(p: &MPoly) -> (Rational, Vec<(MPoly, u32)>) {
    if let Some(c) = p.constant_value() {
        return (c, Vec::new());
    }
    let mut c = Rational::one();
    let mut out: Vec<(MPoly, u32)> = Vec::new();
    let mut rest = p.clone();
    let vars: Vec<Symbol> = p.vars().into_iter().rev().collect();
    for v in vars {
        if !rest.contains(v) {
            continue;
        }
        let (roots, cof) = linear_factors(&rest, v);
        for (rho, m) in roots {
            let lin = &MPoly::var(v) - &rho;
            let (k, prim) = lin.primitive_integer();
            let (k, prim) = if prim.lc().is_negative() { (-k, -&prim) } else { (k, prim) };
            c *= pow(&k, m);
            out.push((prim, m));
        }
        rest = cof;
    }
    let (k, prim) = rest.primitive_integer();
    let (k, prim) = if prim.lc().is_negative() { (-k, -&prim) } else { (k, prim) };
    c *= k;
    if !prim.is_one() {
        out.push((prim, 1));
    }
    let back = out.iter().fold(MPoly::constant(c.clone()), |acc, (f, m)| &acc * &f.pow(*m));
    if &back != p {
        let (k, prim) = p.primitive_integer();
        return (k, vec![(prim, 1)]);
    }
    out.sort_by(|a, b| poly(&a.0).text.cmp(&poly(&b.0).text));
    (c, out)
}

fn pow(r: &Rational, m: u32) -> Rational {
    (0..m).fold(Rational::one(), |acc, _| acc * r)
}

fn power_text(base: &Piece, e: u32) -> String {
    if e == 1 {
        base.at_least(Prec::Product)
    } else {
        format!("{}^{e}", base.at_least(Prec::Atom))
    }
}

/// Numerator and denominator factor lists of a product, with its sign.
struct Fraction {
    negative: bool,
    coeff: Rational,
    num: Vec<String>,
    den: Vec<String>,
}

impl Fraction {
    fn new() -> Fraction {
        Fraction { negative: false, coeff: Rational::one(), num: Vec::new(), den: Vec::new() }
    }

    fn ratfunc(&mut self, r: &MRatFunc) {
        let (cn, fn_) = factor(r.num());
        let (cd, fd) = factor(r.den());
        self.coeff *= cn / cd;
        for (f, m) in fn_ {
            self.num.push(power_text(&poly(&f), m));
        }
        for (f, m) in fd {
            self.den.push(power_text(&poly(&f), m));
        }
    }

    fn push(&mut self, e: &Expr) {
        match e {
            Expr::Atom(Atom::Rational(r)) => self.ratfunc(r),
            Expr::Mul(fs) => fs.iter().for_each(|f| self.push(f)),
            Expr::Pow(b, k) if *k < 0 => {
                if let Expr::Atom(Atom::Rational(r)) = b.as_ref() {
                    if let Ok(inv) = r.pow(*k) {
                        self.ratfunc(&inv);
                        return;
                    }
                }
                let p = expr(b);
                self.den.push(power_text(&p, k.unsigned_abs() as u32));
            }
            _ => self.num.push(expr(e).at_least(Prec::Product)),
        }
    }

    fn finish(mut self) -> Piece {
        if self.coeff.is_zero() {
            return Piece::new("0".into(), Prec::Atom);
        }
        if self.coeff.is_negative() {
            self.negative = !self.negative;
            self.coeff = -self.coeff;
        }
        let cn = self.coeff.numer().clone();
        let cd = self.coeff.denom().clone();
        let mut num = Vec::new();
        if !cn.is_one() || self.num.is_empty() {
            num.push(cn.to_string());
        }
        num.extend(self.num);
        let mut den = Vec::new();
        if !cd.is_one() {
            den.push(cd.to_string());
        }
        den.extend(self.den);
        let mut text = num.join("*");
        let mut prec = if num.len() > 1 || text.contains('^') || has_top_level_op(&text) { Prec::Product } else { Prec::Atom };
        if !den.is_empty() {
            let d = den.join("*");
            let d = if has_top_level_op(&d) { format!("({d})") } else { d };
            text = format!("{text}/{d}");
            prec = Prec::Product;
        }
        if self.negative {
            text = format!("-{text}");
            prec = Prec::Sum;
        }
        Piece::new(text, prec)
    }
}

fn has_top_level_op(s: &str) -> bool {
    let mut depth = 0i32;
    for (k, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            '+' | '*' | '/' if depth == 0 => return true,
            '-' if depth == 0 && k > 0 => return true,
            _ => {}
        }
    }
    false
}

fn expr(e: &Expr) -> Piece {
    match e {
        Expr::Atom(a) => atom(a),
        Expr::Harmonic(h) => {
            let idx: Vec<String> = h.indices.iter().map(|m| m.to_string()).collect();
            Piece::new(format!("S[{}]({})", idx.join(","), affine(&h.arg)), Prec::Atom)
        }
        Expr::SSum(s) => {
            let idx: Vec<String> = s.indices.iter().map(|m| m.to_string()).collect();
            let ws: Vec<String> = s.weights.iter().map(rational).collect();
            Piece::new(format!("SS[{}][{}]({})", idx.join(","), ws.join(","), affine(&s.arg)), Prec::Atom)
        }
        Expr::Add(ts) => {
            if ts.is_empty() {
                return Piece::new("0".into(), Prec::Atom);
            }
            let mut out = String::new();
            for t in ts {
                let p = expr(t);
                let text = if p.prec == Prec::Sum && !p.text.starts_with('-') { format!("({})", p.text) } else { p.text };
                if out.is_empty() {
                    out = text;
                } else if let Some(rest) = text.strip_prefix('-') {
                    out.push('-');
                    out.push_str(rest);
                } else {
                    out.push('+');
                    out.push_str(&text);
                }
            }
            Piece::new(out, if ts.len() > 1 { Prec::Sum } else { expr(&ts[0]).prec })
        }
        Expr::Mul(_) | Expr::Pow(_, _) if is_fraction(e) => {
            let mut f = Fraction::new();
            f.push(e);
            f.finish()
        }
        Expr::Mul(fs) => {
            let mut f = Fraction::new();
            fs.iter().for_each(|x| f.push(x));
            f.finish()
        }
        Expr::Pow(b, k) => Piece::new(format!("{}^{k}", expr(b).at_least(Prec::Atom)), Prec::Power),
        Expr::Sum(s) => Piece::new(
            format!("Sum({},{},{},{})", s.var, affine(&s.lower), affine(&s.upper), expr(&s.body).text),
            Prec::Atom,
        ),
    }
}

fn is_fraction(e: &Expr) -> bool {
    matches!(e, Expr::Pow(_, k) if *k < 0)
}

fn atom(a: &Atom) -> Piece {
    match a {
        Atom::Factorial(x) => Piece::new(format!("Factorial({})", affine(x)), Prec::Atom),
        Atom::Binomial(n, k) => Piece::new(format!("Binomial({},{})", affine(n), affine(k)), Prec::Atom),
        Atom::Pochhammer(x, k) => Piece::new(format!("Pochhammer({},{})", affine(x), affine(k)), Prec::Atom),
        Atom::Power(b, e) => {
            let base = rational_piece(b).at_least(Prec::Atom);
            Piece::new(format!("{base}^{}", affine_piece(e).at_least(Prec::Atom)), Prec::Power)
        }
        Atom::Rational(r) => {
            if let Some(c) = r.constant_value() {
                return rational_piece(&c);
            }
            if r.den().is_one() {
                let (c, fs) = factor(r.num());
                if c.is_one() && fs.len() <= 1 && fs.first().is_none_or(|f| f.1 == 1) {
                    return poly(r.num());
                }
            }
            let mut f = Fraction::new();
            f.ratfunc(r);
            f.finish()
        }
    }
}

const NAMES: [&str; 9] = ["i", "k", "l", "m", "p", "q", "t", "u", "w"];

/// Gives every generated summation variable (`_…`) a short unused name.
pub fn tidy_names(e: &Expr) -> Expr {
    let mut taken = e.free_vars();
    collect_bound(e, &mut taken);
    rename_bound(e, &taken, &BTreeSet::new())
}

fn collect_bound(e: &Expr, out: &mut BTreeSet<Symbol>) {
    match e {
        Expr::Add(v) | Expr::Mul(v) => v.iter().for_each(|x| collect_bound(x, out)),
        Expr::Pow(b, _) => collect_bound(b, out),
        Expr::Sum(s) => {
            if !s.var.is_fresh() {
                out.insert(s.var);
            }
            collect_bound(&s.body, out);
        }
        _ => {}
    }
}

fn rename_bound(e: &Expr, taken: &BTreeSet<Symbol>, scope: &BTreeSet<Symbol>) -> Expr {
    match e {
        Expr::Add(v) => Expr::Add(v.iter().map(|x| rename_bound(x, taken, scope)).collect()),
        Expr::Mul(v) => Expr::Mul(v.iter().map(|x| rename_bound(x, taken, scope)).collect()),
        Expr::Pow(b, k) => Expr::Pow(Box::new(rename_bound(b, taken, scope)), *k),
        Expr::Sum(s) => {
            let (var, body) = if s.var.is_fresh() {
                let fresh = pick_name(taken, scope);
                (fresh, substitute(&s.body, s.var, fresh))
            } else {
                (s.var, (*s.body).clone())
            };
            let mut inner = scope.clone();
            inner.insert(var);
            Expr::Sum(IndefiniteSum {
                var,
                lower: s.lower.clone(),
                upper: s.upper.clone(),
                body: Box::new(rename_bound(&body, taken, &inner)),
            })
        }
        other => other.clone(),
    }
}

fn pick_name(taken: &BTreeSet<Symbol>, scope: &BTreeSet<Symbol>) -> Symbol {
    let free = |s: &Symbol| !taken.contains(s) && !scope.contains(s);
    NAMES
        .iter()
        .filter_map(|n| Symbol::new(n))
        .find(free)
        .or_else(|| (1..).filter_map(|k| Symbol::new(&format!("i{k}"))).find(free))
        .expect("unbounded supply of names")
}

/// `e` with the free occurrences of `from` replaced by `to`.
pub fn substitute(e: &Expr, from: Symbol, to: Symbol) -> Expr {
    let a = |x: &Affine| x.subst(from, &Affine::var(to));
    match e {
        Expr::Atom(at) => Expr::Atom(match at {
            Atom::Factorial(x) => Atom::Factorial(a(x)),
            Atom::Binomial(x, y) => Atom::Binomial(a(x), a(y)),
            Atom::Pochhammer(x, y) => Atom::Pochhammer(a(x), a(y)),
            Atom::Power(b, x) => Atom::Power(b.clone(), a(x)),
            Atom::Rational(r) => Atom::Rational(r.subst(from, &MRatFunc::var(to)).expect("renaming keeps denominators nonzero")),
        }),
        Expr::Harmonic(h) => {
            let mut h = h.clone();
            h.arg = a(&h.arg);
            Expr::Harmonic(h)
        }
        Expr::SSum(s) => {
            let mut s = s.clone();
            s.arg = a(&s.arg);
            Expr::SSum(s)
        }
        Expr::Add(v) => Expr::Add(v.iter().map(|x| substitute(x, from, to)).collect()),
        Expr::Mul(v) => Expr::Mul(v.iter().map(|x| substitute(x, from, to)).collect()),
        Expr::Pow(b, k) => Expr::Pow(Box::new(substitute(b, from, to)), *k),
        Expr::Sum(s) => {
            let body = if s.var == from { (*s.body).clone() } else { substitute(&s.body, from, to) };
            Expr::Sum(IndefiniteSum { var: s.var, lower: a(&s.lower), upper: a(&s.upper), body: Box::new(body) })
        }
    }
}
