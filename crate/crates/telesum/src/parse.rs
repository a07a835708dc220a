//! Text syntax for sums and closed forms.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := '-' factor | primary ['^' exponent]
//! primary := integer | name | '(' expr ')' | call
//! call    := Sum(v, lo, hi, body) | Binomial(n, k) | Factorial(a)
//!          | Pochhammer(a, k) | S[m,..](arg) | SS[m,..][x,..](arg)
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use telesum_core::arith::{Rational, Symbol};
use telesum_core::expr::{normalize, Affine, Atom, DefiniteSum, Expr, HarmonicSumRef, SSumRef};

/// Byte range `start..end` in the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    fn join(self, o: SourceSpan) -> SourceSpan {
        SourceSpan { start: self.start.min(o.start), end: self.end.max(o.end) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{}..{}: expected {expected}, found {found}", span.start, span.end)]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: String,
    pub found: String,
}

impl ParseError {
    /// The message followed by the offending line with the span underlined.
    pub fn render(&self, text: &str) -> String {
        let line_start = text[..self.span.start].rfind('\n').map_or(0, |k| k + 1);
        let line_end = text[self.span.start..].find('\n').map_or(text.len(), |k| self.span.start + k);
        let line_no = text[..line_start].matches('\n').count() + 1;
        let col = text[line_start..self.span.start].chars().count();
        let width = text[self.span.start..self.span.end.min(line_end)].chars().count().max(1);
        format!(
            "error: expected {}, found {}\n --> line {line_no}, column {}\n  | {}\n  | {}{}",
            self.expected,
            self.found,
            col + 1,
            &text[line_start..line_end],
            " ".repeat(col),
            "^".repeat(width)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Name(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "integer {n}"),
            Tok::Name(s) => write!(f, "name \"{s}\""),
            Tok::LParen => f.write_str("\"(\""),
            Tok::RParen => f.write_str("\")\""),
            Tok::LBrack => f.write_str("\"[\""),
            Tok::RBrack => f.write_str("\"]\""),
            Tok::Comma => f.write_str("\",\""),
            Tok::Plus => f.write_str("\"+\""),
            Tok::Minus => f.write_str("\"-\""),
            Tok::Star => f.write_str("\"*\""),
            Tok::Slash => f.write_str("\"/\""),
            Tok::Caret => f.write_str("\"^\""),
            Tok::Eof => f.write_str("end-of-input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut k = 0;
    while k < bytes.len() {
        let c = bytes[k];
        let start = k;
        if c.is_ascii_whitespace() {
            k += 1;
            continue;
        }
        if c == b'#' {
            while k < bytes.len() && bytes[k] != b'\n' {
                k += 1;
            }
            continue;
        }
        let tok = if c.is_ascii_digit() {
            while k < bytes.len() && bytes[k].is_ascii_digit() {
                k += 1;
            }
            Tok::Int(BigInt::from_str(&text[start..k]).expect("digits"))
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while k < bytes.len() && (bytes[k].is_ascii_alphanumeric() || bytes[k] == b'_') {
                k += 1;
            }
            Tok::Name(text[start..k].to_string())
        } else {
            k += 1;
            match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'[' => Tok::LBrack,
                b']' => Tok::RBrack,
                b',' => Tok::Comma,
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'/' => Tok::Slash,
                b'^' => Tok::Caret,
                _ => {
                    let ch = text[start..].chars().next().expect("nonempty");
                    let end = start + ch.len_utf8();
                    return Err(ParseError {
                        span: SourceSpan { start, end },
                        expected: "an expression".into(),
                        found: format!("character {ch:?}"),
                    });
                }
            }
        };
        out.push((tok, SourceSpan { start, end: k }));
    }
    let end = text.trim_end().len();
    out.push((Tok::Eof, SourceSpan { start: end, end }));
    Ok(out)
}

const FUNCTIONS: &str = "one of Sum, Binomial, Factorial, Pochhammer, S, SS";

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

type Spanned = (Expr, SourceSpan);

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if t.0 != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError { span: self.span(), expected: expected.into(), found: self.peek().to_string() }
    }

    fn expect(&mut self, t: Tok) -> Result<SourceSpan, ParseError> {
        if *self.peek() == t {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(&t.to_string()))
        }
    }

    fn semantic(&self, span: SourceSpan, expected: &str) -> ParseError {
        ParseError { span, expected: expected.into(), found: format!("\"{}\"", &self.text[span.start..span.end]) }
    }

    fn expr(&mut self) -> Result<Spanned, ParseError> {
        let (first, mut span) = self.term()?;
        let mut terms = vec![first];
        loop {
            let neg = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.bump();
            let (t, s) = self.term()?;
            span = span.join(s);
            terms.push(if neg { negate(t) } else { t });
        }
        Ok((if terms.len() == 1 { terms.pop().expect("one") } else { Expr::Add(terms) }, span))
    }

    fn term(&mut self) -> Result<Spanned, ParseError> {
        let (first, mut span) = self.factor()?;
        let mut acc = first;
        loop {
            let div = match self.peek() {
                Tok::Star => false,
                Tok::Slash => true,
                _ => break,
            };
            self.bump();
            let (f, s) = self.factor()?;
            span = span.join(s);
            acc = if div { divide(acc, f) } else { multiply(acc, f) };
        }
        Ok((acc, span))
    }

    fn factor(&mut self) -> Result<Spanned, ParseError> {
        if *self.peek() == Tok::Minus {
            let s = self.bump().1;
            let (f, fs) = self.factor()?;
            return Ok((negate(f), s.join(fs)));
        }
        let (base, bspan) = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok((base, bspan));
        }
        self.bump();
        let espan_start = self.span();
        match self.peek().clone() {
            Tok::Minus | Tok::Int(_) => {
                let k = self.small_int()?;
                let span = bspan.join(self.toks[self.pos - 1].1);
                Ok((Expr::Pow(Box::new(base), k), span))
            }
            Tok::Name(_) | Tok::LParen => {
                let (e, es) = if *self.peek() == Tok::LParen {
                    self.bump();
                    let inner = self.expr()?;
                    let close = self.expect(Tok::RParen)?;
                    (inner.0, espan_start.join(close))
                } else {
                    self.primary()?
                };
                let ex = self.affine(&e, es, "an affine exponent")?;
                let span = bspan.join(es);
                if let Some(k) = ex.as_constant() {
                    return Ok((Expr::Pow(Box::new(base), k), span));
                }
                match normalize(&base).as_constant() {
                    Some(b) if !b.is_zero() => Ok((Expr::power(b, ex), span)),
                    _ => Err(self.semantic(bspan, "a nonzero rational base for a symbolic exponent")),
                }
            }
            _ => Err(self.unexpected("an exponent")),
        }
    }

    fn small_int(&mut self) -> Result<i64, ParseError> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            (Tok::Int(n), s) => {
                let n = if neg { -n } else { n };
                i64::try_from(n).map_err(|_| self.semantic(s, "an integer of at most 64 bits"))
            }
            (t, s) => Err(ParseError { span: s, expected: "an integer".into(), found: t.to_string() }),
        }
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let num = match self.bump() {
            (Tok::Int(n), _) => n,
            (t, s) => return Err(ParseError { span: s, expected: "a rational number".into(), found: t.to_string() }),
        };
        let den = if *self.peek() == Tok::Slash {
            self.bump();
            match self.bump() {
                (Tok::Int(d), _) if !d.is_zero() => d,
                (Tok::Int(_), s) => return Err(self.semantic(s, "a nonzero denominator")),
                (t, s) => return Err(ParseError { span: s, expected: "an integer".into(), found: t.to_string() }),
            }
        } else {
            BigInt::from(1)
        };
        let r = Rational::new(num, den);
        Ok(if neg { -r } else { r })
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T, ParseError>) -> Result<(Vec<T>, SourceSpan), ParseError> {
        let open = self.expect(Tok::LBrack)?;
        let mut out = vec![item(self)?];
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(item(self)?);
        }
        let close = self.expect(Tok::RBrack)?;
        Ok((out, open.join(close)))
    }

    fn symbol(&mut self) -> Result<(Symbol, SourceSpan), ParseError> {
        match self.bump() {
            (Tok::Name(n), s) => match Symbol::new(&n) {
                Some(v) => Ok((v, s)),
                None => Err(self.semantic(s, "a variable name of at most 8 characters")),
            },
            (t, s) => Err(ParseError { span: s, expected: "a variable name".into(), found: t.to_string() }),
        }
    }

    fn affine_arg(&mut self, what: &str) -> Result<Affine, ParseError> {
        let (e, s) = self.expr()?;
        self.affine(&e, s, what)
    }

    fn affine(&self, e: &Expr, s: SourceSpan, what: &str) -> Result<Affine, ParseError> {
        to_affine(e).ok_or_else(|| self.semantic(s, what))
    }

    fn primary(&mut self) -> Result<Spanned, ParseError> {
        let (tok, span) = self.bump();
        match tok {
            Tok::Int(n) => Ok((Expr::constant(Rational::from_integer(n)), span)),
            Tok::LParen => {
                let (e, _) = self.expr()?;
                let close = self.expect(Tok::RParen)?;
                Ok((e, span.join(close)))
            }
            Tok::Name(name) => {
                let follows = self.peek().clone();
                match (name.as_str(), follows) {
                    ("S", Tok::LBrack) => {
                        let (idx, ispan) = self.list(|p| p.small_int())?;
                        let arg = self.call_args(1, "S")?.pop().expect("one");
                        let end = self.toks[self.pos - 1].1;
                        let h = HarmonicSumRef::new(idx, arg)
                            .map_err(|_| self.semantic(ispan, "nonzero harmonic-sum indices"))?;
                        Ok((Expr::Harmonic(h), span.join(end)))
                    }
                    ("SS", Tok::LBrack) => {
                        let (idx, ispan) = self.list(|p| p.small_int())?;
                        let (ws, wspan) = self.list(|p| p.rational())?;
                        let arg = self.call_args(1, "SS")?.pop().expect("one");
                        let end = self.toks[self.pos - 1].1;
                        if idx.iter().any(|m| *m <= 0) {
                            return Err(self.semantic(ispan, "positive S-sum indices"));
                        }
                        let idx: Vec<u32> = idx.iter().map(|m| *m as u32).collect();
                        let s = SSumRef::new(idx, ws, arg)
                            .map_err(|_| self.semantic(wspan, "nonzero weights, one per index"))?;
                        Ok((Expr::SSum(s), span.join(end)))
                    }
                    ("Sum", Tok::LParen) => {
                        self.bump();
                        let (v, _) = self.symbol()?;
                        self.expect(Tok::Comma)?;
                        let lo = self.affine_arg("an affine lower bound")?;
                        self.expect(Tok::Comma)?;
                        let hi = self.affine_arg("an affine upper bound")?;
                        self.expect(Tok::Comma)?;
                        let (body, _) = self.expr()?;
                        let close = self.expect(Tok::RParen)?;
                        Ok((Expr::sum(v, lo, hi, body), span.join(close)))
                    }
                    ("Binomial", Tok::LParen) | ("Pochhammer", Tok::LParen) => {
                        let mut a = self.call_args(2, &name)?;
                        let end = self.toks[self.pos - 1].1;
                        let k = a.pop().expect("two");
                        let n = a.pop().expect("two");
                        let e = if name == "Binomial" { Expr::binomial(n, k) } else { Expr::pochhammer(n, k) };
                        Ok((e, span.join(end)))
                    }
                    ("Factorial", Tok::LParen) => {
                        let a = self.call_args(1, "Factorial")?.pop().expect("one");
                        let end = self.toks[self.pos - 1].1;
                        Ok((Expr::factorial(a), span.join(end)))
                    }
                    (_, Tok::LParen) | (_, Tok::LBrack) => Err(ParseError { span, expected: FUNCTIONS.into(), found: format!("\"{name}\"") }),
                    _ => match Symbol::new(&name) {
                        Some(v) => Ok((Expr::var(v), span)),
                        None => Err(self.semantic(span, "a variable name of at most 8 characters")),
                    },
                }
            }
            t => Err(ParseError { span, expected: "an expression".into(), found: t.to_string() }),
        }
    }

    /// `(a1, ..., an)` with affine arguments.
    fn call_args(&mut self, n: usize, name: &str) -> Result<Vec<Affine>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            if k > 0 {
                self.expect(Tok::Comma)?;
            }
            out.push(self.affine_arg(&format!("an affine argument of {name}"))?);
        }
        self.expect(Tok::RParen)?;
        Ok(out)
    }
}

fn negate(e: Expr) -> Expr {
    match e.as_constant() {
        Some(c) => Expr::constant(-c),
        None => multiply(Expr::int(-1), e),
    }
}

fn multiply(a: Expr, b: Expr) -> Expr {
    match a {
        Expr::Mul(mut fs) => {
            fs.push(b);
            Expr::Mul(fs)
        }
        a => Expr::Mul(vec![a, b]),
    }
}

fn divide(a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (a.as_constant(), b.as_constant()) {
        if !y.is_zero() {
            return Expr::constant(x / y);
        }
    }
    multiply(a, Expr::Pow(Box::new(b), -1))
}

/// The expression as an affine form with integer coefficients, if it is one.
pub fn to_affine(e: &Expr) -> Option<Affine> {
    match normalize(e) {
        Expr::Atom(Atom::Rational(r)) if r.is_polynomial() => Affine::from_mpoly(r.num()),
        _ => None,
    }
}

/// Parses an expression such as a closed form, in normal form.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { text, toks: lex(text)?, pos: 0 };
    if *p.peek() == Tok::Eof {
        return Err(p.unexpected("an expression"));
    }
    let (e, _) = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("an operator or end-of-input"));
    }
    Ok(normalize(&e))
}

/// Parses a definite sum and checks that its bounds are admissible.
pub fn parse(text: &str) -> Result<DefiniteSum, ParseError> {
    let e = parse_expr(text)?;
    let s = DefiniteSum::from_expr(e);
    if let Err(err) = s.check_admissible() {
        let all = SourceSpan { start: 0, end: text.trim_end().len() };
        return Err(ParseError { span: all, expected: "bounds free of inner summation variables".into(), found: err.to_string() });
    }
    Ok(s)
}
