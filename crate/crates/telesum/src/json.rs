//! JSON encoding with exact numbers written as decimal strings.

use serde_json::{json, Map, Value};
use telesum_core::arith::{MPoly, MRatFunc, Rational};
use telesum_core::expr::{Affine, Atom, Expr};
use telesum_core::pipeline::{ClosedForm, LayerRecord, SimplificationTrace, VerifyReport};

use crate::render::{plain, tidy_names};

pub fn rational(r: &Rational) -> Value {
    json!({ "num": r.numer().to_string(), "den": r.denom().to_string() })
}

pub fn affine(a: &Affine) -> Value {
    let terms: Vec<Value> = a.terms().iter().map(|(s, c)| json!({ "var": s.as_str(), "coeff": c.to_string() })).collect();
    json!({ "kind": "affine", "constant": a.constant_term().to_string(), "terms": terms })
}

fn poly(p: &MPoly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .rev()
        .map(|(m, c)| {
            let powers: Map<String, Value> =
                m.factors().iter().map(|(s, e)| (s.as_str().to_string(), Value::String(e.to_string()))).collect();
            json!({ "coeff": rational(c), "powers": powers })
        })
        .collect();
    json!({ "kind": "polynomial", "terms": terms })
}

fn ratfunc(r: &MRatFunc) -> Value {
    match r.constant_value() {
        Some(c) => {
            let mut v = rational(&c);
            v["kind"] = json!("rational");
            v
        }
        None => json!({ "kind": "ratfunc", "children": [poly(r.num()), poly(r.den())] }),
    }
}

fn node(kind: &str, children: Vec<Value>) -> Value {
    json!({ "kind": kind, "children": children })
}

fn raw(e: &Expr) -> Value {
    match e {
        Expr::Atom(a) => match a {
            Atom::Factorial(x) => node("factorial", vec![affine(x)]),
            Atom::Binomial(n, k) => node("binomial", vec![affine(n), affine(k)]),
            Atom::Pochhammer(x, k) => node("pochhammer", vec![affine(x), affine(k)]),
            Atom::Power(b, x) => {
                let mut v = node("power", vec![affine(x)]);
                v["base"] = rational(b);
                v
            }
            Atom::Rational(r) => ratfunc(r),
        },
        Expr::Harmonic(h) => {
            let mut v = node("harmonic", vec![affine(&h.arg)]);
            v["indices"] = h.indices.iter().map(|m| Value::String(m.to_string())).collect();
            v
        }
        Expr::SSum(s) => {
            let mut v = node("ssum", vec![affine(&s.arg)]);
            v["indices"] = s.indices.iter().map(|m| Value::String(m.to_string())).collect();
            v["weights"] = s.weights.iter().map(rational).collect();
            v
        }
        Expr::Add(ts) => node("add", ts.iter().map(raw).collect()),
        Expr::Mul(fs) => node("mul", fs.iter().map(raw).collect()),
        Expr::Pow(b, k) => {
            let mut v = node("pow", vec![raw(b)]);
            v["exponent"] = json!(k.to_string());
            v
        }
        Expr::Sum(s) => {
            let mut v = node("sum", vec![affine(&s.lower), affine(&s.upper), raw(&s.body)]);
            v["var"] = json!(s.var.as_str());
            v
        }
    }
}

/// The expression tree, with generated summation variables renamed as in plain output.
pub fn expr(e: &Expr) -> Value {
    raw(&tidy_names(e))
}

fn layer(l: &LayerRecord) -> Value {
    let checks: Vec<Value> = l
        .checks
        .iter()
        .map(|c| {
            let point: Map<String, Value> = c.point.iter().map(|(s, v)| (s.as_str().to_string(), Value::String(v.to_string()))).collect();
            json!({ "point": point, "ok": c.ok })
        })
        .collect();
    let (status, detail) = match &l.outcome {
        Ok(s) => ("solved", s.clone()),
        Err(s) => ("unsolved", s.clone()),
    };
    json!({
        "var": l.var.as_str(),
        "lower": crate::render::affine(&l.lower),
        "upper": crate::render::affine(&l.upper),
        "depth": l.depth,
        "methods": l.methods.iter().map(|m| m.name()).collect::<Vec<_>>(),
        "recurrence": l.recurrence,
        "solutions": l.solutions,
        "initial_values": l.initial_values,
        "checks": checks,
        "status": status,
        "detail": detail,
    })
}

pub fn trace(t: &SimplificationTrace) -> Value {
    json!({ "layers": t.layers.iter().map(layer).collect::<Vec<_>>() })
}

pub fn closed_form(cf: &ClosedForm) -> Value {
    json!({
        "plain": plain(&cf.expression),
        "expression": expr(&cf.expression),
        "params": cf.params.iter().map(|p| p.as_str()).collect::<Vec<_>>(),
        "valid_from": cf.valid_from.to_string(),
    })
}

pub fn report(r: &VerifyReport, from: i64, to: i64) -> Value {
    let mismatch = r.first_mismatch().map(|p| {
        json!({
            "n": p.n.to_string(),
            "expected": rational(&p.expected),
            "got": match &p.got { Ok(g) => rational(g), Err(e) => json!({ "error": e }) },
        })
    });
    json!({
        "from": from.to_string(),
        "to": to.to_string(),
        "checked": r.points.len(),
        "skipped": r.skipped.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
        "passed": r.passed(),
        "first_mismatch": mismatch,
    })
}
