//! Integer domains of nested summation indices, used for sign decisions and sampling.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::arith::Symbol;
use crate::expr::{Affine, Env};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainVar {
    pub var: Symbol,
    pub lower: Affine,
    /// `None` for a parameter that is unbounded above.
    pub upper: Option<Affine>,
}

/// Variables listed outermost first; bounds may mention only earlier variables.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Domain {
    vars: Vec<DomainVar>,
}

impl Domain {
    pub fn new() -> Self {
        Domain::default()
    }

    pub fn with_param(mut self, var: Symbol, min: i64) -> Self {
        self.vars.push(DomainVar { var, lower: Affine::constant(min), upper: None });
        self
    }

    pub fn with_range(mut self, var: Symbol, lower: Affine, upper: Affine) -> Self {
        self.vars.push(DomainVar { var, lower, upper: Some(upper) });
        self
    }

    pub fn vars(&self) -> &[DomainVar] {
        &self.vars
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        self.vars.iter().map(|d| d.var).collect()
    }

    pub fn contains(&self, v: Symbol) -> bool {
        self.vars.iter().any(|d| d.var == v)
    }

    pub fn get(&self, v: Symbol) -> Option<&DomainVar> {
        self.vars.iter().find(|d| d.var == v)
    }

    /// Innermost variable among `candidates`.
    pub fn innermost_of(&self, candidates: &BTreeSet<Symbol>) -> Option<Symbol> {
        self.vars.iter().rev().map(|d| d.var).find(|v| candidates.contains(v))
    }

    /// Drops `v`, substituting `value` into the bounds of later variables.
    pub fn eliminate(&self, v: Symbol, value: &Affine) -> Domain {
        let vars = self
            .vars
            .iter()
            .filter(|d| d.var != v)
            .map(|d| DomainVar {
                var: d.var,
                lower: d.lower.subst(v, value),
                upper: d.upper.as_ref().map(|u| u.subst(v, value)),
            })
            .collect();
        Domain { vars }
    }

    /// Moves `v` to the innermost position and replaces its range.
    pub fn rebound(&self, v: Symbol, lower: Affine, upper: Option<Affine>) -> Domain {
        let mut vars: Vec<DomainVar> = self.vars.iter().filter(|d| d.var != v).cloned().collect();
        vars.push(DomainVar { var: v, lower, upper });
        Domain { vars }
    }

    /// Replaces the lower bound of `v` in place.
    pub fn restrict_lower(&self, v: Symbol, lower: Affine) -> Domain {
        let vars = self.vars.iter().map(|d| if d.var == v { DomainVar { lower: lower.clone(), ..d.clone() } } else { d.clone() }).collect();
        Domain { vars }
    }

    /// Unbounded parameters, outermost first.
    pub fn params(&self) -> Vec<Symbol> {
        self.vars.iter().filter(|d| d.upper.is_none()).map(|d| d.var).collect()
    }

    fn extreme(&self, a: &Affine, minimize: bool) -> Option<i64> {
        let mut cur = a.clone();
        for d in self.vars.iter().rev() {
            let c = cur.coeff(d.var);
            if c == 0 {
                continue;
            }
            let take_lower = (c > 0) == minimize;
            let bound = if take_lower { Some(&d.lower) } else { d.upper.as_ref() };
            cur = cur.subst(d.var, bound?);
        }
        cur.as_constant()
    }

    /// A lower bound for `a` over all points of the domain (`None`: unbounded or foreign variables).
    pub fn min_of(&self, a: &Affine) -> Option<i64> {
        self.extreme(a, true)
    }

    pub fn max_of(&self, a: &Affine) -> Option<i64> {
        self.extreme(a, false)
    }

    pub fn nonnegative(&self, a: &Affine) -> bool {
        self.min_of(a).is_some_and(|m| m >= 0)
    }

    pub fn negative(&self, a: &Affine) -> bool {
        self.max_of(a).is_some_and(|m| m < 0)
    }

    /// Smallest value of the outermost unbounded parameter for which the
    /// domain is nonempty, searched upward from its declared minimum.
    pub fn first_nonempty(&self, limit: i64) -> Option<Env> {
        let p = self.vars.first()?;
        let start = p.lower.as_constant()?;
        (start..=start + limit).find_map(|n| {
            let mut env = Env::new();
            env.insert(p.var, n);
            self.first_point(&env, 1)
        })
    }

    fn first_point(&self, env: &Env, k: usize) -> Option<Env> {
        let Some(d) = self.vars.get(k) else {
            return Some(env.clone());
        };
        let lo = d.lower.eval(env)?;
        let hi = match &d.upper {
            Some(u) => u.eval(env)?,
            None => lo + 40,
        };
        (lo..=hi).find_map(|x| {
            let mut e = env.clone();
            e.insert(d.var, x);
            self.first_point(&e, k + 1)
        })
    }

    /// Up to `max` points of the domain, parameters ranging over `param_range`,
    /// deterministically spread over the inner ranges.
    pub fn sample_points(&self, param_values: &[i64], max: usize) -> Vec<Env> {
        let mut out = Vec::new();
        for &n in param_values {
            let mut env = Env::new();
            let mut k = 0;
            // Bind every unbounded parameter to n.
            while let Some(d) = self.vars.get(k) {
                if d.upper.is_some() {
                    break;
                }
                let lo = d.lower.eval(&env).unwrap_or(n);
                env.insert(d.var, n.max(lo));
                k += 1;
            }
            self.collect_points(&env, k, &mut out, max);
            if out.len() >= max {
                break;
            }
        }
        out
    }

    fn collect_points(&self, env: &Env, k: usize, out: &mut Vec<Env>, max: usize) {
        if out.len() >= max {
            return;
        }
        let Some(d) = self.vars.get(k) else {
            out.push(env.clone());
            return;
        };
        let (Some(lo), Some(hi)) = (d.lower.eval(env), d.upper.as_ref().and_then(|u| u.eval(env))) else {
            return;
        };
        if hi < lo {
            return;
        }
        // Endpoints and a middle value keep the sample small but varied.
        let mut xs = alloc::vec![lo, hi, lo + (hi - lo) / 2, lo + 1, hi - 1];
        xs.retain(|x| *x >= lo && *x <= hi);
        xs.sort_unstable();
        xs.dedup();
        for x in xs {
            let mut e = env.clone();
            e.insert(d.var, x);
            self.collect_points(&e, k + 1, out, max);
        }
    }
}
