//! SLD-style resolution over DC# bodies, parameterized by how RV values are obtained.

use std::cmp::Ordering;

use crate::analysis::{Analysis, NodeId};
use crate::error::{Error, Result};
use crate::program::{AggName, CmpOp, Literal};
use crate::state::{Evidence, SimulationState};
use crate::term::{match_into, values_match, Subst, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

/// Supplies the value of a ground RV; `None` is `undefined`.
pub trait Resolver {
    fn resolve(&mut self, prover: &Prover<'_>, node: NodeId) -> Result<Option<Term>>;
}

/// Reads values already in the state or evidence and never samples. Unassigned
/// nodes are an error, which callers may treat as "unknown".
pub struct Peek<'s> {
    pub st: &'s SimulationState,
    pub evidence: &'s Evidence,
}

impl Resolver for Peek<'_> {
    fn resolve(&mut self, prover: &Prover<'_>, node: NodeId) -> Result<Option<Term>> {
        if let Some(v) = self.evidence.get(node) {
            return Ok(Some(v.clone()));
        }
        match self.st.value(node) {
            Some(v) => Ok(v.clone()),
            None => Err(Error::Invariant(format!("{} is unassigned", prover.analysis.dag.term(node)))),
        }
    }
}

pub type Answer<'k, R> = dyn FnMut(&mut R, &Subst) -> Result<Flow> + 'k;

#[derive(Clone, Copy)]
pub struct Prover<'a> {
    pub analysis: &'a Analysis,
}

fn bind_value(s: &mut Subst, value: &Term, v: &Term) -> bool {
    match s.apply(value) {
        Term::Var(x) => {
            s.bind(x, v.clone());
            true
        }
        bound => values_match(&bound, v),
    }
}

pub fn compare(op: CmpOp, a: &Term, b: &Term) -> Result<bool> {
    if a.is_var() || b.is_var() {
        return Err(Error::Unbound(format!("{a} {} {b}", op.symbol())));
    }
    if op == CmpOp::Eq {
        return Ok(values_match(a, b));
    }
    let ord = match (a.as_f64(), b.as_f64()) {
        (Some(x), Some(y)) => {
            x.partial_cmp(&y).ok_or_else(|| Error::TypeMismatch(format!("cannot order {a} and {b}")))?
        }
        (None, None) => a.cmp(b),
        _ => return Err(Error::TypeMismatch(format!("cannot order {a} and {b}"))),
    };
    Ok(match op {
        CmpOp::Lt => ord == Ordering::Less,
        CmpOp::Gt => ord == Ordering::Greater,
        CmpOp::Ge => ord != Ordering::Less,
        CmpOp::Le => ord != Ordering::Greater,
        CmpOp::Eq => unreachable!(),
    })
}

/// Aggregate a nonempty multiset. `None` on an empty multiset (the literal fails).
pub fn eval_aggregate(name: AggName, values: &[Term]) -> Result<Option<Term>> {
    if values.is_empty() {
        return Ok(None);
    }
    let numbers = || -> Result<Vec<f64>> {
        values
            .iter()
            .map(|v| v.as_f64().ok_or_else(|| Error::TypeMismatch(format!("{} over non-numeric {v}", name.name()))))
            .collect()
    };
    let all_int = values.iter().all(|v| matches!(v, Term::Int(_)));
    Ok(Some(match name {
        AggName::Cnt => Term::Int(values.len() as i64),
        AggName::Sum => {
            if all_int {
                Term::Int(values.iter().map(|v| if let Term::Int(i) = v { *i } else { 0 }).sum())
            } else {
                Term::Real(numbers()?.iter().sum())
            }
        }
        AggName::Avg => {
            let xs = numbers()?;
            Term::Real(xs.iter().sum::<f64>() / xs.len() as f64)
        }
        AggName::Max | AggName::Min => {
            numbers()?;
            let pick = values.iter().reduce(|a, b| {
                let ord = a.as_f64().unwrap().total_cmp(&b.as_f64().unwrap());
                match (name, ord) {
                    (AggName::Max, Ordering::Less) | (AggName::Min, Ordering::Greater) => b,
                    _ => a,
                }
            });
            pick.unwrap().clone()
        }
        AggName::Mode => {
            let mut sorted: Vec<&Term> = values.iter().collect();
            sorted.sort();
            let mut best: (&Term, usize) = (sorted[0], 0);
            let mut i = 0;
            while i < sorted.len() {
                let mut j = i;
                while j < sorted.len() && values_match(sorted[j], sorted[i]) {
                    j += 1;
                }
                if j - i > best.1 {
                    best = (sorted[i], j - i);
                }
                i = j;
            }
            best.0.clone()
        }
    }))
}

impl<'a> Prover<'a> {
    pub fn new(analysis: &'a Analysis) -> Prover<'a> {
        Prover { analysis }
    }

    /// Ground RVs (with ids) that the RV term `pat` can denote.
    pub fn groundings(&self, pat: &Term) -> Vec<(NodeId, Term)> {
        let dag = &self.analysis.dag;
        if pat.is_ground() {
            return dag.id(pat).map(|id| (id, pat.clone())).into_iter().collect();
        }
        self.analysis.rv_instances(pat).into_iter().filter_map(|t| dag.id(&t).map(|id| (id, t))).collect()
    }

    /// Enumerate answers of `goals` under `s`, calling `k` for each, depth first and left to right.
    pub fn solve<R: Resolver>(&self, r: &mut R, goals: &[Literal], s: &Subst, k: &mut Answer<'_, R>) -> Result<Flow> {
        let Some((first, rest)) = goals.split_first() else {
            return k(r, s);
        };
        match first {
            Literal::Value { rv, value, positive } => {
                let pat = s.apply(rv);
                if !positive && !pat.is_ground() {
                    return Err(Error::Invalid(format!("negated literal on non-ground `{pat}`")));
                }
                for (id, ground) in self.groundings(&pat) {
                    let mut s1 = s.clone();
                    if !pat.is_ground() && !match_into(&mut s1, &pat, &ground) {
                        continue;
                    }
                    let v = r.resolve(self, id)?;
                    let mut s2 = s1.clone();
                    let holds = match &v {
                        Some(v) => bind_value(&mut s2, value, v),
                        None => false,
                    };
                    let next = match (positive, holds) {
                        (true, true) => Some(&s2),
                        (false, false) => Some(&s1),
                        _ => None,
                    };
                    if let Some(next) = next {
                        if self.solve(r, rest, next, k)? == Flow::Stop {
                            return Ok(Flow::Stop);
                        }
                    }
                }
                Ok(Flow::Continue)
            }
            Literal::Compare { op, lhs, rhs } => {
                if compare(*op, &s.apply(lhs), &s.apply(rhs))? {
                    self.solve(r, rest, s, k)
                } else {
                    Ok(Flow::Continue)
                }
            }
            Literal::Linear { inputs, params, output } => {
                let mut m = *params.last().unwrap();
                for (x, w) in inputs.iter().zip(params) {
                    let xv = s.apply(x);
                    let xf = xv.as_f64().ok_or_else(|| {
                        if xv.is_var() {
                            Error::Unbound(format!("linear input {xv}"))
                        } else {
                            Error::TypeMismatch(format!("linear input {xv} is not a number"))
                        }
                    })?;
                    m += w * xf;
                }
                let mut s1 = s.clone();
                if bind_value(&mut s1, output, &Term::Real(m)) {
                    self.solve(r, rest, &s1, k)
                } else {
                    Ok(Flow::Continue)
                }
            }
            Literal::Aggregate { name, template, goal, result, positive } => {
                let mut values = Vec::new();
                self.solve(r, goal, s, &mut |_, s2| {
                    let v = s2.apply(template);
                    if !v.is_ground() {
                        return Err(Error::Unbound(format!("aggregate template {v}")));
                    }
                    values.push(v);
                    Ok(Flow::Continue)
                })?;
                let agg = eval_aggregate(*name, &values)?;
                let mut s1 = s.clone();
                let holds = match &agg {
                    Some(v) => bind_value(&mut s1, result, v),
                    None => false,
                };
                match (positive, holds) {
                    (true, true) => self.solve(r, rest, &s1, k),
                    (false, false) => self.solve(r, rest, s, k),
                    _ => Ok(Flow::Continue),
                }
            }
        }
    }

    /// True iff some group of `body` (a value literal with the literals that follow it
    /// up to the next value literal) already fails under the values in `peek`.
    pub fn refuted(&self, peek: &mut Peek<'_>, body: &[Literal], s: &Subst) -> bool {
        let starts: Vec<usize> = body
            .iter()
            .enumerate()
            .filter(|(i, l)| *i == 0 || matches!(l, Literal::Value { .. }))
            .map(|(i, _)| i)
            .collect();
        starts.iter().enumerate().any(|(k, &a)| {
            let b = starts.get(k + 1).copied().unwrap_or(body.len());
            matches!(self.solve(peek, &body[a..b], s, &mut |_, _| Ok(Flow::Stop)), Ok(Flow::Continue))
        })
    }

    /// True iff `goals` has at least one answer.
    pub fn holds<R: Resolver>(&self, r: &mut R, goals: &[Literal]) -> Result<bool> {
        let flow = self.solve(r, goals, &Subst::new(), &mut |_, _| Ok(Flow::Stop))?;
        Ok(flow == Flow::Stop)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms(xs: &[&str]) -> Vec<Term> {
        xs.iter().map(|x| Term::atom(x)).collect()
    }

    #[test]
    fn aggregates() {
        assert_eq!(eval_aggregate(AggName::Mode, &atoms(&["appr", "decl", "appr"])).unwrap(), Some(Term::atom("appr")));
        assert_eq!(eval_aggregate(AggName::Mode, &atoms(&["b", "a"])).unwrap(), Some(Term::atom("a")));
        assert_eq!(eval_aggregate(AggName::Max, &[Term::Int(7)]).unwrap(), Some(Term::Int(7)));
        let xs = [Term::Real(1.0), Term::Real(2.0), Term::Real(3.0)];
        assert_eq!(eval_aggregate(AggName::Avg, &xs).unwrap(), Some(Term::Real(2.0)));
        assert_eq!(eval_aggregate(AggName::Min, &xs).unwrap(), Some(Term::Real(1.0)));
        assert_eq!(eval_aggregate(AggName::Sum, &[Term::Int(2), Term::Int(3)]).unwrap(), Some(Term::Int(5)));
        assert_eq!(eval_aggregate(AggName::Cnt, &xs).unwrap(), Some(Term::Int(3)));
        assert_eq!(eval_aggregate(AggName::Cnt, &[]).unwrap(), None);
        assert!(eval_aggregate(AggName::Avg, &atoms(&["a"])).is_err());
    }

    #[test]
    fn comparisons() {
        assert!(compare(CmpOp::Gt, &Term::Real(701.0), &Term::Int(700)).unwrap());
        assert!(compare(CmpOp::Eq, &Term::atom("t"), &Term::atom("true")).unwrap());
        assert!(compare(CmpOp::Le, &Term::Int(3), &Term::Int(3)).unwrap());
        assert!(matches!(compare(CmpOp::Lt, &Term::var("X"), &Term::Int(1)), Err(Error::Unbound(_))));
        assert!(compare(CmpOp::Lt, &Term::atom("a"), &Term::Int(1)).is_err());
    }
}
