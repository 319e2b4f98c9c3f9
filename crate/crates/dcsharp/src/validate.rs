//! Well-formedness checks on parsed programs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::program::{Clause, Literal, Program};
use crate::term::{Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    ValueVarInRvTerm,
    UnsafeNegation,
    UnboundDistVar,
    InfiniteGrounding,
    UnstratifiedNegation,
    NegatedAggregateResult,
    HeadNotRangeRestricted,
}

impl Rule {
    pub fn describe(self) -> &'static str {
        match self {
            Rule::ValueVarInRvTerm => "value variable in RV term",
            Rule::UnsafeNegation => "unsafe negation",
            Rule::UnboundDistVar => "unbound distribution variable",
            Rule::InfiniteGrounding => "nested compound with variables in RV term",
            Rule::UnstratifiedNegation => "negation not stratified",
            Rule::NegatedAggregateResult => "negated aggregate result used elsewhere",
            Rule::HeadNotRangeRestricted => "head variable not bound by a body RV term",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub clause: usize,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "clause {}: {}: {}", self.clause + 1, self.rule.describe(), self.message)
    }
}

fn rv_terms<'a>(lits: &'a [Literal], out: &mut Vec<&'a Term>) {
    for l in lits {
        match l {
            Literal::Value { rv, .. } => out.push(rv),
            Literal::Aggregate { goal, .. } => rv_terms(goal, out),
            _ => {}
        }
    }
}

fn value_atoms<'a>(lits: &'a [Literal], out: &mut Vec<(&'a Term, &'a Term)>) {
    for l in lits {
        match l {
            Literal::Value { rv, value, .. } => out.push((rv, value)),
            Literal::Aggregate { goal, .. } => value_atoms(goal, out),
            _ => {}
        }
    }
}

fn check_negation(idx: usize, scope: &mut Vec<Var>, lits: &[Literal], out: &mut Vec<Diagnostic>) {
    for l in lits {
        match l {
            Literal::Value { rv, positive: true, .. } => rv.collect_vars(scope),
            Literal::Value { rv, positive: false, .. } => {
                let missing: Vec<String> =
                    rv.vars().iter().filter(|v| !scope.contains(v)).map(|v| v.to_string()).collect();
                if !missing.is_empty() {
                    out.push(Diagnostic {
                        clause: idx,
                        rule: Rule::UnsafeNegation,
                        message: format!(
                            "`\\+ {rv} ~= ..` uses {} before any positive RV term binds it",
                            missing.join(", ")
                        ),
                    });
                }
            }
            Literal::Aggregate { goal, .. } => {
                let mut inner = scope.clone();
                check_negation(idx, &mut inner, goal, out);
            }
            _ => {}
        }
    }
}

fn bound_by(lits: &[Literal], out: &mut Vec<Var>) {
    for l in lits {
        match l {
            Literal::Value { rv, value, positive: true } => {
                rv.collect_vars(out);
                value.collect_vars(out);
            }
            Literal::Aggregate { result, positive: true, .. } => result.collect_vars(out),
            Literal::Linear { output, .. } => output.collect_vars(out),
            _ => {}
        }
    }
}

fn check_clause(idx: usize, c: &Clause, out: &mut Vec<Diagnostic>) {
    let mut rvs = vec![&c.head];
    rv_terms(&c.body, &mut rvs);

    let mut atoms = Vec::new();
    value_atoms(&c.body, &mut atoms);
    for (rv, value) in atoms {
        if let Term::Var(v) = value {
            if rvs.iter().any(|t| t.contains_var(v)) {
                out.push(Diagnostic {
                    clause: idx,
                    rule: Rule::ValueVarInRvTerm,
                    message: format!("`{v}` is the value of `{rv}` and also appears in an RV term"),
                });
            }
        }
    }

    let mut positive_rv_vars = Vec::new();
    for l in &c.body {
        if let Literal::Value { rv, positive: true, .. } = l {
            rv.collect_vars(&mut positive_rv_vars);
        }
    }
    for v in c.head.vars().iter().filter(|v| !positive_rv_vars.contains(v)) {
        out.push(Diagnostic {
            clause: idx,
            rule: Rule::HeadNotRangeRestricted,
            message: format!("`{v}` in head `{}` does not occur in a positive body RV term", c.head),
        });
    }

    let mut scope = c.head.vars();
    check_negation(idx, &mut scope, &c.body, out);

    let mut bound = c.head.vars();
    bound_by(&c.body, &mut bound);
    let mut dist_vars = Vec::new();
    c.dist.collect_vars(&mut dist_vars);
    for v in dist_vars.iter().filter(|v| !bound.contains(v)) {
        out.push(Diagnostic {
            clause: idx,
            rule: Rule::UnboundDistVar,
            message: format!("`{v}` in `{}` is not bound by the head or body", c.dist),
        });
    }

    for t in &rvs {
        if t.args().iter().any(|a| matches!(a, Term::Compound(..)) && !a.is_ground()) {
            out.push(Diagnostic {
                clause: idx,
                rule: Rule::InfiniteGrounding,
                message: format!("RV term `{t}` nests a compound term with variables"),
            });
        }
    }

    for (i, l) in c.body.iter().enumerate() {
        if let Literal::Aggregate { result: Term::Var(r), positive: false, .. } = l {
            let mut elsewhere = c.head.vars();
            c.dist.collect_vars(&mut elsewhere);
            for (j, other) in c.body.iter().enumerate() {
                if j != i {
                    other.collect_vars(&mut elsewhere);
                }
            }
            if elsewhere.contains(r) {
                out.push(Diagnostic {
                    clause: idx,
                    rule: Rule::NegatedAggregateResult,
                    message: format!("result `{r}` of a negated aggregate occurs elsewhere in the clause"),
                });
            }
        }
    }
}

fn predicate(t: &Term) -> String {
    match t.signature() {
        Some((f, n)) => format!("{f}/{n}"),
        None => t.to_string(),
    }
}

fn dependency_edges(lits: &[Literal], negated: bool, out: &mut Vec<(String, bool)>) {
    for l in lits {
        match l {
            Literal::Value { rv, positive, .. } => out.push((predicate(rv), negated || !positive)),
            Literal::Aggregate { goal, positive, .. } => dependency_edges(goal, negated || !positive, out),
            _ => {}
        }
    }
}

fn check_stratification(p: &Program, out: &mut Vec<Diagnostic>) {
    // Predicate-level graph: body predicate -> head predicate.
    let mut succ: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut negative: Vec<(usize, String, String)> = Vec::new();
    for (i, c) in p.clauses.iter().enumerate() {
        let head = predicate(&c.head);
        let mut edges = Vec::new();
        dependency_edges(&c.body, false, &mut edges);
        for (body, neg) in edges {
            succ.entry(body.clone()).or_default().insert(head.clone());
            if neg {
                negative.push((i, body, head.clone()));
            }
        }
    }
    let reaches = |from: &str, to: &str| -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from.to_string()];
        while let Some(n) = stack.pop() {
            if n == to {
                return true;
            }
            if seen.insert(n.clone()) {
                if let Some(next) = succ.get(&n) {
                    stack.extend(next.iter().cloned());
                }
            }
        }
        false
    };
    for (i, body, head) in negative {
        if reaches(&head, &body) {
            out.push(Diagnostic {
                clause: i,
                rule: Rule::UnstratifiedNegation,
                message: format!("`{head}` depends negatively on `{body}`, which depends on `{head}`"),
            });
        }
    }
}

/// All well-formedness violations; empty when the program is a valid DC# program.
pub fn validate(p: &Program) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (i, c) in p.clauses.iter().enumerate() {
        check_clause(i, c, &mut out);
    }
    check_stratification(p, &mut out);
    out
}
