//! Brute-force semantics: grounding under an assignment, closed-assignment
//! probabilities, and exact query probabilities by world enumeration.

use std::collections::{BTreeMap, BTreeSet};

use crate::analysis::{Analysis, NodeId};
use crate::distribution::combine;
use crate::error::{Error, Result};
use crate::fo::collect_dst;
use crate::program::{Clause, Literal};
use crate::prover::{Prover, Resolver};
use crate::state::Evidence;
use crate::term::{match_into, Subst, Term};

/// Budget on partial worlds visited by `exact_query`.
pub const WORLD_BUDGET: u64 = 1 << 24;

/// Values for a set of ground RVs; `None` is `undefined`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Assignment {
    pub values: BTreeMap<NodeId, Option<Term>>,
}

impl Assignment {
    /// Build from `rv = value` pairs; the atom `undefined` stands for the undefined value.
    pub fn from_pairs(an: &Analysis, pairs: &[(Term, Term)]) -> Result<Assignment> {
        let mut values = BTreeMap::new();
        for (rv, v) in pairs {
            let id = an.dag.require(rv)?;
            let v = match v {
                Term::Atom(a) if &**a == "undefined" => None,
                _ => Some(v.clone()),
            };
            values.insert(id, v);
        }
        Ok(Assignment { values })
    }

    /// Error naming the first parent missing from the assignment.
    pub fn check_closed(&self, an: &Analysis) -> Result<()> {
        for &x in self.values.keys() {
            if let Some(&p) = an.dag.parents[x].iter().find(|p| !self.values.contains_key(p)) {
                return Err(Error::NotClosed(format!(
                    "{} is assigned but its parent {} is not",
                    an.dag.term(x),
                    an.dag.term(p)
                )));
            }
        }
        Ok(())
    }
}

struct World<'w> {
    values: &'w BTreeMap<NodeId, Option<Term>>,
}

impl Resolver for World<'_> {
    fn resolve(&mut self, prover: &Prover<'_>, node: NodeId) -> Result<Option<Term>> {
        self.values
            .get(&node)
            .cloned()
            .ok_or_else(|| Error::NotClosed(format!("{} is read but not assigned", prover.analysis.dag.term(node))))
    }
}

fn ground_body(an: &Analysis, u: &Assignment, body: &[Literal], s: &Subst, out: &mut Vec<Subst>) -> Result<()> {
    let Some((first, rest)) = body.split_first() else {
        out.push(s.clone());
        return Ok(());
    };
    let Literal::Value { rv, value, .. } = first else {
        return ground_body(an, u, rest, s, out);
    };
    let prover = Prover::new(an);
    for (id, g) in prover.groundings(&s.apply(rv)) {
        let Some(v) = u.values.get(&id) else { continue };
        let mut s1 = s.clone();
        if !match_into(&mut s1, rv, &g) {
            continue;
        }
        if let (Term::Var(x), Some(v)) = (s1.apply(value), v) {
            s1.bind(x, v.clone());
        }
        ground_body(an, u, rest, &s1, out)?;
    }
    Ok(())
}

/// Ground instances of the program's clauses whose RV terms are assigned in `u`,
/// with value variables instantiated from `u`. Comparisons are left unevaluated.
pub fn ground_program(an: &Analysis, u: &Assignment) -> Result<Vec<Clause>> {
    u.check_closed(an)?;
    let mut out = Vec::new();
    for c in &an.program.clauses {
        let mut answers = Vec::new();
        ground_body(an, u, &c.body, &Subst::new(), &mut answers)?;
        for s in answers {
            let g = c.map_terms(&mut |t| s.apply(t));
            if !g.head.is_ground() {
                continue;
            }
            if an.dag.id(&g.head).is_some_and(|id| u.values.contains_key(&id)) {
                out.push(g);
            }
        }
    }
    Ok(out)
}

/// Natural log of the probability (or density) the program assigns to a closed assignment.
pub fn assignment_probability(an: &Analysis, u: &Assignment) -> Result<f64> {
    u.check_closed(an)?;
    let prover = Prover::new(an);
    let mut world = World { values: &u.values };
    let mut total = 0.0;
    for (&x, v) in &u.values {
        let (dists, _) = collect_dst(&prover, &mut world, x, |_, _| {})?;
        match (dists.is_empty(), v) {
            (true, None) => {}
            (true, Some(v)) => {
                return Err(Error::NonExhaustive(format!("{} = {v} but no clause applies", an.dag.term(x))))
            }
            (false, None) => {
                return Err(Error::Distribution(format!("{} is undefined but has a distribution", an.dag.term(x))))
            }
            (false, Some(v)) => total += combine(an.program.combining, dists)?.log_likelihood(v)?,
        }
    }
    Ok(total)
}

/// RV nodes a query may read.
pub fn query_nodes(an: &Analysis, goals: &[Literal]) -> Vec<NodeId> {
    fn walk(an: &Analysis, goals: &[Literal], out: &mut BTreeSet<NodeId>) {
        for l in goals {
            match l {
                Literal::Value { rv, .. } => {
                    out.extend(Prover::new(an).groundings(rv).into_iter().map(|(id, _)| id));
                }
                Literal::Aggregate { goal, .. } => walk(an, goal, out),
                _ => {}
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(an, goals, &mut out);
    out.into_iter().collect()
}

/// Ancestral closure of `seeds` in topological order.
pub fn ancestral_order(an: &Analysis, seeds: impl IntoIterator<Item = NodeId>) -> Vec<NodeId> {
    let mut keep = vec![false; an.dag.len()];
    let mut stack: Vec<NodeId> = seeds.into_iter().collect();
    while let Some(u) = stack.pop() {
        if !std::mem::replace(&mut keep[u], true) {
            stack.extend(an.dag.parents[u].iter().copied());
        }
    }
    an.dag.topo_order.iter().copied().filter(|&u| keep[u]).collect()
}

struct Enumerator<'e> {
    an: &'e Analysis,
    order: Vec<NodeId>,
    evidence: &'e Evidence,
    query: &'e [Literal],
    values: BTreeMap<NodeId, Option<Term>>,
    visited: u64,
    num: f64,
    den: f64,
}

impl Enumerator<'_> {
    fn go(&mut self, k: usize, p: f64) -> Result<()> {
        self.visited += 1;
        if self.visited > WORLD_BUDGET {
            return Err(Error::Oracle("enumeration budget exceeded".into()));
        }
        let prover = Prover::new(self.an);
        let Some(&x) = self.order.get(k) else {
            self.den += p;
            if prover.holds(&mut World { values: &self.values }, self.query)? {
                self.num += p;
            }
            return Ok(());
        };
        let (dists, _) = collect_dst(&prover, &mut World { values: &self.values }, x, |_, _| {})?;
        let branches: Vec<(Option<Term>, f64)> = if dists.is_empty() {
            vec![(None, 1.0)]
        } else {
            let c = combine(self.an.program.combining, dists)?;
            if c.is_continuous() {
                return Err(Error::Oracle(format!("oracle is discrete-only: {} is continuous", self.an.dag.term(x))));
            }
            c.support()?.into_iter().map(|(v, q)| (Some(v), q)).collect()
        };
        let observed = self.evidence.get(x);
        for (v, q) in branches {
            let q = match (observed, &v) {
                (None, _) => q,
                (Some(o), Some(v)) if crate::term::values_match(o, v) => q,
                _ => 0.0,
            };
            if q == 0.0 {
                continue;
            }
            let v = match (observed, v) {
                (Some(o), Some(_)) => Some(o.clone()),
                (_, v) => v,
            };
            self.values.insert(x, v);
            self.go(k + 1, p * q)?;
            self.values.remove(&x);
        }
        Ok(())
    }
}

/// P(query | evidence) by enumerating the worlds of the query's and evidence's ancestors.
pub fn exact_query(an: &Analysis, query: &[Literal], evidence: &Evidence) -> Result<f64> {
    let seeds = query_nodes(an, query).into_iter().chain(evidence.nodes());
    let order = ancestral_order(an, seeds);
    let mut e = Enumerator { an, order, evidence, query, values: BTreeMap::new(), visited: 0, num: 0.0, den: 0.0 };
    e.go(0, 1.0)?;
    if e.den <= 0.0 {
        return Err(Error::ZeroEvidence);
    }
    Ok((e.num / e.den).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_evidence, parse_program, parse_query, parse_term};

    const MIXED: &str = "\
a ~ bernoulli(0.1).
b ~ bernoulli(0.2).
c ~ val(1) <- a ~= t.
c ~ bernoulli(0.7) <- a ~= f, b ~= t.
c ~ bernoulli(0.2) <- a ~= f, b ~= f.
";

    fn analysis(src: &str) -> Analysis {
        Analysis::new(parse_program(src).unwrap()).unwrap()
    }

    #[test]
    fn query_given_itself_is_one() {
        let an = analysis("a ~ bernoulli(0.3).\nb ~ bernoulli(0.6) <- a ~= t.\nb ~ bernoulli(0.1) <- a ~= f.\n");
        let q = parse_query("b ~= t").unwrap();
        let ev = Evidence::new(&an.dag, &parse_evidence("b ~= t.").unwrap()).unwrap();
        assert!((exact_query(&an, &q, &ev).unwrap() - 1.0).abs() < 1e-12);
        let p = exact_query(&an, &q, &Evidence::default()).unwrap();
        assert!((p - (0.3 * 0.6 + 0.7 * 0.1)).abs() < 1e-12);
        let ev = Evidence::new(&an.dag, &parse_evidence("a ~= t. b ~= f.").unwrap()).unwrap();
        let q = parse_query("b ~= t").unwrap();
        assert_eq!(exact_query(&an, &q, &ev), Ok(0.0));
    }

    #[test]
    fn zero_evidence() {
        let an = analysis("a ~ val(t).");
        let ev = Evidence::new(&an.dag, &[(parse_term("a").unwrap(), Term::atom("f"))]).unwrap();
        assert_eq!(exact_query(&an, &parse_query("a ~= t").unwrap(), &ev), Err(Error::ZeroEvidence));
    }

    #[test]
    fn continuous_rejected() {
        let an = analysis("x ~ gaussian(0,1).");
        assert!(matches!(
            exact_query(&an, &parse_query("x ~= X, X > 0").unwrap(), &Evidence::default()),
            Err(Error::Oracle(_))
        ));
    }

    #[test]
    fn undefined_worlds() {
        let an = analysis("loan ~ bernoulli(0.4).\nstatus ~ discrete([0.3:a,0.7:d]) <- loan ~= t.\n");
        let p = exact_query(&an, &parse_query("\\+ status ~= _").unwrap(), &Evidence::default()).unwrap();
        assert!((p - 0.6).abs() < 1e-12);
    }

    #[test]
    fn facts_ground_to_themselves() {
        let an = analysis("a ~ val(1).\nb ~ bernoulli(0.5).\n");
        let u = Assignment::from_pairs(&an, &[(Term::atom("a"), Term::Int(1)), (Term::atom("b"), Term::atom("t"))])
            .unwrap();
        let g = ground_program(&an, &u).unwrap();
        assert_eq!(g, an.program.clauses);
        assert!((assignment_probability(&an, &u).unwrap() - 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn clause_choice_by_context() {
        let an = analysis(MIXED);
        let q = parse_query("c ~= 1").unwrap();
        let p = exact_query(&an, &q, &Evidence::default()).unwrap();
        assert!((p - (0.1 + 0.9 * (0.2 * 0.7 + 0.8 * 0.2))).abs() < 1e-12);
    }
}
