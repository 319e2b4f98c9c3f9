//! RV and dependency sets, their least models, and the ground dependency DAG.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::program::{Literal, Program};
use crate::term::{match_into, Subst, Sym, Term, Var};

/// A definite clause over `rv/1` and `pa/2` atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct DefiniteClause {
    pub head: Term,
    pub body: Vec<Term>,
}

impl DefiniteClause {
    /// Variant-invariant form: variables renamed in order of first occurrence.
    fn canonical(&self) -> (Term, Vec<Term>) {
        let mut seen: Vec<Var> = Vec::new();
        let mut f = |v: &Var| {
            let k = match seen.iter().position(|w| w == v) {
                Some(k) => k,
                None => {
                    seen.push(v.clone());
                    seen.len() - 1
                }
            };
            Term::Var(Var { name: Arc::from("_V"), gen: k as u32 + 1 })
        };
        let head = self.head.map_vars(&mut f);
        let body = self.body.iter().map(|t| t.map_vars(&mut f)).collect();
        (head, body)
    }
}

impl fmt::Display for DefiniteClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            write!(f, " <- ")?;
            for (i, b) in self.body.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{b}")?;
            }
        }
        write!(f, ".")
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DefiniteProgram {
    pub clauses: Vec<DefiniteClause>,
}

impl DefiniteProgram {
    fn push_unique(&mut self, c: DefiniteClause, seen: &mut HashSet<(Term, Vec<Term>)>) {
        if seen.insert(c.canonical()) {
            self.clauses.push(c);
        }
    }
}

impl fmt::Display for DefiniteProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

pub fn rv_atom(t: &Term) -> Term {
    Term::Compound(Arc::from("rv"), vec![t.clone()].into())
}

pub fn pa_atom(child: &Term, parent: &Term) -> Term {
    Term::Compound(Arc::from("pa"), vec![child.clone(), parent.clone()].into())
}

fn top_level_rv_terms(body: &[Literal]) -> Vec<Term> {
    body.iter()
        .filter_map(|l| match l {
            Literal::Value { rv, .. } => Some(rv.clone()),
            _ => None,
        })
        .collect()
}

fn clause_rv(head: &Term, body: &[Literal]) -> DefiniteClause {
    DefiniteClause { head: rv_atom(head), body: top_level_rv_terms(body).iter().map(rv_atom).collect() }
}

pub fn rv_set(p: &Program) -> DefiniteProgram {
    let mut out = DefiniteProgram::default();
    let mut seen = HashSet::new();
    for c in &p.clauses {
        out.push_unique(clause_rv(&c.head, &c.body), &mut seen);
    }
    out
}

fn goal_rv_terms(goal: &[Literal], out: &mut Vec<Term>) {
    for l in goal {
        match l {
            Literal::Value { rv, .. } => out.push(rv.clone()),
            Literal::Aggregate { goal, .. } => goal_rv_terms(goal, out),
            _ => {}
        }
    }
}

pub fn dependency_set(p: &Program) -> DefiniteProgram {
    let mut out = rv_set(p);
    let mut seen: HashSet<_> = out.clauses.iter().map(|c| c.canonical()).collect();
    for c in &p.clauses {
        if c.body.is_empty() {
            continue;
        }
        let rvc = clause_rv(&c.head, &c.body);
        let mut pa_body = vec![rv_atom(&c.head)];
        pa_body.extend(rvc.body.iter().cloned());
        for t in top_level_rv_terms(&c.body) {
            out.push_unique(DefiniteClause { head: pa_atom(&c.head, &t), body: pa_body.clone() }, &mut seen);
        }
        let mut fresh = 0u32;
        for (i, l) in c.body.iter().enumerate() {
            let Literal::Aggregate { goal, .. } = l else { continue };
            let mut outside = c.head.vars();
            c.dist.collect_vars(&mut outside);
            for (j, other) in c.body.iter().enumerate() {
                if j != i {
                    other.collect_vars(&mut outside);
                }
            }
            let mut inner = Vec::new();
            goal_rv_terms(goal, &mut inner);
            for t in &inner {
                fresh += 1;
                let gen = fresh;
                let mut rename = |v: &Var| {
                    if outside.contains(v) {
                        Term::Var(v.clone())
                    } else {
                        Term::Var(Var { name: v.name.clone(), gen })
                    }
                };
                let mut body = pa_body.clone();
                body.extend(inner.iter().map(|u| rv_atom(&u.map_vars(&mut rename))));
                let head = pa_atom(&c.head, &t.map_vars(&mut rename));
                out.push_unique(DefiniteClause { head, body }, &mut seen);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Key {
    pred: Sym,
    arity: usize,
    inner: Option<(Sym, usize)>,
}

/// Index key and indexed arguments of an atom. `rv(f(a,b))` is keyed on `f/2` with args `[a,b]`.
fn flatten(atom: &Term) -> Option<(Key, &[Term])> {
    let Term::Compound(pred, args) = atom else {
        return match atom {
            Term::Atom(a) => Some((Key { pred: a.clone(), arity: 0, inner: None }, &[])),
            _ => None,
        };
    };
    if &**pred == "rv" && args.len() == 1 {
        match &args[0] {
            Term::Compound(f, inner) => {
                return Some((Key { pred: pred.clone(), arity: 1, inner: Some((f.clone(), inner.len())) }, inner))
            }
            Term::Atom(a) => return Some((Key { pred: pred.clone(), arity: 1, inner: Some((a.clone(), 0)) }, &[])),
            Term::Var(_) => return Some((Key { pred: pred.clone(), arity: 1, inner: None }, &[])),
            _ => {}
        }
    }
    Some((Key { pred: pred.clone(), arity: args.len(), inner: None }, args))
}

/// Ground atoms with a per-predicate, per-argument index.
#[derive(Clone, Debug, Default)]
struct Store {
    all: HashSet<Term>,
    by_key: HashMap<Key, Vec<Term>>,
    by_arg: HashMap<(Key, usize, Term), Vec<u32>>,
}

impl Store {
    fn insert(&mut self, atom: Term) -> bool {
        if self.all.contains(&atom) {
            return false;
        }
        let (key, args) = flatten(&atom).expect("ground atoms are callable");
        let bucket = self.by_key.entry(key.clone()).or_default();
        let idx = bucket.len() as u32;
        for (i, a) in args.iter().enumerate() {
            self.by_arg.entry((key.clone(), i, a.clone())).or_default().push(idx);
        }
        bucket.push(atom.clone());
        self.all.insert(atom);
        true
    }

    fn len(&self) -> usize {
        self.all.len()
    }

    fn sort(&mut self) {
        let mut by_key = std::mem::take(&mut self.by_key);
        self.by_arg.clear();
        for (key, bucket) in by_key.iter_mut() {
            bucket.sort();
            for (idx, atom) in bucket.iter().enumerate() {
                let (_, args) = flatten(atom).unwrap();
                for (i, a) in args.iter().enumerate() {
                    self.by_arg.entry((key.clone(), i, a.clone())).or_default().push(idx as u32);
                }
            }
        }
        self.by_key = by_key;
    }

    /// Candidate facts that may match `pattern`, in bucket order.
    fn candidates<'a>(&'a self, pattern: &Term, out: &mut Vec<&'a Term>) {
        if pattern.is_ground() {
            if let Some(t) = self.all.get(pattern) {
                out.push(t);
            }
            return;
        }
        let Some((key, args)) = flatten(pattern) else {
            out.extend(self.all.iter());
            return;
        };
        if key.pred.as_ref() == "rv" && key.inner.is_none() && key.arity == 1 {
            let mut keys: Vec<&Key> = self.by_key.keys().filter(|k| k.pred.as_ref() == "rv").collect();
            keys.sort_by(|a, b| a.inner.cmp(&b.inner));
            for k in keys {
                out.extend(self.by_key[k].iter());
            }
            return;
        }
        let Some(bucket) = self.by_key.get(&key) else { return };
        let mut best: Option<&Vec<u32>> = None;
        for (i, a) in args.iter().enumerate() {
            if a.is_ground() {
                match self.by_arg.get(&(key.clone(), i, a.clone())) {
                    Some(ix) => {
                        if best.is_none_or(|b| ix.len() < b.len()) {
                            best = Some(ix);
                        }
                    }
                    None => return,
                }
            }
        }
        match best {
            Some(ix) => out.extend(ix.iter().map(|&i| &bucket[i as usize])),
            None => out.extend(bucket.iter()),
        }
    }
}

/// Least Herbrand model of a definite program, computed once by semi-naive
/// bottom-up evaluation and then queried read-only.
#[derive(Clone, Debug)]
pub struct LeastModel {
    store: Store,
}

const MODEL_LIMIT: usize = 5_000_000;

impl LeastModel {
    pub fn compute(dp: &DefiniteProgram) -> Result<LeastModel> {
        let mut total = Store::default();
        let mut delta = Store::default();
        for c in dp.clauses.iter().filter(|c| c.body.is_empty()) {
            if !c.head.is_ground() {
                return Err(Error::Invalid(format!("non-ground fact {c}")));
            }
            if total.insert(c.head.clone()) {
                delta.insert(c.head.clone());
            }
        }
        let rules: Vec<&DefiniteClause> = dp.clauses.iter().filter(|c| !c.body.is_empty()).collect();
        while delta.len() > 0 {
            let mut next = Store::default();
            let mut derived = Vec::new();
            for rule in &rules {
                for d in 0..rule.body.len() {
                    join(rule, 0, d, &Subst::new(), &total, &delta, &mut derived)?;
                }
            }
            for atom in derived {
                if total.insert(atom.clone()) {
                    next.insert(atom);
                }
            }
            if total.len() > MODEL_LIMIT {
                return Err(Error::Invalid("least model exceeds the grounding budget".into()));
            }
            delta = next;
        }
        total.sort();
        Ok(LeastModel { store: total })
    }

    pub fn entails(&self, atom: &Term) -> bool {
        self.store.all.contains(atom)
    }

    /// All ground instances of `pattern` in the model, sorted in the standard term order.
    pub fn enumerate(&self, pattern: &Term) -> Vec<Term> {
        let mut out: Vec<Term> = self.matches(pattern).into_iter().cloned().collect();
        out.sort();
        out
    }

    /// Matching facts in index order (sorted within each predicate bucket).
    pub fn matches<'a>(&'a self, pattern: &Term) -> Vec<&'a Term> {
        let mut cands = Vec::new();
        self.store.candidates(pattern, &mut cands);
        cands.retain(|t| match_into(&mut Subst::new(), pattern, t));
        cands
    }

    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.len() == 0
    }
}

fn join(
    rule: &DefiniteClause,
    pos: usize,
    delta_pos: usize,
    s: &Subst,
    total: &Store,
    delta: &Store,
    out: &mut Vec<Term>,
) -> Result<()> {
    if pos == rule.body.len() {
        let head = s.apply(&rule.head);
        if !head.is_ground() {
            return Err(Error::Invalid(format!("rule `{rule}` derives non-ground `{head}`")));
        }
        out.push(head);
        return Ok(());
    }
    let pattern = s.apply(&rule.body[pos]);
    let source = if pos == delta_pos { delta } else { total };
    let mut cands = Vec::new();
    source.candidates(&pattern, &mut cands);
    for fact in cands {
        let mut s2 = s.clone();
        if match_into(&mut s2, &pattern, fact) {
            join(rule, pos + 1, delta_pos, &s2, total, delta, out)?;
        }
    }
    Ok(())
}

pub type NodeId = usize;

/// Ground RVs and direct-influence edges. Node ids follow the lexicographic
/// order of the RV terms' text, so parent and child lists are in that order too.
#[derive(Clone, Debug)]
pub struct GroundDag {
    pub nodes: Vec<Term>,
    index: HashMap<Term, NodeId>,
    pub parents: Vec<Vec<NodeId>>,
    pub children: Vec<Vec<NodeId>>,
    pub topo_rank: Vec<usize>,
    pub topo_order: Vec<NodeId>,
}

impl GroundDag {
    pub fn from_edges(nodes: Vec<Term>, edges: &[(Term, Term)]) -> Result<GroundDag> {
        let mut keyed: Vec<(String, Term)> = nodes.into_iter().map(|t| (t.to_string(), t)).collect();
        keyed.sort();
        keyed.dedup_by(|a, b| a.1 == b.1);
        let nodes: Vec<Term> = keyed.into_iter().map(|(_, t)| t).collect();
        let index: HashMap<Term, NodeId> = nodes.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let n = nodes.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for (p, c) in edges {
            let pi = *index.get(p).ok_or_else(|| Error::UnknownRv(p.to_string()))?;
            let ci = *index.get(c).ok_or_else(|| Error::UnknownRv(c.to_string()))?;
            parents[ci].push(pi);
            children[pi].push(ci);
        }
        for l in parents.iter_mut().chain(children.iter_mut()) {
            l.sort_unstable();
            l.dedup();
        }
        let mut indeg: Vec<usize> = parents.iter().map(Vec::len).collect();
        let mut heap: BinaryHeap<Reverse<NodeId>> = (0..n).filter(|&i| indeg[i] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(u)) = heap.pop() {
            order.push(u);
            for &c in &children[u] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    heap.push(Reverse(c));
                }
            }
        }
        if order.len() < n {
            let remaining: HashSet<NodeId> = (0..n).filter(|&i| indeg[i] > 0).collect();
            let start = *remaining.iter().min().unwrap();
            let mut path = vec![start];
            let mut cur = start;
            loop {
                cur = *parents[cur].iter().find(|p| remaining.contains(p)).unwrap();
                if let Some(k) = path.iter().position(|&x| x == cur) {
                    let mut cycle: Vec<String> = path[k..].iter().rev().map(|&i| nodes[i].to_string()).collect();
                    cycle.push(nodes[cur].to_string());
                    return Err(Error::Cycle(cycle.join(" -> ")));
                }
                path.push(cur);
            }
        }
        let mut topo_rank = vec![0; n];
        for (r, &u) in order.iter().enumerate() {
            topo_rank[u] = r;
        }
        Ok(GroundDag { nodes, index, parents, children, topo_rank, topo_order: order })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn id(&self, t: &Term) -> Option<NodeId> {
        self.index.get(t).copied()
    }

    pub fn require(&self, t: &Term) -> Result<NodeId> {
        self.id(t).ok_or_else(|| Error::UnknownRv(t.to_string()))
    }

    pub fn term(&self, id: NodeId) -> &Term {
        &self.nodes[id]
    }

    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for (c, ps) in self.parents.iter().enumerate() {
            for &p in ps {
                out.push((p, c));
            }
        }
        out.sort_unstable();
        out
    }

    /// Line-oriented dump: `node T` lines, then `edge P -> C` lines.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for t in &self.nodes {
            s.push_str(&format!("node {t}\n"));
        }
        for (p, c) in self.edges() {
            s.push_str(&format!("edge {} -> {}\n", self.nodes[p], self.nodes[c]));
        }
        s
    }
}

/// Static analysis results shared read-only by every simulation.
#[derive(Debug)]
pub struct Analysis {
    pub program: Program,
    pub rv_program: DefiniteProgram,
    pub dep_program: DefiniteProgram,
    pub model: LeastModel,
    pub dag: GroundDag,
    clauses_by_head: HashMap<(Sym, usize), Vec<usize>>,
}

fn head_key(t: &Term) -> Option<(Sym, usize)> {
    match t {
        Term::Atom(a) => Some((a.clone(), 0)),
        Term::Compound(f, args) => Some((f.clone(), args.len())),
        _ => None,
    }
}

impl Analysis {
    pub fn new(program: Program) -> Result<Analysis> {
        let rv_program = rv_set(&program);
        let dep_program = dependency_set(&program);
        let model = LeastModel::compute(&dep_program)?;
        let rv_pattern = rv_atom(&Term::var("X"));
        let nodes: Vec<Term> = model.matches(&rv_pattern).iter().map(|a| a.args()[0].clone()).collect();
        if nodes.is_empty() {
            return Err(Error::NoRvs);
        }
        let pa_pattern = pa_atom(&Term::var("C"), &Term::var("P"));
        let edges: Vec<(Term, Term)> =
            model.matches(&pa_pattern).iter().map(|a| (a.args()[1].clone(), a.args()[0].clone())).collect();
        let dag = GroundDag::from_edges(nodes, &edges)?;
        let mut clauses_by_head: HashMap<(Sym, usize), Vec<usize>> = HashMap::new();
        for (i, c) in program.clauses.iter().enumerate() {
            if let Some(k) = head_key(&c.head) {
                clauses_by_head.entry(k).or_default().push(i);
            }
        }
        Ok(Analysis { program, rv_program, dep_program, model, dag, clauses_by_head })
    }

    /// Indices of clauses whose head has the same functor and arity as `t`, in source order.
    pub fn clauses_for(&self, t: &Term) -> &[usize] {
        head_key(t).and_then(|k| self.clauses_by_head.get(&k)).map_or(&[], |v| v.as_slice())
    }

    /// Ground RV terms of the model matching `pattern`, in sorted index order.
    pub fn rv_instances(&self, pattern: &Term) -> Vec<Term> {
        let mut out: Vec<Term> = self.model.matches(&rv_atom(pattern)).iter().map(|a| a.args()[0].clone()).collect();
        out.sort();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_program, parse_term};

    const EX42: &str = "\
client(ann) ~ val(t).
loan(l_1) ~ val(t).
loan(l_2) ~ val(t).
has_loan(C,L) ~ bernoulli(0.2) <- client(C) ~= t, loan(L) ~= t.
status(L) ~ discrete([0.3:a, 0.7:d]) <- loan(L) ~= t.
credit_score(C) ~ gaussian(650,15.4) <- has_loan(C,L) ~= Y, Y==f.
credit_score(C) ~ gaussian(700,10.9) <- has_loan(C,L) ~= t, status(L) ~= X, X==a.
credit_score(C) ~ gaussian(600,20.5) <- has_loan(C,L) ~= t, status(L) ~= X, X==d.
";

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn rv_set_of_example() {
        let p = parse_program(EX42).unwrap();
        let rv = rv_set(&p);
        let lines: Vec<String> = rv.clauses.iter().map(|c| c.to_string()).collect();
        assert_eq!(
            lines,
            [
                "rv(client(ann)).",
                "rv(loan(l_1)).",
                "rv(loan(l_2)).",
                "rv(has_loan(C,L)) <- rv(client(C)), rv(loan(L)).",
                "rv(status(L)) <- rv(loan(L)).",
                "rv(credit_score(C)) <- rv(has_loan(C,L)).",
                "rv(credit_score(C)) <- rv(has_loan(C,L)), rv(status(L)).",
            ]
        );
    }

    #[test]
    fn dependency_set_of_example() {
        let p = parse_program(EX42).unwrap();
        let dep = dependency_set(&p);
        assert_eq!(dep.clauses.len(), 7 + 6);
        let pa: Vec<String> = dep.clauses[7..].iter().map(|c| c.to_string()).collect();
        assert_eq!(
            pa,
            [
                "pa(has_loan(C,L),client(C)) <- rv(has_loan(C,L)), rv(client(C)), rv(loan(L)).",
                "pa(has_loan(C,L),loan(L)) <- rv(has_loan(C,L)), rv(client(C)), rv(loan(L)).",
                "pa(status(L),loan(L)) <- rv(status(L)), rv(loan(L)).",
                "pa(credit_score(C),has_loan(C,L)) <- rv(credit_score(C)), rv(has_loan(C,L)).",
                "pa(credit_score(C),has_loan(C,L)) <- rv(credit_score(C)), rv(has_loan(C,L)), rv(status(L)).",
                "pa(credit_score(C),status(L)) <- rv(credit_score(C)), rv(has_loan(C,L)), rv(status(L)).",
            ]
        );
    }

    #[test]
    fn entailment() {
        let p = parse_program(EX42).unwrap();
        let a = Analysis::new(p).unwrap();
        let rv = LeastModel::compute(&a.rv_program).unwrap();
        assert!(rv.entails(&t("rv(has_loan(ann,l_1))")));
        assert!(!rv.entails(&t("rv(has_loan(l_1,l_2))")));
        assert!(a.model.entails(&t("pa(credit_score(ann),status(l_1))")));
        let empty = LeastModel::compute(&DefiniteProgram::default()).unwrap();
        assert!(!empty.entails(&t("rv(a)")));
        let loans = a.model.enumerate(&t("rv(loan(L))"));
        assert_eq!(loans, vec![t("rv(loan(l_1))"), t("rv(loan(l_2))")]);
    }

    #[test]
    fn ground_dag_of_example() {
        let a = Analysis::new(parse_program(EX42).unwrap()).unwrap();
        assert_eq!(a.dag.len(), 8);
        let cs = a.dag.require(&t("credit_score(ann)")).unwrap();
        let ps: Vec<String> = a.dag.parents[cs].iter().map(|&p| a.dag.term(p).to_string()).collect();
        assert_eq!(ps, ["has_loan(ann,l_1)", "has_loan(ann,l_2)", "status(l_1)", "status(l_2)"]);
        for (p, c) in a.dag.edges() {
            assert!(a.dag.topo_rank[p] < a.dag.topo_rank[c]);
        }
    }

    #[test]
    fn cycle_and_empty() {
        let cyc = parse_program("a(1) ~ bernoulli(0.5) <- a(1) ~= t.").unwrap();
        // The self-referencing clause never fires bottom-up, so add a base fact.
        let mut p = cyc.clone();
        p.clauses.insert(0, parse_program("a(1) ~ bernoulli(0.2).").unwrap().clauses.remove(0));
        assert!(matches!(Analysis::new(p), Err(Error::Cycle(_))));
        assert!(matches!(Analysis::new(cyc), Err(Error::NoRvs)));
        let cycle2 =
            parse_program("a ~ bernoulli(0.5) <- b ~= t.\nb ~ bernoulli(0.5) <- a ~= t.\nb ~ val(t).").unwrap();
        match Analysis::new(cycle2) {
            Err(Error::Cycle(w)) => assert!(w.contains("a") && w.contains("b")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn facts_only_dep_equals_rv() {
        let p = parse_program("a ~ bernoulli(0.5).\nb ~ val(t).").unwrap();
        assert_eq!(rv_set(&p), dependency_set(&p));
    }

    #[test]
    fn appendix_b_sets() {
        let src = "\
client(ann) ~ val(true).
loan(l_1) ~ bernoulli(0.9).
loan(l_2) ~ bernoulli(0.9).
age(C) ~ gaussian(40, 10.5) <- client(C) ~= true.
has_loan(C,L) ~ bernoulli(0.2) <- client(C) ~= true, loan(L) ~= true.
status(L) ~ discrete([0.3:appr, 0.7:decl]) <- loan(L) ~= true.
credit_score(C) ~ gaussian(700, 10.9) <- has_loan(C,L) ~= true, status(L) ~= appr.
credit_score(C) ~ gaussian(600, 20.5) <- has_loan(C,L) ~= true, status(L) ~= decl.
credit_score(C) ~ gaussian(500, 30.2) <- has_loan(C,L) ~= true, \\+ status(L) ~= _.
credit_score(C) ~ gaussian(750, 15.9) <- age(C) ~= Y, mode(X,(has_loan(C,L) ~= true, status(L) ~= X),appr), linear([Y],[20.1,30.9],M).
";
        let p = parse_program(src).unwrap();
        let rv = rv_set(&p);
        assert_eq!(rv.clauses.len(), 8);
        assert_eq!(rv.clauses[7].to_string(), "rv(credit_score(C)) <- rv(age(C)).");
        let dep = dependency_set(&p);
        let pa: Vec<String> = dep.clauses[8..].iter().map(|c| c.to_string()).collect();
        assert_eq!(pa.len(), 9);
        assert_eq!(
            pa[7],
            "pa(credit_score(C),has_loan(C,L_1)) <- rv(credit_score(C)), rv(age(C)), rv(has_loan(C,L_1)), rv(status(L_1))."
        );
        assert_eq!(
            pa[8],
            "pa(credit_score(C),status(L_2)) <- rv(credit_score(C)), rv(age(C)), rv(has_loan(C,L_2)), rv(status(L_2))."
        );
    }
}
