//! Benchmark workloads: the relational loan program over a domain of size n,
//! and random query/evidence cases on generated tree-CPD networks.

use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bif::{random_tree_bn, BayesNet};
use crate::error::Result;
use crate::term::Term;

/// The loan program with clients `c1..cn`, accounts `a1..an` and loans `l1..ln`.
/// Intended for the noisy-or combining rule.
pub fn loans_program(n: usize) -> String {
    let mut s = String::new();
    for i in 1..=n {
        let _ = writeln!(s, "client(c{i}) ~ val(t).\naccount(a{i}) ~ val(t).\nloan(l{i}) ~ val(t).");
    }
    s.push_str(
        "home_loan(L) ~ bernoulli(0.7) <- loan(L) ~= t.
high_savings(A) ~ bernoulli(0.3) <- account(A) ~= t.
has_account(C,A) ~ bernoulli(0.01) <- client(C) ~= t, account(A) ~= t.
account_loan(A,L) ~ bernoulli(0.02) <- account(A) ~= t, loan(L) ~= t.
has_loan(C,L) ~ bernoulli(0.9) <- has_account(C,A) ~= t, account_loan(A,L) ~= t.
has_loan(C,L) ~ bernoulli(0.001) <- client(C) ~= t, loan(L) ~= t.
debt(C) ~ bernoulli(0.9) <- has_loan(C,L) ~= t, home_loan(L) ~= t.
debt(C) ~ bernoulli(0.6) <- has_loan(C,L) ~= t, home_loan(L) ~= f.
debt(C) ~ bernoulli(0.3) <- has_account(C,A) ~= t, high_savings(A) ~= f.
debt(C) ~ bernoulli(0.01) <- client(C) ~= t.
",
    );
    s
}

pub const LOANS_QUERY: &str = "debt(c1) ~= t";

/// Evidence for the loan query: every `has_loan` and `high_savings` false, every
/// other RV except `debt(c1)` true.
pub fn loans_evidence(n: usize) -> Vec<(Term, Term)> {
    let (t, f) = (Term::atom("t"), Term::atom("f"));
    let a = |p: &str, i: usize| Term::atom(&format!("{p}{i}"));
    let mut ev = Vec::new();
    for i in 1..=n {
        ev.push((Term::compound("home_loan", vec![a("l", i)]), t.clone()));
        ev.push((Term::compound("high_savings", vec![a("a", i)]), f.clone()));
        if i > 1 {
            ev.push((Term::compound("debt", vec![a("c", i)]), t.clone()));
        }
        for j in 1..=n {
            ev.push((Term::compound("has_account", vec![a("c", i), a("a", j)]), t.clone()));
            ev.push((Term::compound("account_loan", vec![a("a", i), a("l", j)]), t.clone()));
            ev.push((Term::compound("has_loan", vec![a("c", i), a("l", j)]), f.clone()));
        }
    }
    ev
}

/// A generated network with one query and evidence drawn from a forward sample,
/// so the evidence has positive probability.
#[derive(Clone, Debug)]
pub struct BnCase {
    pub bn: BayesNet,
    /// (variable, value index)
    pub query: (usize, usize),
    pub evidence: Vec<(usize, usize)>,
    /// P(query | evidence) by variable elimination.
    pub exact: f64,
}

/// A case with 15 to 40 binary nodes, at most 3 parents, and evidence on about a
/// fifth of the nodes, drawn from the later half of the node order.
pub fn bn_case(seed: u64) -> Result<BnCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_cafe);
    let n = rng.gen_range(15..=40);
    let bn = random_tree_bn(n, 3, 0.7, seed);
    let world = bn.sample(&mut rng);
    let half = n / 2;
    let k = (n / 5).max(2);
    let mut evidence: Vec<(usize, usize)> =
        sample(&mut rng, n - half, k).into_iter().map(|i| (half + i, world[half + i])).collect();
    evidence.sort_unstable();
    let q = rng.gen_range(half / 2..half);
    let query = (q, 1);
    let exact = bn.posterior(q, &evidence)?[1];
    Ok(BnCase { bn, query, evidence, exact })
}

impl BnCase {
    pub fn query_text(&self) -> String {
        format!("{} ~= {}", self.bn.rv(self.query.0), self.bn.value(self.query.0, self.query.1))
    }

    pub fn evidence_terms(&self) -> Vec<(Term, Term)> {
        self.evidence.iter().map(|&(v, j)| (self.bn.rv(v), self.bn.value(v, j))).collect()
    }
}
