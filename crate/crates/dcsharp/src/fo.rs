//! FO-CS-LW: simulation of first-order DC# programs with Dst collection and combining rules.

use rand::Rng;

use crate::analysis::{Analysis, NodeId};
use crate::distribution::{combine, Distribution};
use crate::error::{Error, Result};
use crate::program::Literal;
use crate::prover::{Flow, Peek, Prover, Resolver};
use crate::state::{Event, Evidence, SimulationState, WeightedRow};
use crate::term::{match_into, Subst, Term};

#[derive(Clone, Copy, Debug, Default)]
pub struct SamplerOptions {
    /// An RV with no applicable clause is an error instead of `undefined`.
    pub strict: bool,
    /// Check per-collection invariants: clauses that do not fire are refuted by the
    /// context, and parents are assigned before children.
    pub check: bool,
}

/// Collect the distributions of every derivation of every clause for `node`,
/// along with the matching clauses that had no derivation.
pub(crate) fn collect_dst<R: Resolver>(
    prover: &Prover<'_>,
    r: &mut R,
    node: NodeId,
    mut on_attempt: impl FnMut(&mut R, usize),
) -> Result<(Vec<Distribution>, Vec<usize>)> {
    let an = prover.analysis;
    let term = an.dag.term(node);
    let mut out = Vec::new();
    let mut silent = Vec::new();
    for &ci in an.clauses_for(term) {
        let clause = &an.program.clauses[ci];
        let mut s = Subst::new();
        if !match_into(&mut s, &clause.head, term) {
            continue;
        }
        on_attempt(r, ci);
        let before = out.len();
        prover.solve(r, &clause.body, &s, &mut |_, s2| {
            out.push(Distribution::from_expr(&clause.dist, s2)?);
            Ok(Flow::Continue)
        })?;
        if out.len() == before {
            silent.push(ci);
        }
    }
    Ok((out, silent))
}

/// Every matching clause that did not fire must already have a failing body literal.
pub(crate) fn check_refuted(
    prover: &Prover<'_>,
    st: &SimulationState,
    evidence: &Evidence,
    node: NodeId,
    silent: &[usize],
) -> Result<()> {
    let an = prover.analysis;
    let term = an.dag.term(node);
    let mut peek = Peek { st, evidence };
    for &ci in silent {
        let clause = &an.program.clauses[ci];
        let mut s = Subst::new();
        match_into(&mut s, &clause.head, term);
        if !prover.refuted(&mut peek, &clause.body, &s) {
            return Err(Error::Invariant(format!(
                "clause {} for {term} neither fired nor is refuted by the context",
                ci + 1
            )));
        }
    }
    Ok(())
}

pub struct FoSampler<'a> {
    pub analysis: &'a Analysis,
    pub evidence: &'a Evidence,
    pub options: SamplerOptions,
}

struct Run<'r, 'a, G: Rng> {
    s: &'r FoSampler<'a>,
    st: &'r mut SimulationState,
    rng: &'r mut G,
    reads: Vec<NodeId>,
}

impl<G: Rng> Run<'_, '_, G> {
    fn combined_value(&mut self, node: NodeId, dists: Vec<Distribution>) -> Result<Option<Term>> {
        if dists.is_empty() {
            if self.s.options.strict {
                return Err(Error::NonExhaustive(format!("no clause defines {}", self.s.analysis.dag.term(node))));
            }
            return Ok(None);
        }
        let c = combine(self.s.analysis.program.combining, dists)?;
        Ok(Some(c.draw(self.rng)))
    }

    fn collect(&mut self, prover: &Prover<'_>, node: NodeId) -> Result<Vec<Distribution>> {
        let check = self.s.options.check;
        let (dists, silent) = collect_dst(prover, self, node, |r, clause| {
            if check {
                r.st.events.push(Event::Attempt { node, clause });
            }
        })?;
        if check {
            check_refuted(prover, self.st, self.s.evidence, node, &silent)?;
        }
        self.st.dst.insert(node, dists.clone());
        Ok(dists)
    }

    fn check_reads(&self, node: NodeId, mark: usize) -> Result<()> {
        let Some(&t) = self.st.stamp.get(&node) else { return Ok(()) };
        for &p in &self.reads[mark..] {
            if self.s.evidence.contains(p) {
                continue;
            }
            match self.st.stamp.get(&p) {
                Some(&tp) if tp < t => {}
                _ => {
                    return Err(Error::Invariant(format!(
                        "{} assigned before its parent {}",
                        self.s.analysis.dag.term(node),
                        self.s.analysis.dag.term(p)
                    )))
                }
            }
        }
        Ok(())
    }

    /// Log-likelihood of an observed node's value under its collected Dst.
    fn weigh(&mut self, prover: &Prover<'_>, node: NodeId) -> Result<f64> {
        let obs = self.s.evidence.get(node).expect("weighing an observed node").clone();
        let dists = self.collect(prover, node)?;
        if dists.is_empty() {
            if self.s.options.strict {
                return Err(Error::NonExhaustive(format!(
                    "observed {} has no applicable clause",
                    self.s.analysis.dag.term(node)
                )));
            }
            return Ok(f64::NEG_INFINITY);
        }
        combine(self.s.analysis.program.combining, dists)?.log_likelihood(&obs)
    }
}

impl<G: Rng> Resolver for Run<'_, '_, G> {
    fn resolve(&mut self, prover: &Prover<'_>, node: NodeId) -> Result<Option<Term>> {
        if self.s.options.check {
            self.reads.push(node);
        }
        if let Some(v) = self.s.evidence.get(node) {
            return Ok(Some(v.clone()));
        }
        if self.st.top.contains(&node) {
            return Ok(self.st.value(node).cloned().flatten());
        }
        let mark = self.reads.len();
        let dists = self.collect(prover, node)?;
        let v = self.combined_value(node, dists)?;
        self.st.assign(node, v.clone())?;
        if self.s.options.check {
            self.st.events.push(Event::Sample { node });
            self.check_reads(node, mark)?;
            self.reads.truncate(mark);
        }
        self.st.top.insert(node);
        self.st.schedule(node);
        Ok(v)
    }
}

impl<'a> FoSampler<'a> {
    pub fn new(analysis: &'a Analysis, evidence: &'a Evidence, options: SamplerOptions) -> FoSampler<'a> {
        FoSampler { analysis, evidence, options }
    }

    /// One forward simulation: proves the query and weighs the evidence reached by the forward pass.
    pub fn simulate<G: Rng>(&self, query: &[Literal], st: &mut SimulationState, rng: &mut G) -> Result<WeightedRow> {
        st.clear();
        let prover = Prover::new(self.analysis);
        let mut run = Run { s: self, st, rng, reads: Vec::new() };
        let f = prover.holds(&mut run, query)?;
        while let Some(a) = run.st.pop_forward() {
            run.st.bottom.insert(a);
            for &c in &self.analysis.dag.children[a] {
                if self.evidence.contains(c) {
                    if !run.st.top.contains(&c) {
                        run.st.top.insert(c);
                        let w = run.weigh(&prover, c)?;
                        run.st.weights.insert(c, w);
                    }
                } else {
                    run.st.schedule(c);
                }
            }
        }
        let natural = run.st.weights.iter().map(|(&k, &w)| (k, w)).collect();
        Ok(WeightedRow { f, natural, filled: Vec::new() })
    }

    /// Fill in weights of residual evidence within the same state.
    pub fn weight_residuals<G: Rng>(
        &self,
        residuals: &[NodeId],
        st: &mut SimulationState,
        rng: &mut G,
    ) -> Result<Vec<(NodeId, f64)>> {
        let prover = Prover::new(self.analysis);
        let mut run = Run { s: self, st, rng, reads: Vec::new() };
        let mut out = Vec::with_capacity(residuals.len());
        for &e in residuals {
            out.push((e, run.weigh(&prover, e)?));
        }
        Ok(out)
    }

    /// Likelihood weighting over a fixed topological order: unobserved nodes are
    /// sampled and observed nodes weighed, then the query is proved.
    pub fn lw_row<G: Rng>(
        &self,
        query: &[Literal],
        order: &[NodeId],
        st: &mut SimulationState,
        rng: &mut G,
    ) -> Result<WeightedRow> {
        st.clear();
        let prover = Prover::new(self.analysis);
        let mut run = Run { s: self, st, rng, reads: Vec::new() };
        for &u in order {
            if self.evidence.contains(u) {
                let w = run.weigh(&prover, u)?;
                run.st.weights.insert(u, w);
            } else {
                run.resolve(&prover, u)?;
            }
        }
        let f = prover.holds(&mut run, query)?;
        let natural = run.st.weights.iter().map(|(&k, &w)| (k, w)).collect();
        Ok(WeightedRow { f, natural, filled: Vec::new() })
    }
}
