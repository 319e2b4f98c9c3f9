//! CS-LW for ground DC(B) programs: the first clause whose body proves determines
//! an RV's distribution, and observed children are weighed from their parents.

use rand::Rng;

use crate::analysis::{Analysis, NodeId};
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::fo::{check_refuted, SamplerOptions};
use crate::program::Literal;
use crate::prover::{Flow, Prover, Resolver};
use crate::state::{Event, Evidence, SimulationState, WeightedRow};
use crate::term::{match_into, Subst, Term};

fn rv_terms<'a>(lits: &'a [Literal], out: &mut Vec<&'a Term>) {
    for l in lits {
        match l {
            Literal::Value { rv, .. } => out.push(rv),
            Literal::Aggregate { goal, .. } => rv_terms(goal, out),
            _ => {}
        }
    }
}

pub struct GroundSampler<'a> {
    pub analysis: &'a Analysis,
    pub evidence: &'a Evidence,
    pub options: SamplerOptions,
}

struct Run<'r, 'a, G: Rng> {
    s: &'r GroundSampler<'a>,
    st: &'r mut SimulationState,
    rng: &'r mut G,
    marked: bool,
}

impl<G: Rng> Run<'_, '_, G> {
    /// The first clause for `node` whose body proves, with its distribution.
    fn choose(&mut self, prover: &Prover<'_>, node: NodeId) -> Result<Option<Distribution>> {
        let an = self.s.analysis;
        let term = an.dag.term(node);
        for &ci in an.clauses_for(term) {
            let clause = &an.program.clauses[ci];
            let mut s = Subst::new();
            if !match_into(&mut s, &clause.head, term) {
                continue;
            }
            if self.s.options.check {
                self.st.events.push(Event::Attempt { node, clause: ci });
            }
            let mut answer = None;
            prover.solve(self, &clause.body, &s, &mut |_, s2| {
                answer = Some(s2.clone());
                Ok(Flow::Stop)
            })?;
            if let Some(s2) = answer {
                if self.s.options.check {
                    let others: Vec<usize> = an
                        .clauses_for(term)
                        .iter()
                        .copied()
                        .filter(|&cj| cj != ci && match_into(&mut Subst::new(), &an.program.clauses[cj].head, term))
                        .collect();
                    check_refuted(prover, self.st, self.s.evidence, node, &others)?;
                }
                return Ok(Some(Distribution::from_expr(&clause.dist, &s2)?));
            }
        }
        if self.s.options.strict {
            return Err(Error::NonExhaustive(format!(
                "non-exhaustive ground program: no clause body for {term} proves"
            )));
        }
        Ok(None)
    }

    fn weigh(&mut self, prover: &Prover<'_>, node: NodeId) -> Result<f64> {
        let obs = self.s.evidence.get(node).expect("weighing an observed node").clone();
        match self.choose(prover, node)? {
            Some(d) => d.log_likelihood(&obs),
            None => Ok(f64::NEG_INFINITY),
        }
    }
}

impl<G: Rng> Resolver for Run<'_, '_, G> {
    fn resolve(&mut self, prover: &Prover<'_>, node: NodeId) -> Result<Option<Term>> {
        if self.marked {
            if let Some(v) = self.s.evidence.get(node) {
                return Ok(Some(v.clone()));
            }
        }
        if let Some(v) = self.st.value(node) {
            return Ok(v.clone());
        }
        self.st.top.insert(node);
        let v = match self.choose(prover, node)? {
            Some(d) => Some(d.draw(self.rng)),
            None => None,
        };
        self.st.assign(node, v.clone())?;
        if self.s.options.check {
            self.st.events.push(Event::Sample { node });
        }
        if self.marked {
            self.st.schedule(node);
        }
        Ok(v)
    }
}

impl<'a> GroundSampler<'a> {
    /// Fails unless every RV term in the program is ground.
    pub fn new(analysis: &'a Analysis, evidence: &'a Evidence, options: SamplerOptions) -> Result<GroundSampler<'a>> {
        for (i, c) in analysis.program.clauses.iter().enumerate() {
            let mut terms = vec![&c.head];
            rv_terms(&c.body, &mut terms);
            if let Some(t) = terms.iter().find(|t| !t.is_ground()) {
                return Err(Error::Invalid(format!("clause {} is not ground: `{t}`", i + 1)));
            }
        }
        Ok(GroundSampler { analysis, evidence, options })
    }

    /// Proves `goal` without evidence or marks; values persist in `st`.
    pub fn prove_ground<G: Rng>(&self, goal: &[Literal], st: &mut SimulationState, rng: &mut G) -> Result<bool> {
        let prover = Prover::new(self.analysis);
        prover.holds(&mut Run { s: self, st, rng, marked: false }, goal)
    }

    /// Proves `goal` reading evidence, marking sampled RVs on top and scheduling them forward.
    pub fn prove_marked_ground<G: Rng>(&self, goal: &[Literal], st: &mut SimulationState, rng: &mut G) -> Result<bool> {
        let prover = Prover::new(self.analysis);
        prover.holds(&mut Run { s: self, st, rng, marked: true }, goal)
    }

    pub fn simulate<G: Rng>(&self, query: &[Literal], st: &mut SimulationState, rng: &mut G) -> Result<WeightedRow> {
        st.clear();
        let prover = Prover::new(self.analysis);
        let mut run = Run { s: self, st, rng, marked: true };
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

    pub fn weight_residuals<G: Rng>(
        &self,
        residuals: &[NodeId],
        st: &mut SimulationState,
        rng: &mut G,
    ) -> Result<Vec<(NodeId, f64)>> {
        let prover = Prover::new(self.analysis);
        let mut run = Run { s: self, st, rng, marked: true };
        residuals.iter().map(|&e| Ok((e, run.weigh(&prover, e)?))).collect()
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
        let mut run = Run { s: self, st, rng, marked: true };
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
