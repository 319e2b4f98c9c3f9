//! Query driver: per-row seeded simulations, residual fill-ins, and estimation.

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{Analysis, NodeId};
use crate::bayes_ball::{basis, classify, Classification};
use crate::error::{Error, Result};
use crate::estimator::{estimate_cslw, estimate_naive, Algorithm, Estimate, WeightMatrix};
use crate::fo::{FoSampler, SamplerOptions};
use crate::ground::GroundSampler;
use crate::oracle::query_nodes;
use crate::program::{DistExpr, Literal};
use crate::state::{Evidence, SimulationState, WeightedRow};
use crate::term::{unify, Term};

#[derive(Clone, Copy, Debug)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub samples: usize,
    pub seed: u64,
    pub jobs: usize,
    pub options: SamplerOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algorithm: Algorithm::Focslw,
            samples: 10_000,
            seed: 0,
            jobs: 1,
            options: SamplerOptions::default(),
        }
    }
}

/// The value of a parentless RV whose only clause is a body-free `val` fact.
pub fn point_value(an: &Analysis, x: NodeId) -> Option<Term> {
    if !an.dag.parents[x].is_empty() {
        return None;
    }
    let t = an.dag.term(x);
    let mut found = None;
    for &i in an.clauses_for(t) {
        let c = &an.program.clauses[i];
        let Some(s) = unify(&c.head, t) else { continue };
        let (true, DistExpr::Val(v), None) = (c.body.is_empty(), &c.dist, &found) else { return None };
        let v = s.apply(v);
        if !v.is_ground() {
            return None;
        }
        found = Some(v);
    }
    found
}

/// The random stream for one row: stream `row` of the master seed.
pub fn row_rng(seed: u64, row: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row as u64);
    rng
}

enum Sampler<'a> {
    Ground(GroundSampler<'a>),
    Fo(FoSampler<'a>),
}

/// A query with its evidence and Bayes-ball classification over the ground DAG.
pub struct Query<'a> {
    pub analysis: &'a Analysis,
    pub goals: Vec<Literal>,
    pub evidence: Evidence,
    pub nodes: Vec<NodeId>,
    pub class: Classification,
    /// The diagnostic universe E⋆ in node order.
    pub diagnostic: Vec<NodeId>,
}

impl<'a> Query<'a> {
    /// Parentless RVs defined only by a body-free `val` fact are added to the evidence
    /// at their one value (unless they are query nodes); this weighs 1 and keeps
    /// Bayes-ball from passing through them.
    pub fn new(analysis: &'a Analysis, goals: Vec<Literal>, mut evidence: Evidence) -> Result<Query<'a>> {
        let nodes = query_nodes(analysis, &goals);
        for x in 0..analysis.dag.len() {
            if evidence.contains(x) || nodes.contains(&x) {
                continue;
            }
            if let Some(v) = point_value(analysis, x) {
                evidence.insert(x, v);
            }
        }
        let class = classify(&analysis.dag, &nodes, &evidence.node_set())?;
        let diagnostic = class.diagnostic.iter().copied().collect();
        Ok(Query { analysis, goals, evidence, nodes, class, diagnostic })
    }

    fn sampler(&self, cfg: &RunConfig) -> Result<Sampler<'_>> {
        Ok(match cfg.algorithm {
            Algorithm::Cslw => Sampler::Ground(GroundSampler::new(self.analysis, &self.evidence, cfg.options)?),
            Algorithm::Lw => match GroundSampler::new(self.analysis, &self.evidence, cfg.options) {
                Ok(g) => Sampler::Ground(g),
                Err(_) => Sampler::Fo(FoSampler::new(self.analysis, &self.evidence, cfg.options)),
            },
            Algorithm::Focslw => Sampler::Fo(FoSampler::new(self.analysis, &self.evidence, cfg.options)),
            Algorithm::Exact => return Err(Error::Invalid("exact is not a sampling algorithm".into())),
        })
    }

    /// Nodes sampled or weighed by a likelihood-weighting row, in topological order.
    fn lw_order(&self) -> Vec<NodeId> {
        let keep: HashSet<NodeId> =
            self.class.requisite_unobserved.iter().chain(self.class.diagnostic.iter()).copied().collect();
        self.analysis.dag.topo_order.iter().copied().filter(|u| keep.contains(u)).collect()
    }

    /// Lemma-style per-row checks: assigned nodes are requisite, weighed nodes are
    /// diagnostic, and no residual evidence has an assigned basis node.
    pub fn check_row(&self, st: &SimulationState, row: &WeightedRow) -> Result<()> {
        let dag = &self.analysis.dag;
        if let Some(&z) = st.asg.keys().find(|z| !self.class.requisite_unobserved.contains(z)) {
            return Err(Error::Invariant(format!("assigned {} is not requisite", dag.term(z))));
        }
        if let Some(&(e, _)) = row.natural.iter().find(|(e, _)| !self.class.diagnostic.contains(e)) {
            return Err(Error::Invariant(format!("weighed {} is not diagnostic evidence", dag.term(e))));
        }
        let ev = self.evidence.node_set();
        for e in self.residuals(row) {
            if let Some(&b) = basis(dag, &ev, e).iter().find(|b| st.asg.contains_key(b)) {
                return Err(Error::Invariant(format!(
                    "basis node {} of residual {} is assigned",
                    dag.term(b),
                    dag.term(e)
                )));
            }
        }
        Ok(())
    }

    /// E⋆ minus the naturally weighed evidence of `row`.
    pub fn residuals(&self, row: &WeightedRow) -> Vec<NodeId> {
        let natural: BTreeSet<NodeId> = row.natural.iter().map(|(e, _)| *e).collect();
        self.diagnostic.iter().copied().filter(|e| !natural.contains(e)).collect()
    }

    fn row<G: Rng>(
        &self,
        sampler: &Sampler<'_>,
        cfg: &RunConfig,
        st: &mut SimulationState,
        rng: &mut G,
    ) -> Result<WeightedRow> {
        match cfg.algorithm {
            Algorithm::Lw => {
                let order = self.lw_order();
                match sampler {
                    Sampler::Ground(g) => g.lw_row(&self.goals, &order, st, rng),
                    Sampler::Fo(f) => f.lw_row(&self.goals, &order, st, rng),
                }
            }
            _ => {
                let mut row = match sampler {
                    Sampler::Ground(g) => g.simulate(&self.goals, st, rng)?,
                    Sampler::Fo(f) => f.simulate(&self.goals, st, rng)?,
                };
                if cfg.options.check {
                    self.check_row(st, &row)?;
                }
                let res = self.residuals(&row);
                row.filled = match sampler {
                    Sampler::Ground(g) => g.weight_residuals(&res, st, rng)?,
                    Sampler::Fo(f) => f.weight_residuals(&res, st, rng)?,
                };
                Ok(row)
            }
        }
    }

    /// `cfg.samples` rows in row order; identical for any `cfg.jobs`.
    pub fn rows(&self, cfg: &RunConfig) -> Result<Vec<WeightedRow>> {
        let sampler = self.sampler(cfg)?;
        let one = |st: &mut SimulationState, i: usize| self.row(&sampler, cfg, st, &mut row_rng(cfg.seed, i));
        if cfg.jobs <= 1 {
            let mut st = SimulationState::new();
            return (0..cfg.samples).map(|i| one(&mut st, i)).collect();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
        pool.install(|| (0..cfg.samples).into_par_iter().map_init(SimulationState::new, one).collect())
    }

    pub fn estimate_rows(&self, cfg: &RunConfig, rows: Vec<WeightedRow>) -> Result<Estimate> {
        match cfg.algorithm {
            Algorithm::Lw => estimate_naive(&rows, cfg.algorithm),
            _ => estimate_cslw(&WeightMatrix::new(self.diagnostic.clone(), rows)?, cfg.algorithm),
        }
    }

    pub fn estimate(&self, cfg: &RunConfig) -> Result<Estimate> {
        if cfg.samples == 0 {
            return Err(Error::Invalid("at least one sample is required".into()));
        }
        let rows = self.rows(cfg)?;
        self.estimate_rows(cfg, rows)
    }
}
