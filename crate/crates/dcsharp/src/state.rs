//! Per-simulation tables, evidence, and weighted rows.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use crate::analysis::{GroundDag, NodeId};
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::term::Term;

/// Observed values keyed by ground RV.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Evidence {
    values: HashMap<NodeId, Term>,
}

impl Evidence {
    pub fn new(dag: &GroundDag, pairs: &[(Term, Term)]) -> Result<Evidence> {
        let mut values = HashMap::new();
        for (rv, v) in pairs {
            let id = dag.id(rv).ok_or_else(|| Error::Evidence(format!("`{rv}` is not an RV of the program")))?;
            if !v.is_ground() {
                return Err(Error::Evidence(format!("value of `{rv}` must be ground")));
            }
            if matches!(v, Term::Atom(a) if &**a == "undefined") {
                return Err(Error::Evidence(format!("`{rv}` cannot be observed as undefined")));
            }
            if let Some(old) = values.insert(id, v.clone()) {
                if old != *v {
                    return Err(Error::Evidence(format!("`{rv}` observed as both {old} and {v}")));
                }
            }
        }
        Ok(Evidence { values })
    }

    pub fn from_ids(values: HashMap<NodeId, Term>) -> Evidence {
        Evidence { values }
    }

    pub fn insert(&mut self, id: NodeId, value: Term) {
        self.values.insert(id, value);
    }

    pub fn get(&self, id: NodeId) -> Option<&Term> {
        self.values.get(&id)
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.values.contains_key(&id)
    }

    pub fn nodes(&self) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = self.values.keys().copied().collect();
        v.sort_unstable();
        v
    }

    pub fn node_set(&self) -> HashSet<NodeId> {
        self.values.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Event {
    Attempt { node: NodeId, clause: usize },
    Sample { node: NodeId },
}

/// The tables Asg, Top, Bottom, Forward, W and Dst of one simulation.
/// An `Asg` entry of `None` is the `undefined` value.
#[derive(Clone, Debug, Default)]
pub struct SimulationState {
    pub asg: HashMap<NodeId, Option<Term>>,
    pub top: HashSet<NodeId>,
    pub bottom: HashSet<NodeId>,
    pub forward: VecDeque<NodeId>,
    queued: HashSet<NodeId>,
    pub weights: BTreeMap<NodeId, f64>,
    pub dst: HashMap<NodeId, Vec<Distribution>>,
    /// Assignment order; observed nodes have no stamp.
    pub stamp: HashMap<NodeId, u64>,
    clock: u64,
    pub pushes: HashMap<NodeId, u32>,
    pub events: Vec<Event>,
}

impl SimulationState {
    pub fn new() -> SimulationState {
        SimulationState::default()
    }

    pub fn clear(&mut self) {
        self.asg.clear();
        self.top.clear();
        self.bottom.clear();
        self.forward.clear();
        self.queued.clear();
        self.weights.clear();
        self.dst.clear();
        self.stamp.clear();
        self.clock = 0;
        self.pushes.clear();
        self.events.clear();
    }

    /// Record a value. Asg is append-only.
    pub fn assign(&mut self, node: NodeId, v: Option<Term>) -> Result<()> {
        if self.asg.contains_key(&node) {
            return Err(Error::Invariant(format!("node {node} assigned twice")));
        }
        self.asg.insert(node, v);
        self.clock += 1;
        self.stamp.insert(node, self.clock);
        Ok(())
    }

    pub fn value(&self, node: NodeId) -> Option<&Option<Term>> {
        self.asg.get(&node)
    }

    /// Schedule `node` on Forward unless it is in Bottom or already queued.
    pub fn schedule(&mut self, node: NodeId) {
        if self.bottom.contains(&node) || !self.queued.insert(node) {
            return;
        }
        *self.pushes.entry(node).or_default() += 1;
        self.forward.push_back(node);
    }

    pub fn pop_forward(&mut self) -> Option<NodeId> {
        let n = self.forward.pop_front()?;
        self.queued.remove(&n);
        Some(n)
    }

    /// Unobserved nodes that received a value (Z† together with the query RVs).
    pub fn assigned(&self) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = self.asg.keys().copied().collect();
        v.sort_unstable();
        v
    }
}

/// One partially weighted sample: f(x), the naturally weighted evidence and the fill-ins.
/// Weights are natural logarithms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightedRow {
    pub f: bool,
    pub natural: Vec<(NodeId, f64)>,
    pub filled: Vec<(NodeId, f64)>,
}

impl WeightedRow {
    pub fn log_weight(&self) -> f64 {
        self.natural.iter().chain(self.filled.iter()).map(|(_, w)| w).sum()
    }

    pub fn natural_log_weight(&self) -> f64 {
        self.natural.iter().map(|(_, w)| w).sum()
    }
}
