//! Bayes-ball requisite classification, a brute-force d-separation check, and
//! evidence bases.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::analysis::{GroundDag, NodeId};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Classification {
    /// Observed nodes marked on top (E⋆).
    pub diagnostic: BTreeSet<NodeId>,
    /// Observed nodes visited but not marked on top.
    pub predictive: BTreeSet<NodeId>,
    /// Unobserved nodes marked on top, query included.
    pub requisite_unobserved: BTreeSet<NodeId>,
}

/// Run the four Bayes-ball rules starting from the query nodes as if visited from a child.
pub fn classify(dag: &GroundDag, query: &[NodeId], evidence: &HashSet<NodeId>) -> Result<Classification> {
    let n = dag.len();
    if let Some(&bad) = query.iter().chain(evidence.iter()).find(|&&x| x >= n) {
        return Err(Error::UnknownRv(format!("node {bad}")));
    }
    let mut top = vec![false; n];
    let mut bottom = vec![false; n];
    let mut visited = vec![false; n];
    // (node, visited from child)
    let mut queue: VecDeque<(NodeId, bool)> = query.iter().map(|&q| (q, true)).collect();
    while let Some((j, from_child)) = queue.pop_front() {
        visited[j] = true;
        let observed = evidence.contains(&j);
        if from_child {
            if observed {
                continue;
            }
            if !top[j] {
                top[j] = true;
                queue.extend(dag.parents[j].iter().map(|&p| (p, true)));
            }
            if !bottom[j] {
                bottom[j] = true;
                queue.extend(dag.children[j].iter().map(|&c| (c, false)));
            }
        } else if observed {
            if !top[j] {
                top[j] = true;
                queue.extend(dag.parents[j].iter().map(|&p| (p, true)));
            }
        } else if !bottom[j] {
            bottom[j] = true;
            queue.extend(dag.children[j].iter().map(|&c| (c, false)));
        }
    }
    let mut out = Classification::default();
    for j in 0..n {
        match (evidence.contains(&j), top[j], visited[j]) {
            (true, true, _) => {
                out.diagnostic.insert(j);
            }
            (true, false, true) => {
                out.predictive.insert(j);
            }
            (false, true, _) => {
                out.requisite_unobserved.insert(j);
            }
            _ => {}
        }
    }
    Ok(out)
}

fn descendants_hit(dag: &GroundDag, m: NodeId, z: &HashSet<NodeId>) -> bool {
    let mut seen = HashSet::new();
    let mut stack = vec![m];
    while let Some(u) = stack.pop() {
        if z.contains(&u) {
            return true;
        }
        if seen.insert(u) {
            stack.extend(dag.children[u].iter().copied());
        }
    }
    false
}

/// True iff every undirected simple path between `x` and `y` is blocked by `z`.
/// Exhaustive; meant for small graphs.
pub fn dsep(dag: &GroundDag, x: &[NodeId], y: &[NodeId], z: &[NodeId]) -> bool {
    let z: HashSet<NodeId> = z.iter().copied().collect();
    let y: HashSet<NodeId> = y.iter().copied().collect();
    let n = dag.len();
    let collider_open: Vec<bool> = (0..n).map(|m| descendants_hit(dag, m, &z)).collect();
    let into = |a: NodeId, b: NodeId| dag.parents[b].contains(&a);

    // Depth-first over simple paths, checking each interior node as soon as its successor is known.
    fn walk(
        path: &mut Vec<NodeId>,
        on_path: &mut Vec<bool>,
        y: &HashSet<NodeId>,
        z: &HashSet<NodeId>,
        open: &[bool],
        nb: &dyn Fn(NodeId) -> Vec<NodeId>,
        into: &dyn Fn(NodeId, NodeId) -> bool,
    ) -> bool {
        let u = *path.last().unwrap();
        for v in nb(u) {
            if on_path[v] {
                continue;
            }
            if path.len() >= 2 {
                let p = path[path.len() - 2];
                let collider = into(p, u) && into(v, u);
                let active = if collider { open[u] } else { !z.contains(&u) };
                if !active {
                    continue;
                }
            }
            if y.contains(&v) {
                return true;
            }
            path.push(v);
            on_path[v] = true;
            let found = walk(path, on_path, y, z, open, nb, into);
            on_path[v] = false;
            path.pop();
            if found {
                return true;
            }
        }
        false
    }

    let nb = |u: NodeId| dag.parents[u].iter().chain(dag.children[u].iter()).copied().collect::<Vec<_>>();
    for &s in x {
        if y.contains(&s) {
            return false;
        }
        let mut on_path = vec![false; n];
        on_path[s] = true;
        let mut path = vec![s];
        if walk(&mut path, &mut on_path, &y, &z, &collider_open, &nb, &into) {
            return false;
        }
    }
    true
}

/// Unobserved ancestors of `e` reachable through parent links without passing an observed node.
pub fn basis(dag: &GroundDag, evidence: &HashSet<NodeId>, e: NodeId) -> BTreeSet<NodeId> {
    let mut out = BTreeSet::new();
    let mut stack: Vec<NodeId> = dag.parents[e].clone();
    while let Some(p) = stack.pop() {
        if evidence.contains(&p) || !out.insert(p) {
            continue;
        }
        stack.extend(dag.parents[p].iter().copied());
    }
    out
}
