//! Flow graph of a single activity: alias resolution into an indexed DAG,
//! topological order, reachability, and per-peripheral move sequencing.

use super::ast::*;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub enum GNode {
    /// Index into `ActivitySpec::nodes`.
    Action(usize),
    Sync(String),
}

#[derive(Debug)]
pub struct ActivityGraph {
    pub nodes: Vec<GNode>,
    pub preds: Vec<Vec<usize>>,
    pub succs: Vec<Vec<usize>>,
    /// Topological order of all node indices; `None` when the flow is cyclic.
    pub topo: Option<Vec<usize>>,
}

impl ActivityGraph {
    pub fn build(act: &ActivitySpec) -> ActivityGraph {
        let mut index: BTreeMap<FlowNode, usize> = BTreeMap::new();
        let mut nodes = Vec::new();
        for (i, n) in act.nodes.iter().enumerate() {
            index.insert(FlowNode::Action(n.alias.clone()), nodes.len());
            nodes.push(GNode::Action(i));
        }
        for e in &act.flow {
            for fnode in [&e.from, &e.to] {
                if let FlowNode::Sync(s) = fnode {
                    index.entry(fnode.clone()).or_insert_with(|| {
                        nodes.push(GNode::Sync(s.clone()));
                        nodes.len() - 1
                    });
                }
            }
        }
        let mut preds = vec![Vec::new(); nodes.len()];
        let mut succs = vec![Vec::new(); nodes.len()];
        for e in &act.flow {
            let (Some(&f), Some(&t)) = (index.get(&e.from), index.get(&e.to)) else {
                continue; // unresolved aliases already rejected at parse
            };
            if !succs[f].contains(&t) {
                succs[f].push(t);
                preds[t].push(f);
            }
        }
        let topo = topo_sort(&succs, &preds);
        ActivityGraph { nodes, preds, succs, topo }
    }

    /// Activity-node index for each graph node that is an action.
    pub fn action_of(&self, g: usize) -> Option<usize> {
        match self.nodes[g] {
            GNode::Action(i) => Some(i),
            GNode::Sync(_) => None,
        }
    }

    /// Reachability: `reach[a]` contains `b` iff there is a nonempty path
    /// a -> ... -> b.
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        let n = self.nodes.len();
        let mut reach = vec![vec![false; n]; n];
        let order = self.topo.clone().unwrap_or_else(|| (0..n).collect());
        for &u in order.iter().rev() {
            for &v in &self.succs[u] {
                reach[u][v] = true;
                let (head, tail) = {
                    // borrow both rows
                    let (a, b) = if u < v {
                        let (l, r) = reach.split_at_mut(v);
                        (&mut l[u], &r[0])
                    } else {
                        let (l, r) = reach.split_at_mut(u);
                        (&mut r[0], &l[v])
                    };
                    (a, b)
                };
                for i in 0..n {
                    if tail[i] {
                        head[i] = true;
                    }
                }
            }
        }
        reach
    }
}

fn topo_sort(succs: &[Vec<usize>], preds: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = succs.len();
    let mut indeg: Vec<usize> = preds.iter().map(|p| p.len()).collect();
    let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    queue.sort();
    let mut out = Vec::with_capacity(n);
    let mut qi = 0;
    while qi < queue.len() {
        let u = queue[qi];
        qi += 1;
        out.push(u);
        for &v in &succs[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                queue.push(v);
            }
        }
    }
    if out.len() == n {
        Some(out)
    } else {
        None
    }
}

/// For every `Move` node (by activity-node index), the symbolic position the
/// peripheral starts from: the activity's prerequisite for its first move,
/// then the previous move's target. Requires the graph to be acyclic and the
/// peripheral's moves totally ordered; callers validate that first.
pub fn move_sources(act: &ActivitySpec, graph: &ActivityGraph) -> BTreeMap<usize, Option<String>> {
    let mut out = BTreeMap::new();
    let Some(topo) = &graph.topo else {
        return out;
    };
    let mut current: BTreeMap<(String, String), String> = BTreeMap::new();
    for p in &act.prerequisites {
        current.insert((p.resource.clone(), p.peripheral.clone()), p.position.clone());
    }
    for &g in topo {
        let Some(i) = graph.action_of(g) else { continue };
        if let ActionKind::Move { resource, peripheral, target, .. } = &act.nodes[i].kind {
            let key = (resource.clone(), peripheral.clone());
            out.insert(i, current.get(&key).cloned());
            current.insert(key, target.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse::parse_activities;

    const DIAMOND: &str = r#"
activity D {
  actions {
    C : claim R
    A : R.p.a
    B : R.p.b
    E : release R
  }
  action flow {
    C->|s->A->E
    |s->B->E
  }
}
"#;

    #[test]
    fn builds_diamond() {
        let acts = parse_activities("t", DIAMOND).unwrap();
        let g = ActivityGraph::build(&acts[0]);
        assert_eq!(g.nodes.len(), 5);
        assert!(g.topo.is_some());
        let reach = g.reachability();
        // claim reaches everything
        assert!(reach[0].iter().skip(1).all(|&b| b));
    }

    #[test]
    fn cycle_detected() {
        let acts = parse_activities(
            "t",
            "activity C { actions { A : R.p.a B : R.p.b } action flow { A->B->A } }",
        )
        .unwrap();
        let g = ActivityGraph::build(&acts[0]);
        assert!(g.topo.is_none());
    }
}
