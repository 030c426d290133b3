//! Bottom-up propagation over the call graph's strongly connected components.

use std::collections::{BTreeSet, HashMap};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::resolve::{FunctionId, ResolvedFacts};
use super::{Reason, Status, Verdict};

/// Merges each function's own reasons with everything reachable from it.
/// Members of one cycle share the merged set. `ids[i]` owns `facts[i]`.
pub fn propagate(ids: &[FunctionId], facts: &[ResolvedFacts]) -> Vec<Verdict> {
    let index: HashMap<FunctionId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let mut g = DiGraph::<usize, ()>::with_capacity(ids.len(), 0);
    let nodes: Vec<NodeIndex> = (0..ids.len()).map(|i| g.add_node(i)).collect();
    for (i, f) in facts.iter().enumerate() {
        for c in &f.callees {
            if let Some(&j) = index.get(c) {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }

    // Components come out callees-first.
    let mut merged: Vec<Option<BTreeSet<Reason>>> = vec![None; ids.len()];
    for scc in tarjan_scc(&g) {
        let members: Vec<usize> = scc.iter().map(|n| g[*n]).collect();
        let mut set = BTreeSet::new();
        for &m in &members {
            set.extend(facts[m].reasons.iter().cloned());
            for c in &facts[m].callees {
                let Some(&j) = index.get(c) else { continue };
                if let Some(done) = &merged[j] {
                    set.extend(done.iter().cloned());
                }
            }
        }
        for &m in &members {
            merged[m] = Some(set.clone());
        }
    }

    let merged: Vec<BTreeSet<Reason>> = merged.into_iter().map(Option::unwrap_or_default).collect();
    let status: Vec<Status> = merged.iter().map(|m| Status::of_reasons(m)).collect();
    (0..ids.len())
        .map(|i| {
            let (mut own, inherited): (Vec<Reason>, Vec<Reason>) =
                merged[i].iter().cloned().partition(|r| r.origin == ids[i]);
            own.sort_by(|a, b| (a.loc, a.kind).cmp(&(b.loc, b.kind)));
            own.extend(inherited);
            let via = facts[i]
                .callees
                .iter()
                .filter(|c| **c != ids[i])
                .filter(|c| index.get(c).is_some_and(|&j| status[j] != Status::Functional))
                .copied()
                .collect();
            Verdict { status: status[i], reasons: own, via }
        })
        .collect()
}
