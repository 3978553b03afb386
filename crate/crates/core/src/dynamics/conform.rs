//! Conformance of simulated traces to behavior graphs.

use std::collections::HashMap;

use serde::Serialize;

use super::behavior::BehaviorGraph;
use super::sim::Trace;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Conformance {
    pub ok: bool,
    /// `(before, after)`: the declared precedence broken first.
    pub violation: Option<(String, String)>,
}

/// Checks that the firing order of the graph's events in `trace` is a linear
/// extension of the graph's precedence, restricted to the events that fired.
///
/// Repeated firings are grouped into rounds: the k-th firings of all events
/// form round k, and each round is checked on its own. An event may fire more
/// than once only if it lies on a cycle closed by a `repeat` edge, and for a
/// repeat edge `Y -> X` the (k+1)-th firing of X must follow the k-th firing
/// of Y.
pub fn conforms(trace: &Trace, graph: &BehaviorGraph) -> Conformance {
    let idx: HashMap<&str, usize> =
        graph.nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let seq: Vec<usize> = trace
        .fired_events()
        .into_iter()
        .filter_map(|e| idx.get(e).copied())
        .collect();
    check_sequence(&seq, graph)
}

pub(crate) fn check_sequence(seq: &[usize], graph: &BehaviorGraph) -> Conformance {
    let n = graph.nodes.len();
    let idx: HashMap<&str, usize> =
        graph.nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let order = graph.precedence();

    let mut full = vec![Vec::new(); n];
    for e in &graph.edges {
        full[idx[e.before.as_str()]].push(idx[e.after.as_str()]);
    }
    let on_cycle: Vec<bool> = (0..n)
        .map(|start| {
            let mut seen = vec![false; n];
            let mut stack = full[start].clone();
            while let Some(x) = stack.pop() {
                if x == start {
                    return true;
                }
                if !seen[x] {
                    seen[x] = true;
                    stack.extend(full[x].iter().copied());
                }
            }
            false
        })
        .collect();
    let mut repeats_into = vec![Vec::new(); n];
    for e in graph.edges.iter().filter(|e| e.repeat) {
        repeats_into[idx[e.after.as_str()]].push(idx[e.before.as_str()]);
    }

    let mut positions = vec![Vec::new(); n];
    for (i, &x) in seq.iter().enumerate() {
        positions[x].push(i);
    }
    let fail = |a: usize, b: usize| Conformance {
        ok: false,
        violation: Some((graph.nodes[a].clone(), graph.nodes[b].clone())),
    };

    let mut seen = vec![0usize; n];
    for (i, &x) in seq.iter().enumerate() {
        seen[x] += 1;
        let k = seen[x];
        if k >= 2 && !on_cycle[x] {
            return fail(x, x);
        }
        for a in 0..n {
            if order[a][x] && positions[a].len() >= k && positions[a][k - 1] > i {
                return fail(a, x);
            }
        }
        if k >= 2 {
            for &y in &repeats_into[x] {
                if positions[y].get(k - 2).is_none_or(|&p| p > i) {
                    return fail(y, x);
                }
            }
        }
    }
    Conformance { ok: true, violation: None }
}
