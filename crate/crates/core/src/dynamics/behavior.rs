//! Behavior graphs: declared chronologies of events.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::events::Event;
use crate::diagnostic::{Code, Diagnostic, Span, ValidationReport};
use crate::model::{ElementRef, TmModel};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BehaviorEdge {
    pub before: String,
    pub after: String,
    /// Marks a back-edge that lets the chronology start over.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub repeat: bool,
    #[serde(skip)]
    pub span: Option<Span>,
}

impl BehaviorEdge {
    pub fn new(before: &str, after: &str) -> Self {
        BehaviorEdge {
            before: before.to_string(),
            after: after.to_string(),
            repeat: false,
            span: None,
        }
    }

    pub fn repeating(before: &str, after: &str) -> Self {
        BehaviorEdge {
            repeat: true,
            ..Self::new(before, after)
        }
    }

    pub fn key(&self) -> String {
        format!("{} -> {}", self.before, self.after)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BehaviorGraph {
    /// Event ids in order of first mention.
    pub nodes: Vec<String>,
    pub edges: Vec<BehaviorEdge>,
}

impl BehaviorGraph {
    pub fn from_edges(edges: Vec<BehaviorEdge>) -> Self {
        let mut nodes: Vec<String> = Vec::new();
        for e in &edges {
            for n in [&e.before, &e.after] {
                if !nodes.contains(n) {
                    nodes.push(n.clone());
                }
            }
        }
        BehaviorGraph { nodes, edges }
    }

    /// A plain chain `ids[0] -> ids[1] -> ...`.
    pub fn chain(ids: &[&str]) -> Self {
        Self::from_edges(ids.windows(2).map(|w| BehaviorEdge::new(w[0], w[1])).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Node indices reachable from `from` along non-repeat edges, excluding
    /// `from` unless it lies on a cycle.
    pub(crate) fn successors(&self) -> Vec<Vec<usize>> {
        let idx: HashMap<&str, usize> =
            self.nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut succ = vec![Vec::new(); self.nodes.len()];
        for e in self.edges.iter().filter(|e| !e.repeat) {
            succ[idx[e.before.as_str()]].push(idx[e.after.as_str()]);
        }
        succ
    }

    /// `closure[a][b]` is true when `a` must precede `b` (non-repeat edges,
    /// transitively).
    pub fn precedence(&self) -> Vec<Vec<bool>> {
        let succ = self.successors();
        let n = self.nodes.len();
        let mut closure = vec![vec![false; n]; n];
        for (start, row) in closure.iter_mut().enumerate() {
            let mut stack = succ[start].clone();
            while let Some(x) = stack.pop() {
                if !row[x] {
                    row[x] = true;
                    stack.extend(succ[x].iter().copied());
                }
            }
        }
        closure
    }
}

fn element_successors(model: &TmModel, e: ElementRef) -> Vec<ElementRef> {
    match e {
        ElementRef::Stage(s) => model
            .flows_out(s)
            .iter()
            .map(|f| ElementRef::Flow(*f))
            .chain(model.triggers_out(s).iter().map(|t| ElementRef::Trigger(*t)))
            .collect(),
        ElementRef::Flow(f) => vec![ElementRef::Stage(model.flow(f).target)],
        ElementRef::Trigger(t) => vec![ElementRef::Stage(model.trigger(t).target)],
    }
}

/// Whether some element of `from` reaches some element of `to` along flows
/// and triggers. Overlapping regions count as connected.
pub fn region_reaches(model: &TmModel, from: &Event, to: &Event) -> bool {
    let mut seen: HashSet<ElementRef> = from.region.iter().copied().collect();
    let mut queue: VecDeque<ElementRef> = from.region.iter().copied().collect();
    while let Some(e) = queue.pop_front() {
        if to.region.contains(&e) {
            return true;
        }
        for n in element_successors(model, e) {
            if seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    false
}

/// Checks a behavior graph against the model: endpoints must be declared
/// events, ordinary edges must not form a cycle, and for every ordinary edge
/// A -> B the static model must let something flow or trigger from A's region
/// into B's. Repeat edges only need resolvable endpoints.
pub fn check_behavior(model: &TmModel, events: &[Event], graph: &BehaviorGraph) -> ValidationReport {
    let by_id: HashMap<&str, &Event> = events.iter().map(|e| (e.id.as_str(), e)).collect();
    let mut diags = Vec::new();
    let mut resolved = true;
    for edge in &graph.edges {
        for end in [&edge.before, &edge.after] {
            if !by_id.contains_key(end.as_str()) {
                resolved = false;
                diags.push(
                    Diagnostic::new(
                        Code::RefUnresolved,
                        edge.key(),
                        format!("behavior refers to undeclared event `{end}`"),
                    )
                    .with_span(edge.span),
                );
            }
        }
    }
    if !resolved {
        return ValidationReport::new(diags);
    }

    let closure = graph.precedence();
    let idx: HashMap<&str, usize> =
        graph.nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    for edge in graph.edges.iter().filter(|e| !e.repeat) {
        let (a, b) = (idx[edge.before.as_str()], idx[edge.after.as_str()]);
        if a == b || closure[b][a] {
            diags.push(
                Diagnostic::new(
                    Code::BehaviorInconsistent,
                    edge.key(),
                    "edge closes a cycle that is not marked `repeat`",
                )
                .with_span(edge.span),
            );
            continue;
        }
        let (from, to) = (by_id[edge.before.as_str()], by_id[edge.after.as_str()]);
        if !region_reaches(model, from, to) {
            diags.push(
                Diagnostic::new(
                    Code::BehaviorInconsistent,
                    edge.key(),
                    format!(
                        "nothing flows or triggers from the region of `{}` to the region of `{}`",
                        edge.before, edge.after
                    ),
                )
                .with_span(edge.span),
            );
        }
    }
    ValidationReport::new(diags)
}
