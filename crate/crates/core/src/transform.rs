//! Model-to-model transformations.

use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::Serialize;

use crate::diagnostic::{Code, Diagnostic};
use crate::dynamics::Event;
use crate::model::{build_model, Decls, EdgeDecl, ElementRef, StageId, StageKind, TmModel};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RemovedCounts {
    pub release: usize,
    pub transfer: usize,
    pub receive: usize,
    pub arrive: usize,
    pub accept: usize,
}

impl RemovedCounts {
    fn bump(&mut self, kind: StageKind) {
        match kind {
            StageKind::Release => self.release += 1,
            StageKind::Transfer => self.transfer += 1,
            StageKind::Receive => self.receive += 1,
            StageKind::Arrive => self.arrive += 1,
            StageKind::Accept => self.accept += 1,
            StageKind::Create | StageKind::Process => unreachable!("never removed"),
        }
    }

    pub fn total(&self) -> usize {
        self.release + self.transfer + self.receive + self.arrive + self.accept
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DroppedTrigger {
    pub source: String,
    pub target: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SimplifyReport {
    pub removed: RemovedCounts,
    /// Direct flows added in place of collapsed paths.
    pub rewired: usize,
    pub dropped_triggers: Vec<DroppedTrigger>,
}

/// Nearest retained stage from `start` walking flows in the given direction
/// through removed stages only. Breadth-first, ties broken by flow order.
fn nearest_retained(model: &TmModel, start: StageId, forward: bool) -> Option<StageId> {
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        let next: Vec<StageId> = if forward {
            model.flows_out(s).iter().map(|f| model.flow(*f).target).collect()
        } else {
            model.flows_in(s).iter().map(|f| model.flow(*f).source).collect()
        };
        for n in next {
            if !model.stage(n).kind.is_movement() {
                return Some(n);
            }
            if seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    None
}

/// Removes every release, transfer, receive, arrive and accept stage.
///
/// For retained stages u and v joined by a flow path whose interior consists
/// only of removed stages, the result has a direct flow u -> v. Triggers
/// touching a removed stage are moved to the nearest retained flow
/// predecessor (source side) or successor (target side), or dropped when
/// there is none.
pub fn simplify(model: &TmModel) -> (TmModel, SimplifyReport) {
    let removed = |s: StageId| model.stage(s).kind.is_movement();
    let key = |s: StageId| model.stage(s).id.clone();
    let mut report = SimplifyReport::default();
    for s in model.stages() {
        if s.kind.is_movement() {
            report.removed.bump(s.kind);
        }
    }

    let mut decls: Decls = model.to_decls();
    decls.stages.retain(|s| !s.kind.is_movement());

    let mut flows: Vec<(StageId, StageId)> = model
        .flows()
        .iter()
        .filter(|f| !removed(f.source) && !removed(f.target))
        .map(|f| (f.source, f.target))
        .collect();
    let mut present: HashSet<(StageId, StageId)> = flows.iter().copied().collect();
    for u in model.stage_ids().filter(|s| !removed(*s)) {
        let mut seen = HashSet::new();
        let mut queue: VecDeque<StageId> = model
            .flows_out(u)
            .iter()
            .map(|f| model.flow(*f).target)
            .filter(|t| removed(*t))
            .collect();
        while let Some(s) = queue.pop_front() {
            if !seen.insert(s) {
                continue;
            }
            for f in model.flows_out(s) {
                let v = model.flow(*f).target;
                if removed(v) {
                    queue.push_back(v);
                } else if v != u && present.insert((u, v)) {
                    flows.push((u, v));
                    report.rewired += 1;
                }
            }
        }
    }
    decls.flows = flows.iter().map(|(u, v)| EdgeDecl::new(&key(*u), &key(*v))).collect();

    let mut triggers = Vec::new();
    let mut seen_triggers = HashSet::new();
    for t in model.triggers() {
        let source = if removed(t.source) { nearest_retained(model, t.source, false) } else { Some(t.source) };
        let target = if removed(t.target) { nearest_retained(model, t.target, true) } else { Some(t.target) };
        let drop = |reason: &str| DroppedTrigger {
            source: key(t.source),
            target: key(t.target),
            reason: reason.to_string(),
        };
        match (source, target) {
            (None, _) => report.dropped_triggers.push(drop("no retained stage flows into the source")),
            (_, None) => report.dropped_triggers.push(drop("no retained stage follows the target")),
            (Some(s), Some(g)) if s == g => {
                report.dropped_triggers.push(drop("re-anchored trigger would loop on one stage"))
            }
            (Some(s), Some(g)) => {
                if seen_triggers.insert((s, g)) {
                    triggers.push(EdgeDecl::new(&key(s), &key(g)));
                } else {
                    report.dropped_triggers.push(drop("duplicates another trigger after re-anchoring"));
                }
            }
        }
    }
    decls.triggers = triggers;

    let simplified = build_model(decls).expect("simplification preserves structural validity");
    (simplified, report)
}

/// Fixed palette, cycled in event declaration order.
pub const PALETTE: [&str; 8] = [
    "yellow",
    "orange",
    "lightblue",
    "palegreen",
    "pink",
    "plum",
    "khaki",
    "lightsalmon",
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OverlaySpec {
    /// Event id to palette color.
    pub assignments: BTreeMap<String, &'static str>,
}

impl OverlaySpec {
    pub fn for_events(events: &[Event]) -> Self {
        OverlaySpec {
            assignments: events
                .iter()
                .enumerate()
                .map(|(i, e)| (e.id.clone(), PALETTE[i % PALETTE.len()]))
                .collect(),
        }
    }
}

/// A model with the colors of the events covering each element. The model
/// itself is borrowed untouched.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overlay<'m> {
    pub model: &'m TmModel,
    stage_colors: Vec<Vec<&'static str>>,
    flow_colors: Vec<Vec<&'static str>>,
    trigger_colors: Vec<Vec<&'static str>>,
}

impl<'m> Overlay<'m> {
    pub fn empty(model: &'m TmModel) -> Self {
        Overlay {
            model,
            stage_colors: vec![Vec::new(); model.stages().len()],
            flow_colors: vec![Vec::new(); model.flows().len()],
            trigger_colors: vec![Vec::new(); model.triggers().len()],
        }
    }

    pub fn colors(&self, element: ElementRef) -> &[&'static str] {
        match element {
            ElementRef::Stage(s) => &self.stage_colors[s.0],
            ElementRef::Flow(f) => &self.flow_colors[f.0],
            ElementRef::Trigger(t) => &self.trigger_colors[t.0],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.stage_colors
            .iter()
            .chain(&self.flow_colors)
            .chain(&self.trigger_colors)
            .all(Vec::is_empty)
    }

    /// Distinct colors used, in first-use order.
    pub fn palette_used(&self) -> Vec<&'static str> {
        let mut used = Vec::new();
        for c in self
            .stage_colors
            .iter()
            .chain(&self.flow_colors)
            .chain(&self.trigger_colors)
            .flatten()
        {
            if !used.contains(c) {
                used.push(*c);
            }
        }
        used
    }
}

/// Colors every element by the events whose region contains it. Elements in
/// several regions carry all their colors in event declaration order.
pub fn overlay<'m>(model: &'m TmModel, events: &[Event], spec: &OverlaySpec) -> Result<Overlay<'m>, Diagnostic> {
    for id in spec.assignments.keys() {
        if !events.iter().any(|e| &e.id == id) {
            return Err(Diagnostic::new(Code::RefUnresolved, id, format!("unknown event `{id}`")));
        }
    }
    let mut out = Overlay::empty(model);
    for e in events {
        let Some(color) = spec.assignments.get(&e.id) else { continue };
        for el in &e.region {
            let slot = match el {
                ElementRef::Stage(s) => &mut out.stage_colors[s.0],
                ElementRef::Flow(f) => &mut out.flow_colors[f.0],
                ElementRef::Trigger(t) => &mut out.trigger_colors[t.0],
            };
            if !slot.contains(color) {
                slot.push(color);
            }
        }
    }
    Ok(out)
}
