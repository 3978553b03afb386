//! Events: named regions of the static model.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::diagnostic::{Code, Diagnostic};
use crate::model::{ElementRef, StageId, TmModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventLevel {
    Elementary,
    Composite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub id: String,
    pub name: String,
    pub description: Option<String>,
    pub region: BTreeSet<ElementRef>,
    pub level: EventLevel,
    /// Ids of lower-level events (composite only). An id that is not the id
    /// of another declared event names the elementary event of the stage with
    /// that key.
    pub constituents: Vec<String>,
}

impl Event {
    pub fn region_stages(&self) -> impl Iterator<Item = StageId> + '_ {
        self.region.iter().filter_map(|e| match e {
            ElementRef::Stage(s) => Some(*s),
            _ => None,
        })
    }

    pub fn contains_stage(&self, stage: StageId) -> bool {
        self.region.contains(&ElementRef::Stage(stage))
    }

    /// The single stage of an elementary event.
    pub fn stage(&self) -> Option<StageId> {
        match self.level {
            EventLevel::Elementary => self.region_stages().next(),
            EventLevel::Composite => None,
        }
    }
}

/// One elementary event per stage, in stage order. Each event's id and name
/// are the stage key.
pub fn elementary_events(model: &TmModel) -> Vec<Event> {
    model
        .stage_ids()
        .map(|s| elementary_for(model, s, BTreeSet::new()))
        .collect()
}

fn elementary_for(model: &TmModel, stage: StageId, edges: BTreeSet<ElementRef>) -> Event {
    let key = model.stage(stage).id.clone();
    let mut region = edges;
    region.insert(ElementRef::Stage(stage));
    Event {
        id: key.clone(),
        name: key,
        description: None,
        region,
        level: EventLevel::Elementary,
        constituents: Vec::new(),
    }
}

fn endpoints(model: &TmModel, e: ElementRef) -> Option<(StageId, StageId)> {
    match e {
        ElementRef::Stage(_) => None,
        ElementRef::Flow(f) => {
            let f = model.flow(f);
            Some((f.source, f.target))
        }
        ElementRef::Trigger(t) => {
            let t = model.trigger(t);
            Some((t.source, t.target))
        }
    }
}

fn element_exists(model: &TmModel, e: ElementRef) -> bool {
    match e {
        ElementRef::Stage(s) => s.0 < model.stages().len(),
        ElementRef::Flow(f) => f.0 < model.flows().len(),
        ElementRef::Trigger(t) => t.0 < model.triggers().len(),
    }
}

/// Whether the region's elements form one weakly connected piece of the
/// flow+trigger graph. Stages are joined by any model edge between them; an
/// edge element is joined to whichever of its endpoints lie in the region.
pub fn region_is_connected(model: &TmModel, region: &BTreeSet<ElementRef>) -> bool {
    let elems: Vec<ElementRef> = region.iter().copied().collect();
    if elems.len() <= 1 {
        return true;
    }
    let pos: HashMap<ElementRef, usize> = elems.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let mut adj = vec![Vec::new(); elems.len()];
    let mut link = |a: usize, b: usize| {
        adj[a].push(b);
        adj[b].push(a);
    };
    let edges = model
        .flow_ids()
        .map(ElementRef::Flow)
        .chain(model.trigger_ids().map(ElementRef::Trigger));
    for e in edges {
        let (s, t) = endpoints(model, e).unwrap();
        let ps = pos.get(&ElementRef::Stage(s)).copied();
        let pt = pos.get(&ElementRef::Stage(t)).copied();
        if let (Some(a), Some(b)) = (ps, pt) {
            link(a, b);
        }
        if let Some(&pe) = pos.get(&e) {
            for p in [ps, pt].into_iter().flatten() {
                link(pe, p);
            }
        }
    }
    let mut seen = vec![false; elems.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for &j in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Defines an event over `region`, optionally built from `constituents`.
///
/// A region holding exactly one stage (plus edges incident to it) and no
/// constituents is elementary. Anything else is composite: its constituents
/// are the given events plus one elementary event per region stage they do
/// not already cover, and its region is the union of theirs.
///
/// Returns the event with any warnings, or the blocking error.
pub fn define_event(
    model: &TmModel,
    name: &str,
    region: &[ElementRef],
    constituents: &[&Event],
) -> Result<(Event, Vec<Diagnostic>), Diagnostic> {
    for e in region {
        if !element_exists(model, *e) {
            return Err(Diagnostic::new(
                Code::RefUnresolved,
                name,
                format!("event `{name}` refers to an element outside the model"),
            ));
        }
    }
    for c in constituents {
        if let Some(e) = c.region.iter().find(|e| !element_exists(model, **e)) {
            return Err(Diagnostic::new(
                Code::RefUnresolved,
                name,
                format!("constituent `{}` refers to a missing element {e:?}", c.id),
            ));
        }
    }
    let mut warnings = Vec::new();
    let given: BTreeSet<ElementRef> = region.iter().copied().collect();
    let stages: BTreeSet<StageId> = given
        .iter()
        .filter_map(|e| match e {
            ElementRef::Stage(s) => Some(*s),
            _ => None,
        })
        .collect();
    if stages.is_empty() && constituents.is_empty() {
        return Err(Diagnostic::new(
            Code::RegionEmpty,
            name,
            format!("event `{name}` has no stage in its region"),
        ));
    }

    // Edges must hang off a region stage to belong to some constituent.
    let mut attached: HashMap<StageId, BTreeSet<ElementRef>> = HashMap::new();
    for e in given.iter().copied() {
        let Some((s, t)) = endpoints(model, e) else { continue };
        let owner = [s, t].into_iter().find(|x| stages.contains(x));
        match owner {
            Some(o) => {
                attached.entry(o).or_default().insert(e);
            }
            None => warnings.push(Diagnostic::new(
                Code::RegionDisconnected,
                name,
                format!(
                    "`{}` touches no stage of event `{name}` and was left out of its region",
                    model.element_key(e)
                ),
            )),
        }
    }

    let event = if constituents.is_empty() && stages.len() == 1 {
        let s = *stages.iter().next().unwrap();
        let mut ev = elementary_for(model, s, attached.remove(&s).unwrap_or_default());
        ev.id = name.to_string();
        ev.name = name.to_string();
        ev
    } else {
        let mut region = BTreeSet::new();
        let mut ids = Vec::new();
        for c in constituents {
            region.extend(c.region.iter().copied());
            ids.push(c.id.clone());
        }
        for s in stages {
            let edges = attached.remove(&s).unwrap_or_default();
            if constituents.iter().any(|c| c.contains_stage(s)) && edges.is_empty() {
                continue;
            }
            let ev = elementary_for(model, s, edges);
            region.extend(ev.region.iter().copied());
            if !ids.contains(&ev.id) {
                ids.push(ev.id);
            }
        }
        Event {
            id: name.to_string(),
            name: name.to_string(),
            description: None,
            region,
            level: EventLevel::Composite,
            constituents: ids,
        }
    };

    if !region_is_connected(model, &event.region) {
        warnings.push(Diagnostic::new(
            Code::RegionDisconnected,
            name,
            format!("the region of event `{name}` is not connected"),
        ));
    }
    Ok((event, warnings))
}
