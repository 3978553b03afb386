//! The TM metamodel: thimacs, stages, flows and triggers.
//!
//! Models are assembled from raw declarations with [`build_model`], which
//! checks referential integrity, containment acyclicity and name uniqueness and
//! reports every problem it finds. A successfully built [`TmModel`] is
//! immutable.
//!
//! Declaration order is canonicalised on build: thimacs are kept in preorder
//! of the containment forest and stages are grouped by owner in that same
//! order. Flows and triggers keep their declaration order.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagnostic::{Code, Diagnostic, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageKind {
    Create,
    Process,
    Release,
    Transfer,
    Receive,
    Arrive,
    Accept,
}

impl StageKind {
    pub const ALL: [StageKind; 7] = [
        StageKind::Create,
        StageKind::Process,
        StageKind::Release,
        StageKind::Transfer,
        StageKind::Receive,
        StageKind::Arrive,
        StageKind::Accept,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StageKind::Create => "create",
            StageKind::Process => "process",
            StageKind::Release => "release",
            StageKind::Transfer => "transfer",
            StageKind::Receive => "receive",
            StageKind::Arrive => "arrive",
            StageKind::Accept => "accept",
        }
    }

    pub fn parse(s: &str) -> Option<StageKind> {
        StageKind::ALL.into_iter().find(|k| k.as_str() == s)
    }

    /// Kinds removed by simplification.
    pub fn is_movement(self) -> bool {
        matches!(
            self,
            StageKind::Release
                | StageKind::Transfer
                | StageKind::Receive
                | StageKind::Arrive
                | StageKind::Accept
        )
    }

    /// Kinds a trigger may activate.
    pub fn is_triggerable(self) -> bool {
        matches!(self, StageKind::Create | StageKind::Process)
    }
}

impl fmt::Display for StageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Legal-flow table.
///
/// Within one thimac a thing moves create/receive -> process -> release ->
/// transfer, with arrive -> accept as the refined input chain (accept stands
/// in for receive). Across thimacs only transfer -> transfer is allowed.
pub fn flow_is_legal(source: StageKind, target: StageKind, same_owner: bool) -> bool {
    use StageKind::*;
    if !same_owner {
        return source == Transfer && target == Transfer;
    }
    matches!(
        (source, target),
        (Create, Process)
            | (Create, Release)
            | (Receive, Process)
            | (Receive, Release)
            | (Accept, Process)
            | (Accept, Release)
            | (Process, Release)
            | (Process, Process)
            | (Release, Transfer)
            | (Transfer, Receive)
            | (Transfer, Arrive)
            | (Arrive, Accept)
    )
}

macro_rules! index_id {
    ($name:ident) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub usize);

        impl $name {
            pub fn index(self) -> usize {
                self.0
            }
        }
    };
}

index_id!(ThimacId);
index_id!(StageId);
index_id!(FlowId);
index_id!(TriggerId);

/// A reference to a model element that can appear in an event region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementRef {
    Stage(StageId),
    Flow(FlowId),
    Trigger(TriggerId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thimac {
    /// Dotted path from the grand thimac, e.g. `Water.Heat`.
    pub id: String,
    pub name: String,
    pub parent: Option<ThimacId>,
    pub children: Vec<ThimacId>,
    pub stages: Vec<StageId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    /// Stage key, e.g. `Water.Heat.process` or `Cutter.process(dough)`.
    pub id: String,
    pub kind: StageKind,
    pub owner: ThimacId,
    pub label: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FlowEdge {
    pub source: StageId,
    pub target: StageId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TriggerEdge {
    pub source: StageId,
    pub target: StageId,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Adjacency {
    flows_out: Vec<Vec<FlowId>>,
    flows_in: Vec<Vec<FlowId>>,
    triggers_out: Vec<Vec<TriggerId>>,
    triggers_in: Vec<Vec<TriggerId>>,
}

/// The grand thimac: every parentless thimac hangs off an implicit root.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TmModel {
    thimacs: Vec<Thimac>,
    stages: Vec<Stage>,
    flows: Vec<FlowEdge>,
    triggers: Vec<TriggerEdge>,
    stage_index: HashMap<String, StageId>,
    thimac_index: HashMap<String, ThimacId>,
    adj: Adjacency,
}

impl TmModel {
    pub fn thimacs(&self) -> &[Thimac] {
        &self.thimacs
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn flows(&self) -> &[FlowEdge] {
        &self.flows
    }

    pub fn triggers(&self) -> &[TriggerEdge] {
        &self.triggers
    }

    pub fn thimac(&self, id: ThimacId) -> &Thimac {
        &self.thimacs[id.0]
    }

    pub fn stage(&self, id: StageId) -> &Stage {
        &self.stages[id.0]
    }

    pub fn flow(&self, id: FlowId) -> FlowEdge {
        self.flows[id.0]
    }

    pub fn trigger(&self, id: TriggerId) -> TriggerEdge {
        self.triggers[id.0]
    }

    pub fn stage_ids(&self) -> impl Iterator<Item = StageId> + '_ {
        (0..self.stages.len()).map(StageId)
    }

    pub fn flow_ids(&self) -> impl Iterator<Item = FlowId> + '_ {
        (0..self.flows.len()).map(FlowId)
    }

    pub fn trigger_ids(&self) -> impl Iterator<Item = TriggerId> + '_ {
        (0..self.triggers.len()).map(TriggerId)
    }

    /// Top-level thimacs, children of the implicit grand thimac.
    pub fn roots(&self) -> impl Iterator<Item = ThimacId> + '_ {
        self.thimacs
            .iter()
            .enumerate()
            .filter(|(_, t)| t.parent.is_none())
            .map(|(i, _)| ThimacId(i))
    }

    pub fn find_stage(&self, key: &str) -> Option<StageId> {
        self.stage_index.get(key).copied()
    }

    pub fn find_thimac(&self, path: &str) -> Option<ThimacId> {
        self.thimac_index.get(path).copied()
    }

    pub fn find_flow(&self, source: StageId, target: StageId) -> Option<FlowId> {
        self.adj.flows_out[source.0]
            .iter()
            .copied()
            .find(|f| self.flows[f.0].target == target)
    }

    pub fn find_trigger(&self, source: StageId, target: StageId) -> Option<TriggerId> {
        self.adj.triggers_out[source.0]
            .iter()
            .copied()
            .find(|t| self.triggers[t.0].target == target)
    }

    pub fn flows_out(&self, stage: StageId) -> &[FlowId] {
        &self.adj.flows_out[stage.0]
    }

    pub fn flows_in(&self, stage: StageId) -> &[FlowId] {
        &self.adj.flows_in[stage.0]
    }

    pub fn triggers_out(&self, stage: StageId) -> &[TriggerId] {
        &self.adj.triggers_out[stage.0]
    }

    pub fn triggers_in(&self, stage: StageId) -> &[TriggerId] {
        &self.adj.triggers_in[stage.0]
    }

    pub fn same_owner(&self, a: StageId, b: StageId) -> bool {
        self.stages[a.0].owner == self.stages[b.0].owner
    }

    /// Stable string identifier used in diagnostics, JSON and DOT.
    pub fn element_key(&self, element: ElementRef) -> String {
        match element {
            ElementRef::Stage(s) => self.stages[s.0].id.clone(),
            ElementRef::Flow(f) => {
                let e = self.flows[f.0];
                flow_key(&self.stages[e.source.0].id, &self.stages[e.target.0].id)
            }
            ElementRef::Trigger(t) => {
                let e = self.triggers[t.0];
                trigger_key(&self.stages[e.source.0].id, &self.stages[e.target.0].id)
            }
        }
    }

    /// Resolves a key produced by [`TmModel::element_key`].
    pub fn find_element(&self, key: &str) -> Option<ElementRef> {
        if let Some((a, b)) = key.split_once(" -> ") {
            let (a, b) = (self.find_stage(a)?, self.find_stage(b)?);
            return self.find_flow(a, b).map(ElementRef::Flow);
        }
        if let Some((a, b)) = key.split_once(" ~> ") {
            let (a, b) = (self.find_stage(a)?, self.find_stage(b)?);
            return self.find_trigger(a, b).map(ElementRef::Trigger);
        }
        self.find_stage(key).map(ElementRef::Stage)
    }

    pub fn is_empty(&self) -> bool {
        self.thimacs.is_empty()
    }

    /// Raw declarations equivalent to this model; `build_model` on them
    /// reproduces the model.
    pub fn to_decls(&self) -> Decls {
        Decls {
            thimacs: self
                .thimacs
                .iter()
                .map(|t| ThimacDecl {
                    id: t.id.clone(),
                    name: t.name.clone(),
                    parent: t.parent.map(|p| self.thimacs[p.0].id.clone()),
                    span: None,
                })
                .collect(),
            stages: self
                .stages
                .iter()
                .map(|s| StageDecl {
                    id: s.id.clone(),
                    kind: s.kind,
                    owner: self.thimacs[s.owner.0].id.clone(),
                    label: s.label.clone(),
                    span: None,
                })
                .collect(),
            flows: self
                .flows
                .iter()
                .map(|e| EdgeDecl::new(&self.stages[e.source.0].id, &self.stages[e.target.0].id))
                .collect(),
            triggers: self
                .triggers
                .iter()
                .map(|e| EdgeDecl::new(&self.stages[e.source.0].id, &self.stages[e.target.0].id))
                .collect(),
        }
    }

    pub fn to_doc(&self) -> ModelDoc {
        let stage_ids = |ids: &[StageId]| ids.iter().map(|s| self.stages[s.0].id.clone()).collect();
        ModelDoc {
            thimacs: self
                .thimacs
                .iter()
                .map(|t| ThimacDoc {
                    id: t.id.clone(),
                    name: t.name.clone(),
                    parent: t.parent.map(|p| self.thimacs[p.0].id.clone()),
                    children: t.children.iter().map(|c| self.thimacs[c.0].id.clone()).collect(),
                    stages: stage_ids(&t.stages),
                })
                .collect(),
            stages: self
                .stages
                .iter()
                .map(|s| StageDoc {
                    id: s.id.clone(),
                    kind: s.kind,
                    owner: self.thimacs[s.owner.0].id.clone(),
                    label: s.label.clone(),
                })
                .collect(),
            flows: self
                .flows
                .iter()
                .map(|e| EdgeDoc {
                    source: self.stages[e.source.0].id.clone(),
                    target: self.stages[e.target.0].id.clone(),
                })
                .collect(),
            triggers: self
                .triggers
                .iter()
                .map(|e| EdgeDoc {
                    source: self.stages[e.source.0].id.clone(),
                    target: self.stages[e.target.0].id.clone(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &ModelDoc) -> Result<TmModel, Vec<Diagnostic>> {
        build_model(Decls {
            thimacs: doc
                .thimacs
                .iter()
                .map(|t| ThimacDecl {
                    id: t.id.clone(),
                    name: t.name.clone(),
                    parent: t.parent.clone(),
                    span: None,
                })
                .collect(),
            stages: doc
                .stages
                .iter()
                .map(|s| StageDecl {
                    id: s.id.clone(),
                    kind: s.kind,
                    owner: s.owner.clone(),
                    label: s.label.clone(),
                    span: None,
                })
                .collect(),
            flows: doc.flows.iter().map(|e| EdgeDecl::new(&e.source, &e.target)).collect(),
            triggers: doc.triggers.iter().map(|e| EdgeDecl::new(&e.source, &e.target)).collect(),
        })
    }
}

pub fn flow_key(source: &str, target: &str) -> String {
    format!("{source} -> {target}")
}

pub fn trigger_key(source: &str, target: &str) -> String {
    format!("{source} ~> {target}")
}

/// Canonical stage key for a stage of `kind` in the thimac at `owner_path`.
pub fn stage_key(owner_path: &str, kind: StageKind, label: Option<&str>) -> String {
    match label {
        Some(label) => format!("{owner_path}.{kind}({label})"),
        None => format!("{owner_path}.{kind}"),
    }
}

pub fn child_path(parent: Option<&str>, name: &str) -> String {
    match parent {
        Some(p) => format!("{p}.{name}"),
        None => name.to_string(),
    }
}

// ---------------------------------------------------------------------------
// Raw declarations
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThimacDecl {
    pub id: String,
    pub name: String,
    pub parent: Option<String>,
    pub span: Option<Span>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageDecl {
    pub id: String,
    pub kind: StageKind,
    pub owner: String,
    pub label: Option<String>,
    pub span: Option<Span>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeDecl {
    pub source: String,
    pub target: String,
    pub span: Option<Span>,
}

impl EdgeDecl {
    pub fn new(source: &str, target: &str) -> Self {
        EdgeDecl {
            source: source.to_string(),
            target: target.to_string(),
            span: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Decls {
    pub thimacs: Vec<ThimacDecl>,
    pub stages: Vec<StageDecl>,
    pub flows: Vec<EdgeDecl>,
    pub triggers: Vec<EdgeDecl>,
}

/// Builds a model from raw declarations, accumulating every structural
/// problem instead of stopping at the first.
pub fn build_model(decls: Decls) -> Result<TmModel, Vec<Diagnostic>> {
    let Decls {
        thimacs,
        stages,
        flows,
        triggers,
    } = decls;
    let mut diags = Vec::new();

    // Thimac ids; the first declaration of an id wins.
    let mut first: HashMap<&str, usize> = HashMap::new();
    for (i, t) in thimacs.iter().enumerate() {
        if first.contains_key(t.id.as_str()) {
            diags.push(
                Diagnostic::new(Code::DupName, &t.id, format!("thimac id `{}` declared twice", t.id))
                    .with_span(t.span),
            );
        } else {
            first.insert(t.id.as_str(), i);
        }
    }
    let live: Vec<usize> = (0..thimacs.len())
        .filter(|&i| first[thimacs[i].id.as_str()] == i)
        .collect();

    let mut parent_of: HashMap<usize, usize> = HashMap::new();
    for &i in &live {
        let t = &thimacs[i];
        if let Some(p) = &t.parent {
            match first.get(p.as_str()) {
                Some(&pi) => {
                    parent_of.insert(i, pi);
                }
                None => diags.push(
                    Diagnostic::new(
                        Code::RefUnresolved,
                        &t.id,
                        format!("parent thimac `{p}` of `{}` does not exist", t.id),
                    )
                    .with_span(t.span),
                ),
            }
        }
    }

    // Containment cycles: walk up from every thimac; report each cycle once
    // at its first-declared member.
    let mut reported: HashSet<usize> = HashSet::new();
    let mut in_cycle: HashSet<usize> = HashSet::new();
    for &i in &live {
        let mut seen = vec![i];
        let mut cur = i;
        while let Some(&p) = parent_of.get(&cur) {
            if let Some(pos) = seen.iter().position(|&x| x == p) {
                let cycle: Vec<usize> = seen[pos..].to_vec();
                in_cycle.extend(cycle.iter().copied());
                let head = *cycle.iter().min().unwrap();
                if reported.insert(head) {
                    let names: Vec<&str> = {
                        let mut c = cycle.clone();
                        c.sort_unstable();
                        c.iter().map(|&x| thimacs[x].id.as_str()).collect()
                    };
                    diags.push(
                        Diagnostic::new(
                            Code::NestCycle,
                            &thimacs[head].id,
                            format!("containment cycle through {}", names.join(", ")),
                        )
                        .with_span(thimacs[head].span),
                    );
                }
                break;
            }
            seen.push(p);
            cur = p;
        }
    }

    // Sibling name uniqueness.
    let mut sibling_names: HashSet<(Option<usize>, &str)> = HashSet::new();
    for &i in &live {
        let t = &thimacs[i];
        let parent = parent_of.get(&i).copied();
        if !sibling_names.insert((parent, t.name.as_str())) {
            diags.push(
                Diagnostic::new(
                    Code::DupName,
                    &t.id,
                    format!("sibling thimacs share the name `{}`", t.name),
                )
                .with_span(t.span),
            );
        }
    }

    // Stages.
    let mut stage_first: HashMap<&str, usize> = HashMap::new();
    let mut slot: HashSet<(usize, StageKind, Option<&str>)> = HashSet::new();
    let mut live_stages = Vec::new();
    for (i, s) in stages.iter().enumerate() {
        if stage_first.contains_key(s.id.as_str()) {
            diags.push(
                Diagnostic::new(Code::DupName, &s.id, format!("stage id `{}` declared twice", s.id))
                    .with_span(s.span),
            );
            continue;
        }
        stage_first.insert(s.id.as_str(), i);
        let Some(&owner) = first.get(s.owner.as_str()) else {
            diags.push(
                Diagnostic::new(
                    Code::RefUnresolved,
                    &s.id,
                    format!("owner thimac `{}` does not exist", s.owner),
                )
                .with_span(s.span),
            );
            continue;
        };
        if !slot.insert((owner, s.kind, s.label.as_deref())) {
            diags.push(
                Diagnostic::new(
                    Code::DupName,
                    &s.id,
                    format!("`{}` already has a {} stage for this thing", s.owner, s.kind),
                )
                .with_span(s.span),
            );
            continue;
        }
        live_stages.push((i, owner));
    }

    // Arrive/accept come as a pair that replaces receive.
    for &(i, owner) in &live_stages {
        let s = &stages[i];
        let has = |k| slot.contains(&(owner, k, s.label.as_deref()));
        match s.kind {
            StageKind::Arrive | StageKind::Accept => {
                let partner = if s.kind == StageKind::Arrive {
                    StageKind::Accept
                } else {
                    StageKind::Arrive
                };
                if !has(partner) {
                    diags.push(
                        Diagnostic::new(
                            Code::RefUnresolved,
                            &s.id,
                            format!("{} stage has no {partner} partner", s.kind),
                        )
                        .with_span(s.span),
                    );
                }
            }
            StageKind::Receive if has(StageKind::Arrive) || has(StageKind::Accept) => {
                diags.push(
                    Diagnostic::new(
                        Code::DupName,
                        &s.id,
                        "receive stage clashes with an arrive/accept pair for the same thing",
                    )
                    .with_span(s.span),
                );
            }
            _ => {}
        }
    }

    let mut check_edges = |edges: &[EdgeDecl], what: &str, key: fn(&str, &str) -> String| {
        let mut seen = HashSet::new();
        for e in edges {
            let k = key(&e.source, &e.target);
            let mut ok = true;
            for end in [&e.source, &e.target] {
                if !stage_first.contains_key(end.as_str()) {
                    ok = false;
                    diags.push(
                        Diagnostic::new(
                            Code::RefUnresolved,
                            &k,
                            format!("{what} references unknown stage `{end}`"),
                        )
                        .with_span(e.span),
                    );
                }
            }
            if ok && !seen.insert((e.source.as_str(), e.target.as_str())) {
                diags.push(
                    Diagnostic::new(Code::DupName, &k, format!("{what} declared twice"))
                        .with_span(e.span),
                );
            }
        }
    };
    check_edges(&flows, "flow", flow_key);
    check_edges(&triggers, "trigger", trigger_key);

    if !diags.is_empty() {
        return Err(diags);
    }

    // Canonical order: preorder over the containment forest.
    let mut children: HashMap<Option<usize>, Vec<usize>> = HashMap::new();
    for &i in &live {
        children.entry(parent_of.get(&i).copied()).or_default().push(i);
    }
    let mut order = Vec::with_capacity(live.len());
    let mut stack: Vec<usize> = children.get(&None).cloned().unwrap_or_default();
    stack.reverse();
    while let Some(i) = stack.pop() {
        order.push(i);
        if let Some(kids) = children.get(&Some(i)) {
            stack.extend(kids.iter().rev().copied());
        }
    }
    debug_assert_eq!(order.len(), live.len());
    let mut new_thimac: HashMap<usize, ThimacId> = HashMap::new();
    for (n, &i) in order.iter().enumerate() {
        new_thimac.insert(i, ThimacId(n));
    }

    let mut model = TmModel::default();
    for &i in &order {
        let t = &thimacs[i];
        model.thimacs.push(Thimac {
            id: t.id.clone(),
            name: t.name.clone(),
            parent: parent_of.get(&i).map(|p| new_thimac[p]),
            children: children
                .get(&Some(i))
                .map(|k| k.iter().map(|c| new_thimac[c]).collect())
                .unwrap_or_default(),
            stages: Vec::new(),
        });
    }
    let mut sorted_stages = live_stages.clone();
    sorted_stages.sort_by_key(|&(i, owner)| (new_thimac[&owner], i));
    for (i, owner) in sorted_stages {
        let s = &stages[i];
        let id = StageId(model.stages.len());
        let owner = new_thimac[&owner];
        model.thimacs[owner.0].stages.push(id);
        model.stages.push(Stage {
            id: s.id.clone(),
            kind: s.kind,
            owner,
            label: s.label.clone(),
        });
    }
    for (i, s) in model.stages.iter().enumerate() {
        model.stage_index.insert(s.id.clone(), StageId(i));
    }
    for (i, t) in model.thimacs.iter().enumerate() {
        model.thimac_index.insert(t.id.clone(), ThimacId(i));
    }
    let n = model.stages.len();
    model.adj = Adjacency {
        flows_out: vec![Vec::new(); n],
        flows_in: vec![Vec::new(); n],
        triggers_out: vec![Vec::new(); n],
        triggers_in: vec![Vec::new(); n],
    };
    for e in &flows {
        let (s, t) = (model.stage_index[&e.source], model.stage_index[&e.target]);
        let id = FlowId(model.flows.len());
        model.flows.push(FlowEdge { source: s, target: t });
        model.adj.flows_out[s.0].push(id);
        model.adj.flows_in[t.0].push(id);
    }
    for e in &triggers {
        let (s, t) = (model.stage_index[&e.source], model.stage_index[&e.target]);
        let id = TriggerId(model.triggers.len());
        model.triggers.push(TriggerEdge { source: s, target: t });
        model.adj.triggers_out[s.0].push(id);
        model.adj.triggers_in[t.0].push(id);
    }
    Ok(model)
}

// ---------------------------------------------------------------------------
// Programmatic construction with path ids
// ---------------------------------------------------------------------------

/// Convenience builder that derives ids from thimac paths, the same way the
/// DSL lowering does.
#[derive(Clone, Debug, Default)]
pub struct ModelBuilder {
    decls: Decls,
}

impl ModelBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a thimac and returns its path.
    pub fn thimac(&mut self, parent: Option<&str>, name: &str) -> String {
        let id = child_path(parent, name);
        self.decls.thimacs.push(ThimacDecl {
            id: id.clone(),
            name: name.to_string(),
            parent: parent.map(str::to_string),
            span: None,
        });
        id
    }

    /// Adds a stage and returns its key.
    pub fn stage(&mut self, owner: &str, kind: StageKind, label: Option<&str>) -> String {
        let id = stage_key(owner, kind, label);
        self.decls.stages.push(StageDecl {
            id: id.clone(),
            kind,
            owner: owner.to_string(),
            label: label.map(str::to_string),
            span: None,
        });
        id
    }

    pub fn flow(&mut self, source: &str, target: &str) -> &mut Self {
        self.decls.flows.push(EdgeDecl::new(source, target));
        self
    }

    pub fn trigger(&mut self, source: &str, target: &str) -> &mut Self {
        self.decls.triggers.push(EdgeDecl::new(source, target));
        self
    }

    pub fn decls(&self) -> &Decls {
        &self.decls
    }

    pub fn build(self) -> Result<TmModel, Vec<Diagnostic>> {
        build_model(self.decls)
    }
}

// ---------------------------------------------------------------------------
// Graph queries
// ---------------------------------------------------------------------------

/// Directed graph over stages with one arc per flow edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageGraph {
    pub nodes: Vec<StageId>,
    pub arcs: Vec<(StageId, StageId)>,
}

pub fn stage_graph(model: &TmModel) -> StageGraph {
    StageGraph {
        nodes: model.stage_ids().collect(),
        arcs: model.flows.iter().map(|e| (e.source, e.target)).collect(),
    }
}

/// Stages reachable from `from` along flow edges, including `from` itself.
pub fn reachable(model: &TmModel, from: &str) -> Result<BTreeSet<StageId>, Diagnostic> {
    let start = model.find_stage(from).ok_or_else(|| {
        Diagnostic::new(Code::RefUnresolved, from, format!("unknown stage `{from}`"))
    })?;
    Ok(reachable_from(model, start))
}

pub fn reachable_from(model: &TmModel, start: StageId) -> BTreeSet<StageId> {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for f in model.flows_out(s) {
            let t = model.flow(*f).target;
            if seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    seen
}

// ---------------------------------------------------------------------------
// Canonical JSON document
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThimacDoc {
    pub id: String,
    pub name: String,
    pub parent: Option<String>,
    pub children: Vec<String>,
    pub stages: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageDoc {
    pub id: String,
    pub kind: StageKind,
    pub owner: String,
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub source: String,
    pub target: String,
}

/// Serialized form of a [`TmModel`]. Field order is the key order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDoc {
    pub thimacs: Vec<ThimacDoc>,
    pub stages: Vec<StageDoc>,
    pub flows: Vec<EdgeDoc>,
    pub triggers: Vec<EdgeDoc>,
}
