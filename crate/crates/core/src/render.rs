//! Graphviz DOT and canonical JSON output.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::diagnostic::{Code, Diagnostic};
use crate::dynamics::{BehaviorEdge, BehaviorGraph, Event, EventLevel};
use crate::model::{EdgeDoc, ElementRef, ModelDoc, StageDoc, ThimacDoc, ThimacId, TmModel};
use crate::transform::{overlay, Overlay, OverlaySpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Dot,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenderOptions {
    pub format: Format,
    /// Include stage labels in node captions.
    pub show_labels: bool,
    pub cluster_thimacs: bool,
    pub overlay: Option<OverlaySpec>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            format: Format::Dot,
            show_labels: true,
            cluster_thimacs: true,
            overlay: None,
        }
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn fill_attrs(colors: &[&str]) -> String {
    match colors {
        [] => String::new(),
        [one] => format!(", style=\"rounded,filled\", fillcolor={}", quote(one)),
        many => format!(", style=striped, fillcolor={}", quote(&many.join(":"))),
    }
}

struct DotWriter<'a> {
    model: &'a TmModel,
    colors: Overlay<'a>,
    options: &'a RenderOptions,
    out: String,
}

impl DotWriter<'_> {
    fn node(&mut self, stage: crate::model::StageId, depth: usize) {
        let s = self.model.stage(stage);
        let caption = match (&s.label, self.options.show_labels) {
            (Some(l), true) => format!("{}({l})", s.kind),
            _ => s.kind.to_string(),
        };
        let fill = fill_attrs(self.colors.colors(ElementRef::Stage(stage)));
        let _ = writeln!(self.out, "{:w$}{} [label={}{fill}];", "", quote(&s.id), quote(&caption), w = depth * 2);
    }

    fn cluster(&mut self, t: ThimacId, depth: usize) {
        let th = self.model.thimac(t);
        let pad = depth * 2;
        let _ = writeln!(self.out, "{:pad$}subgraph cluster_{} {{", "", t.0);
        let _ = writeln!(self.out, "{:w$}label={};", "", quote(&th.name), w = pad + 2);
        for s in th.stages.clone() {
            self.node(s, depth + 1);
        }
        for c in th.children.clone() {
            self.cluster(c, depth + 1);
        }
        let _ = writeln!(self.out, "{:pad$}}}", "");
    }

    fn edge_color(&self, e: ElementRef) -> String {
        match self.colors.colors(e) {
            [] => String::new(),
            cs => format!("color={}", quote(&cs.join(":"))),
        }
    }
}

/// Emits a `digraph`: one cluster per thimac (nested for subthimacs), one
/// node per stage keyed by its full path, solid flows and dashed triggers.
/// With an overlay, stages are filled with the colors of their events.
pub fn to_dot(model: &TmModel, events: &[Event], options: &RenderOptions) -> Result<String, Diagnostic> {
    let colors = match &options.overlay {
        Some(spec) => overlay(model, events, spec)?,
        None => Overlay::empty(model),
    };
    let mut w = DotWriter {
        model,
        colors,
        options,
        out: String::new(),
    };
    w.out.push_str("digraph tm {\n  rankdir=LR;\n  compound=true;\n  node [shape=box, style=rounded];\n");
    if options.cluster_thimacs {
        for r in model.roots().collect::<Vec<_>>() {
            w.cluster(r, 1);
        }
    } else {
        for s in model.stage_ids() {
            w.node(s, 1);
        }
    }
    for f in model.flow_ids() {
        let e = model.flow(f);
        let color = w.edge_color(ElementRef::Flow(f));
        let attrs = if color.is_empty() { String::new() } else { format!(" [{color}]") };
        let _ = writeln!(
            w.out,
            "  {} -> {}{attrs};",
            quote(&model.stage(e.source).id),
            quote(&model.stage(e.target).id)
        );
    }
    for t in model.trigger_ids() {
        let e = model.trigger(t);
        let color = w.edge_color(ElementRef::Trigger(t));
        let extra = if color.is_empty() { String::new() } else { format!(", {color}") };
        let _ = writeln!(
            w.out,
            "  {} -> {} [style=dashed{extra}];",
            quote(&model.stage(e.source).id),
            quote(&model.stage(e.target).id)
        );
    }
    w.out.push_str("}\n");
    Ok(w.out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventDoc {
    pub id: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub level: EventLevel,
    /// Element keys in element order.
    pub region: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constituents: Vec<String>,
}

/// The whole JSON document. Events and behavior are omitted when empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub thimacs: Vec<ThimacDoc>,
    pub stages: Vec<StageDoc>,
    pub flows: Vec<EdgeDoc>,
    pub triggers: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<EventDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub behavior: Vec<BehaviorEdge>,
}

pub fn to_document(model: &TmModel, events: &[Event], behavior: &BehaviorGraph) -> Document {
    let ModelDoc {
        thimacs,
        stages,
        flows,
        triggers,
    } = model.to_doc();
    Document {
        thimacs,
        stages,
        flows,
        triggers,
        events: events
            .iter()
            .map(|e| EventDoc {
                id: e.id.clone(),
                name: e.name.clone(),
                description: e.description.clone(),
                level: e.level,
                region: e.region.iter().map(|r| model.element_key(*r)).collect(),
                constituents: e.constituents.clone(),
            })
            .collect(),
        behavior: behavior.edges.clone(),
    }
}

/// Pretty-printed canonical JSON with a trailing newline.
pub fn to_json(model: &TmModel, events: &[Event], behavior: &BehaviorGraph) -> String {
    let mut s = serde_json::to_string_pretty(&to_document(model, events, behavior)).expect("documents always serialize");
    s.push('\n');
    s
}

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid model: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Model(Vec<Diagnostic>),
}

/// Reads a document written by [`to_json`].
pub fn from_json(text: &str) -> Result<(TmModel, Vec<Event>, BehaviorGraph), JsonError> {
    let doc: Document = serde_json::from_str(text)?;
    let model = TmModel::from_doc(&ModelDoc {
        thimacs: doc.thimacs,
        stages: doc.stages,
        flows: doc.flows,
        triggers: doc.triggers,
    })
    .map_err(JsonError::Model)?;
    let mut events = Vec::new();
    for e in doc.events {
        let mut region = std::collections::BTreeSet::new();
        for key in &e.region {
            let el = model.find_element(key).ok_or_else(|| {
                JsonError::Model(vec![Diagnostic::new(
                    Code::RefUnresolved,
                    &e.id,
                    format!("event `{}` refers to unknown element `{key}`", e.id),
                )])
            })?;
            region.insert(el);
        }
        events.push(Event {
            id: e.id,
            name: e.name,
            description: e.description,
            region,
            level: e.level,
            constituents: e.constituents,
        });
    }
    Ok((model, events, BehaviorGraph::from_edges(doc.behavior)))
}
