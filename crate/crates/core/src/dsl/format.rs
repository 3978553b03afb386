use std::fmt::Write;

use crate::dynamics::{BehaviorGraph, Event};
use crate::model::{StageId, ThimacId, TmModel};

fn thimac_path(model: &TmModel, id: ThimacId) -> String {
    let t = model.thimac(id);
    match t.parent {
        Some(p) => format!("{}.{}", thimac_path(model, p), t.name),
        None => t.name.clone(),
    }
}

fn stage_ref(model: &TmModel, id: StageId) -> String {
    let s = model.stage(id);
    crate::model::stage_key(&thimac_path(model, s.owner), s.kind, s.label.as_deref())
}

fn write_thimac(model: &TmModel, id: ThimacId, depth: usize, out: &mut String) {
    let t = model.thimac(id);
    let pad = "  ".repeat(depth);
    if t.stages.is_empty() && t.children.is_empty() {
        writeln!(out, "{pad}thimac {} {{}}", t.name).unwrap();
        return;
    }
    writeln!(out, "{pad}thimac {} {{", t.name).unwrap();
    for s in &t.stages {
        let s = model.stage(*s);
        match &s.label {
            Some(l) => writeln!(out, "{pad}  {}({l});", s.kind).unwrap(),
            None => writeln!(out, "{pad}  {};", s.kind).unwrap(),
        }
    }
    for c in &t.children {
        write_thimac(model, *c, depth + 1, out);
    }
    writeln!(out, "{pad}}}").unwrap();
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Canonical text for a model with its events and behavior. Top-level
/// blocks are separated by one blank line; nested thimacs are indented by
/// two spaces per level. Event regions are written as their stages.
pub fn format(model: &TmModel, events: &[Event], behavior: &BehaviorGraph) -> String {
    let mut blocks: Vec<String> = Vec::new();
    for root in model.roots() {
        let mut b = String::new();
        write_thimac(model, root, 0, &mut b);
        blocks.push(b);
    }
    if !model.flows().is_empty() {
        let mut b = String::new();
        for f in model.flows() {
            writeln!(b, "flow {} -> {};", stage_ref(model, f.source), stage_ref(model, f.target)).unwrap();
        }
        blocks.push(b);
    }
    if !model.triggers().is_empty() {
        let mut b = String::new();
        for t in model.triggers() {
            writeln!(b, "trigger {} ~> {};", stage_ref(model, t.source), stage_ref(model, t.target)).unwrap();
        }
        blocks.push(b);
    }
    for e in events {
        let mut b = String::new();
        match &e.description {
            Some(d) => writeln!(b, "event {} {} {{", e.name, quote(d)).unwrap(),
            None => writeln!(b, "event {} {{", e.name).unwrap(),
        }
        for s in e.region_stages() {
            writeln!(b, "  {};", stage_ref(model, s)).unwrap();
        }
        b.push_str("}\n");
        blocks.push(b);
    }
    if !behavior.edges.is_empty() {
        let mut b = String::from("behavior {\n");
        for e in &behavior.edges {
            let repeat = if e.repeat { " repeat" } else { "" };
            writeln!(b, "  {} -> {}{repeat};", e.before, e.after).unwrap();
        }
        b.push_str("}\n");
        blocks.push(b);
    }
    blocks.join("\n")
}
