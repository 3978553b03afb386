use std::collections::HashSet;

use super::ast::*;
use crate::diagnostic::{Code, Diagnostic};
use crate::dynamics::{define_event, BehaviorEdge, BehaviorGraph, Event};
use crate::model::{build_model, child_path, Decls, EdgeDecl, ElementRef, StageDecl, ThimacDecl, TmModel};

/// Result of lowering: the model plus the dynamic declarations carried
/// alongside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lowered {
    pub model: TmModel,
    pub events: Vec<Event>,
    pub behavior: BehaviorGraph,
    /// Non-blocking findings, such as disconnected event regions.
    pub warnings: Vec<Diagnostic>,
}

fn collect_thimac(node: &ThimacNode, parent: Option<&str>, decls: &mut Decls) {
    let id = child_path(parent, &node.name.text);
    decls.thimacs.push(ThimacDecl {
        id: id.clone(),
        name: node.name.text.clone(),
        parent: parent.map(str::to_string),
        span: Some(node.name.span),
    });
    for item in &node.items {
        match item {
            ThimacItem::Stage(s) => decls.stages.push(StageDecl {
                id: crate::model::stage_key(&id, s.kind, s.label.as_ref().map(|l| l.text.as_str())),
                kind: s.kind,
                owner: id.clone(),
                label: s.label.as_ref().map(|l| l.text.clone()),
                span: Some(s.span),
            }),
            ThimacItem::Thimac(t) => collect_thimac(t, Some(&id), decls),
        }
    }
}

fn edge_decl(e: &EdgeNode) -> EdgeDecl {
    EdgeDecl {
        source: e.source.key(),
        target: e.target.key(),
        span: Some(e.span),
    }
}

/// Resolves stage references and builds the model, events and behavior
/// graph. Structural problems are reported together; event and behavior
/// declarations are only checked once the model itself is sound.
pub fn lower(ast: &Ast) -> Result<Lowered, Vec<Diagnostic>> {
    let mut decls = Decls::default();
    for d in &ast.decls {
        match d {
            Decl::Thimac(t) => collect_thimac(t, None, &mut decls),
            Decl::Flow(e) => decls.flows.push(edge_decl(e)),
            Decl::Trigger(e) => decls.triggers.push(edge_decl(e)),
            Decl::Event(_) | Decl::Behavior(_) => {}
        }
    }
    let model = build_model(decls)?;

    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let mut events: Vec<Event> = Vec::new();
    let mut names = HashSet::new();
    for d in &ast.decls {
        let Decl::Event(ev) = d else { continue };
        let name = &ev.name.text;
        if !names.insert(name.clone()) {
            errors.push(
                Diagnostic::new(Code::DupName, name, format!("event `{name}` declared twice"))
                    .with_span(Some(ev.name.span)),
            );
            continue;
        }
        let mut region = Vec::new();
        for r in &ev.stages {
            match model.find_stage(&r.key()) {
                Some(s) => region.push(ElementRef::Stage(s)),
                None => errors.push(
                    Diagnostic::new(
                        Code::RefUnresolved,
                        name,
                        format!("event `{name}` refers to unknown stage `{}`", r.key()),
                    )
                    .with_span(Some(r.span)),
                ),
            }
        }
        if region.len() != ev.stages.len() {
            continue;
        }
        match define_event(&model, name, &region, &[]) {
            Ok((mut event, warns)) => {
                event.description = ev.description.clone();
                warnings.extend(warns.into_iter().map(|w| w.with_span(Some(ev.span))));
                events.push(event);
            }
            Err(e) => errors.push(e.with_span(Some(ev.span))),
        }
    }

    let mut edges = Vec::new();
    for d in &ast.decls {
        let Decl::Behavior(b) = d else { continue };
        for e in &b.edges {
            for end in [&e.before, &e.after] {
                if !names.contains(&end.text) {
                    errors.push(
                        Diagnostic::new(
                            Code::RefUnresolved,
                            format!("{} -> {}", e.before.text, e.after.text),
                            format!("behavior refers to undeclared event `{}`", end.text),
                        )
                        .with_span(Some(end.span)),
                    );
                }
            }
            edges.push(BehaviorEdge {
                before: e.before.text.clone(),
                after: e.after.text.clone(),
                repeat: e.repeat,
                span: Some(e.span),
            });
        }
    }

    if errors.is_empty() {
        Ok(Lowered {
            model,
            events,
            behavior: BehaviorGraph::from_edges(edges),
            warnings,
        })
    } else {
        Err(errors)
    }
}
