//! Semantic checks of a structurally valid model.
//!
//! Illegal flows and triggers are errors. Connectivity findings are
//! warnings: abbreviated diagrams are common and still meaningful.

use crate::diagnostic::{Code, Diagnostic, ValidationReport};
use crate::dsl::Lowered;
use crate::dynamics::check_behavior;
use crate::model::{flow_is_legal, ElementRef, StageKind, TmModel};

/// One FLOW_ILLEGAL per flow outside the legal-flow table and one
/// TRIGGER_ILLEGAL per trigger that does not land on a create or process
/// stage. Self-loops are illegal for both.
pub fn check_flow_legality(model: &TmModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for id in model.flow_ids() {
        let f = model.flow(id);
        let (s, t) = (model.stage(f.source), model.stage(f.target));
        let same = s.owner == t.owner;
        let key = model.element_key(ElementRef::Flow(id));
        if f.source == f.target {
            out.push(Diagnostic::new(Code::FlowIllegal, key, "flow loops back onto its own stage"));
        } else if !flow_is_legal(s.kind, t.kind, same) {
            let scope = if same { "within a thimac" } else { "between thimacs" };
            out.push(Diagnostic::new(
                Code::FlowIllegal,
                key,
                format!("a thing cannot flow from {} to {} {scope}", s.kind, t.kind),
            ));
        }
    }
    for id in model.trigger_ids() {
        let t = model.trigger(id);
        let key = model.element_key(ElementRef::Trigger(id));
        let target = model.stage(t.target);
        if t.source == t.target {
            out.push(Diagnostic::new(Code::TriggerIllegal, key, "trigger loops back onto its own stage"));
        } else if !target.kind.is_triggerable() {
            out.push(Diagnostic::new(
                Code::TriggerIllegal,
                key,
                format!("a trigger can activate create or process, not {}", target.kind),
            ));
        }
    }
    out
}

/// Warnings for stages that nothing reaches, releases that lead nowhere and
/// transfers with no counterpart in another thimac.
pub fn check_connectivity(model: &TmModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for id in model.stage_ids() {
        let s = model.stage(id);
        if s.kind != StageKind::Create && model.flows_in(id).is_empty() && model.triggers_in(id).is_empty() {
            out.push(Diagnostic::new(
                Code::StageOrphan,
                &s.id,
                format!("nothing flows into or triggers this {} stage", s.kind),
            ));
        }
        if s.kind == StageKind::Release
            && !model
                .flows_out(id)
                .iter()
                .any(|f| model.stage(model.flow(*f).target).kind == StageKind::Transfer)
        {
            out.push(Diagnostic::new(Code::SinkRelease, &s.id, "released thing is never transferred"));
        }
        if s.kind == StageKind::Transfer {
            let crosses = |other| !model.same_owner(id, other);
            let paired = model.flows_out(id).iter().any(|f| crosses(model.flow(*f).target))
                || model.flows_in(id).iter().any(|f| crosses(model.flow(*f).source));
            if !paired {
                out.push(Diagnostic::new(
                    Code::TransferUnpaired,
                    &s.id,
                    "transfer has no counterpart in another thimac",
                ));
            }
        }
    }
    out
}

pub fn validate(model: &TmModel) -> ValidationReport {
    let mut diags = check_flow_legality(model);
    diags.extend(check_connectivity(model));
    ValidationReport::new(diags)
}

/// Everything known about a lowered file: model checks, event warnings and
/// the behavior graph.
pub fn validate_lowered(lowered: &Lowered) -> ValidationReport {
    let mut report = validate(&lowered.model);
    report.extend(lowered.warnings.iter().cloned());
    report.extend(check_behavior(&lowered.model, &lowered.events, &lowered.behavior).diagnostics);
    report
}
