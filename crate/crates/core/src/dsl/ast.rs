use crate::diagnostic::Span;
use crate::model::StageKind;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Name {
    pub text: String,
    pub span: Span,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ast {
    pub decls: Vec<Decl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Thimac(ThimacNode),
    Flow(EdgeNode),
    Trigger(EdgeNode),
    Event(EventNode),
    Behavior(BehaviorNode),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThimacNode {
    pub name: Name,
    pub items: Vec<ThimacItem>,
    pub span: Span,
}

impl ThimacNode {
    pub fn stages(&self) -> impl Iterator<Item = &StageNode> {
        self.items.iter().filter_map(|i| match i {
            ThimacItem::Stage(s) => Some(s),
            ThimacItem::Thimac(_) => None,
        })
    }

    pub fn children(&self) -> impl Iterator<Item = &ThimacNode> {
        self.items.iter().filter_map(|i| match i {
            ThimacItem::Thimac(t) => Some(t),
            ThimacItem::Stage(_) => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThimacItem {
    Stage(StageNode),
    Thimac(ThimacNode),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageNode {
    pub kind: StageKind,
    pub label: Option<Name>,
    pub span: Span,
}

/// `Path.To.Thimac.kind(label)`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRef {
    pub path: Vec<Name>,
    pub kind: StageKind,
    pub label: Option<Name>,
    pub span: Span,
}

impl StageRef {
    pub fn owner_path(&self) -> String {
        self.path.iter().map(|n| n.text.as_str()).collect::<Vec<_>>().join(".")
    }

    pub fn key(&self) -> String {
        crate::model::stage_key(
            &self.owner_path(),
            self.kind,
            self.label.as_ref().map(|l| l.text.as_str()),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeNode {
    pub source: StageRef,
    pub target: StageRef,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventNode {
    pub name: Name,
    pub description: Option<String>,
    pub stages: Vec<StageRef>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BehaviorNode {
    pub edges: Vec<BehaviorEdgeNode>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BehaviorEdgeNode {
    pub before: Name,
    pub after: Name,
    pub repeat: bool,
    pub span: Span,
}
