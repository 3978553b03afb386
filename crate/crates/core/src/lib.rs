//! Toolchain for Thinging Machine (TM) conceptual models.
//!
//! A TM model is a forest of *thimacs* (thing/machines). Each thimac owns
//! stages drawn from the five generic processes (create, process, release,
//! transfer, receive, with receive optionally refined into arrive + accept).
//! Stages are connected by flows (solid arrows) and triggers (dashed arrows).
//!
//! The crate is organised as a pipeline:
//!
//! * [`dsl`] parses `.tm` text into an AST, lowers it into a [`model::TmModel`]
//!   and formats models back into canonical text.
//! * [`validate`] checks flow legality, trigger discipline and connectivity.
//! * [`dynamics`] derives events, checks behavior graphs, and simulates token
//!   flow into traces.
//! * [`transform`] simplifies models and overlays events.
//! * [`render`] emits Graphviz DOT and canonical JSON.
//! * [`cli`] ties it together behind the `tm` binary.

pub mod cli;
pub mod corpus;
pub mod diagnostic;
pub mod dsl;
pub mod dynamics;
pub mod model;
pub mod render;
pub mod transform;
pub mod validate;

pub use diagnostic::{Code, Diagnostic, Severity, Span, ValidationReport};
pub use model::{build_model, reachable, stage_graph, StageKind, TmModel};
