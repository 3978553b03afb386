//! Dynamics over a static model: events, behavior graphs, simulation and
//! conformance of simulated chronologies.

mod behavior;
mod conform;
mod events;
mod sim;

pub use behavior::{check_behavior, region_reaches, BehaviorEdge, BehaviorGraph};
pub use conform::{conforms, Conformance};
pub use events::{define_event, elementary_events, region_is_connected, Event, EventLevel};
pub use sim::{
    enabled, init_state, run, step, AcceptGuard, Candidate, Policy, RecordKind, SimError,
    SimOptions, SimState, Thing, Token, TokenId, Trace, TraceRecord,
};
