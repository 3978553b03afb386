//! Deterministic token-flow simulation.
//!
//! A step executes exactly one stage: a spontaneous creation, a trigger
//! activation, or a token moving along a flow. Executing a stage queues one
//! activation per outgoing trigger and fires the events it completes.
//! Tokens are never destroyed; a token with nowhere to go stays parked.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::events::{Event, EventLevel};
use crate::model::{FlowId, StageId, StageKind, TmModel, TriggerId};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Always take the first enabled candidate.
    #[default]
    Fifo,
    /// Seeded uniform pick among the enabled candidates.
    Random,
}

/// Decision taken when a token moves from an arrive stage to its accept stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum AcceptGuard {
    #[default]
    AcceptAll,
    RejectAll,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimOptions {
    pub seed: u64,
    pub max_steps: u64,
    /// How many times each spontaneous create stage may fire per run.
    pub creation_cap: u32,
    pub policy: Policy,
    pub accept_guard: AcceptGuard,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            seed: 0,
            max_steps: 1000,
            creation_cap: 1,
            policy: Policy::Fifo,
            accept_guard: AcceptGuard::AcceptAll,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenId(pub u64);

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

/// Identity of a flowing thing: the thimac it originates in plus its label.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Thing {
    pub thimac: String,
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub id: TokenId,
    pub thing: Thing,
    pub location: StageId,
    pub rejected: bool,
    arrived: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Candidate {
    /// A create stage with no incoming trigger fires on its own.
    Spawn(StageId),
    /// A queued trigger activation mints a token at the trigger's target.
    Activate(TriggerId),
    /// A token moves along a flow.
    Move { token: TokenId, flow: FlowId },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecordKind {
    StageExecuted,
    EventFired,
    TokenRejected,
    Truncated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: u64,
    pub kind: RecordKind,
    pub id: String,
    pub tokens: Vec<TokenId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    /// Set when the run stopped at `max_steps` with candidates left.
    pub truncated: bool,
}

impl Trace {
    /// Ids of fired events, in firing order.
    pub fn fired_events(&self) -> Vec<&str> {
        self.records
            .iter()
            .filter(|r| r.kind == RecordKind::EventFired)
            .map(|r| r.id.as_str())
            .collect()
    }

    /// Fired events restricted to `ids`.
    pub fn fired_among<'a>(&'a self, ids: &[&str]) -> Vec<&'a str> {
        self.fired_events().into_iter().filter(|e| ids.contains(e)).collect()
    }

    pub fn executed_stages(&self) -> Vec<&str> {
        self.records
            .iter()
            .filter(|r| r.kind == RecordKind::StageExecuted)
            .map(|r| r.id.as_str())
            .collect()
    }

    /// One JSON object per line. A truncated run ends with a `truncated`
    /// record.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("trace records serialize"));
            out.push('\n');
        }
        if self.truncated {
            let last = self.records.last().map_or(0, |r| r.step);
            let r = TraceRecord {
                step: last,
                kind: RecordKind::Truncated,
                id: "max-steps".to_string(),
                tokens: Vec::new(),
            };
            out.push_str(&serde_json::to_string(&r).expect("trace records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Trace, serde_json::Error> {
        let mut trace = Trace::default();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let r: TraceRecord = serde_json::from_str(line)?;
            if r.kind == RecordKind::Truncated {
                trace.truncated = true;
            } else {
                trace.records.push(r);
            }
        }
        Ok(trace)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("NOT_ENABLED: candidate {0:?} is not enabled in the current state")]
    NotEnabled(Candidate),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Trigger {
    Stage(StageId),
    Composite(Vec<usize>),
    Never,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    id: String,
    trigger: Trigger,
    reported: bool,
}

/// Tracks event firing. Elementary events fire when their stage executes; a
/// composite fires when the last of its constituents not yet fired since its
/// previous firing fires.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct EventTracker {
    nodes: Vec<Node>,
    parents: Vec<Vec<usize>>,
    by_stage: Vec<Vec<usize>>,
    progress: Vec<BTreeSet<usize>>,
}

impl EventTracker {
    fn new(model: &TmModel, events: &[Event]) -> Self {
        let mut t = EventTracker {
            by_stage: vec![Vec::new(); model.stages().len()],
            ..Default::default()
        };
        let mut index: HashMap<String, usize> = HashMap::new();
        for e in events {
            if index.contains_key(&e.id) {
                continue;
            }
            index.insert(e.id.clone(), t.nodes.len());
            t.nodes.push(Node {
                id: e.id.clone(),
                trigger: Trigger::Never,
                reported: true,
            });
        }
        let mut seen_ids = std::collections::HashSet::new();
        for e in events {
            if !seen_ids.insert(e.id.as_str()) {
                continue;
            }
            let n = index[&e.id];
            t.nodes[n].trigger = match (e.level, e.stage()) {
                (EventLevel::Elementary, Some(s)) => Trigger::Stage(s),
                (EventLevel::Elementary, None) => Trigger::Never,
                (EventLevel::Composite, _) => {
                    let mut parts = Vec::new();
                    for c in &e.constituents {
                        let part = match index.get(c) {
                            Some(&p) => Some(p),
                            None => model.find_stage(c).map(|s| {
                                let p = t.nodes.len();
                                t.nodes.push(Node {
                                    id: c.clone(),
                                    trigger: Trigger::Stage(s),
                                    reported: false,
                                });
                                index.insert(c.clone(), p);
                                p
                            }),
                        };
                        match part {
                            Some(p) if !parts.contains(&p) => parts.push(p),
                            Some(_) => {}
                            // An unresolvable constituent can never fire.
                            None => {
                                parts.clear();
                                break;
                            }
                        }
                    }
                    if parts.is_empty() {
                        Trigger::Never
                    } else {
                        Trigger::Composite(parts)
                    }
                }
            };
        }
        t.parents = vec![Vec::new(); t.nodes.len()];
        t.progress = vec![BTreeSet::new(); t.nodes.len()];
        for (i, n) in t.nodes.iter().enumerate() {
            match &n.trigger {
                Trigger::Stage(s) => t.by_stage[s.0].push(i),
                Trigger::Composite(parts) => {
                    for &p in parts {
                        t.parents[p].push(i);
                    }
                }
                Trigger::Never => {}
            }
        }
        t
    }

    /// Fires everything completed by executing `stage`; returns the reported
    /// events in declaration order.
    fn on_stage(&mut self, stage: StageId) -> Vec<String> {
        let mut fired = BTreeSet::new();
        let mut work: Vec<usize> = self.by_stage[stage.0].clone();
        while let Some(n) = work.pop() {
            if !fired.insert(n) {
                continue;
            }
            for &p in &self.parents[n] {
                let Trigger::Composite(parts) = &self.nodes[p].trigger else { continue };
                self.progress[p].insert(n);
                if self.progress[p].len() == parts.len() {
                    self.progress[p].clear();
                    work.push(p);
                }
            }
        }
        fired
            .into_iter()
            .filter(|&n| self.nodes[n].reported)
            .map(|n| self.nodes[n].id.clone())
            .collect()
    }
}

/// Mutable simulation state over an immutable model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimState<'m> {
    model: &'m TmModel,
    options: SimOptions,
    tokens: Vec<Token>,
    at_stage: Vec<Vec<TokenId>>,
    /// Tokens by arrival sequence number at their current stage.
    queue: BTreeMap<u64, TokenId>,
    arrivals: u64,
    step: u64,
    rng: ChaCha8Rng,
    pending: VecDeque<TriggerId>,
    creations_used: Vec<u32>,
    spontaneous: Vec<StageId>,
    tracker: EventTracker,
}

pub fn init_state<'m>(model: &'m TmModel, events: &[Event], options: SimOptions) -> SimState<'m> {
    SimState::new(model, events, options)
}

pub fn enabled(state: &SimState<'_>) -> Vec<Candidate> {
    state.enabled()
}

pub fn step(state: &mut SimState<'_>, candidate: Candidate) -> Result<Vec<TraceRecord>, SimError> {
    state.step(candidate)
}

impl<'m> SimState<'m> {
    pub fn new(model: &'m TmModel, events: &[Event], options: SimOptions) -> Self {
        let spontaneous = model
            .stage_ids()
            .filter(|s| model.stage(*s).kind == StageKind::Create && model.triggers_in(*s).is_empty())
            .collect();
        SimState {
            model,
            options,
            tokens: Vec::new(),
            at_stage: vec![Vec::new(); model.stages().len()],
            queue: BTreeMap::new(),
            arrivals: 0,
            step: 0,
            rng: ChaCha8Rng::seed_from_u64(options.seed),
            pending: VecDeque::new(),
            creations_used: vec![0; model.stages().len()],
            spontaneous,
            tracker: EventTracker::new(model, events),
        }
    }

    pub fn model(&self) -> &'m TmModel {
        self.model
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn token(&self, id: TokenId) -> &Token {
        &self.tokens[id.0 as usize]
    }

    /// Tokens parked at `stage`, oldest arrival first.
    pub fn tokens_at(&self, stage: StageId) -> &[TokenId] {
        &self.at_stage[stage.0]
    }

    pub fn pending(&self) -> impl Iterator<Item = TriggerId> + '_ {
        self.pending.iter().copied()
    }

    pub fn creations_used(&self, stage: StageId) -> u32 {
        self.creations_used[stage.0]
    }

    /// Candidates in a fixed order: queued trigger activations (oldest
    /// first), then token moves (longest-waiting token first, its flows in
    /// declaration order), then spontaneous creations (stage order).
    pub fn enabled(&self) -> Vec<Candidate> {
        let mut out: Vec<Candidate> = self.pending.iter().map(|t| Candidate::Activate(*t)).collect();
        for token in self.queue.values() {
            let tok = &self.tokens[token.0 as usize];
            if tok.rejected {
                continue;
            }
            for f in self.model.flows_out(tok.location) {
                out.push(Candidate::Move { token: *token, flow: *f });
            }
        }
        for s in &self.spontaneous {
            if self.creations_used[s.0] < self.options.creation_cap {
                out.push(Candidate::Spawn(*s));
            }
        }
        out
    }

    pub fn step(&mut self, candidate: Candidate) -> Result<Vec<TraceRecord>, SimError> {
        if !self.is_enabled(candidate) {
            return Err(SimError::NotEnabled(candidate));
        }
        self.step += 1;
        let mut records = Vec::new();
        match candidate {
            Candidate::Spawn(s) => {
                self.creations_used[s.0] += 1;
                let tok = self.mint(s);
                self.execute(s, tok, &mut records);
            }
            Candidate::Activate(t) => {
                let pos = self.pending.iter().position(|p| *p == t).expect("checked enabled");
                self.pending.remove(pos);
                let target = self.model.trigger(t).target;
                let tok = self.mint(target);
                self.execute(target, tok, &mut records);
            }
            Candidate::Move { token, flow } => {
                let target = self.model.flow(flow).target;
                if self.model.stage(target).kind == StageKind::Accept
                    && self.options.accept_guard == AcceptGuard::RejectAll
                {
                    let tok = &mut self.tokens[token.0 as usize];
                    tok.rejected = true;
                    self.queue.remove(&tok.arrived);
                    records.push(TraceRecord {
                        step: self.step,
                        kind: RecordKind::TokenRejected,
                        id: self.model.stage(target).id.clone(),
                        tokens: vec![token],
                    });
                } else {
                    self.relocate(token, target);
                    self.execute(target, token, &mut records);
                }
            }
        }
        Ok(records)
    }

    fn is_enabled(&self, c: Candidate) -> bool {
        match c {
            Candidate::Spawn(s) => {
                self.spontaneous.contains(&s) && self.creations_used[s.0] < self.options.creation_cap
            }
            Candidate::Activate(t) => self.pending.contains(&t),
            Candidate::Move { token, flow } => {
                let Some(tok) = self.tokens.get(token.0 as usize) else { return false };
                flow.0 < self.model.flows().len()
                    && !tok.rejected
                    && self.model.flow(flow).source == tok.location
            }
        }
    }

    fn mint(&mut self, stage: StageId) -> TokenId {
        let s = self.model.stage(stage);
        let id = TokenId(self.tokens.len() as u64);
        let arrived = self.arrivals;
        self.arrivals += 1;
        self.tokens.push(Token {
            id,
            thing: Thing {
                thimac: self.model.thimac(s.owner).id.clone(),
                label: s.label.clone(),
            },
            location: stage,
            rejected: false,
            arrived,
        });
        self.at_stage[stage.0].push(id);
        self.queue.insert(arrived, id);
        id
    }

    fn relocate(&mut self, token: TokenId, target: StageId) {
        let arrived = self.arrivals;
        self.arrivals += 1;
        let tok = &mut self.tokens[token.0 as usize];
        let from = tok.location;
        self.queue.remove(&tok.arrived);
        tok.location = target;
        tok.arrived = arrived;
        self.queue.insert(arrived, token);
        self.at_stage[from.0].retain(|t| *t != token);
        self.at_stage[target.0].push(token);
    }

    fn execute(&mut self, stage: StageId, token: TokenId, records: &mut Vec<TraceRecord>) {
        records.push(TraceRecord {
            step: self.step,
            kind: RecordKind::StageExecuted,
            id: self.model.stage(stage).id.clone(),
            tokens: vec![token],
        });
        self.pending.extend(self.model.triggers_out(stage).iter().copied());
        for id in self.tracker.on_stage(stage) {
            records.push(TraceRecord {
                step: self.step,
                kind: RecordKind::EventFired,
                id,
                tokens: vec![token],
            });
        }
    }

    fn choose(&mut self, candidates: &[Candidate]) -> Candidate {
        match self.options.policy {
            Policy::Fifo => candidates[0],
            Policy::Random => candidates[self.rng.gen_range(0..candidates.len())],
        }
    }
}

/// Runs the simulation until nothing is enabled or `max_steps` is reached.
/// Event-fired records are emitted for `events` only.
pub fn run(model: &TmModel, events: &[Event], options: SimOptions) -> Trace {
    let mut state = SimState::new(model, events, options);
    let mut trace = Trace::default();
    loop {
        let candidates = state.enabled();
        if candidates.is_empty() {
            break;
        }
        if state.step >= options.max_steps {
            trace.truncated = true;
            break;
        }
        let c = state.choose(&candidates);
        let records = state.step(c).expect("chosen candidate is enabled");
        trace.records.extend(records);
    }
    trace
}
