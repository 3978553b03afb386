#![allow(dead_code)]

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tm_core::dsl::{lower, parse, Lowered, SourceFile};
use tm_core::model::{flow_is_legal, ModelBuilder, StageId};
use tm_core::validate::validate_lowered;
use tm_core::{Code, StageKind, TmModel};

pub const MAX_STAGES: usize = 30;

/// A structurally valid model with only legal flows and triggers. At most
/// [`MAX_STAGES`] stages; connectivity warnings are allowed.
pub fn random_model(seed: u64) -> TmModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = ModelBuilder::new();
    let mut thimacs: Vec<String> = Vec::new();
    for i in 0..rng.gen_range(1..=5) {
        let parent = if i > 0 && rng.gen_bool(0.4) {
            Some(thimacs[rng.gen_range(0..thimacs.len())].clone())
        } else {
            None
        };
        thimacs.push(b.thimac(parent.as_deref(), &format!("T{i}")));
    }

    let labels = [None, Some("a"), Some("b")];
    let mut slots: HashSet<(String, StageKind, Option<&str>)> = HashSet::new();
    let mut stages: Vec<(String, StageKind, String)> = Vec::new();
    let budget = rng.gen_range(0..=MAX_STAGES);
    for _ in 0..budget * 2 {
        if stages.len() >= budget {
            break;
        }
        let owner = thimacs[rng.gen_range(0..thimacs.len())].clone();
        let kind = StageKind::ALL[rng.gen_range(0..StageKind::ALL.len())];
        let label = labels[rng.gen_range(0..labels.len())];
        let has = |k: StageKind| slots.contains(&(owner.clone(), k, label));
        let group: Vec<StageKind> = match kind {
            StageKind::Arrive | StageKind::Accept => {
                if has(StageKind::Receive) || has(StageKind::Arrive) || stages.len() + 2 > budget {
                    continue;
                }
                vec![StageKind::Arrive, StageKind::Accept]
            }
            StageKind::Receive if has(StageKind::Arrive) => continue,
            k if has(k) => continue,
            k => vec![k],
        };
        for k in group {
            slots.insert((owner.clone(), k, label));
            let key = b.stage(&owner, k, label);
            stages.push((key, k, owner.clone()));
        }
    }

    let n = stages.len();
    let mut edges = HashSet::new();
    for _ in 0..n * 2 {
        let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (ss, ts) = (&stages[s], &stages[t]);
        if s != t && flow_is_legal(ss.1, ts.1, ss.2 == ts.2) && edges.insert((s, t)) {
            b.flow(&ss.0, &ts.0);
        }
    }
    let mut triggers = HashSet::new();
    for _ in 0..n / 2 {
        let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if s != t && stages[t].1.is_triggerable() && triggers.insert((s, t)) {
            b.trigger(&stages[s].0, &stages[t].0);
        }
    }
    b.build().expect("generator emits structurally valid models")
}

/// Brute-force transitive closure over flows (Floyd-Warshall), reflexive.
pub fn flow_closure(model: &TmModel) -> Vec<Vec<bool>> {
    let n = model.stages().len();
    let mut c = vec![vec![false; n]; n];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = true;
    }
    for f in model.flows() {
        c[f.source.0][f.target.0] = true;
    }
    for k in 0..n {
        let via = c[k].clone();
        for row in c.iter_mut() {
            if row[k] {
                for (cell, &reach) in row.iter_mut().zip(&via) {
                    *cell |= reach;
                }
            }
        }
    }
    c
}

pub fn stage_index(model: &TmModel, key: &str) -> StageId {
    model.find_stage(key).unwrap_or_else(|| panic!("no stage {key}"))
}

pub fn lower_text(text: &str) -> Result<Lowered, Vec<Code>> {
    let ast = parse(&SourceFile::new("test.tm", text)).expect("fixture parses");
    lower(&ast).map_err(|d| d.iter().map(|d| d.code).collect())
}

/// Every diagnostic code a file produces, from lowering or validation.
pub fn diagnose(text: &str) -> Vec<Code> {
    match lower_text(text) {
        Err(codes) => codes,
        Ok(l) => validate_lowered(&l).codes(),
    }
}

pub mod dot;

/// Malformed fixture files and the single code each must produce.
pub const FIXTURES: [(&str, Code); 11] = [
    ("flow_illegal.tm", Code::FlowIllegal),
    ("trigger_illegal.tm", Code::TriggerIllegal),
    ("ref_unresolved.tm", Code::RefUnresolved),
    ("dup_name.tm", Code::DupName),
    ("stage_orphan.tm", Code::StageOrphan),
    ("behavior_inconsistent.tm", Code::BehaviorInconsistent),
    ("behavior_cycle.tm", Code::BehaviorInconsistent),
    ("sink_release.tm", Code::SinkRelease),
    ("transfer_unpaired.tm", Code::TransferUnpaired),
    ("region_disconnected.tm", Code::RegionDisconnected),
    ("behavior_undeclared.tm", Code::RefUnresolved),
];

pub fn fixture_text(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

/// Codes from declarations that the text syntax cannot express: a parent
/// cycle between two thimacs.
pub fn nest_cycle_codes() -> Vec<Code> {
    use tm_core::model::{build_model, Decls, ThimacDecl};
    let decl = |id: &str, parent: &str| ThimacDecl {
        id: id.into(),
        name: id.into(),
        parent: Some(parent.into()),
        span: None,
    };
    let decls = Decls {
        thimacs: vec![decl("A", "B"), decl("B", "A")],
        ..Decls::default()
    };
    match build_model(decls) {
        Ok(_) => Vec::new(),
        Err(d) => d.iter().map(|d| d.code).collect(),
    }
}

/// Codes from defining an event over an empty region.
pub fn region_empty_codes() -> Vec<Code> {
    let model = tm_core::corpus::DOUGH_COOKIE.load().model;
    match tm_core::dynamics::define_event(&model, "E", &[], &[]) {
        Ok((_, warnings)) => warnings.iter().map(|d| d.code).collect(),
        Err(d) => vec![d.code],
    }
}

/// True when `codes` is non-empty and holds nothing but `intended`.
pub fn exactly(codes: &[Code], intended: Code) -> bool {
    !codes.is_empty() && codes.iter().all(|c| *c == intended)
}

/// Whether `seq` (distinct event indices) is one of the linear extensions of
/// `before` restricted to the events in `seq`, found by enumerating every
/// permutation.
pub fn is_linear_extension(seq: &[usize], before: &[(usize, usize)]) -> bool {
    let mut items = seq.to_vec();
    items.sort_unstable();
    if items.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    let closure = {
        let n = before.iter().flat_map(|(a, b)| [*a, *b]).chain(seq.iter().copied()).max().map_or(0, |m| m + 1);
        let mut c = vec![vec![false; n]; n];
        for &(a, b) in before {
            c[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if c[i][k] && c[k][j] {
                        c[i][j] = true;
                    }
                }
            }
        }
        c
    };
    let respects = |p: &[usize]| {
        (0..p.len()).all(|i| (i + 1..p.len()).all(|j| !closure[p[j]][p[i]]))
    };
    let mut found = false;
    permute(&mut items, 0, &mut |p| {
        if p == seq && respects(p) {
            found = true;
        }
    });
    found
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Union-find over the region's stages, joined by every flow or trigger with
/// both endpoints inside.
pub fn stages_connected(model: &TmModel, region: &[StageId]) -> bool {
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    if region.len() <= 1 {
        return true;
    }
    let pos = |s: StageId| region.iter().position(|r| *r == s);
    let mut parent: Vec<usize> = (0..region.len()).collect();
    let edges = model
        .flows()
        .iter()
        .map(|f| (f.source, f.target))
        .chain(model.triggers().iter().map(|t| (t.source, t.target)));
    for (s, t) in edges {
        if let (Some(a), Some(b)) = (pos(s), pos(t)) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    let root = find(&mut parent, 0);
    (1..region.len()).all(|i| find(&mut parent, i) == root)
}
