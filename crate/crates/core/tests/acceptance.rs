//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero when
//! any criterion fails.

mod common;

use std::process::Command;

use tm_core::corpus::{corpus, DOUGH_COOKIE, HEATING_WATER, TENDERING};
use tm_core::dsl::{format, lower, parse, SourceFile};
use tm_core::dynamics::{
    check_behavior, conforms, elementary_events, run, BehaviorEdge, BehaviorGraph, Policy, RecordKind,
    SimOptions,
};
use tm_core::render::{from_json, to_json};
use tm_core::transform::simplify;
use tm_core::validate::validate_lowered;
use tm_core::Code;

use common::*;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fifo(cap: u32) -> SimOptions {
    SimOptions {
        creation_cap: cap,
        ..SimOptions::default()
    }
}

fn corpus_validity() -> Outcome {
    for f in corpus() {
        let ast = parse(&f.source()).map_err(|e| format!("{}: {e:?}", f.name))?;
        let lowered = lower(&ast).map_err(|e| format!("{}: {e:?}", f.name))?;
        let report = validate_lowered(&lowered);
        let errors: Vec<String> = report.errors().map(ToString::to_string).collect();
        ensure(errors.is_empty(), || format!("{}: {errors:?}", f.name))?;
    }
    Ok(())
}

fn dough_cookie_chronology() -> Outcome {
    let l = DOUGH_COOKIE.load();
    let trace = run(&l.model, &l.events, fifo(1));
    let fired = trace.fired_among(&["E1", "E2", "E3"]);
    ensure(fired == ["E1", "E2", "E3"], || format!("fired {fired:?}"))?;
    let c = conforms(&trace, &l.behavior);
    ensure(c.ok, || format!("conforms: {:?}", c.violation))?;
    let reversed = BehaviorGraph::from_edges(vec![BehaviorEdge::new("E3", "E1")]);
    let codes = check_behavior(&l.model, &l.events, &reversed).codes();
    ensure(codes == [Code::BehaviorInconsistent], || format!("reversed graph gave {codes:?}"))
}

fn heating_water_repetition() -> Outcome {
    let l = HEATING_WATER.load();
    let trace = run(&l.model, &l.events, fifo(3));
    let fired = trace.fired_among(&["E1", "E2"]);
    ensure(fired == ["E1", "E2", "E1", "E2", "E1", "E2"], || format!("fired {fired:?}"))?;
    ensure(trace == run(&l.model, &l.events, fifo(3)), || "second run differs".into())?;
    let c = conforms(&trace, &l.behavior);
    ensure(c.ok, || format!("conforms: {:?}", c.violation))
}

fn tendering_events() -> Outcome {
    let l = TENDERING.load();
    let ids = ["E1", "E2", "E3", "E4", "E5", "E6", "E7"];
    let chain = BehaviorGraph::chain(&ids);
    let report = check_behavior(&l.model, &l.events, &chain);
    ensure(report.diagnostics.is_empty(), || format!("{:?}", report.codes()))?;
    let trace = run(&l.model, &l.events, fifo(1));
    let fired = trace.fired_among(&ids);
    ensure(fired == ids, || format!("fired {fired:?}"))?;
    ensure(conforms(&trace, &chain).ok, || "trace does not conform".into())?;
    let activated = trace
        .records
        .iter()
        .any(|r| r.kind == RecordKind::StageExecuted && r.id == "Database.Account.process(status)");
    ensure(activated, || "payment never reached the account status".into())
}

fn simplification() -> Outcome {
    for f in corpus() {
        let m = f.load().model;
        let (s, report) = simplify(&m);
        let removable = m.stages().iter().filter(|st| st.kind.is_movement()).count();
        ensure(report.removed.total() == removable, || format!("{}: removed {}", f.name, report.removed.total()))?;
        ensure(s.stages().iter().all(|st| !st.kind.is_movement()), || format!("{}: leftovers", f.name))?;
        let (before, after) = (flow_closure(&m), flow_closure(&s));
        let mut mismatches = 0;
        for u in s.stages() {
            for v in s.stages() {
                let (ou, ov) = (stage_index(&m, &u.id), stage_index(&m, &v.id));
                let (nu, nv) = (stage_index(&s, &u.id), stage_index(&s, &v.id));
                if before[ou.0][ov.0] != after[nu.0][nv.0] {
                    mismatches += 1;
                }
            }
        }
        ensure(mismatches == 0, || format!("{}: {mismatches} reachability mismatches", f.name))?;
        ensure(simplify(&s).0 == s, || format!("{}: not idempotent", f.name))?;
    }
    Ok(())
}

fn elementary_event_law() -> Outcome {
    for seed in 0..100 {
        let m = random_model(seed);
        let events = elementary_events(&m);
        ensure(events.len() == m.stages().len(), || format!("seed {seed}: count"))?;
        let options = SimOptions {
            seed,
            policy: Policy::Random,
            creation_cap: 2,
            max_steps: 500,
            ..SimOptions::default()
        };
        let trace = run(&m, &events, options);
        let mut executed = std::collections::HashMap::new();
        for r in &trace.records {
            match r.kind {
                RecordKind::StageExecuted => {
                    executed.insert(r.step, stage_index(&m, &r.id));
                }
                RecordKind::EventFired => {
                    let ev = events.iter().find(|e| e.id == r.id).unwrap();
                    ensure(ev.contains_stage(executed[&r.step]), || format!("seed {seed}: {}", r.id))?;
                }
                _ => {}
            }
        }
    }
    Ok(())
}

fn round_trip() -> Outcome {
    let mut cases: Vec<(String, tm_core::dsl::Lowered)> = corpus().iter().map(|f| (f.name.to_string(), f.load())).collect();
    for seed in 0..100 {
        let m = random_model(seed);
        cases.push((
            format!("random {seed}"),
            tm_core::dsl::Lowered {
                model: m,
                events: Vec::new(),
                behavior: BehaviorGraph::default(),
                warnings: Vec::new(),
            },
        ));
    }
    for (name, l) in cases {
        let text = format(&l.model, &l.events, &l.behavior);
        let ast = parse(&SourceFile::new(&name, text.as_str())).map_err(|e| format!("{name}: {e:?}"))?;
        let back = lower(&ast).map_err(|e| format!("{name}: {e:?}"))?;
        ensure(back.model == l.model && back.events == l.events, || format!("{name}: text round trip differs"))?;
        let json = to_json(&l.model, &l.events, &l.behavior);
        let (m, e, b) = from_json(&json).map_err(|e| format!("{name}: {e}"))?;
        ensure(to_json(&m, &e, &b) == json, || format!("{name}: JSON round trip differs"))?;
    }
    Ok(())
}

fn validator_catalog() -> Outcome {
    let wanted = [
        Code::FlowIllegal,
        Code::TriggerIllegal,
        Code::RefUnresolved,
        Code::NestCycle,
        Code::DupName,
        Code::StageOrphan,
        Code::RegionEmpty,
        Code::BehaviorInconsistent,
    ];
    let mut results: Vec<(String, Code, Vec<Code>)> = FIXTURES
        .iter()
        .map(|(name, code)| (name.to_string(), *code, diagnose(&fixture_text(name))))
        .collect();
    results.push(("nest cycle declarations".into(), Code::NestCycle, nest_cycle_codes()));
    results.push(("empty event region".into(), Code::RegionEmpty, region_empty_codes()));
    ensure(results.len() >= 8, || "fewer than 8 fixtures".into())?;
    for (name, code, got) in &results {
        ensure(exactly(got, *code), || format!("{name}: wanted only {code}, got {got:?}"))?;
    }
    for code in wanted {
        ensure(results.iter().any(|(_, c, _)| *c == code), || format!("no fixture for {code}"))?;
    }
    Ok(())
}

fn cli_determinism() -> Outcome {
    let file = format!("{}/corpus/tendering.tm", env!("CARGO_MANIFEST_DIR"));
    for flags in [
        vec!["--policy", "fifo", "--seed", "0"],
        vec!["--policy", "random", "--seed", "7", "--cap", "3"],
    ] {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let o = Command::new(env!("CARGO_BIN_EXE_tm"))
                .arg("simulate")
                .arg(&file)
                .args(&flags)
                .output()
                .map_err(|e| e.to_string())?;
            ensure(o.status.success(), || format!("exit {:?}", o.status.code()))?;
            outputs.push(o.stdout);
        }
        ensure(!outputs[0].is_empty() && outputs[0] == outputs[1], || format!("{flags:?}: traces differ"))?;
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("corpus validity", corpus_validity),
        ("dough/cookie chronology", dough_cookie_chronology),
        ("heating-water repetition", heating_water_repetition),
        ("tendering events", tendering_events),
        ("simplification correctness", simplification),
        ("elementary-event law", elementary_event_law),
        ("round-trip", round_trip),
        ("validator catalog", validator_catalog),
        ("determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("criterion {}: PASS  {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
