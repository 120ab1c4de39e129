//! One line per acceptance criterion. Run with `cargo test --test acceptance`.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::HashSet;
use std::io::Write;
use std::process::{Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::Request;
use axum::Router;
use common::{naive_terms, object, SpyConnector, IS_ON_TABLE, MOVE_TABLE};
use http_body_util::BodyExt;
use nlui_cli::service::{router, AppState, CommandResponse};
use nlui_core::app::{Connector, Outcome};
use nlui_core::calculus::{type_of, TypeEnv};
use nlui_core::grammar::{
    beta_normalize, check_admissible_typing, derive, derive_bounded, derive_meanings, parse_category, respects_imperative_structure, Category,
    Item,
};
use nlui_core::interp::check_preservation;
use nlui_core::random::TermGenerator;
use nlui_core::toyblocks::{self, LiveConnector, ToyBlocksWorld};
use nlui_core::{evaluate, parse_expr, CommandOutcome, Expr, Session, DEFAULT_FUEL};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tower::ServiceExt;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

const MOVE_TERM: &str = "(\\x:Obj. \\y:Obj. move(x, y)) b1() ((\\x:Obj. x) b2())";

const MOVE_TRACE: [&str; 7] = [
    "Red App 1 | (\\x:Obj. \\y:Obj. move(x, y)) b1() ((\\x:Obj. x) b2())",
    "Red App 3 | (\\y:Obj. move(b1(), y)) ((\\x:Obj. x) b2())",
    "Red ACon 1 | move(b1(), (\\x:Obj. x) b2())",
    "Red ACon 1 | move(@b1, (\\x:Obj. x) b2())",
    "Red ACon 1 | move(@b1, b2())",
    "Red ACon 3 | move(@b1, @b2)",
    "value: skip",
];

fn end_to_end() -> Check {
    let started = Instant::now();
    let mut child = Command::new(env!("CARGO_BIN_EXE_nlui"))
        .args(["repl", "--app", "toyblocks", "--trace"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .map_err(|e| e.to_string())?;
    child
        .stdin
        .take()
        .expect("piped stdin")
        .write_all(b"move block one on block two\n:state\n:quit\n")
        .map_err(|e| e.to_string())?;
    let out = child.wait_with_output().map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let stdout = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let lines: Vec<&str> = stdout.lines().collect();
    ensure(out.status.success(), || format!("exit status {}", out.status))?;
    ensure(lines.first() == Some(&format!("term: {MOVE_TERM}").as_str()), || format!("term line {:?}", lines.first()))?;
    ensure(lines.get(1..8) == Some(&MOVE_TRACE[..]), || format!("trace {:?}", lines.get(1..8)))?;
    ensure(lines.get(8) == Some(&"ok"), || format!("summary {:?}", lines.get(8)))?;
    ensure(lines.contains(&"is_on(block 1, block 2) = true"), || "block 1 not on block 2".into())?;
    ensure(lines.contains(&"is_on(block 1, the table) = false"), || "block 1 still on the table".into())?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("6 transitions, {elapsed:.0?}"))
}

fn direct_move_trace() -> Check {
    let iface = toyblocks::descriptor();
    let e = parse_expr("(\\x:Obj. \\y:Obj. move(x, y)) b1() b2()", &iface).map_err(|e| e.to_string())?;
    let mut conn = toyblocks::model_connector();
    let trace = evaluate(&mut conn, &e, DEFAULT_FUEL).map_err(|e| e.to_string())?;
    let expected = [
        "(\\x:Obj. \\y:Obj. move(x, y)) b1() b2()",
        "(\\y:Obj. move(b1(), y)) b2()",
        "move(b1(), b2())",
        "move(@b1, b2())",
        "move(@b1, @b2)",
        "skip",
    ];
    let snapshots: Vec<String> = trace.snapshots().map(|e| e.to_string()).collect();
    ensure(snapshots == expected, || format!("{snapshots:?}"))?;
    ensure(conn.current() == "s2", || format!("ended in {}", conn.current()))?;
    Ok("5 transitions ending (s2, skip)".into())
}

fn exception_path() -> Check {
    let (spy, log) = SpyConnector::new(toyblocks::live_connector());
    let mut session = Session::new(toyblocks::lexicon(), spy);
    let before = session.state_view().map_err(|e| e.to_string())?;
    let r = session.run_command("move the table on block one");
    ensure(r.term.is_some(), || format!("did not parse: {}", r.summary()))?;
    ensure(matches!(r.outcome, CommandOutcome::Exception { .. }), || r.summary())?;
    ensure(r.trace.as_ref().is_some_and(|t| t.value == Expr::Exception), || "trace does not end in the exception".into())?;
    let performed = log.lock().unwrap().performed.len();
    ensure(performed == 0, || format!("{performed} actions performed"))?;
    ensure(r.state_view == before, || "state changed".into())?;
    Ok(r.summary())
}

fn pi_tables() -> Check {
    let mut model = toyblocks::model_connector();
    for (s, x, y, expected) in IS_ON_TABLE {
        let mut live = LiveConnector::new(ToyBlocksWorld::from_state(s).expect("known state"));
        model.set_current(s).map_err(|e| e.to_string())?;
        let args = [object(x), object(y)];
        for (name, got) in [("model", model.query_predicate("is_on", &args)), ("live", live.query_predicate("is_on", &args))] {
            ensure(got == Ok(Outcome::Value(expected)), || format!("{name}: is_on({x}, {y}) at {s} = {got:?}"))?;
        }
    }
    for (s, x, y, next) in MOVE_TABLE {
        let mut live = LiveConnector::new(ToyBlocksWorld::from_state(s).expect("known state"));
        model.set_current(s).map_err(|e| e.to_string())?;
        let args = [object(x), object(y)];
        ensure(model.perform_action("move", &args) == Ok(Outcome::Value(())), || format!("model move({x}, {y})"))?;
        ensure(live.perform_action("move", &args) == Ok(Outcome::Value(())), || format!("live move({x}, {y})"))?;
        ensure(model.current() == next, || format!("model: move({x}, {y}) from {s} gave {}", model.current()))?;
        ensure(live.world().state_label() == next, || format!("live: move({x}, {y}) from {s}"))?;
    }
    Ok("18 is_on + 18 move entries, both connectors".into())
}

const STATES: [&str; 3] = ["s1", "s2", "s3"];

fn evaluation_properties() -> Check {
    let started = Instant::now();
    let iface = toyblocks::descriptor();
    let generator = TermGenerator::new(&iface);
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    for i in 0..1000 {
        let (ty, e) = generator.any_term(&mut rng, 6);
        ensure(e.depth() <= 6, || format!("too deep: {e}"))?;
        ensure(type_of(&TypeEnv::new(), &e, &iface).as_ref() == Ok(&ty), || format!("ill-typed: {e}"))?;
        let start = STATES[i % 3];
        let mut conn = toyblocks::model_connector();
        conn.set_current(start).map_err(|e| e.to_string())?;
        let (mut spy, log) = SpyConnector::new(conn);
        let trace = evaluate(&mut spy, &e, 10_000).map_err(|err| format!("{e}: {err}"))?;
        ensure(trace.value.is_value(), || format!("stuck: {e}"))?;
        ensure(check_preservation(&e, &trace, &iface), || format!("preservation: {e}"))?;
        if ty.is_pure() {
            ensure(spy.inner().current() == start, || format!("pure term changed state: {e}"))?;
        }
        ensure(log.lock().unwrap().unguarded.is_empty(), || format!("unguarded call: {e}"))?;
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("1000 terms, {elapsed:.0?}"))
}

const GOALS: [&str; 8] = ["np", "pp", "s", "a", "a/pp", "np\\s", "a/a", "pp/np"];
const WORDS: [&str; 9] = ["move", "block", "one", "two", "on", "the", "table", "is", "if"];
const PHRASES: [&str; 7] = ["block one", "block two", "the table", "on", "is", "if", "move"];

fn grammar_typing_properties() -> Check {
    let lex = toyblocks::lexicon();
    let iface = toyblocks::descriptor();
    let goals: Vec<Category> = GOALS.iter().map(|g| parse_category(g).expect("goal")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e02);
    let (mut checked, mut skipped) = (0usize, 0usize);
    for _ in 0..2000 {
        let len = rng.random_range(1..=8);
        let words: Vec<&str> = if rng.random_bool(0.4) {
            (0..len).map(|_| *WORDS.choose(&mut rng).expect("words")).collect()
        } else {
            (0..len).flat_map(|_| PHRASES.choose(&mut rng).expect("phrases").split(' ')).take(8).collect()
        };
        for seg in lex.segmentations(&words) {
            let ant: Vec<Item> = seg.iter().map(|e| (e.readings[0].term.clone(), e.readings[0].category.clone())).collect();
            for goal in &goals {
                let Ok(found) = derive_bounded(&ant, goal, lex.types(), 200_000) else {
                    skipped += 1;
                    continue;
                };
                for (d, _) in found.iter().filter(|(d, _)| respects_imperative_structure(d, lex.types())) {
                    ensure(check_admissible_typing(d, lex.types(), &iface), || format!("{words:?} => {goal}:\n{d}"))?;
                    checked += 1;
                }
            }
        }
    }
    ensure(checked > 100, || format!("only {checked} derivations checked"))?;
    Ok(format!("{checked} derivations checked, {skipped} searches over budget"))
}

fn meanings(terms: impl IntoIterator<Item = Expr>) -> Result<HashSet<Expr>, String> {
    terms
        .into_iter()
        .map(|t| beta_normalize(&t, 10_000).map(|n| n.alpha_canonical()).map_err(|e| e.to_string()))
        .collect()
}

fn oracle_equivalence() -> Check {
    let lex = toyblocks::lexicon();
    let types = lex.types();
    let items: Vec<Item> = lex
        .entries()
        .iter()
        .flat_map(|e| e.readings.iter().map(|r| (r.term.clone(), r.category.clone())))
        .collect();
    let goals: Vec<Category> = GOALS.iter().map(|g| parse_category(g).expect("goal")).collect();
    let mut layer: Vec<Vec<Item>> = vec![vec![]];
    let (mut sequents, mut derivable) = (0usize, 0usize);
    for _ in 0..4 {
        layer = layer
            .iter()
            .flat_map(|prefix| {
                items.iter().map(move |item| {
                    let mut next = prefix.clone();
                    next.push(item.clone());
                    next
                })
            })
            .collect();
        for ant in &layer {
            for goal in &goals {
                let all = derive(ant, goal, types);
                let found = meanings(all.iter().map(|(_, t)| t.clone()))?;
                let expected = meanings(naive_terms(ant, goal, types))?;
                ensure(found == expected, || format!("{ant:?} => {goal}"))?;
                let respecting = meanings(
                    all.iter().filter(|(d, _)| respects_imperative_structure(d, types)).map(|(_, t)| t.clone()),
                )?;
                let focused = derive_meanings(ant, goal, types, usize::MAX).map_err(|e| e.to_string())?;
                let focused = meanings(focused.into_iter().map(|m| m.term))?;
                ensure(focused == respecting, || format!("focused search differs on {ant:?} => {goal}"))?;
                sequents += 1;
                derivable += usize::from(!found.is_empty());
            }
        }
    }
    Ok(format!("{sequents} sequents, {derivable} derivable"))
}

async fn state(app: &Router) -> Result<Vec<u8>, String> {
    let resp = app.clone().oneshot(Request::get("/state").body(Body::empty()).expect("request")).await.map_err(|e| e.to_string())?;
    Ok(resp.into_body().collect().await.map_err(|e| e.to_string())?.to_bytes().to_vec())
}

async fn command(app: &Router, sentence: &str) -> Result<CommandResponse, String> {
    let body = serde_json::json!({ "sentence": sentence }).to_string();
    let req = Request::post("/command").header("content-type", "application/json").body(Body::from(body)).expect("request");
    let resp = app.clone().oneshot(req).await.map_err(|e| e.to_string())?;
    let bytes = resp.into_body().collect().await.map_err(|e| e.to_string())?.to_bytes();
    serde_json::from_slice(&bytes).map_err(|e| e.to_string())
}

async fn ask(app: &Router, expected: bool) -> Result<(), String> {
    let before = state(app).await?;
    let r = command(app, "block one is on the table?").await?;
    ensure(r.kind == "query" && r.answer == Some(expected), || format!("{r:?}"))?;
    let after = state(app).await?;
    ensure(before == after, || "GET /state changed".into())
}

fn query_purity() -> Check {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    runtime.block_on(async {
        let app = router(AppState::new(Session::toyblocks()));
        ask(&app, true).await?;
        let r = command(&app, "move block one on block two").await?;
        ensure(r.outcome == "ok", || format!("{r:?}"))?;
        ask(&app, false).await?;
        Ok("yes at s1, no at s2, /state unchanged".into())
    })
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("traced move command through the REPL", end_to_end),
        ("direct move term against the model", direct_move_trace),
        ("exception path never invokes the action", exception_path),
        ("pi-table conformance", pi_tables),
        ("random terms terminate, stay pure and keep their types", evaluation_properties),
        ("derived terms have the type of their category", grammar_typing_properties),
        ("proof search oracle equivalence up to 4 items", oracle_equivalence),
        ("query purity over HTTP", query_purity),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(note) => println!("PASS  {name} ({note})"),
            Err(reason) => {
                failed += 1;
                println!("FAIL  {name}: {reason}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
