//! Acceptance criteria 1 to 10, one PASS/FAIL line each.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use epic_core::encode::check::{agree, correspond, AgreeVerdict, CorrespondVerdict};
use epic_core::encode::{loc_new, loc_read, loc_write};
use epic_core::epi::typing::TypeErrorKind;
use epic_core::epi::{
    alpha_eq, check_wellformed, explore_tau, parse_process, parse_tenv, print_process, typecheck_process, BaseType,
    Expr, Name, Process, Strategy, Value, DEFAULT_FRONTIER_CAP,
};
use epic_core::harness::{generate_corpus, run_campaign, run_lemmas, CampaignChecks, CampaignSummary, FuzzConfig};
use epic_core::wc::{
    parse_program, print_program, run_program, typecheck_program, typecheck_wc_envs, WcProgram, WcStm, DEFAULT_FUEL,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(rel)
}

fn corpus(dir: &str) -> Vec<(String, WcProgram)> {
    let mut out: Vec<(String, WcProgram)> = fs::read_dir(data("wc").join(dir))
        .expect("corpus directory")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "wc"))
        .map(|p| {
            let name = p.file_stem().expect("stem").to_string_lossy().into_owned();
            let program = parse_program(&fs::read_to_string(&p).expect("readable")).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, program)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn criterion_1() -> Verdict {
    let read = |f: &str| fs::read_to_string(data(f)).expect("readable");
    let gamma = match parse_tenv(&read("epi/ex42.tenv")) {
        Ok(g) => g,
        Err(e) => return verdict(false, format!("ex42.tenv: {e}")),
    };
    if check_wellformed(&gamma).is_err() {
        return verdict(false, "Γ is not well formed");
    }
    for f in ["ex42_a", "ex42_b", "ex42_c", "ex42_d", "ex42"] {
        let p = parse_process(&read(&format!("epi/{f}.epi"))).expect("parses");
        if let Err(e) = typecheck_process(&gamma, &p) {
            return verdict(false, format!("{f} rejected: {e}"));
        }
    }
    let forbidden = parse_process(&read("epi/ex42_forbidden.epi")).expect("parses");
    match typecheck_process(&gamma, &forbidden) {
        Err(e) if matches!(e.kind, TypeErrorKind::Subject(_)) => verdict(true, format!("4 typeable; forbidden: {e}")),
        Err(e) => verdict(false, format!("forbidden rejected without a subject error: {e}")),
        Ok(()) => verdict(false, "forbidden composition accepted"),
    }
}

fn campaign() -> CampaignSummary {
    run_campaign(
        FuzzConfig {
            count: 500,
            ..FuzzConfig::default()
        },
        CampaignChecks::default(),
    )
}

fn criterion_2(s: &CampaignSummary) -> Verdict {
    verdict(
        s.cases >= 500 && s.wrong_failures == 0 && s.generator_failures == 0,
        format!("{} cases, {} wrong, {} not typeable", s.cases, s.wrong_failures, s.generator_failures),
    )
}

fn criterion_3(s: &CampaignSummary) -> Verdict {
    verdict(
        s.cases >= 500 && s.subject_reduction_failures == 0 && s.label_failures == 0 && s.now_safe_failures == 0,
        format!(
            "depth {}: {} states, {} labels, {} subject reduction failures, {} label failures, {} now-safe failures, {} cases truncated at the per-case state cap",
            CampaignChecks::default().depth,
            s.states,
            s.labels,
            s.subject_reduction_failures,
            s.label_failures,
            s.now_safe_failures,
            s.truncated
        ),
    )
}

fn criterion_4(s: &CampaignSummary) -> Verdict {
    verdict(
        s.cases >= 500 && s.safe_bounded_failures == 0,
        format!("{} failures, {} state explosions", s.safe_bounded_failures, s.explosions),
    )
}

fn criterion_5() -> Verdict {
    let s = run_lemmas(FuzzConfig::default(), 200);
    let tallies = [("weakening", &s.weakening), ("strengthening", &s.strengthening), ("substitution", &s.substitution)];
    let pass = tallies.iter().all(|(_, t)| t.instances >= 200 && t.failures == 0);
    let parts: Vec<String> = tallies
        .iter()
        .map(|(n, t)| format!("{n} {}/{}", t.instances - t.failures, t.instances))
        .collect();
    let mut detail = parts.join(", ");
    if let Some(c) = tallies.iter().flat_map(|(_, t)| t.counterexamples.first()).next() {
        detail.push_str(&format!("; first counterexample: {c}"));
    }
    verdict(pass, detail)
}

/// Rules a type error is attributed to: the reporting rule, plus the
/// structural rules whose premise it sits under.
fn rules_covered(rule: &str, path: &str) -> Vec<String> {
    let mut out = vec![rule.to_string()];
    if path.contains("seq.") {
        out.push("t-seq".into());
    }
    if path.contains("/then") || path.contains("/else") {
        out.push("t-if".into());
    }
    if path.contains("/do") {
        out.push("t-while".into());
    }
    if path.contains("::") {
        out.push("t-env_M".into());
    }
    out
}

fn criterion_6() -> Verdict {
    let typed = corpus("typed");
    let ill = corpus("ill_typed");
    let mut counts: BTreeMap<CorrespondVerdict, usize> = BTreeMap::new();
    let mut problems = Vec::new();
    let mut covered = BTreeSet::new();
    for (expect_ok, set) in [(true, &typed), (false, &ill)] {
        for (name, p) in set {
            let r = correspond(p);
            *counts.entry(r.verdict).or_default() += 1;
            let expected = if expect_ok {
                CorrespondVerdict::AgreePositive
            } else {
                CorrespondVerdict::AgreeNegative
            };
            if r.verdict != expected && r.verdict != CorrespondVerdict::Untranslatable {
                problems.push(format!("{name}: {}", r.verdict));
            }
            if !expect_ok {
                if let Err(e) = typecheck_program(p) {
                    covered.extend(rules_covered(e.rule, &e.path));
                }
            }
        }
    }
    let required = ["t-decv", "t-assv", "t-assf", "t-seq", "t-if", "t-while", "t-call", "t-env_F", "t-env_M"];
    let missing: Vec<&str> = required.iter().copied().filter(|r| !covered.contains(*r)).collect();
    let disagree = counts.get(&CorrespondVerdict::Disagree).copied().unwrap_or(0);
    let untranslatable = counts.get(&CorrespondVerdict::Untranslatable).copied().unwrap_or(0);
    let pass = typed.len() + ill.len() >= 30
        && typed.len() >= 15
        && ill.len() >= 15
        && disagree == 0
        && problems.is_empty()
        && missing.is_empty();
    let mut detail = format!(
        "{} well-typed, {} ill-typed; {} AGREE-POSITIVE, {} AGREE-NEGATIVE, {disagree} DISAGREE, {untranslatable} UNTRANSLATABLE; rules {}",
        typed.len(),
        ill.len(),
        counts.get(&CorrespondVerdict::AgreePositive).copied().unwrap_or(0),
        counts.get(&CorrespondVerdict::AgreeNegative).copied().unwrap_or(0),
        covered.iter().cloned().collect::<Vec<_>>().join(" "),
    );
    if !missing.is_empty() {
        detail.push_str(&format!("; uncovered: {}", missing.join(" ")));
    }
    if !problems.is_empty() {
        detail.push_str(&format!("; {}", problems.join(", ")));
    }
    verdict(pass, detail)
}

fn criterion_7() -> Verdict {
    let mut checked = 0;
    let mut failures = Vec::new();
    for (name, p) in corpus("typed") {
        let Ok(gamma) = typecheck_program(&p) else {
            failures.push(format!("{name}: ill-typed"));
            continue;
        };
        match run_program(&p, DEFAULT_FUEL) {
            Ok(out) => {
                checked += 1;
                if let Err(e) = typecheck_wc_envs(&gamma, &out.env_t, &out.env_s, &out.env_v) {
                    failures.push(format!("{name}: {e}"));
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    verdict(
        failures.is_empty() && checked > 0,
        format!("{checked} terminating programs, {} failures {}", failures.len(), failures.join("; ")),
    )
}

#[derive(Default)]
struct Features {
    loops: bool,
    field_updates: bool,
    multi_arg_calls: bool,
    inter_class_calls: bool,
}

fn scan(s: &WcStm, in_class: Option<&Name>, f: &mut Features) {
    match s {
        WcStm::Skip | WcStm::AssignVar(..) => {}
        WcStm::AssignField(..) => f.field_updates = true,
        WcStm::VarDecl { body, .. } => scan(body, in_class, f),
        WcStm::Seq(a, b) | WcStm::If(_, a, b) => {
            scan(a, in_class, f);
            scan(b, in_class, f);
        }
        WcStm::While(_, body) => {
            f.loops = true;
            scan(body, in_class, f);
        }
        WcStm::Call { target, args, .. } => {
            f.multi_arg_calls |= args.len() >= 2;
            if let (Some(a), epic_core::wc::WcExpr::Val(Value::Name(b))) = (in_class, target) {
                f.inter_class_calls |= a != b;
            }
        }
    }
}

fn criterion_8() -> Verdict {
    let mut matched = 0;
    let mut problems = Vec::new();
    let mut features = Features::default();
    let programs = corpus("typed");
    for (name, p) in &programs {
        match agree(p, 10_000, Strategy::Deterministic, 0) {
            Ok(r) if r.verdict == AgreeVerdict::Match => {
                matched += 1;
                scan(&p.main, None, &mut features);
                for c in &p.classes {
                    for m in &c.methods {
                        scan(&m.body, Some(&c.name), &mut features);
                    }
                }
            }
            Ok(r) => problems.push(format!("{name}: {} {}", r.verdict, r.detail)),
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }
    let covered = features.loops && features.field_updates && features.multi_arg_calls && features.inter_class_calls;
    let mut detail = format!(
        "{matched}/{} MATCH; loops {}, field updates {}, multi-argument calls {}, inter-class calls {}",
        programs.len(),
        features.loops,
        features.field_updates,
        features.multi_arg_calls,
        features.inter_class_calls
    );
    if !problems.is_empty() {
        detail.push_str(&format!("; {}", problems.join("; ")));
    }
    verdict(matched >= 20 && problems.is_empty() && covered, detail)
}

/// One step of a cell program.
#[derive(Clone, Copy)]
enum CellOp {
    /// Read cell `c` and report the value on a fresh output channel.
    Read(usize),
    /// Write a constant to cell `c`.
    Write(usize, i64),
    /// Read cell `from` and write the value to cell `to`.
    Copy(usize, usize),
}

/// The sequential reading of a cell program: the final contents and the
/// value every read reports.
fn cell_oracle(init: &[i64], ops: &[CellOp]) -> (Vec<i64>, Vec<i64>) {
    let mut cells = init.to_vec();
    let mut reads = Vec::new();
    for op in ops {
        match *op {
            CellOp::Read(c) => reads.push(cells[c]),
            CellOp::Write(c, v) => cells[c] = v,
            CellOp::Copy(from, to) => cells[to] = cells[from],
        }
    }
    (cells, reads)
}

fn cell_name(c: usize) -> Name {
    Name::new(format!("cell{c}"))
}

fn cell_process(init: &[i64], ops: &[CellOp]) -> Process {
    let mut body = Process::Nil;
    let mut reads = ops.iter().filter(|o| matches!(o, CellOp::Read(_))).count();
    for (i, op) in ops.iter().enumerate().rev() {
        body = match *op {
            CellOp::Read(c) => {
                reads -= 1;
                let y = Name::new(format!("y{i}"));
                let report = Process::output(vec![Value::Name(Name::new(format!("out{reads}")))], vec![Expr::Val(Value::Name(y.clone()))], Process::Nil);
                loc_read(&[Value::Name(cell_name(c))], &y, Process::par(report, body))
            }
            CellOp::Write(c, v) => loc_write(&[Value::Name(cell_name(c))], &Name::new(format!("w{i}")), Expr::int(v), body),
            CellOp::Copy(from, to) => {
                let y = Name::new(format!("y{i}"));
                let write = loc_write(&[Value::Name(cell_name(to))], &Name::new(format!("w{i}")), Expr::Val(Value::Name(y.clone())), body);
                loc_read(&[Value::Name(cell_name(from))], &y, write)
            }
        };
    }
    init.iter()
        .enumerate()
        .rev()
        .fold(body, |acc, (c, v)| loc_new(&cell_name(c), &BaseType::Int, Expr::int(*v), acc))
}

/// Unguarded outputs of a process, as `subject!(objects)` strings. Names
/// bound by the `k`-th nested restriction are printed as `cell<k>`.
fn outputs(p: &Process, bound: &mut Vec<Name>, out: &mut Vec<String>) {
    let show = |v: &Value, bound: &[Name]| match v {
        Value::Name(n) => match bound.iter().position(|b| b == n) {
            Some(k) => cell_name(k).to_string(),
            None => n.to_string(),
        },
        other => other.to_string(),
    };
    match p {
        Process::Output { subject, objects, body } if body.is_nil() => {
            let s: Vec<String> = subject.iter().map(|v| show(v, bound)).collect();
            let o: Vec<String> = objects.iter().map(|e| e.to_string()).collect();
            out.push(format!("{}!({})", s.join("*"), o.join(", ")));
        }
        Process::Par(l, r) => {
            outputs(l, bound, out);
            outputs(r, bound, out);
        }
        Process::Restrict { bindings, body } => {
            bound.extend(bindings.iter().map(|(n, _)| n.clone()));
            outputs(body, bound, out);
        }
        Process::Nil => {}
        other => out.push(format!("guarded: {other}")),
    }
}

fn criterion_9() -> Verdict {
    use CellOp::*;
    let cases: Vec<(&str, Vec<i64>, Vec<CellOp>)> = vec![
        ("new", vec![5], vec![]),
        ("read restores", vec![5], vec![Read(0)]),
        ("write then read", vec![5], vec![Write(0, 7), Read(0)]),
        ("read, write, read", vec![5], vec![Read(0), Write(0, 7), Read(0)]),
        ("two writes", vec![0], vec![Write(0, 1), Write(0, 2), Read(0)]),
        ("copy", vec![3, 9], vec![Copy(0, 1), Read(1), Read(0)]),
        ("swap via third", vec![1, 2, 0], vec![Copy(0, 2), Copy(1, 0), Copy(2, 1), Read(0), Read(1)]),
    ];
    let mut failures = Vec::new();
    for (name, init, ops) in &cases {
        let (cells, reads) = cell_oracle(init, ops);
        let mut expected: Vec<String> = cells.iter().enumerate().map(|(c, v)| format!("{}!({v})", cell_name(c))).collect();
        expected.extend(reads.iter().enumerate().map(|(i, v)| format!("out{i}!({v})")));
        expected.sort();
        let p = cell_process(init, ops);
        match explore_tau(&p, 50, DEFAULT_FRONTIER_CAP) {
            Ok(e) if e.complete && e.quiescent.len() == 1 => {
                let mut got = Vec::new();
                outputs(&e.quiescent[0], &mut Vec::new(), &mut got);
                got.sort();
                if got != expected {
                    failures.push(format!("{name}: expected {expected:?}, got {got:?}"));
                }
            }
            Ok(e) => failures.push(format!("{name}: {} quiescent states, complete {}", e.quiescent.len(), e.complete)),
            Err(x) => failures.push(format!("{name}: {x}")),
        }
    }
    verdict(failures.is_empty(), format!("{}/{} unique outcomes match {}", cases.len() - failures.len(), cases.len(), failures.join("; ")))
}

fn criterion_10() -> Verdict {
    let terms = generate_corpus(FuzzConfig {
        count: 1000,
        seed: 10,
        ..FuzzConfig::default()
    });
    let mut epi_failures = 0;
    for (_, p) in &terms {
        match parse_process(&print_process(p)) {
            Ok(q) if alpha_eq(p, &q) => {}
            _ => epi_failures += 1,
        }
    }
    let mut wc_total = 0;
    let mut wc_failures = Vec::new();
    for dir in ["typed", "ill_typed", "diverging"] {
        for (name, p) in corpus(dir) {
            wc_total += 1;
            if parse_program(&print_program(&p)).ok().as_ref() != Some(&p) {
                wc_failures.push(name);
            }
        }
    }
    verdict(
        epi_failures == 0 && wc_failures.is_empty(),
        format!(
            "{}/{} epi terms, {}/{wc_total} WC programs {}",
            terms.len() - epi_failures,
            terms.len(),
            wc_total - wc_failures.len(),
            wc_failures.join(" ")
        ),
    )
}

/// Runs one criterion; `shared` is time already spent on its behalf.
fn report(n: usize, limit: Option<Duration>, shared: Duration, run: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let v = run();
    let elapsed = start.elapsed() + shared;
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let pass = v.pass && in_time;
    let budget = limit.map(|l| format!(" (limit {}s)", l.as_secs())).unwrap_or_default();
    let slow = if in_time { "" } else { " OVER TIME" };
    println!(
        "criterion {n:>2}: {} in {:.2}s{budget}{slow}: {}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        v.detail.trim_end()
    );
    pass
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut all = true;
    let none = Duration::ZERO;
    all &= report(1, Some(secs(1)), none, criterion_1);
    let start = Instant::now();
    let summary = campaign();
    let campaign_time = start.elapsed();
    for c in summary.counterexamples.iter().take(3) {
        println!("{c}");
    }
    all &= report(2, Some(secs(60)), campaign_time, || criterion_2(&summary));
    all &= report(3, Some(secs(300)), campaign_time, || criterion_3(&summary));
    all &= report(4, None, campaign_time, || criterion_4(&summary));
    all &= report(5, None, none, criterion_5);
    all &= report(6, Some(secs(30)), none, criterion_6);
    all &= report(7, None, none, criterion_7);
    all &= report(8, Some(secs(120)), none, criterion_8);
    all &= report(9, None, none, criterion_9);
    all &= report(10, None, none, criterion_10);
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
