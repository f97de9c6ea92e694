//! `epic`: checking, running and compiling epi and WC programs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use epic_core::encode::check::{agree, correspond, AgreeVerdict, CorrespondVerdict};
use epic_core::encode::compile;
use epic_core::epi::{
    check_wellformed, explore_tau, frontier_cap, parse_process, parse_tenv, print_process, print_tenv, transitions,
    typecheck_process, wrong_witness, Process, Runner, Strategy, TypeEnv,
};
use epic_core::harness::{run_campaign, CampaignChecks, FuzzConfig};
use epic_core::wc::{parse_program, run_program, typecheck_program, WcProgram, DEFAULT_FUEL};
use serde_json::{json, Value as Json};

#[derive(Parser)]
#[command(name = "epic", version, about = "Workbench for the epi calculus and the WC to epi compiler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RunStrategy {
    Deterministic,
    Random,
    /// Breadth-first exploration of every τ-path up to `--depth`.
    Exhaustive,
}

impl RunStrategy {
    fn single(self) -> Option<Strategy> {
        match self {
            RunStrategy::Deterministic => Some(Strategy::Deterministic),
            RunStrategy::Random => Some(Strategy::Random),
            RunStrategy::Exhaustive => None,
        }
    }
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Clone)]
struct Running {
    #[arg(long, default_value_t = 10_000)]
    max_steps: usize,
    #[arg(long, default_value_t = 50)]
    depth: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "deterministic")]
    strategy: RunStrategy,
}

#[derive(Subcommand)]
enum Command {
    /// Type-check a process under a type environment.
    Check {
        file: PathBuf,
        #[arg(long)]
        types: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// List the transitions enabled in a process.
    Step {
        file: PathBuf,
        #[arg(long)]
        types: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a process by τ-steps.
    Run {
        file: PathBuf,
        #[arg(long)]
        types: Option<PathBuf>,
        #[command(flatten)]
        running: Running,
        #[command(flatten)]
        common: Common,
    },
    /// Type-check a WC program.
    WcCheck {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a WC program and print its final store.
    WcRun {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compile a WC program to a process and a type environment.
    Compile {
        file: PathBuf,
        /// Writes PREFIX.epi, PREFIX.tenv and PREFIX.json.
        #[arg(short = 'o')]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare the WC verdict with the verdict on the translation.
    Correspond {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare the final store of a WC run with the compiled run.
    Agree {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        running: Running,
        #[command(flatten)]
        common: Common,
    },
    /// `wc check` and `wc run`, spelled with a space.
    #[command(hide = true)]
    Wc {
        #[command(subcommand)]
        command: WcCommand,
    },
    /// Run the soundness campaign over generated well-typed processes.
    Fuzz {
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exploration depth per case.
        #[arg(long, default_value_t = epic_core::harness::CAMPAIGN_DEPTH)]
        depth: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum WcCommand {
    Check {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    Run {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

/// A failed command: the exit code and the diagnostic for standard error.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type Outcome = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_process(path: &Path) -> Result<Process, Failure> {
    parse_process(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_tenv(path: Option<&PathBuf>) -> Result<TypeEnv, Failure> {
    match path {
        None => Ok(TypeEnv::default()),
        Some(p) => parse_tenv(&read(p)?).map_err(|e| usage(format!("{}: {e}", p.display()))),
    }
}

fn load_program(path: &Path) -> Result<WcProgram, Failure> {
    parse_program(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(format: Format, text: &str, json: Json) {
    match format {
        Format::Text => {
            if !text.is_empty() {
                println!("{}", text.trim_end());
            }
        }
        Format::Json => println!("{}", serde_json::to_string_pretty(&json).expect("serialisable")),
    }
}

fn cmd_check(file: &Path, types: Option<&PathBuf>, format: Format) -> Outcome {
    let p = load_process(file)?;
    let gamma = load_tenv(types)?;
    if let Err(diags) = check_wellformed(&gamma) {
        let ds: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        for d in &ds {
            eprintln!("ill-formed environment: {d}");
        }
        emit(format, "ill-formed", json!({"verdict": "ill-formed", "diagnostics": ds}));
        return Ok(false);
    }
    match typecheck_process(&gamma, &p) {
        Ok(()) => {
            emit(format, "ok", json!({"verdict": "ok"}));
            Ok(true)
        }
        Err(e) => {
            eprintln!("{e}");
            let witness = wrong_witness(&gamma, &p).map(|w| w.to_string());
            if let Some(w) = &witness {
                eprintln!("not now-safe: {w}");
            }
            emit(
                format,
                "ill-typed",
                json!({"verdict": "ill-typed", "error": e.to_string(), "wrong": witness}),
            );
            Ok(false)
        }
    }
}

fn cmd_step(file: &Path, types: Option<&PathBuf>, format: Format) -> Outcome {
    let p = load_process(file)?;
    let gamma = types.map(|_| load_tenv(types)).transpose()?;
    let set = transitions(&p, &[]);
    for d in &set.diagnostics {
        eprintln!("{d}");
    }
    let safe: Vec<Option<bool>> = set
        .transitions
        .iter()
        .map(|t| gamma.as_ref().map(|g| wrong_witness(g, &t.target).is_none()))
        .collect();
    let text: Vec<String> = set
        .transitions
        .iter()
        .zip(&safe)
        .map(|(t, s)| {
            let mark = if *s == Some(false) { "  [not now-safe]" } else { "" };
            format!("{}: {}{mark}", t.label, t.target)
        })
        .collect();
    let json: Vec<Json> = set
        .transitions
        .iter()
        .zip(&safe)
        .map(|(t, s)| json!({"label": t.label.to_string(), "process": print_process(&t.target), "now_safe": s}))
        .collect();
    emit(format, &text.join("\n"), json!({"transitions": json, "diagnostics": set.diagnostics}));
    Ok(safe.iter().all(|s| *s != Some(false)))
}

fn cmd_run(file: &Path, types: Option<&PathBuf>, r: &Running, format: Format) -> Outcome {
    let p = load_process(file)?;
    let gamma = types.map(|_| load_tenv(types)).transpose()?;
    let Some(strategy) = r.strategy.single() else {
        return explore(&p, gamma.as_ref(), r.depth, format);
    };
    let mut runner = Runner::new(&p, strategy, r.seed);
    let mut lines = Vec::new();
    let mut trace = Vec::new();
    while runner.steps() < r.max_steps {
        let Some(t) = runner.step() else { break };
        lines.push(format!("τ: {}", t.target));
        trace.push(json!({"step": runner.steps(), "label": t.label.to_string(), "process": print_process(&t.target)}));
    }
    let quiescent = runner.is_quiescent() || transitions(runner.state(), &[]).transitions.iter().all(|t| !t.label.is_tau());
    let safe = gamma.as_ref().map(|g| wrong_witness(g, runner.state()).is_none());
    lines.push(if quiescent {
        format!("quiescent after {} steps", runner.steps())
    } else {
        format!("stopped after {} steps", runner.steps())
    });
    if safe == Some(false) {
        eprintln!("final state is not now-safe");
    }
    emit(
        format,
        &lines.join("\n"),
        json!({"trace": trace, "steps": runner.steps(), "quiescent": quiescent, "now_safe": safe}),
    );
    Ok(safe != Some(false))
}

fn explore(p: &Process, gamma: Option<&TypeEnv>, depth: usize, format: Format) -> Outcome {
    let cap = frontier_cap();
    let e = match explore_tau(p, depth, cap) {
        Ok(e) => e,
        Err(x) => {
            eprintln!("{x}");
            emit(format, "state explosion", json!({"verdict": "state-explosion", "error": x.to_string()}));
            return Ok(false);
        }
    };
    let unsafe_states: Vec<String> = gamma
        .map(|g| e.states.iter().filter(|s| wrong_witness(g, s).is_some()).map(print_process).collect())
        .unwrap_or_default();
    let mut lines = vec![format!(
        "{} states, {} quiescent{}",
        e.states.len(),
        e.quiescent.len(),
        if e.complete { "" } else { ", depth exhausted" }
    )];
    lines.extend(e.quiescent.iter().map(|q| format!("quiescent: {q}")));
    lines.extend(unsafe_states.iter().map(|s| format!("not now-safe: {s}")));
    emit(
        format,
        &lines.join("\n"),
        json!({
            "states": e.states.len(),
            "complete": e.complete,
            "quiescent": e.quiescent.iter().map(print_process).collect::<Vec<_>>(),
            "unsafe": unsafe_states,
            "diagnostics": e.diagnostics,
        }),
    );
    Ok(unsafe_states.is_empty())
}

fn cmd_wc_check(file: &Path, format: Format) -> Outcome {
    let p = load_program(file)?;
    match typecheck_program(&p) {
        Ok(_) => {
            emit(format, "ok", json!({"verdict": "ok"}));
            Ok(true)
        }
        Err(e) => {
            eprintln!("{e}");
            emit(format, "ill-typed", json!({"verdict": "ill-typed", "error": e.to_string()}));
            Ok(false)
        }
    }
}

fn cmd_wc_run(file: &Path, format: Format) -> Outcome {
    let p = load_program(file)?;
    match run_program(&p, DEFAULT_FUEL) {
        Ok(out) => {
            let mut lines: Vec<String> = out.fields().iter().map(|(a, f, v)| format!("{a}.{f} = {v}")).collect();
            lines.extend(out.env_v.iter().map(|(x, v)| format!("{x} = {v}")));
            let fields: serde_json::Map<String, Json> =
                out.fields().iter().map(|(a, f, v)| (format!("{a}.{f}"), json!(v.to_string()))).collect();
            let vars: serde_json::Map<String, Json> =
                out.env_v.iter().map(|(x, v)| (x.to_string(), json!(v.to_string()))).collect();
            emit(format, &lines.join("\n"), json!({"fields": fields, "variables": vars}));
            Ok(true)
        }
        Err(e) => {
            eprintln!("{e}");
            emit(format, "", json!({"error": e.to_string()}));
            Ok(false)
        }
    }
}

fn cmd_compile(file: &Path, output: Option<&PathBuf>, format: Format) -> Outcome {
    let p = load_program(file)?;
    let unit = match compile(&p) {
        Ok(u) => u,
        Err(e) => {
            eprintln!("{e}");
            emit(format, "", json!({"error": e.to_string()}));
            return Ok(false);
        }
    };
    let process = print_process(&unit.process);
    let tenv = print_tenv(&unit.gamma);
    let decoder = unit.decoder_json();
    match output {
        Some(prefix) => {
            let write = |ext: &str, body: &str| {
                let path = prefix.with_extension(ext);
                fs::write(&path, body).map_err(|e| usage(format!("{}: {e}", path.display())))
            };
            write("epi", &format!("{process}\n"))?;
            write("tenv", &tenv)?;
            write("json", &format!("{}\n", serde_json::to_string_pretty(&decoder).expect("serialisable")))?;
        }
        None => emit(
            format,
            &format!("{process}\n\n{tenv}"),
            json!({"process": process, "types": tenv, "decoder": decoder}),
        ),
    }
    Ok(true)
}

fn cmd_correspond(files: &[PathBuf], format: Format) -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    let mut reports = Vec::new();
    for f in files {
        let report = correspond(&load_program(f)?);
        ok &= report.verdict != CorrespondVerdict::Disagree;
        if let Some(u) = &report.untranslatable {
            eprintln!("{}: untranslatable: {u}", f.display());
        }
        lines.push(if files.len() == 1 {
            report.verdict.to_string()
        } else {
            format!("{}: {}", f.display(), report.verdict)
        });
        let mut j = serde_json::to_value(&report).expect("serialisable");
        j["file"] = json!(f.display().to_string());
        reports.push(j);
    }
    let json = if files.len() == 1 { reports.remove(0) } else { Json::Array(reports) };
    emit(format, &lines.join("\n"), json);
    Ok(ok)
}

fn cmd_agree(files: &[PathBuf], r: &Running, format: Format) -> Outcome {
    let Some(strategy) = r.strategy.single() else {
        return Err(usage("agree runs one path; use --strategy deterministic or random"));
    };
    let mut ok = true;
    let mut lines = Vec::new();
    let mut reports = Vec::new();
    for f in files {
        let p = load_program(f)?;
        let prefix = if files.len() == 1 { String::new() } else { format!("{}: ", f.display()) };
        match agree(&p, r.max_steps, strategy, r.seed) {
            Ok(report) => {
                ok &= report.verdict == AgreeVerdict::Match;
                if !report.detail.is_empty() {
                    eprintln!("{prefix}{}", report.detail);
                }
                lines.push(format!("{prefix}{} {}", report.verdict, report.store_text()));
                reports.push(json!({
                    "file": f.display().to_string(),
                    "verdict": report.verdict,
                    "store": report.store_text(),
                    "steps": report.steps,
                    "detail": report.detail,
                }));
            }
            Err(e) => {
                ok = false;
                eprintln!("{prefix}{e}");
                lines.push(format!("{prefix}ERROR"));
                reports.push(json!({"file": f.display().to_string(), "error": e}));
            }
        }
    }
    let json = if files.len() == 1 { reports.remove(0) } else { Json::Array(reports) };
    emit(format, &lines.join("\n"), json);
    Ok(ok)
}

fn cmd_fuzz(count: usize, seed: u64, depth: usize, format: Format) -> Outcome {
    let config = FuzzConfig {
        count,
        seed,
        ..FuzzConfig::default()
    };
    let checks = CampaignChecks {
        depth,
        frontier_cap: frontier_cap(),
        ..CampaignChecks::default()
    };
    let s = run_campaign(config, checks);
    for c in &s.counterexamples {
        eprintln!("{c}");
    }
    let text = format!(
        "{} cases, {} states, {} labels, {} failures ({} wrong, {} subject reduction, {} labels, {} now-safe, {} bounded safety, {} generator), {} explosions, {} truncated",
        s.cases,
        s.states,
        s.labels,
        s.failures(),
        s.wrong_failures,
        s.subject_reduction_failures,
        s.label_failures,
        s.now_safe_failures,
        s.safe_bounded_failures,
        s.generator_failures,
        s.explosions,
        s.truncated,
    );
    let mut j = serde_json::to_value(&s).expect("serialisable");
    j["config"] = serde_json::to_value(config).expect("serialisable");
    j["failures"] = json!(s.failures());
    emit(format, &text, j);
    Ok(s.failures() == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { file, types, common } => cmd_check(file, types.as_ref(), common.format),
        Command::Step { file, types, common } => cmd_step(file, types.as_ref(), common.format),
        Command::Run {
            file,
            types,
            running,
            common,
        } => cmd_run(file, types.as_ref(), running, common.format),
        Command::WcCheck { file, common } => cmd_wc_check(file, common.format),
        Command::WcRun { file, common } => cmd_wc_run(file, common.format),
        Command::Wc {
            command: WcCommand::Check { file, common },
        } => cmd_wc_check(file, common.format),
        Command::Wc {
            command: WcCommand::Run { file, common },
        } => cmd_wc_run(file, common.format),
        Command::Compile { file, output, common } => cmd_compile(file, output.as_ref(), common.format),
        Command::Correspond { files, common } => cmd_correspond(files, common.format),
        Command::Agree { files, running, common } => cmd_agree(files, running, common.format),
        Command::Fuzz {
            count,
            seed,
            depth,
            common,
        } => cmd_fuzz(*count, *seed, *depth, common.format),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
