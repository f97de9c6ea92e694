//! The soundness campaign: safety, subject reduction, well-typed labels and
//! bounded safety over generated well-typed pairs.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::gen::{FuzzConfig, Generator};
use crate::epi::semantics::Analysis;
use crate::epi::{
    canonical, print_tenv, safe_bounded, typecheck_label, typecheck_process, typecheck_process_with, wrong_witness,
    Label, Process, TypeEnv, TypingOptions,
};

/// Exploration depth for subject reduction and bounded safety.
pub const CAMPAIGN_DEPTH: usize = 10;
/// States explored per case before the exploration is cut short.
pub const CASE_STATE_CAP: usize = 2_000;

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub case: usize,
    pub property: &'static str,
    pub gamma: String,
    pub process: String,
    pub trace: Vec<String>,
    pub detail: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "case {}: {} fails: {}", self.case, self.property, self.detail)?;
        writeln!(f, "  process: {}", self.process)?;
        for line in self.gamma.lines() {
            writeln!(f, "  env: {line}")?;
        }
        for (i, step) in self.trace.iter().enumerate() {
            writeln!(f, "  step {}: {step}", i + 1)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CampaignSummary {
    pub cases: usize,
    /// Generated pairs the checker rejected; the generator is at fault.
    pub generator_failures: usize,
    pub wrong_failures: usize,
    pub subject_reduction_failures: usize,
    pub label_failures: usize,
    pub now_safe_failures: usize,
    pub safe_bounded_failures: usize,
    /// Cases whose bounded-safety check hit the frontier cap.
    pub explosions: usize,
    /// Cases whose exploration stopped at the per-case state cap.
    pub truncated: usize,
    pub states: usize,
    pub labels: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl CampaignSummary {
    pub fn failures(&self) -> usize {
        self.generator_failures
            + self.wrong_failures
            + self.subject_reduction_failures
            + self.label_failures
            + self.now_safe_failures
            + self.safe_bounded_failures
    }
}

/// What to run per case.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CampaignChecks {
    pub explore: bool,
    pub bounded_safety: bool,
    pub depth: usize,
    pub frontier_cap: usize,
}

impl Default for CampaignChecks {
    fn default() -> Self {
        CampaignChecks {
            explore: true,
            bounded_safety: true,
            depth: CAMPAIGN_DEPTH,
            frontier_cap: crate::epi::DEFAULT_FRONTIER_CAP,
        }
    }
}

struct Case<'a> {
    index: usize,
    gamma: &'a TypeEnv,
    process: &'a Process,
}

impl Case<'_> {
    fn counterexample(&self, property: &'static str, trace: &[Label], detail: String) -> Counterexample {
        Counterexample {
            case: self.index,
            property,
            gamma: print_tenv(self.gamma),
            process: self.process.to_string(),
            trace: trace.iter().map(|l| l.to_string()).collect(),
            detail,
        }
    }
}

/// Explores τ and output transitions breadth-first. Each state is checked
/// under Γ extended with the names extruded on the way to it.
fn explore(case: &Case, depth: usize, summary: &mut CampaignSummary) {
    let mut seen: HashSet<Process> = HashSet::new();
    let mut frontier = vec![(case.gamma.clone(), case.process.clone(), Vec::<Label>::new())];
    seen.insert(canonical(case.process));
    let mut level = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (gamma, state, trace) in &frontier {
            summary.states += 1;
            if let Err(e) = typecheck_process(gamma, state) {
                summary.subject_reduction_failures += 1;
                let detail = format!("reached {state}, which does not typecheck: {e}");
                summary.counterexamples.push(case.counterexample("subject reduction", trace, detail));
                return;
            }
            if let Some(e) = wrong_witness(gamma, state) {
                summary.now_safe_failures += 1;
                let detail = format!("reached {state}, which is wrong: {e}");
                summary.counterexamples.push(case.counterexample("now-safe", trace, detail));
                return;
            }
            if level == depth {
                continue;
            }
            let analysis = Analysis::new(state);
            let mut moves = analysis.tau_transitions();
            moves.extend(analysis.outputs());
            for t in moves {
                summary.labels += 1;
                if let Err(e) = typecheck_label(gamma, &t.label) {
                    summary.label_failures += 1;
                    let mut trace = trace.clone();
                    trace.push(t.label.clone());
                    let detail = format!("label {} is ill-typed: {e}", t.label);
                    summary.counterexamples.push(case.counterexample("well-typed labels", &trace, detail));
                    return;
                }
                if !seen.insert(canonical(&t.target)) {
                    continue;
                }
                if seen.len() > CASE_STATE_CAP {
                    summary.truncated += 1;
                    return;
                }
                let extended = match &t.label {
                    Label::Send { extruded, .. } => gamma.extended(extruded.iter().map(|(n, b)| (n, b))),
                    _ => gamma.clone(),
                };
                let mut trace = trace.clone();
                trace.push(t.label);
                next.push((extended, t.target, trace));
            }
        }
        frontier = next;
        level += 1;
    }
}

fn run_case(case: &Case, checks: CampaignChecks, options: TypingOptions, summary: &mut CampaignSummary) {
    summary.cases += 1;
    if let Err(e) = typecheck_process_with(case.gamma, case.process, options) {
        summary.generator_failures += 1;
        let detail = format!("generated pair does not typecheck: {e}");
        summary.counterexamples.push(case.counterexample("generation", &[], detail));
        return;
    }
    if let Some(e) = wrong_witness(case.gamma, case.process) {
        summary.wrong_failures += 1;
        summary.counterexamples.push(case.counterexample("safety", &[], e.to_string()));
        return;
    }
    if checks.explore {
        explore(case, checks.depth, summary);
    }
    if checks.bounded_safety {
        match safe_bounded(case.gamma, case.process, checks.depth, checks.frontier_cap) {
            Ok(true) => {}
            Ok(false) => {
                summary.safe_bounded_failures += 1;
                let detail = format!("a state within {} steps is wrong", checks.depth);
                summary.counterexamples.push(case.counterexample("bounded safety", &[], detail));
            }
            Err(_) => summary.explosions += 1,
        }
    }
}

/// Runs the campaign over `config.count` generated pairs.
pub fn run_campaign(config: FuzzConfig, checks: CampaignChecks) -> CampaignSummary {
    campaign(Generator::new(config), config.count, checks, TypingOptions::default())
}

/// The campaign against a checker that skips the output object check, over
/// pairs that this weakened checker accepts. A sound harness finds failures.
pub fn run_mutated_campaign(config: FuzzConfig, checks: CampaignChecks) -> CampaignSummary {
    let lax = TypingOptions {
        check_output_objects: false,
    };
    campaign(Generator::mutated(config), config.count, checks, lax)
}

fn campaign(mut generator: Generator, count: usize, checks: CampaignChecks, options: TypingOptions) -> CampaignSummary {
    let mut summary = CampaignSummary::default();
    for index in 0..count {
        let (gamma, process) = generator.case();
        let case = Case {
            index,
            gamma: &gamma,
            process: &process,
        };
        run_case(&case, checks, options, &mut summary);
    }
    summary
}
