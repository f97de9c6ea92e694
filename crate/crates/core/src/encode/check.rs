//! Comparing WC with its translation: typing verdicts and final stores.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::decode::{decode_fields, has_terminated, prune};
use super::{compile, CompilationUnit};
use crate::epi::semantics::Analysis;
use crate::epi::{check_wellformed, typecheck_process, Name, Process, Strategy, Value};
use crate::wc::eval::{run_program, ExecError, DEFAULT_FUEL};
use crate::wc::types::typecheck_program;
use crate::wc::WcProgram;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CorrespondVerdict {
    #[serde(rename = "AGREE-POSITIVE")]
    AgreePositive,
    #[serde(rename = "AGREE-NEGATIVE")]
    AgreeNegative,
    #[serde(rename = "DISAGREE")]
    Disagree,
    #[serde(rename = "UNTRANSLATABLE")]
    Untranslatable,
}

impl fmt::Display for CorrespondVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorrespondVerdict::AgreePositive => "AGREE-POSITIVE",
            CorrespondVerdict::AgreeNegative => "AGREE-NEGATIVE",
            CorrespondVerdict::Disagree => "DISAGREE",
            CorrespondVerdict::Untranslatable => "UNTRANSLATABLE",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrespondReport {
    pub verdict: CorrespondVerdict,
    /// The WC type error, if any.
    pub wc_error: Option<String>,
    /// The epi type error, if the program was translated and rejected.
    pub epi_error: Option<String>,
    /// Why the program could not be translated.
    pub untranslatable: Option<String>,
}

impl CorrespondReport {
    pub fn wc_ok(&self) -> bool {
        self.wc_error.is_none()
    }
}

/// Type-checks the translation of a unit: Γ must be well formed and the
/// process well typed under it.
pub fn check_unit(unit: &CompilationUnit) -> Result<(), String> {
    if let Err(diags) = check_wellformed(&unit.gamma) {
        let ds: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        return Err(format!("ill-formed environment: {}", ds.join("; ")));
    }
    typecheck_process(&unit.gamma, &unit.process).map_err(|e| e.to_string())
}

/// Checks the program in WC and its translation in epi, and compares the
/// two verdicts.
pub fn correspond(program: &WcProgram) -> CorrespondReport {
    let wc_error = typecheck_program(program).err().map(|e| e.to_string());
    let unit = match compile(program) {
        Ok(unit) => unit,
        Err(e) => {
            return CorrespondReport {
                verdict: CorrespondVerdict::Untranslatable,
                wc_error,
                epi_error: None,
                untranslatable: Some(e.0),
            }
        }
    };
    let epi_error = check_unit(&unit).err();
    let verdict = match (wc_error.is_none(), epi_error.is_none()) {
        (true, true) => CorrespondVerdict::AgreePositive,
        (false, false) => CorrespondVerdict::AgreeNegative,
        _ => CorrespondVerdict::Disagree,
    };
    CorrespondReport {
        verdict,
        wc_error,
        epi_error,
        untranslatable: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AgreeVerdict {
    #[serde(rename = "MATCH")]
    Match,
    #[serde(rename = "MISMATCH")]
    Mismatch,
    #[serde(rename = "NONTERMINATING")]
    Nonterminating,
}

impl fmt::Display for AgreeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AgreeVerdict::Match => "MATCH",
            AgreeVerdict::Mismatch => "MISMATCH",
            AgreeVerdict::Nonterminating => "NONTERMINATING",
        })
    }
}

pub type FieldStore = BTreeMap<(Name, Name), Value>;

#[derive(Clone, Debug)]
pub struct AgreeReport {
    pub verdict: AgreeVerdict,
    /// Final store of the WC run, if it terminated.
    pub wc_fields: Option<FieldStore>,
    /// Decoded store of the epi run, if it terminated.
    pub epi_fields: Option<FieldStore>,
    pub steps: usize,
    pub detail: String,
}

/// How a run of the compiled process ended.
enum EpiEnd {
    Terminated(Process),
    Stuck,
    OutOfSteps,
}

fn run_compiled(p: &Process, strategy: Strategy, max_steps: usize, seed: u64) -> (EpiEnd, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = prune(p);
    for steps in 0..=max_steps {
        let analysis = Analysis::new(&state);
        let taus = analysis.taus();
        if taus.is_empty() {
            drop(analysis);
            return if has_terminated(&state) {
                (EpiEnd::Terminated(state), steps)
            } else {
                (EpiEnd::Stuck, steps)
            };
        }
        if steps == max_steps {
            break;
        }
        let k = match strategy {
            Strategy::Deterministic => 0,
            Strategy::Random => rng.gen_range(0..taus.len()),
        };
        let next = prune(&analysis.fire(&taus[k]).target);
        drop(analysis);
        state = next;
    }
    (EpiEnd::OutOfSteps, max_steps)
}

fn render(store: &FieldStore) -> String {
    let parts: Vec<String> = store.iter().map(|((a, p), v)| format!("{a}.{p} = {v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Runs a well-typed program directly and through its translation, and
/// compares the final field stores.
pub fn agree(program: &WcProgram, max_steps: usize, strategy: Strategy, seed: u64) -> Result<AgreeReport, String> {
    typecheck_program(program).map_err(|e| format!("program is ill-typed: {e}"))?;
    let unit = compile(program).map_err(|e| e.to_string())?;
    let wc_fields = match run_program(program, DEFAULT_FUEL) {
        Ok(out) => Some(out.fields().into_iter().map(|(a, p, v)| ((a, p), v)).collect::<FieldStore>()),
        Err(ExecError::FuelExhausted) => None,
        Err(e) => return Err(format!("WC run failed: {e}")),
    };
    let (end, steps) = run_compiled(&unit.process, strategy, max_steps, seed);
    let out_of_steps = matches!(end, EpiEnd::OutOfSteps);
    let (epi_fields, detail) = match end {
        EpiEnd::Terminated(state) => match decode_fields(&state, &unit) {
            Ok(store) => (Some(store), String::new()),
            Err(e) => (None, format!("decoding failed: {e}")),
        },
        EpiEnd::Stuck => (None, format!("compiled process is stuck after {steps} steps")),
        EpiEnd::OutOfSteps => (None, format!("no quiescent state within {max_steps} steps")),
    };
    let (verdict, detail) = match (&wc_fields, &epi_fields) {
        (None, _) => (AgreeVerdict::Nonterminating, "WC run exhausted its fuel".to_string()),
        _ if out_of_steps => (AgreeVerdict::Nonterminating, detail),
        (Some(a), Some(b)) if a == b => (AgreeVerdict::Match, detail),
        (Some(a), Some(b)) => (AgreeVerdict::Mismatch, format!("WC {} but epi {}", render(a), render(b))),
        (Some(_), None) => (AgreeVerdict::Mismatch, detail),
    };
    Ok(AgreeReport {
        verdict,
        wc_fields,
        epi_fields,
        steps,
        detail,
    })
}

impl AgreeReport {
    pub fn store_text(&self) -> String {
        self.wc_fields.as_ref().or(self.epi_fields.as_ref()).map(render).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wc::parse::parse_program;

    const INC: &str = "
        interface IA { field p : int; method inc : proc(); }
        class A : IA { field p := 0; method inc() { this.p := this.p + 1 } }
        main { A::inc(); A::inc() }
    ";

    #[test]
    fn inc_program_verdicts() {
        let p = parse_program(INC).unwrap();
        assert_eq!(correspond(&p).verdict, CorrespondVerdict::AgreePositive);
        let r = agree(&p, 10_000, Strategy::Deterministic, 0).unwrap();
        assert_eq!(r.verdict, AgreeVerdict::Match, "{}", r.detail);
        assert_eq!(r.store_text(), "{A.p = 2}");
    }

    #[test]
    fn ill_typed_field_update_agrees_negatively() {
        let p = parse_program(&INC.replace("this.p + 1", "true")).unwrap();
        let r = correspond(&p);
        assert_eq!(r.verdict, CorrespondVerdict::AgreeNegative, "{r:?}");
    }

    #[test]
    fn ill_typed_variable_assignment_agrees_negatively() {
        let p = parse_program("main { var int x := 1 in x := true }").unwrap();
        assert_eq!(correspond(&p).verdict, CorrespondVerdict::AgreeNegative);
    }

    #[test]
    fn skip_and_divergence() {
        let p = parse_program("main { skip }").unwrap();
        let r = agree(&p, 100, Strategy::Deterministic, 0).unwrap();
        assert_eq!(r.verdict, AgreeVerdict::Match);
        let p = parse_program("main { while true do skip }").unwrap();
        let r = agree(&p, 200, Strategy::Deterministic, 0).unwrap();
        assert_eq!(r.verdict, AgreeVerdict::Nonterminating);
    }
}
