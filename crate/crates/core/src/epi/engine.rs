//! Executing and exploring τ-transitions.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::semantics::{Analysis, Transition};
use super::subst::canonical;
use super::syntax::Process;

pub const DEFAULT_FRONTIER_CAP: usize = 100_000;

/// The exploration cap, overridable through `EPIC_FRONTIER_CAP`.
pub fn frontier_cap() -> usize {
    std::env::var("EPIC_FRONTIER_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_FRONTIER_CAP)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// The first enabled communication in a fixed enumeration order:
    /// outputs in term order, then matching inputs in term order, then the
    /// innermost closing point first.
    Deterministic,
    /// A uniform choice from a generator seeded per run.
    Random,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "deterministic" => Ok(Strategy::Deterministic),
            "random" => Ok(Strategy::Random),
            other => Err(format!("unknown strategy `{other}` (expected deterministic or random)")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Deterministic => "deterministic",
            Strategy::Random => "random",
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct Trace {
    pub steps: Vec<Transition>,
    /// No τ-transition is enabled in the last state.
    pub quiescent: bool,
    pub diagnostics: Vec<String>,
}

impl Trace {
    pub fn last_state<'a>(&'a self, start: &'a Process) -> &'a Process {
        self.steps.last().map_or(start, |t| &t.target)
    }
}

/// Walks τ-transitions one at a time, keeping only the current state.
pub struct Runner {
    state: Process,
    strategy: Strategy,
    rng: ChaCha8Rng,
    steps: usize,
    quiescent: bool,
    pub diagnostics: Vec<String>,
}

impl Runner {
    pub fn new(p: &Process, strategy: Strategy, seed: u64) -> Runner {
        Runner {
            state: p.clone(),
            strategy,
            rng: ChaCha8Rng::seed_from_u64(seed),
            steps: 0,
            quiescent: false,
            diagnostics: Vec::new(),
        }
    }

    pub fn state(&self) -> &Process {
        &self.state
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn is_quiescent(&self) -> bool {
        self.quiescent
    }

    /// Takes one τ-step; `None` once quiescent.
    pub fn step(&mut self) -> Option<Transition> {
        if self.quiescent {
            return None;
        }
        let analysis = Analysis::new(&self.state);
        for d in &analysis.diagnostics {
            if !self.diagnostics.contains(d) {
                self.diagnostics.push(d.clone());
            }
        }
        let taus = analysis.taus();
        if taus.is_empty() {
            self.quiescent = true;
            return None;
        }
        let k = match self.strategy {
            Strategy::Deterministic => 0,
            Strategy::Random => self.rng.gen_range(0..taus.len()),
        };
        let t = analysis.fire(&taus[k]);
        drop(analysis);
        self.state = t.target.clone();
        self.steps += 1;
        Some(t)
    }

    /// Runs until quiescent or `max_steps` have been taken; the final state
    /// is tested for quiescence either way.
    pub fn run(&mut self, max_steps: usize) {
        while self.steps < max_steps && self.step().is_some() {}
        if !self.quiescent {
            self.quiescent = Analysis::new(&self.state).is_quiescent();
        }
    }

    pub fn into_state(self) -> Process {
        self.state
    }
}

pub fn run_tau(p: &Process, strategy: Strategy, max_steps: usize, seed: u64) -> Trace {
    let mut runner = Runner::new(p, strategy, seed);
    let mut steps = Vec::new();
    while steps.len() < max_steps {
        match runner.step() {
            Some(t) => steps.push(t),
            None => break,
        }
    }
    if !runner.quiescent {
        runner.quiescent = Analysis::new(runner.state()).is_quiescent();
    }
    Trace {
        steps,
        quiescent: runner.quiescent,
        diagnostics: runner.diagnostics,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("state explosion: {size} states at depth {depth} exceed the frontier cap of {cap}")]
pub struct StateExplosion {
    pub depth: usize,
    pub size: usize,
    pub cap: usize,
}

#[derive(Clone, Debug, Default)]
pub struct Exploration {
    /// Reachable states in canonical form, in breadth-first order; the
    /// source comes first.
    pub states: Vec<Process>,
    /// States in which no τ is enabled.
    pub quiescent: Vec<Process>,
    /// Every reachable state was expanded before the depth ran out.
    pub complete: bool,
    pub diagnostics: Vec<String>,
}

/// Breadth-first search over τ-transitions up to `depth` steps, with states
/// identified up to alpha-equivalence.
pub fn explore_tau(p: &Process, depth: usize, cap: usize) -> Result<Exploration, StateExplosion> {
    let start = canonical(p);
    let mut seen: HashSet<Process> = HashSet::new();
    seen.insert(start.clone());
    let mut out = Exploration {
        states: vec![start.clone()],
        ..Exploration::default()
    };
    let mut frontier = vec![start];
    let mut level = 0;
    while !frontier.is_empty() && level < depth {
        level += 1;
        let mut next = Vec::new();
        for s in &frontier {
            let analysis = Analysis::new(s);
            for d in &analysis.diagnostics {
                if !out.diagnostics.contains(d) {
                    out.diagnostics.push(d.clone());
                }
            }
            if analysis.is_quiescent() {
                out.quiescent.push(s.clone());
            }
            for t in analysis.tau_transitions() {
                let c = canonical(&t.target);
                if seen.insert(c.clone()) {
                    out.states.push(c.clone());
                    next.push(c);
                    if next.len() > cap {
                        return Err(StateExplosion {
                            depth: level,
                            size: next.len(),
                            cap,
                        });
                    }
                }
            }
        }
        frontier = next;
    }
    // States on the last frontier were not expanded; settle their quiescence.
    let mut complete = true;
    for s in &frontier {
        if Analysis::new(s).is_quiescent() {
            out.quiescent.push(s.clone());
        } else {
            complete = false;
        }
    }
    out.complete = complete;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epi::parse::parse_process;

    fn p(s: &str) -> Process {
        parse_process(s).unwrap()
    }

    #[test]
    fn nil_is_quiescent() {
        let t = run_tau(&Process::Nil, Strategy::Deterministic, 10, 0);
        assert!(t.steps.is_empty());
        assert!(t.quiescent);
    }

    #[test]
    fn single_communication() {
        let t = run_tau(&p("x!(1).0 | x?(y).0"), Strategy::Deterministic, 10, 0);
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.steps[0].target, p("0 | 0"));
        assert!(t.quiescent);
    }

    #[test]
    fn lone_replication_is_quiescent() {
        let t = run_tau(&p("!(x?().x!().0)"), Strategy::Deterministic, 10, 0);
        assert!(t.steps.is_empty());
        assert!(t.quiescent);
    }

    #[test]
    fn step_bound_is_respected() {
        let looping = p("x!() | !x?().x!()");
        let t = run_tau(&looping, Strategy::Deterministic, 5, 0);
        assert_eq!(t.steps.len(), 5);
        assert!(!t.quiescent);
    }

    #[test]
    fn random_runs_are_reproducible() {
        let src = p("x!(1) | x!(2) | x!(3) | x?(a).y!(a) | x?(b).y!(b)");
        let a = run_tau(&src, Strategy::Random, 10, 42);
        let b = run_tau(&src, Strategy::Random, 10, 42);
        assert_eq!(a.steps, b.steps);
    }

    #[test]
    fn exploration_examples() {
        let e = explore_tau(&Process::Nil, 5, DEFAULT_FRONTIER_CAP).unwrap();
        assert_eq!(e.states.len(), 1);
        let e = explore_tau(&p("x!(1).0 | x?(y).0"), 1, DEFAULT_FRONTIER_CAP).unwrap();
        assert_eq!(e.states.len(), 2);
        let e = explore_tau(&p("[true]x!(1).0 + [false]y!(1).0 | x?(z).0"), 2, DEFAULT_FRONTIER_CAP).unwrap();
        assert_eq!(e.states.len(), 2);
        assert!(e.complete);
    }

    #[test]
    fn exploration_reports_explosion() {
        let src = p("x!() | x?().a!() | x?().b!()");
        let err = explore_tau(&src, 5, 1).unwrap_err();
        assert_eq!((err.cap, err.depth), (1, 1));
        assert!(explore_tau(&src, 5, 2).is_ok());
    }

    #[test]
    fn deterministic_endpoint_is_reachable() {
        let src = p("x!(1) | x?(a).y!(a) | y?(b).z!(b) | z?(c)");
        let t = run_tau(&src, Strategy::Deterministic, 10, 0);
        let e = explore_tau(&src, 10, DEFAULT_FRONTIER_CAP).unwrap();
        assert!(e.states.contains(&canonical(t.last_state(&src))));
    }
}
