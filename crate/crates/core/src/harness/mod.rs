//! Property campaigns over generated well-typed processes.

pub mod campaign;
pub mod gen;
pub mod lemmas;
pub mod wcgen;

pub use campaign::{
    run_campaign, run_mutated_campaign, CampaignChecks, CampaignSummary, Counterexample, CAMPAIGN_DEPTH, CASE_STATE_CAP,
};
pub use gen::{generate_corpus, FuzzConfig, Generator};
pub use lemmas::{run_lemmas, LemmaSummary, LemmaTally};
pub use wcgen::{inject_error, statement_expressions, WcGenerator};
