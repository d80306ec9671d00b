//! Plumbing behind the command-line tool.

pub mod experiment;
pub mod framing;
pub mod verify;

pub use experiment::{
    run_experiment, write_csv, CodeSize, ExperimentPlan, ExperimentRecord, CSV_COLUMNS,
};
pub use framing::{capacity_bytes, embed_payload, extract_payload, EmbedStats};
pub use verify::{
    decoder_oracle_gaps, random_small_params, run_verify, CheckResult, VerifyOptions,
};
