//! Build a slow torus map, certify it, and write its state, certificate and
//! growth table.

pub mod config;
pub mod output;
pub mod plot;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use slowtorus_core::{
    build, choose_c, verify_all, Certificate, ConstructionState, GrowthEvaluator, GrowthRecord,
    Mutation, Rat, Status,
};

pub use config::{Coupling, Mode, OutputPaths, RunConfig};
pub use output::CSV_HEADER;
pub use plot::{plotdata, ratio_rows, RatioRow};

/// Exit codes of the `slowtorus` binary.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const INDETERMINATE: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const OVERFLOW: i32 = 4;
}

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "SLOWTORUS_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] slowtorus_core::Error),
}

impl CliError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub(crate) fn csv(e: csv::Error) -> Self {
        CliError::Input(format!("csv: {e}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(slowtorus_core::Error::Overflow { .. }) => exit::OVERFLOW,
            CliError::Core(slowtorus_core::Error::Indeterminate { .. }) => exit::INDETERMINATE,
            _ => exit::CONFIG,
        }
    }
}

pub fn status_exit_code(status: Status) -> i32 {
    match status {
        Status::Pass => exit::PASS,
        Status::Fail => exit::FAIL,
        Status::Indeterminate => exit::INDETERMINATE,
    }
}

fn coupling(c: &Coupling, state: &ConstructionState) -> Rat {
    match c {
        Coupling::Auto => choose_c(state),
        Coupling::Fixed(c) => c.clone(),
    }
}

/// Everything a run produced.
pub struct RunOutcome {
    pub state: ConstructionState,
    pub certificate: Certificate,
    pub records: Vec<GrowthRecord>,
    pub written: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        status_exit_code(self.certificate.status)
    }
}

/// Growth records over the table schedule, computed in parallel and
/// returned in increasing `N`.
pub fn growth_table(
    state: &ConstructionState,
    c: &Rat,
    config: &RunConfig,
) -> Result<Vec<GrowthRecord>, CliError> {
    let checkpoints: Vec<_> = (1..=state.depth())
        .map(|j| state.checkpoint(j).clone())
        .collect();
    let points = config
        .table_schedule()
        .points(state.horizon(), &checkpoints, &[]);
    let eval = GrowthEvaluator::new(state, c, &state.alpha(), config.precision, config.grid)?;
    let records = points
        .par_iter()
        .map(|n| eval.record(n))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(records)
}

/// Builds, verifies and tabulates; writes state JSON, certificate JSON and
/// the growth CSV.
pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let phi = config.validate()?;
    let (state, _) = build(&phi, config.depth, &config.mode.profile(), &config.policy())?;
    let c = coupling(&config.c, &state);
    let certificate = verify_all(&state, &state.alpha(), &c, &config.verify_config())?;
    let records = growth_table(&state, &c, config)?;

    let out = &config.output;
    output::write_json(&out.state(), &state)?;
    output::write_json(&out.certificate(), &certificate)?;
    output::write_atomic(&out.csv(), &output::growth_csv(&records)?)?;
    Ok(RunOutcome {
        state,
        certificate,
        records,
        written: vec![out.state(), out.certificate(), out.csv()],
    })
}

/// Re-checks a saved state, optionally corrupted by a mutation, and writes
/// the certificate.
pub fn verify(
    state_path: &Path,
    mutation: Option<Mutation>,
    config: &RunConfig,
) -> Result<Certificate, CliError> {
    let text = std::fs::read_to_string(state_path)
        .map_err(|e| CliError::Input(format!("cannot read state {}: {e}", state_path.display())))?;
    let mut state: ConstructionState = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", state_path.display())))?;
    if let Some(m) = mutation {
        state = m.apply(&state)?;
    }
    let c = coupling(&config.c, &state);
    let certificate = verify_all(&state, &state.alpha(), &c, &config.verify_config())?;
    output::write_json(&config.output.certificate(), &certificate)?;
    Ok(certificate)
}
