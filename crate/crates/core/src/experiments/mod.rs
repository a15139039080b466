//! Config-driven experiment commands with reproducible, hashed outputs.
//!
//! A run parses and validates its JSON config before any compute, executes
//! on a worker pool of the requested size, and writes `<command>.csv`,
//! `<command>.ndjson` and `<command>.meta.json`. Replicas are scheduled by
//! index with per-index random streams, so the pool size never changes the
//! output bytes.

pub mod budget;
pub mod config;
pub mod expectations;
pub mod output;
pub mod studies;
pub mod validate;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

pub use budget::*;
pub use config::*;
pub use expectations::{expectations, Expectations, KnownFailure, Tolerance};
pub use output::{write_outputs, Cell, Metadata, OutputPaths, RunRecord, Table};
pub use studies::*;
pub use validate::{run_validate, CheckResult, Detectors, ValidateReport};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Command {
    Survival,
    ScanU,
    Segments,
    LargestBall,
    Excursions,
    Coupling,
    Constants,
    Qnu,
    Validate,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Survival,
        Command::ScanU,
        Command::Segments,
        Command::LargestBall,
        Command::Excursions,
        Command::Coupling,
        Command::Constants,
        Command::Qnu,
        Command::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Survival => SurvivalConfig::COMMAND,
            Command::ScanU => ScanConfig::COMMAND,
            Command::Segments => SegmentsConfig::COMMAND,
            Command::LargestBall => LargestBallConfig::COMMAND,
            Command::Excursions => ExcursionsConfig::COMMAND,
            Command::Coupling => CouplingConfig::COMMAND,
            Command::Constants => ConstantsConfig::COMMAND,
            Command::Qnu => QnuConfig::COMMAND,
            Command::Validate => ValidateConfig::COMMAND,
        }
    }

    /// JSON Schema of this command's config file.
    pub fn schema(self) -> serde_json::Value {
        match self {
            Command::Survival => config_schema::<SurvivalConfig>(),
            Command::ScanU => config_schema::<ScanConfig>(),
            Command::Segments => config_schema::<SegmentsConfig>(),
            Command::LargestBall => config_schema::<LargestBallConfig>(),
            Command::Excursions => config_schema::<ExcursionsConfig>(),
            Command::Coupling => config_schema::<CouplingConfig>(),
            Command::Constants => config_schema::<ConstantsConfig>(),
            Command::Qnu => config_schema::<QnuConfig>(),
            Command::Validate => config_schema::<ValidateConfig>(),
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command {s:?}")))
    }
}

/// Overrides applied on top of the config file.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Where to write outputs; nothing is written when `None`.
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub command: Command,
    pub config_hash: String,
    pub table: Table,
    pub records: Vec<RunRecord>,
    pub metadata: Metadata,
    pub paths: Option<OutputPaths>,
    /// False only when `validate` found a failing invariant.
    pub passed: bool,
}

impl RunOutcome {
    pub fn csv(&self) -> String {
        self.table.to_csv(&self.config_hash)
    }
}

/// Process exit code: 0 ok, 1 invariant failure or runtime error, 2 bad
/// config or input.
pub fn exit_code(result: &Result<RunOutcome>) -> i32 {
    match result {
        Ok(o) if o.passed => 0,
        Ok(_) => 1,
        Err(Error::Config(_) | Error::Format(_) | Error::Json(_) | Error::Io(_)) => 2,
        Err(_) => 1,
    }
}

fn execute<C, F>(command: Command, json: &str, opts: &RunOptions, body: F) -> Result<RunOutcome>
where
    C: CommandConfig,
    F: FnOnce(&C) -> Result<(studies::Report, bool)> + Send,
{
    let cfg: C = parse_config(json, opts.seed)?;
    let jobs = opts.jobs.or(cfg.jobs());
    if jobs == Some(0) {
        return Err(Error::Config("jobs must be at least 1".into()));
    }
    let hash = config_hash(&cfg);
    let started = Instant::now();
    let (report, passed) = match jobs {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?
            .install(|| body(&cfg))?,
        None => body(&cfg)?,
    };
    let mut metadata = Metadata::new(
        command.name(),
        &hash,
        resolved_json(&cfg),
        jobs.unwrap_or_else(rayon::current_num_threads),
    );
    metadata.wall_time_s = started.elapsed().as_secs_f64();
    metadata.summary = report.summary;
    let records: Vec<RunRecord> = report
        .replicas
        .into_iter()
        .map(|r| RunRecord {
            config_hash: hash.clone(),
            replica_index: r.replica_index,
            metrics: r.metrics,
            wall_time_s: r.wall_time_s,
        })
        .collect();
    let paths = match &opts.out {
        Some(dir) => Some(write_outputs(dir, command.name(), &report.table, &records, &metadata)?),
        None => None,
    };
    Ok(RunOutcome {
        command,
        config_hash: hash,
        table: report.table,
        records,
        metadata,
        paths,
        passed,
    })
}

fn ok(r: studies::Report) -> Result<(studies::Report, bool)> {
    Ok((r, true))
}

fn validate_report(r: &ValidateReport) -> studies::Report {
    let mut t = Table::new(&["check", "cases", "failures", "witness"]);
    for c in &r.checks {
        t.push(vec![
            c.name.as_str().into(),
            c.cases.into(),
            c.failures.into(),
            c.witness.clone().unwrap_or_default().replace(',', ";").into(),
        ]);
    }
    studies::Report {
        table: t,
        replicas: Vec::new(),
        summary: serde_json::json!({ "passed": r.passed() }),
    }
}

/// Parses `json` as the config of `command`, runs it and writes outputs.
pub fn run_command(command: Command, json: &str, opts: &RunOptions) -> Result<RunOutcome> {
    run_command_with(command, json, opts, &Detectors::default())
}

/// As [`run_command`], with the detectors used by `validate` supplied.
pub fn run_command_with(command: Command, json: &str, opts: &RunOptions, det: &Detectors) -> Result<RunOutcome> {
    match command {
        Command::Survival => execute(command, json, opts, |c: &SurvivalConfig| ok(survival(c)?.report())),
        Command::ScanU => execute(command, json, opts, |c: &ScanConfig| ok(scan_u(c)?.report())),
        Command::Segments => execute(command, json, opts, |c: &SegmentsConfig| ok(segments(c)?.report())),
        Command::LargestBall => execute(command, json, opts, |c: &LargestBallConfig| ok(largest_ball(c)?.report())),
        Command::Excursions => execute(command, json, opts, |c: &ExcursionsConfig| ok(excursions(c)?.report())),
        Command::Coupling => execute(command, json, opts, |c: &CouplingConfig| ok(coupling_report(&coupling(c)?))),
        Command::Constants => execute(command, json, opts, |c: &ConstantsConfig| ok(constants_table(&constants(c)?))),
        Command::Qnu => execute(command, json, opts, |c: &QnuConfig| ok(qnu(c)?.report())),
        Command::Validate => {
            let det = *det;
            execute(command, json, opts, move |c: &ValidateConfig| {
                let r = run_validate(c, &det)?;
                Ok((validate_report(&r), r.passed()))
            })
        }
    }
}
