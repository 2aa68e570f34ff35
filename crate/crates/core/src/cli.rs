//! Command-line front end.
//!
//! A [`RunConfig`] comes from an optional JSON file overlaid with flags; it
//! is resolved into a [`Job`], run, and written as a versioned JSON report or
//! as CSV. Exit codes: 0 success (a MISMATCH verdict is a result), 1 internal
//! error, 2 configuration error, 3 budget or numerical failure.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{build, random_params, FamilyParams, FamilySpec, FamilyTag};
use crate::poly::scalar::format_f64;
use crate::proj_map::{CurveKind, DEFAULT_HORIZON};
use crate::report::{self, Report, ReportBody};
use crate::solver::{points_csv, SolverOptions, DEFAULT_SEED};

/// Largest period accepted for census and verify runs.
pub const MAX_PERIOD: u32 = 6;
/// Largest iterate count accepted for degree sequences.
pub const MAX_DEGREES: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Degrees,
    Analyze,
    Predict,
    Census,
    Verify,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Every knob of a run. File values are overridden by flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub family: Option<String>,
    /// Exact values as strings, e.g. `{"a": "2", "b": "-3/4"}`.
    pub params: Option<BTreeMap<String, String>>,
    pub n: Option<u32>,
    pub n_range: Option<[u32; 2]>,
    /// Closure tolerance for a valid orbit.
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub precision: Option<u32>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub horizon: Option<u32>,
    pub timings: Option<bool>,
    /// Full solver options; `tol`, `seed` and `precision` override fields here.
    pub solver: Option<SolverOptions>,
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse { pos: 0, msg: format!("config line {} column {}: {e}", e.line(), e.column()) })
    }

    /// Fields set in `o` replace those in `self`.
    pub fn overlay(mut self, o: RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $(if o.$f.is_some() { self.$f = o.$f; })* };
        }
        take!(command, family, params, n, n_range, tol, seed, precision, out, format, horizon, timings, solver);
        self
    }
}

/// A validated, fully resolved run.
#[derive(Clone, Debug)]
pub struct Job {
    pub command: Command,
    pub spec: FamilySpec,
    pub lo: u32,
    pub hi: u32,
    pub seed: u64,
    pub opts: SolverOptions,
    pub horizon: u32,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub timings: bool,
}

fn config_error(msg: String) -> Error {
    Error::Parse { pos: 0, msg }
}

impl Job {
    pub fn resolve(c: RunConfig) -> Result<Self> {
        let command = c.command.ok_or_else(|| config_error("no command given".into()))?;
        let tag: FamilyTag = c.family.as_deref().ok_or_else(|| config_error("field `family` is required".into()))?.parse()?;
        let seed = c.seed.unwrap_or(DEFAULT_SEED);
        let params = match &c.params {
            Some(m) => {
                let text: Vec<String> = m.iter().map(|(k, v)| format!("{k}={v}")).collect();
                FamilyParams::parse(&text.join(","))?
            }
            None => random_params(tag, &mut ChaCha8Rng::seed_from_u64(seed)),
        };
        let spec = build(tag, params)?;
        let (lo, hi) = match (c.n_range, c.n) {
            (Some([lo, hi]), _) => (lo, hi),
            (None, Some(n)) if command == Command::Degrees => (1, n),
            (None, Some(n)) => (n, n),
            (None, None) if command == Command::Degrees => (1, 5),
            (None, None) => (1, 3),
        };
        let cap = if command == Command::Degrees { MAX_DEGREES } else { MAX_PERIOD };
        if lo == 0 || lo > hi || (hi > cap && matches!(command, Command::Degrees | Command::Census | Command::Verify)) {
            return Err(config_error(format!("period range {lo}..={hi} must satisfy 1 <= lo <= hi <= {cap}")));
        }
        let mut opts = c.solver.unwrap_or_default();
        opts.seed = seed;
        if let Some(t) = c.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(config_error(format!("tolerance {t} must be positive")));
            }
            opts.closure_tol = t;
        }
        if let Some(p) = c.precision {
            if !(24..=106).contains(&p) {
                return Err(config_error(format!("precision {p} must lie in 24..=106 bits")));
            }
            opts.precision = p;
        }
        Ok(Self {
            command,
            spec,
            lo,
            hi,
            seed,
            opts,
            horizon: c.horizon.unwrap_or(DEFAULT_HORIZON),
            format: c.format.unwrap_or_default(),
            out: c.out,
            timings: c.timings.unwrap_or(false),
        })
    }

    /// Runs the analysis and builds the report (without timestamp).
    pub fn run(&self) -> Result<Report> {
        let t0 = Instant::now();
        let body = match self.command {
            Command::Degrees => ReportBody::Degrees(report::degrees(&self.spec, self.hi, self.opts.degree_budget)?),
            Command::Analyze => ReportBody::Analyze(report::analyze(&self.spec, self.seed, self.horizon)?),
            Command::Predict => ReportBody::Predict(report::predict(&self.spec, self.lo, self.hi)?),
            Command::Census => ReportBody::Census(report::census_range(&self.spec, self.lo, self.hi, &self.opts)?),
            Command::Verify => ReportBody::Verify(report::verify(&self.spec, self.lo, self.hi, &self.opts)?),
        };
        let mut r = Report::new(&self.spec, self.seed, body);
        if self.timings {
            r.timings_ms = Some(BTreeMap::from([("total".to_string(), t0.elapsed().as_millis() as u64)]));
        }
        Ok(r)
    }
}

fn csv_table(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

/// CSV rendering of a report body. Census output is one point table per
/// period, in the point-export columns.
pub fn to_csv(r: &Report) -> Result<Vec<(Option<u32>, String)>> {
    let opt = |v: Option<i128>| v.map(|x| x.to_string()).unwrap_or_default();
    let one = |s: String| Ok(vec![(None, s)]);
    match &r.body {
        ReportBody::Degrees(d) => {
            one(csv_table(&["k", "degree"], d.degrees.iter().enumerate().map(|(i, d)| vec![(i + 1).to_string(), d.to_string()]).collect())?)
        }
        ReportBody::Analyze(a) => {
            let mut rows: Vec<Vec<String>> = a.indeterminacy.iter().map(|p| vec!["indeterminacy".into(), p.to_string(), String::new()]).collect();
            for c in &a.critical_curves {
                let kind = match &c.kind {
                    Some(CurveKind::Exceptional { image }) => format!("exceptional -> {image}"),
                    Some(CurveKind::Branch) => "branch".into(),
                    None => String::new(),
                };
                let tag = if c.residual { "residual" } else { "factor" };
                rows.push(vec!["critical".into(), c.poly.to_canonical(), format!("{tag}; multiplicity {}; {kind}", c.multiplicity)]);
            }
            rows.push(vec!["algebraic_degree".into(), a.algebraic_degree.to_string(), String::new()]);
            rows.push(vec!["topological_degree".into(), a.topological_degree.to_string(), String::new()]);
            rows.push(vec!["stability".into(), a.stability.label(), a.stability.note.clone()]);
            one(csv_table(&["record", "value", "detail"], rows)?)
        }
        ReportBody::Predict(p) => one(csv_table(
            &["n", "surface", "lefschetz", "spurious", "predicted", "closed_form", "non_isolated_warning"],
            p.predictions
                .iter()
                .map(|c| {
                    vec![
                        c.n.to_string(),
                        c.surface.clone(),
                        c.lefschetz.to_string(),
                        c.spurious.to_string(),
                        c.predicted.to_string(),
                        opt(c.closed_form),
                        c.non_isolated_warning.to_string(),
                    ]
                })
                .collect(),
        )?),
        ReportBody::Census(c) => Ok(c.reports.iter().map(|r| (Some(r.n), points_csv(r))).collect()),
        ReportBody::Verify(v) => one(csv_table(
            &["n", "predicted", "found_distinct", "found_with_multiplicity", "rejected", "max_closure", "verdict"],
            v.rows
                .iter()
                .zip(&v.reports)
                .map(|(row, rep)| {
                    vec![
                        row.n.to_string(),
                        opt(row.predicted),
                        row.found_distinct.to_string(),
                        row.found_with_multiplicity.to_string(),
                        row.rejected.to_string(),
                        format_f64(rep.residuals.max_closure),
                        row.verdict.label().to_string(),
                    ]
                })
                .collect(),
        )?),
    }
}

/// `out.csv` becomes `out.n3.csv` for the table of period 3.
fn period_path(out: &Path, n: u32) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = out.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    out.with_file_name(format!("{stem}.n{n}.{ext}"))
}

/// Writes the report to `out` or returns the text for standard output.
pub fn emit(job: &Job, r: &Report) -> Result<String> {
    let io = |e: std::io::Error| Error::Internal(format!("writing output: {e}"));
    match job.format {
        Format::Json => {
            let s = r.to_json()? + "\n";
            match &job.out {
                Some(p) => std::fs::write(p, &s).map_err(io).map(|_| String::new()),
                None => Ok(s),
            }
        }
        Format::Csv => {
            let tables = to_csv(r)?;
            let multi = tables.len() > 1;
            let mut stdout = String::new();
            for (n, t) in tables {
                match (&job.out, n) {
                    (Some(p), Some(n)) if multi => std::fs::write(period_path(p, n), &t).map_err(io)?,
                    (Some(p), _) => std::fs::write(p, &t).map_err(io)?,
                    (None, _) => stdout.push_str(&t),
                }
            }
            Ok(stdout)
        }
    }
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Unknown(_) | Error::Degenerate(_) | Error::InvalidMap(_) | Error::VariableMismatch(..) | Error::Arity { .. } => 2,
        Error::Budget(_) | Error::Numerical(_) | Error::Genericity { .. } | Error::NonIsolated(_) => 3,
        Error::InexactDivision | Error::ZeroPolynomial | Error::Internal(_) => 1,
    }
}

#[derive(Debug, Parser)]
#[command(name = "orbitcount", version, about = "Periodic-orbit counts for planar rational recurrences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Algebraic degrees of F, F^2, ..., F^n.
    Degrees(Flags),
    /// Indeterminacy, critical curves, topological degree and stability.
    Analyze(Flags),
    /// Predicted period-n counts over a period range.
    Predict(Flags),
    /// Numerical census of period-n points.
    Census(Flags),
    /// Predictions and census side by side with verdicts.
    Verify(Flags),
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// Family tag, e.g. LINFRAC_SPECIAL.
    #[arg(long)]
    pub family: Option<String>,
    /// Exact parameters, e.g. "a=2,b=3/4"; a seeded random draw if absent.
    #[arg(long)]
    pub params: Option<String>,
    /// Period (census, verify, predict) or number of iterates (degrees).
    #[arg(long)]
    pub n: Option<u32>,
    /// Inclusive period range, written LO..HI or LO-HI.
    #[arg(long, value_parser = parse_range)]
    pub n_range: Option<[u32; 2]>,
    /// Closure tolerance for valid orbits.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Working precision in bits (53 disables the double-double stage).
    #[arg(long)]
    pub precision: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON config file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Iterates followed by the stability check.
    #[arg(long)]
    pub horizon: Option<u32>,
    /// Record wall-clock timings in the report (breaks byte-identical output).
    #[arg(long)]
    pub timings: bool,
}

fn parse_range(s: &str) -> std::result::Result<[u32; 2], String> {
    let (a, b) = s.split_once("..").or_else(|| s.split_once('-')).ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
    let p = |t: &str| t.trim().trim_start_matches('=').parse::<u32>().map_err(|e| format!("{t:?}: {e}"));
    Ok([p(a)?, p(b)?])
}

impl Sub {
    fn split(self) -> (Command, Flags) {
        match self {
            Sub::Degrees(f) => (Command::Degrees, f),
            Sub::Analyze(f) => (Command::Analyze, f),
            Sub::Predict(f) => (Command::Predict, f),
            Sub::Census(f) => (Command::Census, f),
            Sub::Verify(f) => (Command::Verify, f),
        }
    }
}

/// Merges the config file (if any) with the flags.
pub fn config_from_cli(cli: Cli) -> Result<RunConfig> {
    let (command, f) = cli.command.split();
    let base = match &f.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| config_error(format!("reading {}: {e}", p.display())))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    let params = match &f.params {
        Some(s) => Some(FamilyParams::parse(s)?.to_strings()),
        None => None,
    };
    let flags = RunConfig {
        command: Some(command),
        family: f.family,
        params,
        n: f.n,
        n_range: f.n_range,
        tol: f.tol,
        seed: f.seed,
        precision: f.precision,
        out: f.out,
        format: f.format,
        horizon: f.horizon,
        timings: f.timings.then_some(true),
        solver: None,
    };
    Ok(base.overlay(flags))
}

/// Full pipeline for one invocation; returns the text for standard output.
pub fn run(config: RunConfig) -> Result<String> {
    let job = Job::resolve(config)?;
    let mut r = job.run()?;
    r.timestamp = Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    emit(&job, &r)
}
