//! Batch front-end: reads a config, runs one experiment, writes a data file
//! with embedded reproduction metadata and returns a one-line summary.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 invalid config or usage,
//! 3 no-go certification failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    parse_config, to_canonical, BsConfig, ConfigError, EvolveConfig, ExperimentConfig, NogoCertConfig, NsConfig,
    ScalingConfig, TradeoffConfig, SCHEMA_VERSION,
};
use crate::error::Error;
use crate::linalg::c64;
use crate::nogo::{certify_no_go, log_log_slope, tradeoff_curve, RNG_ALGORITHM};
use crate::observables::{probe_report, two_photon_coupling_product, Variant};
use crate::optics::{ns_gate_search, resch_experiment};
use crate::sector::DickeModel;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Evolve,
    Tradeoff,
    NogoCert,
    Scaling,
    Bs,
    Ns,
    /// Rewrites a config in canonical form.
    Canon,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Tradeoff => "tradeoff",
            Command::NogoCert => "nogo-cert",
            Command::Scaling => "scaling",
            Command::Bs => "bs",
            Command::Ns => "ns",
            Command::Canon => "canon",
        }
    }

    fn default_output(self) -> Option<&'static str> {
        match self {
            Command::Evolve => Some("evolve.json"),
            Command::Tradeoff => Some("tradeoff.csv"),
            Command::NogoCert => Some("nogo-cert.json"),
            Command::Scaling => Some("scaling.csv"),
            Command::Bs => Some("bs.csv"),
            Command::Ns => Some("ns.json"),
            Command::Canon => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Io { path: PathBuf, message: String },
    Physics(Error),
    /// Output was written; at least one entry violated the no-go bound.
    CertificationFailed { failures: usize, out: PathBuf },
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "invalid config: {e}"),
            CliError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            CliError::Physics(e) => write!(f, "{e}"),
            CliError::CertificationFailed { failures, out } => {
                write!(f, "{failures} certification entries violate the no-go bound (see {})", out.display())
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Physics(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } | CliError::Physics(_) => 1,
            CliError::CertificationFailed { .. } => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "invalid-config",
            CliError::Io { .. } => "io",
            CliError::Physics(_) => "runtime",
            CliError::CertificationFailed { .. } => "certification-failed",
        }
    }

    /// Machine-readable form for stderr.
    pub fn to_json(&self) -> Value {
        let mut body = json!({
            "kind": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        if let CliError::Config(ConfigError::Parse { line, column, .. }) = self {
            body["line"] = json!(line);
            body["column"] = json!(column);
        }
        json!({ "error": body })
    }
}

/// Fixed numeric format for data files: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn metadata(config: &ExperimentConfig) -> Value {
    json!({
        "tool": "pxlab",
        "version": VERSION,
        "schema_version": SCHEMA_VERSION,
        "command": config.command(),
        "seed": config.seed(),
        "rng": RNG_ALGORITHM,
        "config": serde_json::to_value(config).expect("config serializes"),
    })
}

fn json_document(config: &ExperimentConfig, result: impl Serialize) -> String {
    let doc = json!({
        "metadata": metadata(config),
        "result": serde_json::to_value(result).expect("result serializes"),
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("document serializes");
    s.push('\n');
    s
}

fn csv_document(config: &ExperimentConfig, extra: &[(&str, String)], header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = String::new();
    let config_line = serde_json::to_string(config).expect("config serializes");
    let _ = writeln!(s, "# pxlab {VERSION} {} schema_version={SCHEMA_VERSION}", config.command());
    let _ = writeln!(s, "# rng: {RNG_ALGORITHM}");
    let _ = writeln!(s, "# config: {config_line}");
    for (k, v) in extra {
        let _ = writeln!(s, "# {k}: {v}");
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    s.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv"));
    s
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(parse_config(&text)?)
}

/// Runs `command` and returns the human-readable summary.
pub fn run(command: Command, opts: &RunOptions) -> Result<String, CliError> {
    let mut config = load_config(&opts.config)?;
    if let Some(seed) = opts.seed {
        config.set_seed(seed);
    }
    if command == Command::Canon {
        let text = to_canonical(&config);
        return match &opts.out {
            Some(path) => {
                write_file(path, &text)?;
                Ok(format!("canonical config written to {}", path.display()))
            }
            None => Ok(text.trim_end().to_string()),
        };
    }
    if config.command() != command.name() {
        return Err(ConfigError::WrongCommand {
            expected: command.name().to_string(),
            found: config.command().to_string(),
        }
        .into());
    }
    let out = opts
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(command.default_output().expect("data command")));

    let (contents, summary, failures) = match &config {
        ExperimentConfig::Evolve(c) => with_none(run_evolve(&config, c)),
        ExperimentConfig::Tradeoff(c) => with_none(run_tradeoff(&config, c)?),
        ExperimentConfig::NogoCert(c) => run_nogo_cert(&config, c)?,
        ExperimentConfig::Scaling(c) => with_none(run_scaling(&config, c)),
        ExperimentConfig::Bs(c) => with_none(run_bs(&config, c)?),
        ExperimentConfig::Ns(c) => with_none(run_ns(&config, c)?),
    };
    write_file(&out, &contents)?;
    if failures > 0 {
        return Err(CliError::CertificationFailed { failures, out });
    }
    Ok(format!("{summary}; wrote {}", out.display()))
}

fn with_none((a, b): (String, String)) -> (String, String, usize) {
    (a, b, 0)
}

fn run_evolve(config: &ExperimentConfig, c: &EvolveConfig) -> (String, String) {
    let report = probe_report(&c.sequence, &c.model, c.variant);
    let phase = report
        .phi_nl
        .map_or_else(|| "undefined".to_string(), |p| format!("{p:.6}"));
    let summary = format!(
        "p0 = {:.6}, p_loss = {:.6}, phi_nl = {phase}, composite_loss = {:.3e}",
        report.p0, report.p_loss, report.composite_loss
    );
    (json_document(config, &report), summary)
}

fn run_tradeoff(config: &ExperimentConfig, c: &TradeoffConfig) -> Result<(String, String), CliError> {
    let template = c.search.task(c.model.clone(), c.variant, c.budgets[0]);
    let points = tradeoff_curve(&template, &c.budgets)?;
    let slope = log_log_slope(&points);
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            vec![
                fmt_f64(p.budget),
                fmt_f64(p.best_phi_nl_abs),
                fmt_f64(p.achieved_loss),
                p.seed.to_string(),
            ]
        })
        .collect();
    let slope_text = slope.map_or_else(|| "undefined".to_string(), fmt_f64);
    let csv = csv_document(
        config,
        &[("log_log_slope", slope_text.clone())],
        &["budget", "best_phi_nl_abs", "achieved_loss", "seed"],
        &rows,
    );
    Ok((csv, format!("{} budgets, log-log slope {slope_text}", points.len())))
}

fn run_nogo_cert(config: &ExperimentConfig, c: &NogoCertConfig) -> Result<(String, String, usize), CliError> {
    let template = c.search.task(DickeModel::bosonic(), Variant::TwoMode, c.loss_budget);
    let models: Vec<DickeModel> = c.models.iter().map(|&n| DickeModel::new(n)).collect();
    let entries = certify_no_go(&template, &models, &c.variants, c.phase_tol)?;
    let failures = entries.iter().filter(|e| !e.pass).count();
    let result = json!({
        "all_pass": failures == 0,
        "entries": entries,
    });
    let summary = format!("{} of {} entries pass", entries.len() - failures, entries.len());
    Ok((json_document(config, result), summary, failures))
}

fn run_scaling(config: &ExperimentConfig, c: &ScalingConfig) -> (String, String) {
    let rows: Vec<Vec<String>> = c
        .n_values
        .iter()
        .map(|&n| {
            let m = two_photon_coupling_product(n, c.eps);
            let ratio = two_photon_coupling_product(2 * n, c.eps) / m;
            vec![n.to_string(), fmt_f64(m), fmt_f64(ratio)]
        })
        .collect();
    let csv = csv_document(config, &[], &["N", "M", "ratio_2N_over_N"], &rows);
    (csv, format!("{} atom numbers", rows.len()))
}

fn run_bs(config: &ExperimentConfig, c: &BsConfig) -> Result<(String, String), CliError> {
    let (t, r) = (c64(c.t[0], c.t[1]), c64(c.r[0], c.r[1]));
    let mut rows = Vec::with_capacity(c.d_steps);
    let mut last = None;
    for k in 0..c.d_steps {
        let d = k as f64 / (c.d_steps - 1) as f64;
        let stats = resch_experiment(t, r, d)?;
        rows.push(vec![
            fmt_f64(d),
            fmt_f64(stats.p_absorbed[0]),
            fmt_f64(stats.p_absorbed[1]),
            fmt_f64(stats.p_absorbed[2]),
        ]);
        last = Some(stats);
    }
    let csv = csv_document(config, &[], &["d", "p0_absorbed", "p1_absorbed", "p2_absorbed"], &rows);
    let p2 = last.map_or(f64::NAN, |s| s.p_absorbed[2]);
    Ok((csv, format!("P(2 absorbed) at d = 1: {p2:.6}")))
}

fn complex_rows(m: &DMatrix<Complex64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn run_ns(config: &ExperimentConfig, c: &NsConfig) -> Result<(String, String), CliError> {
    let found = ns_gate_search(&c.search())?;
    let result = json!({
        "success_prob": found.success_prob,
        "fidelity": found.fidelity,
        "restart": found.restart,
        "amplitudes": found.amplitudes.map(|a| [a.re, a.im]),
        "transfer": complex_rows(&found.transfer),
    });
    let summary = format!(
        "success probability {:.6} at infidelity {:.1e}",
        found.success_prob,
        1.0 - found.fidelity
    );
    Ok((json_document(config, result), summary))
}
