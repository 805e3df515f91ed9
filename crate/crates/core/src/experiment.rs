//! Batch experiments behind the `fuzzy-euler` binary.
//!
//! Each `run_*` function takes an [`ExperimentConfig`], does its work in
//! memory and returns a [`Report`]: CSV rows, a JSON summary and an overall
//! pass flag. Writing files and choosing the exit status is left to the
//! binary, which keeps the functions deterministic and easy to test.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::binomial::{self, BoundCheckRecord};
use crate::error::Error as CoreError;
use crate::euler::{self, EulerParams};
use crate::fuzzy::{uniform_grid, FuzzyNumber, FuzzySequence, DEFAULT_GRID_SIZE};
use crate::tauberian::{self, RateClass};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("cannot access `{}`: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot parse `{}`: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl ExperimentError {
    /// Process exit status for this failure. `1` is reserved for failed
    /// checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 2,
            ExperimentError::Io { .. } => 3,
            ExperimentError::Parse { .. } => 4,
            ExperimentError::Core(_) => 5,
            ExperimentError::Csv(_) => 6,
        }
    }
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Transform,
    Diagnose,
    Bounds,
    ComposeCheck,
    ReproduceExample,
    LimitsCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Transform => "transform",
            Command::Diagnose => "diagnose",
            Command::Bounds => "bounds",
            Command::ComposeCheck => "compose-check",
            Command::ReproduceExample => "reproduce-example",
            Command::LimitsCheck => "limits-check",
        }
    }

    fn default_p(self) -> f64 {
        match self {
            Command::ComposeCheck => 1.5,
            _ => 2.0,
        }
    }

    fn default_upto(self) -> usize {
        match self {
            Command::Transform | Command::ReproduceExample => 40,
            Command::ComposeCheck => 20,
            Command::Diagnose | Command::Bounds => 200,
            Command::LimitsCheck => 1_000_000,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        [
            Command::Transform,
            Command::Diagnose,
            Command::Bounds,
            Command::ComposeCheck,
            Command::ReproduceExample,
            Command::LimitsCheck,
        ]
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| ExperimentError::Config(format!("unknown command `{s}`")))
    }
}

/// Named tolerances and their defaults.
pub const DEFAULT_TOLERANCES: [(&str, f64); 8] = [
    ("example", 1e-12),
    ("compose", 1e-10),
    ("slack", binomial::DEFAULT_SLACK),
    ("oracle", 1e-12),
    ("limits", 1e-4),
    ("limit", euler::DEFAULT_LIMIT_TOL),
    ("window", euler::DEFAULT_WINDOW as f64),
    ("tail_fraction", tauberian::DEFAULT_TAIL_FRACTION),
];

/// Optional values read from a TOML config file. Field names mirror
/// [`ExperimentConfig`].
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<Command>,
    pub p: Option<f64>,
    pub upto: Option<usize>,
    pub grid_size: Option<usize>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub input_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub series: Option<bool>,
    pub expect: Option<String>,
    pub p_count: Option<usize>,
    pub q_max: Option<u64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| ExperimentError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub p: f64,
    pub upto: usize,
    pub grid_size: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub input_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    /// `diagnose`: treat the input as series terms.
    pub series: bool,
    /// `diagnose`: required classification, if any.
    pub expect: Option<RateClass>,
    /// `bounds`: number of success probabilities `j/(p_count+1)`.
    pub p_count: usize,
    /// `limits-check`: largest ceiling parameter.
    pub q_max: u64,
}

impl ExperimentConfig {
    /// Defaults for `command`.
    pub fn new(command: Command) -> Self {
        Self {
            command,
            p: command.default_p(),
            upto: command.default_upto(),
            grid_size: DEFAULT_GRID_SIZE,
            tolerances: DEFAULT_TOLERANCES
                .iter()
                .map(|&(k, v)| (k.to_string(), v))
                .collect(),
            input_path: None,
            output_path: None,
            series: false,
            expect: None,
            p_count: 20,
            q_max: 3,
        }
    }

    /// Overlays values from a config file.
    pub fn apply_file(&mut self, file: ConfigFile) -> Result<()> {
        if let Some(c) = file.command {
            if c != self.command {
                return Err(ExperimentError::Config(format!(
                    "config file is for `{c}` but `{}` was requested",
                    self.command
                )));
            }
        }
        if let Some(p) = file.p {
            self.p = p;
        }
        if let Some(upto) = file.upto {
            self.upto = upto;
        }
        if let Some(g) = file.grid_size {
            self.grid_size = g;
        }
        for (k, v) in file.tolerances {
            self.set_tolerance(&k, v)?;
        }
        if file.input_path.is_some() {
            self.input_path = file.input_path;
        }
        if file.output_path.is_some() {
            self.output_path = file.output_path;
        }
        if let Some(s) = file.series {
            self.series = s;
        }
        if let Some(e) = file.expect {
            self.expect = Some(e.parse().map_err(ExperimentError::Config)?);
        }
        if let Some(c) = file.p_count {
            self.p_count = c;
        }
        if let Some(q) = file.q_max {
            self.q_max = q;
        }
        Ok(())
    }

    pub fn set_tolerance(&mut self, name: &str, value: f64) -> Result<()> {
        if !self.tolerances.contains_key(name) {
            return Err(ExperimentError::Config(format!(
                "unknown tolerance `{name}` (known: {})",
                DEFAULT_TOLERANCES
                    .iter()
                    .map(|t| t.0)
                    .collect::<Vec<_>>()
                    .join(", ")
            )));
        }
        if !(value.is_finite() && value > 0.0) {
            return Err(ExperimentError::Config(format!(
                "tolerance `{name}` must be positive, got {value}"
            )));
        }
        self.tolerances.insert(name.to_string(), value);
        Ok(())
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.p >= 0.0) {
            return Err(ExperimentError::Config(format!(
                "p must be a nonnegative number, got {}",
                self.p
            )));
        }
        if self.grid_size < 2 {
            return Err(ExperimentError::Config(format!(
                "grid size must be at least 2, got {}",
                self.grid_size
            )));
        }
        let tf = self.tolerance("tail_fraction");
        if tf >= 1.0 {
            return Err(ExperimentError::Config(format!(
                "tail_fraction must lie in (0, 1), got {tf}"
            )));
        }
        if self.tolerance("window") < 2.0 {
            return Err(ExperimentError::Config(
                "window must be at least 2".to_string(),
            ));
        }
        Ok(())
    }
}

/// Parses `name=value` as given to `--tol`.
pub fn parse_tolerance(s: &str) -> std::result::Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|e| format!("bad value in `{s}`: {e}"))?;
    Ok((name.trim().to_string(), value))
}

/// Result of one run: CSV text, a JSON summary and whether every enabled
/// check passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub csv: String,
    pub summary: Value,
    pub passed: bool,
}

impl Report {
    fn new<R: Serialize>(rows: &[R], summary: Value, passed: bool) -> Result<Self> {
        Ok(Self {
            csv: to_csv(rows)?,
            summary,
            passed,
        })
    }

    pub fn summary_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary).expect("summary is valid JSON");
        s.push('\n');
        s
    }
}

fn to_csv<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| ExperimentError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub distance: f64,
    pub gap: Option<f64>,
    pub closed_form: Option<f64>,
    pub deviation: Option<f64>,
}

/// Rows sorted by `n`, plus the largest deviation from a closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub max_deviation: Option<f64>,
}

impl ConvergenceReport {
    fn new(rows: Vec<ConvergenceRow>) -> Self {
        let max_deviation = rows
            .iter()
            .filter_map(|r| r.deviation)
            .fold(None, |acc: Option<f64>, d| {
                Some(acc.map_or(d, |a| a.max(d)))
            });
        Self {
            rows,
            max_deviation,
        }
    }
}

/// Terms `u_n` with `[u_n]_α = [(−1)ⁿ + α, (−1)ⁿ + 2 − α]` for `n = 0..=upto`:
/// triangular numbers alternating between peaks 2 and 0.
pub fn generate_example(upto: usize, grid_size: usize) -> crate::Result<FuzzySequence> {
    let grid = uniform_grid(grid_size)?;
    FuzzySequence::generate(upto, |n| {
        let s = if n % 2 == 0 { 1.0 } else { -1.0 };
        FuzzyNumber::triangular(s, s + 1.0, s + 2.0, grid.clone())
    })
}

/// Limit of the Euler means of [`generate_example`]: `[μ]_α = [α, 2 − α]`.
pub fn example_limit(grid_size: usize) -> crate::Result<FuzzyNumber> {
    FuzzyNumber::triangular(0.0, 1.0, 2.0, uniform_grid(grid_size)?)
}

/// Measured `D(t^p_n, μ)` on the example against `|p−1|ⁿ/(p+1)ⁿ`.
pub fn reproduce_example(
    p: f64,
    upto: usize,
    grid_size: usize,
) -> crate::Result<ConvergenceReport> {
    if !(p.is_finite() && p > 0.0) {
        return Err(CoreError::InvalidParameter {
            name: "p",
            value: p,
            reason: "Euler parameter must be positive",
        });
    }
    let seq = generate_example(upto, grid_size)?;
    let mu = example_limit(grid_size)?;
    let means = euler::euler_transform(&seq, upto, p)?;
    let ratio = (p - 1.0).abs() / (p + 1.0);
    let rows = means
        .iter()
        .enumerate()
        .map(|(n, t)| {
            let distance = t.distance(&mu);
            let closed = ratio.powi(n as i32);
            ConvergenceRow {
                n,
                distance,
                gap: None,
                closed_form: Some(closed),
                deviation: Some((distance - closed).abs()),
            }
        })
        .collect();
    Ok(ConvergenceReport::new(rows))
}

fn load_sequence(path: &Path) -> Result<FuzzySequence> {
    let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| ExperimentError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Writes a sequence as JSON with round-trip precision.
pub fn save_sequence(path: &Path, seq: &FuzzySequence) -> Result<()> {
    let text = serde_json::to_string(seq).expect("sequence serializes");
    std::fs::write(path, text).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Input sequence from `input_path`, or the alternating example with
/// `upto + 1` terms.
fn input_sequence(config: &ExperimentConfig) -> Result<FuzzySequence> {
    match &config.input_path {
        Some(path) => load_sequence(path),
        None => Ok(generate_example(config.upto, config.grid_size)?),
    }
}

fn require_len(seq: &FuzzySequence, upto: usize) -> Result<()> {
    if upto >= seq.len() {
        return Err(ExperimentError::Config(format!(
            "upto = {upto} needs {} terms but the input has {}",
            upto + 1,
            seq.len()
        )));
    }
    Ok(())
}

fn f64_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

/// Euler means of the input; distances to the last mean and the gap
/// statistic of the means.
pub fn run_transform(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let seq = input_sequence(config)?;
    require_len(&seq, config.upto)?;
    let means = euler::euler_transform(&seq, config.upto, config.p)?;
    let reference = means.last().clone();
    let gaps = if means.len() >= 2 {
        tauberian::sequence_gap(&means)?.values().to_vec()
    } else {
        Vec::new()
    };
    let rows: Vec<ConvergenceRow> = means
        .iter()
        .enumerate()
        .map(|(n, t)| ConvergenceRow {
            n,
            distance: t.distance(&reference),
            gap: n.checked_sub(1).map(|i| gaps[i]),
            closed_form: None,
            deviation: None,
        })
        .collect();
    let window = config.tolerance("window") as usize;
    let limit = if means.len() >= window {
        euler::detect_limit(&means, config.tolerance("limit"), window)?
    } else {
        None
    };
    let verdict = if gaps.len() >= tauberian::MIN_CLASSIFY_POINTS {
        let g = tauberian::GapSeries::new(gaps)?;
        Some(tauberian::classify_rate(
            &g,
            config.tolerance("tail_fraction"),
        )?)
    } else {
        None
    };
    let summary = json!({
        "command": config.command.name(),
        "p": config.p,
        "upto": config.upto,
        "gap_classification": verdict.as_ref().map(|v| v.classification),
        "gap_tail_sup": verdict.as_ref().map(|v| v.tail_sup),
        "limit_detected": limit.is_some(),
        "limit": limit,
    });
    Report::new(&rows, summary, true)
}

#[derive(Serialize)]
struct GapRow {
    n: usize,
    g_n: f64,
}

/// Gap statistic and rate verdict of the input sequence (or series).
pub fn run_diagnose(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let seq = input_sequence(config)?;
    let gaps = if config.series {
        tauberian::series_gap(&seq)
    } else {
        tauberian::sequence_gap(&seq)?
    };
    let verdict = tauberian::classify_rate(&gaps, config.tolerance("tail_fraction"))?;
    let rows: Vec<GapRow> = gaps.indexed().map(|(n, g_n)| GapRow { n, g_n }).collect();
    let passed = config
        .expect
        .is_none_or(|want| want == verdict.classification);
    let summary = json!({
        "command": config.command.name(),
        "statistic": if config.series { "sqrt(n)*D(u_n,0)" } else { "sqrt(n)*D(u_(n-1),u_n)" },
        "classification": verdict.classification,
        "tail_sup": verdict.tail_sup,
        "head_sup": verdict.head_sup,
        "slope": f64_or_null(verdict.slope_estimate),
        "expected": config.expect,
        "passed": passed,
    });
    Report::new(&rows, summary, passed)
}

/// Success probabilities `j/(count+1)`, `j = 1..=count`.
pub fn probability_grid(count: usize) -> Vec<f64> {
    (1..=count).map(|j| j as f64 / (count + 1) as f64).collect()
}

/// Largest relative error of the floating CDF against exact rational sums
/// for `n = 1..=n_max` and `p ∈ {1/2, 1/3, 1/4}`.
pub fn oracle_rational_deviation(n_max: u64) -> crate::Result<f64> {
    let mut worst = 0.0f64;
    for den in [2u64, 3, 4] {
        let p = 1.0 / den as f64;
        for n in 1..=n_max {
            let floating = binomial::binomial_cdf_row(n, p)?;
            let exact = binomial::binomial_cdf_rational_row(n, 1, den)?;
            for (f, e) in floating.iter().zip(&exact) {
                let e = binomial::rational_to_f64(e);
                worst = worst.max(((f - e) / e).abs());
            }
        }
    }
    Ok(worst)
}

/// Bound check over `n = 1..=upto` and the probability grid.
pub fn run_bounds(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    if config.upto == 0 {
        return Err(ExperimentError::Config("bounds needs upto >= 1".into()));
    }
    if config.p_count == 0 {
        return Err(ExperimentError::Config("bounds needs p_count >= 1".into()));
    }
    let slack = config.tolerance("slack");
    let mut records: Vec<BoundCheckRecord> = Vec::new();
    for n in 1..=config.upto as u64 {
        for p in probability_grid(config.p_count) {
            records.extend(binomial::verify_bounds(n, p, slack)?);
        }
    }
    let failures = records.iter().filter(|r| !r.pass).count();
    let tight = records
        .iter()
        .filter(|r| r.is_endpoint() && r.margin().abs() <= slack)
        .count();
    let min_interior_margin = records
        .iter()
        .filter(|r| !r.is_endpoint())
        .map(BoundCheckRecord::margin)
        .fold(f64::INFINITY, f64::min);
    let oracle_n = (config.upto as u64).min(64);
    let oracle_dev = oracle_rational_deviation(oracle_n)?;
    let oracle_ok = oracle_dev <= config.tolerance("oracle");
    let passed = failures == 0 && oracle_ok;
    let summary = json!({
        "command": config.command.name(),
        "n_max": config.upto,
        "p_count": config.p_count,
        "records": records.len(),
        "failures": failures,
        "tight_endpoints": tight,
        "min_interior_margin": f64_or_null(min_interior_margin),
        "oracle_n_max": oracle_n,
        "oracle_max_rel_error": oracle_dev,
        "oracle_ok": oracle_ok,
        "passed": passed,
    });
    Report::new(&records, summary, passed)
}

/// Termwise `D(E_r(E_p(u))_n, E_q(u)_n)`.
pub fn run_compose_check(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let params = EulerParams::new(config.p)?;
    let seq = input_sequence(config)?;
    require_len(&seq, config.upto)?;
    let (composed, direct) = euler::ceiling_composition(&seq, config.upto, &params)?;
    let rows: Vec<ConvergenceRow> = composed
        .iter()
        .zip(&direct)
        .enumerate()
        .map(|(n, (a, b))| {
            let d = a.distance(b);
            ConvergenceRow {
                n,
                distance: d,
                gap: None,
                closed_form: Some(0.0),
                deviation: Some(d),
            }
        })
        .collect();
    let report = ConvergenceReport::new(rows);
    let max_dev = report.max_deviation.unwrap_or(0.0);
    let passed = max_dev <= config.tolerance("compose");
    let summary = json!({
        "command": config.command.name(),
        "p": params.p(),
        "q": params.q(),
        "r": params.r(),
        "upto": config.upto,
        "max_deviation": max_dev,
        "tolerance": config.tolerance("compose"),
        "passed": passed,
    });
    Report::new(&report.rows, summary, passed)
}

/// Example sequence: measured rate against the closed form.
pub fn run_reproduce_example(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let report = reproduce_example(config.p, config.upto, config.grid_size)?;
    let max_dev = report.max_deviation.unwrap_or(0.0);
    let passed = max_dev <= config.tolerance("example");
    let summary = json!({
        "command": config.command.name(),
        "p": config.p,
        "upto": config.upto,
        "max_deviation": max_dev,
        "tolerance": config.tolerance("example"),
        "passed": passed,
    });
    Report::new(&report.rows, summary, passed)
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitRow {
    pub q: u64,
    pub n: u64,
    pub l: f64,
    pub l_limit: f64,
    pub l_error: f64,
    pub r: f64,
    pub r_limit: f64,
    pub r_error: f64,
}

/// `10³, 10⁴, …` up to `n_max`, with `n_max` itself appended.
pub fn limit_checkpoints(n_max: u64) -> Vec<u64> {
    let mut ns: Vec<u64> = std::iter::successors(Some(1000u64), |n| n.checked_mul(10))
        .take_while(|&n| n <= n_max)
        .collect();
    if ns.last() != Some(&n_max) {
        ns.push(n_max);
    }
    ns
}

/// Fitted decay of an error sequence: log-log slope and `C = max n·err`.
pub fn error_decay(ns: &[u64], errors: &[f64]) -> (Option<f64>, f64) {
    let points: Vec<(f64, f64)> = ns
        .iter()
        .zip(errors)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&n, &e)| ((n as f64).ln(), e.ln()))
        .collect();
    let c = ns
        .iter()
        .zip(errors)
        .map(|(&n, &e)| n as f64 * e)
        .fold(0.0, f64::max);
    (tauberian::least_squares_slope(&points), c)
}

/// Largest log-log slope an error sequence may have and still count as
/// decaying like `1/n` (or faster).
pub const DECAY_SLOPE_MAX: f64 = -0.9;

/// `(Lₙ, Rₙ)` against their limits for `q = 1..=q_max`.
pub fn run_limits_check(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    if config.upto < 2 {
        return Err(ExperimentError::Config(
            "limits-check needs upto >= 2".into(),
        ));
    }
    if config.q_max == 0 {
        return Err(ExperimentError::Config(
            "limits-check needs q_max >= 1".into(),
        ));
    }
    let tol = config.tolerance("limits");
    let ns = limit_checkpoints(config.upto as u64);
    let mut rows = Vec::new();
    let mut per_q = Vec::new();
    let mut passed = true;
    for q in 1..=config.q_max {
        let (l_limit, r_limit) = binomial::proof_limits(q);
        let start = rows.len();
        for &n in &ns {
            let (l, r) = binomial::proof_limit_terms(n, q)?;
            rows.push(LimitRow {
                q,
                n,
                l,
                l_limit,
                l_error: (l - l_limit).abs(),
                r,
                r_limit,
                r_error: (r - r_limit).abs(),
            });
        }
        let block = &rows[start..];
        let last = &block[block.len() - 1];
        let final_ok = last.l_error <= tol && last.r_error <= tol;
        let l_errs: Vec<f64> = block.iter().map(|r| r.l_error).collect();
        let r_errs: Vec<f64> = block.iter().map(|r| r.r_error).collect();
        let (l_slope, l_c) = error_decay(&ns, &l_errs);
        let (r_slope, r_c) = error_decay(&ns, &r_errs);
        let decay_ok = ns.len() < 2
            || [l_slope, r_slope]
                .iter()
                .all(|s| s.is_none_or(|s| s <= DECAY_SLOPE_MAX));
        passed &= final_ok && decay_ok;
        per_q.push(json!({
            "q": q,
            "l_limit": l_limit,
            "r_limit": r_limit,
            "l_error_final": last.l_error,
            "r_error_final": last.r_error,
            "l_slope": l_slope,
            "r_slope": r_slope,
            "l_fitted_c": l_c,
            "r_fitted_c": r_c,
            "final_ok": final_ok,
            "decay_ok": decay_ok,
        }));
    }
    let summary = json!({
        "command": config.command.name(),
        "n_values": ns,
        "tolerance": tol,
        "per_q": per_q,
        "passed": passed,
    });
    Report::new(&rows, summary, passed)
}

/// Dispatches on `config.command`.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    match config.command {
        Command::Transform => run_transform(config),
        Command::Diagnose => run_diagnose(config),
        Command::Bounds => run_bounds(config),
        Command::ComposeCheck => run_compose_check(config),
        Command::ReproduceExample => run_reproduce_example(config),
        Command::LimitsCheck => run_limits_check(config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_terms() {
        let seq = generate_example(3, DEFAULT_GRID_SIZE).unwrap();
        let u0 = &seq.terms()[0];
        let u1 = &seq.terms()[1];
        for (j, &a) in u0.levels().iter().enumerate() {
            assert!((u0.lower()[j] - (1.0 + a)).abs() < 1e-15);
            assert!((u0.upper()[j] - (3.0 - a)).abs() < 1e-15);
            assert!((u1.lower()[j] - (-1.0 + a)).abs() < 1e-15);
            assert!((u1.upper()[j] - (1.0 - a)).abs() < 1e-15);
        }
        for w in seq.terms().windows(2) {
            assert!((w[0].distance(&w[1]) - 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn reproduce_cases() {
        let r = reproduce_example(2.0, 40, DEFAULT_GRID_SIZE).unwrap();
        assert!(r.max_deviation.unwrap() <= 1e-12);
        let r = reproduce_example(1.0, 10, DEFAULT_GRID_SIZE).unwrap();
        for row in &r.rows[1..] {
            assert!(row.distance < 1e-14, "n={} d={}", row.n, row.distance);
        }
        let r = reproduce_example(3.0, 2, DEFAULT_GRID_SIZE).unwrap();
        assert!((r.rows[2].distance - 0.25).abs() < 1e-15);
        assert!(reproduce_example(0.0, 2, DEFAULT_GRID_SIZE).is_err());
    }

    #[test]
    fn tolerance_parsing() {
        assert_eq!(
            parse_tolerance("compose=1e-9"),
            Ok(("compose".into(), 1e-9))
        );
        assert!(parse_tolerance("compose").is_err());
        assert!(parse_tolerance("compose=x").is_err());
        let mut c = ExperimentConfig::new(Command::ComposeCheck);
        assert!(c.set_tolerance("bogus", 1.0).is_err());
        assert!(c.set_tolerance("compose", -1.0).is_err());
        c.set_tolerance("compose", 1e-9).unwrap();
        assert_eq!(c.tolerance("compose"), 1e-9);
    }

    #[test]
    fn config_file_overlay() {
        let file: ConfigFile = toml::from_str(
            r#"
            command = "compose-check"
            p = 2.7
            upto = 12
            [tolerances]
            compose = 1e-11
            "#,
        )
        .unwrap();
        let mut c = ExperimentConfig::new(Command::ComposeCheck);
        c.apply_file(file.clone()).unwrap();
        assert_eq!((c.p, c.upto, c.tolerance("compose")), (2.7, 12, 1e-11));
        let mut other = ExperimentConfig::new(Command::Bounds);
        assert!(other.apply_file(file).is_err());
        assert!(toml::from_str::<ConfigFile>("nonsense = 1").is_err());
    }

    #[test]
    fn checkpoints() {
        assert_eq!(
            limit_checkpoints(1_000_000),
            vec![1000, 10_000, 100_000, 1_000_000]
        );
        assert_eq!(limit_checkpoints(5000), vec![1000, 5000]);
        assert_eq!(limit_checkpoints(50), vec![50]);
    }

    #[test]
    fn command_names_round_trip() {
        for c in [
            Command::Transform,
            Command::Diagnose,
            Command::Bounds,
            Command::ComposeCheck,
            Command::ReproduceExample,
            Command::LimitsCheck,
        ] {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert!("nope".parse::<Command>().is_err());
    }
}
