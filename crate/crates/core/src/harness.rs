//! Monte-Carlo experiment engine: reproducible embedding trials over
//! (n, p) grids, CSV output, threshold estimation and plot-script emission.
//!
//! Determinism contract: every per-trial seed derives from
//! (config seed, trial index), and output rows are ordered by
//! (config index, trial index) no matter how trials are scheduled, so a
//! re-run with the same seeds produces a byte-identical CSV. Wall-clock
//! timing is therefore opt-in ([`Timing::WallClock`]); the default writes a
//! zero ms column.

use crate::embedder::{embed, EmbedOutcome};
use crate::goodness::{implied_c, induced_p, GoodnessParams};
use crate::graph::{gen_degree2, gen_random_degree2, Degree2Spec, Graph};
use crate::rng::child_seed_indexed;
use std::fmt;
#[cfg(not(target_arch = "wasm32"))]
use std::time::Instant;
use thiserror::Error;

/// Header comment marking the CSV schema version.
pub const CSV_VERSION_LINE: &str = "# span2 scan csv v1";
pub const CSV_HEADER: &str = "kind,n,C,p,eps,seed,trial,success,stage,witness,ms";

#[derive(Debug, Error, PartialEq)]
pub enum HarnessError {
    #[error("invalid config {index}: {reason}")]
    InvalidConfig { index: usize, reason: String },
    #[error("scan grid is empty")]
    EmptyGrid,
    #[error("csv line {line}: {reason}")]
    MalformedCsv { line: usize, reason: String },
    #[error("success rates for n={n} never cross 0.5; threshold not bracketed")]
    NotBracketed { n: usize },
    #[error("no aggregate rows in csv")]
    NoAggregates,
}

/// Edge probability, given directly or induced from the threshold constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbParam {
    Direct(f64),
    FromC(f64),
}

/// Where the trial pattern comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum PatternSource {
    /// Fresh random degree-<=2 graph per trial.
    Random,
    /// A fixed graph, padded with isolated vertices up to n.
    Fixed(Graph),
    /// Explicit path/cycle lengths, padded up to n.
    Spec(Degree2Spec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub prob: ProbParam,
    pub eps: f64,
    pub delta: f64,
    pub seed: u64,
    pub trials: usize,
    pub pattern: PatternSource,
    /// Sampling budget for the property checkers (per clause).
    pub check_budget: usize,
}

impl ExperimentConfig {
    pub fn new(n: usize, prob: ProbParam, seed: u64, trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            n,
            prob,
            eps: 0.02,
            delta: 0.01,
            seed,
            trials,
            pattern: PatternSource::Random,
            check_budget: 200,
        }
    }

    /// (p clamped to [0,1], the matching c, whether clamping occurred).
    pub fn resolved_p(&self) -> (f64, f64, bool) {
        match self.prob {
            ProbParam::Direct(p) => (p, implied_c(self.n, p), false),
            ProbParam::FromC(c) => {
                let raw = induced_p(self.n, c);
                if raw > 1.0 {
                    (1.0, c, true)
                } else {
                    (raw, c, false)
                }
            }
        }
    }

    pub fn params(&self) -> GoodnessParams {
        let (_, c, _) = self.resolved_p();
        GoodnessParams { c, eps: self.eps, delta: self.delta }
    }

    pub fn validate(&self, index: usize) -> Result<(), HarnessError> {
        let bad = |reason: String| Err(HarnessError::InvalidConfig { index, reason });
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        let (p, _, _) = self.resolved_p();
        if !(0.0..=1.0).contains(&p) {
            return bad(format!("p = {p} outside [0,1]"));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps = {} outside (0,1)", self.eps));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta = {} outside (0,1)", self.delta));
        }
        match &self.pattern {
            PatternSource::Fixed(h) if h.n() > self.n => {
                bad(format!("fixed pattern has {} vertices, n = {}", h.n(), self.n))
            }
            PatternSource::Spec(spec) => {
                if spec.validate().is_err() || spec.total_vertices() > self.n {
                    bad("pattern spec invalid or larger than n".into())
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// Whether trial rows carry measured wall-clock milliseconds. `Off` keeps
/// the CSV a pure function of the seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timing {
    Off,
    WallClock,
}

/// One embedding trial, replayable from (config, trial index).
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub n: usize,
    pub c: f64,
    pub p: f64,
    pub eps: f64,
    pub seed: u64,
    pub trial: usize,
    pub success: bool,
    pub stage: Option<usize>,
    pub witness_size: Option<usize>,
    pub ms: u64,
}

impl TrialResult {
    pub fn csv_row(&self) -> String {
        format!(
            "trial,{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.c,
            self.p,
            self.eps,
            self.seed,
            self.trial,
            u8::from(self.success),
            self.stage.map_or(String::new(), |s| s.to_string()),
            self.witness_size.map_or(String::new(), |w| w.to_string()),
            self.ms
        )
    }
}

fn trial_pattern(cfg: &ExperimentConfig, pattern_seed: u64) -> Result<Graph, String> {
    match &cfg.pattern {
        PatternSource::Random => Ok(gen_random_degree2(cfg.n, pattern_seed)),
        PatternSource::Fixed(h) => h.padded_to(cfg.n).map_err(|e| e.to_string()),
        PatternSource::Spec(spec) => gen_degree2(spec)
            .and_then(|h| h.padded_to(cfg.n))
            .map_err(|e| e.to_string()),
    }
}

#[cfg(not(target_arch = "wasm32"))]
fn now() -> Option<Instant> {
    Some(Instant::now())
}

#[cfg(target_arch = "wasm32")]
fn now() -> Option<()> {
    None
}

/// Runs one trial: fresh pattern and host from (config seed, trial index),
/// then the embedding pipeline. Generation or partition errors become
/// failure rows, never panics.
pub fn run_trial(cfg: &ExperimentConfig, trial_index: usize, timing: Timing) -> TrialResult {
    let trial_seed = child_seed_indexed(cfg.seed, "trial", trial_index as u64);
    let (p, c, _) = cfg.resolved_p();
    let mut result = TrialResult {
        n: cfg.n,
        c,
        p,
        eps: cfg.eps,
        seed: trial_seed,
        trial: trial_index,
        success: false,
        stage: None,
        witness_size: None,
        ms: 0,
    };
    let started = if timing == Timing::WallClock { now() } else { None };
    let outcome = (|| {
        let h = trial_pattern(cfg, crate::rng::child_seed(trial_seed, "pattern-src"))?;
        let g = gen_gnp(cfg.n, p, trial_seed).map_err(|e| e.to_string())?;
        embed(&g, &h, &cfg.params(), trial_seed).map_err(|e| e.to_string())
    })();
    #[cfg(not(target_arch = "wasm32"))]
    if let Some(t0) = started {
        result.ms = t0.elapsed().as_millis() as u64;
    }
    #[cfg(target_arch = "wasm32")]
    let _ = started;
    match outcome {
        Ok(EmbedOutcome::Success(_)) => result.success = true,
        Ok(out @ EmbedOutcome::Failure { stage, .. }) => {
            result.stage = Some(stage);
            result.witness_size = Some(out.witness_size());
        }
        Err(_) => {}
    }
    result
}

use crate::graph::gen_gnp;

fn config_rows(cfg: &ExperimentConfig, timing: Timing) -> Vec<TrialResult> {
    #[cfg(not(target_arch = "wasm32"))]
    {
        use rayon::prelude::*;
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, t, timing))
            .collect()
    }
    #[cfg(target_arch = "wasm32")]
    {
        (0..cfg.trials).map(|t| run_trial(cfg, t, timing)).collect()
    }
}

/// Aggregate of one config's trials.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub n: usize,
    pub c: f64,
    pub p: f64,
    pub eps: f64,
    pub seed: u64,
    pub trials: usize,
    pub successes: usize,
    pub mean_ms: f64,
}

impl Aggregate {
    pub fn rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    pub fn csv_row(&self) -> String {
        format!(
            "agg,{},{},{},{},{},,{},,,{}",
            self.n,
            self.c,
            self.p,
            self.eps,
            self.seed,
            self.rate(),
            self.mean_ms
        )
    }
}

fn aggregate(cfg: &ExperimentConfig, rows: &[TrialResult]) -> Aggregate {
    let (p, c, _) = cfg.resolved_p();
    Aggregate {
        n: cfg.n,
        c,
        p,
        eps: cfg.eps,
        seed: cfg.seed,
        trials: rows.len(),
        successes: rows.iter().filter(|r| r.success).count(),
        mean_ms: rows.iter().map(|r| r.ms as f64).sum::<f64>() / rows.len().max(1) as f64,
    }
}

/// Full scan results: per-trial rows and per-config aggregates, in grid
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResults {
    pub trials: Vec<Vec<TrialResult>>,
    pub aggregates: Vec<Aggregate>,
}

impl ScanResults {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_VERSION_LINE);
        out.push('\n');
        out.push_str(CSV_HEADER);
        out.push('\n');
        for (rows, agg) in self.trials.iter().zip(&self.aggregates) {
            for row in rows {
                out.push_str(&row.csv_row());
                out.push('\n');
            }
            out.push_str(&agg.csv_row());
            out.push('\n');
        }
        out
    }
}

/// Runs every config of the grid (work-pooled per config on native
/// targets); ordering of the output is canonical regardless of scheduling.
pub fn scan_results(grid: &[ExperimentConfig], timing: Timing) -> Result<ScanResults, HarnessError> {
    if grid.is_empty() {
        return Err(HarnessError::EmptyGrid);
    }
    for (index, cfg) in grid.iter().enumerate() {
        cfg.validate(index)?;
    }
    let mut trials = Vec::with_capacity(grid.len());
    let mut aggregates = Vec::with_capacity(grid.len());
    for cfg in grid {
        let rows = config_rows(cfg, timing);
        aggregates.push(aggregate(cfg, &rows));
        trials.push(rows);
    }
    Ok(ScanResults { trials, aggregates })
}

/// Scan straight to CSV text.
pub fn scan(grid: &[ExperimentConfig], timing: Timing) -> Result<String, HarnessError> {
    Ok(scan_results(grid, timing)?.to_csv())
}

/// Builds the standard grid: the cross product of the n values and the
/// probability values, config seeds derived from (master seed, config
/// index).
pub fn build_grid(
    ns: &[usize],
    probs: &[ProbParam],
    eps: f64,
    delta: f64,
    master_seed: u64,
    trials: usize,
    pattern: PatternSource,
) -> Vec<ExperimentConfig> {
    let mut grid = Vec::with_capacity(ns.len() * probs.len());
    for &n in ns {
        for &prob in probs {
            let index = grid.len() as u64;
            grid.push(ExperimentConfig {
                n,
                prob,
                eps,
                delta,
                seed: child_seed_indexed(master_seed, "config", index),
                trials,
                pattern: pattern.clone(),
                check_budget: 200,
            });
        }
    }
    grid
}

/// Parsed aggregate row.
#[derive(Debug, Clone, PartialEq)]
struct AggRow {
    n: usize,
    p: f64,
    rate: f64,
}

fn parse_aggregates(csv: &str) -> Result<Vec<AggRow>, HarnessError> {
    let mut out = Vec::new();
    let mut header_seen = false;
    for (idx, line) in csv.lines().enumerate() {
        let lineno = idx + 1;
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        if !header_seen {
            if line != CSV_HEADER {
                return Err(HarnessError::MalformedCsv {
                    line: lineno,
                    reason: format!("expected header \"{CSV_HEADER}\""),
                });
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(HarnessError::MalformedCsv {
                line: lineno,
                reason: format!("expected 11 fields, found {}", fields.len()),
            });
        }
        if fields[0] != "agg" {
            continue;
        }
        let parse = |f: &str, what: &str| -> Result<f64, HarnessError> {
            f.parse().map_err(|_| HarnessError::MalformedCsv {
                line: lineno,
                reason: format!("bad {what}: {f}"),
            })
        };
        out.push(AggRow {
            n: parse(fields[1], "n")? as usize,
            p: parse(fields[3], "p")?,
            rate: parse(fields[7], "success")?,
        });
    }
    if !header_seen {
        return Err(HarnessError::MalformedCsv { line: 1, reason: "missing header".into() });
    }
    Ok(out)
}

/// Interpolated 50%-success probability for one n, next to the reference
/// scale sqrt(log n / n).
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdEstimate {
    pub n: usize,
    pub p50: f64,
    pub reference: f64,
    pub ratio: f64,
}

impl fmt::Display for ThresholdEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} p50={:.4} sqrt(log n/n)={:.4} ratio={:.2}",
            self.n, self.p50, self.reference, self.ratio
        )
    }
}

/// Estimates, per n in the scan, the smallest p with success rate >= 0.5 by
/// linear interpolation from the previous grid point. Errors when a group's
/// rates never cross 0.5.
pub fn threshold_estimate(csv: &str) -> Result<Vec<ThresholdEstimate>, HarnessError> {
    let aggs = parse_aggregates(csv)?;
    if aggs.is_empty() {
        return Err(HarnessError::NoAggregates);
    }
    let mut by_n: std::collections::BTreeMap<usize, Vec<(f64, f64)>> = Default::default();
    for row in aggs {
        by_n.entry(row.n).or_default().push((row.p, row.rate));
    }
    let mut out = Vec::new();
    for (n, mut points) in by_n {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let first_hit = points.iter().position(|&(_, r)| r >= 0.5);
        let p50 = match first_hit {
            Some(i) if i > 0 => {
                let (p_lo, r_lo) = points[i - 1];
                let (p_hi, r_hi) = points[i];
                p_lo + (0.5 - r_lo) * (p_hi - p_lo) / (r_hi - r_lo)
            }
            _ => return Err(HarnessError::NotBracketed { n }),
        };
        let reference = induced_p(n, 1.0);
        out.push(ThresholdEstimate { n, p50, reference, ratio: p50 / reference });
    }
    Ok(out)
}

/// Emits a gnuplot script drawing one success-rate-vs-p series per n from
/// the aggregate rows; the CSV stays the source of truth. Byte-identical
/// for identical (csv, path) inputs.
pub fn emit_plot_script(csv: &str, csv_path: &str) -> Result<String, HarnessError> {
    let aggs = parse_aggregates(csv)?;
    if aggs.is_empty() {
        return Err(HarnessError::NoAggregates);
    }
    let mut ns: Vec<usize> = aggs.iter().map(|a| a.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut out = String::new();
    out.push_str("# success rate vs edge probability, one series per n\n");
    out.push_str(&format!("# data: {csv_path}\n"));
    out.push_str("set datafile separator ','\n");
    out.push_str("set xlabel 'edge probability p'\n");
    out.push_str("set ylabel 'success rate'\n");
    out.push_str("set yrange [-0.02:1.02]\n");
    out.push_str("set key bottom right\n");
    out.push_str("plot \\\n");
    for (i, n) in ns.iter().enumerate() {
        let sep = if i + 1 == ns.len() { "\n" } else { ", \\\n" };
        out.push_str(&format!(
            "  '{csv_path}' using (strcol(1) eq 'agg' && column(2) == {n} ? column(4) : NaN):(column(8)) \
             with linespoints title 'n={n}'{sep}"
        ));
    }
    Ok(out)
}
