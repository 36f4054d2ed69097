//! span2: generate hosts and patterns, run the staged embedding, check the
//! host properties, and drive Monte-Carlo scans.
//!
//! Exit codes: 0 on success, 1 when an embedding or check fails (an
//! expected experimental outcome), 2 on usage or configuration errors.

use clap::{Args, Parser, Subcommand};
use span2_core::embedder::{embed, parse_outcome_text, verify_embedding, EmbedOutcome, ParsedOutcome};
use span2_core::goodness::{
    check_p1, check_p2, find_matching_m, implied_c, induced_p, partition_sites, GoodnessError,
    GoodnessParams, P1Report, P2Report,
};
use span2_core::graph::{
    gen_degree2, gen_gnp, gen_random_degree2, read_edge_list, write_edge_list, Degree2Spec, Graph,
};
use span2_core::harness::{
    build_grid, emit_plot_script, scan_results, threshold_estimate, PatternSource, ProbParam,
    Timing, CSV_HEADER, CSV_VERSION_LINE,
};
use span2_core::pattern::{maximalize, partition_pattern};
use std::fs;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "span2",
    about = "Spanning embeddings of degree-<=2 graphs into random hosts",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random host G(n,p) as an edge list.
    GenGnp(GenGnpArgs),
    /// Generate a degree-<=2 pattern as an edge list.
    GenPattern(GenPatternArgs),
    /// Run the staged embedding of one pattern into one host.
    Embed(EmbedArgs),
    /// Statistical host-property checks with Chernoff predictions.
    CheckGoodness(CheckArgs),
    /// Monte-Carlo success-rate scan over an (n, p) grid.
    Scan(ScanArgs),
    /// Verify a saved embedding map against its host and pattern.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ProbArgs {
    /// Edge probability.
    #[arg(long, conflicts_with = "c")]
    p: Option<f64>,
    /// Threshold constant; induces p = C * sqrt(log n / n).
    #[arg(long = "C")]
    c: Option<f64>,
}

impl ProbArgs {
    fn resolve(&self, n: usize) -> Result<(f64, f64), String> {
        match (self.p, self.c) {
            (Some(p), None) => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(format!("--p {p} outside [0,1]"));
                }
                Ok((p, implied_c(n, p)))
            }
            (None, Some(c)) => {
                let raw = induced_p(n, c);
                if raw > 1.0 {
                    eprintln!("warning: C={c} induces p={raw:.4} > 1 at n={n}; clamped to 1");
                    Ok((1.0, c))
                } else {
                    Ok((raw, c))
                }
            }
            (None, None) => Err("one of --p or --C is required".into()),
            (Some(_), Some(_)) => Err("--p and --C are mutually exclusive".into()),
        }
    }
}

#[derive(Args)]
struct GenGnpArgs {
    /// Vertex count.
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    prob: ProbArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct GenPatternArgs {
    /// Vertex count (patterns smaller than n are padded with isolated
    /// vertices).
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated path lengths (vertex counts).
    #[arg(long, value_delimiter = ',')]
    paths: Vec<usize>,
    /// Comma-separated cycle lengths (>= 3).
    #[arg(long, value_delimiter = ',')]
    cycles: Vec<usize>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct EmbedArgs {
    /// Vertex count; required unless --host is given.
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    prob: ProbArgs,
    #[arg(long, default_value_t = 0.02)]
    eps: f64,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Host edge-list file; generated as G(n,p) when omitted.
    #[arg(long)]
    host: Option<String>,
    /// Pattern edge-list file; random degree-<=2 graph when omitted.
    #[arg(long)]
    pattern: Option<String>,
    /// Write the pattern partition ("v label" lines plus "w a b" triples).
    #[arg(long)]
    dump_partition: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// text = outcome wire format, csv = one trial row.
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    prob: ProbArgs,
    #[arg(long, default_value_t = 0.02)]
    eps: f64,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    host: Option<String>,
    /// Sampling budget per checker clause.
    #[arg(long, default_value_t = 200)]
    budget: usize,
    #[arg(long, default_value = "text")]
    format: String,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ScanArgs {
    /// Comma-separated vertex counts.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Comma-separated edge probabilities.
    #[arg(long, value_delimiter = ',', conflicts_with = "c")]
    p: Vec<f64>,
    /// Comma-separated threshold constants.
    #[arg(long = "C", value_delimiter = ',')]
    c: Vec<f64>,
    #[arg(long, default_value_t = 0.02)]
    eps: f64,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    /// Master seed; config seeds derive from (seed, config index).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Pattern edge-list file used for every trial (random when omitted).
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// csv (default) or text summary.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Record wall-clock milliseconds per trial (breaks byte-level
    /// reproducibility of the CSV).
    #[arg(long)]
    timing: bool,
    /// Write a gnuplot script next to the CSV (requires --out).
    #[arg(long)]
    plot_script: Option<String>,
    /// Print interpolated 50%-success thresholds per n.
    #[arg(long)]
    threshold: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    host: String,
    #[arg(long)]
    pattern: String,
    /// Outcome file produced by `embed` (must contain a SUCCESS map).
    #[arg(long)]
    map: String,
}

fn read_graph_file(path: &str) -> Result<Graph, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    read_edge_list(&text).map_err(|e| format!("{path}: {e}"))
}

fn emit(out: &Option<String>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{path}: {e}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn gen_gnp_cmd(args: &GenGnpArgs) -> Result<u8, String> {
    let (p, _) = args.prob.resolve(args.n)?;
    let g = gen_gnp(args.n, p, args.seed).map_err(|e| e.to_string())?;
    emit(&args.out, &write_edge_list(&g))?;
    Ok(EXIT_OK)
}

fn gen_pattern_cmd(args: &GenPatternArgs) -> Result<u8, String> {
    let g = if args.paths.is_empty() && args.cycles.is_empty() {
        gen_random_degree2(args.n, args.seed)
    } else {
        let spec = Degree2Spec { paths: args.paths.clone(), cycles: args.cycles.clone() };
        let g = gen_degree2(&spec).map_err(|e| e.to_string())?;
        if g.n() > args.n {
            return Err(format!("pattern spec covers {} vertices, --n is {}", g.n(), args.n));
        }
        g.padded_to(args.n).map_err(|e| e.to_string())?
    };
    emit(&args.out, &write_edge_list(&g))?;
    Ok(EXIT_OK)
}

fn load_host(
    host: &Option<String>,
    n: Option<usize>,
    prob: &ProbArgs,
    seed: u64,
) -> Result<(Graph, f64, f64), String> {
    match host {
        Some(path) => {
            let g = read_graph_file(path)?;
            if let Some(n) = n {
                if n != g.n() {
                    return Err(format!("--n {n} disagrees with host file ({} vertices)", g.n()));
                }
            }
            // p for reporting: direct if given, else induced; else density.
            let (p, c) = match (prob.p, prob.c) {
                (None, None) => {
                    let pairs = g.n() * (g.n() - 1) / 2;
                    let density = if pairs == 0 { 0.0 } else { g.m() as f64 / pairs as f64 };
                    (density, implied_c(g.n(), density))
                }
                _ => prob.resolve(g.n())?,
            };
            Ok((g, p, c))
        }
        None => {
            let n = n.ok_or("--n is required when no --host file is given")?;
            let (p, c) = prob.resolve(n)?;
            let g = gen_gnp(n, p, seed).map_err(|e| e.to_string())?;
            Ok((g, p, c))
        }
    }
}

fn embed_cmd(args: &EmbedArgs) -> Result<u8, String> {
    let (g, p, c) = load_host(&args.host, args.n, &args.prob, args.seed)?;
    let n = g.n();
    let h = match &args.pattern {
        Some(path) => {
            let h = read_graph_file(path)?;
            if h.n() > n {
                return Err(format!("pattern has {} vertices, host only {n}", h.n()));
            }
            h.padded_to(n).map_err(|e| e.to_string())?
        }
        None => gen_random_degree2(n, args.seed),
    };
    let params = GoodnessParams { c, eps: args.eps, delta: args.delta };
    if let Some(path) = &args.dump_partition {
        let hm = maximalize(&h).map_err(|e| e.to_string())?;
        match partition_pattern(&hm, args.eps) {
            Ok(pp) => fs::write(path, pp.to_text()).map_err(|e| format!("{path}: {e}"))?,
            Err(e) => eprintln!("warning: no partition dumped: {e}"),
        }
    }
    let outcome = embed(&g, &h, &params, args.seed).map_err(|e| e.to_string())?;
    match args.format.as_str() {
        "text" => emit(&args.out, &outcome.to_text())?,
        "csv" => {
            let row = format!(
                "{CSV_VERSION_LINE}\n{CSV_HEADER}\ntrial,{n},{c},{p},{},{},0,{},{},{},0\n",
                args.eps,
                args.seed,
                u8::from(outcome.is_success()),
                outcome.failing_stage().map_or(String::new(), |s| s.to_string()),
                match &outcome {
                    EmbedOutcome::Failure { .. } => outcome.witness_size().to_string(),
                    EmbedOutcome::Success(_) => String::new(),
                },
            );
            emit(&args.out, &row)?;
        }
        other => return Err(format!("unknown format {other}")),
    }
    Ok(if outcome.is_success() { EXIT_OK } else { EXIT_NEGATIVE })
}

fn check_csv_rows(n: usize, c: f64, p: f64, eps: f64, seed: u64, p1: &P1Report, p2s: &[P2Report]) -> String {
    let mut out = String::new();
    out.push_str(CSV_VERSION_LINE);
    out.push('\n');
    out.push_str(CSV_HEADER);
    out.push('\n');
    // success reflects the in-regime verdict; witness carries the
    // diagnostic violation count (clamped samples included).
    out.push_str(&format!(
        "p1,{n},{c},{p},{eps},{seed},{},{},,{},0\n",
        p1.samples,
        u8::from(p1.in_regime_violations == 0),
        p1.violation_count
    ));
    for rep in p2s {
        out.push_str(&format!(
            "p2a-k{},{n},{c},{p},{eps},{seed},{},{},{},{},0\n",
            rep.k,
            rep.a_samples,
            u8::from(rep.a_in_regime_violations == 0),
            rep.k,
            rep.a_violation_count
        ));
        out.push_str(&format!(
            "p2b-k{},{n},{c},{p},{eps},{seed},{},{},{},{},0\n",
            rep.k,
            rep.b_samples,
            u8::from(rep.b_violation_count == 0),
            rep.k,
            rep.b_violation_count
        ));
    }
    out
}

fn check_cmd(args: &CheckArgs) -> Result<u8, String> {
    let (g, p, c) = load_host(&args.host, args.n, &args.prob, args.seed)?;
    let n = g.n();
    let params = GoodnessParams { c, eps: args.eps, delta: args.delta };
    let sp = partition_sites(n, &params, args.seed).map_err(|e| e.to_string())?;
    let sp = match find_matching_m(&g, sp) {
        Ok(sp) => sp,
        Err(GoodnessError::MatchingDeficient { achieved, target }) => {
            emit(
                &args.out,
                &format!("M-DEFICIENT: reached {achieved} of {target} required matching edges\n"),
            )?;
            return Ok(EXIT_NEGATIVE);
        }
        Err(e) => return Err(e.to_string()),
    };
    let p1 = check_p1(&g, &sp, &params, args.budget, args.seed).map_err(|e| e.to_string())?;
    let p2s: Vec<P2Report> = [1usize, 2]
        .iter()
        .map(|&k| check_p2(&g, &sp, &params, k, args.budget, args.seed))
        .collect::<Result<_, _>>()
        .map_err(|e: GoodnessError| e.to_string())?;
    // Clamped (out-of-regime) samples are diagnostics; only in-regime
    // violations count against the host. Clause (b) samples are always at
    // or above the defining size.
    let clean = p1.in_regime_violations == 0
        && p2s.iter().all(|r| r.a_in_regime_violations == 0 && r.b_violation_count == 0);
    match args.format.as_str() {
        "text" => {
            let mut text = format!(
                "host: n={n} m={} p={p:.4} (C={c:.3}) eps={} delta={}\nmatching: {} edges in class 0\n",
                g.m(),
                args.eps,
                args.delta,
                sp.matching().map_or(0, |m| m.len()),
            );
            text.push_str(&format!("{p1}\n"));
            for rep in &p2s {
                text.push_str(&format!("{rep}\n"));
            }
            text.push_str(if clean {
                "RESULT: no in-regime violations\n"
            } else {
                "RESULT: in-regime violations found\n"
            });
            emit(&args.out, &text)?;
        }
        "csv" => emit(&args.out, &check_csv_rows(n, c, p, args.eps, args.seed, &p1, &p2s))?,
        other => return Err(format!("unknown format {other}")),
    }
    Ok(if clean { EXIT_OK } else { EXIT_NEGATIVE })
}

fn scan_cmd(args: &ScanArgs) -> Result<u8, String> {
    let probs: Vec<ProbParam> = if !args.p.is_empty() {
        args.p.iter().map(|&p| ProbParam::Direct(p)).collect()
    } else if !args.c.is_empty() {
        args.c.iter().map(|&c| ProbParam::FromC(c)).collect()
    } else {
        return Err("one of --p or --C is required".into());
    };
    let pattern = match &args.pattern {
        Some(path) => PatternSource::Fixed(read_graph_file(path)?),
        None => PatternSource::Random,
    };
    let grid = build_grid(&args.n, &probs, args.eps, args.delta, args.seed, args.trials, pattern);
    let timing = if args.timing { Timing::WallClock } else { Timing::Off };
    let results = scan_results(&grid, timing).map_err(|e| e.to_string())?;
    let csv = results.to_csv();
    match args.format.as_str() {
        "csv" => emit(&args.out, &csv)?,
        "text" => {
            if args.plot_script.is_some() {
                return Err("--plot-script requires --format csv".into());
            }
            let mut text = String::from("n       p       C       success  trials  mean_ms\n");
            for agg in &results.aggregates {
                text.push_str(&format!(
                    "{:<7} {:<7.3} {:<7.3} {:<8.3} {:<7} {:.1}\n",
                    agg.n,
                    agg.p,
                    agg.c,
                    agg.rate(),
                    agg.trials,
                    agg.mean_ms
                ));
            }
            emit(&args.out, &text)?;
        }
        other => return Err(format!("unknown format {other}")),
    }
    if let Some(script_path) = &args.plot_script {
        let csv_path = args
            .out
            .as_ref()
            .ok_or("--plot-script needs --out so the script can reference the CSV")?;
        let script = emit_plot_script(&csv, csv_path).map_err(|e| e.to_string())?;
        fs::write(script_path, script).map_err(|e| format!("{script_path}: {e}"))?;
    }
    if args.threshold {
        match threshold_estimate(&csv) {
            Ok(rows) => {
                for row in rows {
                    eprintln!("{row}");
                }
            }
            Err(e) => eprintln!("threshold: {e}"),
        }
    }
    Ok(EXIT_OK)
}

fn verify_cmd(args: &VerifyArgs) -> Result<u8, String> {
    let g = read_graph_file(&args.host)?;
    let h = read_graph_file(&args.pattern)?;
    let text = fs::read_to_string(&args.map).map_err(|e| format!("{}: {e}", args.map))?;
    let map = match parse_outcome_text(&text).map_err(|e| format!("{}: {e}", args.map))? {
        ParsedOutcome::Success(map) => map,
        ParsedOutcome::Failure { stage, reason, .. } => {
            return Err(format!(
                "{} records a failure (stage {stage}, {reason}), nothing to verify",
                args.map
            ));
        }
    };
    let h = if h.n() < g.n() { h.padded_to(g.n()).map_err(|e| e.to_string())? } else { h };
    match verify_embedding(&g, &h, &map) {
        Ok(()) => {
            println!("PASS: {} vertices, {} pattern edges preserved", h.n(), h.m());
            Ok(EXIT_OK)
        }
        Err(e) => {
            println!("FAIL: {e}");
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::GenGnp(args) => gen_gnp_cmd(args),
        Cmd::GenPattern(args) => gen_pattern_cmd(args),
        Cmd::Embed(args) => embed_cmd(args),
        Cmd::CheckGoodness(args) => check_cmd(args),
        Cmd::Scan(args) => scan_cmd(args),
        Cmd::Verify(args) => verify_cmd(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
