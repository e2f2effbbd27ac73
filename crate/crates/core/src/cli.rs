//! Command-line front end. [`run`] takes explicit streams so it can be
//! driven from tests as well as from the `regbip` binary.
//!
//! Exit codes: 0 success, 1 verification or probe failure, 2 usage or
//! input error, 3 stage failure (the stage name goes to stderr).

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Instant, SystemTime};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::factor::{probe_robust_matchability, ProbeParams, ProbeReport};
use crate::generators::GeneratorSpec;
use crate::graph::{parse_edge_list, write_edge_list, Edge, Graph};
use crate::params::Mode;
use crate::pipeline::{absorber_quarter, decompose, one_factorization, verify, DecompositionJson, PipelineError, PipelineParams};
use crate::spectral;

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNVERIFIED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_STAGE: i32 = 3;

/// Fixed header of the `bench` CSV.
pub const BENCH_HEADER: &str = "n,d,mode,parts,bound,resamples,wall_ms,verified";

#[derive(Parser, Debug)]
#[command(name = "regbip", version, about = "Decompose regular graphs into regular bipartite spanning subgraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated graph as an edge list.
    Generate {
        /// Generator spec, e.g. `random_regular:n=200,d=32,seed=7`, `complete:n=64`, `circulant:n=10,offsets=1/2`.
        spec: String,
        /// Overrides the seed of a `random_regular` spec.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Spectral certificate `lambda <= budget * d` as JSON.
    Certify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Fraction of `d` allowed for lambda.
        #[arg(long, default_value_t = 1.0 / 12.0)]
        budget: f64,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Decompose a regular graph and write the verified decomposition as JSON.
    Decompose {
        #[command(flatten)]
        run: RunArgs,
        /// Also write the stage trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Split a regular graph into perfect matchings.
    Factorize {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check a decomposition against its host graph; exit 0 iff all checks pass.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        dec: PathBuf,
        #[arg(long, default_value = "-")]
        out: PathBuf,
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Monte Carlo robust-matchability probe on the absorber quarter `G[X', Y']`.
    Probe {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Removed subgraphs have max degree at most `rho * d`.
        #[arg(long, default_value_t = 0.1)]
        rho: f64,
        /// Demands are near `alpha' * d` with `alpha' <= alpha`.
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0 / 30.0)]
        gamma: f64,
        /// Goodness multiplier for the bisections that produce the quarter
        /// (default: threshold `ceil(d / 5)`).
        #[arg(long)]
        goodness: Option<f64>,
    },
    /// Decompose a grid of generated graphs and write one CSV row per cell.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Edge-list input (`-` for stdin).
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON object overriding pipeline parameters, with the same keys as the parameter struct.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "-")]
    out: PathBuf,
    /// Leave the timestamp out so that identical runs give identical bytes.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BenchKind {
    Complete,
    RandomRegular,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "random-regular")]
    kind: BenchKind,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Degrees (ignored for complete graphs).
    #[arg(long, value_delimiter = ',', default_value = "32")]
    d: Vec<usize>,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Unverified(String),
    Stage(PipelineError),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Unverified(_) => EXIT_UNVERIFIED,
            CliError::Stage(_) => EXIT_STAGE,
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        if e.stage == "verify" {
            CliError::Unverified(e.to_string())
        } else {
            CliError::Stage(e)
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Standard streams of one invocation.
pub struct Io<'a> {
    pub stdin: &'a mut dyn Read,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { io.stderr } else { io.stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match dispatch(cli.command, io) {
        Ok(code) => code,
        Err(e) => {
            let _ = match &e {
                CliError::Stage(p) => writeln!(io.stderr, "error: stage {} failed: {p}", p.stage),
                CliError::Usage(m) => writeln!(io.stderr, "error: {m}"),
                CliError::Unverified(m) => writeln!(io.stderr, "verification failed: {m}"),
            };
            e.code()
        }
    }
}

fn dispatch(command: Command, io: &mut Io<'_>) -> CliResult<i32> {
    match command {
        Command::Generate { spec, seed, out } => {
            let mut spec: GeneratorSpec = spec.parse().map_err(usage)?;
            if let (GeneratorSpec::RandomRegular { seed: s, .. }, Some(seed)) = (&mut spec, seed) {
                *s = seed;
            }
            let g = spec.generate().map_err(usage)?;
            write_output(&out, write_edge_list(&g).as_bytes(), io)?;
            let _ = writeln!(io.stderr, "generated {spec}");
            Ok(EXIT_OK)
        }
        Command::Certify { input, budget, out } => {
            let g = read_graph(&input, io)?;
            let cert = spectral::certify(&g, budget).map_err(usage)?;
            write_json(&out, &cert, true, io)?;
            Ok(EXIT_OK)
        }
        Command::Decompose { run, trace } => {
            let g = read_graph(&run.input, io)?;
            let params = resolve_params(run.mode, run.seed, run.config.as_deref(), io)?;
            let dec = decompose(&g, &params)?;
            let mut json = dec.to_json();
            json.timestamp = timestamp(run.no_timestamp);
            write_json(&run.out, &json, false, io)?;
            if let Some(path) = trace {
                write_json(&path, &dec.trace, true, io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Factorize { run } => {
            let g = read_graph(&run.input, io)?;
            let params = resolve_params(run.mode, run.seed, run.config.as_deref(), io)?;
            let (matchings, dec) = one_factorization(&g, &params)?;
            let verified = is_one_factorization(&g, &matchings);
            let json = MatchingsJson {
                n: g.n(),
                d: dec.d,
                mode: params.mode,
                seed: params.seed,
                count: matchings.len(),
                matchings: matchings.iter().map(|m| m.iter().map(|&(u, v)| [u, v]).collect()).collect(),
                verified,
                timestamp: timestamp(run.no_timestamp),
            };
            write_json(&run.out, &json, false, io)?;
            if verified {
                Ok(EXIT_OK)
            } else {
                Err(CliError::Unverified("matchings do not partition the edge set".into()))
            }
        }
        Command::Verify {
            graph,
            dec,
            out,
            no_timestamp,
        } => {
            let g = read_graph(&graph, io)?;
            let text = read_input(&dec, io)?;
            let json: DecompositionJson = serde_json::from_str(&text)
                .map_err(|e| CliError::Unverified(format!("{}: not a decomposition file: {e}", dec.display())))?;
            let report = verify(&g, &json.to_decomposition());
            let green = report.all_green();
            let out_json = VerifyJson {
                verified: green,
                report,
                timestamp: timestamp(no_timestamp),
            };
            write_json(&out, &out_json, true, io)?;
            if green {
                Ok(EXIT_OK)
            } else {
                Err(CliError::Unverified(out_json.report.problems.join("; ")))
            }
        }
        Command::Probe {
            run,
            trials,
            rho,
            alpha,
            gamma,
            goodness,
        } => {
            let g = read_graph(&run.input, io)?;
            let d = g.regular_degree().ok_or_else(|| usage("probe needs a regular graph"))?;
            let mut params = resolve_params(run.mode, run.seed, run.config.as_deref(), io)?;
            params.tolerances.goodness = goodness.unwrap_or_else(|| PipelineParams::exact_goodness(d));
            let quarter = absorber_quarter(&g, &params)?;
            let probe = ProbeParams {
                d: d as f64,
                rho,
                alpha,
                gamma,
                trials,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(1);
            let report = probe_robust_matchability(&quarter, &probe, &mut rng)
                .map_err(|e| CliError::Stage(stage_error("probe", e)))?;
            let vs = quarter.bipartition.vertices();
            let min_degree = quarter.graph.min_degree_on(&vs);
            let ok = report.successes == report.trials;
            let json = ProbeJson {
                n: g.n(),
                d,
                seed: params.seed,
                quarter: QuarterJson {
                    sides: [quarter.left().len(), quarter.right().len()],
                    edges: quarter.graph.edge_count(),
                    min_degree,
                    max_degree: quarter.graph.max_degree(),
                    min_degree_at_least_d_over_5: min_degree as f64 >= d as f64 / 5.0,
                },
                params: probe,
                report,
                timestamp: timestamp(run.no_timestamp),
            };
            write_json(&run.out, &json, true, io)?;
            if ok {
                Ok(EXIT_OK)
            } else {
                Err(CliError::Unverified(format!(
                    "{} of {} probe trials found no factor",
                    json.report.trials - json.report.successes,
                    json.report.trials
                )))
            }
        }
        Command::Bench(args) => bench(args, io),
    }
}

fn stage_error(stage: &'static str, e: crate::factor::FactorError) -> PipelineError {
    PipelineError {
        stage,
        iteration: None,
        source: e.into(),
    }
}

#[derive(Serialize)]
struct MatchingsJson {
    n: usize,
    d: usize,
    mode: Mode,
    seed: u64,
    count: usize,
    matchings: Vec<Vec<[usize; 2]>>,
    verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<String>,
}

#[derive(Serialize)]
struct VerifyJson {
    verified: bool,
    report: crate::pipeline::VerificationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<String>,
}

#[derive(Serialize)]
struct QuarterJson {
    sides: [usize; 2],
    edges: usize,
    min_degree: usize,
    max_degree: usize,
    min_degree_at_least_d_over_5: bool,
}

#[derive(Serialize)]
struct ProbeJson {
    n: usize,
    d: usize,
    seed: u64,
    quarter: QuarterJson,
    params: ProbeParams,
    report: ProbeReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<String>,
}

#[derive(Serialize)]
struct BenchRow {
    n: usize,
    d: usize,
    mode: Mode,
    parts: usize,
    bound: f64,
    resamples: u64,
    wall_ms: u128,
    verified: bool,
}

/// A finished row plus the error text of a failed cell, if any.
type BenchCell = (BenchRow, Option<String>);

fn bench(args: BenchArgs, io: &mut Io<'_>) -> CliResult<i32> {
    let base = resolve_params(args.mode, args.seed, args.config.as_deref(), io)?;
    let mut cells = Vec::new();
    for &n in &args.n {
        match args.kind {
            BenchKind::Complete => cells.push((n, n.saturating_sub(1))),
            BenchKind::RandomRegular => cells.extend(args.d.iter().map(|&d| (n, d))),
        }
    }
    let threads = args
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()))
        .clamp(1, cells.len().max(1));
    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Option<BenchCell>>> = Mutex::new((0..cells.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(n, d)) = cells.get(i) else { break };
                let cell = bench_cell(args.kind, n, d, i, &base);
                rows.lock().expect("bench worker panicked")[i] = Some(cell);
            });
        }
    });
    let mut csv = csv::Writer::from_writer(Vec::new());
    for (row, note) in rows.into_inner().expect("bench worker panicked").into_iter().flatten() {
        if let Some(note) = note {
            let _ = writeln!(io.stderr, "n={} d={}: {note}", row.n, row.d);
        }
        csv.serialize(row).map_err(usage)?;
    }
    let bytes = csv.into_inner().map_err(usage)?;
    write_output(&args.out, &bytes, io)?;
    Ok(EXIT_OK)
}

/// Seed of grid cell `index`: the first word of stream `index` of the base seed.
fn cell_seed(base: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(index as u64);
    rng.next_u64()
}

fn bench_cell(kind: BenchKind, n: usize, d: usize, index: usize, base: &PipelineParams) -> BenchCell {
    let seed = cell_seed(base.seed, index);
    let params = PipelineParams { seed, ..*base };
    let mut row = BenchRow {
        n,
        d,
        mode: params.mode,
        parts: 0,
        bound: crate::pipeline::part_bound(d),
        resamples: 0,
        wall_ms: 0,
        verified: false,
    };
    let spec = match kind {
        BenchKind::Complete => GeneratorSpec::Complete { n },
        BenchKind::RandomRegular => GeneratorSpec::RandomRegular { n, d, seed },
    };
    let g = match spec.generate() {
        Ok(g) => g,
        Err(e) => return (row, Some(e.to_string())),
    };
    let start = Instant::now();
    let result = decompose(&g, &params);
    row.wall_ms = start.elapsed().as_millis();
    match result {
        Ok(dec) => {
            row.parts = dec.decomposition.pieces.len();
            row.resamples = dec.trace.resamples;
            row.verified = dec.report.all_green();
            (row, None)
        }
        Err(e) => (row, Some(e.to_string())),
    }
}

/// Defaults for the chosen mode, then `--config`, then `--mode` and `--seed`.
fn resolve_params(mode: Option<Mode>, seed: Option<u64>, config: Option<&Path>, io: &mut Io<'_>) -> CliResult<PipelineParams> {
    let overlay = match config {
        Some(path) => {
            let text = read_input(path, io)?;
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => Value::Object(Default::default()),
    };
    let mut params = PipelineParams::from_overrides(mode, &overlay).map_err(|e| usage(format!("config: {e}")))?;
    if let Some(s) = seed {
        params.seed = s;
    }
    Ok(params)
}

fn timestamp(suppress: bool) -> Option<String> {
    (!suppress).then(|| humantime::format_rfc3339_seconds(SystemTime::now()).to_string())
}

/// Checks that `matchings` are `d` perfect matchings partitioning `E(g)`.
fn is_one_factorization(g: &Graph, matchings: &[Vec<Edge>]) -> bool {
    let Some(d) = g.regular_degree() else { return false };
    if matchings.len() != d {
        return false;
    }
    let mut seen = std::collections::HashSet::new();
    for m in matchings {
        let mut covered = vec![false; g.n()];
        for &(u, v) in m {
            if !g.has_edge(u, v) || !seen.insert(crate::graph::edge(u, v)) || covered[u] || covered[v] {
                return false;
            }
            covered[u] = true;
            covered[v] = true;
        }
        if covered.iter().any(|c| !c) {
            return false;
        }
    }
    seen.len() == g.edge_count()
}

fn is_stdio(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn read_input(path: &Path, io: &mut Io<'_>) -> CliResult<String> {
    if is_stdio(path) {
        let mut s = String::new();
        io.stdin.read_to_string(&mut s).map_err(|e| usage(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
    }
}

fn read_graph(path: &Path, io: &mut Io<'_>) -> CliResult<Graph> {
    let text = read_input(path, io)?;
    parse_edge_list(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, bytes: &[u8], io: &mut Io<'_>) -> CliResult<()> {
    if is_stdio(path) {
        io.stdout.write_all(bytes).map_err(|e| usage(format!("stdout: {e}")))
    } else {
        fs::write(path, bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T, pretty: bool, io: &mut Io<'_>) -> CliResult<()> {
    let mut text = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .map_err(usage)?;
    text.push('\n');
    write_output(path, text.as_bytes(), io)
}
