//! Subcommands. Exit codes: 0 ok, 1 verification failure, 2 input error.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use roommates_core::{
    blocking_edges, brute_force_max_stable, solve_max_gamma, solve_max_pri, solve_max_srti, solve_pop_crit,
    solve_pop_maxw, BlockingMode, HalfMatching, Instance, Rational, RawInstance, Scalar, SolveError, VertexId,
};
use thiserror::Error;

use crate::format::{instance_digest, parse_instance, parse_rational, serialize_instance, ParseError};
use crate::generate::{apply_gamma_preset, generate_random, GammaPreset, GenError, GenParams, Probability};
use crate::result::{
    matching_map, parse_values, stats, vertex_set, verify_values, Params, ResultError, ResultFile, ScopeArg,
    Solver,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Result(#[from] ResultError),
    #[error("{0}")]
    Input(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => EXIT_VERIFY,
            _ => EXIT_INPUT,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "roommates", version, about = "Stable and popular half-matchings for roommates markets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weakly stable half-matching within 3/2 of the largest (ties allowed).
    SolveMaxSrti(SolveArgs),
    /// Gamma-stable half-matching within 3/2 of the largest.
    SolveGamma {
        #[command(flatten)]
        common: SolveArgs,
        /// Replace the file's thresholds by a preset drawn with --seed.
        #[arg(long)]
        gamma_preset: Option<GammaPreset>,
    },
    /// Largest popular half-matching of a strict instance.
    SolveMaxPri(SolveArgs),
    /// Popular half-matching among those saturating a critical set.
    SolvePopCrit {
        #[command(flatten)]
        common: SolveArgs,
        /// Comma-separated critical vertices; defaults to the file's `critical` line.
        #[arg(long)]
        critical: Option<String>,
    },
    /// Popular half-matching among maximum-weight ones.
    SolvePopMaxw {
        #[command(flatten)]
        common: SolveArgs,
        /// File of `<edge> <p/q>` lines overriding edge weights.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Re-check a result file against its instance.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        result: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Solve seeded random instances and compare with the brute-force optimum.
    Bench(BenchArgs),
    /// Write a seeded random instance.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest edge count for which popularity is checked by enumeration.
    #[arg(long, default_value_t = 8)]
    pub oracle_bound: usize,
    #[arg(long, value_enum, default_value_t = ScopeFlag::Half)]
    pub scope: ScopeFlag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScopeFlag {
    Half,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BenchSolver {
    Srti,
    Gamma,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Number of seeds, starting at --seed.
    #[arg(long, default_value_t = 100)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Generated instances are capped at this many edges.
    #[arg(long, default_value_t = 8)]
    pub oracle_bound: usize,
    #[arg(long, value_enum, default_value_t = BenchSolver::Srti)]
    pub solver: BenchSolver,
    #[arg(long, default_value = "1/2")]
    pub density: Probability,
    #[arg(long, default_value = "1/4")]
    pub parallel_prob: Probability,
    #[arg(long, default_value = "1/4")]
    pub tie_prob: Probability,
    /// Preset for --solver gamma.
    #[arg(long, default_value = "generic")]
    pub gamma_preset: GammaPreset,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "1/2")]
    pub density: Probability,
    #[arg(long, default_value = "0")]
    pub parallel_prob: Probability,
    #[arg(long, default_value = "0")]
    pub tie_prob: Probability,
    /// Integer weight range `lo:hi`.
    #[arg(long, value_parser = parse_range)]
    pub weights: Option<(i64, i64)>,
    #[arg(long, default_value = "none")]
    pub gamma_preset: GammaPreset,
    #[arg(long)]
    pub max_edges: Option<usize>,
    #[arg(long)]
    pub bipartite: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
    let lo = lo.trim().parse().map_err(|_| format!("bad bound `{lo}`"))?;
    let hi = hi.trim().parse().map_err(|_| format!("bad bound `{hi}`"))?;
    Ok((lo, hi))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), message: e.to_string() })
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Io { path: path.to_path_buf(), message: e.to_string() })
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    parse_instance(&read(path)?).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })
}

/// `<edge> <p/q>` lines, `#` comments.
pub fn parse_weights(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let tokens: Vec<&str> = line.split('#').next().unwrap_or("").split_whitespace().collect();
        match tokens.as_slice() {
            [] => {}
            [edge, w] => {
                let w = parse_rational(w).ok_or_else(|| format!("line {}: malformed rational `{w}`", i + 1))?;
                if out.insert(edge.to_string(), w.to_string()).is_some() {
                    return Err(format!("line {}: duplicate weight for `{edge}`", i + 1));
                }
            }
            _ => return Err(format!("line {}: expected `<edge> <p/q>`", i + 1)),
        }
    }
    Ok(out)
}

/// File instance with the result's parameters applied.
fn effective_instance(inst: &Instance, params: &Params, seed: u64) -> Result<Instance, CliError> {
    let mut inst = inst.clone();
    if let Some(weights) = &params.weights {
        let mut raw: RawInstance<Rational> = inst.to_raw();
        raw.weights.clear();
        for (edge, w) in weights {
            if inst.edge_id(edge).is_none() {
                return Err(CliError::Input(format!("weights name unknown edge `{edge}`")));
            }
            let w = parse_rational(w).ok_or_else(|| CliError::Input(format!("malformed weight `{w}`")))?;
            raw = raw.weight(edge, w);
        }
        inst = raw.validate().map_err(|e| CliError::Input(e.to_string()))?;
    }
    if let Some(preset) = &params.gamma_preset {
        let preset: GammaPreset = preset.parse()?;
        inst = apply_gamma_preset(&inst, preset, &mut ChaCha8Rng::seed_from_u64(seed))?;
    }
    Ok(inst)
}

fn critical_set(inst: &Instance, params: &Params) -> Result<Option<BTreeSet<VertexId>>, CliError> {
    match &params.critical {
        Some(names) => Ok(Some(vertex_set(inst, names)?)),
        None => Ok(None),
    }
}

fn solve(
    inst: &Instance,
    solver: Solver,
    critical: Option<&BTreeSet<VertexId>>,
) -> Result<HalfMatching<Rational>, SolveError> {
    match solver {
        Solver::MaxSrti => solve_max_srti(inst),
        Solver::Gamma => solve_max_gamma(inst),
        Solver::MaxPri => solve_max_pri(inst),
        Solver::PopCrit => solve_pop_crit(inst, critical.expect("pop-crit always has a set")),
        Solver::PopMaxw => solve_pop_maxw(inst),
    }
}

fn solve_error(e: SolveError) -> CliError {
    match e {
        SolveError::Internal(msg) => CliError::Verification(msg),
        other => CliError::Input(other.to_string()),
    }
}

struct SolveRequest {
    solver: Solver,
    gamma_preset: Option<GammaPreset>,
    critical: Option<String>,
    weights: Option<PathBuf>,
}

fn run_solve(args: &SolveArgs, req: SolveRequest) -> Result<i32, CliError> {
    let file_inst = load_instance(&args.input)?;
    let critical = match (req.solver, req.critical) {
        (Solver::PopCrit, Some(list)) => {
            Some(list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect())
        }
        (Solver::PopCrit, None) => Some(
            file_inst
                .critical()
                .map(|c| c.iter().map(|v| file_inst.vertex_name(*v).to_string()).collect())
                .unwrap_or_default(),
        ),
        _ => None,
    };
    let weights = match &req.weights {
        Some(path) => Some(parse_weights(&read(path)?).map_err(|m| CliError::Input(format!("{}: {m}", path.display())))?),
        None => None,
    };
    let params = Params {
        oracle_bound: args.oracle_bound,
        scope: match args.scope {
            ScopeFlag::Half => ScopeArg::Half,
            ScopeFlag::Sampled => ScopeArg::Sampled,
        },
        gamma_preset: req.gamma_preset.map(|p| p.to_string()),
        critical,
        weights,
    };
    let seed = args.seed.unwrap_or(0);
    let inst = effective_instance(&file_inst, &params, seed)?;
    let crit = critical_set(&inst, &params)?;
    let m = solve(&inst, req.solver, crit.as_ref()).map_err(solve_error)?;
    let values = m.as_fractional().values().to_vec();
    let verification = verify_values(&inst, req.solver, values.clone(), &params, crit.as_ref(), seed);
    let ok = verification.ok;
    let result = ResultFile {
        solver: req.solver,
        instance: instance_digest(&file_inst),
        seed: args.seed,
        params,
        matching: matching_map(&inst, m.as_fractional()),
        stats: stats(&inst, &values),
        verification,
    };
    emit(args.output.as_deref(), &result.to_json())?;
    if !ok {
        eprintln!("self-verification failed");
        return Ok(EXIT_VERIFY);
    }
    Ok(EXIT_OK)
}

fn run_verify(input: &Path, result_path: &Path, output: Option<&Path>) -> Result<i32, CliError> {
    let file_inst = load_instance(input)?;
    let result = ResultFile::from_json(&read(result_path)?)?;
    let mut problems = Vec::new();
    let digest = instance_digest(&file_inst);
    if digest != result.instance {
        problems.push(format!("instance digest {digest} differs from the recorded {}", result.instance));
    }
    let seed = result.seed.unwrap_or(0);
    let inst = effective_instance(&file_inst, &result.params, seed)?;
    let crit = critical_set(&inst, &result.params)?;
    let values = parse_values(&inst, &result.matching)?;
    let fresh_stats = stats(&inst, &values);
    let verification = verify_values(&inst, result.solver, values, &result.params, crit.as_ref(), seed);
    if !verification.ok {
        problems.push("the matching fails its checks".to_string());
    }
    if verification != result.verification {
        problems.push("recorded verification summary differs from the recomputed one".to_string());
    }
    if fresh_stats != result.stats {
        problems.push("recorded stats differ from the recomputed ones".to_string());
    }
    let report = ResultFile { stats: fresh_stats, verification, ..result };
    emit(output, &report.to_json())?;
    for p in &problems {
        eprintln!("{p}");
    }
    Ok(if problems.is_empty() { EXIT_OK } else { EXIT_VERIFY })
}

/// One bench row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub seed: u64,
    pub edges: usize,
    pub size: Rational,
    pub optimum: Rational,
    /// `optimum / size`, or `None` when the output is empty but the optimum is not.
    pub ratio: Option<Rational>,
    pub stable: bool,
}

pub fn bench_rows(args: &BenchArgs) -> Result<Vec<BenchRow>, CliError> {
    let gen = GenParams {
        density: args.density,
        parallel_prob: args.parallel_prob,
        tie_prob: args.tie_prob,
        gamma: if args.solver == BenchSolver::Gamma { args.gamma_preset } else { GammaPreset::None },
        max_edges: Some(args.oracle_bound),
        ..GenParams::new(args.n)
    };
    if args.solver == BenchSolver::Gamma && args.gamma_preset == GammaPreset::None {
        return Err(CliError::Input("--solver gamma needs a gamma preset".into()));
    }
    let mode = match args.solver {
        BenchSolver::Srti => BlockingMode::Weak,
        BenchSolver::Gamma => BlockingMode::Gamma,
    };
    let seeds: Vec<u64> = (args.seed..args.seed + args.seeds).collect();
    let mut rows = seeds
        .par_iter()
        .map(|&seed| -> Result<BenchRow, CliError> {
            let inst = generate_random(seed, &gen)?;
            let m = match args.solver {
                BenchSolver::Srti => solve_max_srti(&inst),
                BenchSolver::Gamma => solve_max_gamma(&inst),
            }
            .map_err(solve_error)?;
            let stable = blocking_edges(&inst, m.as_fractional(), mode).map_err(|e| CliError::Input(e.to_string()))?.is_empty();
            let (optimum, _) = brute_force_max_stable(&inst, mode, args.oracle_bound)
                .map_err(|e| CliError::Input(e.to_string()))?;
            let size = m.size();
            let ratio = if size == Rational::from_int(0) {
                (optimum == Rational::from_int(0)).then(|| Rational::from_int(1))
            } else {
                Some(optimum.clone() / size.clone())
            };
            Ok(BenchRow { seed, edges: inst.num_edges(), size, optimum, ratio, stable })
        })
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by_key(|r| r.seed);
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["seed", "edges", "size", "optimum", "ratio"]).expect("in-memory write");
    for r in rows {
        let ratio = r.ratio.as_ref().map_or("inf".to_string(), |x| x.to_string());
        w.write_record([r.seed.to_string(), r.edges.to_string(), r.size.to_string(), r.optimum.to_string(), ratio])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

fn run_bench(args: &BenchArgs) -> Result<i32, CliError> {
    let rows = bench_rows(args)?;
    emit(args.output.as_deref(), &bench_csv(&rows))?;
    let limit = Rational::from_ratio(3, 2);
    let bad: Vec<&BenchRow> =
        rows.iter().filter(|r| !r.stable || r.ratio.as_ref().is_none_or(|x| *x > limit)).collect();
    let max = rows.iter().filter_map(|r| r.ratio.clone()).max();
    if let Some(max) = max {
        eprintln!("max ratio {max} over {} seeds", rows.len());
    }
    for r in &bad {
        eprintln!("seed {}: stable={} ratio={:?}", r.seed, r.stable, r.ratio.as_ref().map(|x| x.to_string()));
    }
    Ok(if bad.is_empty() { EXIT_OK } else { EXIT_VERIFY })
}

fn run_generate(args: &GenerateArgs) -> Result<i32, CliError> {
    let params = GenParams {
        n: args.n,
        density: args.density,
        parallel_prob: args.parallel_prob,
        tie_prob: args.tie_prob,
        weights: args.weights,
        gamma: args.gamma_preset,
        max_edges: args.max_edges,
        bipartite: args.bipartite,
    };
    let inst = generate_random(args.seed, &params)?;
    emit(args.output.as_deref(), &serialize_instance(&inst))?;
    Ok(EXIT_OK)
}

/// Runs one parsed command line and returns its exit code.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    let plain = |solver| SolveRequest { solver, gamma_preset: None, critical: None, weights: None };
    match cli.command {
        Command::SolveMaxSrti(args) => run_solve(&args, plain(Solver::MaxSrti)),
        Command::SolveGamma { common, gamma_preset } => {
            let preset = gamma_preset.filter(|p| *p != GammaPreset::None);
            run_solve(&common, SolveRequest { gamma_preset: preset, ..plain(Solver::Gamma) })
        }
        Command::SolveMaxPri(args) => run_solve(&args, plain(Solver::MaxPri)),
        Command::SolvePopCrit { common, critical } => {
            run_solve(&common, SolveRequest { critical, ..plain(Solver::PopCrit) })
        }
        Command::SolvePopMaxw { common, weights } => run_solve(&common, SolveRequest { weights, ..plain(Solver::PopMaxw) }),
        Command::Verify { input, result, output } => run_verify(&input, &result, output.as_deref()),
        Command::Bench(args) => run_bench(&args),
        Command::Generate(args) => run_generate(&args),
    }
}

/// Parses `args` (program name first) and runs them, reporting errors on
/// stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
