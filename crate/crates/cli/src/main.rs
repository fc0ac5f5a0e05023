//! `elcdec`: build codes, optimize parity-check matrices, explore ELC orbits
//! and run decoder simulations.
//!
//! Exit codes: 0 success, 1 output failure, 2 usage error, 3 invalid input
//! data, 4 budget or cap exceeded.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use elcdec::codes::{eqr_code, qr_code, reduce_weight, resolve_code, to_alist, CodeSpec};
use elcdec::sim::{self, SimConfig, Simulator};
use elcdec::tanner::{labeled_orbit_size, s_orbit, OrbitCount};
use elcdec::{DecoderKind, TannerGraph};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (git ", env!("ELCDEC_GIT_HASH"), ")");

#[derive(Parser, Debug)]
#[command(name = "elcdec", version = VERSION, about = "Iterative decoding on multiple Tanner graphs")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct or inspect codes.
    #[command(subcommand)]
    Codes(CodesCommand),
    /// Reduce the weight and 4-cycle count of a parity-check matrix.
    Optimize(OptimizeArgs),
    /// Enumerate the ELC orbit of a code.
    Orbit(OrbitArgs),
    /// Run a frame error rate simulation.
    Simulate(SimulateArgs),
    /// Run an ELC decoder once per number of ELC operations per step.
    Sweep(SweepArgs),
}

#[derive(Subcommand, Debug)]
enum CodesCommand {
    /// Build a quadratic residue code and write its parity-check matrix.
    Build {
        /// Prime length of the cyclic code.
        #[arg(long)]
        qr: u64,
        /// Append an overall parity bit.
        #[arg(long)]
        extend: bool,
        /// alist output path.
        #[arg(long)]
        out: PathBuf,
        /// Also export `{name, n, k, d, H}` as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print parameters of a code.
    Info {
        /// alist path or `qr:<p>` / `eqr:<p>`.
        code: String,
        /// Compute the minimum distance by exhaustive enumeration.
        #[arg(long)]
        distance: bool,
    },
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[arg(long = "in")]
    input: String,
    /// Restrict the search to standard-form matrices (ELC moves).
    #[arg(long)]
    ip: bool,
    /// Candidate moves to evaluate.
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Reduced alist output; the report goes to `<out>.report.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct OrbitArgs {
    #[arg(long = "in")]
    input: String,
    /// Count vertex-labeled graphs instead of structures.
    #[arg(long)]
    labeled: bool,
    #[arg(long, default_value_t = 100_000)]
    cap: usize,
    /// Report path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DecoderArg {
    Spa,
    SpaPd,
    SpaElc,
    SpaElcUndamped,
}

impl From<DecoderArg> for DecoderKind {
    fn from(d: DecoderArg) -> Self {
        match d {
            DecoderArg::Spa => DecoderKind::Spa,
            DecoderArg::SpaPd => DecoderKind::SpaPd,
            DecoderArg::SpaElc => DecoderKind::SpaElc,
            DecoderArg::SpaElcUndamped => DecoderKind::SpaElcUndamped,
        }
    }
}

/// Simulation settings; flags override the JSON config.
#[derive(Args, Debug, Clone)]
struct SimArgs {
    /// JSON simulation config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `qr:<p>`, `eqr:<p>` or an alist path.
    #[arg(long)]
    code: Option<String>,
    #[arg(long, value_enum)]
    decoder: Option<DecoderArg>,
    /// Eb/N0 points in dB, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    ebn0: Option<Vec<f64>>,
    #[arg(long)]
    i1: Option<usize>,
    #[arg(long)]
    i2: Option<usize>,
    #[arg(long)]
    i3: Option<usize>,
    #[arg(long)]
    alpha0: Option<f64>,
    /// ELC operations per inner step.
    #[arg(long)]
    p: Option<usize>,
    /// Iteration limit T.
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    min_errors: Option<u64>,
    #[arg(long)]
    max_frames: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// `psl2:<p>` or a generator JSON file.
    #[arg(long)]
    automorphisms: Option<String>,
    /// Keep iterating after the hard decision becomes a codeword.
    #[arg(long)]
    no_syndrome_stop: bool,
    /// Output directory (results go to stdout if omitted).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Values of p, comma separated.
    #[arg(long = "p-values", value_delimiter = ',', required = true)]
    p_values: Vec<usize>,
}

/// Failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<elcdec::Error>() {
        return match e {
            elcdec::Error::Overflow(_) | elcdec::Error::TooLarge(_) => 4,
            _ => 3,
        };
    }
    if err.downcast_ref::<serde_json::Error>().is_some() {
        return 3;
    }
    1
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure {
            code: exit_code(&error),
            error,
        }
    }
}

fn input_error(e: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 3,
        error: e.into(),
    }
}

/// Writes `contents` to `path` through a temporary file in the same directory.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

#[derive(Serialize)]
struct CodeInfo {
    name: String,
    n: usize,
    k: usize,
    weight: usize,
    four_cycles: usize,
    standard_form: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
}

fn code_info(code: &CodeSpec) -> CodeInfo {
    CodeInfo {
        name: code.name.clone(),
        n: code.n,
        k: code.k,
        weight: code.h.weight(),
        four_cycles: code.h.four_cycles(),
        standard_form: code.h.detect_standard_form().is_some(),
        d: code.d,
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

#[derive(Serialize)]
struct Resolved<'a, T: Serialize> {
    command: &'a str,
    version: &'a str,
    config: T,
}

fn resolved<T: Serialize>(command: &'static str, config: T) -> Resolved<'static, T> {
    Resolved {
        command,
        version: VERSION,
        config,
    }
}

fn codes(cmd: CodesCommand) -> Result<(), Failure> {
    match cmd {
        CodesCommand::Build {
            qr,
            extend,
            out,
            json,
        } => {
            let code = if extend { eqr_code(qr) } else { qr_code(qr) }.map_err(input_error)?;
            write_atomic(&out, to_alist(&code.h).as_bytes())?;
            if let Some(j) = json {
                write_json(&j, &code.to_json())?;
            }
            #[derive(Serialize)]
            struct BuildConfig<'a> {
                qr: u64,
                extend: bool,
                out: &'a Path,
            }
            write_json(
                &with_suffix(&out, ".config.json"),
                &resolved("codes build", BuildConfig { qr, extend, out: &out }),
            )?;
            print_json(&code_info(&code))?;
        }
        CodesCommand::Info { code, distance } => {
            let mut spec = resolve_code(&code).map_err(input_error)?;
            if distance {
                spec.verify_distance().map_err(anyhow::Error::from)?;
            }
            print_json(&code_info(&spec))?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct OptimizeConfig<'a> {
    input: &'a str,
    ip: bool,
    budget: u64,
    seed: u64,
    out: &'a Path,
}

fn optimize(args: OptimizeArgs) -> Result<(), Failure> {
    let code = resolve_code(&args.input).map_err(input_error)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let (reduced, report) =
        reduce_weight(&code, args.ip, args.budget, &mut rng).map_err(input_error)?;
    write_atomic(&args.out, to_alist(&reduced.h).as_bytes())?;
    #[derive(Serialize)]
    struct Report<'a, C: Serialize> {
        #[serde(flatten)]
        resolved: Resolved<'a, C>,
        report: &'a elcdec::ReductionReport,
    }
    let cfg = OptimizeConfig {
        input: &args.input,
        ip: args.ip,
        budget: args.budget,
        seed: args.seed,
        out: &args.out,
    };
    let out = Report {
        resolved: resolved("optimize", cfg),
        report: &report,
    };
    write_json(&with_suffix(&args.out, ".report.json"), &out)?;
    print_json(&report)?;
    Ok(())
}

#[derive(Serialize)]
struct OrbitConfig<'a> {
    input: &'a str,
    labeled: bool,
    cap: usize,
}

#[derive(Serialize)]
struct LabeledReport {
    labeled_orbit_size: usize,
    overflowed: bool,
}

fn orbit(args: OrbitArgs) -> Result<bool, Failure> {
    let code = resolve_code(&args.input).map_err(input_error)?;
    let tg = TannerGraph::from_matrix(&code.h).map_err(input_error)?;
    let (body, overflowed) = if args.labeled {
        let (size, overflowed) = match labeled_orbit_size(&tg, args.cap).map_err(input_error)? {
            OrbitCount::Exact(n) => (n, false),
            OrbitCount::Overflow(n) => (n, true),
        };
        let r = LabeledReport {
            labeled_orbit_size: size,
            overflowed,
        };
        (serde_json::to_string_pretty(&r).map_err(anyhow::Error::from)?, overflowed)
    } else {
        let orbit = s_orbit(&tg, args.cap).map_err(input_error)?;
        (
            serde_json::to_string_pretty(&orbit.report()).map_err(anyhow::Error::from)?,
            orbit.overflowed,
        )
    };
    let cfg = OrbitConfig {
        input: &args.input,
        labeled: args.labeled,
        cap: args.cap,
    };
    match &args.out {
        Some(path) => {
            write_atomic(path, format!("{body}\n").as_bytes())?;
            write_json(&with_suffix(path, ".config.json"), &resolved("orbit", cfg))?;
        }
        None => {
            println!("{body}");
            eprintln!("{}", serde_json::to_string(&resolved("orbit", cfg)).map_err(anyhow::Error::from)?);
        }
    }
    if overflowed {
        eprintln!("orbit exceeds cap {}; partial result written", args.cap);
    }
    Ok(overflowed)
}

/// Merges the JSON config (if any) with flag overrides.
fn sim_config(args: &SimArgs) -> Result<SimConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(input_error)?;
            serde_json::from_str::<SimConfig>(&text)
                .with_context(|| format!("parsing {}", path.display()))
                .map_err(input_error)?
        }
        None => {
            let (Some(code), Some(decoder)) = (&args.code, args.decoder) else {
                return Err(Failure {
                    code: 2,
                    error: anyhow::anyhow!("either --config or both --code and --decoder are required"),
                });
            };
            SimConfig::new(code.clone(), decoder.into())
        }
    };
    if let Some(c) = &args.code {
        cfg.code = c.clone();
    }
    if let Some(d) = args.decoder {
        cfg.decoder = d.into();
    }
    if let Some(e) = &args.ebn0 {
        cfg.ebn0_db = e.clone();
    }
    let p = &mut cfg.params;
    p.i1 = args.i1.unwrap_or(p.i1);
    p.i2 = args.i2.unwrap_or(p.i2);
    p.i3 = args.i3.unwrap_or(p.i3);
    p.alpha0 = args.alpha0.unwrap_or(p.alpha0);
    p.p = args.p.unwrap_or(p.p);
    if args.no_syndrome_stop {
        p.syndrome_stop = false;
    }
    if args.iterations.is_some() {
        cfg.iterations = args.iterations;
    }
    cfg.min_frame_errors = args.min_errors.unwrap_or(cfg.min_frame_errors);
    cfg.max_frames = args.max_frames.unwrap_or(cfg.max_frames);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    if args.automorphisms.is_some() {
        cfg.automorphisms = args.automorphisms.clone();
    }
    cfg.validate().map_err(input_error)?;
    Ok(cfg)
}

fn emit_results(
    out_dir: Option<&Path>,
    cfg: &SimConfig,
    command: &'static str,
    csv: &str,
    json: &str,
    extra: &[(&str, String)],
) -> Result<()> {
    match out_dir {
        Some(dir) => {
            write_json(&dir.join("config.json"), cfg)?;
            write_json(&dir.join("run.json"), &resolved(command, cfg))?;
            write_atomic(&dir.join("results.csv"), csv.as_bytes())?;
            write_atomic(&dir.join("results.json"), json.as_bytes())?;
            for (name, body) in extra {
                write_atomic(&dir.join(name), body.as_bytes())?;
            }
        }
        None => {
            print!("{csv}");
            eprintln!("{}", serde_json::to_string(&resolved(command, cfg))?);
        }
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let cfg = sim_config(&args.sim)?;
    let simulator = Simulator::new(cfg.clone()).map_err(input_error)?;
    let mut points = Vec::new();
    for &e in &cfg.ebn0_db {
        let pt = simulator.run_point(e);
        eprintln!(
            "{} dB: {} frames, {} errors, FER {:.3e}, {:.1} messages{} ({:.1?})",
            pt.ebn0_db,
            pt.frames,
            pt.frame_errors,
            pt.fer,
            pt.avg_spa_messages,
            if pt.budget_exceeded { ", frame limit reached" } else { "" },
            pt.wallclock
        );
        points.push(pt);
    }
    let rows = simulator.rows(&points);
    let (fer, msgs) = sim::to_gnuplot(&points);
    emit_results(
        args.sim.out_dir.as_deref(),
        &cfg,
        "simulate",
        &sim::to_csv(&rows),
        &sim::to_json(&rows).map_err(input_error)?,
        &[("fer.dat", fer), ("messages.dat", msgs)],
    )?;
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let cfg = sim_config(&args.sim)?;
    let report = sim::sweep_p(&cfg, &args.p_values).map_err(input_error)?;
    for (e, p) in &report.best {
        eprintln!("{e} dB: best p = {p}");
    }
    let json = serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)? + "\n";
    emit_results(
        args.sim.out_dir.as_deref(),
        &cfg,
        "sweep",
        &sim::to_csv(&report.rows),
        &json,
        &[],
    )?;
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure {
                code: 2,
                error: e.into(),
            })?;
    }
    match cli.command {
        Command::Codes(c) => codes(c)?,
        Command::Optimize(a) => optimize(a)?,
        Command::Orbit(a) => {
            if orbit(a)? {
                return Ok(4);
            }
        }
        Command::Simulate(a) => simulate(a)?,
        Command::Sweep(a) => sweep(a)?,
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
