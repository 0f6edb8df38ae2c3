//! `shallowcode`: build codes, verify gadgets and dispersers, and run
//! seeded Monte Carlo experiments with CSV output.
//!
//! Errors are printed to stderr as one JSON object
//! `{"code", "message", "witness"?}`. Exit status is 0 on success, 1 when a
//! check ran and found a counterexample (or a search ran out of tries), and
//! 2 on bad usage, malformed inputs or unmet preconditions.

mod error;
mod output;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use shallowcode::ackermann::{ackermann, alpha, lambda, MAX_INPUT_BITS};
use shallowcode::channel::{
    bsc, capacity, mutual_information_uniform, noiseless, q_ary_symmetric, random_symmetric,
    ChannelFile,
};
use shallowcode::circuit::CircuitFile;
use shallowcode::codec::{
    build_capacity_code, default_eps, failure_prob_mc, predicted_exponent, McReport,
};
use shallowcode::disperser::{
    check_disperser, find_disperser, purge_right_half, sample_left_regular, verify_disperser,
    BipartiteGraph,
};
use shallowcode::gadgets::{
    build_good_code, check_range_detector, repetition_pgc, verify_range_detector, GadgetConfig,
    RangeDetectorSpec,
};
use shallowcode::galois::make_field;
use shallowcode::limits::{Limits, ENV_VAR};
use shallowcode::typical::{count_typical, mass_outside_exact, mass_outside_mc};
use shallowcode::{
    BigCount, Channel, CodeInstance, CodecConfig, LinearCircuit, Stream, TypicalParams,
};

use error::{CliError, EXIT_USAGE};
use output::{sig12, ExperimentCsv};

#[derive(Parser)]
#[command(
    name = "shallowcode",
    version,
    about = "Codes encoded by shallow linear circuits over finite fields"
)]
struct Cli {
    /// Worker threads for Monte Carlo and exhaustive checks (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a capacity code for a channel and write it as JSON.
    Build(BuildArgs),
    /// Estimate a code's failure probability by Monte Carlo.
    Simulate(SimulateArgs),
    /// Build and simulate over a grid of rates and block lengths.
    Sweep(SweepArgs),
    /// Exhaustively check a circuit against a range-detector spec.
    Verify(VerifyArgs),
    /// Write gadget circuits.
    #[command(subcommand)]
    Gadget(GadgetCommand),
    /// Sample, search for and verify dispersers.
    #[command(subcommand)]
    Disperser(DisperserCommand),
    /// Evaluate the Ackermann function, λ_d and α.
    Ackermann(AckermannArgs),
    /// Write channel files or report on one.
    Channel(ChannelArgs),
    /// Typical-set sizes and probability mass.
    #[command(subcommand)]
    Typical(TypicalCommand),
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    channel: PathBuf,
    /// Target rate in bits per channel use.
    #[arg(long)]
    rate: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Disperser slack, or "auto".
    #[arg(long, default_value = "auto")]
    gamma: String,
    #[arg(long, default_value_t = 4)]
    depth: usize,
    #[arg(long)]
    max_tries: Option<u64>,
    #[arg(long)]
    allow_above_capacity: bool,
    /// Code file to write (default: code-n<N>-s<SEED>.json).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Build report to write (default: next to the code file).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long)]
    channel: PathBuf,
    #[arg(long)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Typicality slack, or "auto".
    #[arg(long, default_value = "auto")]
    eps: String,
    /// The zero message plus this many minus one uniform messages.
    #[arg(long, default_value_t = 1)]
    messages: usize,
    /// CSV output (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    channel: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    rates: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    ns: Vec<usize>,
    #[arg(long)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "auto")]
    eps: String,
    #[arg(long, default_value = "auto")]
    gamma: String,
    #[arg(long, default_value_t = 1)]
    messages: usize,
    #[arg(long, default_value_t = 4)]
    depth: usize,
    #[arg(long)]
    max_tries: Option<u64>,
    #[arg(long)]
    allow_above_capacity: bool,
    /// Also write every built code into this directory.
    #[arg(long)]
    codes_dir: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Circuit file, or any JSON document with a `circuit` field.
    #[arg(long)]
    circuit: PathBuf,
    /// "m_in,n_out,ell,k,r,s": every input of weight in [ell, k] must map
    /// to weight in [r, s].
    #[arg(long)]
    spec: String,
    /// Fall back to random sampling when exhaustive checking is too large.
    #[arg(long)]
    sampled: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum GadgetCommand {
    /// Every input copied `copies` times.
    Repetition {
        #[arg(long, default_value_t = 2)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 32)]
        copies: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A verified good code F_q^n -> F_q^{32n}; writes the build report.
    GoodCode {
        #[arg(long, default_value_t = 2)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DisperserCommand {
    /// A random left-regular graph.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample graphs until one verifies.
    Find {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        max_tries: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that every left set of size ≥ γn sees ≥ (1−ε)m right vertices.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        eps: f64,
        /// Fall back to random sampling when exhaustive checking is too large.
        #[arg(long)]
        sampled: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Drop the heavier half of the right vertices.
    Purge {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("what").required(true).multiple(true).args(["alpha", "lambda", "a"])))]
struct AckermannArgs {
    /// α(N). Numbers are decimal or of the form 2^k.
    #[arg(long, value_name = "N")]
    alpha: Option<String>,
    /// λ_D(N).
    #[arg(long, num_args = 2, value_names = ["D", "N"])]
    lambda: Option<Vec<String>>,
    /// A(I, J).
    #[arg(long, num_args = 2, value_names = ["I", "J"])]
    a: Option<Vec<String>>,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["info", "bsc", "qsc", "noiseless", "random"])))]
struct ChannelArgs {
    /// Validate a channel file and print its capacity.
    #[arg(long, value_name = "FILE")]
    info: Option<PathBuf>,
    /// Binary symmetric channel with crossover P.
    #[arg(long, value_name = "P")]
    bsc: Option<f64>,
    /// q-ary symmetric channel: Q, then total error probability P.
    #[arg(long, num_args = 2, value_names = ["Q", "P"])]
    qsc: Option<Vec<f64>>,
    #[arg(long, value_name = "Q")]
    noiseless: Option<usize>,
    /// Random symmetric channel on Q symbols.
    #[arg(long, value_name = "Q")]
    random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TypicalCommand {
    /// |Typical(y, ε)|, which does not depend on y.
    Count {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
    },
    /// Probability that the sent word is not typical for the received one;
    /// exact, or Monte Carlo when --trials is given.
    Mass {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let err = CliError::usage(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    match run(cli, &mut io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit as u8)
        }
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    if let Ok(spec) = std::env::var(ENV_VAR) {
        Limits::parse(&spec).map_err(|e| CliError::usage(format!("{ENV_VAR}: {e}")))?;
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::usage("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(e.to_string()))?;
    }
    match cli.command {
        Command::Build(a) => cmd_build(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Gadget(c) => cmd_gadget(c, out),
        Command::Disperser(c) => cmd_disperser(c, out),
        Command::Ackermann(a) => cmd_ackermann(a, out),
        Command::Channel(a) => cmd_channel(a, out),
        Command::Typical(c) => cmd_typical(c, out),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::new("Io", format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, format!("{text}\n"))
        .map_err(|e| CliError::new("Io", format!("{}: {e}", path.display())))
}

/// Writes `text` (plus a final newline) to `path`, or to `out`.
fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, text),
        None => Ok(writeln!(out, "{text}")?),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON value serializes")
}

fn load_channel(path: &Path) -> Result<Channel, CliError> {
    Ok(ChannelFile::parse(&read(path)?)?.to_spec()?)
}

fn load_code(path: &Path) -> Result<CodeInstance, CliError> {
    Ok(CodeInstance::from_json(&read(path)?)?)
}

fn parse_real(s: &str, what: &str) -> Result<f64, CliError> {
    s.parse()
        .map_err(|_| CliError::usage(format!("{what}: expected a number or \"auto\", got `{s}`")))
}

/// Half the margin by which `r` sits below the rate the disperser layer can
/// carry, `1 − (r + H(row)) / log₂ q`.
fn auto_gamma(ch: &Channel, rate: f64) -> f64 {
    let margin = 1.0 - (rate + ch.row_entropy()) / (ch.q() as f64).log2();
    (margin / 2.0).clamp(0.0, 0.5)
}

fn gamma_arg(s: &str, ch: &Channel, rate: f64) -> Result<f64, CliError> {
    if s == "auto" {
        Ok(auto_gamma(ch, rate))
    } else {
        parse_real(s, "--gamma")
    }
}

fn eps_arg(s: &str, ch: &Channel, n: usize) -> Result<f64, CliError> {
    if s == "auto" {
        Ok(default_eps(ch, n))
    } else {
        parse_real(s, "--eps")
    }
}

fn codec_config(depth: usize, max_tries: Option<u64>, allow_above: bool) -> CodecConfig {
    let mut cfg = CodecConfig {
        depth_budget: depth,
        allow_above_capacity: allow_above,
        ..CodecConfig::default()
    };
    if let Some(t) = max_tries {
        cfg.gadgets.max_tries = t;
    }
    cfg
}

fn alpha_of(n: usize) -> Result<u64, CliError> {
    Ok(alpha(&(n as u64))?)
}

fn build_report(inst: &CodeInstance, ch: &Channel) -> Result<Value, CliError> {
    let n = inst.n();
    Ok(json!({
        "meta": inst.meta,
        "n": n,
        "k": inst.k(),
        "q": inst.field().order(),
        "capacity_bits": ch.capacity_bits(),
        "alpha": alpha_of(n)?,
        "wires_per_n": inst.meta.wires as f64 / n as f64,
        "predicted_exponent": predicted_exponent(ch, inst.meta.rate_bits, inst.meta.gamma, 0.0),
    }))
}

fn cmd_build(a: BuildArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let ch = load_channel(&a.channel)?;
    let gamma = gamma_arg(&a.gamma, &ch, a.rate)?;
    let cfg = codec_config(a.depth, a.max_tries, a.allow_above_capacity);
    let inst = build_capacity_code(&ch, a.rate, a.n, gamma, a.seed, &cfg)?;
    let code_path = a
        .out
        .unwrap_or_else(|| PathBuf::from(format!("code-n{}-s{}.json", a.n, a.seed)));
    let report_path = a
        .report
        .unwrap_or_else(|| code_path.with_extension("report.json"));
    let report = build_report(&inst, &ch)?;
    emit(out, Some(&code_path), &inst.to_json())?;
    emit(out, Some(&report_path), &pretty(&report))?;
    writeln!(out, "wires {}", inst.meta.wires)?;
    writeln!(out, "depth {}", inst.meta.depth)?;
    writeln!(out, "alpha {}", report["alpha"])?;
    writeln!(
        out,
        "wires_per_n {}",
        sig12(inst.meta.wires as f64 / inst.n() as f64)
    )?;
    Ok(())
}

fn csv_sink<'a>(
    out: &'a mut dyn Write,
    path: Option<&Path>,
) -> Result<Box<dyn Write + 'a>, CliError> {
    Ok(match path {
        Some(p) => {
            Box::new(io::BufWriter::new(fs::File::create(p).map_err(|e| {
                CliError::new("Io", format!("{}: {e}", p.display()))
            })?))
        }
        None => Box::new(out),
    })
}

fn simulate(
    inst: &CodeInstance,
    ch: &Channel,
    eps: f64,
    messages: usize,
    trials: u64,
    seed: u64,
) -> Result<McReport, CliError> {
    if trials == 0 {
        return Ok(McReport {
            per_message: Vec::new(),
        });
    }
    let report = failure_prob_mc(inst, ch, eps, messages, trials, &Stream::new(seed))?;
    for (i, m) in report.per_message.iter().enumerate() {
        eprintln!(
            "n={} message {}/{}: {} failures in {} trials",
            inst.n(),
            i + 1,
            report.per_message.len(),
            m.failures,
            m.trials
        );
    }
    Ok(report)
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let inst = load_code(&a.code)?;
    let ch = load_channel(&a.channel)?;
    let eps = eps_arg(&a.eps, &ch, inst.n())?;
    let report = simulate(&inst, &ch, eps, a.messages, a.trials, a.seed)?;
    let mut csv = ExperimentCsv::new(csv_sink(out, a.out.as_deref())?)?;
    for m in &report.per_message {
        csv.row(a.seed, &inst, eps, m)?;
    }
    Ok(csv.finish()?)
}

/// One row per (rate, n): the message with the largest failure estimate.
fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let ch = load_channel(&a.channel)?;
    let cfg = codec_config(a.depth, a.max_tries, a.allow_above_capacity);
    if let Some(dir) = &a.codes_dir {
        fs::create_dir_all(dir)?;
    }
    let mut csv = ExperimentCsv::new(csv_sink(out, a.out.as_deref())?)?;
    for &rate in &a.rates {
        for &n in &a.ns {
            let gamma = gamma_arg(&a.gamma, &ch, rate)?;
            let inst = build_capacity_code(&ch, rate, n, gamma, a.seed, &cfg)?;
            if let Some(dir) = &a.codes_dir {
                write_file(
                    &dir.join(format!("code-r{rate}-n{n}.json")),
                    &inst.to_json(),
                )?;
            }
            let eps = eps_arg(&a.eps, &ch, n)?;
            let report = simulate(&inst, &ch, eps, a.messages, a.trials, a.seed)?;
            if let Some(worst) = report.worst() {
                csv.row(a.seed, &inst, eps, worst)?;
            }
        }
    }
    Ok(csv.finish()?)
}

fn load_circuit(path: &Path) -> Result<LinearCircuit, CliError> {
    let v: Value = serde_json::from_str(&read(path)?)?;
    let file: CircuitFile = match v.get("circuit") {
        Some(inner) => serde_json::from_value(inner.clone())?,
        None => serde_json::from_value(v)?,
    };
    Ok(LinearCircuit::from_file(&file)?)
}

fn parse_spec(s: &str) -> Result<RangeDetectorSpec, CliError> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::usage(format!("--spec: expected six integers, got `{s}`")))?;
    let [m_in, n_out, ell, k, r, s] = parts[..] else {
        return Err(CliError::usage(format!(
            "--spec: expected six integers, got `{s}`"
        )));
    };
    let spec = RangeDetectorSpec {
        m_in,
        n_out,
        ell,
        k,
        r,
        s,
    };
    spec.validate()?;
    Ok(spec)
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let c = load_circuit(&a.circuit)?;
    let spec = parse_spec(&a.spec)?;
    let verdict = if a.sampled {
        check_range_detector(&c, &spec, &Stream::new(a.seed))?
    } else {
        verify_range_detector(&c, &spec)?
    };
    writeln!(out, "{}", pretty(&json!(verdict)))?;
    if verdict.passed {
        Ok(())
    } else {
        Err(CliError::failed(
            "VerificationFailed",
            "an input in the weight range maps outside the output range",
            verdict.witness.map(|w| json!(w)),
        ))
    }
}

fn cmd_gadget(c: GadgetCommand, out: &mut dyn Write) -> Result<(), CliError> {
    match c {
        GadgetCommand::Repetition {
            q,
            n,
            copies,
            out: dest,
        } => {
            if n == 0 || copies == 0 {
                return Err(CliError::usage("--n and --copies must be positive"));
            }
            let field = make_field(q)?;
            emit(
                out,
                dest.as_deref(),
                &repetition_pgc(&field, n, copies).to_json(),
            )
        }
        GadgetCommand::GoodCode {
            q,
            n,
            depth,
            seed,
            out: dest,
        } => {
            let field = make_field(q)?;
            let report = build_good_code(
                &field,
                n,
                depth,
                &GadgetConfig::default(),
                &Stream::new(seed),
            )?;
            emit(out, dest.as_deref(), &pretty(&report.to_json()))?;
            if dest.is_some() {
                writeln!(out, "wires {}", report.wire_count)?;
                writeln!(out, "depth {}", report.depth)?;
                writeln!(
                    out,
                    "verified {}",
                    json!(report.verified).as_str().unwrap_or("?")
                )?;
            }
            Ok(())
        }
    }
}

fn load_graph(path: &Path) -> Result<BipartiteGraph, CliError> {
    Ok(BipartiteGraph::from_json(&read(path)?)?)
}

fn cmd_disperser(c: DisperserCommand, out: &mut dyn Write) -> Result<(), CliError> {
    match c {
        DisperserCommand::Sample {
            n,
            m,
            d,
            seed,
            out: dest,
        } => {
            let g = sample_left_regular(n, m, d, &mut Stream::new(seed))?;
            emit(out, dest.as_deref(), &g.to_json())
        }
        DisperserCommand::Find {
            n,
            m,
            d,
            gamma,
            eps,
            seed,
            max_tries,
            out: dest,
        } => {
            let found = find_disperser(n, m, d, gamma, eps, &Stream::new(seed), max_tries)?;
            emit(out, dest.as_deref(), &found.graph.to_json())?;
            if dest.is_some() {
                writeln!(out, "tries {}", found.tries)?;
                writeln!(
                    out,
                    "verified {}",
                    if found.verified {
                        "exhaustive"
                    } else {
                        "sampled"
                    }
                )?;
            }
            Ok(())
        }
        DisperserCommand::Verify {
            graph,
            gamma,
            eps,
            sampled,
            seed,
        } => {
            let g = load_graph(&graph)?;
            let verdict = if sampled {
                check_disperser(&g, gamma, eps, &Stream::new(seed))
            } else {
                verify_disperser(&g, gamma, eps)?
            };
            writeln!(out, "{}", pretty(&json!(verdict)))?;
            if verdict.passed {
                Ok(())
            } else {
                Err(CliError::failed(
                    "VerificationFailed",
                    "a large left set has a small neighbourhood",
                    verdict.witness.map(|w| json!(w)),
                ))
            }
        }
        DisperserCommand::Purge { graph, out: dest } => {
            let g = purge_right_half(&load_graph(&graph)?)?;
            emit(out, dest.as_deref(), &g.to_json())
        }
    }
}

fn parse_big(s: &str) -> Result<BigCount, CliError> {
    let bad = || CliError::usage(format!("expected a positive integer or 2^k, got `{s}`"));
    if let Some(k) = s.strip_prefix("2^") {
        let k: u64 = k.parse().map_err(|_| bad())?;
        if k >= MAX_INPUT_BITS {
            return Err(CliError::new(
                "TooLarge",
                format!("2^{k} has more than {MAX_INPUT_BITS} bits"),
            ));
        }
        return Ok(BigCount::from(1u32) << k);
    }
    s.parse().map_err(|_| bad())
}

fn parse_small(s: &str) -> Result<u64, CliError> {
    s.parse()
        .map_err(|_| CliError::usage(format!("expected a nonnegative integer, got `{s}`")))
}

fn cmd_ackermann(a: AckermannArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if let Some(n) = &a.alpha {
        writeln!(out, "{}", alpha(&parse_big(n)?)?)?;
    }
    if let Some(v) = &a.lambda {
        writeln!(out, "{}", lambda(parse_small(&v[0])?, &parse_big(&v[1])?)?)?;
    }
    if let Some(v) = &a.a {
        let cap = BigCount::from(1u32) << MAX_INPUT_BITS;
        writeln!(
            out,
            "{}",
            ackermann(parse_small(&v[0])?, &parse_big(&v[1])?, &cap)?
        )?;
    }
    Ok(())
}

fn cmd_channel(a: ChannelArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if let Some(path) = &a.info {
        let file = ChannelFile::parse(&read(path)?)?;
        let ch: Channel = file.to_spec()?;
        writeln!(out, "q {}", ch.q())?;
        writeln!(out, "capacity {}", sig12(capacity(&ch)))?;
        writeln!(
            out,
            "mutual_information_uniform {}",
            sig12(mutual_information_uniform(&ch))
        )?;
        writeln!(out, "row_entropy {}", sig12(ch.row_entropy()))?;
        writeln!(out, "digest {}", file.digest())?;
        return Ok(());
    }
    let ch: Channel = if let Some(p) = a.bsc {
        check_probability(p)?;
        bsc(p)
    } else if let Some(v) = &a.qsc {
        let q = v[0];
        if q.fract() != 0.0 || q < 2.0 {
            return Err(CliError::usage(format!(
                "--qsc: alphabet size must be an integer ≥ 2, got {q}"
            )));
        }
        check_probability(v[1])?;
        q_ary_symmetric(q as usize, v[1])
    } else if let Some(q) = a.noiseless {
        check_alphabet(q)?;
        noiseless(q)
    } else if let Some(q) = a.random {
        check_alphabet(q)?;
        random_symmetric(q, &mut Stream::new(a.seed))
    } else {
        unreachable!("clap requires one channel source");
    };
    emit(
        out,
        a.out.as_deref(),
        &pretty(&json!(ChannelFile::from_spec(&ch))),
    )
}

fn check_probability(p: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(CliError::new(
            "InvalidChannel",
            format!("{p} is outside [0, 1]"),
        ))
    }
}

fn check_alphabet(q: usize) -> Result<(), CliError> {
    if q >= 2 {
        Ok(())
    } else {
        Err(CliError::usage(format!(
            "alphabet size must be at least 2, got {q}"
        )))
    }
}

fn cmd_typical(c: TypicalCommand, out: &mut dyn Write) -> Result<(), CliError> {
    match c {
        TypicalCommand::Count { channel, n, eps } => {
            let ch = load_channel(&channel)?;
            writeln!(out, "{}", count_typical(&TypicalParams::new(&ch, n, eps)?)?)?;
        }
        TypicalCommand::Mass {
            channel,
            n,
            eps,
            trials,
            seed,
        } => {
            let ch = load_channel(&channel)?;
            let params = TypicalParams::new(&ch, n, eps)?;
            match trials {
                None => writeln!(out, "{}", sig12(mass_outside_exact(&params)?))?,
                Some(t) => {
                    let est = mass_outside_mc(&params, t, &Stream::new(seed));
                    writeln!(out, "estimate {}", sig12(est.estimate))?;
                    writeln!(out, "stderr {}", sig12(est.stderr))?;
                    writeln!(out, "comparator {}", sig12(est.comparator))?;
                }
            }
        }
    }
    Ok(())
}
