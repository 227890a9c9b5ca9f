//! The `qs` command line: `score`, `gen`, `bench` and `session`.
//!
//! Exit codes: 0 success, 2 parse/validation/usage error, 3 cap exceeded,
//! 4 infeasible evidence, 1 anything else (I/O).

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{self, BenchConfig};
use crate::corpus::{self, GeneratorConfig, ScoreReport};
use crate::engine::{Quickscore, Session, DEFAULT_POSITIVE_CAP};
use crate::error::Error;
use crate::model::Polarity;
use crate::oracle::{Oracle, DEFAULT_DISEASE_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "qs", version, about = "Exact diagnosis with noisy-OR networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score one case and write a result file
    Score(ScoreArgs),
    /// Generate a synthetic KB and cases
    Gen(GenArgs),
    /// Time quickscore over a range of positive-finding counts
    Bench(BenchArgs),
    /// Interactive incremental scoring on standard input
    Session(SessionArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Quickscore,
    Oracle,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long)]
    kb: PathBuf,
    #[arg(long)]
    case: PathBuf,
    #[arg(long, value_enum, default_value = "quickscore")]
    method: MethodArg,
    /// Result file; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_POSITIVE_CAP)]
    positive_cap: usize,
    #[arg(long, default_value_t = DEFAULT_DISEASE_CAP)]
    disease_cap: usize,
}

fn parse_range(s: &str) -> Result<[f64; 2], String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("expected LO,HI, got `{s}`"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("`{lo}`: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("`{hi}`: {e}"))?;
    Ok([lo, hi])
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    diseases: usize,
    #[arg(long)]
    findings: usize,
    #[arg(long, default_value_t = GeneratorConfig::default().edges_per_finding)]
    edges_per_finding: f64,
    /// LO,HI
    #[arg(long, value_parser = parse_range, default_value = "0.0005,0.005")]
    prior_range: [f64; 2],
    /// LO,HI
    #[arg(long, value_parser = parse_range, default_value = "0.05,0.9")]
    p_cause_range: [f64; 2],
    /// LO,HI
    #[arg(long, value_parser = parse_range, default_value = "0,0.001")]
    leak_range: [f64; 2],
    #[arg(long, default_value_t = GeneratorConfig::default().n_cases)]
    cases: usize,
    /// Absent findings reported as negative per case
    #[arg(long, default_value_t = GeneratorConfig::default().negatives_per_case)]
    negatives: usize,
    #[arg(long)]
    seed: u64,
    /// Output directory for kb.json and case-NNNN.json
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    kb: PathBuf,
    #[arg(long, default_value_t = 0)]
    pos_min: usize,
    #[arg(long)]
    pos_max: usize,
    #[arg(long, default_value_t = 0)]
    neg: usize,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output; standard output when omitted
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_POSITIVE_CAP)]
    positive_cap: usize,
}

#[derive(Debug, Args)]
struct SessionArgs {
    #[arg(long)]
    kb: PathBuf,
    #[arg(long, default_value_t = DEFAULT_POSITIVE_CAP)]
    positive_cap: usize,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Invalid(_) | Error::Parse { .. } | Error::InvalidConfig(_) => EXIT_INVALID,
        Error::UnknownFinding(_) | Error::DuplicateFinding(_) => EXIT_INVALID,
        Error::CapExceeded { .. } => EXIT_CAP,
        Error::InfeasibleEvidence => EXIT_INFEASIBLE,
        Error::Io { .. } => EXIT_OTHER,
    }
}

/// Runs `qs` with explicit standard streams and returns the exit code.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    let outcome = match cli.command {
        Command::Score(a) => cmd_score(&a, stdout),
        Command::Gen(a) => cmd_gen(&a, stdout),
        Command::Bench(a) => cmd_bench(&a, stdout),
        Command::Session(a) => cmd_session(&a, stdin, stdout),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "qs: {e}");
            exit_code(&e)
        }
    }
}

fn stdout_error(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn cmd_score(args: &ScoreArgs, stdout: &mut dyn Write) -> Result<(), Error> {
    let network = corpus::read_kb(&args.kb)?;
    let evidence = corpus::read_case_for(&args.case, &network)?;
    let report = match args.method {
        MethodArg::Quickscore => {
            let result = Quickscore::with_cap(args.positive_cap).score(&network, &evidence)?;
            ScoreReport::from_quickscore(&network, &result)
        }
        MethodArg::Oracle => {
            let result = Oracle::with_cap(args.disease_cap).posteriors(&network, &evidence)?;
            ScoreReport::from_oracle(&network, &result)
        }
    };
    match &args.out {
        Some(path) => corpus::write_result(&report, path),
        None => stdout
            .write_all(corpus::result_to_string(&report).as_bytes())
            .map_err(stdout_error),
    }
}

fn cmd_gen(args: &GenArgs, stdout: &mut dyn Write) -> Result<(), Error> {
    let config = GeneratorConfig {
        n_diseases: args.diseases,
        n_findings: args.findings,
        edges_per_finding: args.edges_per_finding,
        prior_range: args.prior_range,
        p_cause_range: args.p_cause_range,
        leak_range: args.leak_range,
        n_cases: args.cases,
        negatives_per_case: args.negatives,
        seed: args.seed,
    };
    let corpus = corpus::generate(&config)?;
    let written = corpus.write_to(&args.out)?;
    writeln!(
        stdout,
        "wrote {} ({} diseases, {} findings) and {} cases",
        written[0].display(),
        corpus.network.n_diseases(),
        corpus.network.n_findings(),
        corpus.cases.len()
    )
    .map_err(stdout_error)
}

fn cmd_bench(args: &BenchArgs, stdout: &mut dyn Write) -> Result<(), Error> {
    if args.pos_min > args.pos_max {
        return Err(Error::InvalidConfig(format!(
            "--pos-min {} exceeds --pos-max {}",
            args.pos_min, args.pos_max
        )));
    }
    let network = corpus::read_kb(&args.kb)?;
    let config = BenchConfig {
        pos_min: args.pos_min,
        pos_max: args.pos_max,
        neg: args.neg,
        reps: args.reps,
        seed: args.seed,
        engine: Quickscore::with_cap(args.positive_cap),
    };
    let records = bench::run(&network, &config)?;
    match &args.csv {
        Some(path) => {
            let file = File::create(path).map_err(|e| Error::io(path, e))?;
            bench::write_csv(&records, BufWriter::new(file)).map_err(|e| Error::io(path, e))
        }
        None => bench::write_csv(&records, stdout).map_err(stdout_error),
    }
}

fn cmd_session(
    args: &SessionArgs,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
) -> Result<(), Error> {
    let network = corpus::read_kb(&args.kb)?;
    let session = Quickscore::with_cap(args.positive_cap).session(&network);
    run_session(session, stdin, stdout).map_err(stdout_error)
}

/// The session command loop over arbitrary streams.
///
/// Commands: `+ID`, `-ID`, `post [K]`, `joint`, `reset`, `quit`. Every add
/// prints `joint <value>`; errors print `error: <message>` and the loop
/// continues.
pub fn run_session(
    mut session: Session<'_>,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> std::io::Result<()> {
    let network = session.network();
    let mut line = String::new();
    loop {
        line.clear();
        if input.read_line(&mut line)? == 0 {
            return Ok(());
        }
        let cmd = line.trim();
        if cmd.is_empty() {
            continue;
        }
        if let Some(id) = cmd.strip_prefix('+') {
            report_add(&mut session, id.trim(), Polarity::Positive, out)?;
            continue;
        }
        if let Some(id) = cmd.strip_prefix('-') {
            report_add(&mut session, id.trim(), Polarity::Negative, out)?;
            continue;
        }
        let mut words = cmd.split_whitespace();
        match (words.next(), words.next(), words.next()) {
            (Some("quit"), None, _) => return Ok(()),
            (Some("reset"), None, _) => {
                session.reset();
                writeln!(out, "reset")?;
            }
            (Some("joint"), None, _) => writeln!(out, "joint {:?}", session.joint())?,
            (Some("post"), k, None) => {
                let k = match k.map(str::parse::<usize>) {
                    None => 10,
                    Some(Ok(k)) => k,
                    Some(Err(_)) => {
                        writeln!(out, "error: post takes a non-negative count")?;
                        continue;
                    }
                };
                match session.result() {
                    Ok(result) => {
                        for (i, p) in result.ranked(network).into_iter().take(k) {
                            writeln!(out, "{} {:?}", network.disease(i).id, p)?;
                        }
                    }
                    Err(e) => writeln!(out, "error: {e}")?,
                }
            }
            _ => writeln!(out, "error: unknown command `{cmd}`")?,
        }
    }
}

fn report_add(
    session: &mut Session<'_>,
    id: &str,
    polarity: Polarity,
    out: &mut dyn Write,
) -> std::io::Result<()> {
    match session.add(id, polarity) {
        Ok(result) => writeln!(out, "joint {:?}", result.joint),
        Err(Error::InfeasibleEvidence) => {
            writeln!(out, "joint {:?}", session.joint())?;
            writeln!(out, "error: {}", Error::InfeasibleEvidence)
        }
        Err(e) => writeln!(out, "error: {e}"),
    }
}
