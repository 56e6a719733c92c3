use std::fs::{File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::Ordering;
use std::time::{Duration, Instant};

use bhr_core::inductive::{Scenario, ScenarioSchedule};
use bhr_core::{FrequencyPartition, SearchLimits};
use bhr_harness::{
    count, oracle_check, run_evolution, verify_all, Checkpoint, EvolutionConfig, HarnessError, Mode,
    Sinks, VerifyConfig,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bhr", version, about = "Hamiltonian paths with prescribed cyclic edge lengths in K_p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve every item of a stream and report solved / total.
    Verify(VerifyArgs),
    /// Grow a solved instance one vertex at a time.
    Evolve(EvolveArgs),
    /// Count stream items without solving.
    Count {
        #[arg(long)]
        p: usize,
        #[arg(long, value_enum)]
        mode: StreamMode,
    },
    /// Compare the solver against the brute-force oracle on all multisets.
    OracleCheck {
        #[arg(long, default_value_t = 4)]
        min_p: usize,
        #[arg(long, default_value_t = 8)]
        max_p: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StreamMode {
    Fp,
    AllMultisets,
    Coprime,
}

impl From<StreamMode> for Mode {
    fn from(m: StreamMode) -> Mode {
        match m {
            StreamMode::Fp => Mode::Fp,
            StreamMode::AllMultisets => Mode::AllMultisets,
            StreamMode::Coprime => Mode::Coprime,
        }
    }
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long)]
    max_backtracks: Option<u64>,
    /// Per-item time limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

impl LimitArgs {
    fn limits(&self) -> Result<SearchLimits, HarnessError> {
        let time_limit = match self.time_limit {
            Some(s) if !(s >= 0.0 && s.is_finite()) => {
                return Err(HarnessError::Config(format!("invalid --time-limit {s}")))
            }
            Some(s) => Some(Duration::from_secs_f64(s)),
            None => None,
        };
        Ok(SearchLimits { max_backtracks: self.max_backtracks, time_limit })
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    p: usize,
    #[arg(long, value_enum)]
    mode: StreamMode,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    limits: LimitArgs,
    /// Resume from this checkpoint; progress is written back to it.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Results file, one JSON record per line (appended to when resuming).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Checkpoint file; defaults to the resume file, else the results path with extension `.ckpt.json`.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Human log file; defaults to stdout.
    #[arg(long)]
    log: Option<PathBuf>,
    #[arg(long)]
    no_hints: bool,
    #[arg(long)]
    no_symmetry: bool,
    /// Stop after this many items (resume later from the checkpoint).
    #[arg(long)]
    max_items: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Auto,
    #[value(name = "I")]
    One,
    #[value(name = "II")]
    Two,
    Alternate,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Smallest,
}

#[derive(Args)]
struct EvolveArgs {
    #[arg(long)]
    start_p: usize,
    #[arg(long)]
    iterations: usize,
    #[arg(long, value_enum, default_value = "auto")]
    scenario: ScenarioArg,
    #[arg(long, value_enum, default_value = "smallest")]
    policy: PolicyArg,
    /// Starting frequency partition, e.g. `5,4,4,4,4,4,4`.
    #[arg(long, value_delimiter = ',')]
    start_fp: Option<Vec<usize>>,
    #[command(flatten)]
    limits: LimitArgs,
    /// Results file, one JSON record per iteration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run the heuristic insertion step in Scenario I too.
    #[arg(long)]
    heuristic_scenario_i: bool,
}

fn create(path: &Path, append: bool) -> Result<BufWriter<File>, HarnessError> {
    let file = if append {
        OpenOptions::new().create(true).append(true).open(path)
    } else {
        File::create(path)
    };
    file.map(BufWriter::new).map_err(|e| HarnessError::Io { path: path.to_owned(), source: e })
}

fn verify(args: VerifyArgs) -> Result<i32, HarnessError> {
    let mode = Mode::from(args.mode);
    let mut config = VerifyConfig::new(args.p, mode);
    config.limits = args.limits.limits()?;
    config.jobs = args.jobs;
    config.hints = !args.no_hints && args.jobs == 1;
    config.symmetry_reduction = !args.no_symmetry;
    config.max_items = args.max_items;
    config.checkpoint_path = args
        .checkpoint
        .clone()
        .or_else(|| args.resume.clone())
        .or_else(|| args.out.as_ref().map(|o| o.with_extension("ckpt.json")));

    let interrupt = config.interrupt.clone();
    ctrlc::set_handler(move || interrupt.store(true, Ordering::Relaxed))
        .map_err(|e| HarnessError::Config(format!("cannot install signal handler: {e}")))?;

    let resume = args.resume.as_deref().map(Checkpoint::load).transpose()?;
    let mut results = args.out.as_deref().map(|p| create(p, resume.is_some())).transpose()?;
    let stdout = io::stdout();
    let mut log: Box<dyn Write> = match &args.log {
        Some(path) => Box::new(create(path, resume.is_some())?),
        None => Box::new(stdout.lock()),
    };
    let sinks = Sinks { results: results.as_mut().map(|w| w as &mut dyn Write), log: &mut *log };
    let summary = verify_all(&config, resume, sinks)?;

    eprintln!(
        "p={} mode={} solved {} / {} (exhausted {}, limited {}) max backtracks {} wall {:.2}s{}",
        summary.p,
        summary.mode,
        summary.solved,
        summary.total,
        summary.exhausted,
        summary.limited,
        summary.max_backtracks,
        summary.wall_time.as_secs_f64(),
        if summary.incomplete { " [incomplete; resume from checkpoint]" } else { "" },
    );
    Ok(summary.exit_code())
}

fn evolve(args: EvolveArgs) -> Result<i32, HarnessError> {
    let mut config = EvolutionConfig::new(args.start_p, args.iterations);
    config.schedule = match args.scenario {
        ScenarioArg::Auto => ScenarioSchedule::Auto,
        ScenarioArg::One => ScenarioSchedule::Fixed(Scenario::I),
        ScenarioArg::Two => ScenarioSchedule::Fixed(Scenario::II),
        ScenarioArg::Alternate => ScenarioSchedule::Alternate,
    };
    let PolicyArg::Smallest = args.policy;
    config.start_fp = args.start_fp.map(FrequencyPartition::new).transpose()?;
    config.evolve.limits = args.limits.limits()?;
    config.evolve.heuristic_in_scenario_i = args.heuristic_scenario_i;

    let report = run_evolution(&config, &mut io::stdout().lock())?;
    if let Some(path) = &args.out {
        let mut out = create(path, false)?;
        for record in report.records() {
            writeln!(out, "{}", record.to_json())?;
        }
        out.flush()?;
    }
    Ok(report.exit_code(args.iterations))
}

fn run(cli: Cli) -> Result<i32, HarnessError> {
    match cli.command {
        Command::Verify(args) => verify(args),
        Command::Evolve(args) => evolve(args),
        Command::Count { p, mode } => {
            let started = Instant::now();
            let report = count(p, mode.into())?;
            println!("{report}");
            eprintln!("counted in {:.3}s", started.elapsed().as_secs_f64());
            Ok(0)
        }
        Command::OracleCheck { min_p, max_p } => {
            let report = oracle_check(min_p, max_p)?;
            println!(
                "oracle-check p={min_p}..={max_p}: {} multisets, {} realizable, {} disagreements",
                report.checked,
                report.realizable,
                report.disagreements.len()
            );
            for d in &report.disagreements {
                println!("  disagreement: {d:?}");
            }
            Ok(if report.disagreements.is_empty() { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
