use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use reupload::cost::{CostKind, GradientMethod};
use reupload::data::Pattern;
use reupload::harness::config::RunConfig;
use reupload::harness::sweep::run_preset;
use reupload::harness::{emit_svg, load_results, run_sweep, DatasetMode, Preset, ResultRow};
use reupload::optim::testfns::run_battery;
use reupload::optim::Method;
use reupload::Error;

#[derive(Parser)]
#[command(name = "reupload", version, about = "Single-qubit re-uploading classifier experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep one configuration over training sizes.
    Run(RunArgs),
    /// Run the full cost × pattern × method × mode grid.
    Grid(PresetArgs),
    /// Run a depth or size sweep preset.
    Sweep(PresetArgs),
    /// Plot a results CSV.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every minimizer on the standard test functions.
    ValidateOptimizers,
}

#[derive(Args)]
struct RunArgs {
    /// key = value file; flags given here take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    cost: Option<CostKind>,
    #[arg(long)]
    pattern: Option<Pattern>,
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    mode: Option<DatasetMode>,
    #[arg(long)]
    layers: Option<usize>,
    /// Comma-separated list, e.g. 5,10,15.
    #[arg(long, value_delimiter = ',')]
    train_sizes: Option<Vec<usize>>,
    #[arg(long)]
    test_size: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tune_bias: bool,
    #[arg(long)]
    workers: Option<usize>,
    /// fd, shift or adjoint.
    #[arg(long)]
    gradient: Option<GradientMethod>,
    #[arg(long)]
    max_evals: Option<usize>,
}

#[derive(Args)]
struct PresetArgs {
    #[arg(long)]
    preset: Preset,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    test_size: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn print_rows(rows: &[ResultRow]) {
    println!("{:>6} {:>5} {:>10} {:>10} {:>8}", "train", "reps", "train_acc", "test_acc", "evals");
    for r in rows {
        println!(
            "{:>6} {:>5} {:>10.4} {:>10.4} {:>8}",
            r.train_size, r.reps, r.mean_train_acc, r.mean_test_acc, r.total_evals
        );
    }
}

fn run(args: RunArgs) -> reupload::Result<()> {
    let file = match &args.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    let cli = RunConfig {
        cost: args.cost,
        pattern: args.pattern,
        method: args.method,
        mode: args.mode,
        layers: args.layers,
        train_sizes: args.train_sizes,
        test_size: args.test_size,
        reps: args.reps,
        seed: args.seed,
        out: args.out,
        tune_bias: args.tune_bias.then_some(true),
        workers: args.workers,
        gradient: args.gradient,
        max_evals: args.max_evals,
    };
    let cfg = file.overridden_by(cli);
    let (cell, sizes) = cfg.resolve()?;
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    let name = format!(
        "{}_{}_{}_{}_l{}",
        cell.cost.as_str(),
        cell.pattern.as_str(),
        cell.method.as_str(),
        cell.mode.as_str(),
        cell.layers
    );
    let csv = out.join(format!("{name}.csv"));
    let rows = run_sweep(&cell, &sizes, Some(&csv), cfg.workers.unwrap_or_else(default_workers))?;
    let svg = out.join(format!("{name}.svg"));
    emit_svg(&rows, &svg)?;
    print_rows(&rows);
    println!("wrote {} and {}", csv.display(), svg.display());
    Ok(())
}

fn preset(args: PresetArgs) -> reupload::Result<()> {
    let workers = args.workers.unwrap_or_else(default_workers);
    let sweeps = run_preset(args.preset, &args.out, workers, |c| {
        if let Some(t) = args.test_size {
            c.test_size = t;
        }
        if let Some(r) = args.reps {
            c.repetitions = r;
        }
        if let Some(s) = args.seed {
            c.master_seed = s;
        }
    })?;
    for (path, rows) in &sweeps {
        println!("{}", path.display());
        print_rows(rows);
    }
    Ok(())
}

fn validate() -> reupload::Result<bool> {
    let outcomes = run_battery()?;
    for o in &outcomes {
        println!(
            "{:<13} {:<11} {} gap={:.3e} evals={}",
            o.case,
            o.method.as_str(),
            if o.passed { "PASS" } else { "FAIL" },
            o.gap,
            o.report.n_evals
        );
    }
    Ok(outcomes.iter().all(|o| o.passed))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } | Error::Parse { .. } | Error::Validation { .. } | Error::EmptyDataset => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Grid(a) | Command::Sweep(a) => preset(a),
        Command::Plot { input, out } => load_results(&input).and_then(|rows| emit_svg(&rows, &out)),
        Command::ValidateOptimizers => match validate() {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(3),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
