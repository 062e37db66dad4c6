use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod report;

use report::{CliError, Run};

#[derive(Parser)]
#[command(
    name = "crkit",
    version,
    about = "Color refinement, amenability and the refinement hierarchy"
)]
struct Cli {
    /// Print a JSON run report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Soft wall-clock limit; a run that exceeds it exits with 3.
    #[arg(long, global = true, value_name = "MS")]
    budget_ms: Option<u64>,
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "CRKIT_SEED", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    Det,
    Rand,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum BenchTarget {
    Refine,
    Amenable,
}

#[derive(Subcommand)]
enum Command {
    /// Stable partition under color refinement.
    Refine {
        file: String,
        /// Class sizes after every round.
        #[arg(long)]
        trace: bool,
    },
    /// Labeled cell graph of the stable partition.
    Cellgraph {
        file: String,
        /// Emit a Graphviz description instead.
        #[arg(long)]
        dot: bool,
    },
    /// Exact amenability test. Exit 0 amenable, 1 not amenable.
    Amenable {
        file: String,
        /// Show the violated condition and its cells.
        #[arg(long)]
        witness: bool,
        /// Also run the direct C-F check and, up to 7 vertices, brute force.
        #[arg(long)]
        cross_check: bool,
    },
    /// Individualization-refinement isomorphism test. Exit 0 isomorphic.
    Iso {
        g: String,
        h: String,
        #[arg(long, value_enum, default_value = "det")]
        policy: PolicyArg,
        /// Print the individualization steps.
        #[arg(long)]
        transcript: bool,
    },
    /// Canonical vertex order and a hash of the canonical adjacency matrix.
    Canon { file: String },
    /// Feasibility of the fractional isomorphism system. Exit 0 feasible.
    Fractiso { g: String, h: String },
    /// Searches for a non-integral fractional automorphism. Exit 1 if found.
    Compact {
        file: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Print the witness matrix.
        #[arg(long)]
        witness: bool,
    },
    /// Membership in each class of the hierarchy.
    Classify {
        /// Graph file; omit when using --all-n.
        file: Option<String>,
        /// Sweep all graphs on K vertices instead.
        #[arg(long, value_name = "K", conflicts_with = "file")]
        all_n: Option<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Graph reduction of a monotone circuit.
    Reduce {
        circuit: String,
        #[arg(long, default_value = "G")]
        variant: String,
        /// Output graph file; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Times a core routine on a seeded random graph.
    Bench {
        #[arg(value_enum)]
        target: BenchTarget,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 1_000_000)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        reps: usize,
    },
    /// Class counts over all graphs on N vertices (N <= 7).
    Sweep {
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Refine { .. } => "refine",
            Command::Cellgraph { .. } => "cellgraph",
            Command::Amenable { .. } => "amenable",
            Command::Iso { .. } => "iso",
            Command::Canon { .. } => "canon",
            Command::Fractiso { .. } => "fractiso",
            Command::Compact { .. } => "compact",
            Command::Classify { .. } => "classify",
            Command::Reduce { .. } => "reduce",
            Command::Bench { .. } => "bench",
            Command::Sweep { .. } => "sweep",
        }
    }
}

/// Exit status of a completed command.
pub enum Status {
    Positive,
    Negative,
    /// Inconsistent results between independent checks.
    Failure,
    BudgetExceeded,
}

fn dispatch(cmd: &Command, run: &mut Run) -> Result<Status, CliError> {
    match cmd {
        Command::Refine { file, trace } => commands::refine(run, file, *trace),
        Command::Cellgraph { file, dot } => commands::cellgraph(run, file, *dot),
        Command::Amenable {
            file,
            witness,
            cross_check,
        } => commands::amenable(run, file, *witness, *cross_check),
        Command::Iso {
            g,
            h,
            policy,
            transcript,
        } => commands::iso(run, g, h, *policy, *transcript),
        Command::Canon { file } => commands::canon(run, file),
        Command::Fractiso { g, h } => commands::fractiso(run, g, h),
        Command::Compact {
            file,
            trials,
            witness,
        } => commands::compact(run, file, *trials, *witness),
        Command::Classify {
            file: Some(file),
            trials,
            ..
        } => commands::classify(run, file, *trials),
        Command::Classify {
            all_n: Some(k),
            trials,
            ..
        } => commands::sweep(run, *k, *trials),
        Command::Classify { .. } => Err(CliError::Usage("classify needs a file or --all-n".into())),
        Command::Reduce {
            circuit,
            variant,
            output,
        } => commands::reduce(run, circuit, variant, output.as_deref()),
        Command::Bench { target, n, m, reps } => commands::bench(run, *target, *n, *m, *reps),
        Command::Sweep { n, trials } => commands::sweep(run, *n, *trials),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut run = Run::new(cli.command.name(), cli.seed, cli.budget_ms);
    let status = match dispatch(&cli.command, &mut run) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let out = if cli.json {
        run.render_json()
    } else {
        run.render_text()
    };
    // a closed pipe is not an error worth reporting
    let _ = std::io::stdout().write_all(out.as_bytes());
    if run.past_deadline() {
        return ExitCode::from(3);
    }
    match status {
        Status::Positive => ExitCode::SUCCESS,
        Status::Negative => ExitCode::from(1),
        Status::Failure => ExitCode::from(2),
        Status::BudgetExceeded => ExitCode::from(3),
    }
}
