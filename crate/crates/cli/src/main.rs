mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit codes. Scripts depend on these; do not renumber.
pub mod exit {
    pub const OK: u8 = 0;
    pub const PARSE: u8 = 1;
    pub const ZERO_NSW: u8 = 2;
    pub const UNSUPPORTED: u8 = 3;
    pub const INVALID_ALLOCATION: u8 = 4;
    pub const BUDGET: u8 = 5;
    pub const AUDIT_FAILED: u8 = 6;
}

#[derive(Parser)]
#[command(name = "binfair", version, about = "Nash welfare allocations for binary valuations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the doubling algorithm on an instance.
    Solve {
        instance: PathBuf,
        /// Add dummy goods when no matching covers every agent.
        #[arg(long)]
        pad_dummies: bool,
        /// Write the iteration trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the allocation here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Audit an allocation against an instance.
    Verify {
        instance: PathBuf,
        allocation: PathBuf,
        /// Trace from `solve --trace`, enabling the growth checks.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// Emit a generated instance.
    Generate {
        #[command(subcommand)]
        family: Family,
        /// Also write companion allocations into this directory.
        #[arg(long, global = true)]
        out_dir: Option<PathBuf>,
    },
    /// Exhaustive optimum or share computation.
    Oracle {
        instance: PathBuf,
        #[arg(long, value_enum)]
        objective: Objective,
        #[arg(long)]
        agent: Option<usize>,
        /// Number of parts for `mms` (default: n).
        #[arg(long)]
        parts: Option<usize>,
        /// Goods for `mms`, comma separated (default: all).
        #[arg(long, value_delimiter = ',')]
        goods: Option<Vec<usize>>,
        /// Allocation file, required for `gmms`.
        #[arg(long)]
        allocation: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArg,
    },
}

#[derive(Args)]
struct BudgetArg {
    /// Maximum enumeration steps for exhaustive oracles.
    #[arg(long = "oracle-budget", env = "BINFAIR_ORACLE_BUDGET", default_value_t = binfair::Budget::default().0)]
    value: u64,
}

#[derive(Subcommand)]
enum Family {
    /// Cubic-graph reduction with `tau` private goods per vertex.
    Apx {
        /// `k4`, `petersen`, or a JSON graph file.
        #[arg(long)]
        graph: String,
        #[arg(long)]
        tau: usize,
    },
    /// Envy-free allocation with low Nash welfare.
    EnvyGap {
        #[arg(long)]
        k: usize,
    },
    /// Planted subadditive instance; the identical-f twin goes to --out-dir.
    LowerBound {
        #[arg(long)]
        n: usize,
        #[arg(long, requires = "q")]
        p: Option<usize>,
        #[arg(long, requires = "p")]
        q: Option<usize>,
        /// Derive p and q from n when they are not given.
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long)]
        seed: u64,
    },
    /// Random XOS families of fixed-size sets.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        family_size: usize,
        /// Goods per set (default: ⌈m/2⌉).
        #[arg(long)]
        set_size: Option<usize>,
        #[arg(long)]
        seed: u64,
    },
    /// Every agent has the same interval spectrum.
    Spectrum {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        delta: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Objective {
    Nsw,
    Sw,
    Mms,
    Gmms,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            instance,
            pad_dummies,
            trace,
            out,
        } => commands::solve(&instance, pad_dummies, trace.as_deref(), out.as_deref()),
        Command::Verify {
            instance,
            allocation,
            trace,
            budget,
        } => commands::verify(&instance, &allocation, trace.as_deref(), binfair::Budget(budget.value)),
        Command::Generate { family, out_dir } => commands::generate(family, out_dir.as_deref()),
        Command::Oracle {
            instance,
            objective,
            agent,
            parts,
            goods,
            allocation,
            budget,
        } => commands::oracle(
            &instance,
            objective,
            commands::OracleParams {
                agent,
                parts,
                goods,
                allocation,
            },
            binfair::Budget(budget.value),
        ),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
