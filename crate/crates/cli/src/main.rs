use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

mod commands;
mod exit;
mod plot;

use commands::{Format, Op, Outcome, RunConfig};
use exit::CliError;

/// Quasinorms on R^n modulo dilation: distances, vector-space operations,
/// Banach–Mazur estimates and symmetry breaking.
#[derive(Parser)]
#[command(name = "normspace", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Grid resolution (default 720 for n = 2, 2000 otherwise)
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Skip local refinement of distance witnesses
    #[arg(long, global = true)]
    no_polish: bool,
    /// Write the primary output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Khare distance with witness directions
    Dist { x: PathBuf, y: PathBuf },
    /// Evaluate a spec at points given as comma-separated coordinates
    Eval {
        spec: PathBuf,
        #[arg(long, required = true, allow_hyphen_values = true)]
        at: Vec<String>,
    },
    /// Geometric interpolation `‖·‖_X^θ ‖·‖_Y^(1−θ)`, θ in [0, 1]
    Interp {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
    },
    /// Additive inverse `‖·‖_X^(−1)`
    Opposite { x: PathBuf },
    /// Scalar multiple θ·X for any real θ
    Scale {
        x: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
    },
    /// Sum X + Y
    Add { x: PathBuf, y: PathBuf },
    /// Mean (X + Y)/2
    Mean { x: PathBuf, y: PathBuf },
    /// Metric and vector-space axiom checks over at least three specs
    Axioms { specs: Vec<PathBuf> },
    /// Banach–Mazur distance estimate
    Bm {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = 16)]
        starts: usize,
        #[arg(long, default_value_t = 4000)]
        budget: usize,
    },
    /// Linear isometry group of a polytope (other specs are approximated)
    Iso { spec: PathBuf },
    /// Nearby polytope norm with trivial isometry group
    Break {
        spec: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
    },
    /// Polyhedral approximation of a convex spec on the grid
    Approx { spec: PathBuf },
    /// Limit of a Cauchy sequence of specs, as a profile spec
    Limit {
        #[arg(required = true, num_args = 2..)]
        specs: Vec<PathBuf>,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Unit spheres of planar specs as SVG or CSV
    Plot {
        #[arg(required = true)]
        specs: Vec<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let g = cli.global;
    let cfg = RunConfig {
        grid: g.grid,
        seed: g.seed,
        polish: !g.no_polish,
        out: g.out,
        format: g.format,
    };
    match cli.command {
        Command::Dist { x, y } => commands::dist(&cfg, &x, &y),
        Command::Eval { spec, at } => commands::eval(&cfg, &spec, &at),
        Command::Interp { x, y, theta } => commands::op(&cfg, Op::Interp(theta), &[x, y]),
        Command::Opposite { x } => commands::op(&cfg, Op::Opposite, &[x]),
        Command::Scale { x, theta } => commands::op(&cfg, Op::Scale(theta), &[x]),
        Command::Add { x, y } => commands::op(&cfg, Op::Add, &[x, y]),
        Command::Mean { x, y } => commands::op(&cfg, Op::Mean, &[x, y]),
        Command::Axioms { specs } => commands::axioms(&cfg, &specs),
        Command::Bm {
            x,
            y,
            starts,
            budget,
        } => commands::bm(&cfg, &x, &y, starts, budget),
        Command::Iso { spec } => commands::iso(&cfg, &spec),
        Command::Break { spec, epsilon } => commands::brk(&cfg, &spec, epsilon),
        Command::Approx { spec } => commands::approx(&cfg, &spec),
        Command::Limit { specs, tol } => commands::limit(&cfg, &specs, tol),
        Command::Plot { specs } => commands::plot(&cfg, &specs),
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.stdout.as_bytes());
            let _ = stdout.flush();
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    };
    std::process::exit(code);
}
