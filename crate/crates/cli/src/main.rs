use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

use commands::{Ctx, Outcome};

#[derive(Parser, Debug)]
#[command(
    name = "pivotfun",
    version,
    about = "Verify and construct unitary pseudonatural transformations, Frobenius monoids and dagger bimodules"
)]
struct Cli {
    /// Relative tolerance for every residual check.
    #[arg(long, global = true, env = "PIVOTFUN_TOL", default_value_t = 1e-9)]
    tol: f64,

    /// Seed for randomized searches.
    #[arg(long, global = true, default_value_t = pivotfun::bimodule::DEFAULT_SEED)]
    seed: u64,

    /// Write the constructed artifact here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Emit JSON (the only format).
    #[arg(long, global = true, default_value_t = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Kind {
    Group,
    Rep,
    Functor,
    Frobenius,
    Bimodule,
    Upt,
    Modification,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify an artifact of the given kind.
    Check {
        path: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
    },
    /// Pair-of-pants monoid of a transformation.
    Pants { upt: PathBuf },
    /// Right dual of a transformation.
    Dual { upt: PathBuf },
    /// Dagger of a transformation.
    Dagger { upt: PathBuf },
    /// Decide or witness Morita equivalence of two monoids.
    Morita {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, num_args = 2, value_names = ["M", "N"])]
        witness: Option<Vec<PathBuf>>,
    },
    /// Equivalence to *-isomorphism and back.
    Roundtrip {
        a1: PathBuf,
        a2: PathBuf,
        e: PathBuf,
        tau: PathBuf,
    },
    /// Classify graded transformations out of the canonical functor.
    ClassifyUpt {
        group: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
    },
    /// Write the bundled example artifacts into a directory.
    Fixtures { dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let echo = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let ctx = match Ctx::new(echo, cli.tol, cli.seed, cli.out) {
        Ok(ctx) => ctx,
        Err(e) => return commands::emit_error(&e),
    };
    let result = match cli.command {
        Command::Check { path, kind } => commands::check(&ctx, &path, kind),
        Command::Pants { upt } => commands::pants(&ctx, &upt),
        Command::Dual { upt } => commands::dual(&ctx, &upt),
        Command::Dagger { upt } => commands::dagger(&ctx, &upt),
        Command::Morita { a, b, witness } => commands::morita(&ctx, &a, &b, witness.as_deref()),
        Command::Roundtrip { a1, a2, e, tau } => commands::roundtrip(&ctx, &a1, &a2, &e, &tau),
        Command::ClassifyUpt { group, max_dim } => commands::classify(&ctx, &group, max_dim),
        Command::Fixtures { dir } => commands::fixtures(&ctx, &dir),
    };
    match result {
        Ok(Outcome(code)) => code,
        Err(e) => commands::emit_error(&e),
    }
}
