//! Command-line front end: semigroup info, ideal-expression evaluation,
//! star-operation enumeration and lattice diagrams, topology reports, and
//! the property-verification driver.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error,
//! 3 resource cap exceeded.

use clap::{Parser, Subcommand};
use serde_json::json;

use hstar::enumerate::{default_cache_dir, enumerate_stars_cached, EnumerateError};
use hstar::expr::{eval_str, ExprError};
use hstar::ideal::IdealError;
use hstar::semigroup::NumericalSemigroup;
use hstar::star::{Comparison, StarContext, StarError};
use hstar::topology::FiniteSpace;
use hstar::verify::{run_suite, Suite};

#[derive(Parser)]
#[command(name = "hstar", version, about = "Star operations on numerical semigroup rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Semigroup summary: gaps, Frobenius number, poset and lattice sizes.
    Info {
        /// Comma-separated generators, e.g. 3,5,7
        #[arg(long, value_delimiter = ',', required = true)]
        gens: Vec<u64>,
    },
    /// Evaluate an ideal expression, e.g. "(v {4})".
    Ideal {
        #[arg(long, value_delimiter = ',', required = true)]
        gens: Vec<u64>,
        #[arg(long)]
        expr: String,
    },
    /// Star-operation lattice commands.
    Star {
        #[command(subcommand)]
        command: StarCommand,
    },
    /// Topological report on the space of star operations.
    Topology {
        #[arg(long, value_delimiter = ',', required = true)]
        gens: Vec<u64>,
    },
    /// Run a named property suite.
    Verify {
        #[arg(long, value_delimiter = ',', required = true)]
        gens: Vec<u64>,
        /// axioms | extension | stable | lattice | topology | dm | all
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum StarCommand {
    /// Enumerate all star operations as JSON.
    Enum {
        #[arg(long, value_delimiter = ',', required = true)]
        gens: Vec<u64>,
    },
    /// Emit the Hasse diagram of the operation lattice as DOT.
    Lattice {
        #[arg(long, value_delimiter = ',', required = true)]
        gens: Vec<u64>,
    },
}

const EXIT_VERIFY: i32 = 1;
const EXIT_INPUT: i32 = 2;
const EXIT_CAP: i32 = 3;

#[derive(Debug)]
struct CmdError {
    code: i32,
    message: String,
}

impl CmdError {
    fn input(message: impl Into<String>) -> Self {
        CmdError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<hstar::SemigroupError> for CmdError {
    fn from(e: hstar::SemigroupError) -> Self {
        CmdError::input(e.to_string())
    }
}

impl From<StarError> for CmdError {
    fn from(e: StarError) -> Self {
        let code = match &e {
            StarError::Ideal(IdealError::PosetTooLarge(_)) => EXIT_CAP,
            _ => EXIT_INPUT,
        };
        CmdError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<EnumerateError> for CmdError {
    fn from(e: EnumerateError) -> Self {
        let code = match &e {
            EnumerateError::SearchTooLarge { .. } => EXIT_CAP,
            _ => EXIT_INPUT,
        };
        CmdError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<ExprError> for CmdError {
    fn from(e: ExprError) -> Self {
        CmdError::input(e.to_string())
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.code);
        }
    }
}

fn context(gens: &[u64]) -> Result<StarContext, CmdError> {
    let sg = NumericalSemigroup::new(gens)?;
    Ok(StarContext::new(&sg)?)
}

fn run(cli: Cli) -> Result<i32, CmdError> {
    match cli.command {
        Command::Info { gens } => {
            let ctx = context(&gens)?;
            let stars = enumerate_stars_cached(&ctx, &default_cache_dir())?;
            let mut out = ctx.sg.to_json();
            out["poset"] = json!(ctx.poset.len());
            out["stars"] = json!(stars.len());
            println!("{out}");
            Ok(0)
        }
        Command::Ideal { gens, expr } => {
            let ctx = context(&gens)?;
            let ideal = eval_str(&ctx, &expr)?;
            println!("{}", ideal.to_json(&ctx.sg));
            Ok(0)
        }
        Command::Star { command } => match command {
            StarCommand::Enum { gens } => {
                let ctx = context(&gens)?;
                let stars = enumerate_stars_cached(&ctx, &default_cache_dir())?;
                println!(
                    "{}",
                    serde_json::to_string(&stars).expect("star tables serialize")
                );
                Ok(0)
            }
            StarCommand::Lattice { gens } => {
                let ctx = context(&gens)?;
                let stars = enumerate_stars_cached(&ctx, &default_cache_dir())?;
                let space = FiniteSpace::build(&ctx, stars);
                print!("{}", space.dot_hasse(&ctx));
                Ok(0)
            }
        },
        Command::Topology { gens } => {
            let ctx = context(&gens)?;
            let stars = enumerate_stars_cached(&ctx, &default_cache_dir())?;
            let space = FiniteSpace::build(&ctx, stars);
            let report = space.spectral_report();
            let closure_eq_downset = (0..space.len()).all(|q| {
                let closure = space.point_closure(q);
                (0..space.len()).all(|p| {
                    closure.contains(p)
                        == matches!(
                            ctx.compare(&space.points[p], &space.points[q]),
                            Comparison::LessEqual | Comparison::Equal
                        )
                })
            });
            let pass = report.t0 && report.spectral && closure_eq_downset;
            let out = json!({
                "t0": report.t0,
                "spectral": report.spectral,
                "closure_eq_downset": closure_eq_downset,
                "points": report.points,
                "opens": report.opens,
            });
            println!("{out}");
            Ok(if pass { 0 } else { EXIT_VERIFY })
        }
        Command::Verify { gens, suite, seed } => {
            let suite =
                Suite::parse(&suite).ok_or_else(|| CmdError::input(format!(
                    "unknown suite {suite:?} (expected axioms|extension|stable|lattice|topology|dm|all)"
                )))?;
            let ctx = context(&gens)?;
            let stars = enumerate_stars_cached(&ctx, &default_cache_dir())?;
            let checks = run_suite(&ctx, &stars, suite, seed);
            println!(
                "{}",
                serde_json::to_string(&checks).expect("check reports serialize")
            );
            let pass = checks.iter().all(|c| c.pass);
            Ok(if pass { 0 } else { EXIT_VERIFY })
        }
    }
}
