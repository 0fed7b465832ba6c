//! `obstructor` command-line front end.
//!
//! Every subcommand prints one JSON document on stdout. Exit status is 0 on
//! success, 1 when a verification fails and 2 for usage or input errors.

mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use obstructor::witness::{DEFAULT_BOUND, DEFAULT_SEED, DEFAULT_TRIES};

#[derive(Parser, Debug)]
#[command(name = "obstructor", version, about = "Exact checks for loop-composition subrngs and their obstructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Replay the identity chain, ramification and divisor example.
    Verify {
        #[arg(long, required_unless_present = "all", conflicts_with = "all", value_parser = clap::value_parser!(u64).range(1..))]
        g: Option<u64>,
        #[arg(long, default_value_t = 2, value_parser = parse_prime)]
        p: u64,
        /// Run g = 1..=5.
        #[arg(long)]
        all: bool,
        /// Treat documented sign discrepancies as failures.
        #[arg(long)]
        strict: bool,
        /// Seed for the g = 1 sampling.
        #[arg(long, env = "OBSTRUCTOR_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Compute E_i for a graph file and classify it.
    Obstruction {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        vertex: u64,
        /// Also span all loops of at most this many edges and compare.
        #[arg(long)]
        oracle_len: Option<usize>,
    },
    /// Sample x in M_g(D_p) until x and its dual generate.
    FindGenerator {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        g: u64,
        #[arg(long, value_parser = parse_prime)]
        p: u64,
        #[arg(long, env = "OBSTRUCTOR_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TRIES)]
        tries: usize,
        #[arg(long, default_value_t = DEFAULT_BOUND, value_parser = clap::value_parser!(i64).range(1..))]
        bound: i64,
    },
    /// Decide whether a subspace is a corner pAp.
    Corner {
        #[arg(long)]
        input: PathBuf,
    },
    /// Local Hilbert symbols of (a, b).
    Hilbert {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// A single place (a prime or `inf`); default is every relevant place.
        #[arg(long)]
        place: Option<String>,
    },
    /// Multihomogeneous polynomial checks on (P^1)^r.
    Divisor {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        r: u64,
        /// Exponents of the power cover, e.g. `2,2,2`.
        #[arg(long, value_delimiter = ',')]
        subst: Option<Vec<u32>>,
        /// Fibres `i:[a:b]`; every pair on distinct factors is tested.
        #[arg(long, num_args = 1..)]
        fiber: Vec<String>,
        /// Factors of the (substituted) polynomial, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        factors: Vec<String>,
    },
    /// Emit the graph of one of the explicit constructions.
    Construct {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        g: u64,
        #[arg(long, value_parser = parse_prime)]
        p: u64,
        #[arg(long, env = "OBSTRUCTOR_SEED")]
        seed: Option<u64>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    R3,
    R4,
}

fn parse_prime(s: &str) -> Result<u64, String> {
    let p: u64 = s.parse().map_err(|e| format!("{e}"))?;
    if obstructor::algebra::is_prime(p) {
        Ok(p)
    } else {
        Err(format!("{p} is not prime"))
    }
}

/// How a command ended, before it is turned into an exit code.
enum Outcome {
    Passed,
    Failed,
}

fn run(cli: Cli) -> obstructor::Result<(String, Outcome)> {
    match cli.command {
        Command::Verify {
            g,
            p,
            all,
            strict,
            seed,
        } => {
            let gs: Vec<usize> = if all { (1..=5).collect() } else { vec![g.unwrap_or(2) as usize] };
            report::verify(&gs, p, strict, seed)
        }
        Command::Obstruction {
            graph,
            vertex,
            oracle_len,
        } => report::obstruction(&read(&graph)?, vertex as usize, oracle_len),
        Command::FindGenerator {
            g,
            p,
            seed,
            tries,
            bound,
        } => report::find_generator(g as usize, p, seed, tries, bound),
        Command::Corner { input } => report::corner(&read(&input)?),
        Command::Hilbert { a, b, place } => report::hilbert(&a, &b, place.as_deref()),
        Command::Divisor {
            poly,
            r,
            subst,
            fiber,
            factors,
        } => report::divisor(&poly, r as usize, subst.as_deref(), &fiber, &factors),
        Command::Construct { kind, g, p, seed } => report::construct(kind == Kind::R4, g as usize, p, seed),
    }
}

fn read(path: &PathBuf) -> obstructor::Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| obstructor::Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok((json, outcome)) => {
            // a closed pipe is not worth a panic
            let _ = writeln!(std::io::stdout().lock(), "{json}");
            match outcome {
                Outcome::Passed => ExitCode::SUCCESS,
                Outcome::Failed => ExitCode::from(1),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
