use std::io::Write;
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use mealy_core::group::Budget;
use mealy_core::rewriting::Orientation;

mod commands;

/// Workbench for Mealy automata, automaton groups and quotient graphs.
#[derive(Parser)]
#[command(name = "mealy", version, about)]
struct Cli {
    /// Exit with status 3 when a result is budget-limited.
    #[arg(long, global = true)]
    strict: bool,

    #[command(flatten)]
    budget: BudgetArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BudgetArgs {
    /// Composite states a search may explore.
    #[arg(long, global = true, default_value = "1000000")]
    nodes: NonZeroUsize,

    /// Distinct group elements a search may keep.
    #[arg(long, global = true, default_value = "200000")]
    max_elements: NonZeroUsize,

    /// Wall-clock limit in milliseconds; results then depend on the machine.
    #[arg(long, global = true)]
    time_limit_ms: Option<NonZeroUsize>,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget {
            max_nodes: self.nodes.get(),
            max_elements: self.max_elements.get(),
            time_limit: self.time_limit_ms.map(|ms| Duration::from_millis(ms.get() as u64)),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Report invertibility, reversibility and bireversibility.
    Check { automaton: PathBuf },
    /// Print the inverse automaton.
    Invert { automaton: PathBuf },
    /// Print the dual automaton.
    Dual { automaton: PathBuf },
    /// Print the disjoint union of automata over one alphabet.
    Union {
        #[arg(required = true, num_args = 2..)]
        automata: Vec<PathBuf>,
    },
    /// Print the symmetrized automaton (states and their formal inverses).
    Symmetrize { automaton: PathBuf },
    /// Print the closure automaton of a set of state words.
    Subgroup {
        automaton: PathBuf,
        /// A generating state word; repeat for several.
        #[arg(long = "gen", required = true)]
        generators: Vec<String>,
    },
    /// Normal form of a mixed word in the fundamental group.
    Nf {
        automaton: PathBuf,
        #[arg(long)]
        word: String,
        /// `letters-first` (w h) or `states-first` (g v).
        #[arg(long, default_value = "letters-first")]
        orient: Orientation,
    },
    /// Action of a state word on a letter word.
    Act {
        automaton: PathBuf,
        #[arg(long)]
        states: String,
        #[arg(long)]
        letters: String,
        /// Print the residual state word instead of the image.
        #[arg(long)]
        residual: bool,
    },
    /// Decide equality of two state words in the automaton group.
    Equal { automaton: PathBuf, left: String, right: String },
    /// Ball sizes of the automaton group.
    Ball {
        automaton: PathBuf,
        #[arg(long)]
        radius: usize,
        #[command(flatten)]
        target: Target,
    },
    /// Enumerate the automaton group until closure.
    Enumerate {
        automaton: PathBuf,
        #[command(flatten)]
        target: Target,
        /// Print a representative of every element.
        #[arg(long)]
        list: bool,
    },
    /// Enumerate the group and its dual side by side.
    Finiteness { automaton: PathBuf },
    /// Test compatibility with a finite marked group.
    Compat { automaton: PathBuf, group: PathBuf },
    /// Print the quotient graph of a marked group as DOT.
    QuotientDot { group: PathBuf },
    /// Check that descended automaton automorphisms lie in Aut_1(X).
    MnsVerify {
        automaton: PathBuf,
        group: PathBuf,
        /// Radius of the ball of group elements to descend.
        #[arg(long, default_value = "4")]
        radius: usize,
        /// Largest graph for the automorphism search.
        #[arg(long, default_value = "64")]
        cap: usize,
    },
    /// Order of a state word, tried up to a bound.
    Order {
        automaton: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long, default_value = "10")]
        bound: usize,
        /// Word length used to certify that the order exceeds the bound.
        #[arg(long)]
        certify_depth: Option<usize>,
        #[command(flatten)]
        target: Target,
    },
    /// Word length over the symmetric state generators.
    Geodesic {
        automaton: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long, default_value = "8")]
        radius: usize,
        #[command(flatten)]
        target: Target,
    },
    /// Lengths of the powers g^(kn).
    Distortion {
        automaton: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long, default_value = "1")]
        step: NonZeroUsize,
        #[arg(long, default_value = "5")]
        n_max: NonZeroUsize,
        #[arg(long, default_value = "8")]
        radius: usize,
        /// Write `kn length` pairs for plotting.
        #[arg(long)]
        data: Option<PathBuf>,
        #[command(flatten)]
        target: Target,
    },
    /// Sample the orbits of the powers of a letter word.
    Orbit {
        automaton: PathBuf,
        #[arg(long)]
        seed: String,
        #[arg(long, default_value = "2")]
        n_max: usize,
        #[arg(long, default_value = "2")]
        gamma_len: usize,
    },
    /// Search for two words generating a free submonoid.
    FreeMonoid {
        automaton: PathBuf,
        #[arg(long)]
        seed: String,
        #[arg(long, default_value = "2")]
        n_max: usize,
        #[arg(long, default_value = "3")]
        gamma_len: usize,
        #[arg(long, default_value = "10")]
        order_bound: usize,
        #[arg(long, default_value = "3")]
        depth: NonZeroUsize,
    },
}

#[derive(Args, Clone)]
struct Target {
    /// Work in the dual group; words are then letter words.
    #[arg(long)]
    dual: bool,
    /// Write a JSON report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut out = String::new();
    let result = commands::run(&cli, &mut out);
    let _ = std::io::stdout().write_all(out.as_bytes());
    match result {
        Ok(commands::Outcome::Done) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Unknown) if cli.strict => ExitCode::from(3),
        Ok(commands::Outcome::Unknown) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
