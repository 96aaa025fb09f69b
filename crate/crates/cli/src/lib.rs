//! Command-line front end for `maxshare-core`: parse a λletrec term, then
//! print it, unfold it, translate it into a term graph, compact it or
//! compare it with another term.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};

use clap::{ArgAction, Parser, Subcommand};
use maxshare_core::{
    bounded_unfold, collapse, garbage_collect, infer_abspre, parse, print, to_dot, translate_fo,
    try_maximal_shared_form, unfolding_equivalent, GraphError, ParseError, ReadbackError,
    Semantics, SharingOptions, Term, TermGraph,
};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(
    name = "maxshare",
    version,
    about = "Maximal sharing for λletrec terms"
)]
pub struct Cli {
    /// Write output to this file instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// A term file; `-` or an omitted path reads stdin.
#[derive(Debug, Clone, clap::Args)]
pub struct Input {
    #[arg(default_value = "-")]
    pub file: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the parsed term.
    Show(Input),
    /// Remove unused bindings.
    Gc(Input),
    /// Print the unfolding truncated at a depth.
    Unfold {
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[command(flatten)]
        input: Input,
    },
    /// Print the first-order term graph.
    Translate {
        #[arg(long, default_value_t = Semantics::Max)]
        semantics: Semantics,
        #[command(flatten)]
        input: Input,
    },
    /// Print the first-order term graph in Graphviz format.
    Dot {
        #[arg(long, default_value_t = Semantics::Max)]
        semantics: Semantics,
        #[command(flatten)]
        input: Input,
    },
    /// Print the bisimulation collapse of the term graph.
    Collapse {
        #[arg(long, default_value_t = Semantics::Max)]
        semantics: Semantics,
        #[command(flatten)]
        input: Input,
    },
    /// Print the maximally shared form.
    Maxshare {
        /// Give every variable occurrence its own vertex before readback.
        #[arg(long, default_value_t = true, action = ArgAction::Set)]
        unshare_vars: bool,
        /// Give every reference to a scope delimiter its own copy.
        #[arg(long)]
        unshare_s: bool,
        #[command(flatten)]
        input: Input,
    },
    /// Decide whether two terms have the same infinite unfolding.
    Equiv { first: PathBuf, second: PathBuf },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("internal invariant violated: {0}")]
    Graph(#[from] GraphError),
    #[error("internal invariant violated: {0}")]
    Readback(#[from] ReadbackError),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. } | CliError::Write { .. } | CliError::Parse { .. } => 2,
            CliError::Graph(_) | CliError::Readback(_) => 3,
        }
    }
}

/// Text to print and the exit status of a successful run.
#[derive(Debug, PartialEq, Eq)]
pub struct Report {
    pub text: String,
    pub code: u8,
}

impl Report {
    fn ok(text: String) -> Report {
        Report { text, code: 0 }
    }
}

fn display(path: &Path) -> String {
    if path == Path::new("-") {
        "<stdin>".to_string()
    } else {
        path.display().to_string()
    }
}

fn load(path: &Path, stdin: &mut dyn Read) -> Result<Term, CliError> {
    let read_err = |source| CliError::Read {
        path: display(path),
        source,
    };
    let source = if path == Path::new("-") {
        let mut s = String::new();
        stdin.read_to_string(&mut s).map_err(read_err)?;
        s
    } else {
        fs::read_to_string(path).map_err(read_err)?
    };
    parse(&source).map_err(|source| CliError::Parse {
        path: display(path),
        source,
    })
}

/// A translation whose prefixes are re-derived, so a malformed graph is
/// reported instead of printed.
fn checked_graph(term: &Term, semantics: Semantics) -> Result<TermGraph, CliError> {
    let g = translate_fo(term, semantics);
    infer_abspre(&g)?;
    Ok(g)
}

/// Executes `cli`, reading `-` inputs from `stdin`. Output is returned,
/// not written.
pub fn run(cli: &Cli, stdin: &mut dyn Read) -> Result<Report, CliError> {
    let report = match &cli.command {
        Command::Show(input) => Report::ok(print(&load(&input.file, stdin)?)),
        Command::Gc(input) => Report::ok(print(&garbage_collect(&load(&input.file, stdin)?))),
        Command::Unfold { depth, input } => {
            Report::ok(bounded_unfold(&load(&input.file, stdin)?, *depth).to_string())
        }
        Command::Translate { semantics, input } => {
            let g = checked_graph(&load(&input.file, stdin)?, *semantics)?;
            Report::ok(g.dump().trim_end().to_string())
        }
        Command::Dot { semantics, input } => {
            let g = checked_graph(&load(&input.file, stdin)?, *semantics)?;
            let p = infer_abspre(&g)?;
            Report::ok(to_dot(&g, Some(&p)).trim_end().to_string())
        }
        Command::Collapse { semantics, input } => {
            let c = collapse(&checked_graph(&load(&input.file, stdin)?, *semantics)?);
            infer_abspre(&c)?;
            Report::ok(c.dump().trim_end().to_string())
        }
        Command::Maxshare {
            unshare_vars,
            unshare_s,
            input,
        } => {
            let opts = SharingOptions {
                unshare_vars: *unshare_vars,
                unshare_s: *unshare_s,
            };
            Report::ok(print(&try_maximal_shared_form(
                &load(&input.file, stdin)?,
                opts,
            )?))
        }
        Command::Equiv { first, second } => {
            let a = load(first, stdin)?;
            let b = load(second, stdin)?;
            if unfolding_equivalent(&a, &b) {
                Report::ok("equivalent".to_string())
            } else {
                Report {
                    text: "not equivalent".to_string(),
                    code: 1,
                }
            }
        }
    };
    Ok(report)
}

/// Writes `report` to the `-o` path or to stdout.
pub fn emit(cli: &Cli, report: &Report) -> Result<(), CliError> {
    let text = format!("{}\n", report.text);
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
