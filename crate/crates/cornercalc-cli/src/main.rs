//! Command-line interface to the corner calculus.
//!
//! Every subcommand reads JSON documents, performs one exact computation,
//! and writes a deterministic report — JSON by default, Graphviz DOT for
//! operations with a face graph. Exit codes are scriptable: 0 for success,
//! 2 when a check computes a negative verdict, 1 for invalid inputs.

mod docs;
mod dot;
mod ops;
mod render;
mod sigma;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "cornercalc",
    version,
    about = "Exact combinatorics of manifolds with ordered and fibered corners"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed recorded in the report, for reproducing harness-driven runs.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Report destination; stdout when omitted. CORNERCALC_OUT_DIR, when
    /// set, prefixes relative paths.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format; DOT is available for operations with a face graph.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Min,
    Max,
    Relative,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum XiEnd {
    Maximal,
    Minimal,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Edge,
    Wedge,
    Phi,
}

#[derive(Subcommand)]
enum Command {
    /// Check the ordered-corners axioms and report any violations.
    Validate {
        /// Space document to check.
        space: PathBuf,
    },
    /// Ordered product of two spaces, with its face dictionary.
    Product {
        x: PathBuf,
        y: PathBuf,
        /// Factor convention: `min`/`max` insist both factor interiors are
        /// minimal respectively maximal; `relative` accepts any orders.
        #[arg(long, value_enum)]
        variant: Option<Variant>,
    },
    /// Join two spaces across fresh cone faces.
    Join {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, value_enum, default_value_t = Variant::Min)]
        variant: Variant,
        /// With `--variant relative`: left-factor hypersurfaces placed
        /// below the cone interior (comma separated; the rest go above).
        #[arg(long)]
        left_below: Option<String>,
        /// With `--variant relative`: right-factor counterpart of
        /// --left-below.
        #[arg(long)]
        right_below: Option<String>,
        /// With `--variant relative`: end at which the left fresh face sits.
        #[arg(long, value_enum, default_value_t = XiEnd::Maximal)]
        left_xi: XiEnd,
        /// With `--variant relative`: end at which the right fresh face sits.
        #[arg(long, value_enum, default_value_t = XiEnd::Maximal)]
        right_xi: XiEnd,
    },
    /// Cone on a space: adjoin a fresh boundary face.
    Cone {
        space: PathBuf,
        /// Label of the fresh face.
        #[arg(long, default_value = "xi")]
        xi: String,
        #[arg(long, value_enum, default_value_t = Variant::Min)]
        variant: Variant,
        /// With `--variant relative`: hypersurfaces placed below the cone
        /// interior (comma separated; the rest go above).
        #[arg(long)]
        below: Option<String>,
        /// With `--variant relative`: end at which the fresh face sits.
        #[arg(long, value_enum, default_value_t = XiEnd::Maximal)]
        xi_end: XiEnd,
    },
    /// Blow up corner faces and report the refined fans.
    Blowup {
        space: PathBuf,
        /// Extra centers after the document's own, e.g. "h2*h3,h1*h2+h3":
        /// commas separate centers, '*' separates the generators of one
        /// center, '+' sums hypersurface labels inside one generator.
        #[arg(long)]
        centers: Option<String>,
    },
    /// Check whether a boundary map lifts through blow-ups of its codomain.
    LiftCheck {
        map: PathBuf,
        /// Extra codomain centers after the document's own.
        #[arg(long)]
        centers: Option<String>,
    },
    /// Smoothness of rational monomial combinations on a blown-up space.
    SigmaCheck {
        space: PathBuf,
        /// Combinations like "r1/r2,ra^2*rb/rc": atoms `r<label>` with
        /// optional integer powers, joined by '*'; one optional '/' starts
        /// the denominator; commas separate combinations.
        #[arg(long)]
        sigmas: String,
    },
    /// Check that combinations jointly cut out an interior p-submanifold.
    PsubCheck {
        space: PathBuf,
        #[arg(long)]
        sigmas: String,
    },
    /// Fiber product of two boundary maps with a common codomain.
    FiberProduct { f: PathBuf, g: PathBuf },
    /// Compactify a linear subspace arrangement into an ordered space.
    Manybody { arrangement: PathBuf },
    /// Compare the compactified product of two arrangements with the
    /// ordered product of their compactifications.
    MbProductCheck { a: PathBuf, b: PathBuf },
    /// Verify a boundary frame splitting table, or print a frame.
    FramesVerify {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Boundary depth of the chart.
        #[arg(long)]
        n: usize,
        /// Collapse degree: verify the splitting at this level.
        #[arg(long)]
        k: Option<usize>,
    },
}

fn main() -> ExitCode {
    // Usage errors are input errors (exit 1); help and version exit 0.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = u8::from(err.use_stderr());
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let outcome = ops::execute(&cli.command)?;
    let text = match cli.format {
        Format::Json => {
            let report = docs::report(
                outcome.operation,
                &outcome.digest,
                cli.seed,
                outcome.verdict,
                outcome.outputs,
            );
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            text
        }
        Format::Dot => dot::render(outcome.poset.as_ref().with_context(|| {
            format!("{} has no face graph to draw", outcome.operation)
        })?),
    };
    write_output(cli.out.as_deref(), &text)?;
    Ok(if outcome.verdict == Some(false) {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    let Some(path) = out else {
        print!("{text}");
        return Ok(());
    };
    let path = match std::env::var_os("CORNERCALC_OUT_DIR") {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}
