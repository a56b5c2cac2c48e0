//! `lls`: build, audit and compare Lorentzian pre-length spaces from the
//! command line. Machine output is JSON on stdout (or `--out`), a short
//! human summary goes to stderr.
//!
//! Exit status: 0 when every check passes, 1 when a check fails (the report
//! carries the witness), 2 on usage or structural errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "lls", version, about = "Audit Lorentzian pre-length spaces")]
pub struct Cli {
    /// Absolute tolerance for real comparisons.
    #[arg(long, global = true, env = "LLS_ABS_TOL")]
    pub abs_tol: Option<f64>,
    /// Relative tolerance for real comparisons.
    #[arg(long, global = true, env = "LLS_REL_TOL")]
    pub rel_tol: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Suppress the summary on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    /// Causal-space and pre-length axioms.
    Axioms,
    /// Chronology, causality and strong causality.
    Ladder,
    /// Local causal closedness and causal path-connectedness.
    Closed,
    /// Localisability of the atlas.
    Localisable,
    /// τ agrees with the supremum of curve lengths.
    LengthSpace,
    /// Everything above.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Below,
    Above,
}

/// A region of the carrier: every point, or a Euclidean ball.
#[derive(Debug, Clone, Args)]
pub struct RegionArgs {
    /// Centre of the region, e.g. "(0,0)".
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<String>,
    /// Radius of the region.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Only triangles with x << y << z.
    #[arg(long)]
    pub timelike_only: bool,
    /// Stop after this many triangles.
    #[arg(long, default_value_t = 200_000)]
    pub max_triangles: usize,
}

#[derive(Debug, Clone, Args)]
pub struct CandidateArgs {
    #[arg(long)]
    pub base: PathBuf,
    #[arg(long)]
    pub ambient: PathBuf,
    /// Base-to-ambient id pairs; the inclusion by coordinates if omitted.
    #[arg(long)]
    pub map: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run axiom checks on a space file.
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        file: PathBuf,
    },
    /// Time separation between two points (ids or coordinate tuples).
    Tau {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
    },
    /// τ-length of a chain given as `;`-separated points or a curve file.
    Length {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "curve")]
        points: Option<String>,
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Maximal chain between two points and its geodesic verdict, or the
    /// verdict for a given chain.
    Geodesic {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true, requires = "to")]
        from: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        to: Option<String>,
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["from", "to"])]
        points: Option<String>,
    },
    /// Search for an inextendible timelike geodesic of finite length.
    Tc {
        file: PathBuf,
        #[arg(long, default_value_t = 50_000)]
        max_seeds: usize,
        #[arg(long, default_value_t = 10_000)]
        max_extensions: usize,
        /// Count exits through the sample boundary as inextendible.
        #[arg(long)]
        boundary_exits_count: bool,
    },
    /// Realize a comparison triangle in the model space of curvature K.
    Triangle {
        #[arg(long = "K", allow_hyphen_values = true)]
        k: f64,
        /// Side lengths "a,b,c" = τ(x,y), τ(y,z), τ(x,z).
        #[arg(long)]
        sides: String,
        /// Samples per side.
        #[arg(long, default_value_t = 11)]
        samples: usize,
    },
    /// Triangle comparison against M_K in one direction.
    Curvature {
        file: PathBuf,
        #[arg(long = "K", allow_hyphen_values = true)]
        k: f64,
        #[arg(long, value_enum)]
        direction: DirectionArg,
        #[command(flatten)]
        region: RegionArgs,
    },
    /// Both directions over a grid of K plus branching detection.
    Sweep {
        file: PathBuf,
        /// Comma-separated curvatures.
        #[arg(long = "K-grid", allow_hyphen_values = true, default_value = "-1,-0.5,0,0.5,1")]
        k_grid: String,
        #[command(flatten)]
        region: RegionArgs,
    },
    /// Audit an extension: clauses, τ-monotonicity, boundary, consistency.
    Extend {
        #[command(flatten)]
        cand: CandidateArgs,
    },
    /// Future and past boundary of the image of an extension.
    Boundary {
        #[command(flatten)]
        cand: CandidateArgs,
    },
    /// Build an exemplar space and write it as JSON.
    Build {
        /// minkowski_patch, model_patch, fan_space, punctured_patch,
        /// slit_patch, half_space_patch, toy_dag, timelike_cylinder.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        h: Option<f64>,
        /// "t0,t1,x0,x1".
        #[arg(long, allow_hyphen_values = true)]
        extent: Option<String>,
        /// Curvature of a model patch.
        #[arg(long = "K", allow_hyphen_values = true, default_value_t = 0.0)]
        k: f64,
        #[arg(long)]
        no_atlas: bool,
        #[arg(long)]
        ambient_complete: bool,
    },
    /// Poisson sprinkling of a model space, written as JSON.
    Sprinkle {
        #[arg(long)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "K", allow_hyphen_values = true, default_value_t = 0.0)]
        k: f64,
        /// "box:t0,t1,x0,x1" or "diamond:tc,xc,half".
        #[arg(long, allow_hyphen_values = true, default_value = "diamond:0,0,1")]
        region: String,
        #[arg(long)]
        no_atlas: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    commands::run(cli)
}
