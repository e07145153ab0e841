//! Command-line front end. Exit status: 0 when every check passes, 1 when a
//! check fails, 2 on bad input.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Obj,
}

#[derive(Debug, Parser)]
#[command(name = "conewright", version, about = "Holed trapezohedra, cone-manifold volumes and lifting obstructions")]
pub struct Cli {
    /// Output format; `obj` applies to `mesh-export` only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Check tolerance; each subcommand documents its default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Refinement level for geodesic-sphere meshes.
    #[arg(long, global = true, default_value_t = 5)]
    pub refine: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trapezohedron geometry, dihedral check and edge lengths.
    Build(ParamArgs),
    /// Dihedral angles `αᵢ` of a parameter `b`.
    Angles {
        #[arg(long, value_name = "q1,q2,q3,q4,t")]
        b: String,
    },
    /// Parameter `b` with prescribed angles.
    Invert {
        #[arg(long, value_name = "a1,a2,a3,a4", conflicts_with = "cosines", required_unless_present = "cosines")]
        alpha: Option<String>,
        #[arg(long, value_name = "c1,c2,c3,c4")]
        cosines: Option<String>,
    },
    /// Structure volume of a trapezohedron, or the volume of a geodesic sphere.
    Volume {
        #[arg(long, value_name = "q1,q2,q3,q4,t", conflicts_with = "sphere", required_unless_present = "sphere")]
        b: Option<String>,
        /// Radius of a geodesic sphere about (0, 0, 1).
        #[arg(long)]
        sphere: Option<f64>,
        /// Cross-check against direct quadrature (non-holed parameters only).
        #[arg(long)]
        quadrature: bool,
    },
    /// Finite-difference check of the Schläfli formula along a path.
    Schlafli {
        #[arg(long)]
        path: PathBuf,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    /// Edge-cycle check of a gluing (the built-in four-copy gluing by default).
    GlueCheck {
        #[arg(long, value_name = "q1,q2,q3,q4,t")]
        b: Option<String>,
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Framing group of a handle decomposition.
    Framing {
        #[arg(long)]
        handles: PathBuf,
        /// Compare the generators with brute-force enumeration.
        #[arg(long)]
        oracle: bool,
        /// Coordinate bound for the oracle.
        #[arg(long, default_value_t = 2)]
        bound: i64,
    },
    /// SL(2, C) lifting obstruction of a representation.
    LiftCheck {
        #[arg(long)]
        rep: PathBuf,
    },
    /// Cone-manifold conditions on a meridian/longitude pair.
    ConeCheck {
        /// Eight reals: Re/Im of a, b, c, d.
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Measure the angle about the reversed longitude axis.
        #[arg(long)]
        reversed: bool,
    },
    /// OBJ export of a boundary surface with an ideal-vertex sidecar.
    MeshExport {
        #[arg(long, value_name = "q1,q2,q3,q4,t", conflicts_with = "sphere", required_unless_present = "sphere")]
        b: Option<String>,
        #[arg(long)]
        sphere: Option<f64>,
        /// Height at which ideal vertices are drawn.
        #[arg(long, default_value_t = 10.0)]
        clip_height: f64,
        /// OBJ destination; the sidecar goes next to it with `.ideal.json` appended.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The acceptance suite.
    Acceptance {
        /// `all` or a criterion number from 1 to 10.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Include wall-clock timings (makes the output run-dependent).
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Debug, clap::Args)]
pub struct ParamArgs {
    #[arg(long, value_name = "q1,q2,q3,q4,t", conflicts_with = "alpha", required_unless_present = "alpha")]
    pub b: Option<String>,
    #[arg(long, value_name = "a1,a2,a3,a4")]
    pub alpha: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.body);
            ExitCode::from(if out.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
