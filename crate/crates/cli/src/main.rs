mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use daha_opuc::algebra::Sector;
use daha_opuc::askey_wilson::AwFamily;
use daha_opuc::interval::{Identity, IntervalFamily};
use daha_opuc::opuc::Family;
use daha_opuc::suite::Preset;
use daha_opuc::truncation::TruncationKind;
use daha_opuc::Mode;

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "daha-opuc", version, about = "DAHA representation, OPUC/OPRL families and algebra checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// β₁,β₂,β₃,β₄ (defaults to 0.6,0.5,-0.5,-0.4; ignored in free mode)
    #[arg(long, global = true, value_parser = parse_beta, allow_hyphen_values = true)]
    pub beta: Option<[f64; 4]>,
    #[arg(long, global = true)]
    pub q: Option<f64>,
    /// infinite | finite | free
    #[arg(long, global = true)]
    pub mode: Option<Mode>,
    /// JSON document with fields `beta`, `q`, `mode`; flags override it
    #[arg(long, global = true)]
    pub params: Option<PathBuf>,
    /// Matrix size / degree bound
    #[arg(long, global = true, default_value_t = 64)]
    pub n: usize,
    /// Seed for sampled points and random draws
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (default: $DAHA_OPUC_OUT/<command>.<ext>, else stdout)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Pad an odd-sized section with the scalar boundary block
    #[arg(long, global = true)]
    pub allow_partial_block: bool,
    /// Tolerance override, `name=value` (repeatable)
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    pub tol: Vec<(String, f64)>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Reflections, Hecke generators and their relations
    #[command(subcommand)]
    Daha(DahaCmd),
    /// Szegő polynomials and the CMV operator
    #[command(subcommand)]
    Opuc(OpucCmd),
    /// Interval families, Christoffel identities and spectral measures
    #[command(subcommand)]
    Interval(IntervalCmd),
    /// Askey–Wilson polynomials
    #[command(subcommand)]
    Aw(AwCmd),
    /// X, Y operators and the AW(3) relations
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Finite-dimensional truncations
    #[command(subcommand)]
    Trunc(TruncCmd),
    /// Plot-ready two/three-column CSV tables
    Plot {
        #[arg(long)]
        what: PlotWhat,
        /// Interval family for `nodes`
        #[arg(long, default_value = "s1")]
        family: IntervalFamily,
        /// Truncation condition for `spectrum`
        #[arg(long, default_value = "b1b4")]
        kind: TruncationKind,
        #[arg(long, default_value_t = 3)]
        m: usize,
    },
    /// Run a whole regression preset
    Suite {
        #[arg(long)]
        preset: Preset,
        /// Random infinite-mode draws for the relation checks
        #[arg(long, default_value_t = 100)]
        draws: usize,
        /// Random draws added to the Askey–Wilson identification
        #[arg(long, default_value_t = 10)]
        aw_draws: usize,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum PlotWhat {
    /// n, a_n, alpha_n
    Coefficients,
    /// s, theta_s, rho_s of a truncation
    Spectrum,
    /// k, x_k, w_k of an interval spectral measure
    Nodes,
}

#[derive(Subcommand, Debug)]
pub enum DahaCmd {
    /// Dump R1..R4 or T1..T4 as a matrix
    Build {
        /// R1..R4 | T1..T4
        #[arg(long)]
        which: String,
    },
    /// Check a relation: product | derivation | involution
    Verify {
        #[arg(long)]
        check: DahaCheck,
    },
    /// Coefficient table n, a_n, r_n, alpha_n, rho_n, z_n
    Coeffs,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum DahaCheck {
    Product,
    Derivation,
    Involution,
}

#[derive(Subcommand, Debug)]
pub enum OpucCmd {
    /// Monic Szegő polynomials up to degree N
    Phi {
        #[arg(long, default_value = "a")]
        family: Family,
        /// Evaluate at re,im instead of listing coefficients
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        at: Option<(f64, f64)>,
    },
    /// CMV operator U = ML
    Cmv {
        #[arg(long, default_value = "a")]
        family: Family,
        /// Check orthogonality of U and the involutions L, M
        #[arg(long)]
        check: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum IntervalCmd {
    /// Recurrence coefficients b_n, u_n
    Rec {
        #[arg(long)]
        family: IntervalFamily,
    },
    /// Check a Christoffel or split identity at 20 seeded points
    Check {
        #[arg(long)]
        identity: Identity,
    },
    /// Nodes and weights of the N-point spectral measure
    Nodes {
        #[arg(long, default_value = "s1")]
        family: IntervalFamily,
    },
}

#[derive(Subcommand, Debug)]
pub enum AwCmd {
    /// Monic Askey–Wilson polynomial and recurrence value at x
    Eval {
        #[arg(long, default_value = "p1")]
        family: AwFamily,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
    /// Compare a recurrence family with its Askey–Wilson expression
    Identify {
        #[arg(long)]
        family: AwFamily,
        #[arg(long, default_value_t = 10)]
        nmax: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Spectrum y_0..y_N
    Spectrum,
}

#[derive(Subcommand, Debug)]
pub enum AlgebraCmd {
    /// Structure of the X, Y pair in the diagonalizing basis
    Xy,
    /// AW(3) structure constants of one parity sector
    Fit {
        #[arg(long)]
        sector: Sector,
    },
    /// Casimir at the free point
    Casimir,
    /// Both sectors combined into the centrally extended relations
    Central,
}

#[derive(Args, Debug, Clone)]
pub struct TruncArgs {
    /// b1b4 | b2b3 | even:i,k | forbidden
    #[arg(long)]
    pub kind: TruncationKind,
    /// Order of the condition
    #[arg(long)]
    pub m: usize,
    /// The three unconstrained β's in ascending index order
    #[arg(long = "free-betas", value_parser = parse_three, allow_hyphen_values = true)]
    pub free_betas: Option<[f64; 3]>,
}

#[derive(Subcommand, Debug)]
pub enum TruncCmd {
    /// Solve the truncation condition for β
    Solve(TruncArgs),
    /// Eigenvalues θ_s and weights ρ_s of the finite U
    Spectrum(TruncArgs),
    /// Finite orthogonality of the Szegő polynomials
    Orth(TruncArgs),
}

fn parse_floats<const K: usize>(s: &str) -> Result<[f64; K], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|v: Vec<f64>| format!("expected {K} comma-separated numbers, got {}", v.len()))
}

fn parse_beta(s: &str) -> Result<[f64; 4], String> {
    parse_floats::<4>(s)
}

fn parse_three(s: &str) -> Result<[f64; 3], String> {
    parse_floats::<3>(s)
}

fn parse_complex(s: &str) -> Result<(f64, f64), String> {
    parse_floats::<2>(s).map(|[a, b]| (a, b))
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| "expected name=value".to_string())?;
    let v: f64 = v.parse().map_err(|e| format!("`{v}`: {e}"))?;
    if !(v > 0.0) {
        return Err(format!("tolerance for `{k}` must be positive"));
    }
    Ok((k.to_string(), v))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
