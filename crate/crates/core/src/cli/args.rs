use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use super::OUT_DIR_ENV;

#[derive(Debug, Parser)]
#[command(
    name = "mimetic",
    version,
    about = "Leapfrog wave solvers on mimetic staggered grids",
    long_about = "Leapfrog wave solvers on mimetic staggered grids.\n\n\
        Every run writes a time series CSV, an error CSV where one applies and a JSON report to the \
        output directory. Options may also come from a TOML file given with --config: one table per \
        subcommand, keys named like the long options. Flags on the command line win."
)]
pub struct Cli {
    /// TOML file with one table per subcommand.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Output directory (default `mimetic-out`).
    #[arg(long, global = true, env = OUT_DIR_ENV, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Prefix for output files (default: the subcommand name).
    #[arg(long, global = true)]
    pub tag: Option<String>,

    /// Record checks in the report but always exit 0 after a completed run.
    #[arg(long, global = true)]
    pub no_assert: bool,

    /// Print nothing but errors.
    #[arg(long, short, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scalar harmonic oscillator `u' = -w v`, `v' = w u`.
    Oscillator(OscillatorArgs),
    /// Leapfrog on a random dense adjoint pair with diagonal weights.
    System(SystemArgs),
    /// 1D wave equation with a material preset.
    Wave1d(Wave1dArgs),
    /// Convergence study for a 1D material preset.
    #[command(name = "wave1d-convergence")]
    Wave1dConvergence(ConvergenceArgs),
    /// 2D wave equation in the unit square started from an exact mode.
    Wave2d(Wave2dArgs),
    /// 3D scalar wave equation.
    Wave3d(Wave3dArgs),
    /// 3D Maxwell equations (Yee scheme) in a box.
    Maxwell(MaxwellArgs),
    /// 1D upwind transport of a density.
    Transport(TransportArgs),
    /// 1D explicit diffusion of a density.
    Diffusion(DiffusionArgs),
    /// Built-in verification suites.
    Verify(VerifyArgs),
    /// Error tables (k, Nx, dx, Er, p) for one or more 1D presets.
    #[command(name = "convergence-table")]
    ConvergenceTable(TableArgs),
    /// Print every subcommand's options as JSON.
    Schema,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Oscillator(_) => "oscillator",
            Self::System(_) => "system",
            Self::Wave1d(_) => "wave1d",
            Self::Wave1dConvergence(_) => "wave1d-convergence",
            Self::Wave2d(_) => "wave2d",
            Self::Wave3d(_) => "wave3d",
            Self::Maxwell(_) => "maxwell",
            Self::Transport(_) => "transport",
            Self::Diffusion(_) => "diffusion",
            Self::Verify(_) => "verify",
            Self::ConvergenceTable(_) => "convergence-table",
            Self::Schema => "schema",
        }
    }

    /// Output file prefix when `--tag` is not given.
    pub fn default_tag(&self) -> String {
        match self {
            Self::Verify(a) => {
                let suite = a
                    .suite
                    .to_possible_value()
                    .map(|v| v.get_name().to_string())
                    .unwrap_or_default();
                format!("verify-{suite}")
            }
            other => other.name().to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OscInit {
    Taylor,
    Exact,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OscillatorArgs {
    /// Angular frequency.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Time step.
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1.0)]
    pub u0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub v0: f64,
    /// How v at the first half step is found.
    #[arg(long, value_enum, default_value_t = OscInit::Taylor)]
    pub init: OscInit,
    /// Relative drift allowed in both conserved quantities.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Expected outcome of the stability probe.
    #[arg(long, value_enum, default_value_t = Expect::Stable)]
    pub expect: Expect,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SystemArgs {
    /// Dimension of Y.
    #[arg(long, default_value_t = 6)]
    pub rows: usize,
    /// Dimension of X.
    #[arg(long, default_value_t = 4)]
    pub cols: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Fraction of the step limit `2 / |A|`.
    #[arg(long, default_value_t = 0.9)]
    pub safety: f64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// Second order start: `oscillator` or `system`.
    #[arg(long, default_value = "oscillator")]
    pub taylor: String,
    #[arg(long, default_value_t = 1)]
    pub record_every: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Wave1dArgs {
    /// Material preset, e.g. `cmp:1`, `linear-rho:up`, `bump:2,2`, `pwl-tau:0.25,0.75,1,2`, `jump-tau:down`.
    #[arg(long, default_value = "cmp:1")]
    pub material: String,
    /// Primal points including both ends.
    #[arg(long, default_value_t = 65)]
    pub nx: usize,
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_final: f64,
    /// Target `s dt / dx` with `s` the largest wave speed; sets the step count.
    #[arg(long, default_value_t = 0.5)]
    pub courant: f64,
    /// Step count; overrides --courant.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Mode number of the initial sine.
    #[arg(long, default_value_t = 1)]
    pub mode: u32,
    /// `exact` (constant speed only), `taylor` or `auto`.
    #[arg(long, default_value = "auto")]
    pub start: String,
    #[arg(long, default_value_t = 1)]
    pub record_every: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Expect::Stable)]
    pub expect: Expect,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConvergenceArgs {
    /// Material preset (see `wave1d --help`).
    #[arg(long, default_value = "cmp:1")]
    pub case: String,
    /// Refinement levels as `lo..hi`; level k has 2^k + 1 points.
    #[arg(long, default_value = "4..8")]
    pub k: String,
    /// Final time: a number, `full-period`, `half-period` or `generic` (3/4 of a half period).
    #[arg(long, default_value = "generic")]
    pub r#final: String,
    /// `courant:R` for a fixed ratio, `pow2` or `pow2:F` for Nt = 2^(k+F).
    #[arg(long, default_value = "courant:0.5")]
    pub stepping: String,
    /// `analytic`, `refinement` or `auto`.
    #[arg(long, default_value = "auto")]
    pub measure: String,
    #[arg(long, default_value_t = 1)]
    pub mode: u32,
    /// Smallest acceptable order from the two finest levels.
    #[arg(long)]
    pub min_order: Option<f64>,
    /// Largest acceptable order from the two finest levels.
    #[arg(long)]
    pub max_order: Option<f64>,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TableArgs {
    /// Material preset; repeat for several tables.
    #[arg(long = "case", default_values_t = ["cmp:1".to_string(), "bump:2,2".to_string(), "jump-tau:up".to_string()])]
    pub cases: Vec<String>,
    #[arg(long, default_value = "4..8")]
    pub k: String,
    #[arg(long, default_value = "generic")]
    pub r#final: String,
    /// Nt = 2^(k+f); by default the smallest f with `s dt / dx <= 0.9`.
    #[arg(long)]
    pub f: Option<u32>,
    #[arg(long, default_value = "auto")]
    pub measure: String,
    #[arg(long, default_value_t = 1)]
    pub mode: u32,
    /// Smallest acceptable finest-pair order for every case.
    #[arg(long)]
    pub min_order: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Wave2dArgs {
    /// Cells per side of the unit square.
    #[arg(long, default_value_t = 32)]
    pub n: usize,
    /// Mode number along x.
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// Mode number along y.
    #[arg(long, default_value_t = 1)]
    pub mode_n: u32,
    /// Wave speed.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 0.5)]
    pub t_final: f64,
    /// Target `c dt sqrt(1/dx^2 + 1/dy^2)`.
    #[arg(long, default_value_t = 0.5)]
    pub cfl: f64,
    /// `exact` half-step velocity or `taylor`.
    #[arg(long, default_value = "exact")]
    pub start: String,
    #[arg(long, default_value_t = 1)]
    pub record_every: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryArg {
    Bounded,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Init3 {
    /// Lowest cavity mode of the unit cube.
    Cavity,
    /// Random fields from --seed.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitMaxwell {
    /// TE110 mode of the unit cube.
    Te110,
    /// Random fields from --seed; not divergence free.
    Random,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Wave3dArgs {
    /// Cells per side of the unit cube.
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    #[arg(long, default_value_t = 500)]
    pub steps: usize,
    /// `trivial3d`, `diag3d` or `variable3d`.
    #[arg(long, default_value = "trivial3d")]
    pub materials: String,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Bounded)]
    pub boundary: BoundaryArg,
    /// Fraction of the largest stable step.
    #[arg(long, default_value_t = 0.9)]
    pub safety: f64,
    #[arg(long, value_enum, default_value_t = Init3::Cavity)]
    pub init: Init3,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub record_every: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Write the final `s` as a binary field dump (relative paths go under the output directory).
    #[arg(long, value_name = "FILE")]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MaxwellArgs {
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    #[arg(long, default_value_t = 500)]
    pub steps: usize,
    /// `trivial3d`, `diag3d` or `variable3d`.
    #[arg(long, default_value = "trivial3d")]
    pub materials: String,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Bounded)]
    pub boundary: BoundaryArg,
    #[arg(long, default_value_t = 0.9)]
    pub safety: f64,
    #[arg(long, value_enum, default_value_t = InitMaxwell::Random)]
    pub init: InitMaxwell,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub record_every: usize,
    /// Relative drift allowed in the conserved quantities.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Allowed change in either divergence norm, relative to `max(initial value, sqrt(C_n) / h)`.
    #[arg(long, default_value_t = 1e-12)]
    pub audit_tol: f64,
    /// Write the final `E` as a binary field dump.
    #[arg(long, value_name = "FILE")]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// One on `|x - centre| < width / 2`.
    Square,
    /// All mass in the cell holding the centre.
    Spike,
    Gauss,
    Uniform,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TransportArgs {
    #[arg(long, default_value_t = 200)]
    pub cells: usize,
    /// Left end of the domain.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 2.0)]
    pub length: f64,
    #[arg(long, value_enum, default_value_t = Profile::Square)]
    pub profile: Profile,
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    pub centre: f64,
    #[arg(long, default_value_t = 0.4)]
    pub width: f64,
    /// `const:V`, `collapse` (v = -x) or `expand` (v = x).
    #[arg(long, default_value = "const:1")]
    pub velocity: String,
    /// `max |v| dt / dx`.
    #[arg(long, default_value_t = 1.0)]
    pub courant: f64,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// Relative change allowed in mass plus outflow.
    #[arg(long, default_value_t = 1e-13)]
    pub mass_tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DiffusionArgs {
    #[arg(long, default_value_t = 101)]
    pub cells: usize,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 2.0)]
    pub length: f64,
    #[arg(long, value_enum, default_value_t = Profile::Spike)]
    pub profile: Profile,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub centre: f64,
    #[arg(long, default_value_t = 0.4)]
    pub width: f64,
    /// `const:D` or `ramp` (D rises from 1 to 2 across the domain).
    #[arg(long, default_value = "const:1")]
    pub diffusivity: String,
    /// `max (D_e + D_{e+1}) dt / dx^2`.
    #[arg(long, default_value_t = 1.0)]
    pub number: f64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1e-13)]
    pub mass_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Exactness, adjoint identities, star round trips and operator order in 3D (and 2D order).
    Mimetic3d,
    /// The seven discrete adjoint identities.
    Adjoint,
    /// Summation by parts of the 1D operators for every material preset.
    #[value(name = "wave1d-sbp")]
    Wave1dSbp,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Flip the sign of the discrete gradient (the adjoint suite must then fail).
    #[arg(long)]
    pub broken_sign: bool,
    /// Random trials per check.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Cells per side for the adjoint suite.
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
}
