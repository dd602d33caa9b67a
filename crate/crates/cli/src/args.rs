use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use wenods::Scheme;

/// WENO-JS / WENO-Z / WENO-DS solver for 2D Riemann problems.
#[derive(Debug, Parser)]
#[command(name = "wenods", version)]
pub struct Cli {
    /// JSON file with default values for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample Riemann problems and store fine-grid reference trajectories.
    Generate(GenerateArgs),
    /// Solve one problem and write the final fields.
    Solve(SolveArgs),
    /// Compute a fine-grid WENO-Z reference solution.
    Reference(ReferenceArgs),
    /// Compare two schemes against a reference solution.
    Compare(CompareArgs),
}

/// `NxM` grid size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GridSize {
    pub nx: usize,
    pub ny: usize,
}

impl FromStr for GridSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("grid `{s}` is not of the form NxM"))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| format!("grid `{s}`: `{t}` is not a positive integer"))
        };
        Ok(Self {
            nx: parse(a)?,
            ny: parse(b)?,
        })
    }
}

impl TryFrom<String> for GridSize {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<GridSize> for String {
    fn from(g: GridSize) -> Self {
        g.to_string()
    }
}

impl std::fmt::Display for GridSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.nx, self.ny)
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GenerateArgs {
    /// Riemann configuration: 2, 3 or 16.
    #[arg(long)]
    pub tag: Option<u8>,
    /// Number of problems [default: 50].
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fine grid size per direction [default: 400].
    #[arg(long)]
    pub fine: Option<usize>,
    /// Store a snapshot every N steps [default: 1].
    #[arg(long)]
    pub every: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SolveArgs {
    /// Built-in initial condition name or a JSON spec file.
    #[arg(long)]
    pub ic: Option<String>,
    /// Grid size [default: 100x100].
    #[arg(long)]
    pub grid: Option<GridSize>,
    /// js, z, ds-js or ds-z [default: z].
    #[arg(long)]
    pub scheme: Option<Scheme>,
    /// CNN weight file for the DS schemes [env: WENO_DS_WEIGHTS].
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Weight regularization epsilon [default: 1e-6].
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Reference directory to evaluate the final fields against.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Also export CSV files.
    #[arg(long)]
    pub csv: Option<bool>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ReferenceArgs {
    #[arg(long)]
    pub ic: Option<String>,
    /// Fine grid size [default: 400x400].
    #[arg(long)]
    pub grid: Option<GridSize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CompareArgs {
    #[arg(long)]
    pub ic: Option<String>,
    /// Comma-separated grid sizes [default: 50x50,100x100,200x200].
    #[arg(long, value_delimiter = ',')]
    pub grids: Option<Vec<GridSize>>,
    /// Baseline scheme [default: z].
    #[arg(long)]
    pub baseline: Option<Scheme>,
    /// Candidate scheme [default: ds-z].
    #[arg(long)]
    pub scheme: Option<Scheme>,
    #[arg(long)]
    pub weights: Option<PathBuf>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Fill every unset field of `self` from `file`.
pub trait Merge: Sized {
    fn merge(self, file: Self) -> Self;
}

macro_rules! merge_fields {
    ($t:ty { $($f:ident),* }) => {
        impl Merge for $t {
            fn merge(self, file: Self) -> Self {
                Self { $($f: self.$f.or(file.$f)),* }
            }
        }
    };
}

merge_fields!(GenerateArgs { tag, count, seed, fine, every, out });
merge_fields!(SolveArgs { ic, grid, scheme, weights, eps, out, reference, csv });
merge_fields!(ReferenceArgs { ic, grid, out });
merge_fields!(CompareArgs { ic, grids, baseline, scheme, weights, eps, reference, out });
