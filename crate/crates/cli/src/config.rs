use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gapfredholm::{EnsembleSpec, Family};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Gap probabilities, Fredholm eigenvalues and large-radius asymptotics of
/// Ginibre and chiral non-Hermitian random matrices.
#[derive(Debug, Parser)]
#[command(name = "gapfredholm", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// ginibre2, ginibre4, chiral2 or chiral4.
    #[arg(long, global = true, default_value = "ginibre2")]
    pub ensemble: String,
    /// Number of exact zero modes (chiral ensembles only).
    #[arg(long, global = true, default_value_t = 0)]
    pub nu: u32,
    /// Truncation threshold for the eigenvalue products.
    #[arg(long, global = true, default_value_t = 1e-15)]
    pub eps: f64,
    /// Relative quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the table here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// A grid of radii, either listed explicitly or spanned by `--min/--max/--count`.
#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Explicit grid values, comma separated.
    #[arg(long = "x", value_delimiter = ',', num_args = 1.., conflicts_with_all = ["min", "max"])]
    pub values: Vec<f64>,
    #[arg(long)]
    pub min: Option<f64>,
    #[arg(long)]
    pub max: Option<f64>,
    #[arg(long, default_value_t = 11)]
    pub count: usize,
    /// Space the points logarithmically.
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fredholm eigenvalues λ_j(x).
    Lambda {
        #[command(flatten)]
        grid: GridArgs,
        /// Number of eigenvalues per x; by default the `--eps` truncation decides.
        #[arg(long)]
        count_eigs: Option<usize>,
    },
    /// Gap probabilities E_0..E_k and log E_0.
    Gap {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
    },
    /// Radial distributions p_1..p_k on an s-grid, with their partial sum and the density.
    Pk {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 5)]
        kmax: usize,
        /// Number of eigenvalues kept in the products.
        #[arg(long, default_value_t = 8)]
        truncation: usize,
    },
    /// Angle-integrated density on an s-grid against Σ_k p_k.
    Density {
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Exact P(x) with its three-way split and the leading-order prediction.
    Asympt {
        #[command(flatten)]
        grid: GridArgs,
    },
    /// A12, A12* and S2 - M√x for the Ginibre β=2 ensemble (spanned grids are rounded to integers).
    Conjecture {
        #[command(flatten)]
        grid: GridArgs,
    },
    /// The constants M, C and the dilogarithm slope.
    Constants,
    /// Gap probability at general non-Hermiticity μ and finite N.
    Elliptic {
        /// Acknowledges that r is the unscaled finite-N radius.
        #[arg(long)]
        finite_n: bool,
        #[arg(long)]
        mu: f64,
        #[arg(long = "n")]
        n: usize,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Runs the invariant suite; exits with status 1 on any failure.
    Selfcheck {
        /// Multiplies every tolerance; values below 1 tighten the checks.
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
    },
}

/// Configuration problems map to exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl GlobalArgs {
    pub fn ensemble_spec(&self) -> Result<EnsembleSpec, ConfigError> {
        let family: Family = self.ensemble.parse().map_err(|e: gapfredholm::Error| ConfigError(e.to_string()))?;
        EnsembleSpec::new(family, self.nu).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [("eps", self.eps), ("tol", self.tol)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(ConfigError(format!("--{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }
}

impl GridArgs {
    pub fn points(&self) -> Result<Vec<f64>, ConfigError> {
        let pts = if !self.values.is_empty() {
            self.values.clone()
        } else {
            let (Some(min), Some(max)) = (self.min, self.max) else {
                return Err(ConfigError("give either --x or both --min and --max".into()));
            };
            if self.count == 0 {
                return Err(ConfigError("--count must be positive".into()));
            }
            if self.log && !(min > 0.0) {
                return Err(ConfigError("a log grid needs --min > 0".into()));
            }
            if self.count == 1 {
                vec![min]
            } else {
                let steps = (self.count - 1) as f64;
                (0..self.count)
                    .map(|i| {
                        let u = i as f64 / steps;
                        if i == 0 {
                            min
                        } else if i + 1 == self.count {
                            max
                        } else if self.log {
                            (min.ln() + u * (max.ln() - min.ln())).exp()
                        } else {
                            min + u * (max - min)
                        }
                    })
                    .collect()
            }
        };
        if pts.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(ConfigError("grid values must be finite and non-negative".into()));
        }
        if pts.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ConfigError("grid must be strictly increasing".into()));
        }
        Ok(pts)
    }

    pub fn describe(&self) -> String {
        if !self.values.is_empty() {
            let v: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
            v.join(";")
        } else {
            format!(
                "{}:{}:{}{}",
                self.min.unwrap_or(f64::NAN),
                self.max.unwrap_or(f64::NAN),
                self.count,
                if self.log { ":log" } else { "" }
            )
        }
    }
}
