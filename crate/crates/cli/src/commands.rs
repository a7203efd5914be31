use rayon::prelude::*;

use gapfredholm::asymptotics::{self, bounds};
use gapfredholm::density::sum_rule_density;
use gapfredholm::elliptic::{self, EllipticParams};
use gapfredholm::fredholm::{eigenvalues, spectrum};
use gapfredholm::gap::{ek_table, pk_at, pk_total, Truncation};
use gapfredholm::{EnsembleSpec, Error, Family};

use crate::config::{Command, ConfigError, GlobalArgs, GridArgs};
use crate::output::{Cell, Table};
use crate::selfcheck;

/// Failure of a subcommand, carrying its exit status.
#[derive(Debug)]
pub enum CmdError {
    Config(String),
    Numerical(Error),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Config(_) => 2,
            CmdError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::Config(m) => write!(f, "configuration error: {m}"),
            CmdError::Numerical(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

impl From<ConfigError> for CmdError {
    fn from(e: ConfigError) -> Self {
        CmdError::Config(e.0)
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameters(m) => CmdError::Config(m),
            other => CmdError::Numerical(other),
        }
    }
}

/// What a subcommand produced.
pub struct Outcome {
    pub table: Table,
    /// Number of failed checks (only `selfcheck` sets this).
    pub failures: usize,
}

type Rows = Vec<Vec<Cell>>;

fn base_config(g: &GlobalArgs, ens: Option<&EnsembleSpec>, command: &str) -> Vec<(String, String)> {
    let mut c = vec![("command".to_string(), command.to_string())];
    if let Some(e) = ens {
        c.push(("ensemble".into(), e.to_string()));
    }
    c.push(("eps".into(), format!("{:e}", g.eps)));
    c.push(("tol".into(), format!("{:e}", g.tol)));
    c
}

fn with_grid(mut c: Vec<(String, String)>, grid: &GridArgs) -> Vec<(String, String)> {
    c.push(("grid".into(), grid.describe()));
    c
}

/// Evaluates `f` at every grid point in parallel and keeps the grid order.
fn par_rows<F>(points: &[f64], f: F) -> Result<Rows, CmdError>
where
    F: Fn(f64) -> Result<Rows, CmdError> + Sync,
{
    let chunks: Vec<Rows> = points.par_iter().map(|&p| f(p)).collect::<Result<_, _>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

fn table(config: Vec<(String, String)>, columns: Vec<String>, rows: Rows) -> Outcome {
    let mut t = Table::new(config, columns);
    for r in rows {
        t.push(r);
    }
    Outcome { table: t, failures: 0 }
}

fn names(fixed: &[&str]) -> Vec<String> {
    fixed.iter().map(|s| s.to_string()).collect()
}

pub fn run(command: &Command, g: &GlobalArgs) -> Result<Outcome, CmdError> {
    g.validate()?;
    match command {
        Command::Lambda { grid, count_eigs } => lambda(g, grid, *count_eigs),
        Command::Gap { grid, kmax } => gap(g, grid, *kmax),
        Command::Pk { grid, kmax, truncation } => pk(g, grid, *kmax, *truncation),
        Command::Density { grid } => density(g, grid),
        Command::Asympt { grid } => asympt(g, grid),
        Command::Conjecture { grid } => conjecture(g, grid),
        Command::Constants => constants(g),
        Command::Elliptic { finite_n, mu, n, grid } => elliptic_cmd(g, *finite_n, *mu, *n, grid),
        Command::Selfcheck { tolerance_scale } => {
            if !(*tolerance_scale >= 0.0) {
                return Err(CmdError::Config("--tolerance-scale must be non-negative".into()));
            }
            let (table, failures) = selfcheck::run(*tolerance_scale);
            Ok(Outcome { table, failures })
        }
    }
}

fn lambda(g: &GlobalArgs, grid: &GridArgs, count: Option<usize>) -> Result<Outcome, CmdError> {
    let ens = g.ensemble_spec()?;
    let xs = grid.points()?;
    let rows = par_rows(&xs, |x| {
        let eigs = match count {
            Some(n) => eigenvalues(&ens, x, n)?,
            None => spectrum(&ens, x, g.eps)?.eigenvalues,
        };
        Ok(eigs
            .iter()
            .enumerate()
            .map(|(j, e)| vec![x.into(), j.into(), e.lambda.into(), e.one_minus.into()])
            .collect())
    })?;
    Ok(table(
        with_grid(base_config(g, Some(&ens), "lambda"), grid),
        names(&["x", "j", "lambda", "one_minus_lambda"]),
        rows,
    ))
}

fn gap(g: &GlobalArgs, grid: &GridArgs, kmax: usize) -> Result<Outcome, CmdError> {
    let ens = g.ensemble_spec()?;
    let xs = grid.points()?;
    let rows = par_rows(&xs, |x| {
        let t = ek_table(&ens, x, kmax, g.eps)?;
        let mut row: Vec<Cell> = vec![x.into()];
        row.extend(t.values.iter().map(|&v| Cell::Num(v)));
        row.push(t.log_e0.into());
        Ok(vec![row])
    })?;
    let mut cols = vec!["x".to_string()];
    cols.extend((0..=kmax).map(|k| format!("E_{k}")));
    cols.push("log_e0".into());
    Ok(table(with_grid(base_config(g, Some(&ens), "gap"), grid), cols, rows))
}

fn pk(g: &GlobalArgs, grid: &GridArgs, kmax: usize, truncation: usize) -> Result<Outcome, CmdError> {
    let ens = g.ensemble_spec()?;
    if kmax == 0 || kmax > truncation {
        return Err(CmdError::Config(format!(
            "--kmax must lie in 1..=truncation ({truncation}), got {kmax}"
        )));
    }
    let ss = grid.points()?;
    let trunc = Truncation::Fixed(truncation);
    let rows = par_rows(&ss, |s| {
        let p = pk_at(&ens, kmax, s, trunc)?;
        let rho = sum_rule_density(&ens, s, g.tol)?;
        let mut row: Vec<Cell> = vec![s.into()];
        row.extend(p.iter().map(|&v| Cell::Num(v)));
        row.push(p.iter().sum::<f64>().into());
        row.push(rho.into());
        Ok(vec![row])
    })?;
    let mut cols = vec!["s".to_string()];
    cols.extend((1..=kmax).map(|k| format!("p_{k}")));
    cols.push("partial_sum".into());
    cols.push("density".into());
    let mut config = with_grid(base_config(g, Some(&ens), "pk"), grid);
    config.push(("truncation".into(), truncation.to_string()));
    Ok(table(config, cols, rows))
}

fn density(g: &GlobalArgs, grid: &GridArgs) -> Result<Outcome, CmdError> {
    let ens = g.ensemble_spec()?;
    let ss = grid.points()?;
    let rows = par_rows(&ss, |s| {
        let rho = sum_rule_density(&ens, s, g.tol)?;
        let total = pk_total(&ens, s, Truncation::Eps(g.eps))?;
        Ok(vec![vec![s.into(), rho.into(), total.into(), (rho - total).into()]])
    })?;
    Ok(table(
        with_grid(base_config(g, Some(&ens), "density"), grid),
        names(&["s", "density", "pk_sum", "difference"]),
        rows,
    ))
}

fn asympt(g: &GlobalArgs, grid: &GridArgs) -> Result<Outcome, CmdError> {
    let ens = g.ensemble_spec()?;
    let xs = grid.points()?;
    let rows = par_rows(&xs, |x| {
        let d = asymptotics::decompose(&ens, x)?;
        Ok(vec![vec![
            x.into(),
            d.p_exact.into(),
            d.s11.into(),
            d.s12.into(),
            d.s2.into(),
            d.prediction.into(),
            d.residual_vs_prediction.into(),
            (d.residual_vs_prediction / x.sqrt()).into(),
            d.partition_error().into(),
        ]])
    })?;
    Ok(table(
        with_grid(base_config(g, Some(&ens), "asympt"), grid),
        names(&[
            "x",
            "P",
            "S11",
            "S12",
            "S2",
            "prediction",
            "residual",
            "residual_over_sqrt_x",
            "partition_error",
        ]),
        rows,
    ))
}

fn conjecture(g: &GlobalArgs, grid: &GridArgs) -> Result<Outcome, CmdError> {
    let mut xs: Vec<f64> = grid.points()?;
    if grid.values.is_empty() {
        xs = xs.iter().map(|x| x.round()).collect();
        xs.dedup();
    }
    let total = xs.len();
    let done = std::sync::atomic::AtomicUsize::new(0);
    let rows = par_rows(&xs, |x| {
        let r = bounds::conjecture_evidence(&[x])?;
        let n = done.fetch_add(1, std::sync::atomic::Ordering::SeqCst) + 1;
        eprintln!("[{n}/{total}] x = {x}");
        Ok(r
            .iter()
            .map(|row| {
                vec![
                    row.x.into(),
                    row.a12.into(),
                    row.a12_star.into(),
                    row.s2_minus_m_sqrtx.into(),
                ]
            })
            .collect())
    })?;
    let mut config = with_grid(base_config(g, None, "conjecture"), grid);
    config.push(("ensemble".into(), "ginibre2".into()));
    Ok(table(config, names(&["x", "A12", "A12star", "S2_minus_M_sqrt_x"]), rows))
}

fn constants(g: &GlobalArgs) -> Result<Outcome, CmdError> {
    let rows = vec![
        vec!["M".into(), bounds::constant_m()?.into()],
        vec!["C".into(), bounds::constant_c()?.into()],
        vec!["dilog_constant".into(), bounds::dilog_constant().into()],
    ];
    Ok(table(base_config(g, None, "constants"), names(&["name", "value"]), rows))
}

fn elliptic_cmd(g: &GlobalArgs, finite_n: bool, mu: f64, n: usize, grid: &GridArgs) -> Result<Outcome, CmdError> {
    if !finite_n {
        return Err(CmdError::Config(
            "the elliptic mode works at finite N with an unscaled radius; pass --finite-n".into(),
        ));
    }
    let ens = g.ensemble_spec()?;
    let params = match ens.family() {
        Family::ChiralBeta2 | Family::ChiralBeta4 => EllipticParams::new(mu, n, g.nu)?,
        _ => EllipticParams::ginibre(mu, n)?,
    };
    let rs = grid.points()?;
    let mut config = with_grid(base_config(g, Some(&ens), "elliptic"), grid);
    config.push(("mu".into(), mu.to_string()));
    config.push(("N".into(), n.to_string()));
    if ens.beta() == 2 {
        let rows = par_rows(&rs, |r| {
            let mm = elliptic::EllipticMomentMatrix::new(&params, r)?;
            let gap = elliptic::gap_beta2_from_moments(&mm)?;
            if gap.is_ill_conditioned() {
                eprintln!("warning: condition number {:.3e} at r = {r}", gap.condition);
            }
            let eigs = elliptic::fredholm_eigs_from_moments(&mm)?;
            let from_eigs: f64 = eigs.iter().map(|l| 1.0 - l).product();
            let rotational = elliptic::finite_n_product_beta2(n, g.nu, r)?;
            let mut row: Vec<Cell> = vec![
                r.into(),
                gap.value.into(),
                from_eigs.into(),
                rotational.into(),
                gap.condition.into(),
            ];
            row.extend(eigs.iter().map(|&l| Cell::Num(l)));
            Ok(vec![row])
        })?;
        let mut cols = names(&["r", "E0_det", "E0_from_eigs", "E0_rotational", "condition"]);
        cols.extend((1..=n).map(|i| format!("lambda_{i}")));
        Ok(table(config, cols, rows))
    } else {
        let rows = par_rows(&rs, |r| {
            let e = elliptic::gap_beta4_elliptic(&params, r)?;
            let rotational = elliptic::finite_n_product_beta4(n, g.nu, r)?;
            Ok(vec![vec![r.into(), e.into(), rotational.into()]])
        })?;
        Ok(table(config, names(&["r", "E0_pfaffian", "E0_rotational"]), rows))
    }
}
