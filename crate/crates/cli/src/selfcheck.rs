use gapfredholm::asymptotics::{self, bounds};
use gapfredholm::elliptic::{self, EllipticParams, SkewMomentMatrix};
use gapfredholm::fredholm::{eigenvalues, quadrature_lambda};
use gapfredholm::gap::{de0_dx, e0, e24_check, ek_table};
use gapfredholm::specfun::{bessel_i_scaled, bessel_k_scaled};
use gapfredholm::{EnsembleSpec, Result};

use crate::output::{Cell, Table};

struct Check {
    name: &'static str,
    value: Result<f64>,
    tolerance: f64,
}

fn all_ensembles() -> [EnsembleSpec; 4] {
    [
        EnsembleSpec::ginibre2(),
        EnsembleSpec::ginibre4(),
        EnsembleSpec::chiral2(1),
        EnsembleSpec::chiral4(1),
    ]
}

fn max_of(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for v in values {
        worst = worst.max(v?);
    }
    Ok(worst)
}

fn wronskian() -> Result<f64> {
    let mut cases = Vec::new();
    for nu in 0..=4u32 {
        for &x in &[0.5, 2.0, 10.0, 50.0] {
            cases.push((nu, x));
        }
    }
    max_of(cases.into_iter().map(|(nu, x)| {
        let w = x
            * (bessel_i_scaled(nu + 1, x)? * bessel_k_scaled(nu, x)?
                + bessel_i_scaled(nu, x)? * bessel_k_scaled(nu + 1, x)?);
        Ok((1.0 - w).abs())
    }))
}

fn oracle() -> Result<f64> {
    let mut cases = Vec::new();
    for ens in all_ensembles() {
        for &x in &[1.0, 5.0] {
            cases.push((ens, x));
        }
    }
    max_of(cases.into_iter().map(|(ens, x)| {
        let eigs = eigenvalues(&ens, x, 6)?;
        max_of(eigs.iter().enumerate().map(|(j, e)| {
            let q = quadrature_lambda(&ens, j, x)?;
            Ok(((e.lambda - q.value).abs() - q.abs_err).max(0.0))
        }))
    }))
}

fn completeness() -> Result<f64> {
    max_of(all_ensembles().into_iter().map(|ens| {
        let t = ek_table(&ens, 4.0, 40, 1e-16)?;
        Ok((t.values.iter().sum::<f64>() - 1.0).abs())
    }))
}

fn e24() -> Result<f64> {
    max_of([EnsembleSpec::ginibre4(), EnsembleSpec::chiral4(1)].map(|e| e24_check(&e, 5.0, 1e-16)))
}

fn derivative() -> Result<f64> {
    let h = 1e-4;
    max_of(all_ensembles().into_iter().map(|ens| {
        let x = 2.0;
        let analytic = de0_dx(&ens, x, 1e-16)?;
        let numeric = (e0(&ens, x + h, 1e-16)?.0 - e0(&ens, x - h, 1e-16)?.0) / (2.0 * h);
        Ok((analytic - numeric).abs() / analytic.abs())
    }))
}

fn constants() -> Result<f64> {
    Ok((bounds::constant_m()? - 0.478)
        .abs()
        .max((bounds::constant_c()? + 0.716).abs())
        .max((bounds::dilog_constant() - 0.653).abs()))
}

fn partition() -> Result<f64> {
    max_of(all_ensembles().into_iter().map(|ens| Ok(asymptotics::decompose(&ens, 1000.0)?.partition_error())))
}

fn s12_sandwich() -> Result<f64> {
    let b = bounds::s12_bounds(1000.0)?;
    Ok(if b.holds() { 0.0 } else { 1.0 })
}

fn lower_bound() -> Result<f64> {
    Ok(bounds::g_lower_bound_check(1000.0, &[0.5, 1.0, 2.0])?.max_violation.max(0.0))
}

fn elliptic_rotational() -> Result<f64> {
    let p = EllipticParams::new(1.0, 4, 0)?;
    max_of([0.1, 0.5, 1.0].map(|r| {
        Ok((elliptic::gap_beta2_elliptic(&p, r)?.value - elliptic::finite_n_product_beta2(4, 0, r)?).abs())
    }))
}

fn elliptic_eigs() -> Result<f64> {
    let p = EllipticParams::new(0.8, 4, 0)?;
    let mm = elliptic::EllipticMomentMatrix::new(&p, 0.5)?;
    let det = elliptic::gap_beta2_from_moments(&mm)?.value;
    let prod: f64 = elliptic::fredholm_eigs_from_moments(&mm)?.iter().map(|l| 1.0 - l).product();
    Ok((det - prod).abs())
}

fn pfaffian_identity() -> Result<f64> {
    let p = EllipticParams::new(0.7, 2, 0)?;
    let (outside, full) = SkewMomentMatrix::new(&p, 0.6)?.scaled();
    max_of([outside, full].map(|m| Ok((elliptic::pfaffian(&m)?.powi(2) - m.determinant()).abs())))
}

fn checks() -> Vec<Check> {
    vec![
        Check { name: "wronskian", value: wronskian(), tolerance: 1e-12 },
        Check { name: "oracle_triangle", value: oracle(), tolerance: 1e-10 },
        Check { name: "completeness", value: completeness(), tolerance: 1e-12 },
        Check { name: "beta2_beta4_relation", value: e24(), tolerance: 1e-14 },
        Check { name: "de0_dx_central_difference", value: derivative(), tolerance: 1e-6 },
        Check { name: "constants", value: constants(), tolerance: 1e-3 },
        Check { name: "partition", value: partition(), tolerance: 1e-9 },
        Check { name: "s12_sandwich", value: s12_sandwich(), tolerance: 0.5 },
        Check { name: "g_lower_bound", value: lower_bound(), tolerance: 0.0 },
        Check { name: "elliptic_rotational_limit", value: elliptic_rotational(), tolerance: 1e-8 },
        Check { name: "elliptic_eigen_product", value: elliptic_eigs(), tolerance: 1e-8 },
        Check { name: "pfaffian_squared", value: pfaffian_identity(), tolerance: 1e-10 },
    ]
}

/// Runs every check with tolerances multiplied by `scale`; returns the report and the failure count.
pub fn run(scale: f64) -> (Table, usize) {
    let mut table = Table::new(
        vec![
            ("command".into(), "selfcheck".into()),
            ("tolerance_scale".into(), scale.to_string()),
        ],
        ["check", "value", "tolerance", "pass"].iter().map(|s| s.to_string()).collect(),
    );
    let mut failures = 0;
    for c in checks() {
        let tol = c.tolerance * scale;
        let (value, pass) = match &c.value {
            Ok(v) => (*v, *v <= tol),
            Err(e) => {
                eprintln!("{}: {e}", c.name);
                (f64::NAN, false)
            }
        };
        if !pass {
            failures += 1;
            eprintln!("FAIL {}", c.name);
        }
        table.push(vec![Cell::from(c.name), value.into(), tol.into(), pass.into()]);
    }
    (table, failures)
}
