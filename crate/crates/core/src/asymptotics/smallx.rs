//! Least-squares fits of `E_0(x)` near `x = 0`.

use nalgebra::{DMatrix, DVector};

use crate::ensemble::{EnsembleSpec, Family};
use crate::error::{Error, Result};
use crate::fredholm::eigenvalues;

/// Upper end of the default fitting window.
pub const DEFAULT_X_MAX: f64 = 0.05;

/// `E_0(x) - 1`, accurate to full relative precision even when tiny.
pub fn e0_minus_one(ens: &EnsembleSpec, x: f64) -> Result<f64> {
    // meant for x ≤ 1, where factors past the first few equal 1 to working precision
    let eigs = eigenvalues(ens, x, 16)?;
    let log_e0: f64 = eigs
        .iter()
        .map(|e| if e.lambda < 0.5 { (-e.lambda).ln_1p() } else { e.log_one_minus })
        .sum();
    Ok(log_e0.exp_m1())
}

/// Chebyshev-distributed points on `(0, x_max]`.
fn grid(x_max: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| {
            let theta = std::f64::consts::PI * (i as f64 + 0.5) / points as f64;
            0.5 * x_max * (1.0 - theta.cos())
        })
        .collect()
}

/// Solves the least-squares problem with unit-normalised columns.
fn least_squares(columns: Vec<Vec<f64>>, rhs: &[f64]) -> Result<Vec<f64>> {
    let rows = rhs.len();
    let cols = columns.len();
    let scales: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE))
        .collect();
    let a = DMatrix::from_fn(rows, cols, |i, j| columns[j][i] / scales[j]);
    let b = DVector::from_column_slice(rhs);
    let sol = a
        .svd(true, true)
        .solve(&b, 0.0)
        .map_err(|e| Error::InvalidParameters(format!("least-squares solve failed: {e}")))?;
    Ok(sol.iter().zip(&scales).map(|(v, s)| v / s).collect())
}

/// Coefficients `c_0..c_degree` of `E_0(x) ≈ Σ c_k x^k` on `(0, x_max]`.
pub fn polynomial_fit(ens: &EnsembleSpec, x_max: f64, degree: usize, points: usize) -> Result<Vec<f64>> {
    if points <= degree {
        return Err(Error::InvalidParameters(format!("{points} points cannot fix degree {degree}")));
    }
    let xs = grid(x_max, points);
    let ys = xs
        .iter()
        .map(|&x| e0_minus_one(ens, x).map(|v| v + 1.0))
        .collect::<Result<Vec<_>>>()?;
    // fit in u = x / x_max so that the columns are of comparable size
    let columns = (0..=degree)
        .map(|k| xs.iter().map(|x| (x / x_max).powi(k as i32)).collect())
        .collect();
    let coeffs = least_squares(columns, &ys)?;
    Ok(coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c / x_max.powi(k as i32))
        .collect())
}

/// Fits `(E_0 - 1)/x^p = c + d x² log x + e x²` and returns `c`.
pub fn leading_coefficient(ens: &EnsembleSpec, power: i32, x_max: f64, points: usize) -> Result<f64> {
    let xs = grid(x_max, points);
    let ys = xs
        .iter()
        .map(|&x| e0_minus_one(ens, x).map(|v| v / x.powi(power)))
        .collect::<Result<Vec<_>>>()?;
    let columns = vec![
        vec![1.0; xs.len()],
        xs.iter().map(|x| x * x * x.ln()).collect(),
        xs.iter().map(|x| x * x).collect(),
    ];
    Ok(least_squares(columns, &ys)?[0])
}

/// Fits `(E_0 - 1)/x^p = s log x + c + d x² log x + e x²` and returns the slope `s`.
pub fn log_slope(ens: &EnsembleSpec, power: i32, x_max: f64, points: usize) -> Result<f64> {
    let xs = grid(x_max, points);
    let ys = xs
        .iter()
        .map(|&x| e0_minus_one(ens, x).map(|v| v / x.powi(power)))
        .collect::<Result<Vec<_>>>()?;
    let columns = vec![
        xs.iter().map(|x| x.ln()).collect(),
        vec![1.0; xs.len()],
        xs.iter().map(|x| x * x * x.ln()).collect(),
        xs.iter().map(|x| x * x).collect(),
    ];
    Ok(least_squares(columns, &ys)?[0])
}

/// Outcome of the small-x fit appropriate to an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub enum SmallxReport {
    /// Ginibre: polynomial coefficients `c_0, c_1, …` of `E_0`.
    Polynomial(Vec<f64>),
    /// Chiral with one zero mode per pair (`ν = 2/β`): `E_0 = 1 + c x^p + …`.
    Leading { power: i32, coefficient: f64 },
    /// Chiral `ν = 0`: `E_0 = 1 + s x^p log x + …`.
    LogSlope { power: i32, slope: f64 },
}

pub fn smallx_series_check(ens: &EnsembleSpec) -> Result<SmallxReport> {
    let power = if ens.beta() == 2 { 2 } else { 4 };
    match (ens.family(), ens.weight_index()) {
        (Family::GinibreBeta2 | Family::GinibreBeta4, _) => {
            polynomial_fit(ens, DEFAULT_X_MAX, 9, 64).map(SmallxReport::Polynomial)
        }
        (_, 0) => log_slope(ens, power, DEFAULT_X_MAX, 48).map(|slope| SmallxReport::LogSlope { power, slope }),
        (_, 1) => leading_coefficient(ens, power, DEFAULT_X_MAX, 48)
            .map(|coefficient| SmallxReport::Leading { power, coefficient }),
        _ => Err(Error::InvalidParameters(format!(
            "no small-x series is tabulated for {ens}; use ν = 0 or ν = 2/β"
        ))),
    }
}
