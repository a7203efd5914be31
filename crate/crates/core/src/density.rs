//! Microscopic spectral densities at maximal non-Hermiticity and the sum rule
//! tying them to the individual eigenvalue distributions `p_k`.

use std::f64::consts::PI;

use crate::ensemble::EnsembleSpec;
use crate::error::{Error, Result};
use crate::gap::{pk_at, Truncation};
use crate::quad::{integrate, QuadTolerance};
use crate::specfun::{bessel_i_scaled, bessel_k_scaled};

/// `Σ_k p_k(s) = BETA2_SUM_RULE · ρ^{(2)}_ν(s²)` with `p_k` normalised as `∫ s p_k ds = 1`.
pub const BETA2_SUM_RULE: f64 = PI;

/// `Σ_k p_k(s) = BETA4_SUM_RULE · ∫_0^{2π} ρ^{(4)}_ν(s e^{iθ}) dθ`.
pub const BETA4_SUM_RULE: f64 = 1.0;

/// Sampled density curve.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Factor applied to the density so that it is directly comparable to `Σ p_k`.
    pub sum_rule_factor: f64,
}

/// `ρ^{(2)}_ν(x) = (2/π) x K_ν(x) I_ν(x)` at `x = N|z|²`.
pub fn rho_chiral2(nu: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParameters(format!("density needs x > 0, got {x}")));
    }
    Ok(2.0 / PI * x * bessel_k_scaled(nu, x)? * bessel_i_scaled(nu, x)?)
}

/// Angle-resolved chiral β=4 density `ρ^{(4)}` at `η = s e^{iθ}`, with weight index `w = 2ν`.
///
/// With `x = s²` the factor `(η*² - η²) sinh(½√(1-t²)(η² - η*²))` equals the
/// real `2x sin2θ · sin(x √(1-t²) sin2θ)`. The endpoint singularity of the
/// t-integral is removed by `t = sin φ`.
pub fn rho_chiral4_angle(w: u32, s: f64, theta: f64, tol: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameters(format!("density needs s > 0, got {s}")));
    }
    let x = s * s;
    let sin2 = (2.0 * theta).sin();
    if sin2 == 0.0 {
        return Ok(0.0);
    }
    let kx = bessel_k_scaled(w, x)?;
    let inner = integrate(
        |phi: f64| {
            let arg = x * phi.sin();
            let i_scaled = if arg > 0.0 {
                bessel_i_scaled(w, arg).unwrap_or(0.0)
            } else if w == 0 {
                1.0
            } else {
                0.0
            };
            // e^{-x} K(x) · e^{arg} I(arg) with both exponentials folded in
            i_scaled * (arg - x).exp() * (x * phi.cos() * sin2).sin()
        },
        0.0,
        0.5 * PI,
        QuadTolerance::relative(tol).with_abs(tol * 1e-3),
    )?;
    Ok(1.0 / (4.0 * PI) * 2.0 * x * sin2 * x * kx * inner.value)
}

/// `∫_0^{2π} ρ^{(4)}(s e^{iθ}) dθ`, using the four-fold symmetry of the density.
pub fn rho_chiral4_integrated_w(w: u32, s: f64, tol: f64) -> Result<f64> {
    let outer = integrate(
        |theta: f64| rho_chiral4_angle(w, s, theta, tol * 0.1).unwrap_or(f64::NAN),
        0.0,
        0.5 * PI,
        QuadTolerance::relative(tol).with_abs(tol * 1e-3),
    )?;
    if outer.value.is_nan() {
        return Err(Error::Quadrature {
            achieved: f64::NAN,
            requested: tol,
            value: f64::NAN,
        });
    }
    Ok(4.0 * outer.value)
}

/// `∫_0^{2π} ρ^{(4)}_ν(s e^{iθ}) dθ` for integer ν.
pub fn rho_chiral4_integrated(nu: u32, s: f64, tol: f64) -> Result<f64> {
    rho_chiral4_integrated_w(2 * nu, s, tol)
}

/// Angle-integrated density in the normalisation of `Σ p_k(s)`, `s = √x`.
pub fn sum_rule_density(ens: &EnsembleSpec, s: f64, tol: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    if !ens.is_chiral() {
        // Σ_j dλ_j/dx over all (β=2) or odd (β=4) Ginibre indices
        return Ok(match ens.beta() {
            2 => 2.0,
            _ => -(-2.0 * s * s).exp_m1(),
        });
    }
    match ens.beta() {
        2 => Ok(BETA2_SUM_RULE * rho_chiral2(ens.weight_index(), s * s)?),
        _ => Ok(BETA4_SUM_RULE * rho_chiral4_integrated_w(ens.weight_index(), s, tol)?),
    }
}

/// Density curve on an `s` grid, scaled for comparison with `Σ p_k`.
pub fn density_curve(ens: &EnsembleSpec, s_grid: &[f64], tol: f64) -> Result<DensityCurve> {
    let values = s_grid
        .iter()
        .map(|&s| sum_rule_density(ens, s, tol))
        .collect::<Result<Vec<_>>>()?;
    let sum_rule_factor = match (ens.is_chiral(), ens.beta()) {
        (true, 2) => BETA2_SUM_RULE,
        (true, _) => BETA4_SUM_RULE,
        _ => 1.0,
    };
    Ok(DensityCurve {
        grid: s_grid.to_vec(),
        values,
        sum_rule_factor,
    })
}

/// `density(s) - Σ_{k ≤ k_terms} p_k(s)` with `truncation` eigenvalues in the products.
pub fn sum_rule_residual(
    ens: &EnsembleSpec,
    s_grid: &[f64],
    k_terms: usize,
    truncation: usize,
    tol: f64,
) -> Result<Vec<f64>> {
    if k_terms > truncation {
        return Err(Error::InvalidParameters(format!(
            "k_terms = {k_terms} exceeds truncation = {truncation}"
        )));
    }
    s_grid
        .iter()
        .map(|&s| {
            let rho = sum_rule_density(ens, s, tol)?;
            let pk = pk_at(ens, k_terms, s, Truncation::Fixed(truncation))?;
            Ok(rho - pk.iter().sum::<f64>())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gap::pk_total;

    #[test]
    fn beta2_density_limits() {
        let r = rho_chiral2(0, 100.0).unwrap() * PI;
        assert!((r - 1.0).abs() < 0.01);
        assert!(rho_chiral2(0, 1e-8).unwrap() < 1e-6);
        let v = rho_chiral2(1, 1.0).unwrap();
        let expected = 2.0 / PI * 0.601_907_230_197_234_6 * 0.565_159_103_992_485_1;
        assert!((v - expected).abs() < 1e-13);
    }

    #[test]
    fn beta2_sum_rule_constant() {
        for nu in 0..3 {
            for s in [0.3, 1.0, 2.5] {
                let ens = EnsembleSpec::chiral2(nu);
                let total = pk_total(&ens, s, Truncation::Eps(1e-16)).unwrap();
                let rho = rho_chiral2(nu, s * s).unwrap();
                assert!((total - BETA2_SUM_RULE * rho).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn beta4_sum_rule_constant() {
        for nu in 0..2 {
            let ens = EnsembleSpec::chiral4(nu);
            for s in [0.8, 1.5, 2.4] {
                let total = pk_total(&ens, s, Truncation::Eps(1e-16)).unwrap();
                let rho = rho_chiral4_integrated(nu, s, 1e-10).unwrap();
                let ratio = total / rho;
                assert!((ratio - BETA4_SUM_RULE).abs() < 1e-6, "nu={nu} s={s}: ratio {ratio}");
            }
        }
    }

    #[test]
    fn beta4_density_vanishes_on_axes() {
        assert_eq!(rho_chiral4_angle(0, 1.3, 0.0, 1e-10).unwrap(), 0.0);
        let a = rho_chiral4_angle(2, 1.3, 0.4, 1e-12).unwrap();
        let b = rho_chiral4_angle(2, 1.3, 0.5 * PI - 0.4, 1e-12).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(rho_chiral4_integrated(0, 0.05, 1e-8).unwrap() < 1e-4);
    }
}
