//! Large-radius behaviour of `P(x) = -log E_0(x)`.
//!
//! `P(x) = -Σ_n log g_n(x)`, where `g_n = 1 - λ_n` runs over all indices of
//! the β=2 sequence (β=2) or over its odd indices (β=4). Splitting the sum at
//! `𝒩` and writing `g_n = t_n r_n` with `t_n` the leading term gives
//!
//! ```text
//! P = S11 + S12 + S2,   S11 = -Σ_{n≤𝒩} log t_n,   S12 = -Σ_{n≤𝒩} log r_n,   S2 = -Σ_{n>𝒩} log g_n.
//! ```
//!
//! The submodules hold the rigorous bounds on `S12` and `S2` and the
//! small-radius series fits.

pub mod bounds;
pub mod smallx;

use std::f64::consts::PI;

use crate::ensemble::{EnsembleSpec, Family};
use crate::error::{Error, Result};
use crate::fredholm::{log_one_minus_lambda_chiral2, spectrum};
use crate::specfun::{log_factorial, log_regularized_gamma_q, regularized_gamma_q};

pub use bounds::{
    conjecture_evidence, constant_c, constant_m, dilog_constant, g_lower_bound, g_lower_bound_check,
    s12_bounds, s12_magnitude_ginibre, s2_upper_bound, t_upper_bound, ConjectureRow, LowerBoundCheck, S12Bounds,
};
pub use smallx::{smallx_series_check, SmallxReport};

/// Default truncation for the exact sums: terms with `λ_n` below this are dropped.
pub const DEFAULT_TAIL_EPS: f64 = 1e-18;

/// Exact value of `P(x)` together with its three-way split.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticDecomposition {
    pub ens: EnsembleSpec,
    pub x: f64,
    /// Split point `𝒩`; indices `n ≤ 𝒩` enter `S11` and `S12`.
    pub split: usize,
    pub s11: f64,
    pub s12: f64,
    pub s2: f64,
    pub p_exact: f64,
    pub prediction: f64,
    /// `p_exact - prediction`.
    pub residual_vs_prediction: f64,
    /// Number of factors `g_n` that entered `P`.
    pub terms: usize,
    /// Bound on the neglected `Σ λ_n`.
    pub tail_bound: f64,
}

impl AsymptoticDecomposition {
    /// `|P - (S11 + S12 + S2)| / P`.
    pub fn partition_error(&self) -> f64 {
        ((self.s11 + self.s12 + self.s2) - self.p_exact).abs() / self.p_exact.abs()
    }
}

/// Coefficients of `x²`, `x log x` and `x` in the large-x prediction for `P(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingTerms {
    pub quad_coeff: f64,
    pub xlogx_coeff: f64,
    pub linear_coeff: f64,
}

impl LeadingTerms {
    pub fn evaluate(&self, x: f64) -> f64 {
        self.quad_coeff * x * x + self.xlogx_coeff * x * x.ln() + self.linear_coeff * x
    }
}

/// `A(x) = x²/4 + (x log x)/2 + (log 2π)/2 · x`.
pub fn a_function(x: f64) -> f64 {
    0.25 * x * x + 0.5 * x * x.ln() + 0.5 * (2.0 * PI).ln() * x
}

/// Predicted leading behaviour of `P(x)` for each ensemble.
///
/// The quadratic and `x log x` parts are those of `A(x)` scaled by 1, 1/2,
/// 1/2 and 1/4 for Ginibre β=2, Ginibre β=4, chiral β=2 and chiral β=4.
pub fn leading_terms(ens: &EnsembleSpec) -> LeadingTerms {
    let log2pi = (2.0 * PI).ln();
    let nu = ens.nu();
    let (scale, linear) = match ens.family() {
        Family::GinibreBeta2 => (1.0, log2pi / 2.0 - 1.0),
        Family::GinibreBeta4 => (0.5, log2pi / 4.0 - 0.75),
        Family::ChiralBeta2 => (0.5, log2pi / 4.0 - (nu + 1.0) / 2.0),
        Family::ChiralBeta4 => (0.25, log2pi / 8.0 - (2.0 * nu + 2.0) / 4.0),
    };
    LeadingTerms {
        quad_coeff: 0.25 * scale,
        xlogx_coeff: 0.5 * scale,
        linear_coeff: linear,
    }
}

pub fn leading_prediction(ens: &EnsembleSpec, x: f64) -> f64 {
    leading_terms(ens).evaluate(x)
}

/// `log t_n = n log x - x - log n!`.
pub fn log_t_ginibre(n: usize, x: f64) -> f64 {
    n as f64 * x.ln() - x - log_factorial(n as u64)
}

/// `g_n(x) = Σ_{k≤n} e^{-x} x^k/k! = Q(n+1, x)`.
pub fn g_ginibre(n: usize, x: f64) -> Result<f64> {
    regularized_gamma_q(n as f64 + 1.0, x)
}

pub fn log_g_ginibre(n: usize, x: f64) -> Result<f64> {
    log_regularized_gamma_q(n as f64 + 1.0, x)
}

/// `log t_{w,n} = ½ log π - x + (2n+w+½) log(x/2) - log n! - log (n+w)!`,
/// the chiral leading term with `K` replaced by its large-argument form.
pub fn log_t_chiral(w: u32, n: usize, x: f64) -> f64 {
    0.5 * PI.ln() - x + (2.0 * n as f64 + w as f64 + 0.5) * (0.5 * x).ln()
        - log_factorial(n as u64)
        - log_factorial(n as u64 + w as u64)
}

/// `log g_{w,n}(x)`: the same closed form that yields `1 - λ_n` in the Fredholm module.
pub fn log_g_chiral(w: u32, n: usize, x: f64) -> Result<f64> {
    log_one_minus_lambda_chiral2(n, w, x)
}

pub fn g_chiral(w: u32, n: usize, x: f64) -> Result<f64> {
    log_g_chiral(w, n, x).map(f64::exp)
}

/// Relative difference between `g^{ch}_{w,n}(x)` and the Ginibre factor at
/// the shifted real index `2n + w + ½`, i.e. `Q(2n + w + 3/2, x)`.
pub fn shift_relative_error(w: u32, n: usize, x: f64) -> Result<f64> {
    let chiral = g_chiral(w, n, x)?;
    let ginibre = regularized_gamma_q(2.0 * n as f64 + w as f64 + 1.5, x)?;
    Ok((chiral - ginibre).abs() / ginibre)
}

/// Split point `𝒩`: `floor(x)` for Ginibre, `floor(x/2)` for chiral.
pub fn split_point(ens: &EnsembleSpec, x: f64) -> usize {
    if ens.is_chiral() {
        (0.5 * x).floor() as usize
    } else {
        x.floor() as usize
    }
}

/// `log t_n` of the ensemble's β=2 sequence at index `n`.
pub fn log_leading_term(ens: &EnsembleSpec, n: usize, x: f64) -> f64 {
    if ens.is_chiral() {
        log_t_chiral(ens.weight_index(), n, x)
    } else {
        log_t_ginibre(n, x)
    }
}

/// `r_n = 1 + n/x + n(n-1)/x² + … + n!/xⁿ` by `r_n = 1 + (n/x) r_{n-1}`.
pub fn remainder_ginibre(n: usize, x: f64) -> f64 {
    (1..=n).fold(1.0, |r, k| 1.0 + k as f64 / x * r)
}

/// Pairs `(n, log g_n)` over the ensemble's index set, dropping `λ_n < eps`.
fn log_g_terms(ens: &EnsembleSpec, x: f64, eps: f64) -> Result<(Vec<(usize, f64)>, f64)> {
    let s = spectrum(ens, x, eps)?;
    let step = if ens.beta() == 4 { 2 } else { 1 };
    let offset = if ens.beta() == 4 { 1 } else { 0 };
    let terms = s
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(j, e)| (offset + step * j, e.log_one_minus))
        .collect();
    Ok((terms, s.tail_bound))
}

/// `P(x) = -Σ log g_n`, dropping factors with `λ_n < tol`.
pub fn p_exact(ens: &EnsembleSpec, x: f64, tol: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParameters(format!("P(x) needs x > 0, got {x}")));
    }
    let (terms, _) = log_g_terms(ens, x, tol)?;
    Ok(-terms.iter().map(|t| t.1).sum::<f64>())
}

/// Exact `P(x)` split at `𝒩` into `S11`, `S12` and `S2`.
pub fn decompose(ens: &EnsembleSpec, x: f64) -> Result<AsymptoticDecomposition> {
    decompose_with(ens, x, DEFAULT_TAIL_EPS)
}

pub fn decompose_with(ens: &EnsembleSpec, x: f64, tol: f64) -> Result<AsymptoticDecomposition> {
    if !(x >= 1.0) || !x.is_finite() {
        return Err(Error::InvalidParameters(format!("decomposition needs x ≥ 1, got {x}")));
    }
    let split = split_point(ens, x);
    let (terms, tail_bound) = log_g_terms(ens, x, tol)?;
    if terms.last().is_some_and(|t| t.0 <= split) {
        return Err(Error::InvalidParameters(format!(
            "truncation tolerance {tol} leaves no terms beyond the split point {split}"
        )));
    }
    let p_exact = -terms.iter().map(|t| t.1).sum::<f64>();

    let mut s11 = 0.0;
    let mut s12 = 0.0;
    let mut s2 = 0.0;
    let mut r = 1.0;
    let mut r_index = 0;
    for &(n, log_g) in &terms {
        if n > split {
            s2 -= log_g;
            continue;
        }
        let log_t = log_leading_term(ens, n, x);
        s11 -= log_t;
        if ens.is_chiral() {
            s12 -= log_g - log_t;
        } else {
            while r_index < n {
                r_index += 1;
                r = 1.0 + r_index as f64 / x * r;
            }
            s12 -= r.ln();
        }
    }
    let prediction = leading_prediction(ens, x);
    Ok(AsymptoticDecomposition {
        ens: *ens,
        x,
        split,
        s11,
        s12,
        s2,
        p_exact,
        prediction,
        residual_vs_prediction: p_exact - prediction,
        terms: terms.len(),
        tail_bound,
    })
}
