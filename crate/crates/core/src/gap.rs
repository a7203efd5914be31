//! Gap probabilities `E_k`, the generating functional and radial densities `p_k`.
//!
//! `E_k` is the probability of exactly `k` eigenvalues inside the disc. Since
//! the generating functional factorises as `Π_j (1 - ξ λ_j)`, the `E_k` are the
//! Poisson-binomial probabilities of the eigenvalues `λ_j` and are built by the
//! usual one-factor-at-a-time recurrence, which only ever multiplies and adds
//! non-negative numbers. The x-derivatives ride along in forward mode.

use crate::ensemble::EnsembleSpec;
use crate::error::{Error, Result};
use crate::fredholm::{spectrum, spectrum_fixed, Eigenvalue, FredholmSpectrum};

/// How many eigenvalues enter the products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Keep eigenvalues until both `λ_n` and the tail sum drop below `eps`.
    Eps(f64),
    /// Keep exactly this many eigenvalues.
    Fixed(usize),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Eps(1e-15)
    }
}

pub fn spectrum_for(ens: &EnsembleSpec, x: f64, trunc: Truncation) -> Result<FredholmSpectrum> {
    match trunc {
        Truncation::Eps(eps) => spectrum(ens, x, eps),
        Truncation::Fixed(n) => spectrum_fixed(ens, x, n),
    }
}

/// `E_0 .. E_{k_max}` at one scaled radius.
#[derive(Debug, Clone, PartialEq)]
pub struct GapTable {
    pub ensemble: EnsembleSpec,
    pub x: f64,
    pub values: Vec<f64>,
    /// `log E_0`, valid where `E_0` itself underflows.
    pub log_e0: f64,
    pub truncation: usize,
    pub tail_bound: f64,
}

impl GapTable {
    pub fn ks(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.values.len().saturating_sub(1)
    }
}

/// Radial distribution of the k-th smallest eigenvalue modulus on an `s`-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialDensity {
    pub k: usize,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// Poisson-binomial probabilities `E_0..E_{k_max}` of the given eigenvalues.
pub fn poisson_binomial(eigs: &[Eigenvalue], k_max: usize) -> Vec<f64> {
    let mut c = vec![0.0; k_max + 1];
    c[0] = 1.0;
    for e in eigs {
        for k in (1..=k_max).rev() {
            c[k] = c[k] * e.one_minus + c[k - 1] * e.lambda;
        }
        c[0] *= e.one_minus;
    }
    c
}

/// Poisson-binomial probabilities and their x-derivatives.
pub fn poisson_binomial_with_derivative(eigs: &[Eigenvalue], k_max: usize) -> (Vec<f64>, Vec<f64>) {
    let mut c = vec![0.0; k_max + 1];
    let mut d = vec![0.0; k_max + 1];
    c[0] = 1.0;
    for e in eigs {
        let (g, l, dl) = (e.one_minus, e.lambda, e.dlambda_dx);
        for k in (1..=k_max).rev() {
            d[k] = d[k] * g - c[k] * dl + d[k - 1] * l + c[k - 1] * dl;
            c[k] = c[k] * g + c[k - 1] * l;
        }
        d[0] = d[0] * g - c[0] * dl;
        c[0] *= g;
    }
    (c, d)
}

/// `(E_0, log E_0)`.
pub fn e0(ens: &EnsembleSpec, x: f64, eps: f64) -> Result<(f64, f64)> {
    let s = spectrum(ens, x, eps)?;
    let log_e0: f64 = s.eigenvalues.iter().map(|e| e.log_one_minus).sum();
    Ok((log_e0.exp(), log_e0))
}

/// `dE_0/dx` from the analytic eigenvalue derivatives.
pub fn de0_dx(ens: &EnsembleSpec, x: f64, eps: f64) -> Result<f64> {
    let s = spectrum(ens, x, eps)?;
    let (c, d) = poisson_binomial_with_derivative(&s.eigenvalues, 0);
    debug_assert!(c[0] >= 0.0);
    Ok(d[0])
}

/// Generating functional `Π_j (1 - ξ λ_j)`.
pub fn generating(ens: &EnsembleSpec, x: f64, xi: f64, eps: f64) -> Result<f64> {
    let s = spectrum(ens, x, eps)?;
    if xi == 1.0 {
        return Ok(s.eigenvalues.iter().map(|e| e.log_one_minus).sum::<f64>().exp());
    }
    Ok(s.eigenvalues.iter().map(|e| (-xi * e.lambda).ln_1p()).sum::<f64>().exp())
}

/// `E_0 .. E_{k_max}` by the Poisson-binomial recurrence.
pub fn ek_table(ens: &EnsembleSpec, x: f64, k_max: usize, eps: f64) -> Result<GapTable> {
    let s = spectrum(ens, x, eps)?;
    Ok(table_from_spectrum(&s, k_max))
}

pub fn table_from_spectrum(s: &FredholmSpectrum, k_max: usize) -> GapTable {
    let mut values = poisson_binomial(&s.eigenvalues, k_max);
    // E_k beyond the number of retained factors vanish identically
    for (k, v) in values.iter_mut().enumerate() {
        if k > s.eigenvalues.len() {
            *v = 0.0;
        }
    }
    GapTable {
        ensemble: s.ensemble,
        x: s.x,
        values,
        log_e0: s.eigenvalues.iter().map(|e| e.log_one_minus).sum(),
        truncation: s.truncation,
        tail_bound: s.tail_bound,
    }
}

/// `p_1(s) .. p_{k_max}(s)` at one rescaled radius `s = √x`.
///
/// `p_k(s) = -(1/s) d/ds Σ_{l<k} E_l = -2 d/dx Σ_{l<k} E_l`.
pub fn pk_at(ens: &EnsembleSpec, k_max: usize, s: f64, trunc: Truncation) -> Result<Vec<f64>> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameters(format!("radius s = {s} must be finite and non-negative")));
    }
    if k_max == 0 {
        return Ok(Vec::new());
    }
    let x = s * s;
    let spec = spectrum_for(ens, x, trunc)?;
    let (_, d) = poisson_binomial_with_derivative(&spec.eigenvalues, k_max - 1);
    let mut out = Vec::with_capacity(k_max);
    let mut cumulative = 0.0;
    for dk in d {
        cumulative += dk;
        out.push((-2.0 * cumulative).max(0.0));
    }
    Ok(out)
}

/// `p_k` on a grid of rescaled radii.
pub fn pk_density(ens: &EnsembleSpec, k: usize, s_grid: &[f64], trunc: Truncation) -> Result<RadialDensity> {
    if k == 0 {
        return Err(Error::InvalidParameters("eigenvalue index k starts at 1".into()));
    }
    if s_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameters("s-grid must be strictly increasing".into()));
    }
    let values = s_grid
        .iter()
        .map(|&s| pk_at(ens, k, s, trunc).map(|v| v[k - 1]))
        .collect::<Result<Vec<_>>>()?;
    Ok(RadialDensity {
        k,
        grid: s_grid.to_vec(),
        values,
    })
}

/// `Σ_k p_k(s) = 2 Σ_j dλ_j/dx`, the density of all eigenvalue moduli.
pub fn pk_total(ens: &EnsembleSpec, s: f64, trunc: Truncation) -> Result<f64> {
    let spec = spectrum_for(ens, s * s, trunc)?;
    Ok(2.0 * spec.eigenvalues.iter().map(|e| e.dlambda_dx).sum::<f64>())
}

/// `|E_0^{(4)}(x) - Π_j (1 - λ^{(2)}_{2j+1}(x))|` with the β=2 spectrum built
/// from the same radial weight.
pub fn e24_check(ens4: &EnsembleSpec, x: f64, eps: f64) -> Result<f64> {
    if ens4.beta() != 4 {
        return Err(Error::InvalidParameters(format!("{ens4} is not a β=4 ensemble")));
    }
    let s4 = spectrum(ens4, x, eps)?;
    let n = s4.truncation;
    let partner = ens4.beta2_partner();
    let s2 = spectrum_fixed(&partner, x, 2 * n)?;
    let e4: f64 = s4.eigenvalues.iter().map(|e| e.log_one_minus).sum::<f64>().exp();
    let e2: f64 = s2
        .eigenvalues
        .iter()
        .skip(1)
        .step_by(2)
        .map(|e| e.log_one_minus)
        .sum::<f64>()
        .exp();
    Ok((e4 - e2).abs())
}
