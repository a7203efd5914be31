//! Bounds on `|S12|` and `S2` for the Ginibre β=2 ensemble, the constants
//! `M` and `C`, and the lower bound on `g_n(x)` for `n > x`.

use std::f64::consts::{E, LN_2, PI};

use super::{decompose, split_point};
use crate::ensemble::EnsembleSpec;
use crate::error::{domain, Error, Result};
use crate::quad::{integrate, integrate_to_inf, QuadTolerance};
use crate::specfun::{cumulative_normal, dilog, log_add_exp, log_cumulative_normal, normal_pdf, regularized_gamma_q};

/// `|S12|` at the split `𝒩 = floor(x)` with both of its bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S12Bounds {
    pub x: f64,
    pub lower: f64,
    pub exact: f64,
    pub upper: f64,
}

impl S12Bounds {
    pub fn holds(&self) -> bool {
        self.lower < self.exact && self.exact < self.upper
    }
}

/// `|S12(x,x)| = Σ_{n=1}^{floor x} log r_n(x)`, in O(x) operations.
pub fn s12_magnitude_ginibre(x: f64) -> f64 {
    let split = x.floor() as usize;
    let mut r = 1.0f64;
    let mut total = 0.0;
    for n in 1..=split {
        r = 1.0 + n as f64 / x * r;
        total += r.ln();
    }
    total
}

/// Lower and upper bounds on `|S12(x,x)|`.
///
/// Upper: `log r_n < -log(1 - n/x)` for `n < x`, and `log r_n < log(n+1)` for
/// the boundary term `n = x`. Lower: `r_n ≥ ½(1 + (1 + 2/x)ⁿ)`.
pub fn s12_bounds(x: f64) -> Result<S12Bounds> {
    if !(x >= 2.0) || !x.is_finite() {
        return Err(Error::InvalidParameters(format!("S12 bounds need x ≥ 2, got {x}")));
    }
    let split = x.floor() as usize;
    let step = (2.0 / x).ln_1p();
    let mut upper = 0.0;
    let mut lower = 0.0;
    for n in 1..=split {
        let nf = n as f64;
        upper += if nf < x { -(-nf / x).ln_1p() } else { (nf + 1.0).ln() };
        lower += log_add_exp(0.0, nf * step) - LN_2;
    }
    Ok(S12Bounds {
        x,
        lower,
        exact: s12_magnitude_ginibre(x),
        upper,
    })
}

/// `1 - log 2 + π²/24 + ½ Li₂(-e^{-2}) ≈ 0.653`, the limiting slope of the lower bound.
pub fn dilog_constant() -> f64 {
    let li2 = dilog(-(-2.0f64).exp()).expect("argument inside the unit disc");
    1.0 - LN_2 + PI * PI / 24.0 + 0.5 * li2
}

const CONSTANT_CUTOFF: f64 = 10.0;

/// `M = -∫_0^∞ log Φ(m) dm ≈ 0.478`.
pub fn constant_m() -> Result<f64> {
    let tol = QuadTolerance::relative(1e-13);
    let body = integrate(|m| -log_cumulative_normal(m), 0.0, CONSTANT_CUTOFF, tol)?;
    // beyond the cutoff -log Φ = (1 - Φ)(1 + O(1 - Φ)), and ∫_a^∞ (1 - Φ) = φ(a) - a(1 - Φ(a))
    let a = CONSTANT_CUTOFF;
    let tail = normal_pdf(a) - a * (1.0 - cumulative_normal(a));
    Ok(body.value + tail)
}

/// `C = (1/(6√(2π))) ∫_0^∞ (m² - 1) e^{-m²/2} / Φ(m) dm - log 2 ≈ -0.716`.
pub fn constant_c() -> Result<f64> {
    let integral = integrate_to_inf(
        |m| (m * m - 1.0) * (-0.5 * m * m).exp() / cumulative_normal(m),
        0.0,
        QuadTolerance::relative(1e-13).with_abs(1e-16),
    )?;
    Ok(integral.value / (6.0 * (2.0 * PI).sqrt()) - LN_2)
}

/// Evidence for the conjectured behaviour of `S12` and `S2` at one `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjectureRow {
    pub x: f64,
    /// `|S12(x,x)| / x`.
    pub a12: f64,
    /// `(|S12(x,x)| - x) / √x`.
    pub a12_star: f64,
    /// `S2(x,x) - M√x`, conjectured to approach `C`.
    pub s2_minus_m_sqrtx: f64,
}

pub fn conjecture_evidence(xs: &[f64]) -> Result<Vec<ConjectureRow>> {
    let m = constant_m()?;
    let ens = EnsembleSpec::ginibre2();
    xs.iter()
        .map(|&x| {
            if !(x >= 2.0 && x <= 1e6) {
                return Err(Error::InvalidParameters(format!("conjecture grid needs 2 ≤ x ≤ 1e6, got {x}")));
            }
            // S12(x,x) splits at 𝒩 = x, so x has to be an index
            if x.fract() != 0.0 {
                return Err(Error::InvalidParameters(format!("S12(x,x) needs integer x, got {x}")));
            }
            let s12 = s12_magnitude_ginibre(x);
            let d = decompose(&ens, x)?;
            Ok(ConjectureRow {
                x,
                a12: s12 / x,
                a12_star: (s12 - x) / x.sqrt(),
                s2_minus_m_sqrtx: d.s2 - m * x.sqrt(),
            })
        })
        .collect()
}

fn alpha() -> f64 {
    (E * E - 1.5) / (3.0 * PI).sqrt()
}

fn beta() -> f64 {
    1.5 * 1.5f64.ln() - 0.5
}

fn gamma() -> f64 {
    1.0 / (E * (2.0 * PI).sqrt())
}

fn delta() -> f64 {
    1.0 + E * E
}

/// Upper bound `exp(E(p,x))/√(2πx)` on `t_k(x) = e^{-x} x^k / k!`, for real `k ≥ x`.
///
/// With `p = (k - x)/√x`, `E = p√x - (x + p√x + ½) log(1 + p/√x)`.
pub fn t_upper_bound(k: f64, x: f64) -> f64 {
    let exponent = (k - x) - (k + 0.5) * ((k - x) / x).ln_1p();
    exponent.exp() / (2.0 * PI * x).sqrt()
}

/// `1 - g^{LB}`: the bound on `Σ_{k>n} t_k` assembled from the three `k`-regimes.
fn lower_bound_deficit(n: f64, x: f64) -> Result<f64> {
    let third = gamma() * (-delta() * x).exp() / x.sqrt();
    let t2 = (2.0f64 / 3.0).sqrt() / (2.0 * PI * x).sqrt() * (-beta() * x).exp();
    if n < 1.5 * x {
        let first = integrate(
            |k| t_upper_bound(k, x),
            n,
            1.5 * x,
            QuadTolerance::relative(1e-12).with_abs(1e-300),
        )?;
        Ok(first.value + alpha() * x.sqrt() * (-beta() * x).exp() + third)
    } else if n < E * E * x {
        Ok(t2 * (E * E * x - n) + third)
    } else {
        Ok((-2.0 * x - 1.0 - (n - x)).exp() / (2.0 * PI * x).sqrt())
    }
}

/// Lower bound on `g_n(x)` valid for `n > x`; may be negative (vacuous) at small `x`.
pub fn g_lower_bound(n: f64, x: f64) -> Result<f64> {
    if !(n > x && x > 0.0) {
        return Err(domain("g_lower_bound", format!("needs n > x > 0, got n = {n}, x = {x}")));
    }
    Ok(1.0 - lower_bound_deficit(n, x)?)
}

/// `Σ_{n > floor x} -log g^{LB}_n(x)`, an upper bound on `S2(x,x)`; of order `M√x`.
pub fn s2_upper_bound(x: f64) -> Result<f64> {
    if !(x >= 4.0) || !x.is_finite() {
        return Err(Error::InvalidParameters(format!("S2 bound needs x ≥ 4, got {x}")));
    }
    let mut n = x.floor() as usize + 1;
    let mut total = 0.0;
    loop {
        let nf = n as f64;
        let deficit = lower_bound_deficit(nf, x)?;
        if deficit >= 1.0 {
            return Err(domain("s2_upper_bound", format!("lower bound on g_{n}({x}) is not positive")));
        }
        total -= (-deficit).ln_1p();
        if deficit < 1e-20 && nf >= 1.5 * x {
            // every later deficit is smaller and at most e²x + 2 of them are not geometric
            return Ok(total + deficit * (E * E * x + 2.0));
        }
        n += 1;
    }
}

/// Result of comparing `g_n(x)` with `Φ(m)` and with its lower bound at `n = x + m√x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundCheck {
    pub x: f64,
    /// `(m, n, g_n, lower bound, Φ(m))` with `m = (n - x)/√x` for the integer `n` used.
    pub rows: Vec<(f64, usize, f64, f64, f64)>,
    /// `max(lower bound - g)`; non-positive when the bound holds.
    pub max_violation: f64,
    /// `max |g - Φ(m)| √x`.
    pub max_scaled_deviation: f64,
    /// Smallest `c` with `g ≥ Φ(m) - c/√x` on the sampled points.
    pub fitted_c: f64,
}

pub fn g_lower_bound_check(x: f64, m_grid: &[f64]) -> Result<LowerBoundCheck> {
    if !(x >= 10.0) {
        return Err(Error::InvalidParameters(format!("lower-bound check needs x ≥ 10, got {x}")));
    }
    let sx = x.sqrt();
    let mut rows = Vec::with_capacity(m_grid.len());
    let mut max_violation = f64::NEG_INFINITY;
    let mut max_scaled_deviation: f64 = 0.0;
    let mut fitted_c = f64::NEG_INFINITY;
    for &m in m_grid {
        if !(m > 0.0) {
            return Err(Error::InvalidParameters(format!("m must be positive, got {m}")));
        }
        let mut n = (x + m * sx).round() as usize;
        if n as f64 <= x {
            n = x.floor() as usize + 1;
        }
        let m_eff = (n as f64 - x) / sx;
        let g = regularized_gamma_q(n as f64 + 1.0, x)?;
        let lb = g_lower_bound(n as f64, x)?;
        let phi = cumulative_normal(m_eff);
        max_violation = max_violation.max(lb - g);
        max_scaled_deviation = max_scaled_deviation.max((g - phi).abs() * sx);
        fitted_c = fitted_c.max((phi - g) * sx);
        rows.push((m_eff, n, g, lb, phi));
    }
    Ok(LowerBoundCheck {
        x,
        rows,
        max_violation,
        max_scaled_deviation,
        fitted_c,
    })
}

/// `S2(x,x)` for the Ginibre β=2 ensemble.
pub fn s2_ginibre(x: f64) -> Result<f64> {
    let d = decompose(&EnsembleSpec::ginibre2(), x)?;
    debug_assert_eq!(d.split, split_point(&d.ens, x));
    Ok(d.s2)
}
