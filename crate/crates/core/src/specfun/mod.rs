//! Special functions consumed by the formula layer.
//!
//! Bessel functions are only exposed in exponentially scaled form; callers
//! compose unscaled quantities in log space.

pub mod bessel;
pub mod gamma;
pub mod normal;

pub use bessel::{
    bessel_i_scaled, bessel_i_scaled_orders, bessel_k01_scaled, bessel_k_scaled, bessel_k_scaled_orders,
    incomplete_bessel_i, log_bessel_k, IncompleteBesselTable,
};
pub use gamma::{
    log1pmx, log_factorial, log_gamma, log_regularized_gamma_q, regularized_gamma_p, regularized_gamma_q,
    regularized_gamma_q_with, stirling_correction, stirling_log_factorial, StirlingLogFactorial,
};
pub use normal::{cumulative_normal, dilog, log_cumulative_normal, normal_pdf};

/// Order of a modified Bessel function; only integer orders are needed.
pub type BesselOrder = u32;

/// Iteration controls for series and continued fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionPolicy {
    pub rel_tol: f64,
    pub max_terms: usize,
    pub underflow_floor: f64,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 1_000_000,
            underflow_floor: f64::MIN_POSITIVE,
        }
    }
}

/// `log(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `log Σ e^{v_i}` without overflow.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + values.iter().map(|v| (v - hi).exp()).sum::<f64>().ln()
}

/// `log(1 - e^{a})` for `a ≤ 0`.
pub fn log1m_exp(a: f64) -> f64 {
    if a > -std::f64::consts::LN_2 {
        (-a.exp_m1()).ln()
    } else {
        (-a.exp()).ln_1p()
    }
}
