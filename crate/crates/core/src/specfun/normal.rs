//! Cumulative normal distribution and the dilogarithm.

use std::f64::consts::PI;

use super::gamma::{log_regularized_gamma_q, regularized_gamma_q};
use crate::error::{domain, Result};

/// `Φ(m) = (2π)^{-1/2} ∫_{-∞}^{m} e^{-t²/2} dt`.
pub fn cumulative_normal(m: f64) -> f64 {
    if m.is_nan() {
        return f64::NAN;
    }
    if m.is_infinite() {
        return if m > 0.0 { 1.0 } else { 0.0 };
    }
    let tail = 0.5 * regularized_gamma_q(0.5, 0.5 * m * m).expect("valid arguments");
    if m < 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// `log Φ(m)`, accurate deep in the lower tail.
pub fn log_cumulative_normal(m: f64) -> f64 {
    if m < 0.0 {
        if m == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        0.5f64.ln() + log_regularized_gamma_q(0.5, 0.5 * m * m).expect("valid arguments")
    } else {
        let tail = 0.5 * regularized_gamma_q(0.5, 0.5 * m * m).expect("valid arguments");
        (-tail).ln_1p()
    }
}

/// Standard normal density.
pub fn normal_pdf(m: f64) -> f64 {
    (-0.5 * m * m).exp() / (2.0 * PI).sqrt()
}

fn dilog_series(x: f64) -> f64 {
    let mut power = x;
    let mut sum = x;
    let mut k = 2.0;
    while power.abs() > 1e-18 * sum.abs().max(1e-300) {
        power *= x;
        sum += power / (k * k);
        k += 1.0;
    }
    sum
}

/// Dilogarithm `Li₂(x) = Σ_{k≥1} x^k / k²` on `[-1, 1]`.
pub fn dilog(x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0) {
        return Err(domain("dilog", format!("|x| = {} exceeds 1", x.abs())));
    }
    let zeta2 = PI * PI / 6.0;
    Ok(if x == 1.0 {
        zeta2
    } else if x.abs() <= 0.5 {
        dilog_series(x)
    } else if x > 0.5 {
        zeta2 - x.ln() * (-x).ln_1p() - dilog_series(1.0 - x)
    } else {
        // Landen: Li₂(x) = -Li₂(x/(x-1)) - ½ log²(1-x), with x/(x-1) in (1/3, 1/2]
        let l = (-x).ln_1p();
        -dilog_series(x / (x - 1.0)) - 0.5 * l * l
    })
}
