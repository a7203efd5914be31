use std::f64::consts::{LN_2, PI};

use gapfredholm::specfun::*;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

#[test]
fn bessel_table_values() {
    // Abramowitz & Stegun tables at x = 1 and x = 5
    let k0_1 = 0.421_024_438_240_708_3;
    let k1_1 = 0.601_907_230_197_234_6;
    let i0_1 = 1.266_065_877_752_008_4;
    let i1_1 = 0.565_159_103_992_485_0;
    let e = 1f64.exp();
    assert!(close(bessel_k_scaled(0, 1.0).unwrap(), k0_1 * e, 1e-14));
    assert!(close(bessel_k_scaled(1, 1.0).unwrap(), k1_1 * e, 1e-14));
    assert!(close(bessel_i_scaled(0, 1.0).unwrap(), i0_1 / e, 1e-14));
    assert!(close(bessel_i_scaled(1, 1.0).unwrap(), i1_1 / e, 1e-14));
    let k0_5 = 3.691_098_334_042_594e-3;
    let i0_5 = 27.239_871_823_604_44;
    assert!(close(bessel_k_scaled(0, 5.0).unwrap(), k0_5 * 5f64.exp(), 1e-13));
    assert!(close(bessel_i_scaled(0, 5.0).unwrap(), i0_5 * (-5f64).exp(), 1e-13));
}

#[test]
fn scaled_bessel_survives_large_arguments() {
    let x = 1e5;
    let k = bessel_k_scaled(3, x).unwrap();
    let i = bessel_i_scaled(3, x).unwrap();
    // leading asymptotics √(π/2x) and 1/√(2πx)
    assert!(close(k, (PI / (2.0 * x)).sqrt(), 1e-4));
    assert!(close(i, 1.0 / (2.0 * PI * x).sqrt(), 1e-4));
    assert!(close(x * (bessel_i_scaled(4, x).unwrap() * k + i * bessel_k_scaled(4, x).unwrap()), 1.0, 1e-12));
}

#[test]
fn order_sequences_match_single_orders() {
    let ks = bessel_k_scaled_orders(6, 2.5).unwrap();
    let is = bessel_i_scaled_orders(6, 2.5).unwrap();
    for nu in 0..=6u32 {
        assert!(close(ks[nu as usize], bessel_k_scaled(nu, 2.5).unwrap(), 1e-13));
        assert!(close(is[nu as usize], bessel_i_scaled(nu, 2.5).unwrap(), 1e-13));
    }
}

#[test]
fn incomplete_bessel_tends_to_complete() {
    let full = bessel_i_scaled(2, 3.0).unwrap() * 3f64.exp();
    assert!(close(incomplete_bessel_i(2, 60, 3.0).unwrap(), full, 1e-14));
    // first term only: (x/2)^ν / ν!
    assert!(close(incomplete_bessel_i(2, 0, 3.0).unwrap(), 1.5 * 1.5 / 2.0, 1e-15));
}

#[test]
fn incomplete_gamma_identities() {
    for &(s, x) in &[(1.0, 0.3), (3.0, 2.0), (10.5, 12.0), (50.0, 40.0)] {
        let p = regularized_gamma_p(s, x).unwrap();
        let q = regularized_gamma_q(s, x).unwrap();
        assert!((p + q - 1.0).abs() < 1e-14);
    }
    // Q(1, x) = e^{-x}, Q(2, x) = (1 + x) e^{-x}
    assert!(close(regularized_gamma_q(1.0, 3.7).unwrap(), (-3.7f64).exp(), 1e-14));
    assert!(close(regularized_gamma_q(2.0, 3.7).unwrap(), 4.7 * (-3.7f64).exp(), 1e-14));
    // Q(1/2, x) = erfc(√x); erfc(1) from tables
    assert!(close(regularized_gamma_q(0.5, 1.0).unwrap(), 0.157_299_207_050_285_13, 1e-13));
    let lq = log_regularized_gamma_q(5.0, 400.0).unwrap();
    let direct = -400.0 + (1.0 + 400.0 + 400f64.powi(2) / 2.0 + 400f64.powi(3) / 6.0 + 400f64.powi(4) / 24.0).ln();
    assert!(close(lq, direct, 1e-13));
}

#[test]
fn normal_and_dilog() {
    assert!(close(cumulative_normal(1.0), 0.841_344_746_068_542_9, 1e-14));
    assert!(close(cumulative_normal(-2.0), 0.022_750_131_948_179_21, 1e-13));
    assert!(close(dilog(-1.0).unwrap(), -PI * PI / 12.0, 1e-14));
    assert!(close(dilog(0.5).unwrap(), PI * PI / 12.0 - LN_2 * LN_2 / 2.0, 1e-14));
    assert!(close(dilog(1.0).unwrap(), PI * PI / 6.0, 1e-14));
}

#[test]
fn log_gamma_and_stirling() {
    assert!(close(log_gamma(0.5).unwrap(), 0.5 * PI.ln(), 1e-14));
    assert!(close(log_factorial(20), (2_432_902_008_176_640_000f64).ln(), 1e-15));
    // 1/(12n) - 1/(360n³) < log n! - Stirling < 1/(12n)
    for n in [10.0, 100.0] {
        let r = stirling_log_factorial(n).unwrap().residual;
        assert!(r < 1.0 / (12.0 * n) && r > 1.0 / (12.0 * n) - 1.0 / (360.0 * n * n * n));
    }
}
