//! Integer-order modified Bessel functions in exponentially scaled form.
//!
//! `K` is seeded at orders 0 and 1 (Temme series for small argument, Steed's
//! continued fraction otherwise) and recurred upward. `I` uses its power series
//! for moderate argument, Miller's downward recurrence normalised by
//! `e^x = I_0 + 2 Σ I_k` beyond that, and the Hankel expansion for very large
//! argument.

use std::f64::consts::PI;

use super::gamma::log_gamma;
use crate::error::{domain, Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;
const SERIES_LIMIT: f64 = 25.0;
const HANKEL_LIMIT: f64 = 500.0;

fn check_x(func: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(func, format!("x = {x} must be positive and finite")))
    }
}

fn temme_k01(x: f64) -> Result<(f64, f64)> {
    let half = 0.5 * x;
    let d = half * half;
    let mut ff = -EULER_GAMMA - half.ln();
    let mut p = 0.5;
    let mut q = 0.5;
    let mut c = 1.0;
    let mut sum = ff;
    let mut sum1 = p;
    for i in 1..500 {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi);
        c *= d / fi;
        p /= fi;
        q /= fi;
        let del = c * ff;
        sum += del;
        sum1 += c * (p - fi * ff);
        if del.abs() < sum.abs() * 1e-17 {
            let scale = x.exp();
            return Ok((sum * scale, sum1 * 2.0 / x * scale));
        }
    }
    Err(Error::Convergence {
        func: "bessel_k Temme series",
        iterations: 500,
    })
}

fn steed_k01_scaled(x: f64) -> Result<(f64, f64)> {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..100_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            let h = a1 * h;
            let k0 = (PI / (2.0 * x)).sqrt() / s;
            let k1 = k0 * (x + 0.5 - h) / x;
            return Ok((k0, k1));
        }
    }
    Err(Error::Convergence {
        func: "bessel_k Steed fraction",
        iterations: 100_000,
    })
}

/// `(e^x K_0(x), e^x K_1(x))`.
pub fn bessel_k01_scaled(x: f64) -> Result<(f64, f64)> {
    check_x("bessel_k_scaled", x)?;
    if x <= 2.0 {
        temme_k01(x)
    } else {
        steed_k01_scaled(x)
    }
}

/// `e^x K_n(x)` for `n = 0..=nu_max`, by upward recurrence.
pub fn bessel_k_scaled_orders(nu_max: u32, x: f64) -> Result<Vec<f64>> {
    let (k0, k1) = bessel_k01_scaled(x)?;
    let mut out = Vec::with_capacity(nu_max as usize + 1);
    out.push(k0);
    if nu_max >= 1 {
        out.push(k1);
    }
    for n in 1..nu_max as usize {
        let next = out[n - 1] + 2.0 * n as f64 / x * out[n];
        out.push(next);
    }
    Ok(out)
}

/// `e^x K_ν(x)`.
pub fn bessel_k_scaled(nu: u32, x: f64) -> Result<f64> {
    Ok(*bessel_k_scaled_orders(nu, x)?.last().expect("non-empty"))
}

/// `log K_ν(x)`, usable where `K_ν` itself under- or overflows.
pub fn log_bessel_k(nu: u32, x: f64) -> Result<f64> {
    Ok(bessel_k_scaled(nu, x)?.ln() - x)
}

fn i_series_scaled(nu: u32, x: f64) -> f64 {
    let nuf = nu as f64;
    let log_first = nuf * (0.5 * x).ln() - log_gamma(nuf + 1.0).expect("positive") - x;
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut l = 1.0;
    loop {
        term *= q / (l * (l + nuf));
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        l += 1.0;
    }
    (log_first + sum.ln()).exp()
}

fn i_hankel_scaled(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu as f64).powi(2);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= -(mu - odd * odd) / (k as f64 * 8.0 * x);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

fn i_miller_scaled(nu_max: u32, x: f64) -> Vec<f64> {
    let nm = nu_max as f64;
    let start = (nm + (80.0 * (x + nm)).sqrt()).ceil() as usize + 30;
    let mut out = vec![0.0; nu_max as usize + 1];
    let mut next = 0.0;
    let mut cur = 1e-280;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let prev = next + 2.0 * k as f64 / x * cur;
        next = cur;
        cur = prev;
        if k <= nu_max as usize + 1 {
            out[k - 1] = cur;
        }
        norm += 2.0 * next;
        if cur > 1e250 {
            let f = 1e-250;
            cur *= f;
            next *= f;
            norm *= f;
            for v in out.iter_mut() {
                *v *= f;
            }
        }
    }
    // `cur` now holds the unnormalised I_0 and `norm` the sum 2 Σ_{k≥1} I_k
    let total = cur + norm;
    for v in out.iter_mut() {
        *v /= total;
    }
    out
}

/// `e^{-x} I_n(x)` for `n = 0..=nu_max`.
pub fn bessel_i_scaled_orders(nu_max: u32, x: f64) -> Result<Vec<f64>> {
    check_x("bessel_i_scaled", x)?;
    let nm = nu_max as f64;
    if x <= SERIES_LIMIT {
        Ok((0..=nu_max).map(|n| i_series_scaled(n, x)).collect())
    } else if x > HANKEL_LIMIT && nm * nm < 0.5 * x {
        Ok((0..=nu_max).map(|n| i_hankel_scaled(n, x)).collect())
    } else {
        Ok(i_miller_scaled(nu_max, x))
    }
}

/// `e^{-x} I_ν(x)`.
pub fn bessel_i_scaled(nu: u32, x: f64) -> Result<f64> {
    check_x("bessel_i_scaled", x)?;
    let nm = nu as f64;
    if x <= SERIES_LIMIT {
        Ok(i_series_scaled(nu, x))
    } else if x > HANKEL_LIMIT && nm * nm < 0.5 * x {
        Ok(i_hankel_scaled(nu, x))
    } else {
        Ok(i_miller_scaled(nu, x)[nu as usize])
    }
}

/// Log terms and log partial sums of the series of `e^{-x} I_ν(x)`.
///
/// Entry `l` of [`log_terms`](Self::log_term) is `log(e^{-x} (x/2)^{2l+ν} / ((l+ν)! l!))`
/// and entry `k` of the partial sums is `log(e^{-x} I_ν^{[k]}(x))`. Terms are
/// generated by their ratio, so no factorial is ever formed.
#[derive(Debug, Clone)]
pub struct IncompleteBesselTable {
    nu: u32,
    x: f64,
    log_terms: Vec<f64>,
    log_partials: Vec<f64>,
}

impl IncompleteBesselTable {
    pub fn new(nu: u32, x: f64, k_max: usize) -> Result<Self> {
        check_x("incomplete_bessel_i", x)?;
        let nuf = nu as f64;
        let lo0 = nuf * (0.5 * x).ln() - log_gamma(nuf + 1.0)? - x;
        let q = 0.25 * x * x;
        let mut log_terms = Vec::with_capacity(k_max + 1);
        let mut log_partials = Vec::with_capacity(k_max + 1);

        // running partial sum p·e^{lo}; running term m·e^{lo_m}
        let mut lo = lo0;
        let mut p = 1.0f64;
        let mut lo_m = lo0;
        let mut m = 1.0f64;
        log_terms.push(lo0);
        log_partials.push(lo0);
        for l in 1..=k_max {
            let lf = l as f64;
            m *= q / (lf * (lf + nuf));
            if m < 1e-200 {
                lo_m += m.ln();
                m = 1.0;
            }
            let add = if lo_m == lo { m } else { m * (lo_m - lo).exp() };
            p += add;
            if p > 1e250 {
                let shift = p.ln();
                if lo_m == lo {
                    m /= p;
                    lo_m = lo + shift;
                }
                lo += shift;
                p = 1.0;
            }
            log_terms.push(lo_m + m.ln());
            log_partials.push(lo + p.ln());
        }
        Ok(Self {
            nu,
            x,
            log_terms,
            log_partials,
        })
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn k_max(&self) -> usize {
        self.log_terms.len() - 1
    }

    /// `log(e^{-x} (x/2)^{2l+ν} / ((l+ν)! l!))`.
    pub fn log_term(&self, l: usize) -> f64 {
        self.log_terms[l]
    }

    /// `log(e^{-x} I_ν^{[k]}(x))`; `-∞` for negative `k`.
    pub fn log_partial(&self, k: i64) -> f64 {
        if k < 0 {
            f64::NEG_INFINITY
        } else {
            self.log_partials[k as usize]
        }
    }
}

/// Incomplete Bessel function `I_ν^{[k]}(x) = Σ_{l=0}^{k} (x/2)^{2l+ν}/((l+ν)! l!)`,
/// exactly zero for negative `k`.
pub fn incomplete_bessel_i(nu: u32, k: i64, x: f64) -> Result<f64> {
    check_x("incomplete_bessel_i", x)?;
    if k < 0 {
        return Ok(0.0);
    }
    if x < 300.0 && nu < 100 {
        let half = 0.5 * x;
        let mut term = (1..=nu).fold(1.0, |acc, i| acc * half / i as f64);
        let mut sum = term;
        let nuf = nu as f64;
        for l in 1..=k {
            let lf = l as f64;
            term *= half * half / (lf * (lf + nuf));
            sum += term;
        }
        return Ok(sum);
    }
    let table = IncompleteBesselTable::new(nu, x, k as usize)?;
    Ok((table.log_partial(k) + x).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, integrate_to_inf, QuadTolerance};

    fn k0_oracle(x: f64) -> f64 {
        integrate_to_inf(
            |t: f64| (-x * (t.cosh() - 1.0)).exp(),
            0.0,
            QuadTolerance::relative(1e-14),
        )
        .unwrap()
        .value
    }

    fn i_oracle(nu: u32, x: f64) -> f64 {
        integrate(
            |t: f64| (x * (t.cos() - 1.0)).exp() * (nu as f64 * t).cos(),
            0.0,
            PI,
            QuadTolerance::relative(1e-14),
        )
        .unwrap()
        .value
            / PI
    }

    #[test]
    fn k0_against_integral() {
        for x in [0.01, 0.5, 1.0, 1.99, 2.01, 7.0, 40.0] {
            let k = bessel_k_scaled(0, x).unwrap();
            let o = k0_oracle(x);
            assert!(((k - o) / o).abs() < 1e-12, "x={x}: {k} vs {o}");
        }
    }

    #[test]
    fn k1_against_integral() {
        for x in [0.1, 1.0, 3.0, 25.0] {
            let o = integrate_to_inf(
                |t: f64| if t > 600.0 { 0.0 } else { (-x * (t.cosh() - 1.0)).exp() * t.cosh() },
                0.0,
                QuadTolerance::relative(1e-14),
            )
            .unwrap()
            .value;
            let k = bessel_k_scaled(1, x).unwrap();
            assert!(((k - o) / o).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn k_large_argument_limit() {
        for x in [1e3, 1e5, 1e6] {
            let k = bessel_k_scaled(0, x).unwrap();
            let lim = (PI / (2.0 * x)).sqrt();
            assert!(((k - lim) / lim).abs() < 1.0 / (4.0 * x));
            assert!(k.is_finite() && k > 0.0);
        }
    }

    #[test]
    fn k_recurrence_identity() {
        for x in [0.3, 1.0, 4.0, 30.0] {
            let ks = bessel_k_scaled_orders(6, x).unwrap();
            for nu in 0..5 {
                let rhs = ks[nu] + 2.0 * (nu as f64 + 1.0) / x * ks[nu + 1];
                assert!(((ks[nu + 2] - rhs) / rhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn i_against_integral() {
        for &(nu, x) in &[(0, 0.2), (1, 2.0), (3, 10.0), (2, 24.9), (0, 25.1), (4, 80.0), (1, 400.0), (2, 600.0)] {
            let v = bessel_i_scaled(nu, x).unwrap();
            let o = i_oracle(nu, x);
            assert!(((v - o) / o).abs() < 1e-12, "nu={nu} x={x}: {v} vs {o}");
        }
    }

    #[test]
    fn i_small_argument_limit() {
        assert!((bessel_i_scaled(0, 1e-12).unwrap() - 1.0).abs() < 1e-11);
        assert!(bessel_i_scaled(0, 0.0).is_err());
        assert!(bessel_k_scaled(0, -1.0).is_err());
    }

    #[test]
    fn regimes_agree_across_boundaries() {
        for nu in 0..6u32 {
            let s = i_series_scaled(nu, 40.0);
            let m = i_miller_scaled(nu, 40.0)[nu as usize];
            assert!(((s - m) / s).abs() < 1e-13, "nu={nu}");
            let h = i_hankel_scaled(nu, 700.0);
            let m = i_miller_scaled(nu, 700.0)[nu as usize];
            assert!(((h - m) / h).abs() < 1e-13, "nu={nu}");
        }
    }

    #[test]
    fn wronskian() {
        for nu in 0..=4u32 {
            for x in [0.5, 1.0, 5.0, 20.0, 50.0] {
                let i = bessel_i_scaled_orders(nu + 1, x).unwrap();
                let k = bessel_k_scaled_orders(nu + 1, x).unwrap();
                let w = x * (i[nu as usize + 1] * k[nu as usize] + i[nu as usize] * k[nu as usize + 1]);
                assert!((1.0 - w).abs() < 1e-12, "nu={nu} x={x}: {w}");
            }
        }
    }

    #[test]
    fn incomplete_bessel_cases() {
        assert_eq!(incomplete_bessel_i(3, -1, 2.0).unwrap(), 0.0);
        assert!((incomplete_bessel_i(0, 0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        let full = bessel_i_scaled(1, 3.0).unwrap() * 3f64.exp();
        let part = incomplete_bessel_i(1, 60, 3.0).unwrap();
        assert!(((full - part) / full).abs() < 1e-12);
        let mut last = 0.0;
        for k in 0..20 {
            let v = incomplete_bessel_i(2, k, 5.0).unwrap();
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn incomplete_table_survives_huge_arguments() {
        let x = 2.0e5;
        let t = IncompleteBesselTable::new(1, x, 150_000).unwrap();
        let full = bessel_i_scaled(1, x).unwrap().ln();
        assert!((t.log_partial(150_000) - full).abs() < 1e-9);
        assert!(t.log_partial(10).is_finite());
    }
}
