//! Fredholm eigenvalues at maximal non-Hermiticity.
//!
//! Every eigenvalue is a ratio of an incomplete to a complete radial moment,
//! `λ_j(x) = ∫_0^x w(t) t^{p_j} dt / ∫_0^∞ w(t) t^{p_j} dt`, with `w(t) = e^{-t}`
//! (Ginibre) or `w(t) = K_ν(t)` (chiral). Three evaluation routes exist:
//!
//! * closed forms in terms of incomplete gamma / incomplete Bessel-I sums,
//!   giving `1 - λ` as a sum of positive terms;
//! * the moment recursion `F(k+1) = 4(k+1)(k+1+ν) F(k) - D'_k`, normalised so
//!   that `λ_k = λ_{k+1} + D_k` and `1 - λ_{k+1} = (1 - λ_k) + D_k`;
//!   run downward for `λ` and upward for `1 - λ`, both only add positive terms;
//! * direct adaptive quadrature of the two moments, used as an oracle.
//!
//! β=4 spectra are the odd-index eigenvalues of the β=2 spectrum with the same
//! radial weight, and are always taken from that sequence.

use crate::ensemble::{EnsembleSpec, Family};
use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_to_inf, QuadTolerance};
use crate::specfun::{
    bessel_k_scaled, bessel_k_scaled_orders, log_add_exp, log_factorial, log_sum_exp, IncompleteBesselTable,
};

/// One eigenvalue together with its complement and x-derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub lambda: f64,
    /// `1 - λ`, accurate even when it underflows relative to `λ`.
    pub one_minus: f64,
    /// `log(1 - λ)`, finite far below the double-precision range.
    pub log_one_minus: f64,
    /// `dλ/dx`.
    pub dlambda_dx: f64,
}

impl Eigenvalue {
    fn zero() -> Self {
        Self {
            lambda: 0.0,
            one_minus: 1.0,
            log_one_minus: 0.0,
            dlambda_dx: 0.0,
        }
    }
}

/// The leading eigenvalues at one scaled radius.
#[derive(Debug, Clone, PartialEq)]
pub struct FredholmSpectrum {
    pub ensemble: EnsembleSpec,
    pub x: f64,
    pub eigenvalues: Vec<Eigenvalue>,
    /// Number of retained eigenvalues.
    pub truncation: usize,
    /// Upper bound on `Σ_{j ≥ truncation} λ_j`.
    pub tail_bound: f64,
}

impl FredholmSpectrum {
    pub fn lambdas(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|e| e.lambda).collect()
    }

    pub fn one_minus_lambdas(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|e| e.one_minus).collect()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// `F_ν(k, x) / F_ν(k, ∞)` from the moment recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FNormalized {
    pub k: usize,
    pub nu: u32,
    pub x: f64,
    pub value: f64,
    /// `1 - value`, from the upward complement recursion.
    pub one_minus: f64,
}

fn check_x(x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!("scaled radius x = {x} must be finite and non-negative")))
    }
}

/// Ginibre β=2 eigenvalues `λ_j = P(j+1, x)` for `j = 0..=k_max`.
///
/// Below `j = x` the complement is `t_j r_j` with `t_j = e^{-x} x^j / j!`
/// and `r_j = 1 + (j/x) r_{j-1}`; from `j = x` on, `λ_j = Σ_{k>j} t_k` is
/// accumulated from the far tail backwards.
pub fn ginibre_sequence(x: f64, k_max: usize) -> Vec<Eigenvalue> {
    if x == 0.0 {
        return vec![Eigenvalue::zero(); k_max + 1];
    }
    let k_end = (k_max + 30).max((x + 14.0 * x.sqrt() + 30.0).ceil() as usize);
    let lx = x.ln();
    let log_t: Vec<f64> = (0..=k_end + 1)
        .map(|k| k as f64 * lx - x - log_factorial(k as u64))
        .collect();

    let mut log_tail = vec![f64::NEG_INFINITY; k_max + 1];
    let mut acc = f64::NEG_INFINITY;
    for n in (0..=k_end).rev() {
        acc = log_add_exp(acc, log_t[n + 1]);
        if n <= k_max {
            log_tail[n] = acc;
        }
    }

    let mut out = Vec::with_capacity(k_max + 1);
    let mut r = 1.0;
    for n in 0..=k_max {
        if n > 0 {
            r = 1.0 + n as f64 / x * r;
        }
        let (lambda, log_g) = if (n as f64) < x {
            let log_g = log_t[n] + r.ln();
            (-log_g.exp_m1(), log_g)
        } else {
            let lambda = log_tail[n].exp();
            (lambda, (-lambda).ln_1p())
        };
        out.push(Eigenvalue {
            lambda,
            one_minus: log_g.exp(),
            log_one_minus: log_g,
            dlambda_dx: log_t[n].exp(),
        });
    }
    out
}

/// All three chiral β=2 routes for `k = 0..=k_max` at Bessel weight index `w`.
#[derive(Debug, Clone)]
pub struct ChiralRoutes {
    pub w: u32,
    pub x: f64,
    /// `log(1 - λ_k)` from the closed form.
    pub closed_log_one_minus: Vec<f64>,
    /// `log λ_k` from the downward recursion.
    pub recursion_log_lambda: Vec<f64>,
    /// `log(1 - λ_k)` from the upward complement recursion.
    pub recursion_log_one_minus: Vec<f64>,
    /// `log dλ_k/dx`.
    pub log_dlambda: Vec<f64>,
}

impl ChiralRoutes {
    pub fn new(w: u32, x: f64, k_max: usize) -> Result<Self> {
        if !(x > 0.0) {
            return Err(Error::InvalidParameters(format!("chiral routes need x > 0, got {x}")));
        }
        let m_end = (k_max + 30).max((0.5 * x + 7.0 * x.sqrt() + 30.0).ceil() as usize);
        let t0 = IncompleteBesselTable::new(w, x, m_end + 1)?;
        let t1 = IncompleteBesselTable::new(w + 1, x, k_max)?;
        let t2 = IncompleteBesselTable::new(w + 2, x, k_max)?;
        let ks = bessel_k_scaled_orders(w + 2, x)?;
        let (k_w, k_w1, k_w2) = (ks[w as usize], ks[w as usize + 1], ks[w as usize + 2]);
        let (ln_k_w, ln_k_w1, ln_k_w2) = (k_w.ln(), k_w1.ln(), k_w2.ln());
        let ln_x = x.ln();

        let closed_log_one_minus = (0..=k_max)
            .map(|k| {
                let ki = k as i64;
                ln_x + log_sum_exp(&[
                    ln_k_w1 + t0.log_term(k),
                    ln_k_w1 + t2.log_partial(ki - 2),
                    ln_k_w2 + t1.log_partial(ki - 1),
                ])
            })
            .collect();

        let log_d: Vec<f64> = (0..=m_end)
            .map(|m| t0.log_term(m + 1) + (x * k_w1 + 2.0 * (m as f64 + 1.0) * k_w).ln())
            .collect();

        let mut recursion_log_lambda = vec![f64::NEG_INFINITY; k_max + 1];
        let mut acc = f64::NEG_INFINITY;
        for m in (0..=m_end).rev() {
            acc = log_add_exp(acc, log_d[m]);
            if m <= k_max {
                recursion_log_lambda[m] = acc;
            }
        }

        let mut recursion_log_one_minus = Vec::with_capacity(k_max + 1);
        let mut g = ln_x + t0.log_term(0) + ln_k_w1;
        recursion_log_one_minus.push(g);
        for d in log_d.iter().take(k_max) {
            g = log_add_exp(g, *d);
            recursion_log_one_minus.push(g);
        }

        let log_dlambda = (0..=k_max).map(|k| ln_x + t0.log_term(k) + ln_k_w).collect();

        Ok(Self {
            w,
            x,
            closed_log_one_minus,
            recursion_log_lambda,
            recursion_log_one_minus,
            log_dlambda,
        })
    }

    fn eigenvalue(&self, k: usize) -> Eigenvalue {
        let log_g = self.closed_log_one_minus[k].min(0.0);
        let rec_lambda = self.recursion_log_lambda[k].exp();
        let lambda = if rec_lambda <= 0.5 { rec_lambda } else { -log_g.exp_m1() };
        Eigenvalue {
            lambda,
            one_minus: log_g.exp(),
            log_one_minus: log_g,
            dlambda_dx: self.log_dlambda[k].exp(),
        }
    }
}

/// Chiral β=2 eigenvalues for `k = 0..=k_max` at Bessel weight index `w`.
pub fn chiral_sequence(w: u32, x: f64, k_max: usize) -> Result<Vec<Eigenvalue>> {
    if x == 0.0 {
        return Ok(vec![Eigenvalue::zero(); k_max + 1]);
    }
    let routes = ChiralRoutes::new(w, x, k_max)?;
    Ok((0..=k_max).map(|k| routes.eigenvalue(k)).collect())
}

/// β=2 sequence for the partner of `ens`, indices `0..=k_max`.
fn beta2_sequence(ens: &EnsembleSpec, x: f64, k_max: usize) -> Result<Vec<Eigenvalue>> {
    match ens.family() {
        Family::GinibreBeta2 | Family::GinibreBeta4 => Ok(ginibre_sequence(x, k_max)),
        Family::ChiralBeta2 | Family::ChiralBeta4 => chiral_sequence(ens.weight_index(), x, k_max),
    }
}

/// The first `n` eigenvalues of `ens` (no truncation test).
pub fn eigenvalues(ens: &EnsembleSpec, x: f64, n: usize) -> Result<Vec<Eigenvalue>> {
    check_x(x)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    if ens.beta() == 2 {
        beta2_sequence(ens, x, n - 1)
    } else {
        let seq = beta2_sequence(ens, x, 2 * n - 1)?;
        Ok(seq.into_iter().skip(1).step_by(2).collect())
    }
}

/// `λ_j = 1 - Q(j+1, x)` for the Ginibre β=2 ensemble.
pub fn lambda_ginibre2(j: usize, x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(ginibre_sequence(x, j)[j].lambda)
}

/// `1 - λ_j = Q(j+1, x)` for the Ginibre β=2 ensemble.
pub fn one_minus_lambda_ginibre2(j: usize, x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(ginibre_sequence(x, j)[j].one_minus)
}

/// Ginibre β=4 eigenvalue, identical to `lambda_ginibre2(2j+1, x)`.
pub fn lambda_ginibre4(j: usize, x: f64) -> Result<f64> {
    lambda_ginibre2(2 * j + 1, x)
}

/// `F_ν(k, x)/F_ν(k, ∞)` and its complement from the moment recursion.
pub fn f_ratio_chiral(k: usize, nu: u32, x: f64) -> Result<FNormalized> {
    check_x(x)?;
    if x == 0.0 {
        return Ok(FNormalized {
            k,
            nu,
            x,
            value: 0.0,
            one_minus: 1.0,
        });
    }
    let routes = ChiralRoutes::new(nu, x, k)?;
    Ok(FNormalized {
        k,
        nu,
        x,
        value: routes.recursion_log_lambda[k].exp(),
        one_minus: routes.recursion_log_one_minus[k].exp(),
    })
}

/// `log(1 - λ_k)` of the chiral β=2 ensemble from the closed form.
pub fn log_one_minus_lambda_chiral2(k: usize, nu: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParameters(format!("closed form needs x > 0, got {x}")));
    }
    Ok(ChiralRoutes::new(nu, x, k)?.closed_log_one_minus[k])
}

/// `1 - λ_k` of the chiral β=2 ensemble from the closed form.
pub fn one_minus_lambda_chiral2(k: usize, nu: u32, x: f64) -> Result<f64> {
    Ok(log_one_minus_lambda_chiral2(k, nu, x)?.exp())
}

/// Chiral β=2 eigenvalue `λ_k`.
pub fn lambda_chiral2(k: usize, nu: u32, x: f64) -> Result<f64> {
    Ok(f_ratio_chiral(k, nu, x)?.value)
}

/// Chiral β=4 eigenvalue, identical to `f_ratio_chiral(2k+1, 2ν, x)`.
pub fn lambda_chiral4(k: usize, nu: u32, x: f64) -> Result<f64> {
    Ok(f_ratio_chiral(2 * k + 1, 2 * nu, x)?.value)
}

/// Value and absolute error estimate of a quadrature oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    pub abs_err: f64,
}

/// `λ_j` from adaptive quadrature of both defining moments.
pub fn quadrature_lambda(ens: &EnsembleSpec, j: usize, x: f64) -> Result<OracleValue> {
    check_x(x)?;
    if x == 0.0 {
        return Ok(OracleValue { value: 0.0, abs_err: 0.0 });
    }
    let index = if ens.beta() == 4 { 2 * j + 1 } else { j };
    let (power, log_norm_guess, weight) = if ens.is_chiral() {
        let w = ens.weight_index();
        let p = (2 * index) as f64 + w as f64 + 1.0;
        let guess = (2 * index + w as usize) as f64 * std::f64::consts::LN_2
            + log_factorial((index + w as usize) as u64)
            + log_factorial(index as u64);
        (p, guess, Some(w))
    } else {
        (index as f64, log_factorial(index as u64), None)
    };
    // integrand divided by the analytic norm keeps both moments O(1)
    let integrand = move |t: f64| -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let log_w = match weight {
            Some(w) => match bessel_k_scaled(w, t) {
                Ok(k) => k.ln() - t,
                Err(_) => return 0.0,
            },
            None => -t,
        };
        (power * t.ln() + log_w - log_norm_guess).exp()
    };
    let tol = QuadTolerance::relative(1e-13).with_abs(1e-300);
    let num = integrate(integrand, 0.0, x, tol)?;
    let den = integrate_to_inf(integrand, 0.0, tol)?;
    let value = num.value / den.value;
    let abs_err = num.abs_err / den.value + value * den.abs_err / den.value;
    Ok(OracleValue { value, abs_err })
}

/// Cap on the number of retained eigenvalues at scaled radius `x`.
pub fn truncation_cap(x: f64) -> usize {
    (4.0 * x + 200.0).ceil() as usize
}

fn initial_length(ens: &EnsembleSpec, x: f64) -> usize {
    let beta2_len = if ens.is_chiral() {
        0.5 * x + 8.0 * x.sqrt() + 40.0
    } else {
        x + 12.0 * x.sqrt() + 40.0
    };
    let len = if ens.beta() == 4 { 0.5 * beta2_len + 1.0 } else { beta2_len };
    (len.ceil() as usize).min(truncation_cap(x))
}

fn truncate(ens: &EnsembleSpec, x: f64, all: Vec<Eigenvalue>, eps: f64) -> Option<FredholmSpectrum> {
    let lam: Vec<f64> = all.iter().map(|e| e.lambda).collect();
    let len = lam.len();
    // suffix sums of the retained values
    let mut suffix = vec![0.0; len + 1];
    for j in (0..len).rev() {
        suffix[j] = suffix[j + 1] + lam[j];
    }
    for n in 0..len.saturating_sub(1) {
        if lam[n] >= eps {
            continue;
        }
        let last = lam[len - 1];
        let prev = lam[len - 2];
        let ratio = if prev > 0.0 { last / prev } else { 0.0 };
        if ratio >= 1.0 {
            return None;
        }
        let beyond = last * ratio / (1.0 - ratio);
        let tail = suffix[n] + beyond;
        if tail < eps {
            let mut eigenvalues = all;
            eigenvalues.truncate(n);
            return Some(FredholmSpectrum {
                ensemble: *ens,
                x,
                eigenvalues,
                truncation: n,
                tail_bound: tail,
            });
        }
    }
    None
}

/// Leading eigenvalues until both `λ_n < eps` and the tail sum is below `eps`.
pub fn spectrum(ens: &EnsembleSpec, x: f64, eps: f64) -> Result<FredholmSpectrum> {
    check_x(x)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameters(format!("eps = {eps} must lie in (0, 1)")));
    }
    if x == 0.0 {
        return Ok(FredholmSpectrum {
            ensemble: *ens,
            x,
            eigenvalues: Vec::new(),
            truncation: 0,
            tail_bound: 0.0,
        });
    }
    let cap = truncation_cap(x);
    let first = initial_length(ens, x);
    for len in [first, cap] {
        let all = eigenvalues(ens, x, len)?;
        if let Some(s) = truncate(ens, x, all, eps) {
            return Ok(s);
        }
    }
    let partial = eigenvalues(ens, x, cap)?;
    Err(Error::Truncation {
        cap,
        last: partial.last().map_or(0.0, |e| e.lambda),
        partial: partial.iter().map(|e| e.lambda).collect(),
    })
}

/// Exactly `n` eigenvalues, as used for finite-N products and truncated sums.
pub fn spectrum_fixed(ens: &EnsembleSpec, x: f64, n: usize) -> Result<FredholmSpectrum> {
    let eigenvalues = eigenvalues(ens, x, n)?;
    let next = eigenvalues_tail_estimate(ens, x, n)?;
    Ok(FredholmSpectrum {
        ensemble: *ens,
        x,
        eigenvalues,
        truncation: n,
        tail_bound: next,
    })
}

fn eigenvalues_tail_estimate(ens: &EnsembleSpec, x: f64, n: usize) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let extra = eigenvalues(ens, x, initial_length(ens, x).max(n + 2))?;
    Ok(extra.iter().skip(n).map(|e| e.lambda).sum())
}
