//! Gap probabilities of the chiral ensembles at general non-Hermiticity `0 < μ ≤ 1`.
//!
//! Away from `μ = 1` the weight is no longer rotationally invariant and the
//! moment matrix of the monomials `z^{2(k-1)}` stops being diagonal. `E_0` is
//! then a ratio of determinants (β=2) or Pfaffians (β=4) of the moment
//! matrices over the outside of the disc and over the whole plane.
//!
//! Everything here is at finite `N`: `r` is the unscaled radius and `N`
//! enters through `a = N(1+μ²)/(2μ²)` and `b = N(1-μ²)/(2μ²)`. The Ginibre
//! ensembles at general `τ` are not covered.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::ensemble::EnsembleSpec;
use crate::error::{domain, Error, Result};
use crate::fredholm::eigenvalues;
use crate::quad::{integrate, integrate_to_inf, GaussLegendre, QuadTolerance};
use crate::specfun::{bessel_i_scaled, bessel_k_scaled};

/// Largest matrix size accepted by the determinant route.
pub const MAX_N_BETA2: usize = 8;
/// Largest matrix size accepted by the Pfaffian route.
pub const MAX_N_BETA4: usize = 6;
/// Condition number above which results are flagged.
pub const ILL_CONDITIONED: f64 = 1e12;

const MOMENT_TOL: f64 = 1e-13;
const ANGULAR_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticParams {
    mu: f64,
    n: usize,
    nu: u32,
}

impl EllipticParams {
    pub fn new(mu: f64, n: usize, nu: u32) -> Result<Self> {
        if !(mu > 0.0 && mu <= 1.0) {
            return Err(Error::InvalidParameters(format!("μ = {mu} must lie in (0, 1]")));
        }
        if n == 0 || n > MAX_N_BETA2 {
            return Err(Error::InvalidParameters(format!(
                "matrix size N = {n} must lie in 1..={MAX_N_BETA2}"
            )));
        }
        Ok(Self { mu, n, nu })
    }

    /// General-τ Ginibre moment matrices are not available.
    pub fn ginibre(tau: f64, n: usize) -> Result<Self> {
        Err(Error::InvalidParameters(format!(
            "general non-Hermiticity is implemented for the chiral ensembles only (got Ginibre τ = {tau}, N = {n})"
        )))
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    /// `a = N(1+μ²)/(2μ²)`.
    pub fn a(&self) -> f64 {
        let m2 = self.mu * self.mu;
        self.n as f64 * (1.0 + m2) / (2.0 * m2)
    }

    /// `b = N(1-μ²)/(2μ²)`.
    pub fn b(&self) -> f64 {
        let m2 = self.mu * self.mu;
        self.n as f64 * (1.0 - m2) / (2.0 * m2)
    }
}

/// Radial integration range in `t = |z|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Range {
    /// `[0, r²]`.
    Inside(f64),
    /// `[r², ∞)`.
    Outside(f64),
    Full,
}

fn radial_integral<F: Fn(f64) -> f64>(f: F, range: Range) -> Result<f64> {
    let tol = QuadTolerance::relative(MOMENT_TOL).with_abs(1e-300);
    let value = match range {
        Range::Inside(r2) if r2 <= 0.0 => 0.0,
        Range::Inside(r2) => integrate(&f, 0.0, r2, tol)?.value,
        Range::Outside(r2) => integrate_to_inf(&f, r2.max(0.0), tol)?.value,
        Range::Full => integrate_to_inf(&f, 0.0, tol)?.value,
    };
    Ok(value)
}

/// `e^{-y} I_m(y)`, including `y = 0`.
fn i_scaled_or_zero(m: u32, y: f64) -> f64 {
    if y > 0.0 {
        bessel_i_scaled(m, y).unwrap_or(f64::NAN)
    } else if m == 0 {
        1.0
    } else {
        0.0
    }
}

/// `π ∫ t^{k+j+ν-1} K_ν(at) I_{|k-j|}(bt) dt` over `range`, for `k, j ≥ 1`.
///
/// This is the plane integral of `w(z) z^{2(k-1)} z̄^{2(j-1)}`; the angular
/// integral of `e^{bt cos 2θ} e^{2i(k-j)θ}` produces `2π I_{|k-j|}(bt)`.
pub fn moment_integral(k: usize, j: usize, params: &EllipticParams, range: Range) -> Result<f64> {
    if k == 0 || j == 0 {
        return Err(Error::InvalidParameters("moment indices start at 1".into()));
    }
    let (a, b) = (params.a(), params.b());
    let nu = params.nu;
    let m = k.abs_diff(j) as u32;
    let power = (k + j) as f64 + nu as f64 - 1.0;
    let integrand = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let log_scale = power * t.ln() - (a - b) * t;
        let k_scaled = bessel_k_scaled(nu, a * t).unwrap_or(f64::NAN);
        PI * log_scale.exp() * k_scaled * i_scaled_or_zero(m, b * t)
    };
    let v = radial_integral(integrand, range)?;
    if v.is_nan() {
        return Err(domain("moment_integral", format!("non-finite integrand for k = {k}, j = {j}")));
    }
    Ok(v)
}

fn check_ab(a: f64, b: f64, r2: f64) -> Result<()> {
    if !(a > b && b >= 0.0) || !(r2 > 0.0) {
        return Err(domain("closed_form_f", format!("needs a > b ≥ 0 and r² > 0, got a = {a}, b = {b}, r² = {r2}")));
    }
    Ok(())
}

/// Products `I_μ(b R) K_ν(a R)` for `μ, ν ∈ {0, 1}` with the common factor `e^{-(a-b)R}` included.
struct BesselProducts {
    i0k0: f64,
    i0k1: f64,
    i1k0: f64,
    i1k1: f64,
}

impl BesselProducts {
    fn new(a: f64, b: f64, r2: f64) -> Result<Self> {
        let e = (-(a - b) * r2).exp();
        let (k0, k1) = (bessel_k_scaled(0, a * r2)?, bessel_k_scaled(1, a * r2)?);
        let (i0, i1) = (i_scaled_or_zero(0, b * r2), i_scaled_or_zero(1, b * r2));
        Ok(Self {
            i0k0: e * i0 * k0,
            i0k1: e * i0 * k1,
            i1k0: e * i1 * k0,
            i1k1: e * i1 * k1,
        })
    }
}

/// `∫_{r²}^∞ t K_0(at) I_0(bt) dt = [b r² I_1(br²) K_0(ar²) + a r² I_0(br²) K_1(ar²)] / (a² - b²)`.
pub fn closed_form_f(a: f64, b: f64, r2: f64) -> Result<f64> {
    check_ab(a, b, r2)?;
    let p = BesselProducts::new(a, b, r2)?;
    Ok((b * r2 * p.i1k0 + a * r2 * p.i0k1) / (a * a - b * b))
}

/// `∫_{r²}^∞ t² K_1(at) I_0(bt) dt = -∂_a f`.
pub fn closed_form_k1_i0(a: f64, b: f64, r2: f64) -> Result<f64> {
    check_ab(a, b, r2)?;
    let p = BesselProducts::new(a, b, r2)?;
    let d = a * a - b * b;
    let numer = b * r2 * p.i1k0 + a * r2 * p.i0k1;
    let u = b * r2 * r2 * p.i1k1 + a * r2 * r2 * p.i0k0;
    Ok(u / d + 2.0 * a * numer / (d * d))
}

/// `∫_{r²}^∞ t³ K_1(at) I_1(bt) dt = -∂_b ∂_a f`.
pub fn closed_form_k1_i1(a: f64, b: f64, r2: f64) -> Result<f64> {
    check_ab(a, b, r2)?;
    let p = BesselProducts::new(a, b, r2)?;
    let d = a * a - b * b;
    let r4 = r2 * r2;
    let numer = b * r2 * p.i1k0 + a * r2 * p.i0k1;
    let d_numer = b * r4 * p.i0k0 + a * r4 * p.i1k1;
    let u = b * r4 * p.i1k1 + a * r4 * p.i0k0;
    let d_u = b * r4 * r2 * p.i0k1 + a * r4 * r2 * p.i1k0;
    Ok(d_u / d + 2.0 * b * u / (d * d) + 2.0 * a * d_numer / (d * d) + 8.0 * a * b * numer / (d * d * d))
}

/// Moment matrices over the disc, its complement and the plane (indices `1..=N`).
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticMomentMatrix {
    pub params: EllipticParams,
    pub r: f64,
    pub inside: DMatrix<f64>,
    pub outside: DMatrix<f64>,
    pub full: DMatrix<f64>,
}

impl EllipticMomentMatrix {
    pub fn new(params: &EllipticParams, r: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameters(format!("radius r = {r} must be finite and non-negative")));
        }
        let n = params.n;
        let r2 = r * r;
        let mut inside = DMatrix::zeros(n, n);
        let mut outside = DMatrix::zeros(n, n);
        let mut full = DMatrix::zeros(n, n);
        for k in 0..n {
            for j in k..n {
                let vi = moment_integral(k + 1, j + 1, params, Range::Inside(r2))?;
                let vo = moment_integral(k + 1, j + 1, params, Range::Outside(r2))?;
                let vf = moment_integral(k + 1, j + 1, params, Range::Full)?;
                for (m, v) in [(&mut inside, vi), (&mut outside, vo), (&mut full, vf)] {
                    m[(k, j)] = v;
                    m[(j, k)] = v;
                }
            }
        }
        Ok(Self {
            params: *params,
            r,
            inside,
            outside,
            full,
        })
    }

    /// `max |inside + outside - full| / |full|` over the entries.
    pub fn additivity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for ((i, o), f) in self.inside.iter().zip(self.outside.iter()).zip(self.full.iter()) {
            if *f != 0.0 {
                worst = worst.max(((i + o) - f).abs() / f.abs());
            } else {
                worst = worst.max((i + o).abs());
            }
        }
        worst
    }

    /// Diagonal scaling `1/√full_kk` applied on both sides.
    fn scaling(&self) -> Vec<f64> {
        (0..self.params.n).map(|k| 1.0 / self.full[(k, k)].sqrt()).collect()
    }

    fn scaled(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let d = self.scaling();
        DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * d[i] * d[j])
    }

    /// Condition number of the scaled full-plane matrix.
    pub fn condition_number(&self) -> f64 {
        let eig = self.scaled(&self.full).symmetric_eigenvalues();
        let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        if min > 0.0 {
            max / min
        } else {
            f64::INFINITY
        }
    }
}

fn log_det_spd(m: DMatrix<f64>, context: &'static str) -> Result<f64> {
    let chol = m.cholesky().ok_or(Error::NotPositiveDefinite { context })?;
    Ok(2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>())
}

/// A gap probability together with the conditioning of the problem behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticGap {
    pub value: f64,
    pub condition: f64,
}

impl EllipticGap {
    pub fn is_ill_conditioned(&self) -> bool {
        self.condition > ILL_CONDITIONED
    }
}

/// `E_0^{(2)}(r) = det M_outside / det M_full`.
pub fn gap_beta2_elliptic(params: &EllipticParams, r: f64) -> Result<EllipticGap> {
    let mm = EllipticMomentMatrix::new(params, r)?;
    gap_beta2_from_moments(&mm)
}

pub fn gap_beta2_from_moments(mm: &EllipticMomentMatrix) -> Result<EllipticGap> {
    if mm.r == 0.0 {
        return Ok(EllipticGap {
            value: 1.0,
            condition: mm.condition_number(),
        });
    }
    let log_out = log_det_spd(mm.scaled(&mm.outside), "outside moment matrix")?;
    let log_full = log_det_spd(mm.scaled(&mm.full), "full-plane moment matrix")?;
    Ok(EllipticGap {
        value: (log_out - log_full).exp(),
        condition: mm.condition_number(),
    })
}

/// Generalized eigenvalues of `det(λ M_full - M_inside) = 0`, largest first.
pub fn fredholm_eigs_elliptic(params: &EllipticParams, r: f64) -> Result<Vec<f64>> {
    let mm = EllipticMomentMatrix::new(params, r)?;
    fredholm_eigs_from_moments(&mm)
}

pub fn fredholm_eigs_from_moments(mm: &EllipticMomentMatrix) -> Result<Vec<f64>> {
    let full = mm.scaled(&mm.full);
    let inside = mm.scaled(&mm.inside);
    let chol = full.cholesky().ok_or(Error::NotPositiveDefinite {
        context: "full-plane moment matrix",
    })?;
    let l = chol.l();
    // C = L^{-1} M_in L^{-T}
    let y = l
        .solve_lower_triangular(&inside)
        .ok_or(Error::NotPositiveDefinite { context: "Cholesky factor" })?;
    let c = l
        .solve_lower_triangular(&y.transpose())
        .ok_or(Error::NotPositiveDefinite { context: "Cholesky factor" })?;
    let sym = (&c + c.transpose()) * 0.5;
    let mut eig: Vec<f64> = sym.symmetric_eigenvalues().iter().map(|v| v.clamp(0.0, 1.0)).collect();
    eig.sort_by(|p, q| q.total_cmp(p));
    Ok(eig)
}

/// `Π_{k<N} (1 - λ_k(N r²))` from the rotationally invariant eigenvalues.
pub fn finite_n_product_beta2(n: usize, nu: u32, r: f64) -> Result<f64> {
    let eig = eigenvalues(&EnsembleSpec::chiral2(nu), n as f64 * r * r, n)?;
    Ok(eig.iter().map(|e| e.log_one_minus).sum::<f64>().exp())
}

/// `Π_{j<N} (1 - λ_{2j+1}(N r²))` with Bessel weight index `2ν`.
pub fn finite_n_product_beta4(n: usize, nu: u32, r: f64) -> Result<f64> {
    let eig = eigenvalues(&EnsembleSpec::chiral4(nu), n as f64 * r * r, n)?;
    Ok(eig.iter().map(|e| e.log_one_minus).sum::<f64>().exp())
}

/// `Pf(A)` of an antisymmetric matrix by pivoted skew tridiagonalization.
pub fn pfaffian(m: &DMatrix<f64>) -> Result<f64> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::InvalidParameters("Pfaffian needs a square matrix".into()));
    }
    if n % 2 == 1 {
        return Ok(0.0);
    }
    let mut a = m.clone();
    let mut pf = 1.0;
    for k in (0..n.saturating_sub(1)).step_by(2) {
        let mut pivot = k + 1;
        for i in k + 2..n {
            if a[(i, k)].abs() > a[(pivot, k)].abs() {
                pivot = i;
            }
        }
        if pivot != k + 1 {
            a.swap_rows(k + 1, pivot);
            a.swap_columns(k + 1, pivot);
            pf = -pf;
        }
        let head = a[(k, k + 1)];
        if head == 0.0 {
            return Ok(0.0);
        }
        pf *= head;
        if k + 2 < n {
            let tau: Vec<f64> = (k + 2..n).map(|j| a[(k, j)] / head).collect();
            let col: Vec<f64> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
    }
    Ok(pf)
}

/// Antisymmetric `2N × 2N` matrices of the β=4 route.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMomentMatrix {
    pub params: EllipticParams,
    pub r: f64,
    pub outside: DMatrix<f64>,
    pub full: DMatrix<f64>,
}

/// `A_{kl} = ∫ d²z (z² - z̄²) w^{(4)}(z) (z^{2k-2} z̄^{2l-2} - z̄^{2k-2} z^{2l-2})` over `range`.
///
/// In polar form the integrand is real: `-4 s^{4ν+2} K_{2ν}(as²) e^{bs² cos 2θ} s^{2(k+l-1)} sin 2θ sin 2(k-l)θ`.
/// The angular integral uses Gauss–Legendre nodes on a quarter period and
/// the radial one the adaptive driver, in `t = s²`.
pub fn skew_moment(k: usize, l: usize, params: &EllipticParams, range: Range, gl: &GaussLegendre) -> Result<f64> {
    if k == l {
        return Ok(0.0);
    }
    let (a, b) = (params.a(), params.b());
    let w = 2 * params.nu;
    let m = k as f64 - l as f64;
    let nodes: Vec<(f64, f64)> = gl.mapped(0.0, 0.5 * PI).collect();
    let power = 2.0 * params.nu as f64 + (k + l) as f64;
    let integrand = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        // integrand has period π in θ and is even about π/2
        let angular: f64 = 4.0
            * nodes
                .iter()
                .map(|&(theta, wt)| {
                    let c2 = (2.0 * theta).cos();
                    wt * (b * t * (c2 - 1.0)).exp() * (2.0 * theta).sin() * (2.0 * m * theta).sin()
                })
                .sum::<f64>();
        let radial = (power * t.ln() - (a - b) * t).exp() * bessel_k_scaled(w, a * t).unwrap_or(f64::NAN);
        -2.0 * radial * angular
    };
    let v = radial_integral(integrand, range)?;
    if v.is_nan() {
        return Err(domain("skew_moment", format!("non-finite integrand for k = {k}, l = {l}")));
    }
    Ok(v)
}

impl SkewMomentMatrix {
    pub fn new(params: &EllipticParams, r: f64) -> Result<Self> {
        if params.n > MAX_N_BETA4 {
            return Err(Error::InvalidParameters(format!(
                "Pfaffian route supports N ≤ {MAX_N_BETA4}, got {}",
                params.n
            )));
        }
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameters(format!("radius r = {r} must be finite and non-negative")));
        }
        let dim = 2 * params.n;
        let gl = GaussLegendre::new(ANGULAR_NODES);
        let mut outside = DMatrix::zeros(dim, dim);
        let mut full = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            for l in k + 1..dim {
                let vo = skew_moment(k + 1, l + 1, params, Range::Outside(r * r), &gl)?;
                let vf = skew_moment(k + 1, l + 1, params, Range::Full, &gl)?;
                outside[(k, l)] = vo;
                outside[(l, k)] = -vo;
                full[(k, l)] = vf;
                full[(l, k)] = -vf;
            }
        }
        Ok(Self {
            params: *params,
            r,
            outside,
            full,
        })
    }

    fn scaling(&self) -> Vec<f64> {
        (0..self.full.nrows())
            .map(|k| {
                let row_max = self.full.row(k).iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
                1.0 / row_max.sqrt()
            })
            .collect()
    }

    /// Both matrices with the symmetric row/column scaling used for the Pfaffians.
    pub fn scaled(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let d = self.scaling();
        let f = |m: &DMatrix<f64>| DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * d[i] * d[j]);
        (f(&self.outside), f(&self.full))
    }
}

/// `E_0^{(4)}(r) = Pf A_outside / Pf A_full`.
pub fn gap_beta4_elliptic(params: &EllipticParams, r: f64) -> Result<f64> {
    let sm = SkewMomentMatrix::new(params, r)?;
    if r == 0.0 {
        return Ok(1.0);
    }
    let (out, full) = sm.scaled();
    let pf_full = pfaffian(&full)?;
    if pf_full == 0.0 {
        return Err(domain("gap_beta4_elliptic", "full-plane Pfaffian vanishes"));
    }
    Ok(pfaffian(&out)? / pf_full)
}
