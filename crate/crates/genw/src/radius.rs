//! Radius-of-convergence analysis for the inverse-series coefficients.
//!
//! The root test gives 1/R = limsup |c_n|^{1/n}. The coefficient asymptotics
//! reduce that to the growth of F_n = Σ_k a_n(k), whose terms obey
//!
//! ```text
//! a_n(nλ) ~ ∏ψ_j · n^{−m/2} · f(λ) · e^{n·g(λ)},
//! ```
//!
//! with amplitude f(λ) = √(1−Σλ)·∏√(p_j/(2πλ_j(p_j+λ_j))) and exponent
//!
//! ```text
//! g(λ) = −(1−Σλ)log(1−Σλ) + Σ[(p_j+λ_j)log(p_j+λ_j) − p_j log p_j − λ_j log(−e·t_jλ_j)].
//! ```
//!
//! Saddle points φ of g satisfy the quadratic system
//! (1−Σλ)(p_i+λ_i) + t_iλ_i = 0. Substituted back into the log-form
//! derivative, a saddle can produce an integer multiple of 2πi instead of 0;
//! those integers l_i (suspected to lie in {−1, 0, 1}) re-enter the
//! conjectured radius
//!
//! ```text
//! R = |exp(2πi Σ l_jφ_j − 1) · (1−Σφ)^{1−Σφ} · ∏ (t_j/(p_j+φ_j))^{p_j+φ_j} p_j^{p_j} (e·φ_j)^{φ_j}|.
//! ```
//!
//! The (e·φ_j)^{φ_j} factor (rather than a bare φ_j^{φ_j}) is what makes the
//! closed form consistent with 1/R = e·|∏(−t_j)^{−p_j}|·e^{Re g(φ)}; the two
//! routes are evaluated independently and must agree, which is checked on
//! every candidate. An empirical root-test estimate cross-validates the
//! conjecture; disagreement is reported as a finding, not a failure.

use num_complex::Complex64;
use serde_json::json;
use std::io::{self, Write};

use crate::hyper::MultiIndex;
use crate::poly;
use crate::series::{CoefficientTable, ParamSet};
use crate::{Error, Result};

use std::f64::consts::{E, PI};

/// A solution φ of the saddle system with its derived data.
#[derive(Debug, Clone)]
pub struct SaddlePoint {
    /// φ, a solution vector of the quadratic system.
    pub lambda: Vec<Complex64>,
    /// The scalar reduction s = 1 − Σφ_j.
    pub s: Complex64,
    /// |(1−Σφ)(p_i+φ_i) + t_iφ_i| per component after refinement.
    pub residuals: Vec<f64>,
    /// g(φ) with principal logs.
    pub g_value: Complex64,
    /// Branch offsets l_i from the principal-log derivative.
    pub log_branch_offsets: Vec<i64>,
    /// Newton refinement reached residuals ≤ 1e−10.
    pub refined: bool,
}

/// ψ(n, λ, p): the gamma-reflection phase active for real p with
/// p < 0 < p + λ, and 1 otherwise (including all non-real p).
///
/// The sign is −2i·sin(npπ)·e^{iπpn}; the exact Pochhammer ratio fixes it
/// (with +2i the exact/asymptotic ratio converges to −1, not 1). ψ vanishes
/// when np is an integer, matching the zero factor inside (np)_{nλ}.
pub fn psi_factor(n: usize, lambda: f64, p: Complex64) -> Complex64 {
    if p.im == 0.0 && p.re < 0.0 && p.re + lambda > 0.0 {
        let x = n as f64 * p.re * PI;
        Complex64::new(0.0, -2.0) * x.sin() * Complex64::new(0.0, x).exp()
    } else {
        Complex64::new(1.0, 0.0)
    }
}

/// Asymptotic value of (np)_{nλ}/(nλ)! for λ ∈ (0, 1]:
/// √(p/(2πnλ(λ+p))) · ((p+λ)^{p+λ}/(p^p λ^λ))ⁿ · ψ(n, λ, p).
pub fn pochhammer_ratio_asymptotic(n: usize, lambda: f64, p: Complex64) -> Result<Complex64> {
    assert!(n >= 1 && lambda > 0.0 && lambda <= 1.0, "need n ≥ 1, λ ∈ (0,1]");
    let lam = Complex64::new(lambda, 0.0);
    if p + lam == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularEvaluation("λ + p = 0 in the square root"));
    }
    let nf = n as f64;
    let amp = (p / (2.0 * PI * nf * lambda * (p + lam))).sqrt();
    let log_base = (p + lam) * (p + lam).ln() - p * p.ln() - lam * lambda.ln();
    Ok(amp * (nf * log_base).exp() * psi_factor(n, lambda, p))
}

/// The exponent g(λ) as a sum of x·log x terms with principal logs.
///
/// Vanishing-base terms are continuously extended (x·log x → 0); a whole
/// factor drops out at λ_i = 0.
pub fn exponent_g(lambda: &[Complex64], params: &ParamSet) -> Result<Complex64> {
    if lambda.len() != params.len() {
        return Err(Error::MismatchedLengths { t_len: lambda.len(), p_len: params.len() });
    }
    if lambda.iter().any(|l| !l.is_finite()) {
        return Err(Error::SingularEvaluation("non-finite λ"));
    }
    let zero = Complex64::new(0.0, 0.0);
    let s: Complex64 = Complex64::new(1.0, 0.0) - lambda.iter().sum::<Complex64>();
    let mut g = if s == zero { zero } else { -s * s.ln() };
    for ((&l, &p), &t) in lambda.iter().zip(params.p()).zip(params.t()) {
        if l == zero {
            continue;
        }
        let pl = p + l;
        if pl != zero {
            g += pl * pl.ln();
        }
        g -= p * p.ln();
        g -= l * (-E * t * l).ln();
    }
    if g.is_finite() {
        Ok(g)
    } else {
        Err(Error::SingularEvaluation("g(λ) not finite"))
    }
}

/// The n-free amplitude f(λ) = √(1−Σλ)·∏√(p_i/(2πλ_i(p_i+λ_i))),
/// as a product of principal square roots.
pub fn amplitude(lambda: &[Complex64], params: &ParamSet) -> Result<Complex64> {
    if lambda.len() != params.len() {
        return Err(Error::MismatchedLengths { t_len: lambda.len(), p_len: params.len() });
    }
    let zero = Complex64::new(0.0, 0.0);
    let s: Complex64 = Complex64::new(1.0, 0.0) - lambda.iter().sum::<Complex64>();
    let mut a = s.sqrt();
    for (&l, &p) in lambda.iter().zip(params.p()) {
        if l == zero || p + l == zero {
            return Err(Error::SingularEvaluation("λ_i = 0 or p_i + λ_i = 0 in amplitude"));
        }
        a *= (p / (2.0 * PI * l * (p + l))).sqrt();
    }
    Ok(a)
}

/// Exact product value from a complex log-sum (exp of summed principal logs
/// reproduces the product exactly, whatever branch the sum lands on).
fn pochhammer_log(q: Complex64, k: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..k {
        acc += (q + j as f64).ln();
    }
    acc
}

/// Exact a_n(k) next to its saddle-form asymptotic at λ = k/n, returned as
/// a pair (exact, asymptotic) for ratio testing.
///
/// Interior indices only (all k_i ≥ 1) — the asymptotic amplitude is
/// singular on the simplex boundary — and the weight must stay ≤ n−1 where
/// a_n(k) is nonzero.
pub fn coefficient_asymptotic_check(
    n: usize,
    k: &MultiIndex,
    params: &ParamSet,
) -> Result<(Complex64, Complex64)> {
    let m = params.len();
    if k.len() != m {
        return Err(Error::MismatchedLengths { t_len: k.len(), p_len: m });
    }
    if k.weight() > n - 1 {
        return Err(Error::InvalidIndex("weight must be ≤ n−1"));
    }
    if k.entries().contains(&0) {
        return Err(Error::InvalidIndex("asymptotic side needs all k_i ≥ 1"));
    }
    let nf = n as f64;
    // exact: collect logs, exponentiate once
    let mut log_sum = pochhammer_log(Complex64::new(1.0 - nf, 0.0), k.weight());
    for ((&ki, &p), &t) in k.entries().iter().zip(params.p()).zip(params.t()) {
        log_sum += pochhammer_log(nf * p, ki);
        log_sum -= (1..=ki).map(|j| (j as f64).ln()).sum::<f64>();
        log_sum -= ki as f64 * (nf * t).ln();
    }
    let exact = log_sum.exp();

    let lambda: Vec<Complex64> = k
        .entries()
        .iter()
        .map(|&ki| Complex64::new(ki as f64 / nf, 0.0))
        .collect();
    let mut psi = Complex64::new(1.0, 0.0);
    for (&l, &p) in lambda.iter().zip(params.p()) {
        psi *= psi_factor(n, l.re, p);
    }
    let asym = psi
        * nf.powf(-(m as f64) / 2.0)
        * amplitude(&lambda, params)?
        * (nf * exponent_g(&lambda, params)?).exp();
    Ok((exact, asym))
}

/// Complex Gaussian elimination with partial pivoting; returns None for a
/// numerically singular system.
#[allow(clippy::needless_range_loop)]
fn solve_linear(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for col in 0..n {
        let (pivot, _) = (col..n)
            .map(|r| (r, a[r][col].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
        if a[pivot][col].norm() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for cc in col..n {
                let v = a[col][cc];
                a[r][cc] -= f * v;
            }
            let bv = b[col];
            b[r] -= f * bv;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for cc in row + 1..n {
            acc -= a[row][cc] * x[cc];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

fn system_residuals(lambda: &[Complex64], params: &ParamSet) -> Vec<f64> {
    let s: Complex64 = Complex64::new(1.0, 0.0) - lambda.iter().sum::<Complex64>();
    lambda
        .iter()
        .zip(params.p())
        .zip(params.t())
        .map(|((&l, &p), &t)| (s * (p + l) + t * l).norm())
        .collect()
}

/// Newton on the full quadratic system F_i = (1−Σλ)(p_i+λ_i) + t_iλ_i.
#[allow(clippy::needless_range_loop)]
fn refine_saddle(start: &[Complex64], params: &ParamSet) -> Vec<Complex64> {
    let m = start.len();
    let mut lam = start.to_vec();
    for _ in 0..60 {
        let s: Complex64 = Complex64::new(1.0, 0.0) - lam.iter().sum::<Complex64>();
        let f: Vec<Complex64> = lam
            .iter()
            .zip(params.p())
            .zip(params.t())
            .map(|((&l, &p), &t)| s * (p + l) + t * l)
            .collect();
        if f.iter().map(|v| v.norm()).fold(0.0f64, f64::max) < 1e-14 {
            break;
        }
        let mut jac = vec![vec![Complex64::new(0.0, 0.0); m]; m];
        for i in 0..m {
            for j in 0..m {
                jac[i][j] = -(params.p()[i] + lam[i]);
                if i == j {
                    jac[i][j] += s + params.t()[i];
                }
            }
        }
        match solve_linear(jac, f) {
            Some(delta) => {
                let mut moved = 0.0f64;
                for i in 0..m {
                    lam[i] -= delta[i];
                    moved = moved.max(delta[i].norm());
                }
                if moved < 1e-15 {
                    break;
                }
            }
            None => break,
        }
    }
    lam
}

fn offsets_of(lambda: &[Complex64], params: &ParamSet) -> Result<Vec<i64>> {
    let s: Complex64 = Complex64::new(1.0, 0.0) - lambda.iter().sum::<Complex64>();
    let mut out = Vec::with_capacity(lambda.len());
    for (i, ((&l, &p), &t)) in lambda.iter().zip(params.p()).zip(params.t()).enumerate() {
        let total = s.ln() + (p + l).ln() - (-t * l).ln();
        let raw = total.im / (2.0 * PI);
        let rounded = raw.round();
        // Re(total) vanishes because |s(p+φ)| = |t·φ| on the saddle; the
        // imaginary part must be an integer multiple of 2π up to residuals
        if (raw - rounded).abs() > 1e-6 || total.re.abs() > 1e-6 {
            return Err(Error::NonIntegerOffset { index: i, value: raw });
        }
        out.push(rounded as i64);
    }
    Ok(out)
}

/// Branch offsets l_i = [log(1−Σφ) + log(p_i+φ_i) − log(−t_iφ_i)] / 2πi
/// with principal logs. On an exact saddle the bracket is an exact integer
/// multiple of 2πi; anything else signals a stale point or branch anomaly.
pub fn log_branch_offsets(sp: &SaddlePoint, params: &ParamSet) -> Result<Vec<i64>> {
    offsets_of(&sp.lambda, params)
}

/// All saddle candidates of the quadratic system.
///
/// λ_i is eliminated as λ_i = −s·p_i/(s+t_i) with s = 1−Σλ, which reduces the
/// system to the scalar resolvent (s−1)·∏(s+t_j) − s·Σ_j p_j ∏_{k≠j}(s+t_k),
/// a monic polynomial of degree m+1; all of its roots are found by
/// simultaneous iteration, mapped back to λ, and Newton-refined on the full
/// system. Near-coincidences s ≈ −t_j are recovered from perturbed starts.
pub fn saddle_candidates(params: &ParamSet) -> Result<Vec<SaddlePoint>> {
    let m = params.len();
    assert!(m >= 1, "saddle system needs m ≥ 1");
    let one = Complex64::new(1.0, 0.0);

    // resolvent = (s−1)·∏(s+t_j) − s·Σ_j p_j ∏_{k≠j}(s+t_k)
    let mut full = vec![one];
    for &t in params.t() {
        full = poly::mul_linear(&full, t);
    }
    let mut resolvent = poly::mul_linear(&full, -one);
    for j in 0..m {
        let mut partial = vec![one];
        for (k, &t) in params.t().iter().enumerate() {
            if k != j {
                partial = poly::mul_linear(&partial, t);
            }
        }
        // subtract p_j · s · partial(s)
        for (deg, &c) in partial.iter().enumerate() {
            resolvent[deg + 1] -= params.p()[j] * c;
        }
    }
    let roots = poly::all_roots(&resolvent, 600, 1e-13)?;

    let mut saddles: Vec<SaddlePoint> = Vec::new();
    for s in roots {
        let near_pole = params.t().iter().any(|&t| (s + t).norm() < 1e-8);
        let starts: Vec<Vec<Complex64>> = if near_pole {
            // recover by nudging the pole out of the elimination formula
            [1e-6, -1e-6, 1e-4]
                .iter()
                .map(|&eps| {
                    params
                        .t()
                        .iter()
                        .zip(params.p())
                        .map(|(&t, &p)| -s * p / (s + t + Complex64::new(eps, eps)))
                        .collect()
                })
                .collect()
        } else {
            vec![params
                .t()
                .iter()
                .zip(params.p())
                .map(|(&t, &p)| -s * p / (s + t))
                .collect()]
        };
        for start in starts {
            let lam = refine_saddle(&start, params);
            if lam.iter().any(|l| !l.is_finite()) {
                continue;
            }
            let dup = saddles.iter().any(|sp| {
                sp.lambda
                    .iter()
                    .zip(&lam)
                    .all(|(a, b)| (a - b).norm() < 1e-8)
            });
            if dup {
                continue;
            }
            let residuals = system_residuals(&lam, params);
            let refined = residuals.iter().all(|&r| r <= 1e-10);
            let s_val = one - lam.iter().sum::<Complex64>();
            let g_value = exponent_g(&lam, params).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            let log_branch_offsets = offsets_of(&lam, params).unwrap_or_default();
            saddles.push(SaddlePoint {
                lambda: lam,
                s: s_val,
                residuals,
                g_value,
                log_branch_offsets,
                refined,
            });
        }
    }
    saddles.sort_by(|a, b| {
        let ka = (a.lambda[0].re, a.lambda[0].im);
        let kb = (b.lambda[0].re, b.lambda[0].im);
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(saddles)
}

/// det of the Hessian g″ at λ: H_ij = −1/(1−Σλ) + δ_ij(1/(p_i+λ_i) − 1/λ_i).
/// A vanishing determinant marks a degenerate saddle.
#[allow(clippy::needless_range_loop)]
pub fn hessian_determinant(lambda: &[Complex64], params: &ParamSet) -> Complex64 {
    let m = lambda.len();
    let s: Complex64 = Complex64::new(1.0, 0.0) - lambda.iter().sum::<Complex64>();
    let mut h = vec![vec![-1.0 / s; m]; m];
    for i in 0..m {
        h[i][i] += 1.0 / (params.p()[i] + lambda[i]) - 1.0 / lambda[i];
    }
    // determinant by elimination
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..m {
        let (pivot, mag) = (col..m)
            .map(|r| (r, h[r][col].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if mag == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            h.swap(col, pivot);
            det = -det;
        }
        det *= h[col][col];
        for r in col + 1..m {
            let f = h[r][col] / h[col][col];
            for cc in col..m {
                let v = h[col][cc];
                h[r][cc] -= f * v;
            }
        }
    }
    det
}

/// Conjectured radius for a (saddle, offsets) pair, as the modulus of
///
/// ```text
/// exp(2πi Σ l_jφ_j − 1) · S^S · ∏ (t_j/(p_j+φ_j))^{p_j+φ_j} · p_j^{p_j} · (e·φ_j)^{φ_j},
/// ```
///
/// with S = 1 − Σφ. A second, independent route rebuilds the same modulus
/// from Re g(φ) together with the exact principal-branch bookkeeping
/// integers u_j (defect of log(−t_jφ_j) against log t_j + log(−φ_j)) and
/// σ_j = (log φ_j − log(−φ_j))/iπ; the two must agree to 1e−8 or the
/// candidate is flagged — this is what surfaces branch-choice bugs.
pub fn conjectured_radius(sp: &SaddlePoint, l: &[i64], params: &ParamSet) -> Result<f64> {
    let m = params.len();
    assert_eq!(sp.lambda.len(), m);
    assert_eq!(l.len(), m);
    let zero = Complex64::new(0.0, 0.0);
    let s: Complex64 = Complex64::new(1.0, 0.0) - sp.lambda.iter().sum::<Complex64>();

    let mut ln_r1 = -1.0;
    let l_phi: Complex64 = sp
        .lambda
        .iter()
        .zip(l)
        .map(|(&phi, &li)| phi * li as f64)
        .sum();
    ln_r1 += (Complex64::new(0.0, 2.0 * PI) * l_phi).re;
    if s != zero {
        ln_r1 += (s * s.ln()).re;
    }
    for ((&phi, &p), &t) in sp.lambda.iter().zip(params.p()).zip(params.t()) {
        if phi == zero || p + phi == zero {
            return Err(Error::ZeroBase("φ_j or p_j + φ_j is zero"));
        }
        ln_r1 += ((p + phi) * (t / (p + phi)).ln()).re;
        ln_r1 += (p * p.ln()).re;
        ln_r1 += (phi * (Complex64::new(1.0, 0.0) + phi.ln())).re;
    }

    // independent route through Re g(φ) and exact branch integers: u_j is
    // the wrap of log(−t_jφ_j) against log t_j + log(−φ_j), σ_j the sign in
    // log φ_j − log(−φ_j) = iπσ_j, and v_j the wrap of log(t_j/(p_j+φ_j))
    // against log t_j − log(p_j+φ_j)
    let g = exponent_g(&sp.lambda, params)?;
    let mut ln_r2 = -g.re - 1.0;
    let mut lu_phi = zero;
    for (((&phi, &t), &p), &li) in sp.lambda.iter().zip(params.t()).zip(params.p()).zip(l) {
        let u = (((-t * phi).ln() - t.ln() - (-phi).ln()).im / (2.0 * PI)).round();
        lu_phi += phi * (li as f64 - u);
        let sigma = ((phi.ln() - (-phi).ln()).im / PI).round();
        ln_r2 += (Complex64::new(0.0, PI) * sigma * phi).re;
        let v = (((t / (p + phi)).ln() - t.ln() + (p + phi).ln()).im / (2.0 * PI)).round();
        ln_r2 += (Complex64::new(0.0, 2.0 * PI) * v * (p + phi)).re;
    }
    ln_r2 += (Complex64::new(0.0, 2.0 * PI) * lu_phi).re;
    for (&p, &t) in params.p().iter().zip(params.t()) {
        ln_r2 += (p * t.ln()).re;
    }

    let r1 = ln_r1.exp();
    let r2 = ln_r2.exp();
    if (ln_r1 - ln_r2).abs() > 1e-8 {
        return Err(Error::InconsistentRadiusRoutes { direct: r1, via_exponent: r2 });
    }
    Ok(r1)
}

/// Root-test estimate: least-squares slope of log|c_n| against n over the
/// window, after a trailing running-max pass that approximates the limsup
/// when the coefficients oscillate or vanish. Returns exp(−slope).
pub fn empirical_radius(
    table: &CoefficientTable,
    window: std::ops::RangeInclusive<usize>,
) -> Result<f64> {
    let (lo, hi) = (*window.start(), *window.end());
    if lo < 1 || hi > table.n_max() || lo >= hi {
        return Err(Error::BadFitWindow("window out of table range"));
    }
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for n in lo..=hi {
        let y = table.coefficient(n).ln_abs();
        if y.is_finite() {
            pts.push((n as f64, y));
        }
    }
    if pts.len() < 3 {
        return Err(Error::BadFitWindow("fewer than 3 nonzero coefficients"));
    }
    // trailing running max rides the upper envelope; for monotone data it
    // only shifts the intercept, leaving the slope alone
    let width = 8usize.min(pts.len() / 4).max(1);
    let smoothed: Vec<(f64, f64)> = (0..pts.len())
        .map(|i| {
            let start = i.saturating_sub(width - 1);
            let max = pts[start..=i].iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
            (pts[i].0, max)
        })
        .collect();
    let n = smoothed.len() as f64;
    let xb = smoothed.iter().map(|p| p.0).sum::<f64>() / n;
    let yb = smoothed.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = smoothed.iter().map(|p| (p.0 - xb) * (p.1 - yb)).sum();
    let den: f64 = smoothed.iter().map(|p| (p.0 - xb) * (p.0 - xb)).sum();
    let slope = num / den;
    Ok((-slope).exp())
}

/// One (saddle, l-vector) entry of the report.
#[derive(Debug, Clone)]
pub struct RadiusCandidate {
    pub saddle_index: usize,
    pub offsets: Vec<i64>,
    pub radius: f64,
    /// Direct formula and exponent route agreed to 1e−8.
    pub routes_consistent: bool,
}

/// Conjectured radii for every (saddle, l) pair next to the empirical
/// root-test estimate.
#[derive(Debug, Clone)]
pub struct RadiusReport {
    pub params: ParamSet,
    pub saddles: Vec<SaddlePoint>,
    pub saddle_degenerate: Vec<bool>,
    pub candidates: Vec<RadiusCandidate>,
    pub empirical: f64,
    pub empirical_n: usize,
    /// Index into `candidates` of the best agreement with the empirical value.
    pub best_match: usize,
    pub relative_gap: f64,
    /// Best candidate within `match_tolerance` of the empirical estimate.
    pub matched: bool,
    pub match_tolerance: f64,
    /// ln|c_n| for n = 1..N (−∞ marks exact zeros), for plot export.
    pub coeff_log_abs: Vec<f64>,
}

impl RadiusReport {
    /// The candidates as (saddle, l-vector, R) triples.
    pub fn conjectured(&self) -> impl Iterator<Item = (&SaddlePoint, &[i64], f64)> {
        self.candidates
            .iter()
            .map(move |c| (&self.saddles[c.saddle_index], c.offsets.as_slice(), c.radius))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let cx = |z: &Complex64| json!([z.re, z.im]);
        json!({
            "params": self.params,
            "saddles": self.saddles.iter().enumerate().map(|(i, sp)| json!({
                "lambda": sp.lambda.iter().map(cx).collect::<Vec<_>>(),
                "s": cx(&sp.s),
                "residuals": sp.residuals,
                "g_value": cx(&sp.g_value),
                "log_branch_offsets": sp.log_branch_offsets,
                "refined": sp.refined,
                "degenerate": self.saddle_degenerate[i],
            })).collect::<Vec<_>>(),
            "candidates": self.candidates.iter().map(|c| json!({
                "saddle_index": c.saddle_index,
                "offsets": c.offsets,
                "radius": c.radius,
                "routes_consistent": c.routes_consistent,
            })).collect::<Vec<_>>(),
            "empirical": self.empirical,
            "empirical_n": self.empirical_n,
            "best_match": self.best_match,
            "relative_gap": self.relative_gap,
            "matched": self.matched,
            "match_tolerance": self.match_tolerance,
            "coeff_log_abs": self.coeff_log_abs,
        })
    }

    /// CSV export: one row per (saddle, l) candidate.
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        writeln!(
            out,
            "saddle_index,lambda,offsets,radius,routes_consistent,empirical,relative_gap_to_empirical"
        )?;
        for c in &self.candidates {
            let sp = &self.saddles[c.saddle_index];
            let lam = sp
                .lambda
                .iter()
                .map(|z| format!("{:.16e}{:+.16e}i", z.re, z.im))
                .collect::<Vec<_>>()
                .join(";");
            let offs = c
                .offsets
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(";");
            let gap = (c.radius - self.empirical).abs() / self.empirical;
            writeln!(
                out,
                "{},{},{},{:.16e},{},{:.16e},{:.16e}",
                c.saddle_index, lam, offs, c.radius, c.routes_consistent, self.empirical, gap
            )?;
        }
        Ok(())
    }

    /// Plot-ready CSV: `n, log|c_n|, n·log(1/R_best)` for overlaying the
    /// coefficient growth against the conjectured slope.
    pub fn write_plot_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        let r_best = self.candidates[self.best_match].radius;
        writeln!(out, "n,log_abs_c,n_log_inv_r")?;
        for (i, &y) in self.coeff_log_abs.iter().enumerate() {
            let n = i + 1;
            writeln!(out, "{},{:.16e},{:.16e}", n, y, n as f64 * (1.0 / r_best).ln())?;
        }
        Ok(())
    }
}

fn offset_vectors(m: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::with_capacity(out.len() * 3);
        for v in &out {
            for l in [-1i64, 0, 1] {
                let mut w = v.clone();
                w.push(l);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Build the full report: saddle candidates × l ∈ {−1, 0, 1}^m against the
/// empirical estimate from a fresh coefficient table of order N
/// (fit window [N/2, N]).
///
/// The l_i computed from principal logs explain *why* a given saddle works;
/// the scan over {−1, 0, 1}^m guards against branch surprises, and any
/// directly-computed |l_i| ≥ 2 is retained in the saddle record. An
/// unmatched conjecture is a reported finding (`matched = false`), not an
/// error.
pub fn radius_report(params: &ParamSet, n: usize) -> Result<RadiusReport> {
    assert!(n >= 50, "need N ≥ 50 for a stable fit");
    let m = params.len();
    let saddles = if m == 0 {
        vec![SaddlePoint {
            lambda: Vec::new(),
            s: Complex64::new(1.0, 0.0),
            residuals: Vec::new(),
            g_value: Complex64::new(0.0, 0.0),
            log_branch_offsets: Vec::new(),
            refined: true,
        }]
    } else {
        saddle_candidates(params)?
    };
    let saddle_degenerate = saddles
        .iter()
        .map(|sp| {
            if m == 0 {
                false
            } else {
                hessian_determinant(&sp.lambda, params).norm() < 1e-8
            }
        })
        .collect();

    let mut candidates = Vec::new();
    for (si, sp) in saddles.iter().enumerate() {
        for l in offset_vectors(m) {
            match conjectured_radius(sp, &l, params) {
                Ok(r) => candidates.push(RadiusCandidate {
                    saddle_index: si,
                    offsets: l,
                    radius: r,
                    routes_consistent: true,
                }),
                Err(Error::InconsistentRadiusRoutes { direct, .. }) => {
                    candidates.push(RadiusCandidate {
                        saddle_index: si,
                        offsets: l,
                        radius: direct,
                        routes_consistent: false,
                    })
                }
                Err(_) => {}
            }
        }
    }
    if candidates.is_empty() {
        return Err(Error::RootFinding("no usable radius candidates"));
    }

    let table = crate::series::build_table(params, n);
    let empirical = empirical_radius(&table, (n / 2).max(1)..=n)?;
    let coeff_log_abs = (1..=n).map(|i| table.coefficient(i).ln_abs()).collect();

    let (best_match, relative_gap) = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| (i, (c.radius - empirical).abs() / empirical))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    let match_tolerance = 0.05;

    Ok(RadiusReport {
        params: params.clone(),
        saddles,
        saddle_degenerate,
        candidates,
        empirical,
        empirical_n: n,
        best_match,
        relative_gap,
        matched: relative_gap <= match_tolerance,
        match_tolerance,
        coeff_log_abs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::build_table;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poch_ratio_exact(n: usize, lambda: f64, p: Complex64) -> Complex64 {
        let k = (n as f64 * lambda).round() as usize;
        let mut log_sum = pochhammer_log(p * n as f64, k);
        log_sum -= (1..=k).map(|j| (j as f64).ln()).sum::<f64>();
        log_sum.exp()
    }

    /// |a/b − 1| with prescaling: the naive complex division overflows via
    /// norm_sqr once |b| passes ~1e154.
    fn ratio_err(a: Complex64, b: Complex64) -> f64 {
        let s = b.norm();
        ((a / s) / (b / s) - c(1.0, 0.0)).norm()
    }

    #[test]
    fn psi_factor_cases() {
        assert_eq!(psi_factor(10, 0.5, c(1.0, 0.0)), c(1.0, 0.0));
        assert_eq!(psi_factor(10, 0.5, c(0.3, 0.7)), c(1.0, 0.0));
        // p + λ < 0 is "otherwise"
        assert_eq!(psi_factor(10, 0.5, c(-1.5, 0.0)), c(1.0, 0.0));
        // active branch, np integer: sin(npπ) kills it
        let v = psi_factor(2, 0.75, c(-0.5, 0.0));
        assert!(v.norm() < 1e-12);
        // active branch, hand value: −2i·sin(−π/2)·e^{−iπ/2} = −2i·(−1)·(−i) = 2
        let v = psi_factor(2, 0.5, c(-0.25, 0.0));
        assert!((v - c(2.0, 0.0)).norm() < 1e-12, "psi = {v}");
    }

    #[test]
    fn psi_sign_matches_exact_ratio_sign() {
        // the exact ratio (np)_{nλ}/(nλ)! is a real product here (np not an
        // integer); the asymptotic must land on the same side of zero
        let p = c(-0.2437, 0.0);
        let n = 200;
        let exact = poch_ratio_exact(n, 0.5, p);
        let asym = pochhammer_ratio_asymptotic(n, 0.5, p).unwrap();
        assert!(
            ratio_err(exact, asym) < 0.02,
            "exact={exact} asym={asym}, wrong ψ sign?"
        );
    }

    #[test]
    fn asymptotic_ratio_three_branches() {
        for (p, lam, tol) in [
            (c(1.0, 0.0), 0.5, 0.01),
            (c(-0.2437, 0.0), 0.5, 0.02),
            (c(-1.5, 0.0), 0.5, 0.01),
        ] {
            let exact = poch_ratio_exact(200, lam, p);
            let asym = pochhammer_ratio_asymptotic(200, lam, p).unwrap();
            assert!(
                ratio_err(exact, asym) < tol,
                "p={p}: err {}",
                ratio_err(exact, asym)
            );
        }
        // error shrinks with n
        let err_at = |n: usize| {
            let exact = poch_ratio_exact(n, 0.5, c(1.0, 0.0));
            let asym = pochhammer_ratio_asymptotic(n, 0.5, c(1.0, 0.0)).unwrap();
            ratio_err(exact, asym)
        };
        assert!(err_at(200) < err_at(100));
        assert!(err_at(400) < err_at(200));
    }

    #[test]
    fn asymptotic_rejects_degenerate_sqrt() {
        assert!(pochhammer_ratio_asymptotic(100, 0.5, c(-0.5, 0.0)).is_err());
    }

    #[test]
    fn exponent_g_limits() {
        let ps = ParamSet::new(vec![c(1.0, 0.0), c(-2.0, 0.0)], vec![c(1.0, 0.0), c(0.5, 0.0)])
            .unwrap();
        let g0 = exponent_g(&[c(0.0, 0.0), c(0.0, 0.0)], &ps).unwrap();
        assert!(g0.norm() < 1e-15);
        let empty = ParamSet::classical();
        assert!(exponent_g(&[], &empty).unwrap().norm() < 1e-15);
    }

    #[test]
    fn exponent_matches_growth_rate_complex_case() {
        // e^{Re g(φ)} at φ = 1+i vs the measured |F_n|^{1/n}
        let ps = ParamSet::new(vec![c(-1.0, 1.0)], vec![c(-1.0, 1.0)]).unwrap();
        let g = exponent_g(&[c(1.0, 1.0)], &ps).unwrap();
        let predicted = g.re.exp();
        let table = build_table(&ps, 300);
        let f299 = table.f_value(299).ln_abs() / 299.0;
        let f300 = table.f_value(300).ln_abs() / 300.0;
        let measured = 0.5 * (f299.exp() + f300.exp());
        assert!(
            (predicted - measured).abs() / measured < 0.05,
            "predicted {predicted}, measured {measured}"
        );
    }

    #[test]
    fn amplitude_values() {
        let empty = ParamSet::classical();
        assert!((amplitude(&[], &empty).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let ps = ParamSet::new(vec![c(1.0, 0.0)], vec![c(0.5, 0.0)]).unwrap();
        let got = amplitude(&[c(0.5, 0.0)], &ps).unwrap();
        let want = 0.5f64.sqrt() * (1.0 / (2.0 * PI)).sqrt();
        assert_relative_eq!(got.re, want, max_relative = 1e-12);
        assert!(amplitude(&[c(0.0, 0.0)], &ps).is_err());
    }

    #[test]
    fn coefficient_asymptotic_interior_ratio() {
        let ps1 = ParamSet::new(vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]).unwrap();
        let (exact, asym) =
            coefficient_asymptotic_check(100, &MultiIndex::new(vec![50]), &ps1).unwrap();
        let r100 = ratio_err(exact, asym);
        assert!(r100 < 0.02, "ratio error {r100}");
        let (exact, asym) =
            coefficient_asymptotic_check(200, &MultiIndex::new(vec![100]), &ps1).unwrap();
        let r200 = ratio_err(exact, asym);
        // Stirling error is O(1/n): roughly halves
        assert!(r200 < 0.6 * r100, "no O(1/n) improvement: {r100} -> {r200}");

        let ps2 = ParamSet::new(vec![c(1.0, 0.0), c(-1.0, 0.0)], vec![c(1.0, 0.0), c(2.0, 0.0)])
            .unwrap();
        let (exact, asym) =
            coefficient_asymptotic_check(120, &MultiIndex::new(vec![40, 40]), &ps2).unwrap();
        assert!(ratio_err(exact, asym) < 0.05);
    }

    #[test]
    fn coefficient_asymptotic_validations() {
        let ps = ParamSet::new(vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]).unwrap();
        assert!(coefficient_asymptotic_check(10, &MultiIndex::new(vec![10]), &ps).is_err());
        assert!(coefficient_asymptotic_check(10, &MultiIndex::new(vec![0]), &ps).is_err());
    }

    #[test]
    fn saddles_of_the_complex_example() {
        let ps = ParamSet::new(vec![c(-1.0, 1.0)], vec![c(-1.0, 1.0)]).unwrap();
        let saddles = saddle_candidates(&ps).unwrap();
        assert_eq!(saddles.len(), 2);
        let minus_i = saddles
            .iter()
            .find(|sp| (sp.lambda[0] - c(0.0, -1.0)).norm() < 1e-12)
            .expect("missing saddle −i");
        let one_plus_i = saddles
            .iter()
            .find(|sp| (sp.lambda[0] - c(1.0, 1.0)).norm() < 1e-12)
            .expect("missing saddle 1+i");
        // 1+i solves the log-form equation directly; −i only with an offset
        assert_eq!(one_plus_i.log_branch_offsets, vec![0]);
        assert_eq!(minus_i.log_branch_offsets, vec![1]);
        for sp in &saddles {
            assert!(sp.refined);
            assert!(sp.residuals.iter().all(|&r| r <= 1e-10));
            assert!((sp.s - (c(1.0, 0.0) - sp.lambda[0])).norm() < 1e-12);
        }
    }

    #[test]
    fn generic_single_factor_gives_two_candidates() {
        let ps = ParamSet::new(vec![c(1.7, -0.6)], vec![c(0.8, 0.4)]).unwrap();
        let saddles = saddle_candidates(&ps).unwrap();
        assert_eq!(saddles.len(), 2);
        for sp in saddles {
            assert!(sp.residuals.iter().all(|&r| r <= 1e-10));
        }
    }

    #[test]
    fn saddle_residuals_random_parameters() {
        // quantified over a small deterministic family, m ≤ 3
        let families = [
            ParamSet::new(vec![c(1.1, 0.3)], vec![c(-0.7, 0.2)]).unwrap(),
            ParamSet::new(vec![c(0.9, -0.8), c(-1.3, 0.5)], vec![c(0.6, 0.1), c(1.4, -0.9)])
                .unwrap(),
            ParamSet::new(
                vec![c(1.0, 0.5), c(-0.7, -1.1), c(2.0, 0.1)],
                vec![c(0.5, 0.2), c(-1.2, 0.4), c(0.9, -0.3)],
            )
            .unwrap(),
        ];
        for ps in &families {
            let saddles = saddle_candidates(ps).unwrap();
            assert!(!saddles.is_empty());
            for sp in saddles {
                assert!(
                    sp.residuals.iter().all(|&r| r <= 1e-10),
                    "residuals {:?}",
                    sp.residuals
                );
                // offsets are true integers: recheck the rounding defect
                let s: Complex64 = c(1.0, 0.0) - sp.lambda.iter().sum::<Complex64>();
                for ((&l, &p), &t) in sp.lambda.iter().zip(ps.p()).zip(ps.t()) {
                    let total = s.ln() + (p + l).ln() - (-t * l).ln();
                    let raw = total.im / (2.0 * PI);
                    assert!((raw - raw.round()).abs() <= 1e-6);
                }
            }
        }
    }

    #[test]
    fn conjectured_radius_classical() {
        let sp = SaddlePoint {
            lambda: vec![],
            s: c(1.0, 0.0),
            residuals: vec![],
            g_value: c(0.0, 0.0),
            log_branch_offsets: vec![],
            refined: true,
        };
        let r = conjectured_radius(&sp, &[], &ParamSet::classical()).unwrap();
        assert_relative_eq!(r, 1.0 / E, max_relative = 1e-12);
    }

    #[test]
    fn dual_route_consistency_on_candidates() {
        let families = [
            ParamSet::new(vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]).unwrap(),
            ParamSet::new(vec![c(-1.0, 1.0)], vec![c(-1.0, 1.0)]).unwrap(),
            ParamSet::new(vec![c(10.0, 0.0)], vec![c(1.0, 0.0)]).unwrap(),
            ParamSet::new(vec![c(0.9, -0.8), c(-1.3, 0.5)], vec![c(0.6, 0.1), c(1.4, -0.9)])
                .unwrap(),
        ];
        for ps in &families {
            for sp in saddle_candidates(ps).unwrap() {
                let l = sp.log_branch_offsets.clone();
                if l.len() != ps.len() {
                    continue;
                }
                // must not report route inconsistency for the principal offsets
                let r = conjectured_radius(&sp, &l, ps);
                assert!(r.is_ok(), "routes disagree for {:?}: {:?}", sp.lambda, r);
                assert!(r.unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn known_radii_from_saddles() {
        // p = t = 1: R = 0.43797…, the modulus of the nearer critical value
        let ps = ParamSet::new(vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]).unwrap();
        let saddles = saddle_candidates(&ps).unwrap();
        let mut radii: Vec<f64> = saddles
            .iter()
            .map(|sp| conjectured_radius(sp, &sp.log_branch_offsets, &ps).unwrap())
            .collect();
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_relative_eq!(radii[0], 0.43797148, max_relative = 1e-6);
        assert_relative_eq!(radii[1], 0.83996209, max_relative = 1e-6);

        // t = 10 weakens the singularity pull relative to t = 1
        let ps10 = ParamSet::new(vec![c(10.0, 0.0)], vec![c(1.0, 0.0)]).unwrap();
        let s10 = saddle_candidates(&ps10).unwrap();
        let r10: f64 = s10
            .iter()
            .map(|sp| conjectured_radius(sp, &sp.log_branch_offsets, &ps10).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(r10 > radii[0]);
        assert_relative_eq!(r10, 4.0643576, max_relative = 1e-6);
    }

    #[test]
    fn empirical_radius_classical() {
        let table = build_table(&ParamSet::classical(), 200);
        let r = empirical_radius(&table, 100..=200).unwrap();
        // finite-size bias from the (3/2)·ln n/n term: 1.03% high at this
        // window (oracle value 0.371664), shrinking as N grows
        assert_relative_eq!(r, 0.3716638, max_relative = 1e-4);
        assert!((r - 1.0 / E).abs() / (1.0 / E) < 0.015);
        let r100 = empirical_radius(&build_table(&ParamSet::classical(), 100), 50..=100).unwrap();
        let r400 = empirical_radius(&build_table(&ParamSet::classical(), 400), 200..=400).unwrap();
        assert!((r400 - 1.0 / E).abs() < (r - 1.0 / E).abs());
        assert!((r400 - 1.0 / E).abs() < (r100 - 1.0 / E).abs());
    }

    #[test]
    fn amplitude_is_the_n_free_factor() {
        // a_n(nλ)·n^{m/2}/(ψ·e^{n·g}) converges to the amplitude
        let ps = ParamSet::new(vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]).unwrap();
        let n = 200;
        let lam = [c(0.5, 0.0)];
        let (exact, _) = coefficient_asymptotic_check(n, &MultiIndex::new(vec![100]), &ps).unwrap();
        let g = exponent_g(&lam, &ps).unwrap();
        let extracted = exact * (n as f64).sqrt() / (n as f64 * g).exp();
        let amp = amplitude(&lam, &ps).unwrap();
        assert!(
            ratio_err(extracted, amp) < 0.02,
            "extracted {extracted} vs amplitude {amp}"
        );
    }

    #[test]
    fn empirical_radius_monotone_in_t() {
        let t1 = build_table(&ParamSet::new(vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]).unwrap(), 160);
        let t10 = build_table(&ParamSet::new(vec![c(10.0, 0.0)], vec![c(1.0, 0.0)]).unwrap(), 160);
        let r1 = empirical_radius(&t1, 80..=160).unwrap();
        let r10 = empirical_radius(&t10, 80..=160).unwrap();
        assert!(r10 > r1, "t=10 gives {r10}, t=1 gives {r1}");
    }

    #[test]
    fn running_max_estimate_dominates_plain_fit() {
        // real negative p drives ψ oscillation patterns
        let ps = ParamSet::new(vec![c(1.0, 0.0)], vec![c(-0.5, 0.0)]).unwrap();
        let table = build_table(&ps, 160);
        let with_max = empirical_radius(&table, 80..=160).unwrap();
        // plain fit: recompute without smoothing
        let pts: Vec<(f64, f64)> = (80..=160)
            .filter_map(|n| {
                let y = table.coefficient(n).ln_abs();
                y.is_finite().then_some((n as f64, y))
            })
            .collect();
        let nn = pts.len() as f64;
        let xb = pts.iter().map(|p| p.0).sum::<f64>() / nn;
        let yb = pts.iter().map(|p| p.1).sum::<f64>() / nn;
        let slope = pts.iter().map(|p| (p.0 - xb) * (p.1 - yb)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - xb) * (p.0 - xb)).sum::<f64>();
        let plain = (-slope).exp();
        // the envelope estimate of 1/R can only be larger, so R smaller
        assert!(with_max <= plain * 1.01, "max {with_max} vs plain {plain}");
    }

    #[test]
    fn empirical_radius_window_validation() {
        let table = build_table(&ParamSet::classical(), 60);
        assert!(empirical_radius(&table, 10..=100).is_err());
        assert!(empirical_radius(&table, 30..=30).is_err());
    }

    #[test]
    fn report_classical() {
        let rep = radius_report(&ParamSet::classical(), 300).unwrap();
        assert_eq!(rep.candidates.len(), 1);
        assert_relative_eq!(rep.candidates[0].radius, 1.0 / E, max_relative = 1e-12);
        assert!(rep.relative_gap < 0.01, "gap {}", rep.relative_gap);
        assert!(rep.matched);
    }

    #[test]
    fn report_complex_example_matches() {
        let ps = ParamSet::new(vec![c(-1.0, 1.0)], vec![c(-1.0, 1.0)]).unwrap();
        let rep = radius_report(&ps, 300).unwrap();
        assert!(rep.matched, "gap {}", rep.relative_gap);
        let best = &rep.candidates[rep.best_match];
        // the winning candidate sits at R = 1.0
        assert!((best.radius - 1.0).abs() < 0.01, "R = {}", best.radius);
    }

    #[test]
    fn report_two_factor_smoke() {
        let ps = ParamSet::new(vec![c(1.0, 0.0), c(-2.0, 0.0)], vec![c(1.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        let rep = radius_report(&ps, 120).unwrap();
        assert!(rep.empirical > 0.0);
        assert!(!rep.candidates.is_empty());
        assert!(rep.relative_gap.is_finite());
        // exporters stay well-formed
        let mut csv = Vec::new();
        rep.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().lines().count() > 1);
        let mut plot = Vec::new();
        rep.write_plot_csv(&mut plot).unwrap();
        assert_eq!(String::from_utf8(plot).unwrap().lines().count(), 121);
        let j = rep.to_json();
        assert!(j.get("saddles").is_some());
    }
}
