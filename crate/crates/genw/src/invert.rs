//! Numerical inversion of the forward map.
//!
//! [`newton_invert`] is an independent ground-truth oracle: plain Newton on
//! f(z) − w with the derivative taken in logarithmic form
//! f′/f = 1/z + Σ p_i/(z − t_i) + 1, so each step reuses the forward product.
//! [`generalized_w`] realizes W⁽ᵖ⁾ numerically: it seeds from the truncated
//! Taylor series and polishes with Newton.
//!
//! Non-convergence is reported in the result, not as an error, and a
//! principal-branch argument jump of any factor z − t_i between successive
//! iterates (|Δ arg| > π) flags the result: for irrational p_i the partial
//! inverses are genuinely multivalued and a Newton path that crosses a cut
//! may land on another branch.

use num_complex::Complex64;

use crate::series::{self, CoefficientTable, ParamSet};

/// How the reported preimage was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// The series seed already met the tolerance; polishing moved it by ≤ tol.
    SeriesOnly,
    /// Newton polishing moved the seed by more than the tolerance.
    NewtonPolished,
}

/// A computed preimage z with its verified residual |f(z) − w|.
#[derive(Debug, Clone)]
pub struct InversionResult {
    pub z: Complex64,
    pub residual: f64,
    pub iterations: u32,
    pub method: Method,
    /// Residual ≤ tolerance was reached.
    pub converged: bool,
    /// Some iterate crossed a principal-branch cut of a factor (z − t_i)^{p_i}.
    pub branch_cut_crossed: bool,
}

fn residual_of(z: Complex64, w: Complex64, params: &ParamSet) -> f64 {
    match series::forward_map(z, params) {
        Ok(v) => (v - w).norm(),
        Err(_) => f64::INFINITY,
    }
}

/// Newton iteration z ← z − (f(z) − w)/f′(z) from z0 until |f(z) − w| ≤ tol
/// or max_iter; returns the best iterate seen.
pub fn newton_invert(
    w: Complex64,
    z0: Complex64,
    params: &ParamSet,
    tol: f64,
    max_iter: u32,
) -> InversionResult {
    assert!(tol > 0.0, "tolerance must be positive");
    let mut z = z0;
    let mut best_z = z0;
    let mut best_res = residual_of(z0, w, params);
    let mut branch_cut_crossed = false;
    let mut iterations = 0;

    for _ in 0..max_iter {
        if best_res <= tol {
            break;
        }
        let (f, fp) = if z == Complex64::new(0.0, 0.0) {
            // f(0) = 0, f'(0) = ∏(−t_i)^{p_i}
            (Complex64::new(0.0, 0.0), series::derivative_at_zero(params))
        } else {
            match series::forward_map(z, params) {
                Ok(f) => (f, f * series::log_derivative(z, params)),
                Err(_) => {
                    // sitting on a branch point: nudge off it
                    z += Complex64::new(1e-9, 1e-9);
                    continue;
                }
            }
        };
        if fp == Complex64::new(0.0, 0.0) || !fp.is_finite() {
            break;
        }
        let step = (f - w) / fp;
        let z_next = z - step;
        for &t in params.t() {
            let before = (z - t).arg();
            let after = (z_next - t).arg();
            if (after - before).abs() > std::f64::consts::PI {
                branch_cut_crossed = true;
            }
        }
        z = z_next;
        iterations += 1;
        let res = residual_of(z, w, params);
        if res < best_res {
            best_res = res;
            best_z = z;
        }
        if !z.is_finite() {
            break;
        }
    }

    InversionResult {
        z: best_z,
        residual: best_res,
        iterations,
        method: Method::NewtonPolished,
        converged: best_res <= tol,
        branch_cut_crossed,
    }
}

/// Series-seeded truncation: sum terms while their magnitudes keep
/// decreasing, which is the usable prefix of the asymptotically divergent
/// tail outside the disk and the whole table inside it.
fn series_seed(w: Complex64, table: &CoefficientTable) -> (Complex64, usize) {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut x_pow = Complex64::new(1.0, 0.0);
    let mut prev_mag = f64::INFINITY;
    let mut used = 0;
    for n in 1..=table.n_max() {
        x_pow *= w;
        let term = table.coefficient_c64(n) * x_pow;
        let mag = term.norm();
        if !mag.is_finite() {
            break;
        }
        if n > 1 && mag > prev_mag {
            break;
        }
        acc += term;
        prev_mag = mag;
        used = n;
    }
    (acc, used)
}

/// W⁽ᵖ⁾(w): evaluate the truncated series as a seed, then polish with
/// Newton. The branch through 0 is the one the Taylor series represents.
pub fn generalized_w(
    w: Complex64,
    params: &ParamSet,
    table: &CoefficientTable,
    tol: f64,
) -> InversionResult {
    if w == Complex64::new(0.0, 0.0) {
        return InversionResult {
            z: Complex64::new(0.0, 0.0),
            residual: 0.0,
            iterations: 0,
            method: Method::SeriesOnly,
            converged: true,
            branch_cut_crossed: false,
        };
    }
    let (seed, _used) = series_seed(w, table);
    let mut result = newton_invert(w, seed, params, tol, 60);
    result.method = if (result.z - seed).norm() > tol {
        Method::NewtonPolished
    } else {
        Method::SeriesOnly
    };
    result
}
