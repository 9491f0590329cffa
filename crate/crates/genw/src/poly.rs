//! All-roots complex polynomial solving by Durand–Kerner simultaneous
//! iteration, used to enumerate saddle candidates from the scalar resolvent.

use num_complex::Complex64;

use crate::{Error, Result};

/// Evaluate Σ coeffs[i]·z^i (coefficients in ascending order).
pub(crate) fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Multiply a polynomial by the linear factor (z + a), in place semantics.
pub(crate) fn mul_linear(coeffs: &[Complex64], a: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
    for (i, &c) in coeffs.iter().enumerate() {
        out[i] += c * a;
        out[i + 1] += c;
    }
    out
}

/// All complex roots of a monic-normalizable polynomial with coefficients in
/// ascending order. Leading coefficient must be nonzero.
pub(crate) fn all_roots(coeffs: &[Complex64], max_iter: usize, tol: f64) -> Result<Vec<Complex64>> {
    let lead = *coeffs.last().expect("nonempty polynomial");
    if lead == Complex64::new(0.0, 0.0) {
        return Err(Error::RootFinding("zero leading coefficient"));
    }
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Ok(Vec::new());
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|&c| c / lead).collect();

    // Cauchy bound keeps every root inside |z| <= 1 + max|a_i|
    let bound = 1.0
        + monic[..degree]
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);

    // non-real, non-uniform starts to break symmetric stalls
    let mut roots: Vec<Complex64> = (0..degree)
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * i as f64 / degree as f64 + 0.4;
            Complex64::from_polar(0.5 * bound * (0.7 + 0.3 * (i as f64 / degree as f64)), angle)
        })
        .collect();

    for _ in 0..max_iter {
        let mut moved = 0.0f64;
        for i in 0..degree {
            let zi = roots[i];
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, &zj) in roots.iter().enumerate() {
                if j != i {
                    denom *= zi - zj;
                }
            }
            if denom == Complex64::new(0.0, 0.0) {
                roots[i] += Complex64::new(1e-8, 1e-8);
                continue;
            }
            let step = eval(&monic, zi) / denom;
            roots[i] = zi - step;
            moved = moved.max(step.norm());
        }
        if moved < tol {
            return Ok(roots);
        }
    }
    // report whether the final residuals are acceptable anyway
    let worst = roots
        .iter()
        .map(|&r| eval(&monic, r).norm())
        .fold(0.0f64, f64::max);
    if worst < tol.sqrt() {
        Ok(roots)
    } else {
        Err(Error::RootFinding("Durand-Kerner did not converge"))
    }
}
