//! The forward map f(z) = z·∏(z − t_i)^{p_i}·e^z, its reduction from a general
//! leading factor (z − t₀)^{p₀} to standard form, and the Taylor series of the
//! inverse around 0:
//!
//! ```text
//! f⁻¹(x) = Σ_{n≥1} c_n xⁿ,   c_n = (−n)^{n−1}/n! · ∏(−t_i)^{−n·p_i} · F_n,
//! ```
//!
//! with F_n from [`crate::hyper::fn_coefficient`]. All complex powers are
//! principal values (argument in (−π, π]), which fixes the inverse branch
//! through 0. For m = 0 the table reduces to the classical Lambert W series
//! c_n = (−n)^{n−1}/n!.
//!
//! Coefficients are stored as [`ScaledComplex`] (mantissa × 2^exp): |c_n|
//! grows like (1/R)ⁿ and the retained F_n like e^{n·Re g}, either of which
//! can leave f64 range long before the orders the root-test diagnostics use.
//!
//! One branch caveat: for a real positive t_i with non-integer p_i, the
//! principal cut of (z − t_i)^{p_i} runs along z < t_i and passes through
//! the expansion point, so the principal-value forward map is discontinuous
//! across the real axis there. The series then inverts the branch continued
//! through arg(z − t_i) = +π (the one its coefficients are built from), not
//! the two-sided principal map.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::hyper;
use crate::scaled::ScaledComplex;
use crate::{Error, Result};

/// The defining data (t₁…t_m, p₁…p_m) of the forward map.
///
/// Every t_i and p_i must be nonzero: 0 must not be a branch point of any
/// factor (the inversion is anchored at z = 0), and a zero exponent would be
/// a trivial factor. m = 0 is allowed and gives the classical map z·e^z.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet {
    t: Vec<Complex64>,
    p: Vec<Complex64>,
}

impl ParamSet {
    pub fn new(t: Vec<Complex64>, p: Vec<Complex64>) -> Result<Self> {
        if t.len() != p.len() {
            return Err(Error::MismatchedLengths { t_len: t.len(), p_len: p.len() });
        }
        for (i, v) in t.iter().enumerate() {
            if *v == Complex64::new(0.0, 0.0) {
                return Err(Error::ZeroRoot { index: i });
            }
        }
        for (i, v) in p.iter().enumerate() {
            if *v == Complex64::new(0.0, 0.0) {
                return Err(Error::ZeroExponent { index: i });
            }
        }
        Ok(ParamSet { t, p })
    }

    /// The classical case m = 0 (plain z·e^z).
    pub fn classical() -> Self {
        ParamSet { t: Vec::new(), p: Vec::new() }
    }

    pub fn t(&self) -> &[Complex64] {
        &self.t
    }

    pub fn p(&self) -> &[Complex64] {
        &self.p
    }

    /// Number of linear factors m.
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

#[derive(Serialize, Deserialize)]
struct ParamSetRepr {
    t: Vec<[f64; 2]>,
    p: Vec<[f64; 2]>,
}

impl Serialize for ParamSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = ParamSetRepr {
            t: self.t.iter().map(|z| [z.re, z.im]).collect(),
            p: self.p.iter().map(|z| [z.re, z.im]).collect(),
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ParamSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ParamSetRepr::deserialize(d)?;
        ParamSet::new(
            repr.t.iter().map(|a| Complex64::new(a[0], a[1])).collect(),
            repr.p.iter().map(|a| Complex64::new(a[0], a[1])).collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Evaluate f(z) = z·∏(z − t_i)^{p_i}·e^z with principal-value powers.
///
/// At z = t_i the factor is an exact zero for positive integer p_i; any other
/// exponent makes t_i a branch point or pole and the evaluation is a domain
/// error.
pub fn forward_map(z: Complex64, params: &ParamSet) -> Result<Complex64> {
    let mut r = z * z.exp();
    for (i, (&t, &p)) in params.t.iter().zip(&params.p).enumerate() {
        let base = z - t;
        if base == Complex64::new(0.0, 0.0) {
            if p.im == 0.0 && p.re > 0.0 && p.re.fract() == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            return Err(Error::BranchPoint { index: i });
        }
        r *= base.powc(p);
    }
    Ok(r)
}

/// Logarithmic derivative f′(z)/f(z) = 1/z + Σ p_i/(z − t_i) + 1.
pub(crate) fn log_derivative(z: Complex64, params: &ParamSet) -> Complex64 {
    let mut d = Complex64::new(1.0, 0.0) + 1.0 / z;
    for (&t, &p) in params.t.iter().zip(&params.p) {
        d += p / (z - t);
    }
    d
}

/// f′(0) = ∏(−t_i)^{p_i}, the reciprocal of c₁.
pub fn derivative_at_zero(params: &ParamSet) -> Complex64 {
    let mut r = Complex64::new(1.0, 0.0);
    for (&t, &p) in params.t.iter().zip(&params.p) {
        r *= (-t).powc(p);
    }
    r
}

/// Record of the substitution w = (z − t₀)/p₀ reducing
/// y = (z − t₀)^{p₀}·∏(z − t_i)^{p_i}·e^z to the standard form
/// x = w·∏(w − t_i′)^{p_i′}·e^w with t_i′ = (t_i − t₀)/p₀ and p_i′ = p_i/p₀.
///
/// The argument transforms as x = p₀^{−1−(Σp_i)/p₀}·e^{−t₀/p₀}·y^{1/p₀};
/// carrying the substitution through shows the exponential comes out as
/// exactly e^w, with no residual exponent. The reduction is an identity as
/// long as the principal branch of y^{1/p₀} lands on the principal branches
/// of the individual factors (guaranteed near z = t₀ for p₀ > 0 real; for
/// general complex inputs a 2πi·k/p₀ branch mismatch selects a rotated
/// solution, which the round-trip residual exposes).
#[derive(Debug, Clone)]
pub struct NormalFormTransform {
    pub params_out: ParamSet,
    /// Multiplier applied to y^{1/p₀} to obtain the standard-form argument.
    pub argument_scale: Complex64,
    /// The exponent 1/p₀ applied to y.
    pub root_power: Complex64,
    /// p₀: solutions map back as z = p₀·w + t₀.
    pub variable_scale: Complex64,
    /// t₀.
    pub variable_shift: Complex64,
}

impl NormalFormTransform {
    /// Map an original argument y to the standard-form argument x.
    pub fn transform_argument(&self, y: Complex64) -> Complex64 {
        self.argument_scale * y.powc(self.root_power)
    }

    /// Map a standard-form solution w back to the original variable z.
    pub fn recover_variable(&self, w: Complex64) -> Complex64 {
        self.variable_scale * w + self.variable_shift
    }
}

/// Build the [`NormalFormTransform`] for a leading factor (z − t₀)^{p₀}.
pub fn normalize_general_form(
    t0: Complex64,
    p0: Complex64,
    params: &ParamSet,
) -> Result<NormalFormTransform> {
    if p0 == Complex64::new(0.0, 0.0) {
        return Err(Error::DegenerateSubstitution("p0 = 0"));
    }
    if params.t.contains(&t0) {
        return Err(Error::DegenerateSubstitution("some t_i coincides with t0"));
    }
    let t_out: Vec<Complex64> = params.t.iter().map(|&t| (t - t0) / p0).collect();
    let p_out: Vec<Complex64> = params.p.iter().map(|&p| p / p0).collect();
    let params_out = ParamSet::new(t_out, p_out)?;
    let p_sum: Complex64 = params.p.iter().sum();
    let exponent = -(Complex64::new(1.0, 0.0) + p_sum / p0);
    let argument_scale = p0.powc(exponent) * (-t0 / p0).exp();
    Ok(NormalFormTransform {
        params_out,
        argument_scale,
        root_power: 1.0 / p0,
        variable_scale: p0,
        variable_shift: t0,
    })
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Scaled prefactor (−n)^{n−1}/n! · ∏(−t_i)^{−n·p_i}.
///
/// The (−n)^{n−1} sign is applied exactly rather than through an argument of
/// π, so m = 0 coefficients stay exactly real.
fn coefficient_prefactor(n: usize, params: &ParamSet) -> ScaledComplex {
    let nf = n as f64;
    let mut ln_mag = (nf - 1.0) * nf.ln() - ln_factorial(n);
    let mut arg = 0.0;
    for (&t, &p) in params.t.iter().zip(&params.p) {
        let log_neg_t = (-t).ln(); // principal log
        let w = -nf * p * log_neg_t;
        ln_mag += w.re;
        arg += w.im;
    }
    let mut s = ScaledComplex::from_ln_arg(ln_mag, arg);
    if n.is_multiple_of(2) {
        // flip the sign without minting a −0.0 imaginary part
        s.mant = Complex64::new(-s.mant.re, -s.mant.im + 0.0);
    }
    s
}

/// Taylor coefficient c_n of f⁻¹, computed in f64 through
/// [`hyper::fn_coefficient`].
///
/// Accurate for moderate n; the alternating F_n sum loses digits to
/// cancellation as n grows (use [`build_table`] for high orders).
pub fn taylor_coefficient(n: usize, params: &ParamSet) -> Complex64 {
    assert!(n >= 1, "n must be positive");
    coefficient_prefactor(n, params).to_c64() * hyper::fn_coefficient(n, params)
}

/// Taylor coefficients c₁..c_N of f⁻¹ with the F_n values retained.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    params: ParamSet,
    c: Vec<ScaledComplex>,
    f_values: Vec<ScaledComplex>,
}

impl CoefficientTable {
    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    /// Highest order N in the table.
    pub fn n_max(&self) -> usize {
        self.c.len()
    }

    /// c_n, 1-based.
    pub fn coefficient(&self, n: usize) -> ScaledComplex {
        self.c[n - 1]
    }

    /// c_n as f64 components (infinite when out of f64 range).
    pub fn coefficient_c64(&self, n: usize) -> Complex64 {
        self.c[n - 1].to_c64()
    }

    /// F_n, 1-based.
    pub fn f_value(&self, n: usize) -> ScaledComplex {
        self.f_values[n - 1]
    }

    /// CSV export: `n,re_c,im_c,re_F,im_F`, 17 significant digits.
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "n,re_c,im_c,re_F,im_F")?;
        for n in 1..=self.n_max() {
            let c = self.coefficient_c64(n);
            let f = self.f_value(n).to_c64();
            writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e}",
                n, c.re, c.im, f.re, f.im
            )?;
        }
        Ok(())
    }
}

/// Compute the coefficient table up to order N.
///
/// F_n is summed in adaptive arbitrary precision (the term cancellation in
/// the alternating sum exceeds f64 long before N = 300), then folded with the
/// prefactor in scaled form. Deterministic.
pub fn build_table(params: &ParamSet, n_max: usize) -> CoefficientTable {
    assert!(n_max >= 1, "N must be positive");
    let mut c = Vec::with_capacity(n_max);
    let mut f_values = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let f = hyper::fn_coefficient_scaled(n, params);
        c.push(coefficient_prefactor(n, params).mul(&f));
        f_values.push(f);
    }
    CoefficientTable { params: params.clone(), c, f_values }
}

/// Horner partial sum Σ_{n=1}^{n_terms} c_n xⁿ.
///
/// No convergence guarantee outside the empirical radius; coefficients beyond
/// f64 range saturate to infinity.
pub fn evaluate_series(x: Complex64, table: &CoefficientTable, n_terms: usize) -> Complex64 {
    assert!(n_terms >= 1 && n_terms <= table.n_max(), "n_terms out of range");
    if x == Complex64::new(0.0, 0.0) {
        return Complex64::new(0.0, 0.0);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for n in (1..=n_terms).rev() {
        acc = acc * x + table.coefficient_c64(n);
    }
    acc * x
}
