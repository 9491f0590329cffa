//! Complex numbers with a separate power-of-two scale.
//!
//! Taylor coefficients of f⁻¹ grow like (1/R)ⁿ and the retained F_n values
//! like e^{n·Re g}, both of which overflow f64 well before the table orders
//! the root-test diagnostics need. A [`ScaledComplex`] keeps a normalized
//! f64 mantissa together with an i64 binary exponent so magnitudes and
//! log-magnitudes stay exact at any order.

use num_complex::Complex64;

/// A complex value `mant · 2^exp2` with `max(|re|, |im|) ∈ [1, 2)` unless zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    pub mant: Complex64,
    pub exp2: i64,
}

/// `x · 2^e` without the range limits of `f64::powi`.
pub(crate) fn ldexp(x: f64, e: i64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    if e > 2100 {
        return x * f64::INFINITY;
    }
    if e < -2200 {
        return 0.0 * x.signum();
    }
    // stage in chunks that each stay representable
    let mut v = x;
    let mut r = e;
    while r > 0 {
        let s = r.min(900);
        v *= 2f64.powi(s as i32);
        r -= s;
    }
    while r < 0 {
        let s = (-r).min(900);
        v *= 2f64.powi(-(s as i32));
        r += s;
    }
    v
}

impl ScaledComplex {
    pub fn zero() -> Self {
        ScaledComplex { mant: Complex64::new(0.0, 0.0), exp2: 0 }
    }

    pub fn one() -> Self {
        ScaledComplex { mant: Complex64::new(1.0, 0.0), exp2: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.re == 0.0 && self.mant.im == 0.0
    }

    /// Build from an ordinary complex value.
    pub fn from_c64(z: Complex64) -> Self {
        ScaledComplex { mant: z, exp2: 0 }.normalized()
    }

    /// Build from a natural-log magnitude and an argument.
    pub fn from_ln_arg(ln_mag: f64, arg: f64) -> Self {
        if ln_mag == f64::NEG_INFINITY {
            return Self::zero();
        }
        let e = (ln_mag / std::f64::consts::LN_2).floor();
        let m = (ln_mag - e * std::f64::consts::LN_2).exp();
        ScaledComplex {
            mant: Complex64::from_polar(m, arg),
            exp2: e as i64,
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        let a = self.mant.re.abs().max(self.mant.im.abs());
        if a == 0.0 || !a.is_finite() {
            self.exp2 = 0;
            return self;
        }
        let shift = a.log2().floor() as i64;
        if shift != 0 {
            self.mant = Complex64::new(ldexp(self.mant.re, -shift), ldexp(self.mant.im, -shift));
            self.exp2 += shift;
        }
        self
    }

    /// Convert back to f64 range; ±inf components when out of range.
    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(ldexp(self.mant.re, self.exp2), ldexp(self.mant.im, self.exp2))
    }

    /// Natural log of the modulus; −∞ for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.exp2 as f64 * std::f64::consts::LN_2 + self.mant.norm().ln()
    }

    pub fn arg(&self) -> f64 {
        self.mant.arg()
    }

    pub fn mul(&self, other: &ScaledComplex) -> ScaledComplex {
        ScaledComplex {
            mant: self.mant * other.mant,
            exp2: self.exp2 + other.exp2,
        }
        .normalized()
    }
}
