//! Minimal arbitrary-precision complex arithmetic on astro-float `BigFloat`.
//!
//! The hypergeometric coefficient F_n is a terminating sum whose terms grow
//! like e^{n·max Re g} while the sum itself behaves like e^{n·Re g(φ)};
//! the gap reaches hundreds of decimal digits by n ≈ 300, far beyond f64.
//! Only +, −, ×, ÷ are needed for the term recurrence, so this stays small.

use astro_float::{BigFloat, RoundingMode};
use num_complex::Complex64;

use crate::scaled::{ldexp, ScaledComplex};

const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Debug, Clone)]
pub(crate) struct WideComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

/// Leading ~106 bits of a BigFloat as f64, optionally shifted by −2^shift.
fn bf_to_f64_shifted(x: &BigFloat, shift: i64) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    match x.as_raw_parts() {
        Some((words, _, sign, e, _)) => {
            let k = words.len();
            let top = words[k - 1] as f64;
            let next = if k >= 2 { words[k - 2] as f64 } else { 0.0 };
            // mantissa is a binary fraction in [0.5, 1): value = frac * 2^e
            let frac = top / 2f64.powi(64) + next / 2f64.powi(128);
            let v = ldexp(frac, e as i64 - shift);
            if sign.is_negative() {
                -v
            } else {
                v
            }
        }
        None => f64::NAN,
    }
}

/// log2 of |x| up to the mantissa fraction; None for zero.
fn bf_log2(x: &BigFloat) -> Option<f64> {
    if x.is_zero() {
        return None;
    }
    let e = x.exponent()? as f64;
    let frac = bf_to_f64_shifted(x, x.exponent()? as i64).abs();
    Some(e + frac.log2())
}

impl WideComplex {
    pub fn from_c64(z: Complex64, p: usize) -> Self {
        WideComplex {
            re: BigFloat::from_f64(z.re, p),
            im: BigFloat::from_f64(z.im, p),
        }
    }

    pub fn one(p: usize) -> Self {
        WideComplex {
            re: BigFloat::from_f64(1.0, p),
            im: BigFloat::from_f64(0.0, p),
        }
    }

    pub fn add(&self, o: &WideComplex, p: usize) -> Self {
        WideComplex {
            re: self.re.add(&o.re, p, RM),
            im: self.im.add(&o.im, p, RM),
        }
    }

    pub fn mul(&self, o: &WideComplex, p: usize) -> Self {
        let ac = self.re.mul(&o.re, p, RM);
        let bd = self.im.mul(&o.im, p, RM);
        let ad = self.re.mul(&o.im, p, RM);
        let bc = self.im.mul(&o.re, p, RM);
        WideComplex {
            re: ac.sub(&bd, p, RM),
            im: ad.add(&bc, p, RM),
        }
    }

    pub fn div(&self, o: &WideComplex, p: usize) -> Self {
        let den = o.re.mul(&o.re, p, RM).add(&o.im.mul(&o.im, p, RM), p, RM);
        let ac = self.re.mul(&o.re, p, RM);
        let bd = self.im.mul(&o.im, p, RM);
        let bc = self.im.mul(&o.re, p, RM);
        let ad = self.re.mul(&o.im, p, RM);
        WideComplex {
            re: ac.add(&bd, p, RM).div(&den, p, RM),
            im: bc.sub(&ad, p, RM).div(&den, p, RM),
        }
    }

    /// Multiply by a real f64 factor.
    pub fn mul_f64(&self, x: f64, p: usize) -> Self {
        let b = BigFloat::from_f64(x, p);
        WideComplex {
            re: self.re.mul(&b, p, RM),
            im: self.im.mul(&b, p, RM),
        }
    }

    /// Divide by a real f64 factor.
    pub fn div_f64(&self, x: f64, p: usize) -> Self {
        let b = BigFloat::from_f64(x, p);
        WideComplex {
            re: self.re.div(&b, p, RM),
            im: self.im.div(&b, p, RM),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// log2 of max(|re|, |im|); None for zero. Cheap magnitude proxy
    /// (within half a bit of log2 of the modulus).
    pub fn log2_mag(&self) -> Option<f64> {
        match (bf_log2(&self.re), bf_log2(&self.im)) {
            (None, None) => None,
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b),
            (Some(a), Some(b)) => Some(a.max(b)),
        }
    }

    /// Round to a mantissa × 2^exp2 pair.
    pub fn to_scaled(&self) -> ScaledComplex {
        let lg = match self.log2_mag() {
            None => return ScaledComplex::zero(),
            Some(v) => v,
        };
        let shift = lg.floor() as i64;
        let mant = Complex64::new(
            bf_to_f64_shifted(&self.re, shift),
            bf_to_f64_shifted(&self.im, shift),
        );
        ScaledComplex { mant, exp2: shift }
    }
}
