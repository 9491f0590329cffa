//! Pochhammer machinery, multi-index iteration, and terminating multivariable
//! hypergeometric sums.
//!
//! The coefficient of the inverse-series order n is driven by
//!
//! ```text
//! F_n = Σ_{k₁,…,k_m ≥ 0} (1−n)_{k₁+…+k_m} · ∏ (n·p_i)_{k_i} / (k_i! · (n·t_i)^{k_i}),
//! ```
//!
//! a terminating sum: (1−n)_K vanishes for K ≥ n, so only multi-indices of
//! weight ≤ n−1 contribute and F_n is a polynomial of degree n in the p_i and
//! 1/t_i. The same machinery evaluates the terminating Lauricella F_D and the
//! generalized Chu–Vandermonde identity
//!
//! ```text
//! Σ_{Σk_j = k} multinomial(k; k₁…k_r) ∏ (q_j)_{k_j} w_j^{k_j}
//!   = w_i^k (Σq_j)_k · F_D^{(r−1)}(−k, {q_j}_{j≠i}; Σq_j; {1 − w_j/w_i}_{j≠i}),
//! ```
//!
//! which holds for complex q, w as long as q_i avoids {0, −1, …, −(k−1)} and
//! w_i ≠ 0. Both sides are exposed so the identity is an executable check.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::scaled::ScaledComplex;
use crate::series::ParamSet;
use crate::wide::WideComplex;
use crate::{Error, Result};

/// A vector of m nonnegative summation indices with its weight cached.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    k: Vec<usize>,
    weight: usize,
}

impl MultiIndex {
    pub fn new(k: Vec<usize>) -> Self {
        let weight = k.iter().sum();
        MultiIndex { k, weight }
    }

    pub fn entries(&self) -> &[usize] {
        &self.k
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }
}

/// Rising factorial (q)_k = q(q+1)···(q+k−1) as an exact product.
///
/// No gamma functions: the finite product has no poles or branch cuts to
/// negotiate for complex q, and it vanishes exactly when q is a nonpositive
/// integer with −q < k (this vanishing is what truncates the F_n sum).
pub fn pochhammer(q: Complex64, k: usize) -> Complex64 {
    let mut r = Complex64::new(1.0, 0.0);
    for j in 0..k {
        r *= q + j as f64;
    }
    r
}

/// Falling factorial x(x−1)···(x−a+1); equals (−1)^a (−x)_a.
pub fn falling_factorial(x: Complex64, a: usize) -> Complex64 {
    let mut r = Complex64::new(1.0, 0.0);
    for j in 0..a {
        r *= x - j as f64;
    }
    r
}

/// All compositions of `weight` into `m` parts, lexicographically.
fn fixed_weight_compositions(m: usize, weight: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; m];
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
    }
    if m == 0 {
        if weight == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, weight, &mut cur, &mut out);
    out
}

/// Every multi-index of m nonnegative integers with weight ≤ max_weight,
/// in graded (weight-ascending) order, each exactly once.
///
/// The count is binomial(max_weight + m, m).
pub fn multi_indices(m: usize, max_weight: usize) -> impl Iterator<Item = MultiIndex> {
    (0..=max_weight).flat_map(move |w| {
        fixed_weight_compositions(m, w)
            .into_iter()
            .map(MultiIndex::new)
    })
}

/// True when z is exactly a nonpositive integer in {0, −1, …, −(k−1)},
/// i.e. when (z)_j vanishes for some j ≤ k.
fn kills_pochhammer(z: Complex64, k: usize) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 && z.re > -(k as f64)
}

/// Arguments of the terminating fourth Lauricella function
/// F_D(−k, b₁…b_m; c; x₁…x_m).
#[derive(Debug, Clone)]
pub struct LauricellaArgs {
    pub k: usize,
    pub b: Vec<Complex64>,
    pub c: Complex64,
    pub x: Vec<Complex64>,
}

impl LauricellaArgs {
    pub fn new(k: usize, b: Vec<Complex64>, c: Complex64, x: Vec<Complex64>) -> Result<Self> {
        if b.len() != x.len() {
            return Err(Error::MismatchedLengths { t_len: b.len(), p_len: x.len() });
        }
        if b.is_empty() {
            return Err(Error::MismatchedLengths { t_len: 0, p_len: 0 });
        }
        if kills_pochhammer(c, k) {
            return Err(Error::InvalidCParameter { c, k });
        }
        Ok(LauricellaArgs { k, b, c, x })
    }
}

const FACTORIALS: [f64; 21] = [
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362880.0,
    3628800.0,
    39916800.0,
    479001600.0,
    6227020800.0,
    87178291200.0,
    1307674368000.0,
    20922789888000.0,
    355687428096000.0,
    6402373705728000.0,
    121645100408832000.0,
    2432902008176640000.0,
];

fn factorial(k: usize) -> f64 {
    if k < FACTORIALS.len() {
        FACTORIALS[k]
    } else {
        (1..=k).map(|j| j as f64).product()
    }
}

/// Terminating Lauricella F_D(−k, b; c; x) as the exact finite sum over
/// multi-indices of weight ≤ k.
pub fn lauricella_fd(args: &LauricellaArgs) -> Complex64 {
    let m = args.b.len();
    let mut total = Complex64::new(0.0, 0.0);
    let minus_k = Complex64::new(-(args.k as f64), 0.0);
    for idx in multi_indices(m, args.k) {
        let kk = idx.weight();
        let mut term = pochhammer(minus_k, kk) / pochhammer(args.c, kk);
        for (i, &ki) in idx.entries().iter().enumerate() {
            term *= pochhammer(args.b[i], ki) * args.x[i].powu(ki as u32) / factorial(ki);
        }
        total += term;
    }
    total
}

/// Complex Neumaier-compensated accumulator, applied per component.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: Complex64,
    comp: Complex64,
}

impl Compensated {
    fn add(&mut self, x: Complex64) {
        let tr = self.sum.re + x.re;
        self.comp.re += if self.sum.re.abs() >= x.re.abs() {
            (self.sum.re - tr) + x.re
        } else {
            (x.re - tr) + self.sum.re
        };
        self.sum.re = tr;
        let ti = self.sum.im + x.im;
        self.comp.im += if self.sum.im.abs() >= x.im.abs() {
            (self.sum.im - ti) + x.im
        } else {
            (x.im - ti) + self.sum.im
        };
        self.sum.im = ti;
    }

    fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// F_n for the parameter set, summed over multi-indices of weight ≤ n−1 in
/// graded order with compensated accumulation.
///
/// Terms follow from their weight-(W−1) predecessor along the first nonzero
/// coordinate by a single multiply/divide update, so the total cost is one
/// update per multi-index. For m = 0 the empty product gives F_n = 1.
pub fn fn_coefficient(n: usize, params: &ParamSet) -> Complex64 {
    assert!(n >= 1, "n must be positive");
    let m = params.len();
    if m == 0 || n == 1 {
        return Complex64::new(1.0, 0.0);
    }
    let nf = n as f64;
    let mut acc = Compensated::default();
    acc.add(Complex64::new(1.0, 0.0));
    let mut prev: HashMap<Vec<usize>, Complex64> = HashMap::new();
    prev.insert(vec![0; m], Complex64::new(1.0, 0.0));
    for w in 1..n {
        let mut cur: HashMap<Vec<usize>, Complex64> = HashMap::with_capacity(prev.len() * 2);
        for k in fixed_weight_compositions(m, w) {
            let j = k.iter().position(|&v| v > 0).expect("weight > 0");
            let mut pred = k.clone();
            pred[j] -= 1;
            let base = prev[&pred];
            let kj = k[j] as f64;
            // (1−n)_{W−1} → (1−n)_W brings (W−n); the j-th Pochhammer brings
            // (n·p_j + k_j − 1); k_j! and (n·t_j)^{k_j} divide.
            let ratio = (nf * params.p()[j] + (kj - 1.0)) * (w as f64 - nf)
                / (kj * nf * params.t()[j]);
            let term = base * ratio;
            acc.add(term);
            cur.insert(k, term);
        }
        prev = cur;
    }
    acc.value()
}

/// F_n in adaptive arbitrary precision, returned as mantissa × 2^exp.
///
/// The terms alternate in sign through (1−n)_K and cancel down from
/// magnitudes of order e^{n·max Re g} to e^{n·Re g(φ)}; the working precision
/// doubles until the spread between the largest term and the sum leaves 64
/// guard bits. Exact zeros (e.g. F₂ when p = t) come out as zero.
pub(crate) fn fn_coefficient_scaled(n: usize, params: &ParamSet) -> ScaledComplex {
    let m = params.len();
    if m == 0 || n == 1 {
        return ScaledComplex::one();
    }
    let mut prec = 192usize;
    let cap = 1usize << 15;
    loop {
        let (sum, max_log2) = wide_sum(n, params, prec);
        if sum.is_zero() {
            return ScaledComplex::zero();
        }
        let sum_log2 = sum.log2_mag().unwrap_or(f64::NEG_INFINITY);
        if max_log2 - sum_log2 < prec as f64 - 64.0 {
            return sum.to_scaled();
        }
        if prec >= cap {
            // spread never stabilized: the sum is zero to every precision tried
            return ScaledComplex::zero();
        }
        prec *= 2;
    }
}

fn wide_sum(n: usize, params: &ParamSet, prec: usize) -> (WideComplex, f64) {
    struct Dfs<'a> {
        n: usize,
        prec: usize,
        np: Vec<WideComplex>,
        nt: Vec<WideComplex>,
        acc: WideComplex,
        max_log2: f64,
        params: &'a ParamSet,
    }
    impl Dfs<'_> {
        fn leaf(&mut self, term: &WideComplex) {
            if let Some(l) = term.log2_mag() {
                if l > self.max_log2 {
                    self.max_log2 = l;
                }
            }
            self.acc = self.acc.add(term, self.prec);
        }
        fn descend(&mut self, i: usize, weight_used: usize, term: &WideComplex) {
            if i == self.params.len() {
                self.leaf(term);
                return;
            }
            self.descend(i + 1, weight_used, term);
            let mut t = term.clone();
            for v in 1..=(self.n - 1 - weight_used) {
                let w_new = (weight_used + v) as f64;
                let numer = WideComplex {
                    re: self.np[i].re.add(
                        &astro_float::BigFloat::from_f64(v as f64 - 1.0, self.prec),
                        self.prec,
                        astro_float::RoundingMode::ToEven,
                    ),
                    im: self.np[i].im.clone(),
                };
                t = t
                    .mul(&numer, self.prec)
                    .mul_f64(w_new - self.n as f64, self.prec)
                    .div(&self.nt[i], self.prec)
                    .div_f64(v as f64, self.prec);
                self.descend(i + 1, weight_used + v, &t);
            }
        }
    }
    let np = params
        .p()
        .iter()
        .map(|&p| WideComplex::from_c64(p, prec).mul_f64(n as f64, prec))
        .collect();
    let nt = params
        .t()
        .iter()
        .map(|&t| WideComplex::from_c64(t, prec).mul_f64(n as f64, prec))
        .collect();
    let mut dfs = Dfs {
        n,
        prec,
        np,
        nt,
        acc: WideComplex::from_c64(Complex64::new(0.0, 0.0), prec),
        max_log2: f64::NEG_INFINITY,
        params,
    };
    let one = WideComplex::one(prec);
    dfs.descend(0, 0, &one);
    (dfs.acc, dfs.max_log2)
}

/// Left side of the generalized Chu–Vandermonde identity: the brute-force
/// sum over all compositions of k into r parts.
pub fn chu_vandermonde_lhs(k: usize, q: &[Complex64], w: &[Complex64]) -> Complex64 {
    assert_eq!(q.len(), w.len());
    assert!(!q.is_empty());
    let mut total = Complex64::new(0.0, 0.0);
    for comp in fixed_weight_compositions(q.len(), k) {
        let mut term = Complex64::new(factorial(k), 0.0);
        for (j, &kj) in comp.iter().enumerate() {
            term *= pochhammer(q[j], kj) * w[j].powu(kj as u32) / factorial(kj);
        }
        total += term;
    }
    total
}

/// Right side of the identity centered on `center` (0-based):
/// w_i^k (Σq_j)_k · F_D^{(r−1)}(−k, q_{≠i}; Σq_j; 1 − w_{≠i}/w_i).
///
/// For r = 1 the Lauricella factor is empty and the value is w_i^k (q_i)_k.
pub fn chu_vandermonde_rhs(
    k: usize,
    q: &[Complex64],
    w: &[Complex64],
    center: usize,
) -> Result<Complex64> {
    if q.len() != w.len() {
        return Err(Error::MismatchedLengths { t_len: q.len(), p_len: w.len() });
    }
    if center >= q.len() {
        return Err(Error::CenterOutOfRange { center, len: q.len() });
    }
    if kills_pochhammer(q[center], k) {
        return Err(Error::InvalidCenterParameter { q: q[center], k });
    }
    if w[center] == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroCenterWeight);
    }
    let q_sum: Complex64 = q.iter().sum();
    let prefactor = w[center].powu(k as u32) * pochhammer(q_sum, k);
    if q.len() == 1 {
        return Ok(prefactor);
    }
    let b: Vec<Complex64> = q
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != center)
        .map(|(_, &v)| v)
        .collect();
    let x: Vec<Complex64> = w
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != center)
        .map(|(_, &v)| Complex64::new(1.0, 0.0) - v / w[center])
        .collect();
    let args = LauricellaArgs::new(k, b, q_sum, x)?;
    Ok(prefactor * lauricella_fd(&args))
}

/// Both sides of the Lauricella reflection
/// F_D(−k, b; c; x) = (c−Σb)_k/(c)_k · F_D(−k, b; 1+Σb−k−c; 1−x),
/// returned as (lhs, rhs) for the caller to compare.
pub fn lauricella_reflection_check(
    k: usize,
    b: &[Complex64],
    c: Complex64,
    x: &[Complex64],
) -> Result<(Complex64, Complex64)> {
    let b_sum: Complex64 = b.iter().sum();
    let c_reflected = Complex64::new(1.0, 0.0) + b_sum - k as f64 - c;
    let lhs_args = LauricellaArgs::new(k, b.to_vec(), c, x.to_vec())?;
    let x_reflected: Vec<Complex64> = x.iter().map(|&v| Complex64::new(1.0, 0.0) - v).collect();
    let rhs_args = LauricellaArgs::new(k, b.to_vec(), c_reflected, x_reflected)?;
    let lhs = lauricella_fd(&lhs_args);
    let rhs = pochhammer(c - b_sum, k) / pochhammer(c, k) * lauricella_fd(&rhs_args);
    Ok((lhs, rhs))
}
