//! q-calculus primitives: q-numbers, q-binomials and finite/infinite
//! q-Pochhammer symbols over real and complex arguments.
//!
//! Finite products are defined for every real base, including bases outside
//! `(-1, 1]`, so these functions take the base as a plain `f64`. Infinite
//! products need `|q| < 1` and take a validated [`QBase`].

use std::fmt;
use std::ops::Neg;

use num_complex::Complex64;
use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Which of the three regimes a base falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Generic,
    Zero,
    One,
}

/// The deformation parameter `q`, restricted to `(-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct QBase(f64);

impl QBase {
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() || q <= -1.0 || q > 1.0 {
            return Err(invalid(format!("base q = {q} outside (-1, 1]")));
        }
        Ok(Self(q))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn branch(self) -> Branch {
        if self.0 == 0.0 {
            Branch::Zero
        } else if self.0 == 1.0 {
            Branch::One
        } else {
            Branch::Generic
        }
    }

    pub fn is_one(self) -> bool {
        self.0 == 1.0
    }

    /// Rejects `q = 1` for quantities that only exist when `|q| < 1`.
    pub fn require_below_one(self, context: &str) -> Result<Self> {
        if self.is_one() {
            Err(invalid(format!("{context} requires |q| < 1")))
        } else {
            Ok(self)
        }
    }

    /// Half-width of the rescaled support S(q); infinite at `q = 1`.
    pub fn support_radius(self) -> f64 {
        if self.is_one() {
            f64::INFINITY
        } else {
            2.0 / (1.0 - self.0).sqrt()
        }
    }

    /// Largest number of factors an infinite product in a density may use.
    pub fn factor_cap(self, tol: f64) -> usize {
        let aq = self.0.abs();
        if aq == 0.0 {
            1
        } else {
            1 + (tol.ln() / aq.ln()).ceil().max(0.0) as usize
        }
    }
}

impl TryFrom<f64> for QBase {
    type Error = Error;
    fn try_from(q: f64) -> Result<Self> {
        Self::new(q)
    }
}

impl From<QBase> for f64 {
    fn from(q: QBase) -> f64 {
        q.0
    }
}

impl fmt::Display for QBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Number type the recurrences and products are generic over: `f64` or `Complex64`.
pub trait Scalar: Num + Copy + Neg<Output = Self> + From<f64> + fmt::Debug {
    fn modulus(self) -> f64;
    fn real_part(self) -> f64;
    fn imag_part(self) -> f64;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn real_part(self) -> f64 {
        self
    }
    fn imag_part(self) -> f64 {
        0.0
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn real_part(self) -> f64 {
        self.re
    }
    fn imag_part(self) -> f64 {
        self.im
    }
}

/// `q^k` for a non-negative integer power, with `0^0 = 1`.
#[inline]
pub fn qpow(q: f64, k: usize) -> f64 {
    q.powi(k as i32)
}

/// `C(n, 2) = n(n-1)/2`.
#[inline]
pub fn binom2(n: usize) -> i32 {
    (n * n.saturating_sub(1) / 2) as i32
}

/// The q-number `[n]_q = 1 + q + ... + q^{n-1}`.
pub fn q_number(n: usize, q: f64) -> f64 {
    if q == 1.0 {
        return n as f64;
    }
    if q == 0.0 {
        return if n == 0 { 0.0 } else { 1.0 };
    }
    let mut sum = 0.0;
    let mut term = 1.0;
    for _ in 0..n {
        sum += term;
        term *= q;
    }
    sum
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`.
pub fn q_factorial(n: usize, q: f64) -> f64 {
    (1..=n).map(|j| q_number(j, q)).product()
}

/// Gaussian binomial coefficient; zero unless `n >= k >= 0`.
pub fn q_binomial(n: i64, k: i64, q: f64) -> f64 {
    if k < 0 || n < k {
        return 0.0;
    }
    let (n, k) = (n as usize, k as usize);
    if q == 0.0 {
        return 1.0;
    }
    if q == 1.0 || q == -1.0 {
        return q_pascal(n, k, q);
    }
    q_pochhammer(q, q, n) / (q_pochhammer(q, q, n - k) * q_pochhammer(q, q, k))
}

// [n k] = [n-1 k-1] + q^k [n-1 k]; free of 0/0 at roots of unity.
fn q_pascal(n: usize, k: usize, q: f64) -> f64 {
    let mut row = vec![0.0; k + 1];
    row[0] = 1.0;
    for m in 1..=n {
        for j in (1..=k.min(m)).rev() {
            row[j] = row[j - 1] + qpow(q, j) * row[j];
        }
    }
    row[k]
}

/// Finite q-Pochhammer symbol `(a; q)_n`.
pub fn q_pochhammer<T: Scalar>(a: T, q: f64, n: usize) -> T {
    let mut prod = T::one();
    let mut aq = a;
    for _ in 0..n {
        prod = prod * (T::one() - aq);
        aq = aq * T::from(q);
    }
    prod
}

/// `(a_1, ..., a_k; q)_n`.
pub fn q_pochhammer_multi<T: Scalar>(args: &[T], q: f64, n: usize) -> T {
    args.iter()
        .fold(T::one(), |acc, &a| acc * q_pochhammer(a, q, n))
}

/// Infinite q-Pochhammer symbol `(a; q)_inf`, truncated at the first `N` with
/// `|a q^N| / (1 - |q|) < tol`.
pub fn q_pochhammer_inf<T: Scalar>(a: T, q: QBase, tol: f64) -> Result<T> {
    if !(tol > 0.0) {
        return Err(invalid("product tolerance must be positive"));
    }
    if q.is_one() {
        if a.modulus() == 0.0 {
            return Ok(T::one());
        }
        return Err(invalid("(a; q)_inf diverges at q = 1"));
    }
    Ok(product_inf(a, q.value(), tol, usize::MAX))
}

/// Truncated infinite product with an explicit factor cap.
pub(crate) fn product_inf<T: Scalar>(a: T, q: f64, tol: f64, cap: usize) -> T {
    let scale = 1.0 / (1.0 - q.abs());
    let mut prod = T::one();
    let mut term = a;
    let mut used = 0;
    while term.modulus() * scale >= tol && used < cap {
        prod = prod * (T::one() - term);
        term = term * T::from(q);
        used += 1;
    }
    prod
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qb(q: f64) -> QBase {
        QBase::new(q).unwrap()
    }

    #[test]
    fn base_branches() {
        assert_eq!(qb(0.0).branch(), Branch::Zero);
        assert_eq!(qb(1.0).branch(), Branch::One);
        assert_eq!(qb(-0.3).branch(), Branch::Generic);
        assert!(QBase::new(-1.0).is_err());
        assert!(QBase::new(1.2).is_err());
        assert!(QBase::new(f64::NAN).is_err());
    }

    #[test]
    fn q_numbers() {
        assert_eq!(q_number(3, 0.5), 1.75);
        assert_eq!(q_number(5, 1.0), 5.0);
        assert_eq!(q_number(5, 0.0), 1.0);
        assert_eq!(q_number(0, 0.0), 0.0);
        assert_eq!(q_number(0, 0.4), 0.0);
    }

    #[test]
    fn q_binomials() {
        assert!((q_binomial(4, 2, 0.5) - 2.1875).abs() < 1e-15);
        assert_eq!(q_binomial(5, 7, 0.3), 0.0);
        assert_eq!(q_binomial(5, -1, 0.3), 0.0);
        assert_eq!(q_binomial(5, 2, 0.0), 1.0);
        assert_eq!(q_binomial(6, 3, 1.0), 20.0);
        // q = -1 goes through the Pascal route: [4 2]_{-1} = 1 + q + 2q^2 + q^3 + q^4 = 2.
        assert!((q_binomial(4, 2, -1.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn pochhammer_finite() {
        let q = 0.7;
        assert_eq!(q_pochhammer(0.3, q, 0), 1.0);
        assert!((q_pochhammer(0.5, 0.5, 3) - 0.328125).abs() < 1e-16);
        assert_eq!(q_pochhammer(1.0, q, 4), 0.0);
        let z = Complex64::new(0.2, 0.4);
        let direct = (Complex64::new(1.0, 0.0) - z) * (Complex64::new(1.0, 0.0) - z * q);
        assert!((q_pochhammer(z, q, 2) - direct).norm() < 1e-16);
    }

    #[test]
    fn pochhammer_infinite() {
        let tol = 1e-14;
        assert_eq!(q_pochhammer_inf(0.0, qb(0.6), tol).unwrap(), 1.0);
        assert_eq!(q_pochhammer_inf(0.37, qb(0.0), tol).unwrap(), 1.0 - 0.37);
        assert!(q_pochhammer_inf(0.3, qb(1.0), tol).is_err());
        assert_eq!(q_pochhammer_inf(0.0, qb(1.0), tol).unwrap(), 1.0);
        assert!(q_pochhammer_inf(0.3, qb(0.5), 0.0).is_err());
    }

    #[test]
    fn pochhammer_infinite_against_long_product() {
        // Independent oracle: keep multiplying until |a q^N| < 1e-16.
        let (a, q) = (0.5_f64, 0.5_f64);
        let mut oracle = 1.0;
        let mut term = a;
        while term.abs() >= 1e-16 {
            oracle *= 1.0 - term;
            term *= q;
        }
        // 30-digit reference: 0.288788095086602421278899721929
        assert!((oracle - 0.288_788_095_086_602_4).abs() < 1e-15);
        let v = q_pochhammer_inf(a, qb(q), 1e-14).unwrap();
        assert!((v - oracle).abs() <= 1e-14 * oracle.abs());
    }

    #[test]
    fn negative_base_product_alternates() {
        let q = -0.5;
        let v: f64 = q_pochhammer_inf(0.8, qb(q), 1e-15).unwrap();
        let mut oracle = 1.0;
        let mut t = 0.8;
        for _ in 0..80 {
            oracle *= 1.0 - t;
            t *= q;
        }
        assert!((v - oracle).abs() < 1e-14);
    }

    #[test]
    fn factor_cap_covers_tolerance() {
        let q = qb(0.95);
        let cap = q.factor_cap(1e-14);
        assert!(0.95_f64.powi(cap as i32 - 1) <= 1e-14);
        assert_eq!(qb(0.0).factor_cap(1e-14), 1);
    }
}
