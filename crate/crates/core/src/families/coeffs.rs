//! Recurrence coefficients `e_n`, `f_n` of the Askey-Wilson recurrence
//! `alpha_{n+1} = (2x - e_n) alpha_n - f_n alpha_{n-1}`, and the ladder
//! `A_n`, `C_n` they are assembled from.
//!
//! Both coefficients depend on the parameters only through
//! `s1 = a+b+c+d`, `s3 = abc+abd+acd+bcd`, `S = abcd` and the product of the six
//! pair factors `(1 - ab q^{n-1}) ... (1 - cd q^{n-1})`. The first two degrees
//! are written out separately so that `q = 0` never meets a negative power.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::families::params::{omega, SchemeParams};
use crate::qkernel::{qpow, Scalar};

const DEGENERATE: f64 = 1e-14;
const REAL_TOL: f64 = 1e-12;

/// Factor `1 - S q^k`, rejected when it vanishes.
fn unit_factor<T: Scalar>(s: T, q: f64, k: usize, context: &'static str) -> Result<T> {
    let f = T::one() - s * T::from(qpow(q, k));
    if f.modulus() < DEGENERATE {
        return Err(Error::DegenerateDenominator { context, factor: f.modulus() });
    }
    Ok(f)
}

/// `e_n` from the symmetric functions.
pub(crate) fn e_core<T: Scalar>(n: usize, s1: T, s3: T, s: T, q: f64) -> Result<T> {
    let c = |v: f64| T::from(v);
    let ctx = "e_n";
    match n {
        0 => Ok((s1 - s3) / unit_factor(s, q, 0, ctx)?),
        1 => {
            let den = unit_factor(s, q, 0, ctx)? * unit_factor(s, q, 2, ctx)?;
            let num = s1 * (c(q) - s * c(1.0 + q - q * q)) + s3 * (c(1.0 - q - q * q) + s * c(q));
            Ok(num / den)
        }
        _ => {
            let den = unit_factor(s, q, 2 * n - 2, ctx)? * unit_factor(s, q, 2 * n, ctx)?;
            let t1 = c(q * q) - s * c(qpow(q, n) * (1.0 + q - qpow(q, n + 1)));
            let t3 = c(q - qpow(q, n + 2) - qpow(q, n + 1)) + s * c(qpow(q, 2 * n));
            Ok(c(qpow(q, n - 2)) * (s1 * t1 + s3 * t3) / den)
        }
    }
}

/// `f_n` with the leading factor `lead` (`1 - q^n`, or `[n]_q` after rescaling)
/// and the pair product `p6` already evaluated at level `n`.
pub(crate) fn f_core<T: Scalar>(n: usize, lead: T, p6: T, s: T, q: f64) -> Result<T> {
    let ctx = "f_n";
    match n {
        0 => Ok(T::zero()),
        1 => {
            let d0 = unit_factor(s, q, 0, ctx)?;
            Ok(lead * p6 / (d0 * d0 * unit_factor(s, q, 1, ctx)?))
        }
        _ => {
            let mid = unit_factor(s, q, 2 * n - 2, ctx)?;
            let den = unit_factor(s, q, 2 * n - 3, ctx)? * mid * mid * unit_factor(s, q, 2 * n - 1, ctx)?;
            let num = lead * p6 * (T::one() - s * T::from(qpow(q, n - 2)));
            Ok(num / den)
        }
    }
}

/// Symmetric data of a parameter set, in the arithmetic its form needs.
pub(crate) enum Invariants {
    Quad { vals: [Complex64; 4] },
    Conjugate { y: f64, rho1: f64, z: f64, rho2: f64 },
}

impl Invariants {
    pub(crate) fn of(p: &SchemeParams) -> Self {
        match *p {
            SchemeParams::Conjugate { y, rho1, z, rho2, .. } => Invariants::Conjugate { y, rho1, z, rho2 },
            SchemeParams::Quad { .. } => Invariants::Quad { vals: p.quad_values() },
        }
    }
}

fn quad_symmetric(v: &[Complex64; 4]) -> (Complex64, Complex64, Complex64) {
    let [a, b, c, d] = *v;
    (a + b + c + d, a * b * c + a * b * d + a * c * d + b * c * d, a * b * c * d)
}

fn quad_p6(v: &[Complex64; 4], q: f64, n: usize) -> Complex64 {
    let qn = qpow(q, n - 1);
    let one = Complex64::new(1.0, 0.0);
    let mut p = one;
    for i in 0..4 {
        for j in i + 1..4 {
            p *= one - v[i] * v[j] * qn;
        }
    }
    p
}

/// Conjugate pair product at level `n` for (possibly rescaled) `y`, `z`.
pub(crate) fn conj_p6(y: f64, rho1: f64, z: f64, rho2: f64, q: f64, n: usize) -> f64 {
    let qn = qpow(q, n - 1);
    (1.0 - rho1 * rho1 * qn) * (1.0 - rho2 * rho2 * qn) * omega(y, z, rho1 * rho2 * qn)
}

fn require_real(v: Complex64, context: &'static str) -> Result<f64> {
    if v.im.abs() > REAL_TOL * v.norm().max(1.0) {
        return Err(Error::NonReal { context, imag: v.im });
    }
    Ok(v.re)
}

/// `(e_n, f_n)` for any parameter form. The conjugate form is evaluated in
/// real arithmetic; a quadruple goes through complex arithmetic and must
/// come out real.
pub fn aw_recurrence_coeffs(n: usize, p: &SchemeParams) -> Result<(f64, f64)> {
    let q = p.q().value();
    let lead = 1.0 - qpow(q, n);
    match Invariants::of(p) {
        Invariants::Conjugate { y, rho1, z, rho2 } => {
            let s = (rho1 * rho2).powi(2);
            let s1 = 2.0 * (rho1 * y + rho2 * z);
            let s3 = 2.0 * rho1 * rho2 * (rho1 * z + rho2 * y);
            let e = e_core(n, s1, s3, s, q)?;
            let f = if n == 0 { 0.0 } else { f_core(n, lead, conj_p6(y, rho1, z, rho2, q, n), s, q)? };
            Ok((e, f))
        }
        Invariants::Quad { vals } => {
            let (s1, s3, s) = quad_symmetric(&vals);
            let e = e_core(n, s1, s3, s, q)?;
            let f = if n == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                f_core(n, Complex64::new(lead, 0.0), quad_p6(&vals, q, n), s, q)?
            };
            Ok((require_real(e, "e_n")?, require_real(f, "f_n")?))
        }
    }
}

/// Ladder `(A_n, C_n)` with `e_n = a + 1/a - A_n - C_n` and `f_n = A_{n-1} C_n`.
/// Values are complex because `a` alone need not be real.
pub fn kls_ladder_coeffs(n: usize, p: &SchemeParams) -> Result<(Complex64, Complex64)> {
    let [a, b, c, d] = p.quad_values();
    if a.norm() == 0.0 {
        return Err(crate::error::invalid("the ladder needs a != 0"));
    }
    let q = p.q().value();
    let s = a * b * c * d;
    let one = Complex64::new(1.0, 0.0);
    let ctx = "ladder";
    let qn = qpow(q, n);
    let big_a = if n == 0 {
        (one - a * b) * (one - a * c) * (one - a * d) / (a * unit_factor(s, q, 0, ctx)?)
    } else {
        (one - a * b * qn) * (one - a * c * qn) * (one - a * d * qn) * (one - s * qpow(q, n - 1))
            / (a * unit_factor(s, q, 2 * n - 1, ctx)? * unit_factor(s, q, 2 * n, ctx)?)
    };
    let big_c = if n == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        let qm = qpow(q, n - 1);
        a * (1.0 - qn) * (one - b * c * qm) * (one - b * d * qm) * (one - c * d * qm)
            / (unit_factor(s, q, 2 * n - 2, ctx)? * unit_factor(s, q, 2 * n - 1, ctx)?)
    };
    Ok((big_a, big_c))
}
