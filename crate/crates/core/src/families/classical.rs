use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qkernel::q_binomial;

/// Classical families that appear as limits or in proofs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassicalKind {
    /// Monic Hermite for the standard normal weight: `H_{n+1} = x H_n - n H_{n-1}`.
    HermiteMonic,
    /// Chebyshev of the second kind: `U_{n+1} = 2x U_n - U_{n-1}`.
    ChebyshevU,
    /// Rogers-Szego `R_n(x|q) = sum_k [n k]_q x^k`, evaluated at base `q`.
    RogersSzego { q: f64 },
}

/// `H_n(x)` with variance `var`: `K_{n+1} = u K_n - n var K_{n-1}`.
/// Equals `var^{n/2} H_n(u / sqrt(var))`.
pub fn hermite_var(n: usize, u: f64, var: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = u * cur - k as f64 * var * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `U_n(x)`, with `U_{-1} = 0` for negative indices.
pub fn chebyshev_u(n: isize, x: f64) -> f64 {
    if n < 0 {
        return 0.0;
    }
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 0..n {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

pub fn rogers_szego(n: usize, x: Complex64, q: f64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    for k in 0..=n {
        sum += pow * q_binomial(n as i64, k as i64, q);
        pow *= x;
    }
    sum
}

pub fn classical(kind: ClassicalKind, n: usize, arg: Complex64) -> Complex64 {
    match kind {
        ClassicalKind::HermiteMonic => {
            let (mut prev, mut cur) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
            for k in 0..n {
                let next = arg * cur - prev * k as f64;
                prev = cur;
                cur = next;
            }
            cur
        }
        ClassicalKind::ChebyshevU => {
            let (mut prev, mut cur) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
            for _ in 0..n {
                let next = arg * cur * 2.0 - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
        ClassicalKind::RogersSzego { q } => rogers_szego(n, arg, q),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::scheme::h_sequence;

    #[test]
    fn low_degrees() {
        let x = Complex64::new(0.7, 0.0);
        let u2 = classical(ClassicalKind::ChebyshevU, 2, x).re;
        assert!((u2 - (4.0 * 0.49 - 1.0)).abs() < 1e-15);
        let h3 = classical(ClassicalKind::HermiteMonic, 3, x).re;
        assert!((h3 - (0.343 - 2.1)).abs() < 1e-15);
        assert_eq!(chebyshev_u(-1, 0.3), 0.0);
        assert!((hermite_var(3, 0.7, 1.0) - h3).abs() < 1e-15);
    }

    #[test]
    fn rogers_szego_gives_q_hermite() {
        let (theta, q) = (0.83_f64, 0.45);
        let h = h_sequence(10, theta.cos(), q);
        for (n, hn) in h.iter().enumerate() {
            let r = rogers_szego(n, Complex64::from_polar(1.0, -2.0 * theta), q);
            let v = Complex64::from_polar(1.0, n as f64 * theta) * r;
            assert!((v.re - hn).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
    }
}
