//! Forward three-term recurrences for the scheme families and the auxiliary
//! `p`, `b`, `g`, `w` polynomials.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::families::coeffs::aw_recurrence_coeffs;
use crate::families::params::{Family, SchemeParams};
use crate::qkernel::{qpow, QBase};

/// Values `P_0(x), ..., P_{n_max}(x)` of one family at a fixed point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolySequence {
    pub family: Family,
    pub n_max: usize,
    pub values: Vec<f64>,
}

impl PolySequence {
    pub fn new(family: Family, values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "a sequence holds at least P_0");
        Self { family, n_max: values.len() - 1, values }
    }

    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }

    pub fn last(&self) -> f64 {
        self.values[self.n_max]
    }
}

/// Runs `v_{k+1} = m_k v_k - s_k v_{k-1}` from `v_{-1} = 0`, `v_0 = 1`.
/// `step(k)` returns `(m_k, s_k)`; `s_0` is never used, so it may be
/// anything (including a non-finite value from a negative power of `q = 0`).
pub(crate) fn run_recurrence<F>(n_max: usize, mut step: F) -> Vec<f64>
where
    F: FnMut(usize) -> (f64, f64),
{
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    let mut prev = 0.0;
    for k in 0..n_max {
        let (m, s) = step(k);
        let cur = out[k];
        let next = if k == 0 { m * cur } else { m * cur - s * prev };
        prev = cur;
        out.push(next);
    }
    out
}

/// Same as [`run_recurrence`] but the step may fail.
pub(crate) fn try_run_recurrence<F>(n_max: usize, mut step: F) -> Result<Vec<f64>>
where
    F: FnMut(usize) -> Result<(f64, f64)>,
{
    let mut coeffs = Vec::with_capacity(n_max);
    for k in 0..n_max {
        coeffs.push(step(k)?);
    }
    Ok(run_recurrence(n_max, |k| coeffs[k]))
}

/// `alpha_0 .. alpha_{n_max}` of a scheme family (or its conjugate-form
/// counterpart) at `x`. Unused parameters are zeroed per [`Family::zeroed`].
pub fn eval_sequence(family: Family, n_max: usize, x: f64, p: &SchemeParams) -> Result<PolySequence> {
    let values = match (family, p) {
        (Family::P, SchemeParams::Conjugate { y, rho1, q, .. }) => p_sequence(n_max, x, *y, *rho1, *q),
        (Family::P, _) => return Err(invalid("family p needs conjugate parameters")),
        (Family::W, SchemeParams::Quad { .. }) => {
            return Err(invalid("family w needs conjugate parameters"))
        }
        _ => {
            let restricted = p.restrict(family);
            try_run_recurrence(n_max, |k| {
                let (e, f) = aw_recurrence_coeffs(k, &restricted)?;
                Ok((2.0 * x - e, f))
            })?
        }
    };
    Ok(PolySequence::new(family, values))
}

/// `alpha_n(x)` of a scheme family.
pub fn eval_scheme(family: Family, n: usize, x: f64, p: &SchemeParams) -> Result<f64> {
    Ok(eval_sequence(family, n, x, p)?.last())
}

/// Continuous q-Hermite `h_0 .. h_{n_max}`.
pub fn h_sequence(n_max: usize, x: f64, q: f64) -> Vec<f64> {
    run_recurrence(n_max, |k| (2.0 * x, 1.0 - qpow(q, k)))
}

pub fn eval_h(n: usize, x: f64, q: QBase) -> f64 {
    h_sequence(n, x, q.value())[n]
}

/// Al-Salam-Chihara in conjugate form:
/// `p_{n+1} = 2(x - rho y q^n) p_n - (1 - q^n)(1 - rho^2 q^{n-1}) p_{n-1}`.
/// Takes a plain base so that the inverted base `1/q` can be used too.
pub fn p_sequence_raw(n_max: usize, x: f64, y: f64, rho: f64, q: f64) -> Vec<f64> {
    run_recurrence(n_max, |k| {
        let back = if k == 0 { 0.0 } else { (1.0 - qpow(q, k)) * (1.0 - rho * rho * qpow(q, k - 1)) };
        (2.0 * (x - rho * y * qpow(q, k)), back)
    })
}

pub fn p_sequence(n_max: usize, x: f64, y: f64, rho: f64, q: QBase) -> Vec<f64> {
    p_sequence_raw(n_max, x, y, rho, q.value())
}

pub fn eval_p(n: usize, x: f64, y: f64, rho: f64, q: QBase) -> f64 {
    p_sequence(n, x, y, rho, q)[n]
}

/// `b_{n+1} = -2 q^n x b_n + q^{n-1}(1 - q^n) b_{n-1}`. At `q = 0` this
/// reproduces `b_0 = 1, b_1 = -2x, b_2 = 1` and zeros afterwards.
pub fn b_sequence(n_max: usize, x: f64, q: f64) -> Vec<f64> {
    run_recurrence(n_max, |k| {
        let back = if k == 0 { 0.0 } else { -qpow(q, k - 1) * (1.0 - qpow(q, k)) };
        (-2.0 * qpow(q, k) * x, back)
    })
}

pub fn eval_b(n: usize, x: f64, q: QBase) -> f64 {
    b_sequence(n, x, q.value())[n]
}

/// `g_{n+1} = -2(x q^n - rho y) g_n - (1 - q^n)(rho^2 - q^{n-1}) g_{n-1}`.
pub fn g_sequence(n_max: usize, x: f64, y: f64, rho: f64, q: f64) -> Vec<f64> {
    run_recurrence(n_max, |k| {
        let back = if k == 0 { 0.0 } else { (1.0 - qpow(q, k)) * (rho * rho - qpow(q, k - 1)) };
        (-2.0 * (x * qpow(q, k) - rho * y), back)
    })
}

pub fn eval_g(n: usize, x: f64, y: f64, rho: f64, q: QBase) -> f64 {
    g_sequence(n, x, y, rho, q.value())[n]
}

/// `g_n(x|y, t q^{shift}, q)` where `shift` may be negative. When `n = 0` the
/// value is 1 whatever the parameter, which keeps `q = 0` finite.
pub fn g_shifted(n: usize, x: f64, y: f64, t: f64, shift: i64, q: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    g_sequence(n, x, y, t * q.powi(shift as i32), q)[n]
}

/// Askey-Wilson polynomials with two conjugate pairs, in real arithmetic.
pub fn w_sequence(n_max: usize, x: f64, p: &SchemeParams) -> Result<Vec<f64>> {
    if !p.is_conjugate() {
        return Err(invalid("w_n needs conjugate parameters"));
    }
    Ok(eval_sequence(Family::Aw, n_max, x, p)?.values)
}

pub fn eval_w(n: usize, x: f64, p: &SchemeParams) -> Result<f64> {
    Ok(w_sequence(n, x, p)?[n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkernel::{binom2, q_binomial};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn qb(q: f64) -> QBase {
        QBase::new(q).unwrap()
    }

    #[test]
    fn q_hermite_low_degrees() {
        let p = SchemeParams::real(0.0, 0.0, 0.0, 0.0, 0.3).unwrap();
        let x = 0.41;
        assert!((eval_scheme(Family::Qh, 1, x, &p).unwrap() - 2.0 * x).abs() < 1e-15);
        let h2 = eval_scheme(Family::Qh, 2, x, &p).unwrap();
        assert!((h2 - (4.0 * x * x - 0.7)).abs() < 1e-15);
        assert!((eval_h(2, 0.5, qb(0.3)) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn q_hermite_at_zero_is_chebyshev_u() {
        let theta = 0.77_f64;
        let h = h_sequence(9, theta.cos(), 0.0);
        for (n, v) in h.iter().enumerate() {
            let u = ((n as f64 + 1.0) * theta).sin() / theta.sin();
            assert!((v - u).abs() < 1e-13);
        }
    }

    #[test]
    fn p_low_degrees_and_rho_zero() {
        let (x, y, rho) = (0.3, -0.6, 0.45);
        assert!((eval_p(1, x, y, rho, qb(0.5)) - 2.0 * (x - rho * y)).abs() < 1e-15);
        let h = h_sequence(7, x, 0.5);
        let p = p_sequence(7, x, y, 0.0, qb(0.5));
        assert_eq!(h, p);
    }

    #[test]
    fn b_at_zero_and_inversion() {
        let b = b_sequence(5, 0.3, 0.0);
        assert_eq!(b, vec![1.0, -0.6, 1.0, 0.0, 0.0, 0.0]);
        let q = 0.5;
        let h_inv = h_sequence(4, 0.3, 1.0 / q)[4];
        let expect = q.powi(binom2(4)) * h_inv;
        assert!((eval_b(4, 0.3, qb(q)) - expect).abs() < 1e-10);
        assert!((eval_b(1, 0.3, qb(q)) + 0.6).abs() < 1e-15);
    }

    #[test]
    fn g_reduces_to_b_and_inverts_p() {
        let (x, y) = (0.2, 0.5);
        assert_eq!(g_sequence(6, x, y, 0.0, 0.6), b_sequence(6, x, 0.6));
        assert!((eval_g(1, x, y, 0.4, qb(0.6)) + 2.0 * (x - 0.4 * y)).abs() < 1e-15);
        let expect = -(0.6_f64.powi(3)) * p_sequence_raw(3, x, y, 0.4, 1.0 / 0.6)[3];
        assert!((eval_g(3, x, y, 0.4, qb(0.6)) - expect).abs() < 1e-10);
    }

    #[test]
    fn w_with_rho1_zero_is_p() {
        let (y, z, r2, q) = (0.3, -0.7, 0.55, 0.4);
        let params = SchemeParams::conjugate(y, 0.0, z, r2, q).unwrap();
        let w = w_sequence(8, 0.13, &params).unwrap();
        let p = p_sequence(8, 0.13, z, r2, qb(q));
        for (a, b) in w.iter().zip(&p) {
            assert!((a - b).abs() < 1e-13 * b.abs().max(1.0));
        }
    }

    #[test]
    fn w_matches_complex_recurrence() {
        // Complex-arithmetic Askey-Wilson recurrence as an oracle.
        let params = SchemeParams::conjugate(0.3, 0.4, -0.2, 0.5, 0.6).unwrap();
        let quad = params.to_quad();
        let x = 0.1;
        let w = eval_w(4, x, &params).unwrap();
        let cq = eval_scheme(Family::Aw, 4, x, &quad).unwrap();
        assert!((w - cq).abs() < 1e-11 * w.abs().max(1.0));
    }

    #[test]
    fn family_dispatch_zeroes_leading_parameters() {
        let p = SchemeParams::real(0.3, 0.2, 0.1, 0.4, 0.5).unwrap();
        let x = 0.27;
        let c2h = eval_scheme(Family::C2h, 5, x, &p).unwrap();
        let direct = eval_scheme(Family::Aw, 5, x, &SchemeParams::real(0.0, 0.2, 0.1, 0.4, 0.5).unwrap()).unwrap();
        assert_eq!(c2h, direct);
        let bqh = eval_scheme(Family::Bqh, 3, x, &p).unwrap();
        let direct = eval_scheme(Family::Aw, 3, x, &SchemeParams::real(0.0, 0.0, 0.0, 0.4, 0.5).unwrap()).unwrap();
        assert_eq!(bqh, direct);
    }

    #[test]
    fn p_needs_conjugate_parameters() {
        let p = SchemeParams::real(0.3, 0.2, 0.1, 0.4, 0.5).unwrap();
        assert!(eval_sequence(Family::P, 3, 0.1, &p).is_err());
        assert!(w_sequence(3, 0.1, &p).is_err());
    }

    proptest! {
        #[test]
        fn asc_matches_p(x in -1f64..1.0, eta in 0f64..3.14, rho in -0.95f64..0.95, q in -0.9f64..0.95) {
            let c = Complex64::from_polar(rho, eta);
            let params = SchemeParams::quad(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), c, c.conj(), qb(q)).unwrap();
            let asc = eval_sequence(Family::Asc, 10, x, &params).unwrap();
            let p = p_sequence(10, x, eta.cos(), rho, qb(q));
            for (a, b) in asc.values.iter().zip(&p) {
                prop_assert!((a - b).abs() <= 1e-11 * b.abs().max(1.0));
            }
        }

        #[test]
        fn g_is_p_at_inverted_base(x in -1f64..1.0, y in -1f64..1.0, rho in -0.9f64..0.9,
                                   q in prop::sample::select(vec![0.3, -0.3, 0.7, -0.7]), n in 0usize..=8) {
            let g = eval_g(n, x, y, rho, qb(q));
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let p = p_sequence_raw(n, x, y, rho, 1.0 / q)[n];
            let expect = sign * q.powi(binom2(n)) * p;
            prop_assert!((g - expect).abs() <= 1e-10 * expect.abs().max(1.0));
        }

        #[test]
        fn p_in_h_and_b(x in -1f64..1.0, y in -1f64..1.0, rho in -0.9f64..0.9, q in -0.9f64..0.9) {
            let n = 7;
            let p = p_sequence_raw(n, x, y, rho, q);
            let h = h_sequence(n, x, q);
            let b = b_sequence(n, y, q);
            for m in 0..=n {
                let s: f64 = (0..=m).map(|j| q_binomial(m as i64, j as i64, q) * rho.powi((m - j) as i32) * h[j] * b[m - j]).sum();
                prop_assert!((s - p[m]).abs() <= 1e-11 * p[m].abs().max(1.0));
            }
        }
    }
}
