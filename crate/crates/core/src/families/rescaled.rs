//! Monic families on the rescaled support `S(q) = [-2/sqrt(1-q), 2/sqrt(1-q)]`.
//!
//! With `s = sqrt(1-q)/2` every variable is mapped by `x -> x s` and the
//! degree-`n` value divided by `(1-q)^{n/2}`. The resulting recurrences have
//! `[n]_q` in place of `1 - q^n` and stay finite at `q = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::classical::hermite_var;
use crate::families::coeffs::{conj_p6, e_core, f_core};
use crate::families::scheme::{run_recurrence, try_run_recurrence};
use crate::qkernel::{q_number, qpow, QBase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RescaledKind {
    /// q-Hermite, no extra arguments.
    H,
    /// Al-Salam-Chihara, extra `[y, rho]`.
    P,
    /// Askey-Wilson with two conjugate pairs, extra `[y, rho1, z, rho2]`.
    A,
    /// Rescaled `b_n`, no extra arguments.
    B,
    /// Rescaled `g_n`, extra `[y, rho]`.
    G,
}

impl RescaledKind {
    pub fn arity(self) -> usize {
        match self {
            RescaledKind::H | RescaledKind::B => 0,
            RescaledKind::P | RescaledKind::G => 2,
            RescaledKind::A => 4,
        }
    }
}

/// `s = sqrt(1-q)/2`, the factor mapping `S(q)` onto `[-1, 1]`.
pub fn scale(q: QBase) -> f64 {
    (1.0 - q.value()).sqrt() / 2.0
}

/// `beta_n` of the rescaled Askey-Wilson recurrence.
pub fn beta_n(n: usize, y: f64, rho1: f64, z: f64, rho2: f64, q: QBase) -> Result<f64> {
    let t = (rho1 * rho2).powi(2);
    e_core(n, rho1 * y + rho2 * z, rho1 * rho2 * (rho1 * z + rho2 * y), t, q.value())
}

/// `gamma_n` of the rescaled Askey-Wilson recurrence; `gamma_0 = 0`.
pub fn gamma_n(n: usize, y: f64, rho1: f64, z: f64, rho2: f64, q: QBase) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let qv = q.value();
    let s = scale(q);
    let p6 = conj_p6(y * s, rho1, z * s, rho2, qv, n);
    f_core(n, q_number(n, qv), p6, (rho1 * rho2).powi(2), qv)
}

fn check_arity(kind: RescaledKind, extra: &[f64]) -> Result<()> {
    if extra.len() != kind.arity() {
        return Err(Error::LengthMismatch { expected: kind.arity(), got: extra.len() });
    }
    Ok(())
}

/// Values of degrees `0..=n_max` at `x`.
pub fn rescaled_sequence(kind: RescaledKind, n_max: usize, x: f64, extra: &[f64], q: QBase) -> Result<Vec<f64>> {
    check_arity(kind, extra)?;
    let qv = q.value();
    let br = |k: usize| q_number(k, qv);
    let out = match kind {
        RescaledKind::H if q.is_one() => (0..=n_max).map(|n| hermite_var(n, x, 1.0)).collect(),
        RescaledKind::H => run_recurrence(n_max, |k| (x, br(k))),
        RescaledKind::P => {
            let (y, rho) = (extra[0], extra[1]);
            if q.is_one() {
                (0..=n_max).map(|n| hermite_var(n, x - rho * y, 1.0 - rho * rho)).collect()
            } else {
                run_recurrence(n_max, |k| {
                    let back = if k == 0 { 0.0 } else { br(k) * (1.0 - rho * rho * qpow(qv, k - 1)) };
                    (x - rho * y * qpow(qv, k), back)
                })
            }
        }
        RescaledKind::A => {
            let [y, rho1, z, rho2] = [extra[0], extra[1], extra[2], extra[3]];
            if q.is_one() {
                let t = (rho1 * rho2).powi(2);
                if (1.0 - t).abs() < 1e-14 {
                    return Err(Error::DegenerateDenominator { context: "rescaled A at q = 1", factor: 1.0 - t });
                }
                let var = (1.0 - rho1 * rho1) * (1.0 - rho2 * rho2) / (1.0 - t);
                let beta = (rho1 * (1.0 - rho2 * rho2) * y + rho2 * (1.0 - rho1 * rho1) * z) / (1.0 - t);
                (0..=n_max).map(|n| hermite_var(n, x - beta, var)).collect()
            } else {
                try_run_recurrence(n_max, |k| {
                    Ok((x - beta_n(k, y, rho1, z, rho2, q)?, gamma_n(k, y, rho1, z, rho2, q)?))
                })?
            }
        }
        RescaledKind::B => run_recurrence(n_max, |k| {
            let back = if k == 0 { 0.0 } else { -qpow(qv, k - 1) * br(k) };
            (-qpow(qv, k) * x, back)
        }),
        RescaledKind::G => {
            let (y, rho) = (extra[0], extra[1]);
            run_recurrence(n_max, |k| {
                let back = if k == 0 { 0.0 } else { br(k) * (rho * rho - qpow(qv, k - 1)) };
                (-(x * qpow(qv, k) - rho * y), back)
            })
        }
    };
    Ok(out)
}

pub fn eval_rescaled(kind: RescaledKind, n: usize, x: f64, extra: &[f64], q: QBase) -> Result<f64> {
    Ok(rescaled_sequence(kind, n, x, extra, q)?[n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::classical::chebyshev_u;
    use crate::families::params::SchemeParams;
    use crate::families::scheme::{b_sequence, g_sequence, h_sequence, p_sequence, w_sequence};
    use proptest::prelude::*;

    fn qb(q: f64) -> QBase {
        QBase::new(q).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    /// Rescaling the unscaled families directly.
    fn unscale(v: &[f64], q: f64) -> Vec<f64> {
        v.iter().enumerate().map(|(n, x)| x / (1.0 - q).powf(n as f64 / 2.0)).collect()
    }

    #[test]
    fn hermite_at_one_and_chebyshev_at_zero() {
        let x = 0.9;
        let h1 = rescaled_sequence(RescaledKind::H, 6, x, &[], qb(1.0)).unwrap();
        assert!(close(h1[4], x.powi(4) - 6.0 * x * x + 3.0, 1e-14));
        let h0 = rescaled_sequence(RescaledKind::H, 8, x, &[], qb(0.0)).unwrap();
        for (n, v) in h0.iter().enumerate() {
            assert!(close(*v, chebyshev_u(n as isize, x / 2.0), 1e-14));
        }
    }

    #[test]
    fn matches_unscaled_families() {
        let q = 0.55;
        let s = scale(qb(q));
        let (x, y, z, r1, r2) = (1.3, -0.4, 0.8, 0.35, -0.6);
        let pairs: [(RescaledKind, Vec<f64>, Vec<f64>); 4] = [
            (RescaledKind::H, vec![], h_sequence(9, x * s, q)),
            (RescaledKind::P, vec![y, r1], p_sequence(9, x * s, y * s, r1, qb(q))),
            (RescaledKind::B, vec![], b_sequence(9, x * s, q)),
            (RescaledKind::G, vec![y, r1], g_sequence(9, x * s, y * s, r1, q)),
        ];
        for (kind, extra, raw) in pairs {
            let r = rescaled_sequence(kind, 9, x, &extra, qb(q)).unwrap();
            for (a, b) in r.iter().zip(unscale(&raw, q)) {
                assert!(close(*a, b, 1e-12), "{kind:?}: {a} vs {b}");
            }
        }
        let params = SchemeParams::conjugate(y * s, r1, z * s, r2, q).unwrap();
        let w = unscale(&w_sequence(9, x * s, &params).unwrap(), q);
        let a = rescaled_sequence(RescaledKind::A, 9, x, &[y, r1, z, r2], qb(q)).unwrap();
        for (u, v) in a.iter().zip(&w) {
            assert!(close(*u, *v, 1e-11));
        }
    }

    #[test]
    fn closed_forms_at_one_match_recurrence() {
        // At q = 1 the general recurrences are finite, so they serve as the oracle.
        let (x, y, z, r1, r2) = (0.7, -1.1, 0.4, 0.5, -0.3);
        let one = qb(1.0);
        let p = rescaled_sequence(RescaledKind::P, 8, x, &[y, r1], one).unwrap();
        let p_rec = run_recurrence(8, |k| (x - r1 * y, k as f64 * (1.0 - r1 * r1)));
        let a = rescaled_sequence(RescaledKind::A, 8, x, &[y, r1, z, r2], one).unwrap();
        let a_rec = try_run_recurrence(8, |k| Ok((x - beta_n(k, y, r1, z, r2, one)?, gamma_n(k, y, r1, z, r2, one)?))).unwrap();
        for n in 0..=8 {
            assert!(close(p[n], p_rec[n], 1e-12));
            assert!(close(a[n], a_rec[n], 1e-12), "n = {n}: {} vs {}", a[n], a_rec[n]);
        }
    }

    #[test]
    fn al_salam_chihara_at_zero() {
        let (x, y, rho) = (0.6, 0.3, -0.7);
        let p = rescaled_sequence(RescaledKind::P, 8, x, &[y, rho], qb(0.0)).unwrap();
        for (n, v) in p.iter().enumerate() {
            let n = n as isize;
            let u = |k| chebyshev_u(k, x / 2.0);
            let expect = u(n) - rho * y * u(n - 1) + rho * rho * u(n - 2);
            assert!(close(*v, expect, 1e-14), "n = {n}");
        }
    }

    #[test]
    fn askey_wilson_at_zero_from_degree_three() {
        // The five-term Chebyshev form holds for n >= 3; lower degrees pick up
        // corrections from the n = 0, 1 coefficients.
        let (x, y, r1, z, r2) = (0.6, 0.3, -0.7, 0.9, 0.4);
        let a = rescaled_sequence(RescaledKind::A, 10, x, &[y, r1, z, r2], qb(0.0)).unwrap();
        let u = |k: isize| chebyshev_u(k, x / 2.0);
        let form = |n: isize| {
            u(n) - (r1 * y + r2 * z) * u(n - 1) + (r1 * r1 + r2 * r2 + y * z * r1 * r2) * u(n - 2)
                - r1 * r2 * (r1 * z + r2 * y) * u(n - 3)
                + (r1 * r2).powi(2) * u(n - 4)
        };
        for n in 3..=10 {
            assert!(close(a[n], form(n as isize), 1e-13), "n = {n}");
        }
        assert!(!close(a[2], form(2), 1e-6));
    }

    #[test]
    fn arity_is_checked() {
        let e = eval_rescaled(RescaledKind::A, 2, 0.1, &[0.1, 0.2], qb(0.5)).unwrap_err();
        assert_eq!(e, Error::LengthMismatch { expected: 4, got: 2 });
    }

    proptest! {
        #[test]
        fn monic(q in prop::sample::select(vec![0.0, 0.3, -0.5, 0.8, 1.0]), y in -1f64..1.0, z in -1f64..1.0,
                 r1 in -0.9f64..0.9, r2 in -0.9f64..0.9) {
            // n-th finite difference over unit steps divided by n! is the leading coefficient.
            let n = 5usize;
            let qv = qb(q);
            for (kind, extra) in [(RescaledKind::H, vec![]), (RescaledKind::P, vec![y, r1]), (RescaledKind::A, vec![y, r1, z, r2])] {
                let mut diff = 0.0;
                let mut binom = 1.0;
                for j in 0..=n {
                    let v = eval_rescaled(kind, n, j as f64, &extra, qv).unwrap();
                    let sign = if (n - j) % 2 == 0 { 1.0 } else { -1.0 };
                    diff += sign * binom * v;
                    binom = binom * (n - j) as f64 / (j + 1) as f64;
                }
                prop_assert!((diff / 120.0 - 1.0).abs() < 1e-9);
            }
        }
    }
}
