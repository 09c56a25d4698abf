use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::density::{f_h_density, omega, DensityKind, TruncationConfig};
use crate::error::{invalid, Error, Result};
use crate::families::rescaled::scale;
use crate::families::{RescaledKind, SchemeParams};
use crate::qkernel::{q_factorial, q_pochhammer, qpow, QBase};

use super::scheme::{density_scheme, SchemeDensity};

/// Densities on `S(q)`: q-Normal, conditional q-Normal and the conditional
/// law of the middle of a three-step chain given both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RescaledDensity {
    FN,
    FCn { y: f64, rho: f64 },
    FC2n { y: f64, rho1: f64, z: f64, rho2: f64 },
}

impl RescaledDensity {
    pub fn kind(self) -> DensityKind {
        match self {
            RescaledDensity::FN => DensityKind::FN,
            RescaledDensity::FCn { .. } => DensityKind::FCn,
            RescaledDensity::FC2n { .. } => DensityKind::FC2n,
        }
    }
}

fn gaussian(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    (-d * d / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho.abs() < 1.0) {
        return Err(invalid(format!("rho = {rho} must satisfy |rho| < 1")));
    }
    Ok(())
}

fn check_inside(name: &str, v: f64, q: QBase) -> Result<()> {
    if !(v.abs() <= q.support_radius()) {
        return Err(invalid(format!("{name} = {v} outside S(q)")));
    }
    Ok(())
}

/// q-Normal density; zero off `S(q)`.
fn f_n(x: f64, q: QBase, trunc: &TruncationConfig) -> Result<f64> {
    if q.is_one() {
        return Ok(gaussian(x, 0.0, 1.0));
    }
    let s = scale(q);
    if (x * s).abs() >= 1.0 {
        return Ok(0.0);
    }
    Ok(f_h_density(x * s, q, trunc)? * s)
}

/// Conditional q-Normal density of `x` given `y`; zero off `S(q)`.
fn f_cn(x: f64, y: f64, rho: f64, q: QBase, trunc: &TruncationConfig) -> Result<f64> {
    check_rho(rho)?;
    check_inside("y", y, q)?;
    if q.is_one() {
        return Ok(gaussian(x, rho * y, 1.0 - rho * rho));
    }
    let s = scale(q);
    if (x * s).abs() >= 1.0 {
        return Ok(0.0);
    }
    let p = SchemeParams::conjugate_in((y * s).clamp(-1.0, 1.0), rho, 0.0, 0.0, q)?;
    Ok(density_scheme(SchemeDensity::FP, x * s, &p, trunc)? * s)
}

pub fn density_rescaled(kind: RescaledDensity, x: f64, q: QBase, trunc: &TruncationConfig) -> Result<f64> {
    trunc.validate()?;
    match kind {
        RescaledDensity::FN => f_n(x, q, trunc),
        RescaledDensity::FCn { y, rho } => f_cn(x, y, rho, q, trunc),
        RescaledDensity::FC2n { y, rho1, z, rho2 } => {
            check_rho(rho1)?;
            check_rho(rho2)?;
            check_inside("z", z, q)?;
            let den = f_cn(y, z, rho1 * rho2, q, trunc)?;
            if !(den > 0.0) {
                return Err(Error::NonPositiveFactor { context: "f_C2N normalizer", value: den });
            }
            Ok(f_cn(y, x, rho1, q, trunc)? * f_cn(x, z, rho2, q, trunc)? / den)
        }
    }
}

/// Squared norm of a rescaled monic family against its rescaled density.
/// `extra` follows [`RescaledKind::arity`]; `B` and `G` have no density.
pub fn norm_squared_rescaled(kind: RescaledKind, n: usize, extra: &[f64], q: QBase) -> Result<f64> {
    if extra.len() != kind.arity() {
        return Err(Error::LengthMismatch { expected: kind.arity(), got: extra.len() });
    }
    let qv = q.value();
    let fact = q_factorial(n, qv);
    match kind {
        RescaledKind::H => Ok(fact),
        RescaledKind::P => Ok(fact * q_pochhammer(extra[1] * extra[1], qv, n)),
        RescaledKind::A => {
            let (y, rho1, z, rho2) = (extra[0], extra[1], extra[2], extra[3]);
            if n == 0 {
                return Ok(1.0);
            }
            let s = scale(q);
            let t = rho1 * rho2;
            let big = t * t;
            let mut num = fact * q_pochhammer(rho1 * rho1, qv, n) * q_pochhammer(rho2 * rho2, qv, n);
            for k in 0..n {
                num *= omega(y * s, z * s, t * qpow(qv, k));
            }
            let den = q_pochhammer(big * qpow(qv, n - 1), qv, n) * q_pochhammer(big, qv, 2 * n);
            if den.abs() < 1e-14 {
                return Err(Error::DegenerateDenominator { context: "rescaled norm", factor: den });
            }
            Ok(num / den)
        }
        RescaledKind::B | RescaledKind::G => Err(invalid(format!("{kind:?} has no orthogonality density"))),
    }
}

/// Cross-check helper: the same norm through the unscaled family.
#[cfg(test)]
fn norm_via_unscaled(n: usize, y: f64, rho1: f64, z: f64, rho2: f64, q: QBase) -> f64 {
    use crate::families::Family;
    let s = scale(q);
    let p = SchemeParams::conjugate_in(y * s, rho1, z * s, rho2, q).unwrap();
    crate::density::norm_squared(Family::W, n, &p).unwrap() / (1.0 - q.value()).powi(n as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::eval_rescaled;

    fn qb(q: f64) -> QBase {
        QBase::new(q).unwrap()
    }

    fn t() -> TruncationConfig {
        TruncationConfig::default()
    }

    /// Trapezoid rule on `S(q)` in the angle variable.
    fn integrate_s(q: QBase, f: impl Fn(f64) -> f64, m: usize) -> f64 {
        let r = q.support_radius();
        let h = PI / m as f64;
        (1..m).map(|j| {
            let th = j as f64 * h;
            f(r * th.cos()) * r * th.sin()
        }).sum::<f64>() * h
    }

    #[test]
    fn wigner_and_kesten_mckey_at_zero() {
        let q = qb(0.0);
        let x = 1.3_f64;
        let w = (4.0 - x * x).sqrt() / (2.0 * PI);
        assert!((density_rescaled(RescaledDensity::FN, x, q, &t()).unwrap() - w).abs() < 1e-15);
        let (y, rho) = (-0.7, 0.45);
        let km = (1.0 - rho * rho) * (4.0 - x * x).sqrt()
            / (2.0 * PI * (rho * rho * (x * x + y * y) - rho * x * y * (1.0 + rho * rho) + (1.0 - rho * rho).powi(2)));
        let v = density_rescaled(RescaledDensity::FCn { y, rho }, x, q, &t()).unwrap();
        assert!((v - km).abs() < 1e-14);
    }

    #[test]
    fn conditional_with_rho_zero_is_q_normal() {
        let q = qb(0.6);
        let a = density_rescaled(RescaledDensity::FCn { y: 0.8, rho: 0.0 }, 0.4, q, &t()).unwrap();
        let b = density_rescaled(RescaledDensity::FN, 0.4, q, &t()).unwrap();
        assert!((a - b).abs() < 1e-14 * b);
        assert_eq!(density_rescaled(RescaledDensity::FN, 5.0, q, &t()).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_at_one() {
        let q = qb(1.0);
        let v = density_rescaled(RescaledDensity::FCn { y: 0.5, rho: 0.6 }, 0.1, q, &t()).unwrap();
        assert!((v - gaussian(0.1, 0.3, 0.64)).abs() < 1e-15);
        // Bridge law: the product of Gaussians is Gaussian with the classical A_n parameters.
        let (y, r1, z, r2) = (0.5, 0.6, -1.2, 0.3);
        let tt = (r1 * r2) * (r1 * r2);
        let var = (1.0 - r1 * r1) * (1.0 - r2 * r2) / (1.0 - tt);
        let mean = (r1 * (1.0 - r2 * r2) * y + r2 * (1.0 - r1 * r1) * z) / (1.0 - tt);
        for x in [-1.0, 0.2, 1.7] {
            let v = density_rescaled(RescaledDensity::FC2n { y, rho1: r1, z, rho2: r2 }, x, q, &t()).unwrap();
            assert!((v - gaussian(x, mean, var)).abs() < 1e-14);
        }
    }

    #[test]
    fn bridge_ratio_matches_direct_w_density() {
        let q = qb(0.55);
        let s = scale(q);
        let (y, r1, z, r2) = (0.9, 0.4, -1.1, 0.7);
        let p = SchemeParams::conjugate_in(y * s, r1, z * s, r2, q).unwrap();
        for x in [-2.0, -0.3, 1.4] {
            let ratio = density_rescaled(RescaledDensity::FC2n { y, rho1: r1, z, rho2: r2 }, x, q, &t()).unwrap();
            let direct = density_scheme(SchemeDensity::FW, x * s, &p, &t()).unwrap() * s;
            assert!((ratio - direct).abs() < 1e-9 * direct, "{ratio} vs {direct}");
        }
    }

    #[test]
    fn bridge_closed_form_at_zero() {
        let q = qb(0.0);
        let (y, r1, z, r2) = (0.9, 0.4, -1.1, 0.7);
        let tt = r1 * r2;
        for x in [-1.9_f64, 0.0, 1.2] {
            let closed = (1.0 - r1 * r1) * (1.0 - r2 * r2) * (4.0 - x * x).sqrt() * omega(z / 2.0, y / 2.0, tt)
                / (2.0 * PI * (1.0 - tt * tt) * omega(x / 2.0, y / 2.0, r1) * omega(x / 2.0, z / 2.0, r2));
            let v = density_rescaled(RescaledDensity::FC2n { y, rho1: r1, z, rho2: r2 }, x, q, &t()).unwrap();
            assert!((v - closed).abs() < 1e-10 * closed);
        }
    }

    #[test]
    fn rescaled_densities_integrate_to_one() {
        for qv in [0.0, 0.5, -0.4, 0.9] {
            let q = qb(qv);
            for kind in [
                RescaledDensity::FN,
                RescaledDensity::FCn { y: 0.8, rho: -0.6 },
                RescaledDensity::FC2n { y: 0.8, rho1: -0.6, z: 0.3, rho2: 0.5 },
            ] {
                let total = integrate_s(q, |x| density_rescaled(kind, x, q, &t()).unwrap(), 800);
                assert!((total - 1.0).abs() < 1e-10, "{kind:?} q={qv}: {total}");
            }
        }
    }

    #[test]
    fn rescaled_norms() {
        let (y, r1, z, r2) = (0.9, 0.4, -1.1, 0.7);
        for qv in [0.0, 0.3, -0.5, 0.8] {
            let q = qb(qv);
            for n in 0..6 {
                let a = norm_squared_rescaled(RescaledKind::A, n, &[y, r1, z, r2], q).unwrap();
                let b = norm_via_unscaled(n, y, r1, z, r2, q);
                assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
            }
        }
        // Quadrature against the bridge density.
        let q = qb(0.45);
        let kind = RescaledDensity::FC2n { y, rho1: r1, z, rho2: r2 };
        let extra = [y, r1, z, r2];
        let n = 3;
        let quad = integrate_s(q, |x| {
            let v = eval_rescaled(RescaledKind::A, n, x, &extra, q).unwrap();
            v * v * density_rescaled(kind, x, q, &t()).unwrap()
        }, 800);
        let exact = norm_squared_rescaled(RescaledKind::A, n, &extra, q).unwrap();
        assert!((quad - exact).abs() < 1e-10 * exact);
        assert!(norm_squared_rescaled(RescaledKind::B, 2, &[], q).is_err());
        assert_eq!(norm_squared_rescaled(RescaledKind::H, 3, &[], qb(1.0)).unwrap(), 6.0);
    }
}
