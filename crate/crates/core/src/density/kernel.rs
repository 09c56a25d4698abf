//! Series connecting pairs of densities: each sums to a density ratio.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::{omega, phi_h, phi_h_complex, TruncationConfig};
use crate::error::{invalid, Error, Result};
use crate::families::scheme::{g_shifted, h_sequence, p_sequence_raw};
use crate::families::{eval_sequence, w_sequence, Family, SchemeParams};
use crate::qkernel::{q_pochhammer, q_pochhammer_inf, qpow};

const OMEGA_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `sum rho^n h_n(x) h_n(y) / (q)_n = f_p(x|y, rho) / f_h(x)`; uses `(y, rho1)`.
    PoissonMehler,
    /// `sum rho2^j p_j(z|y, t) p_j(x|y, rho1) / ((q)_j (t^2)_j) = f_W / f_p`, `t = rho1 rho2`.
    AwForward,
    /// Expansion of `f_p / f_W` in the `w_j`.
    AwInverse,
    /// `sum a^j psi_j(x|b, c, d) / ((abcd)_j (q)_j)`, with a closed form.
    C2hSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSum {
    pub sum: f64,
    /// Sum of the absolute terms; `abs_sum / |sum|` bounds the loss to cancellation.
    pub abs_sum: f64,
    pub terms: usize,
    /// Product formula for the same quantity, where one is known.
    pub closed_form: Option<f64>,
}

/// Adds terms until three in a row fall below `series_tol * |sum|`.
fn accumulate<F>(trunc: &TruncationConfig, context: &'static str, mut term: F) -> Result<(f64, f64, usize)>
where
    F: FnMut(usize) -> Result<f64>,
{
    let (mut sum, mut abs_sum) = (0.0, 0.0);
    let mut small = 0;
    for j in 0..trunc.series_terms {
        let t = term(j)?;
        if !t.is_finite() {
            return Err(Error::NonConvergence { context, terms: j });
        }
        sum += t;
        abs_sum += t.abs();
        if t.abs() < trunc.series_tol * sum.abs().max(f64::MIN_POSITIVE) {
            small += 1;
            if small == 3 {
                return Ok((sum, abs_sum, j + 1));
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence { context, terms: trunc.series_terms })
}

fn conjugate(p: &SchemeParams) -> Result<(f64, f64, f64, f64, f64)> {
    let SchemeParams::Conjugate { y, rho1, z, rho2, q } = p.to_conjugate()? else { unreachable!() };
    q.require_below_one("kernel sums")?;
    Ok((y, rho1, z, rho2, q.value()))
}

/// Partial sum of the named expansion at `x`, stopping by the tolerance rule.
pub fn kernel_sum(kind: KernelKind, x: f64, p: &SchemeParams, trunc: &TruncationConfig) -> Result<KernelSum> {
    trunc.validate()?;
    if !(x.abs() <= 1.0) {
        return Err(invalid(format!("x = {x} outside [-1, 1]")));
    }
    let n = trunc.series_terms;
    match kind {
        KernelKind::PoissonMehler => {
            let (y, rho, _, _, q) = conjugate(p)?;
            let hx = h_sequence(n, x, q);
            let hy = h_sequence(n, y, q);
            let mut qn = 1.0;
            let (sum, abs_sum, terms) = accumulate(trunc, "poisson-mehler", |j| {
                if j > 0 {
                    qn *= 1.0 - qpow(q, j);
                }
                Ok(rho.powi(j as i32) * hx[j] * hy[j] / qn)
            })?;
            Ok(KernelSum { sum, abs_sum, terms, closed_form: None })
        }
        KernelKind::AwForward => {
            let (y, rho1, z, rho2, q) = conjugate(p)?;
            let t = rho1 * rho2;
            let pz = p_sequence_raw(n, z, y, t, q);
            let px = p_sequence_raw(n, x, y, rho1, q);
            let mut den = 1.0;
            let (sum, abs_sum, terms) = accumulate(trunc, "askey-wilson forward kernel", |j| {
                if j > 0 {
                    den *= (1.0 - qpow(q, j)) * (1.0 - t * t * qpow(q, j - 1));
                }
                Ok(rho2.powi(j as i32) * pz[j] * px[j] / den)
            })?;
            Ok(KernelSum { sum, abs_sum, terms, closed_form: None })
        }
        KernelKind::AwInverse => {
            let (y, rho1, z, rho2, q) = conjugate(p)?;
            let t = rho1 * rho2;
            let w = w_sequence(n, x, p)?;
            // Running product (q)_j (rho2^2)_j prod_{k=1}^{j} omega(y, z|t q^{k-1}).
            let mut den = 1.0;
            let (sum, abs_sum, terms) = accumulate(trunc, "askey-wilson inverse kernel", |j| {
                if j > 0 {
                    let om = omega(y, z, t * qpow(q, j - 1));
                    if om < OMEGA_GUARD {
                        return Err(Error::NonPositiveFactor { context: "inverse kernel omega factor", value: om });
                    }
                    den *= (1.0 - qpow(q, j)) * (1.0 - rho2 * rho2 * qpow(q, j - 1)) * om;
                }
                let lead = q_pochhammer(t * t, q, 2 * j);
                let g = g_shifted(j, z, y, t, j as i64 - 1, q);
                Ok(lead * rho2.powi(j as i32) * g / den * w[j])
            })?;
            Ok(KernelSum { sum, abs_sum, terms, closed_form: None })
        }
        KernelKind::C2hSum => {
            let q = p.q().require_below_one("kernel sums")?;
            let [a, b, c, d] = p.quad_values();
            let s = p.abcd();
            let psi = eval_sequence(Family::C2h, n, x, p)?.values;
            let mut den = Complex64::new(1.0, 0.0);
            let mut apow = Complex64::new(1.0, 0.0);
            let (sum, abs_sum, terms) = accumulate(trunc, "continuous dual Hahn kernel", |j| {
                if j > 0 {
                    den *= (1.0 - s * qpow(q.value(), j - 1)) * (1.0 - qpow(q.value(), j));
                    apow *= a;
                }
                let v = apow / den * psi[j];
                if v.im.abs() > 1e-10 * v.norm().max(1.0) {
                    return Err(Error::NonReal { context: "continuous dual Hahn kernel", imag: v.im });
                }
                Ok(v.re)
            })?;
            let tol = trunc.product_tol;
            let closed = if a.im == 0.0 {
                phi_h(x, a.re, q, trunc)?
            } else {
                let v = phi_h_complex(x, a, q, trunc);
                v.re
            };
            let mut norm = Complex64::new(1.0, 0.0);
            for pr in [a * b, a * c, a * d] {
                norm *= q_pochhammer_inf(pr, q, tol)?;
            }
            let norm = norm.re / q_pochhammer_inf(s, q, tol)?;
            Ok(KernelSum { sum, abs_sum, terms, closed_form: Some(closed * norm) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{density_scheme, f_h_density, SchemeDensity};
    use crate::qkernel::QBase;
    use proptest::prelude::*;

    fn t() -> TruncationConfig {
        TruncationConfig::default()
    }

    #[test]
    fn poisson_mehler_limits() {
        let p = SchemeParams::conjugate(0.1, 0.0, 0.0, 0.0, 0.4).unwrap();
        assert_eq!(kernel_sum(KernelKind::PoissonMehler, 0.3, &p, &t()).unwrap().sum, 1.0);
        let p = SchemeParams::conjugate(0.1, 0.5, 0.0, 0.0, 0.4).unwrap();
        let k = kernel_sum(KernelKind::PoissonMehler, 0.3, &p, &t()).unwrap();
        let fh = f_h_density(0.3, QBase::new(0.4).unwrap(), &t()).unwrap();
        let fp = density_scheme(SchemeDensity::FP, 0.3, &p, &t()).unwrap();
        assert!((k.sum * fh - fp).abs() < 1e-12 * fp);
    }

    #[test]
    fn forward_kernel_reduces_to_poisson_mehler() {
        // rho1 = 0: p_j(x|y, 0) = h_j(x) and p_j(z|y, 0) = h_j(z).
        let p = SchemeParams::conjugate(0.2, 0.0, -0.5, 0.6, 0.3).unwrap();
        let fwd = kernel_sum(KernelKind::AwForward, 0.4, &p, &t()).unwrap();
        let pm = kernel_sum(KernelKind::PoissonMehler, 0.4, &SchemeParams::conjugate(-0.5, 0.6, 0.0, 0.0, 0.3).unwrap(), &t()).unwrap();
        assert!((fwd.sum - pm.sum).abs() < 1e-14);
    }

    #[test]
    fn closed_form_sum() {
        let p = SchemeParams::real(0.3, 0.2, 0.1, 0.4, 0.5).unwrap();
        let k = kernel_sum(KernelKind::C2hSum, 0.3, &p, &t()).unwrap();
        assert!((k.sum - 0.834_591_571_610_933_7).abs() < 1e-13);
        assert!((k.sum - k.closed_form.unwrap()).abs() < 1e-13);
    }

    #[test]
    fn non_convergence_is_reported() {
        let p = SchemeParams::conjugate(0.1, 0.99, 0.0, 0.0, 0.4).unwrap();
        let short = TruncationConfig { series_terms: 5, ..t() };
        assert!(matches!(kernel_sum(KernelKind::PoissonMehler, 0.3, &p, &short), Err(Error::NonConvergence { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn kernels_give_density_ratios(x in -1f64..1.0, y in -1f64..1.0, z in -1f64..1.0,
                                       r1 in -0.6f64..0.6, r2 in -0.6f64..0.6, q in -0.7f64..0.9) {
            let p = SchemeParams::conjugate(y, r1, z, r2, q).unwrap();
            let fp = density_scheme(SchemeDensity::FP, x, &p, &t()).unwrap();
            let fw = density_scheme(SchemeDensity::FW, x, &p, &t()).unwrap();
            let fh = f_h_density(x, QBase::new(q).unwrap(), &t()).unwrap();
            prop_assume!(fh > 1e-8);
            let pm = kernel_sum(KernelKind::PoissonMehler, x, &p, &t()).unwrap().sum;
            prop_assert!((pm - fp / fh).abs() <= 1e-8 * (fp / fh).max(1.0));
            let fwd = kernel_sum(KernelKind::AwForward, x, &p, &t()).unwrap().sum;
            prop_assert!((fwd - fw / fp).abs() <= 1e-8 * (fw / fp).max(1.0));
            let inv = kernel_sum(KernelKind::AwInverse, x, &p, &t()).unwrap().sum;
            prop_assert!((inv - fp / fw).abs() <= 1e-8 * (fp / fw).max(1.0), "{} vs {}", inv, fp / fw);
        }

        #[test]
        fn c2h_sum_matches_closed_form(x in -1f64..1.0, a in -0.8f64..0.8, b in -0.8f64..0.8, c in -0.8f64..0.8,
                                       d in -0.8f64..0.8, q in -0.7f64..0.9) {
            let p = SchemeParams::real(a, b, c, d, q).unwrap();
            let k = kernel_sum(KernelKind::C2hSum, x, &p, &t()).unwrap();
            let closed = k.closed_form.unwrap();
            prop_assert!((k.sum - closed).abs() <= 1e-9 * closed.abs().max(1.0));
        }
    }
}
