use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::{f_h_density, l, omega, phi_h_complex, series_product, series_product_c, DensityKind, TruncationConfig};
use crate::error::{invalid, Error, Result};
use crate::families::{Family, SchemeParams};
use crate::qkernel::{q_pochhammer, q_pochhammer_inf, qpow};

const DEGENERATE: f64 = 1e-14;
const REAL_TOL: f64 = 1e-10;

/// Densities on `[-1, 1]` attached to the scheme families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeDensity {
    FAw,
    FPsi,
    FQ,
    FBh,
    FP,
    FW,
}

impl SchemeDensity {
    pub fn kind(self) -> DensityKind {
        match self {
            SchemeDensity::FAw => DensityKind::FAw,
            SchemeDensity::FPsi => DensityKind::FPsi,
            SchemeDensity::FQ => DensityKind::FQ,
            SchemeDensity::FBh => DensityKind::FBh,
            SchemeDensity::FP => DensityKind::FP,
            SchemeDensity::FW => DensityKind::FW,
        }
    }

    /// The family orthogonal with respect to this density.
    pub fn family(self) -> Family {
        match self {
            SchemeDensity::FAw => Family::Aw,
            SchemeDensity::FPsi => Family::C2h,
            SchemeDensity::FQ => Family::Asc,
            SchemeDensity::FBh => Family::Bqh,
            SchemeDensity::FP => Family::P,
            SchemeDensity::FW => Family::W,
        }
    }

    pub fn of_family(family: Family) -> Option<Self> {
        Some(match family {
            Family::Aw => SchemeDensity::FAw,
            Family::C2h => SchemeDensity::FPsi,
            Family::Asc => SchemeDensity::FQ,
            Family::Bqh => SchemeDensity::FBh,
            Family::P => SchemeDensity::FP,
            Family::W => SchemeDensity::FW,
            Family::Qh => return None,
        })
    }
}

/// The Askey-Wilson parameters a family actually uses. `p_n(x|y, rho1)` is
/// the conjugate pair `rho1 e^{+-i theta}`; `w_n` needs the conjugate form.
pub fn effective_params(family: Family, p: &SchemeParams) -> Result<SchemeParams> {
    match family {
        Family::P => {
            let SchemeParams::Conjugate { y, rho1, q, .. } = p.to_conjugate()? else { unreachable!() };
            SchemeParams::conjugate_in(y, rho1, 0.0, 0.0, q)
        }
        Family::W => p.to_conjugate(),
        _ => Ok(p.restrict(family)),
    }
}

fn unit(f: f64, context: &'static str) -> Result<f64> {
    if f.abs() < DEGENERATE {
        return Err(Error::DegenerateDenominator { context, factor: f });
    }
    Ok(f)
}

fn real(v: Complex64, context: &'static str) -> Result<f64> {
    if v.im.abs() > REAL_TOL * v.norm().max(1.0) {
        return Err(Error::NonReal { context, imag: v.im });
    }
    Ok(v.re)
}

/// Askey-Wilson density at `x` as one fused product over `i`.
fn aw_density(x: f64, p: &SchemeParams, trunc: &TruncationConfig) -> Result<f64> {
    trunc.validate()?;
    if x.abs() >= 1.0 {
        return if x.abs() == 1.0 { Ok(0.0) } else { Err(invalid(format!("x = {x} outside [-1, 1]"))) };
    }
    let q = p.q().require_below_one("Askey-Wilson density")?;
    let qv = q.value();
    let cap = q.factor_cap(trunc.product_tol);
    let tol = trunc.product_tol;
    let front = 2.0 * (1.0 - x * x).sqrt() / PI;
    let hermite = |i: usize| {
        let a = qpow(qv, i + 1);
        (1.0 - a) * l(x, a)
    };
    match *p {
        SchemeParams::Conjugate { y, rho1, z, rho2, .. } => {
            let t = rho1 * rho2;
            unit(1.0 - t * t, "Askey-Wilson density")?;
            let mag = qv.abs().max(rho1.abs()).max(rho2.abs());
            let prod = series_product(mag, qv, tol, cap, "Askey-Wilson density", |i| {
                let qi = qpow(qv, i);
                let num = (1.0 - rho1 * rho1 * qi) * (1.0 - rho2 * rho2 * qi) * omega(y, z, t * qi);
                let den = (1.0 - t * t * qi) * omega(x, y, rho1 * qi) * omega(x, z, rho2 * qi);
                hermite(i) * num / den
            })?;
            Ok(front * prod)
        }
        SchemeParams::Quad { .. } => {
            let vals = p.quad_values();
            let pairs = p.pair_products();
            let s = p.abcd();
            unit(1.0 - s, "Askey-Wilson density")?;
            for pr in &pairs {
                if (Complex64::new(1.0, 0.0) - pr).norm() < DEGENERATE {
                    return Err(Error::DegenerateDenominator { context: "Askey-Wilson normalizer", factor: 0.0 });
                }
            }
            let mag = vals.iter().map(|v| v.norm()).fold(qv.abs(), f64::max);
            let one = Complex64::new(1.0, 0.0);
            let prod = series_product_c(mag, qv, tol, cap, |i| {
                let qi = qpow(qv, i);
                let num: Complex64 = pairs.iter().map(|pr| one - pr * qi).product();
                let den: Complex64 = vals.iter().map(|v| {
                    let t = v * qi;
                    one - t * (2.0 * x) + t * t
                }).product();
                num * hermite(i) / (den * (1.0 - s * qi))
            });
            let value = real(prod, "Askey-Wilson density")? * front;
            if value < 0.0 {
                return Err(Error::NonPositiveFactor { context: "Askey-Wilson density", value });
            }
            Ok(value)
        }
    }
}

/// Density of the named family at `x`.
pub fn density_scheme(kind: SchemeDensity, x: f64, p: &SchemeParams, trunc: &TruncationConfig) -> Result<f64> {
    aw_density(x, &effective_params(kind.family(), p)?, trunc)
}

/// `f_h * phi_h(a) phi_h(b) phi_h(c) phi_h(d) * (ab, ..., cd)_inf / (abcd)_inf`,
/// evaluated factor by factor in complex arithmetic.
pub fn density_aw_factored(x: f64, p: &SchemeParams, trunc: &TruncationConfig) -> Result<f64> {
    let q = p.q().require_below_one("Askey-Wilson density")?;
    let fh = f_h_density(x, q, trunc)?;
    let mut acc = Complex64::new(fh, 0.0);
    for a in p.quad_values() {
        acc *= phi_h_complex(x, a, q, trunc);
    }
    for pr in p.pair_products() {
        acc *= q_pochhammer_inf(pr, q, trunc.product_tol)?;
    }
    acc /= q_pochhammer_inf(Complex64::new(p.abcd(), 0.0), q, trunc.product_tol)?;
    real(acc, "Askey-Wilson density")
}

/// Squared norm `int P_n^2 f` of a family against its own density.
pub fn norm_squared(family: Family, n: usize, p: &SchemeParams) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    let eff = match family {
        Family::Qh => p.restrict(Family::Qh),
        _ => effective_params(family, p)?,
    };
    let q = eff.q().value();
    let s = eff.abcd();
    let ctx = "norm";
    let mut den = 1.0;
    for k in 0..n {
        den *= unit(1.0 - s * qpow(q, n - 1 + k), ctx)?;
    }
    for k in 0..2 * n {
        den *= unit(1.0 - s * qpow(q, k), ctx)?;
    }
    let mut num = Complex64::new(q_pochhammer(q, q, n), 0.0);
    for pr in eff.pair_products() {
        num *= q_pochhammer(pr, q, n);
    }
    Ok(real(num, ctx)? / den)
}
