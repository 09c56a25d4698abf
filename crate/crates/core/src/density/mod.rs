//! Densities of the scheme, the structural polynomials they are built from,
//! squared norms and the kernel expansions between densities.

mod kernel;
mod rescaled;
mod scheme;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qkernel::{product_inf, QBase};

pub use kernel::{kernel_sum, KernelKind, KernelSum};
pub use rescaled::{density_rescaled, norm_squared_rescaled, RescaledDensity};
pub use scheme::{density_aw_factored, density_scheme, norm_squared, SchemeDensity};

/// Truncation of infinite products and series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationConfig {
    pub product_tol: f64,
    pub series_terms: usize,
    pub series_tol: f64,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self { product_tol: 1e-14, series_terms: 500, series_tol: 1e-14 }
    }
}

impl TruncationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.product_tol > 0.0) || !(self.series_tol > 0.0) {
            return Err(invalid("truncation tolerances must be positive"));
        }
        if self.series_terms == 0 {
            return Err(invalid("series_terms must be at least 1"));
        }
        Ok(())
    }
}

/// Any density the crate can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    FH,
    FAw,
    FPsi,
    FQ,
    FBh,
    FP,
    FW,
    FN,
    FCn,
    FC2n,
}

impl DensityKind {
    pub fn name(self) -> &'static str {
        match self {
            DensityKind::FH => "f_h",
            DensityKind::FAw => "f_AW",
            DensityKind::FPsi => "f_psi",
            DensityKind::FQ => "f_Q",
            DensityKind::FBh => "f_bH",
            DensityKind::FP => "f_p",
            DensityKind::FW => "f_W",
            DensityKind::FN => "f_N",
            DensityKind::FCn => "f_CN",
            DensityKind::FC2n => "f_C2N",
        }
    }

    pub fn is_rescaled(self) -> bool {
        matches!(self, DensityKind::FN | DensityKind::FCn | DensityKind::FC2n)
    }
}

/// A density together with everything needed to evaluate it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DensitySpec {
    FH { q: QBase },
    Scheme { kind: SchemeDensity, params: crate::families::SchemeParams },
    Rescaled { kind: RescaledDensity, q: QBase },
}

impl DensitySpec {
    pub fn kind(&self) -> DensityKind {
        match self {
            DensitySpec::FH { .. } => DensityKind::FH,
            DensitySpec::Scheme { kind, .. } => kind.kind(),
            DensitySpec::Rescaled { kind, .. } => kind.kind(),
        }
    }

    pub fn q(&self) -> QBase {
        match self {
            DensitySpec::FH { q } | DensitySpec::Rescaled { q, .. } => *q,
            DensitySpec::Scheme { params, .. } => params.q(),
        }
    }

    /// Support `[lo, hi]`; infinite for the rescaled kinds at `q = 1`.
    pub fn support(&self) -> (f64, f64) {
        if self.kind().is_rescaled() {
            let r = self.q().support_radius();
            (-r, r)
        } else {
            (-1.0, 1.0)
        }
    }

    pub fn eval(&self, x: f64, trunc: &TruncationConfig) -> Result<f64> {
        match self {
            DensitySpec::FH { q } => f_h_density(x, *q, trunc),
            DensitySpec::Scheme { kind, params } => density_scheme(*kind, x, params, trunc),
            DensitySpec::Rescaled { kind, q } => density_rescaled(*kind, x, *q, trunc),
        }
    }
}

/// Structural polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structural {
    /// `v(x|t) = 1 - 2xt + t^2`, arguments `[x, t]`.
    V,
    /// `l(x|a) = (1+a)^2 - 4ax^2`, arguments `[x, a]`.
    L,
    /// `omega(x, y|rho)`, arguments `[x, y, rho]`.
    Omega,
}

pub fn v(x: f64, t: f64) -> f64 {
    1.0 - 2.0 * x * t + t * t
}

pub fn l(x: f64, a: f64) -> f64 {
    (1.0 + a).powi(2) - 4.0 * a * x * x
}

pub use crate::families::omega;

pub fn structural(kind: Structural, args: &[f64]) -> Result<f64> {
    let need = match kind {
        Structural::V | Structural::L => 2,
        Structural::Omega => 3,
    };
    if args.len() != need {
        return Err(Error::LengthMismatch { expected: need, got: args.len() });
    }
    Ok(match kind {
        Structural::V => v(args[0], args[1]),
        Structural::L => l(args[0], args[1]),
        Structural::Omega => omega(args[0], args[1], args[2]),
    })
}

/// `prod_{i >= 0} factor(i)` where `factor(i) - 1` is of size `mag |q|^i`.
/// Stops once that size drops below the tolerance, or at `cap` factors.
pub(crate) fn series_product<F>(mag: f64, q: f64, tol: f64, cap: usize, context: &'static str, mut factor: F) -> Result<f64>
where
    F: FnMut(usize) -> f64,
{
    let scale = 1.0 / (1.0 - q.abs());
    let mut prod = 1.0;
    let mut size = mag;
    let mut i = 0;
    while size * scale >= tol && i < cap {
        let f = factor(i);
        if !(f > 0.0) {
            return Err(Error::NonPositiveFactor { context, value: f });
        }
        prod *= f;
        size *= q.abs();
        i += 1;
    }
    Ok(prod)
}

/// Complex counterpart of [`series_product`], without the sign check.
pub(crate) fn series_product_c<F>(mag: f64, q: f64, tol: f64, cap: usize, mut factor: F) -> Complex64
where
    F: FnMut(usize) -> Complex64,
{
    let scale = 1.0 / (1.0 - q.abs());
    let mut prod = Complex64::new(1.0, 0.0);
    let mut size = mag;
    let mut i = 0;
    while size * scale >= tol && i < cap {
        prod *= factor(i);
        size *= q.abs();
        i += 1;
    }
    prod
}

fn check_unit(x: f64) -> Result<()> {
    if !(x.abs() <= 1.0) {
        return Err(invalid(format!("x = {x} outside [-1, 1]")));
    }
    Ok(())
}

/// `1 / prod_{i >= 0} v(x|t q^i)`, the generating function of the q-Hermite polynomials.
pub fn phi_h(x: f64, t: f64, q: QBase, trunc: &TruncationConfig) -> Result<f64> {
    trunc.validate()?;
    check_unit(x)?;
    if !(t.abs() < 1.0) {
        return Err(invalid(format!("phi_h needs |t| < 1, got {t}")));
    }
    let q = q.require_below_one("phi_h")?;
    let qv = q.value();
    let cap = q.factor_cap(trunc.product_tol);
    let prod = series_product(t.abs(), qv, trunc.product_tol, cap, "phi_h", |i| v(x, t * qv.powi(i as i32)))?;
    Ok(1.0 / prod)
}

/// `phi_h` at a complex argument; `1 / prod v(x|t q^i)` with complex factors.
pub(crate) fn phi_h_complex(x: f64, t: Complex64, q: QBase, trunc: &TruncationConfig) -> Complex64 {
    let qv = q.value();
    let cap = q.factor_cap(trunc.product_tol);
    let one = Complex64::new(1.0, 0.0);
    one / series_product_c(t.norm(), qv, trunc.product_tol, cap, |i| {
        let s = t * qv.powi(i as i32);
        one - s * (2.0 * x) + s * s
    })
}

/// Density of the q-Hermite polynomials on `[-1, 1]`.
pub fn f_h_density(x: f64, q: QBase, trunc: &TruncationConfig) -> Result<f64> {
    trunc.validate()?;
    if x.abs() >= 1.0 {
        return if x.abs() == 1.0 { Ok(0.0) } else { Err(invalid(format!("x = {x} outside [-1, 1]"))) };
    }
    let q = q.require_below_one("f_h")?;
    let qv = q.value();
    let cap = q.factor_cap(trunc.product_tol);
    let qinf = product_inf(qv, qv, trunc.product_tol, cap);
    let lprod = series_product(qv.abs(), qv, trunc.product_tol, cap, "f_h", |i| l(x, qv.powi(i as i32 + 1)))?;
    Ok(2.0 * qinf * (1.0 - x * x).sqrt() / std::f64::consts::PI * lprod)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{h_sequence, SchemeParams};
    use crate::qkernel::q_pochhammer;

    fn qb(q: f64) -> QBase {
        QBase::new(q).unwrap()
    }

    /// Trapezoid rule in `x = cos(theta)`; the integrands are smooth and
    /// periodic in theta, so this converges geometrically.
    pub(crate) fn cos_trapezoid<F: Fn(f64) -> f64>(f: F, m: usize) -> f64 {
        let h = std::f64::consts::PI / m as f64;
        (1..m).map(|j| {
            let th = j as f64 * h;
            f(th.cos()) * th.sin()
        }).sum::<f64>() * h
    }

    #[test]
    fn structural_values() {
        assert_eq!(structural(Structural::Omega, &[0.3, 0.2, 0.0]).unwrap(), 1.0);
        assert_eq!(structural(Structural::V, &[0.5, 0.5]).unwrap(), 0.75);
        assert_eq!(structural(Structural::L, &[0.5, 0.5]).unwrap(), 1.75);
        assert!(structural(Structural::Omega, &[0.3]).is_err());
    }

    #[test]
    fn phi_h_trivial_cases_and_series() {
        let t = TruncationConfig::default();
        assert_eq!(phi_h(0.3, 0.0, qb(0.4), &t).unwrap(), 1.0);
        assert!((phi_h(0.3, 0.5, qb(0.0), &t).unwrap() - 1.0 / v(0.3, 0.5)).abs() < 1e-15);
        let (x, tt, q) = (0.3, 0.5_f64, 0.4);
        let h = h_sequence(80, x, q);
        let series: f64 = (0..=80).map(|n| tt.powi(n as i32) * h[n] / q_pochhammer(q, q, n)).sum();
        assert!((phi_h(x, tt, qb(q), &t).unwrap() - series).abs() < 1e-13);
        assert!(phi_h(0.3, 1.0, qb(0.4), &t).is_err());
    }

    #[test]
    fn f_h_semicircle_and_endpoints() {
        let t = TruncationConfig::default();
        let x = 0.37_f64;
        let semi = 2.0 * (1.0 - x * x).sqrt() / std::f64::consts::PI;
        assert!((f_h_density(x, qb(0.0), &t).unwrap() - semi).abs() < 1e-15);
        assert_eq!(f_h_density(1.0, qb(0.5), &t).unwrap(), 0.0);
        assert_eq!(f_h_density(-1.0, qb(0.5), &t).unwrap(), 0.0);
        assert!(f_h_density(0.1, qb(1.0), &t).is_err());
    }

    #[test]
    fn f_h_integrates_to_one() {
        let t = TruncationConfig::default();
        for q in [0.5, -0.7, 0.9] {
            let i = cos_trapezoid(|x| f_h_density(x, qb(q), &t).unwrap(), 400);
            assert!((i - 1.0).abs() < 1e-10, "q = {q}: {i}");
        }
    }

    #[test]
    fn spec_evaluates_each_form() {
        let t = TruncationConfig::default();
        let q = qb(0.3);
        let fh = DensitySpec::FH { q };
        assert_eq!(fh.support(), (-1.0, 1.0));
        let s = DensitySpec::Scheme { kind: SchemeDensity::FAw, params: SchemeParams::real(0.0, 0.0, 0.0, 0.0, 0.3).unwrap() };
        assert!((s.eval(0.2, &t).unwrap() - fh.eval(0.2, &t).unwrap()).abs() < 1e-15);
        let r = DensitySpec::Rescaled { kind: RescaledDensity::FN, q };
        assert!((r.support().1 - 2.0 / 0.7_f64.sqrt()).abs() < 1e-15);
    }
}
