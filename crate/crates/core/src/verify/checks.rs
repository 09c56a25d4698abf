use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::connect::formulas::den_poch;
use crate::connect::{apply_connection, connection_w_p, conversion_residual, Direction};
use crate::density::{
    density_scheme, f_h_density, kernel_sum, norm_squared, DensitySpec, KernelKind, KernelSum, SchemeDensity, TruncationConfig,
};
use crate::error::{invalid, Error, Result};
use crate::families::scheme::{g_shifted, p_sequence_raw};
use crate::families::{eval_sequence, w_sequence, Family, PolySequence, SchemeParams};
use crate::qkernel::{binom2, q_pochhammer, QBase};

use super::quadrature::{integrate, integrate_many, QuadratureRule};
use super::{Tolerance, VerificationReport};

/// Highest degree used by the polynomial expansion checks.
pub const EXPANSION_DEGREE: usize = 8;
const CONVERSION_DEGREE: usize = 6;

const DIAGONAL: f64 = 1e-6;
const OFF_DIAGONAL: f64 = 1e-8;
const EXPANSION: f64 = 1e-9;
const KERNEL: f64 = 1e-8;
const CONVERSION: f64 = 1e-10;
const MOMENT: Tolerance = Tolerance { abs: 1e-12, rel: 1e-7 };
const NORMALIZATION: f64 = 1e-8;
const QUADRUPLE: Tolerance = Tolerance { abs: 1e-12, rel: 1e-7 };

fn truncation() -> TruncationConfig {
    TruncationConfig::default()
}

/// `int alpha_n alpha_m f` against `delta_{nm} norm_n` for `0 <= m <= n <= n_max`,
/// as a full symmetric matrix of reports. Off-diagonal entries are measured
/// against `sqrt(norm_n norm_m)`.
pub fn check_orthogonality(
    family: Family,
    n_max: usize,
    p: &SchemeParams,
    rule: &QuadratureRule,
) -> Result<Vec<Vec<VerificationReport>>> {
    let started = Instant::now();
    let trunc = truncation();
    let q = p.q().require_below_one("orthogonality")?;
    let density = SchemeDensity::of_family(family);
    let weight = |x: f64| match density {
        Some(kind) => density_scheme(kind, x, p, &trunc),
        None => f_h_density(x, q, &trunc),
    };
    let idx = |n: usize, m: usize| n * (n + 1) / 2 + m;
    let dim = idx(n_max, n_max) + 1;
    let (moments, _) = integrate_many(
        |x, out| {
            let f = weight(x)?;
            let a = eval_sequence(family, n_max, x, p)?.values;
            for n in 0..=n_max {
                for m in 0..=n {
                    out[idx(n, m)] = a[n] * a[m] * f;
                }
            }
            Ok(())
        },
        dim,
        -1.0,
        1.0,
        rule,
    )?;
    let norms = (0..=n_max).map(|n| norm_squared(family, n, p)).collect::<Result<Vec<_>>>()?;
    let mut out = vec![Vec::with_capacity(n_max + 1); n_max + 1];
    for (n, row) in out.iter_mut().enumerate() {
        for m in 0..=n_max {
            let computed = moments[idx(n.max(m), n.min(m))];
            let (target, tol) = if n == m {
                (norms[n], Tolerance::rel(DIAGONAL))
            } else {
                (0.0, Tolerance::abs(OFF_DIAGONAL * (norms[n] * norms[m]).abs().sqrt()))
            };
            let name = format!("orthogonality {} ({n},{m})", family.name());
            row.push(VerificationReport::new(name, target, computed, tol, started));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionKind {
    /// `w_n` rebuilt from the `p_j`.
    TheoremMainWp,
    /// `p_n` rebuilt from the `w_j`.
    TheoremMainPw,
    KernelPm,
    KernelAwFwd,
    KernelAwInv,
    /// Continuous dual Hahn kernel sum against its product formula.
    C2hClosedForm,
    /// Both sides of the conversion formula, `y = x` on the grid and `z`, `t = rho1 rho2` from `p`.
    Conversion,
}

impl ExpansionKind {
    pub fn name(self) -> &'static str {
        match self {
            ExpansionKind::TheoremMainWp => "theorem_main_wp",
            ExpansionKind::TheoremMainPw => "theorem_main_pw",
            ExpansionKind::KernelPm => "kernel_pm",
            ExpansionKind::KernelAwFwd => "kernel_aw_fwd",
            ExpansionKind::KernelAwInv => "kernel_aw_inv",
            ExpansionKind::C2hClosedForm => "c2h_closed_form",
            ExpansionKind::Conversion => "conversion",
        }
    }
}

/// Largest discrepancy of `lhs[n]` from `rhs[n]` over the grid, each degree
/// measured against the sup of `|lhs[n]|` on the grid.
fn sup_relative(rows: &[(Vec<f64>, Vec<f64>)]) -> f64 {
    let Some(first) = rows.first() else { return 0.0 };
    let degrees = first.0.len();
    let mut worst = 0.0_f64;
    for n in 0..degrees {
        let scale = rows.iter().fold(0.0_f64, |m, r| m.max(r.0[n].abs())).max(f64::MIN_POSITIVE);
        for r in rows {
            worst = worst.max((r.0[n] - r.1[n]).abs() / scale);
        }
    }
    worst
}

/// Refuses a comparison that rounding alone could fail.
fn well_conditioned(k: &KernelSum, target: f64, context: &'static str) -> Result<()> {
    let condition = k.abs_sum / target.abs();
    if condition * 64.0 * f64::EPSILON > KERNEL {
        return Err(Error::IllConditioned { context, condition });
    }
    Ok(())
}

fn positive(v: f64, context: &'static str) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::NonPositiveFactor { context, value: v });
    }
    Ok(v)
}

/// Maximum discrepancy between the two sides of an expansion over `grid`.
/// Polynomial expansions are compared up to [`EXPANSION_DEGREE`] relative to
/// the sup of each polynomial over the grid; kernels relative to the density
/// ratio; the conversion formula in absolute terms (including the imaginary
/// part of its left side), for all `n, m <= 6`.
pub fn check_expansion(kind: ExpansionKind, p: &SchemeParams, grid: &[f64]) -> Result<VerificationReport> {
    let started = Instant::now();
    let trunc = truncation();
    if let Some(x) = grid.iter().find(|x| !(x.abs() <= 1.0)) {
        return Err(invalid(format!("grid point {x} outside [-1, 1]")));
    }
    let n = EXPANSION_DEGREE;
    let (computed, tol) = match kind {
        ExpansionKind::TheoremMainWp | ExpansionKind::TheoremMainPw => {
            let dir = if kind == ExpansionKind::TheoremMainWp { Direction::Forward } else { Direction::Inverse };
            let m = connection_w_p(n, p, dir)?;
            let mut rows = Vec::with_capacity(grid.len());
            for &x in grid {
                let w = PolySequence::new(Family::W, w_sequence(n, x, p)?);
                let pp = eval_sequence(Family::P, n, x, p)?;
                let (direct, basis) = if dir == Direction::Forward { (w, pp) } else { (pp, w) };
                rows.push((direct.values, apply_connection(&m, &basis)?.values));
            }
            (sup_relative(&rows), EXPANSION)
        }
        ExpansionKind::KernelPm | ExpansionKind::KernelAwFwd | ExpansionKind::KernelAwInv => {
            let mut worst = 0.0_f64;
            for &x in grid {
                let fp = density_scheme(SchemeDensity::FP, x, p, &trunc)?;
                let (kk, ratio) = match kind {
                    ExpansionKind::KernelPm => {
                        let fh = positive(f_h_density(x, p.q(), &trunc)?, "kernel check base density")?;
                        (KernelKind::PoissonMehler, fp / fh)
                    }
                    ExpansionKind::KernelAwFwd => {
                        let fp = positive(fp, "kernel check base density")?;
                        (KernelKind::AwForward, density_scheme(SchemeDensity::FW, x, p, &trunc)? / fp)
                    }
                    _ => {
                        let fw = positive(density_scheme(SchemeDensity::FW, x, p, &trunc)?, "kernel check base density")?;
                        (KernelKind::AwInverse, fp / fw)
                    }
                };
                let k = kernel_sum(kk, x, p, &trunc)?;
                well_conditioned(&k, ratio, kind.name())?;
                worst = worst.max((k.sum - ratio).abs() / ratio.abs());
            }
            (worst, KERNEL)
        }
        ExpansionKind::C2hClosedForm => {
            let mut worst = 0.0_f64;
            for &x in grid {
                let k = kernel_sum(KernelKind::C2hSum, x, p, &trunc)?;
                let closed = k.closed_form.unwrap_or(f64::NAN);
                well_conditioned(&k, closed, kind.name())?;
                worst = worst.max((k.sum - closed).abs() / closed.abs());
            }
            (worst, KERNEL)
        }
        ExpansionKind::Conversion => {
            let SchemeParams::Conjugate { z, rho1, rho2, q, .. } = p.to_conjugate()? else { unreachable!() };
            let eta = z.acos();
            let mut worst = 0.0_f64;
            for &x in grid {
                for nn in 0..=CONVERSION_DEGREE {
                    for mm in 0..=CONVERSION_DEGREE {
                        let r = conversion_residual(nn, mm, x.acos(), eta, rho1 * rho2, q)?;
                        worst = worst.max(r.diff).max(r.imag);
                    }
                }
            }
            (worst, CONVERSION)
        }
    };
    let name = format!("expansion {}", kind.name());
    Ok(VerificationReport::new(name, 0.0, computed, Tolerance::abs(tol), started))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentKind {
    /// `int p_n(x|y, rho1) f_W(x) dx`.
    PAgainstW,
    /// `int w_n(x) f_p(x|y, rho1) dx`.
    WAgainstP,
}

/// Closed form of the conditional moment, with `t = rho1 rho2`:
/// `rho2^n (rho1^2)_n / (t^2)_n p_n(z|y, t)` for [`MomentKind::PAgainstW`] and
/// `rho2^n (rho1^2)_n / (t^2 q^{n-1})_n g_n(z|y, t q^{n-1})` for [`MomentKind::WAgainstP`].
pub fn conditional_moment_target(kind: MomentKind, n: usize, y: f64, rho1: f64, z: f64, rho2: f64, q: QBase) -> Result<f64> {
    let qv = q.value();
    let t = rho1 * rho2;
    let lead = rho2.powi(n as i32) * q_pochhammer(rho1 * rho1, qv, n);
    match kind {
        MomentKind::PAgainstW => {
            let den = den_poch(t * t, qv, 0, n, "conditional moment")?;
            Ok(lead / den * p_sequence_raw(n, z, y, t, qv)[n])
        }
        MomentKind::WAgainstP => {
            let den = den_poch(t * t, qv, n as i64 - 1, n, "conditional moment")?;
            Ok(lead / den * g_shifted(n, z, y, t, n as i64 - 1, qv))
        }
    }
}

/// Quadrature of a conditional moment against its closed form; `p` must
/// be conjugate with `|rho1|, |rho2| < 1`.
pub fn check_conditional_moment(
    kind: MomentKind,
    n: usize,
    p: &SchemeParams,
    rule: &QuadratureRule,
) -> Result<VerificationReport> {
    let started = Instant::now();
    let trunc = truncation();
    let SchemeParams::Conjugate { y, rho1, z, rho2, q } = p.to_conjugate()? else { unreachable!() };
    if !(rho1.abs() < 1.0 && rho2.abs() < 1.0) {
        return Err(invalid("conditional moments need |rho1|, |rho2| < 1"));
    }
    q.require_below_one("conditional moments")?;
    let (computed, _) = match kind {
        MomentKind::PAgainstW => integrate(
            |x| Ok(eval_sequence(Family::P, n, x, p)?.values[n] * density_scheme(SchemeDensity::FW, x, p, &trunc)?),
            -1.0,
            1.0,
            rule,
        )?,
        MomentKind::WAgainstP => integrate(
            |x| Ok(w_sequence(n, x, p)?[n] * density_scheme(SchemeDensity::FP, x, p, &trunc)?),
            -1.0,
            1.0,
            rule,
        )?,
    };
    let target = conditional_moment_target(kind, n, y, rho1, z, rho2, q)?;
    let name = format!("conditional moment {kind:?} n={n}");
    Ok(VerificationReport::new(name, target, computed, MOMENT, started))
}

/// `|int density - 1|` over the support of `spec`.
pub fn check_normalization(spec: &DensitySpec, rule: &QuadratureRule) -> Result<VerificationReport> {
    let started = Instant::now();
    let trunc = truncation();
    let (lo, hi) = spec.support();
    let (computed, _) = integrate(|x| spec.eval(x, &trunc), lo, hi, rule)?;
    let name = format!("normalization {}", spec.kind().name());
    Ok(VerificationReport::new(name, 1.0, computed, Tolerance::abs(NORMALIZATION), started))
}

/// `int h_j h_k h_n h_m f_h` read off the generating function
/// `(abcd)_inf / (ab, ac, ad, bc, bd, cd)_inf`: the coefficient of
/// `a^j b^k c^n d^m` times `(q)_j (q)_k (q)_n (q)_m`.
pub fn quadruple_moment_series(j: usize, k: usize, n: usize, m: usize, q: QBase) -> f64 {
    let qv = q.value();
    let fact = |s: usize| q_pochhammer(qv, qv, s);
    let inv = |s: i64| -> Option<f64> { (s >= 0).then(|| 1.0 / fact(s as usize)) };
    let (j, k, n, m) = (j as i64, k as i64, n as i64, m as i64);
    let mut total = 0.0;
    for s in 0..=j.min(k).min(n).min(m) {
        // Exponent of abcd from (abcd)_inf = sum (-1)^s q^{C(s,2)} u^s / (q)_s.
        let lead = if s % 2 == 0 { 1.0 } else { -1.0 } * qv.powi(binom2(s as usize)) / fact(s as usize);
        for ab in 0..=(j - s) {
            for ac in 0..=(j - s - ab) {
                let ad = j - s - ab - ac;
                let (rb, rc, rd) = (k - s - ab, n - s - ac, m - s - ad);
                // bc + bd = rb, bc + cd = rc, bd + cd = rd.
                let twice_bc = rb + rc - rd;
                if twice_bc < 0 || twice_bc % 2 != 0 {
                    continue;
                }
                let bc = twice_bc / 2;
                let (bd, cd) = (rb - bc, rc - bc);
                let parts = [ab, ac, ad, bc, bd, cd].map(inv);
                if parts.iter().any(Option::is_none) {
                    continue;
                }
                total += lead * parts.iter().map(|v| v.unwrap()).product::<f64>();
            }
        }
    }
    total * [j, k, n, m].iter().map(|&e| fact(e as usize)).product::<f64>()
}

/// Direct quadrature of `int h_j h_k h_n h_m f_h` against the series value.
pub fn check_quadruple_product(
    j: usize,
    k: usize,
    n: usize,
    m: usize,
    q: QBase,
    rule: &QuadratureRule,
) -> Result<VerificationReport> {
    let started = Instant::now();
    let trunc = truncation();
    q.require_below_one("quadruple products")?;
    let top = j.max(k).max(n).max(m);
    let (computed, _) = integrate(
        |x| {
            let h = crate::families::scheme::h_sequence(top, x, q.value());
            Ok(h[j] * h[k] * h[n] * h[m] * f_h_density(x, q, &trunc)?)
        },
        -1.0,
        1.0,
        rule,
    )?;
    let target = quadruple_moment_series(j, k, n, m, q);
    let name = format!("quadruple product ({j},{k},{n},{m})");
    Ok(VerificationReport::new(name, target, computed, QUADRUPLE, started))
}
