//! Seeded verification suites, one per acceptance criterion.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::connect::{
    connection_aw_asc, connection_aw_c2h, connection_h_p, connection_w_p, conversion_residual, identity_residual,
    ConnectionMatrix, Direction, IdentityKind,
};
use crate::density::{density_rescaled, DensitySpec, RescaledDensity, SchemeDensity, TruncationConfig};
use crate::error::{invalid, Result};
use crate::families::{aw_recurrence_coeffs, kls_ladder_coeffs, rescaled_sequence, Family, RescaledKind, SchemeParams};
use crate::markov::{
    chapman_kolmogorov_residual, correlation_check, empirical_moment_check, marginal_ks_check, time_reversal_residual,
    ChainConfig, ChainSampler, Coord,
};
use crate::qkernel::{binom2, q_binomial, q_pochhammer, QBase};
use crate::verify::{
    check_conditional_moment, check_expansion, check_normalization, check_orthogonality, check_quadruple_product,
    ExpansionKind, MomentKind, QuadratureRule, Tolerance, VerificationReport,
};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;
pub const DEFAULT_MARKOV_SAMPLES: usize = 1_000_000;

const BASES: [f64; 5] = [-0.5, 0.0, 0.3, 0.7, 0.95];
/// Kernel series cancel down to nothing in `f64` as `q -> 1`: their terms
/// grow like `1 / (q)_inf`, about `1e14` at `q = 0.95`.
const KERNEL_BASES: [f64; 4] = [-0.5, 0.0, 0.3, 0.7];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Normalization,
    Orthogonality,
    ConnectionRoundTrips,
    TheoremMain,
    Identities,
    Conversion,
    Kernels,
    ConditionalMoments,
    ClassicalLimits,
    Ladder,
    Markov,
    BaseInversion,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::Normalization,
        Suite::Orthogonality,
        Suite::ConnectionRoundTrips,
        Suite::TheoremMain,
        Suite::Identities,
        Suite::Conversion,
        Suite::Kernels,
        Suite::ConditionalMoments,
        Suite::ClassicalLimits,
        Suite::Ladder,
        Suite::Markov,
        Suite::BaseInversion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Normalization => "normalization",
            Suite::Orthogonality => "orthogonality",
            Suite::ConnectionRoundTrips => "connection_round_trips",
            Suite::TheoremMain => "theorem_main",
            Suite::Identities => "identities",
            Suite::Conversion => "conversion",
            Suite::Kernels => "kernels",
            Suite::ConditionalMoments => "conditional_moments",
            Suite::ClassicalLimits => "classical_limits",
            Suite::Ladder => "ladder",
            Suite::Markov => "markov",
            Suite::BaseInversion => "base_inversion",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| invalid(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Replaces every drawn or listed base when set.
    pub q: Option<QBase>,
    pub markov_samples: usize,
    pub rule: QuadratureRule,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, q: None, markov_samples: DEFAULT_MARKOV_SAMPLES, rule: QuadratureRule::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub passed: bool,
    pub runtime_ms: f64,
    pub reports: Vec<VerificationReport>,
}

impl SuiteResult {
    /// The worst report, measured by error over allowance.
    pub fn worst(&self) -> Option<&VerificationReport> {
        let ratio = |r: &VerificationReport| {
            let allowed = r.tolerance.abs.max(r.tolerance.rel * r.target.abs());
            if r.passed { r.abs_err / allowed.max(f64::MIN_POSITIVE) } else { f64::INFINITY }
        };
        self.reports.iter().max_by(|a, b| ratio(a).total_cmp(&ratio(b)))
    }
}

struct Ctx {
    rng: ChaCha8Rng,
    opts: SuiteOptions,
    reports: Vec<VerificationReport>,
}

impl Ctx {
    fn u(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..=hi)
    }

    fn base(&self, i: usize) -> QBase {
        self.opts.q.unwrap_or_else(|| QBase::new(BASES[i % BASES.len()]).expect("listed base"))
    }

    fn drawn_base(&mut self, lo: f64, hi: f64) -> Result<QBase> {
        match self.opts.q {
            Some(q) => Ok(q),
            None => {
                let q = self.u(lo, hi);
                QBase::new(q)
            }
        }
    }

    fn real_params(&mut self, mag: f64, q: QBase) -> Result<SchemeParams> {
        let v: Vec<f64> = (0..4).map(|_| self.u(-mag, mag)).collect();
        SchemeParams::real(v[0], v[1], v[2], v[3], q.value())
    }

    fn conjugate_params(&mut self, mag: f64, q: QBase) -> Result<SchemeParams> {
        let (y, z) = (self.u(-1.0, 1.0), self.u(-1.0, 1.0));
        let (r1, r2) = (self.u(-mag, mag), self.u(-mag, mag));
        SchemeParams::conjugate_in(y, r1, z, r2, q)
    }

    fn push(&mut self, r: VerificationReport) {
        let seed = self.opts.seed;
        self.reports.push(r.with_seed(seed));
    }

    fn aggregate(&mut self, name: impl Into<String>, worst: f64, tol: f64, started: Instant) {
        self.push(VerificationReport::new(name, 0.0, worst, Tolerance::abs(tol), started));
    }
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<SuiteResult> {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(suite as u64);
    let mut ctx = Ctx { rng, opts: *opts, reports: Vec::new() };
    match suite {
        Suite::Normalization => normalization(&mut ctx)?,
        Suite::Orthogonality => orthogonality(&mut ctx)?,
        Suite::ConnectionRoundTrips => round_trips(&mut ctx)?,
        Suite::TheoremMain => theorem_main(&mut ctx)?,
        Suite::Identities => identities(&mut ctx)?,
        Suite::Conversion => conversion(&mut ctx)?,
        Suite::Kernels => kernels(&mut ctx)?,
        Suite::ConditionalMoments => conditional_moments(&mut ctx)?,
        Suite::ClassicalLimits => classical_limits(&mut ctx)?,
        Suite::Ladder => ladder(&mut ctx)?,
        Suite::Markov => markov(&mut ctx)?,
        Suite::BaseInversion => base_inversion(&mut ctx)?,
    }
    let passed = ctx.reports.iter().all(|r| r.passed);
    Ok(SuiteResult { suite, passed, runtime_ms: started.elapsed().as_secs_f64() * 1e3, reports: ctx.reports })
}

fn normalization(ctx: &mut Ctx) -> Result<()> {
    let started = Instant::now();
    let rule = ctx.opts.rule;
    for i in 0..20 {
        let q = ctx.base(i);
        let params = if i % 2 == 0 { ctx.real_params(0.8, q)? } else { ctx.conjugate_params(0.8, q)? };
        let spec = DensitySpec::Scheme { kind: SchemeDensity::FAw, params };
        ctx.push(check_normalization(&spec, &rule)?);
    }
    let secs = started.elapsed().as_secs_f64();
    ctx.push(VerificationReport::new("normalization runtime (s)", 0.0, secs, Tolerance::abs(60.0), started));
    // Moments of four q-Hermite polynomials read off the same normalization.
    for i in 0..6 {
        let q = ctx.base(i);
        if q.is_one() {
            continue;
        }
        // Total degree at most 10.
        let mut idx = [0usize; 4];
        let mut left = 10;
        for v in idx.iter_mut() {
            *v = ctx.rng.random_range(0..=left.min(4));
            left -= *v;
        }
        let [j, k, n, m] = idx;
        ctx.push(check_quadruple_product(j, k, n, m, q, &rule)?);
    }
    Ok(())
}

fn orthogonality(ctx: &mut Ctx) -> Result<()> {
    let rule = ctx.opts.rule;
    for draw in 0..3 {
        let q = ctx.base(draw + 2);
        let real = ctx.real_params(0.8, q)?;
        let conj = ctx.conjugate_params(0.8, q)?;
        for family in [Family::Qh, Family::Bqh, Family::Asc, Family::C2h, Family::Aw] {
            for r in check_orthogonality(family, 6, &real, &rule)?.into_iter().flatten() {
                ctx.push(r);
            }
        }
        for family in [Family::P, Family::W] {
            for r in check_orthogonality(family, 6, &conj, &rule)?.into_iter().flatten() {
                ctx.push(r);
            }
        }
    }
    Ok(())
}

fn round_trip(ctx: &mut Ctx, name: &str, fwd: ConnectionMatrix, inv: ConnectionMatrix) -> Result<()> {
    let started = Instant::now();
    let a = fwd.compose(&inv)?.identity_defect();
    let b = inv.compose(&fwd)?.identity_defect();
    ctx.aggregate(format!("round trip {name}"), a.max(b), 1e-10, started);
    Ok(())
}

fn round_trips(ctx: &mut Ctx) -> Result<()> {
    let n = 10;
    for draw in 0..10 {
        let q = ctx.base(draw);
        let real = ctx.real_params(0.8, q)?;
        let conj = ctx.conjugate_params(0.8, q)?;
        let c2h = (connection_aw_c2h(n, &real, Direction::Forward)?, connection_aw_c2h(n, &real, Direction::Inverse)?);
        round_trip(ctx, "aw/c2h", c2h.0, c2h.1)?;
        let asc = (connection_aw_asc(n, &conj, Direction::Forward)?, connection_aw_asc(n, &conj, Direction::Inverse)?);
        round_trip(ctx, "aw/asc", asc.0, asc.1)?;
        let wp = (connection_w_p(n, &conj, Direction::Forward)?, connection_w_p(n, &conj, Direction::Inverse)?);
        round_trip(ctx, "w/p", wp.0, wp.1)?;
        let (y, rho) = (ctx.u(-1.0, 1.0), ctx.u(-0.8, 0.8));
        let hp = (connection_h_p(n, y, rho, q, Direction::Forward)?, connection_h_p(n, y, rho, q, Direction::Inverse)?);
        round_trip(ctx, "h/p", hp.0, hp.1)?;
    }
    Ok(())
}

fn theorem_main(ctx: &mut Ctx) -> Result<()> {
    for draw in 0..10 {
        let q = ctx.base(draw);
        let p = ctx.conjugate_params(0.8, q)?;
        let grid: Vec<f64> = (0..100).map(|_| ctx.u(-1.0, 1.0)).collect();
        for kind in [ExpansionKind::TheoremMainWp, ExpansionKind::TheoremMainPw] {
            ctx.push(check_expansion(kind, &p, &grid)?);
        }
    }
    Ok(())
}

fn identities(ctx: &mut Ctx) -> Result<()> {
    let started = Instant::now();
    let kinds = [IdentityKind::CorollaryI, IdentityKind::CorollaryII, IdentityKind::OdwrIv, IdentityKind::BConvolution];
    let mut worst = [0.0_f64; 4];
    for _ in 0..200 {
        let (z, y, t) = (ctx.u(-1.0, 1.0), ctx.u(-1.0, 1.0), ctx.u(-0.9, 0.9));
        let q = ctx.drawn_base(-0.9, 0.9)?;
        for n in 1..=8 {
            for (i, kind) in kinds.iter().enumerate() {
                let ks = if i < 2 { 0..n } else { 0..1 };
                for k in ks {
                    let r = identity_residual(*kind, n, k, z, y, t, q)?;
                    worst[i] = worst[i].max(r.sum.abs() / r.max_term.max(f64::MIN_POSITIVE));
                }
            }
        }
    }
    for (kind, w) in kinds.iter().zip(worst) {
        ctx.aggregate(format!("identity {kind:?} (|sum| / max term)"), w, 1e-11, started);
    }
    Ok(())
}

fn conversion(ctx: &mut Ctx) -> Result<()> {
    let started = Instant::now();
    let (mut diff, mut imag) = (0.0_f64, 0.0_f64);
    for _ in 0..100 {
        let (theta, eta, t) = (ctx.u(0.0, PI), ctx.u(0.0, PI), ctx.u(-0.8, 0.8));
        let q = ctx.drawn_base(-0.9, 0.9)?;
        for n in 0..=6 {
            for m in 0..=6 {
                let r = conversion_residual(n, m, theta, eta, t, q)?;
                diff = diff.max(r.diff);
                imag = imag.max(r.imag);
            }
        }
    }
    ctx.aggregate("conversion |lhs - rhs|", diff, 1e-10, started);
    ctx.aggregate("conversion |Im lhs|", imag, 1e-10, started);
    Ok(())
}

fn kernels(ctx: &mut Ctx) -> Result<()> {
    for draw in 0..12 {
        let q = match ctx.opts.q {
            Some(q) => q,
            None => QBase::new(KERNEL_BASES[draw % KERNEL_BASES.len()])?,
        };
        let p = ctx.conjugate_params(0.6, q)?;
        let grid: Vec<f64> = (0..20).map(|_| ctx.u(-0.99, 0.99)).collect();
        for kind in [ExpansionKind::KernelPm, ExpansionKind::KernelAwFwd, ExpansionKind::KernelAwInv] {
            ctx.push(check_expansion(kind, &p, &grid)?);
        }
        let quad = ctx.real_params(0.6, q)?;
        ctx.push(check_expansion(ExpansionKind::C2hClosedForm, &quad, &grid)?);
    }
    Ok(())
}

fn conditional_moments(ctx: &mut Ctx) -> Result<()> {
    let rule = ctx.opts.rule;
    for draw in 0..5 {
        let q = ctx.base(draw);
        let p = ctx.conjugate_params(0.8, q)?;
        for n in 0..=5 {
            for kind in [MomentKind::PAgainstW, MomentKind::WAgainstP] {
                ctx.push(check_conditional_moment(kind, n, &p, &rule)?);
            }
        }
    }
    Ok(())
}

/// `U_n(x)` by the angle formula, zero for negative `n`.
fn cheb_u(n: isize, x: f64) -> f64 {
    match n {
        n if n < 0 => 0.0,
        _ => {
            let th = x.clamp(-1.0, 1.0).acos();
            let s = th.sin();
            if s.abs() < 1e-8 {
                // Limit at x = +-1.
                let sign = if x > 0.0 { 1.0 } else { (-1.0_f64).powi(n as i32) };
                sign * (n + 1) as f64
            } else {
                ((n + 1) as f64 * th).sin() / s
            }
        }
    }
}

/// Probabilists' Hermite `He_n(x)`.
fn hermite(n: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, x);
    if n == 0 {
        return a;
    }
    for k in 1..n {
        let c = x * b - k as f64 * a;
        a = b;
        b = c;
    }
    b
}

fn classical_limits(ctx: &mut Ctx) -> Result<()> {
    let started = Instant::now();
    let trunc = TruncationConfig::default();
    let (zero, one) = (QBase::new(0.0)?, QBase::new(1.0)?);
    let mut worst = [0.0_f64; 10];
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    for _ in 0..100 {
        let (r1, r2) = (ctx.u(-0.9, 0.9), ctx.u(-0.9, 0.9));
        // q = 0: S(0) = [-2, 2].
        let (x, y, z) = (ctx.u(-2.0, 2.0), ctx.u(-2.0, 2.0), ctx.u(-2.0, 2.0));
        let h = rescaled_sequence(RescaledKind::H, 8, x, &[], zero)?;
        let p = rescaled_sequence(RescaledKind::P, 8, x, &[y, r1], zero)?;
        let a = rescaled_sequence(RescaledKind::A, 8, x, &[y, r1, z, r2], zero)?;
        let u = |k: usize, d: isize| cheb_u(k as isize - d, x / 2.0);
        for n in 0..=8 {
            worst[0] = worst[0].max(rel(h[n], u(n, 0)));
            worst[1] = worst[1].max(rel(p[n], u(n, 0) - r1 * y * u(n, 1) + r1 * r1 * u(n, 2)));
            if n >= 3 {
                let form = u(n, 0) - (r1 * y + r2 * z) * u(n, 1) + (r1 * r1 + r2 * r2 + y * z * r1 * r2) * u(n, 2)
                    - r1 * r2 * (r1 * z + r2 * y) * u(n, 3)
                    + (r1 * r2).powi(2) * u(n, 4);
                worst[2] = worst[2].max(rel(a[n], form));
            }
        }
        let wigner = (4.0 - x * x).sqrt() / (2.0 * PI);
        worst[3] = worst[3].max(rel(density_rescaled(RescaledDensity::FN, x, zero, &trunc)?, wigner));
        let km = (1.0 - r1 * r1) * (4.0 - x * x).sqrt()
            / (2.0 * PI * ((1.0 - r1 * r1).powi(2) - r1 * (1.0 + r1 * r1) * x * y + r1 * r1 * (x * x + y * y)));
        worst[4] = worst[4].max(rel(density_rescaled(RescaledDensity::FCn { y, rho: r1 }, x, zero, &trunc)?, km));

        // q = 1.
        let (x, y, z) = (ctx.u(-4.0, 4.0), ctx.u(-4.0, 4.0), ctx.u(-4.0, 4.0));
        let h = rescaled_sequence(RescaledKind::H, 8, x, &[], one)?;
        let p = rescaled_sequence(RescaledKind::P, 8, x, &[y, r1], one)?;
        let a = rescaled_sequence(RescaledKind::A, 8, x, &[y, r1, z, r2], one)?;
        let t2 = (r1 * r2).powi(2);
        let v1 = 1.0 - r1 * r1;
        let va = v1 * (1.0 - r2 * r2) / (1.0 - t2);
        let arg = (x * (1.0 - t2) - r1 * (1.0 - r2 * r2) * y - r2 * v1 * z) / (v1 * (1.0 - r2 * r2) * (1.0 - t2)).sqrt();
        for n in 0..=8 {
            worst[5] = worst[5].max(rel(h[n], hermite(n, x)));
            worst[6] = worst[6].max(rel(p[n], hermite(n, (x - r1 * y) / v1.sqrt()) * v1.powf(n as f64 / 2.0)));
            worst[7] = worst[7].max(rel(a[n], va.powf(n as f64 / 2.0) * hermite(n, arg)));
        }
        let gauss = |v: f64, m: f64, s2: f64| (-(v - m).powi(2) / (2.0 * s2)).exp() / (2.0 * PI * s2).sqrt();
        worst[8] = worst[8].max(rel(density_rescaled(RescaledDensity::FN, x, one, &trunc)?, gauss(x, 0.0, 1.0)));
        let cn = density_rescaled(RescaledDensity::FCn { y, rho: r1 }, x, one, &trunc)?;
        worst[9] = worst[9].max(rel(cn, gauss(x, r1 * y, v1)));
    }
    let names = [
        "H at q=0 vs U_n(x/2)",
        "P at q=0 vs Chebyshev form",
        "A at q=0 vs Chebyshev form (n >= 3)",
        "f_N at q=0 vs Wigner",
        "f_CN at q=0 vs Kesten-McKey",
        "H at q=1 vs Hermite",
        "P at q=1 vs Hermite form",
        "A at q=1 vs Hermite form",
        "f_N at q=1 vs Gaussian",
        "f_CN at q=1 vs Gaussian",
    ];
    for (name, w) in names.iter().zip(worst) {
        ctx.aggregate(*name, w, 1e-12, started);
    }
    Ok(())
}

fn ladder(ctx: &mut Ctx) -> Result<()> {
    for draw in 0..10 {
        let started = Instant::now();
        let q = ctx.base(draw);
        let mut p = if draw % 2 == 0 { ctx.real_params(0.8, q)? } else { ctx.conjugate_params(0.8, q)? };
        // The ladder divides by a.
        while p.quad_values()[0].norm() < 0.1 {
            p = ctx.real_params(0.8, q)?;
        }
        let a = p.quad_values()[0];
        let mut worst = 0.0_f64;
        let mut prev: Option<Complex64> = None;
        for n in 0..=10 {
            let (e, f) = aw_recurrence_coeffs(n, &p)?;
            let (big_a, big_c) = kls_ladder_coeffs(n, &p)?;
            let sum = a + 1.0 / a;
            let scale = sum.norm().max(big_a.norm()).max(big_c.norm());
            worst = worst.max((sum - big_a - big_c - e).norm() / scale);
            if let Some(pa) = prev {
                let prod = pa * big_c;
                worst = worst.max((prod - f).norm() / prod.norm().max(f64::MIN_POSITIVE));
            }
            prev = Some(big_a);
        }
        let form = if p.is_conjugate() { "conjugate" } else { "real" };
        ctx.push(VerificationReport::new(format!("ladder ({form} draw {draw})"), 0.0, worst, Tolerance::abs(1e-11), started));
    }
    Ok(())
}

/// Pulls the fixed test points, which reach 1.9, inside a narrow support.
fn shrink(q: QBase) -> f64 {
    (0.95 * q.support_radius() / 1.9).min(1.0)
}

fn markov(ctx: &mut Ctx) -> Result<()> {
    let started = Instant::now();
    let cfg = ChainConfig {
        q: ctx.opts.q.unwrap_or(QBase::new(0.6)?),
        rho1: 0.4,
        rho2: 0.5,
        n_samples: ctx.opts.markov_samples,
        seed: ctx.opts.seed,
    };
    let samples = ChainSampler::new(cfg)?.sample();
    for coord in [Coord::Y, Coord::X, Coord::Z] {
        ctx.push(marginal_ks_check(&samples, coord, cfg.q)?);
    }
    let t = cfg.rho1 * cfg.rho2;
    ctx.push(correlation_check(&samples, (Coord::Y, Coord::Z), t)?);
    ctx.push(correlation_check(&samples, (Coord::Y, Coord::X), cfg.rho1)?);
    ctx.push(correlation_check(&samples, (Coord::X, Coord::Z), cfg.rho2)?);
    for n in 0..=2 {
        ctx.push(empirical_moment_check(&samples, n, &cfg)?);
    }
    let rule = ctx.opts.rule;
    for (x, z, r1, r2, q) in [(0.5, -0.3, 0.4, 0.6, 0.5), (1.1, 0.2, cfg.rho1, cfg.rho2, cfg.q.value()), (-1.4, 1.9, 0.7, -0.5, 0.0)] {
        let s = Instant::now();
        let q = ctx.opts.q.unwrap_or(QBase::new(q)?);
        let (x, z) = (x * shrink(q), z * shrink(q));
        let r = chapman_kolmogorov_residual(x, z, r1, r2, q, &rule)?;
        ctx.aggregate(format!("Chapman-Kolmogorov at x={x}, z={z}"), r, 1e-8, s);
    }
    let s = Instant::now();
    let mut worst = 0.0_f64;
    for (x, y) in [(0.3, -1.2), (1.5, 0.4), (-0.8, -0.1)] {
        let k = shrink(cfg.q);
        worst = worst.max(time_reversal_residual(x * k, y * k, t, cfg.q)?);
    }
    ctx.aggregate("time reversal", worst, 1e-10, s);
    let secs = started.elapsed().as_secs_f64();
    ctx.push(VerificationReport::new("markov runtime (s)", 0.0, secs, Tolerance::abs(120.0), started));
    Ok(())
}

fn base_inversion(ctx: &mut Ctx) -> Result<()> {
    let started = Instant::now();
    let qs: Vec<f64> = match ctx.opts.q {
        Some(q) => vec![q.value()],
        None => vec![0.3, -0.3, 0.7, -0.7],
    };
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
    let mut worst = [0.0_f64; 4];
    for q in qs {
        if q == 0.0 {
            return Err(invalid("base inversion needs q != 0"));
        }
        let qi = 1.0 / q;
        for a in [0.37, -1.9, 2.5, -0.05] {
            for n in 0..=12 {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let b2 = binom2(n);
                let lhs = q_pochhammer(a, q, n);
                worst[0] = worst[0].max(rel(lhs, sign * q.powi(b2) * a.powi(n as i32) * q_pochhammer(1.0 / a, qi, n)));
                let inv = q_pochhammer(a, qi, n);
                worst[1] = worst[1].max(rel(inv, sign * q.powi(-b2) * a.powi(n as i32) * q_pochhammer(1.0 / a, q, n)));
                worst[2] = worst[2].max(rel(lhs, q_pochhammer(a * q.powi(n as i32 - 1), qi, n)));
            }
        }
        for n in 0..=12i64 {
            for k in 0..=n {
                let lhs = q_binomial(n, k, qi);
                worst[3] = worst[3].max(rel(lhs, q_binomial(n, k, q) * q.powi((k * (k - n)) as i32)));
            }
        }
    }
    let names = [
        "(a)_n vs (1/a; 1/q)_n form",
        "(a; 1/q)_n vs (1/a)_n form",
        "(a)_n vs (a q^(n-1); 1/q)_n",
        "q-binomial at 1/q",
    ];
    for (name, w) in names.iter().zip(worst) {
        ctx.aggregate(*name, w, 1e-12, started);
    }
    Ok(())
}
