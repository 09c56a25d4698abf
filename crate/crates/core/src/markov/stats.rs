use std::time::Instant;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::density::{density_rescaled, DensitySpec, RescaledDensity, TruncationConfig};
use crate::error::{Error, Result};
use crate::families::{rescaled_sequence, RescaledKind};
use crate::qkernel::{q_pochhammer, QBase};
use crate::verify::{integrate, QuadratureRule, Tolerance, VerificationReport};

use super::chain::{ChainConfig, ChainSample, TABLE_POINTS};
use super::table::build_inverse_cdf;

/// Mean and standard deviation of `sqrt(n) D_n` under the null (Kolmogorov distribution).
const KS_MEAN: f64 = 0.868_731_160_636_159_1;
const KS_SD: f64 = 0.260_332_871_462_412_9;
const SIGMAS: f64 = 4.0;
const BATCHES: usize = 100;
/// Bins per coordinate in the moment check, and the least occupancy accepted.
const BINS: usize = 4;
const MIN_BIN: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coord {
    Y,
    X,
    Z,
}

impl Coord {
    pub fn of(self, s: &ChainSample) -> f64 {
        match self {
            Coord::Y => s.y,
            Coord::X => s.x,
            Coord::Z => s.z,
        }
    }
}

/// `sup |F_n - F|` of the sample against `cdf`.
pub fn ks_statistic(values: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter().enumerate().fold(0.0_f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

/// Kolmogorov-Smirnov test of one coordinate against the q-Normal law;
/// `computed` is `sqrt(n) D_n`, passing below the null mean plus four
/// standard deviations.
pub fn marginal_ks_check(samples: &[ChainSample], coord: Coord, q: QBase) -> Result<VerificationReport> {
    let started = Instant::now();
    let values: Vec<f64> = samples.iter().map(|s| coord.of(s)).collect();
    let d = if q.is_one() {
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        ks_statistic(&values, |x| normal.cdf(x))
    } else {
        let table = build_inverse_cdf(&DensitySpec::Rescaled { kind: RescaledDensity::FN, q }, TABLE_POINTS)?;
        ks_statistic(&values, |x| table.cdf(x))
    };
    let stat = d * (values.len() as f64).sqrt();
    let name = format!("marginal KS {coord:?}");
    Ok(VerificationReport::new(name, 0.0, stat, Tolerance::abs(KS_MEAN + SIGMAS * KS_SD), started))
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Sample correlation against `target`, with a standard error from batch means.
pub fn correlation_check(samples: &[ChainSample], pair: (Coord, Coord), target: f64) -> Result<VerificationReport> {
    let started = Instant::now();
    if samples.len() < BATCHES * 10 {
        return Err(Error::InsufficientBins { bin: 0, count: samples.len(), needed: BATCHES * 10 });
    }
    let a: Vec<f64> = samples.iter().map(|s| pair.0.of(s)).collect();
    let b: Vec<f64> = samples.iter().map(|s| pair.1.of(s)).collect();
    let r = correlation(&a, &b);
    let size = samples.len() / BATCHES;
    let batch: Vec<f64> = (0..BATCHES).map(|k| correlation(&a[k * size..(k + 1) * size], &b[k * size..(k + 1) * size])).collect();
    let mean = batch.iter().sum::<f64>() / BATCHES as f64;
    let var = batch.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
    let se = (var / BATCHES as f64).sqrt();
    let name = format!("correlation {:?}{:?}", pair.0, pair.1);
    Ok(VerificationReport::new(name, target, r, Tolerance::abs(SIGMAS * se), started))
}

/// Running count, sum and sum of squares.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    sum: f64,
    sq: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.n += 1;
        self.sum += v;
        self.sq += v * v;
    }

    /// Mean in units of its standard error.
    fn z(&self) -> f64 {
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = ((self.sq - n * mean * mean) / (n - 1.0)).max(0.0);
        let se = (var / n).sqrt();
        if se == 0.0 {
            if mean.abs() < 1e-12 { 0.0 } else { f64::INFINITY }
        } else {
            mean / se
        }
    }
}

fn quantile_edges(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    (1..BINS).map(|k| v[k * v.len() / BINS]).collect()
}

fn bin_of(edges: &[f64], v: f64) -> usize {
    edges.partition_point(|&e| e <= v)
}

/// Conditional moments given both ends of the chain. For each sample the
/// residuals
/// `A_n(X|Y, rho1, Z, rho2) - [n = 0]`,
/// `P_n(X|Y, rho1) - rho2^n (rho1^2)_n / (t^2)_n P_n(Z|Y, t)` with `t = rho1 rho2`, and
/// `P_n(Y|X, rho1) - [n = 0]`
/// have conditional mean zero given `(Y, Z)`, the first two, and `(X, Z)`,
/// the last. Means are taken over a 4 x 4 grid of quantile bins in the
/// conditioning pair and over all samples; `computed` is the largest mean in
/// units of its standard error.
pub fn empirical_moment_check(samples: &[ChainSample], n: usize, cfg: &ChainConfig) -> Result<VerificationReport> {
    let started = Instant::now();
    cfg.validate()?;
    let q = cfg.q;
    let (r1, r2) = (cfg.rho1, cfg.rho2);
    let t = r1 * r2;
    let qv = q.value();
    let factor = r2.powi(n as i32) * q_pochhammer(r1 * r1, qv, n) / q_pochhammer(t * t, qv, n);
    let delta = if n == 0 { 1.0 } else { 0.0 };
    let ey = quantile_edges(samples.iter().map(|s| s.y).collect());
    let ez = quantile_edges(samples.iter().map(|s| s.z).collect());
    let ex = quantile_edges(samples.iter().map(|s| s.x).collect());
    let mut acc = vec![[Moments::default(); 3]; BINS * BINS + 1];
    for s in samples {
        let a = rescaled_sequence(RescaledKind::A, n, s.x, &[s.y, r1, s.z, r2], q)?[n];
        let px = rescaled_sequence(RescaledKind::P, n, s.x, &[s.y, r1], q)?[n];
        let pz = rescaled_sequence(RescaledKind::P, n, s.z, &[s.y, t], q)?[n];
        let py = rescaled_sequence(RescaledKind::P, n, s.y, &[s.x, r1], q)?[n];
        let res = [a - delta, px - factor * pz, py - delta];
        let by = bin_of(&ey, s.y) * BINS + bin_of(&ez, s.z);
        let bx = bin_of(&ex, s.x) * BINS + bin_of(&ez, s.z);
        for (k, r) in res.into_iter().enumerate() {
            acc[if k == 2 { bx } else { by }][k].push(r);
            acc[BINS * BINS][k].push(r);
        }
    }
    let mut worst = 0.0_f64;
    for (b, cell) in acc.iter().enumerate() {
        if let Some(m) = cell.iter().find(|m| m.n < MIN_BIN) {
            return Err(Error::InsufficientBins { bin: b, count: m.n, needed: MIN_BIN });
        }
        for m in cell {
            worst = worst.max(m.z().abs());
        }
    }
    let name = format!("empirical conditional moments n={n}");
    Ok(VerificationReport::new(name, 0.0, worst, Tolerance::abs(SIGMAS), started).with_seed(cfg.seed))
}

fn conditional(x: f64, y: f64, rho: f64, q: QBase, trunc: &TruncationConfig) -> Result<f64> {
    density_rescaled(RescaledDensity::FCn { y, rho }, x, q, trunc)
}

/// `|int f_CN(x|y, rho1) f_CN(y|z, rho2) dy - f_CN(x|z, rho1 rho2)|`.
pub fn chapman_kolmogorov_residual(x: f64, z: f64, rho1: f64, rho2: f64, q: QBase, rule: &QuadratureRule) -> Result<f64> {
    let trunc = TruncationConfig::default();
    let r = q.support_radius();
    let (lhs, _) = integrate(
        |y| Ok(conditional(x, y, rho1, q, &trunc)? * conditional(y, z, rho2, q, &trunc)?),
        -r,
        r,
        rule,
    )?;
    Ok((lhs - conditional(x, z, rho1 * rho2, q, &trunc)?).abs())
}

/// `|f_N(y) f_CN(x|y, t) - f_N(x) f_CN(y|x, t)|`.
pub fn time_reversal_residual(x: f64, y: f64, t: f64, q: QBase) -> Result<f64> {
    let trunc = TruncationConfig::default();
    let fnx = density_rescaled(RescaledDensity::FN, x, q, &trunc)?;
    let fny = density_rescaled(RescaledDensity::FN, y, q, &trunc)?;
    Ok((fny * conditional(x, y, t, q, &trunc)? - fnx * conditional(y, x, t, q, &trunc)?).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::sample_chain;
    use std::f64::consts::PI;

    fn cfg(q: f64, rho1: f64, rho2: f64, n: usize) -> ChainConfig {
        ChainConfig { q: QBase::new(q).unwrap(), rho1, rho2, n_samples: n, seed: 2024 }
    }

    #[test]
    fn kolmogorov_constants() {
        // Mean sqrt(pi/2) ln 2 and variance pi^2/12 - mean^2.
        let mean = (PI / 2.0).sqrt() * 2f64.ln();
        assert!((KS_MEAN - mean).abs() < 1e-12);
        assert!((KS_SD - (PI * PI / 12.0 - mean * mean).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ks_statistic_of_uniform_grid() {
        let v: Vec<f64> = (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect();
        assert!((ks_statistic(&v, |x| x) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn independent_chain() {
        let c = cfg(0.3, 0.0, 0.0, 100_000);
        let s = sample_chain(&c).unwrap();
        for pair in [(Coord::Y, Coord::X), (Coord::X, Coord::Z), (Coord::Y, Coord::Z)] {
            let r = correlation_check(&s, pair, 0.0).unwrap();
            assert!(r.passed && r.computed.abs() <= 4.0 / (s.len() as f64).sqrt(), "{r:?}");
        }
    }

    #[test]
    fn dependent_chain() {
        for q in [0.6, 1.0, -0.5] {
            let c = cfg(q, 0.4, 0.5, 200_000);
            let s = sample_chain(&c).unwrap();
            for coord in [Coord::Y, Coord::X, Coord::Z] {
                let r = marginal_ks_check(&s, coord, c.q).unwrap();
                assert!(r.passed, "q={q}: {r:?}");
            }
            let r = correlation_check(&s, (Coord::Y, Coord::Z), 0.2).unwrap();
            assert!(r.passed, "q={q}: {r:?}");
            for n in 0..=2 {
                let r = empirical_moment_check(&s, n, &c).unwrap();
                assert!(r.passed, "q={q}: {r:?}");
            }
        }
    }

    #[test]
    fn moment_check_detects_a_wrong_chain() {
        // Samples with rho2 = 0.5 checked as if rho2 were 0.1.
        let c = cfg(0.6, 0.4, 0.5, 200_000);
        let s = sample_chain(&c).unwrap();
        let r = empirical_moment_check(&s, 1, &ChainConfig { rho2: 0.1, ..c }).unwrap();
        assert!(!r.passed);
        let few = &s[..500];
        assert!(matches!(empirical_moment_check(few, 1, &c), Err(Error::InsufficientBins { .. })));
    }

    #[test]
    fn chapman_kolmogorov() {
        let rule = QuadratureRule::default();
        let q = QBase::new(0.5).unwrap();
        assert!(chapman_kolmogorov_residual(0.5, -0.3, 0.4, 0.6, q, &rule).unwrap() <= 1e-8);
        assert!(chapman_kolmogorov_residual(0.5, -0.3, 0.0, 0.6, q, &rule).unwrap() <= 1e-12);
        let q0 = QBase::new(0.0).unwrap();
        assert!(chapman_kolmogorov_residual(1.2, 0.7, -0.5, 0.8, q0, &rule).unwrap() <= 1e-9);
        let q1 = QBase::new(1.0).unwrap();
        assert!(chapman_kolmogorov_residual(1.2, 0.7, -0.5, 0.8, q1, &rule).unwrap() <= 1e-10);
    }

    #[test]
    fn reversibility() {
        for q in [-0.6, 0.0, 0.45, 0.9, 1.0] {
            let q = QBase::new(q).unwrap();
            for (x, y) in [(0.3, -1.1), (1.5, 0.2), (-0.4, -0.9)] {
                assert!(time_reversal_residual(x, y, 0.7, q).unwrap() <= 1e-10);
            }
        }
    }
}
