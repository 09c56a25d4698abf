use std::f64::consts::PI;

use serde::Serialize;

use crate::density::{DensitySpec, TruncationConfig};
use crate::error::{invalid, Error, Result};

// Two-point Gauss-Legendre on each grid interval.
const GL2: f64 = 0.577_350_269_189_625_8;

/// Inverse CDF of a density on a bounded support, tabulated at points
/// `x_i = mid - half cos(pi i / (N - 1))` and interpolated by monotone cubics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseCdfTable {
    pub spec: DensitySpec,
    /// `(x, cdf)`, strictly increasing in both coordinates, from `(lo, 0)` to `(hi, 1)`.
    pub grid: Vec<(f64, f64)>,
    #[serde(skip)]
    xs: Vec<f64>,
    #[serde(skip)]
    cs: Vec<f64>,
    /// Slopes `dx/dF` and `dF/dx` at the knots.
    #[serde(skip)]
    quantile_slopes: Vec<f64>,
    #[serde(skip)]
    cdf_slopes: Vec<f64>,
}

/// Fritsch-Carlson slopes for monotone data.
fn pchip_slopes(t: &[f64], v: &[f64]) -> Vec<f64> {
    let n = t.len();
    let h: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (v[k + 1] - v[k]) / h[k]).collect();
    let mut d = vec![0.0; n];
    d[0] = delta[0];
    d[n - 1] = delta[n - 2];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    d
}

fn hermite(t: &[f64], v: &[f64], d: &[f64], s: f64) -> f64 {
    let k = match t.partition_point(|&ti| ti <= s) {
        0 => 0,
        i => (i - 1).min(t.len() - 2),
    };
    let h = t[k + 1] - t[k];
    let u = ((s - t[k]) / h).clamp(0.0, 1.0);
    let (u2, u3) = (u * u, u * u * u);
    let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    let h10 = u3 - 2.0 * u2 + u;
    let h01 = -2.0 * u3 + 3.0 * u2;
    let h11 = u3 - u2;
    h00 * v[k] + h10 * h * d[k] + h01 * v[k + 1] + h11 * h * d[k + 1]
}

/// Tabulates the CDF of `spec` on `grid_points` knots. Interval masses come
/// from two-point Gauss-Legendre in the angle variable, which is exact to
/// high order because the angle form of the integrand is smooth.
pub fn build_inverse_cdf(spec: &DensitySpec, grid_points: usize) -> Result<InverseCdfTable> {
    if grid_points < 3 {
        return Err(invalid(format!("inverse CDF table needs at least 3 points, got {grid_points}")));
    }
    let (lo, hi) = spec.support();
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(invalid("inverse CDF tables need a bounded support"));
    }
    let trunc = TruncationConfig::default();
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let step = PI / (grid_points - 1) as f64;
    let g = |theta: f64| -> Result<f64> { Ok(spec.eval(mid - half * theta.cos(), &trunc)? * half * theta.sin()) };
    let mut cdf = Vec::with_capacity(grid_points);
    cdf.push(0.0);
    let mut acc = 0.0;
    for i in 0..grid_points - 1 {
        let c = (i as f64 + 0.5) * step;
        let r = 0.5 * step * GL2;
        let mass = 0.5 * step * (g(c - r)? + g(c + r)?);
        if !(mass > 0.0) {
            return Err(Error::NonMonotoneCdf { index: i + 1 });
        }
        acc += mass;
        cdf.push(acc);
    }
    for v in cdf.iter_mut() {
        *v /= acc;
    }
    *cdf.last_mut().unwrap() = 1.0;
    let xs: Vec<f64> = (0..grid_points)
        .map(|i| match i {
            0 => lo,
            _ if i == grid_points - 1 => hi,
            _ => mid - half * (i as f64 * step).cos(),
        })
        .collect();
    // Far in the tails of a sharply concentrated density the increments fall
    // below rounding of values near 1; such knots carry no probability and go.
    let mut keep: Vec<usize> = vec![0];
    for i in 1..grid_points {
        if cdf[i] > cdf[*keep.last().unwrap()] {
            keep.push(i);
        }
    }
    if *keep.last().unwrap() != grid_points - 1 {
        *keep.last_mut().unwrap() = grid_points - 1;
    }
    if keep.len() < 3 {
        return Err(Error::NonMonotoneCdf { index: keep.len() });
    }
    let xs: Vec<f64> = keep.iter().map(|&i| xs[i]).collect();
    let cdf: Vec<f64> = keep.iter().map(|&i| cdf[i]).collect();
    let quantile_slopes = pchip_slopes(&cdf, &xs);
    let cdf_slopes = pchip_slopes(&xs, &cdf);
    Ok(InverseCdfTable {
        spec: *spec,
        grid: xs.iter().copied().zip(cdf.iter().copied()).collect(),
        xs,
        cs: cdf,
        quantile_slopes,
        cdf_slopes,
    })
}

impl InverseCdfTable {
    /// `x` with `cdf(x) = u`, for `u` in `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        hermite(&self.cs, &self.xs, &self.quantile_slopes, u.clamp(0.0, 1.0))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return 0.0;
        }
        if x >= self.xs[n - 1] {
            return 1.0;
        }
        hermite(&self.xs, &self.cs, &self.cdf_slopes, x).clamp(0.0, 1.0)
    }
}
