use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureKind {
    /// Gauss-Legendre directly in `x`.
    GaussLegendre,
    /// Gauss-Legendre in `theta` after `x = mid - half cos(theta)`, which
    /// removes square-root behaviour at both endpoints.
    CosineSubstitution,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub nodes: usize,
    /// Maximum bisection depth of any panel.
    pub adaptive_splits: usize,
    pub abs_tol: f64,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self { kind: QuadratureKind::CosineSubstitution, nodes: 128, adaptive_splits: 12, abs_tol: 1e-12 }
    }
}

impl QuadratureRule {
    pub fn gauss_legendre() -> Self {
        Self { kind: QuadratureKind::GaussLegendre, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(invalid(format!("quadrature needs at least 2 nodes, got {}", self.nodes)));
        }
        if !(self.abs_tol > 0.0) {
            return Err(invalid("abs_tol must be positive"));
        }
        Ok(())
    }
}

struct GlNodes {
    x: Vec<f64>,
    w: Vec<f64>,
}

/// Legendre `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn compute_nodes(n: usize) -> GlNodes {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut r = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, r);
            let step = p / dp;
            r -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, r);
        let wi = 2.0 / ((1.0 - r * r) * dp * dp);
        x[i] = -r;
        x[n - 1 - i] = r;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    GlNodes { x, w }
}

fn nodes(n: usize) -> Arc<GlNodes> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GlNodes>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
    map.entry(n).or_insert_with(|| Arc::new(compute_nodes(n))).clone()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let gl = nodes(n);
    (gl.x.clone(), gl.w.clone())
}

/// `x(t)` and `dx/dt` taking the integration variable to the original one.
type Map = Box<dyn Fn(f64) -> (f64, f64)>;

fn variable_map(lo: f64, hi: f64, kind: QuadratureKind) -> (Map, f64, f64) {
    // Infinite ends go through x = u / (1 - u^2) first.
    let outer: Box<dyn Fn(f64) -> (f64, f64)> = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => Box::new(|u| (u, 1.0)),
        _ => Box::new(|u: f64| {
            let d = 1.0 - u * u;
            (u / d, (1.0 + u * u) / (d * d))
        }),
    };
    let (a, b) = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => (lo, hi),
        (false, false) => (-1.0, 1.0),
        (true, false) => (lo / (0.5 + (0.25 + lo * lo).sqrt()), 1.0),
        (false, true) => (-1.0, hi / (0.5 + (0.25 + hi * hi).sqrt())),
    };
    match kind {
        QuadratureKind::GaussLegendre => (outer, a, b),
        QuadratureKind::CosineSubstitution => {
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            let map = Box::new(move |t: f64| {
                let u = mid - half * t.cos();
                let (x, dx) = outer(u);
                (x, dx * half * t.sin())
            });
            (map, 0.0, PI)
        }
    }
}

/// Integrates `dim` functions at once; `f(x, out)` writes their values.
/// Returns the integrals and an error estimate (the maximum over components).
pub fn integrate_many<F>(mut f: F, dim: usize, lo: f64, hi: f64, rule: &QuadratureRule) -> Result<(Vec<f64>, f64)>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    rule.validate()?;
    if lo.is_nan() || hi.is_nan() || !(lo < hi) {
        return Err(invalid(format!("bad integration range [{lo}, {hi}]")));
    }
    let gl = nodes(rule.nodes);
    let (map, ta, tb) = variable_map(lo, hi, rule.kind);
    let mut vals = vec![0.0; dim];

    // Sums of g and |g| over one panel.
    let mut panel = |a: f64, b: f64| -> Result<(Vec<f64>, Vec<f64>)> {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut sum = vec![0.0; dim];
        let mut abs = vec![0.0; dim];
        for (&xi, &wi) in gl.x.iter().zip(&gl.w) {
            let (x, jac) = map(mid + half * xi);
            if jac == 0.0 || !x.is_finite() {
                continue;
            }
            f(x, &mut vals)?;
            for k in 0..dim {
                let v = vals[k] * jac * wi * half;
                if !v.is_finite() {
                    return Err(invalid(format!("integrand not finite at x = {x}")));
                }
                sum[k] += v;
                abs[k] += v.abs();
            }
        }
        Ok((sum, abs))
    };

    let width = tb - ta;
    let mut total = vec![0.0; dim];
    let mut err_total = 0.0_f64;
    let mut exhausted = false;
    let (whole, _) = panel(ta, tb)?;
    let mut stack = vec![(ta, tb, 0usize, whole)];
    while let Some((a, b, depth, whole)) = stack.pop() {
        let m = 0.5 * (a + b);
        let (left, labs) = panel(a, m)?;
        let (right, rabs) = panel(m, b)?;
        let mut err = 0.0_f64;
        let mut floor = 0.0_f64;
        for k in 0..dim {
            err = err.max((left[k] + right[k] - whole[k]).abs());
            floor = floor.max(64.0 * f64::EPSILON * (labs[k] + rabs[k]));
        }
        let local = (rule.abs_tol * (b - a) / width).max(floor);
        if err <= local || depth >= rule.adaptive_splits {
            if err > local {
                exhausted = true;
            }
            for k in 0..dim {
                total[k] += left[k] + right[k];
            }
            err_total += err;
        } else {
            stack.push((a, m, depth + 1, left));
            stack.push((m, b, depth + 1, right));
        }
    }
    if exhausted && err_total > rule.abs_tol {
        return Err(Error::Quadrature { tol: rule.abs_tol, splits: rule.adaptive_splits, err_est: err_total });
    }
    Ok((total, err_total))
}

/// `int_lo^hi f`, either end possibly infinite. Returns `(value, err_est)`.
pub fn integrate<F>(mut f: F, lo: f64, hi: f64, rule: &QuadratureRule) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (v, err) = integrate_many(
        |x, out| {
            out[0] = f(x)?;
            Ok(())
        },
        1,
        lo,
        hi,
        rule,
    )?;
    Ok((v[0], err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{f_h_density, TruncationConfig};
    use crate::qkernel::QBase;

    #[test]
    fn nodes_and_weights() {
        let (x, w) = gauss_legendre_nodes(5);
        // Five-point rule: nodes 0, +-sqrt(5 -+ 2 sqrt(10/7))/3.
        let inner = (5.0 - 2.0 * (10.0_f64 / 7.0).sqrt()).sqrt() / 3.0;
        assert!(x[2].abs() < 1e-16);
        assert!((x[3] - inner).abs() < 1e-15);
        assert!((w[2] - 128.0 / 225.0).abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn semicircle() {
        for rule in [QuadratureRule::default(), QuadratureRule::gauss_legendre()] {
            let (v, _) = integrate(|x| Ok((1.0 - x * x).sqrt()), -1.0, 1.0, &rule).unwrap();
            assert!((v - PI / 2.0).abs() < 1e-11, "{rule:?}: {v}");
        }
    }

    #[test]
    fn polynomial_exactness() {
        let rule = QuadratureRule::gauss_legendre();
        for k in 0..2 * rule.nodes {
            let (v, _) = integrate(|x| Ok(x.powi(k as i32)), -1.0, 1.0, &rule).unwrap();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((v - exact).abs() <= 1e-14 * exact.max(0.1), "k = {k}: {v}");
        }
    }

    #[test]
    fn f_h_integrates_to_one() {
        let q = QBase::new(0.5).unwrap();
        let t = TruncationConfig::default();
        for rule in [QuadratureRule::default(), QuadratureRule::gauss_legendre()] {
            let (v, err) = integrate(|x| f_h_density(x, q, &t), -1.0, 1.0, &rule).unwrap();
            assert!((v - 1.0).abs() < 1e-10 && err < 1e-10, "{v} {err}");
        }
    }

    #[test]
    fn infinite_range() {
        let g = |x: f64| Ok((-x * x / 2.0).exp() / (2.0 * PI).sqrt());
        for rule in [QuadratureRule::default(), QuadratureRule::gauss_legendre()] {
            let (v, _) = integrate(g, f64::NEG_INFINITY, f64::INFINITY, &rule).unwrap();
            assert!((v - 1.0).abs() < 1e-12);
            let (v, _) = integrate(g, 0.0, f64::INFINITY, &rule).unwrap();
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn substitution_agrees_with_plain_rule() {
        let q = QBase::new(-0.4).unwrap();
        let t = TruncationConfig::default();
        let f = |x: f64| Ok(x.powi(3) * f_h_density(x, q, &t)? + f_h_density(x, q, &t)? * (2.0 * x).cos());
        let (a, ea) = integrate(f, -1.0, 1.0, &QuadratureRule::default()).unwrap();
        // Without the substitution the endpoint behaviour limits the attainable error.
        let plain = QuadratureRule { abs_tol: 1e-10, ..QuadratureRule::gauss_legendre() };
        let (b, eb) = integrate(f, -1.0, 1.0, &plain).unwrap();
        assert!((a - b).abs() <= ea + eb + 1e-12);
    }

    #[test]
    fn failure_is_reported() {
        let rule = QuadratureRule { adaptive_splits: 2, nodes: 4, ..QuadratureRule::gauss_legendre() };
        let r = integrate(|x| Ok(1.0 / x.abs().sqrt()), -1.0, 1.0, &rule);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
        assert!(QuadratureRule { nodes: 1, ..rule }.validate().is_err());
    }
}
