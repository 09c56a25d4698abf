//! Finite identities whose left-hand sums vanish, and the two sides of the
//! conversion formula behind the expansion of `w_n` in `p_j`.

use num_complex::{Complex, Complex64};
use twofloat::TwoFloat;
use serde::{Deserialize, Serialize};

use crate::connect::formulas::den_poch;
use crate::error::{invalid, Result};
use crate::families::scheme::{b_sequence, g_sequence, g_shifted, h_sequence, p_sequence_raw};
use crate::qkernel::{q_binomial, QBase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityKind {
    /// `sum_j [n-k j] p_j(z|y,tq^k)/(t^2q^{2k})_j g_{n-k-j}(z|y,tq^{n-1})/(t^2q^{n+j+k-1})_{n-k-j}`.
    CorollaryI,
    /// `sum_m [n-k m] p_{n-k-m}(z|y,tq^{m+k}) g_m(z|y,tq^{m+k-1}) / ((t^2q^{2m+2k})_{n-k-m} (t^2q^{m+2k-1})_m)`.
    CorollaryII,
    /// `sum_j [n j] p_j(z|y,t) g_{n-j}(z|y,t)`.
    OdwrIv,
    /// `sum_j [n j] h_j(z) b_{n-j}(z)`.
    BConvolution,
}

/// A sum that should vanish together with the size of its largest term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub sum: f64,
    pub max_term: f64,
}

impl Residual {
    fn of(terms: impl IntoIterator<Item = f64>) -> Self {
        let (mut sum, mut max_term) = (0.0, 0.0_f64);
        for t in terms {
            sum += t;
            max_term = max_term.max(t.abs());
        }
        Residual { sum, max_term }
    }

    /// `|sum|` relative to the largest term (absolute when all terms are tiny).
    pub fn relative(&self) -> f64 {
        self.sum.abs() / self.max_term.max(1.0)
    }
}

fn qb(n: usize, k: usize, q: f64) -> f64 {
    q_binomial(n as i64, k as i64, q)
}

/// Left-hand sum of the named identity. `k` is only used by the two
/// corollary forms, which need `0 <= k < n`; the other two need `n >= 1`.
pub fn identity_residual(kind: IdentityKind, n: usize, k: usize, z: f64, y: f64, t: f64, q: QBase) -> Result<Residual> {
    let qv = q.value();
    let ctx = "identity residual";
    let t2 = t * t;
    match kind {
        IdentityKind::CorollaryI | IdentityKind::CorollaryII if k >= n => {
            Err(invalid(format!("need 0 <= k < n, got k = {k}, n = {n}")))
        }
        IdentityKind::OdwrIv | IdentityKind::BConvolution if n == 0 => Err(invalid("the sum is 1 at n = 0")),
        IdentityKind::CorollaryI => {
            let r = n - k;
            let p = p_sequence_raw(r, z, y, t * qv.powi(k as i32), qv);
            let g = g_sequence(r, z, y, t * qv.powi(n as i32 - 1), qv);
            let mut terms = Vec::with_capacity(r + 1);
            for j in 0..=r {
                let d1 = den_poch(t2, qv, 2 * k as i64, j, ctx)?;
                let d2 = den_poch(t2, qv, (n + j + k) as i64 - 1, r - j, ctx)?;
                terms.push(qb(r, j, qv) * p[j] / d1 * g[r - j] / d2);
            }
            Ok(Residual::of(terms))
        }
        IdentityKind::CorollaryII => {
            let r = n - k;
            let mut terms = Vec::with_capacity(r + 1);
            for m in 0..=r {
                let pm = p_sequence_raw(r - m, z, y, t * qv.powi((m + k) as i32), qv)[r - m];
                let gm = g_shifted(m, z, y, t, (m + k) as i64 - 1, qv);
                let d1 = den_poch(t2, qv, 2 * (m + k) as i64, r - m, ctx)?;
                let d2 = den_poch(t2, qv, (m + 2 * k) as i64 - 1, m, ctx)?;
                terms.push(qb(r, m, qv) * pm * gm / (d1 * d2));
            }
            Ok(Residual::of(terms))
        }
        IdentityKind::OdwrIv => {
            let p = p_sequence_raw(n, z, y, t, qv);
            let g = g_sequence(n, z, y, t, qv);
            Ok(Residual::of((0..=n).map(|j| qb(n, j, qv) * p[j] * g[n - j])))
        }
        IdentityKind::BConvolution => {
            let h = h_sequence(n, z, qv);
            let b = b_sequence(n, z, qv);
            Ok(Residual::of((0..=n).map(|j| qb(n, j, qv) * h[j] * b[n - j])))
        }
    }
}

type Dd = TwoFloat;
type CDd = Complex<TwoFloat>;

fn dd(v: f64) -> Dd {
    TwoFloat::from(v)
}

/// `1 / x` refined by one Newton step; the crate's own division stops at
/// `f64` accuracy.
fn dd_recip(x: Dd) -> Dd {
    let r = dd(1.0 / x.hi());
    r + r * (dd(1.0) - x * r)
}

fn dd_poch(a: CDd, q: Dd, n: usize) -> CDd {
    let mut acc = CDd::new(dd(1.0), dd(0.0));
    let mut qk = dd(1.0);
    for _ in 0..n {
        acc = acc * (CDd::new(dd(1.0), dd(0.0)) - a * qk);
        qk = qk * q;
    }
    acc
}

/// Rows of Gaussian binomials up to `n` by the q-Pascal rule.
fn dd_binomials(n: usize, q: Dd) -> Vec<Vec<Dd>> {
    let mut rows = vec![vec![dd(1.0)]];
    for r in 1..=n {
        let prev = &rows[r - 1];
        let mut row = vec![dd(1.0); r + 1];
        let mut qk = q;
        for k in 1..r {
            row[k] = prev[k - 1] + qk * prev[k];
            qk = qk * q;
        }
        rows.push(row);
    }
    rows
}

/// Unit complex number with real part exactly `c`.
fn dd_unit(c: f64, sin_sign: f64) -> CDd {
    let s = (dd(1.0) - dd(c) * dd(c)).sqrt();
    CDd::new(dd(c), if sin_sign < 0.0 { -s } else { s })
}

fn dd_upow(w: CDd, k: i64) -> CDd {
    let base = if k < 0 { w.conj() } else { w };
    (0..k.unsigned_abs()).fold(CDd::new(dd(1.0), dd(0.0)), |acc, _| acc * base)
}

/// Both sides in double-double arithmetic. The angles enter only through
/// `y = cos theta` and `z = cos eta` as rounded to `f64`, which are then
/// treated as exact on both sides.
fn conversion_dd(n: usize, m: usize, theta: f64, eta: f64, t: f64, q: QBase) -> Result<(CDd, Dd)> {
    if !(t.abs() < 1.0) {
        return Err(invalid(format!("conversion needs |t| < 1, got {t}")));
    }
    let (y, z) = (theta.cos(), eta.cos());
    let (qv, td) = (dd(q.value()), dd(t));
    let (a, b) = (dd_unit(y, theta.sin()), dd_unit(z, eta.sin()));
    let (u, v, w) = (b * a.conj() * td, a * b.conj() * td, (a * b).conj() * td);
    let binom = dd_binomials(n + m, qv);
    let t2 = td * td;
    let den: Vec<Dd> = (0..=n + m).map(|k| dd_recip(dd_poch(CDd::new(t2, dd(0.0)), qv, k).re)).collect();
    let mut lhs = CDd::new(dd(0.0), dd(0.0));
    for k in 0..=n {
        for j in 0..=m {
            let num = dd_poch(u, qv, k) * dd_poch(v, qv, j) * dd_poch(w, qv, k + j);
            let phase = dd_upow(a, 2 * k as i64 - n as i64) * dd_upow(b, 2 * j as i64 - m as i64);
            lhs = lhs + num * phase * (binom[n][k] * binom[m][j] * den[k + j]);
        }
    }
    let (yd, zd) = (dd(y), dd(z));
    let mut h = vec![dd(1.0), dd(2.0) * zd];
    let mut p = vec![dd(1.0), dd(2.0) * (yd - td * zd)];
    let mut qk = dd(1.0);
    for k in 1..n + m {
        let qprev = qk;
        qk = qk * qv;
        let next_h = dd(2.0) * zd * h[k] - (dd(1.0) - qk) * h[k - 1];
        h.push(next_h);
        let next_p = dd(2.0) * (yd - td * zd * qk) * p[k] - (dd(1.0) - qk) * (dd(1.0) - t2 * qprev) * p[k - 1];
        p.push(next_p);
    }
    let mut rhs = dd(0.0);
    let mut sign_pow = dd(1.0);
    let mut qpow = dd(1.0);
    for l in 0..=m {
        if l > 0 {
            sign_pow = -sign_pow * td;
            qpow = qpow * qv.powi(l as i32 - 1);
        }
        rhs += binom[m][l] * sign_pow * qpow * h[m - l] * p[n + l] * den[n + l];
    }
    Ok((lhs, rhs))
}

/// Both sides of the conversion formula at `y = cos theta`, `z = cos eta`,
/// evaluated in extended precision and rounded.
pub fn conversion_sides(n: usize, m: usize, theta: f64, eta: f64, t: f64, q: QBase) -> Result<(Complex64, Complex64)> {
    let (lhs, rhs) = conversion_dd(n, m, theta, eta, t, q)?;
    Ok((Complex64::new(lhs.re.into(), lhs.im.into()), Complex64::new(rhs.into(), 0.0)))
}

/// `|lhs - rhs|` and `|Im lhs|` of the conversion formula, taken before
/// rounding so that large sides do not hide the agreement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConversionResidual {
    pub diff: f64,
    pub imag: f64,
    /// `|lhs|`, for scale.
    pub magnitude: f64,
}

pub fn conversion_residual(n: usize, m: usize, theta: f64, eta: f64, t: f64, q: QBase) -> Result<ConversionResidual> {
    let (lhs, rhs) = conversion_dd(n, m, theta, eta, t, q)?;
    let d = CDd::new(lhs.re - rhs, lhs.im);
    let diff: f64 = (d.re * d.re + d.im * d.im).sqrt().into();
    let magnitude: f64 = (lhs.re * lhs.re + lhs.im * lhs.im).sqrt().into();
    Ok(ConversionResidual { diff, imag: f64::from(lhs.im).abs(), magnitude })
}
