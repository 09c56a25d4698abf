//! Closed-form connection coefficients.

use num_complex::Complex64;

use crate::connect::matrix::{ConnectionMatrix, Direction};
use crate::error::{invalid, Error, Result};
use crate::families::scheme::{b_sequence, g_shifted, h_sequence, p_sequence_raw};
use crate::families::{Family, SchemeParams};
use crate::qkernel::{binom2, q_binomial, q_pochhammer, QBase, Scalar};

const DEGENERATE: f64 = 1e-14;
const REAL_TOL: f64 = 1e-10;

/// `c q^e` for a possibly negative exponent.
fn shift(c: f64, q: f64, e: i64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * q.powi(e as i32)
    }
}

/// Denominator `(c q^e; q)_len`, rejecting vanishing factors. An empty
/// product is 1 even where `q^e` itself is undefined.
pub(crate) fn den_poch(c: f64, q: f64, e: i64, len: usize, context: &'static str) -> Result<f64> {
    if len == 0 {
        return Ok(1.0);
    }
    let mut term = shift(c, q, e);
    let mut prod = 1.0;
    for _ in 0..len {
        let f = 1.0 - term;
        if f.abs() < DEGENERATE {
            return Err(Error::DegenerateDenominator { context, factor: f });
        }
        prod *= f;
        term *= q;
    }
    Ok(prod)
}

/// Numerator `(c q^e; q)_len` with the same empty-product convention.
pub(crate) fn num_poch<T: Scalar>(c: T, q: f64, e: i64, len: usize) -> T {
    if len == 0 || c.modulus() == 0.0 {
        return T::one();
    }
    q_pochhammer(c * T::from(q.powi(e as i32)), q, len)
}

fn qb(n: usize, k: usize, q: f64) -> f64 {
    q_binomial(n as i64, k as i64, q)
}

fn real_part(v: Complex64, context: &'static str) -> Result<f64> {
    if v.im.abs() > REAL_TOL * v.norm().max(1.0) {
        return Err(Error::NonReal { context, imag: v.im });
    }
    Ok(v.re)
}

struct Quad {
    a: Complex64,
    b: Complex64,
    bc: Complex64,
    bd: Complex64,
    cd: Complex64,
    s: f64,
    q: f64,
}

impl Quad {
    fn of(p: &SchemeParams) -> Self {
        let [a, b, c, d] = p.quad_values();
        Quad {
            a,
            b,
            bc: b * c,
            bd: b * d,
            cd: c * d,
            s: p.abcd(),
            q: p.q().value(),
        }
    }
}

/// Askey-Wilson against continuous dual Hahn `(b, c, d)`.
pub fn connection_aw_c2h(n_max: usize, p: &SchemeParams, direction: Direction) -> Result<ConnectionMatrix> {
    let v = Quad::of(p);
    let q = v.q;
    let ctx = "connection aw/c2h";
    let tail = |i: usize, r: usize| num_poch(v.bc, q, i as i64, r) * num_poch(v.bd, q, i as i64, r) * num_poch(v.cd, q, i as i64, r);
    match direction {
        Direction::Forward => ConnectionMatrix::build(Family::Aw, Family::C2h, n_max, *p, |i, n| {
            let r = n - i;
            let den = den_poch(v.s, q, (n + i) as i64 - 1, r, ctx)?;
            let c = (-v.a).powu(r as u32) * tail(i, r) * (qb(n, i, q) * q.powi(binom2(r)) / den);
            real_part(c, ctx)
        }),
        Direction::Inverse => ConnectionMatrix::build(Family::C2h, Family::Aw, n_max, *p, |i, n| {
            let r = n - i;
            let den = den_poch(v.s, q, 2 * i as i64, r, ctx)?;
            real_part(v.a.powu(r as u32) * tail(i, r) * (qb(n, i, q) / den), ctx)
        }),
    }
}

/// The two printed forms of the Askey-Wilson to Al-Salam-Chihara coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AwAscForm {
    /// Inner sum in powers `a^m b^{n-k-m}`, as stated.
    Stated,
    /// Inner sum in powers `a^{n-k-m} b^m`, as it appears inside the proof.
    Intermediate,
}

fn aw_asc_entry(v: &Quad, k: usize, n: usize, form: AwAscForm) -> Result<f64> {
    let ctx = "connection aw/asc";
    let q = v.q;
    let r = n - k;
    let mut inner = Complex64::new(0.0, 0.0);
    for m in 0..=r {
        let w = qb(r, m, q) * q.powi(binom2(r - m) + binom2(m));
        let term = match form {
            AwAscForm::Stated => {
                let e = (n - m) as i64;
                let num = num_poch(v.bc, q, e, m) * num_poch(v.bd, q, e, m);
                let den = den_poch(v.s, q, (2 * n - m) as i64 - 1, m, ctx)?;
                v.a.powu(m as u32) * v.b.powu((r - m) as u32) * num * (w / den)
            }
            AwAscForm::Intermediate => {
                let e = (k + m) as i64;
                let num = num_poch(v.bc, q, e, r - m) * num_poch(v.bd, q, e, r - m);
                let den = den_poch(v.s, q, (n + k + m) as i64 - 1, r - m, ctx)?;
                v.a.powu((r - m) as u32) * v.b.powu(m as u32) * num * (w / den)
            }
        };
        inner += term;
    }
    let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
    real_part(inner * num_poch(v.cd, q, k as i64, r) * (sign * qb(n, k, q)), ctx)
}

/// Askey-Wilson against Al-Salam-Chihara `(c, d)`.
pub fn connection_aw_asc(n_max: usize, p: &SchemeParams, direction: Direction) -> Result<ConnectionMatrix> {
    connection_aw_asc_form(n_max, p, direction, AwAscForm::Stated)
}

/// As [`connection_aw_asc`], choosing the form of the forward coefficients.
pub fn connection_aw_asc_form(n_max: usize, p: &SchemeParams, direction: Direction, form: AwAscForm) -> Result<ConnectionMatrix> {
    let v = Quad::of(p);
    let q = v.q;
    match direction {
        Direction::Forward => ConnectionMatrix::build(Family::Aw, Family::Asc, n_max, *p, |k, n| aw_asc_entry(&v, k, n, form)),
        Direction::Inverse => ConnectionMatrix::build(Family::Asc, Family::Aw, n_max, *p, |j, n| {
            let ctx = "connection asc/aw";
            let r = n - j;
            let mut inner = Complex64::new(0.0, 0.0);
            for m in 0..=r {
                let num = num_poch(v.bc, q, j as i64, m) * num_poch(v.bd, q, j as i64, m);
                let den = den_poch(v.s, q, 2 * j as i64, m, ctx)?;
                inner += v.b.powu((r - m) as u32) * v.a.powu(m as u32) * num * (qb(r, m, q) / den);
            }
            real_part(inner * num_poch(v.cd, q, j as i64, r) * qb(n, j, q), ctx)
        }),
    }
}

/// `w_n(x|y, rho1, z, rho2)` against `p_j(x|y, rho1)`.
pub fn connection_w_p(n_max: usize, p: &SchemeParams, direction: Direction) -> Result<ConnectionMatrix> {
    let SchemeParams::Conjugate { y, rho1, z, rho2, q } = p.to_conjugate()? else {
        unreachable!("to_conjugate returns the conjugate form")
    };
    let qv = q.value();
    let t = rho1 * rho2;
    let ctx = "connection w/p";
    let front = |j: usize, n: usize| qb(n, j, qv) * rho2.powi((n - j) as i32) * num_poch(rho1 * rho1, qv, j as i64, n - j);
    match direction {
        Direction::Forward => ConnectionMatrix::build(Family::W, Family::P, n_max, *p, |j, n| {
            let r = n - j;
            if r == 0 {
                return Ok(1.0);
            }
            let den = den_poch(t * t, qv, (n + j) as i64 - 1, r, ctx)?;
            Ok(front(j, n) / den * g_shifted(r, z, y, t, n as i64 - 1, qv))
        }),
        Direction::Inverse => ConnectionMatrix::build(Family::P, Family::W, n_max, *p, |j, n| {
            let r = n - j;
            let den = den_poch(t * t, qv, 2 * j as i64, r, ctx)?;
            let pr = p_sequence_raw(r, z, y, t * qv.powi(j as i32), qv)[r];
            Ok(front(j, n) / den * pr)
        }),
    }
}

/// q-Hermite against `p_j(x|y, rho)`. Forward expands `h_n` in the `p_j`.
pub fn connection_h_p(n_max: usize, y: f64, rho: f64, q: QBase, direction: Direction) -> Result<ConnectionMatrix> {
    if !(rho.abs() <= 1.0) {
        return Err(invalid(format!("rho = {rho} outside [-1, 1]")));
    }
    let params = SchemeParams::conjugate_in(y, rho, 0.0, 0.0, q)?;
    let qv = q.value();
    match direction {
        Direction::Forward => {
            let h = h_sequence(n_max, y, qv);
            ConnectionMatrix::build(Family::Qh, Family::P, n_max, params, |j, n| {
                Ok(qb(n, j, qv) * rho.powi((n - j) as i32) * h[n - j])
            })
        }
        Direction::Inverse => {
            let b = b_sequence(n_max, y, qv);
            ConnectionMatrix::build(Family::P, Family::Qh, n_max, params, |j, n| {
                Ok(qb(n, j, qv) * rho.powi((n - j) as i32) * b[n - j])
            })
        }
    }
}
