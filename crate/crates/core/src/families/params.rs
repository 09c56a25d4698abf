use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::qkernel::QBase;

const REAL_TOL: f64 = 1e-12;

/// Members of the scheme plus the two conjugate-parameter families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Askey-Wilson, all four parameters.
    Aw,
    /// Continuous dual Hahn, parameters (b, c, d).
    C2h,
    /// Al-Salam-Chihara, parameters (c, d).
    Asc,
    /// Continuous big q-Hermite, parameter d.
    Bqh,
    /// Continuous q-Hermite, no parameters.
    Qh,
    /// Askey-Wilson in conjugate form, `w_n(x|y, rho1, z, rho2)`.
    W,
    /// Al-Salam-Chihara in conjugate form, `p_n(x|y, rho1)`.
    P,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Aw => "aw",
            Family::C2h => "c2h",
            Family::Asc => "asc",
            Family::Bqh => "bqh",
            Family::Qh => "qh",
            Family::W => "w",
            Family::P => "p",
        }
    }

    /// How many of the leading parameters `a, b, c, d` are forced to zero.
    pub fn zeroed(self) -> usize {
        match self {
            Family::Aw | Family::W => 0,
            Family::C2h => 1,
            Family::Asc => 2,
            Family::Bqh => 3,
            Family::Qh => 4,
            Family::P => 2,
        }
    }
}

/// Parameters of the scheme: either a quadruple `(a, b, c, d)` or two
/// complex-conjugate pairs `a, b = rho1 e^{+-i theta}`, `c, d = rho2 e^{+-i eta}`
/// with `y = cos theta`, `z = cos eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum SchemeParams {
    Quad {
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
        q: QBase,
    },
    Conjugate {
        y: f64,
        rho1: f64,
        z: f64,
        rho2: f64,
        q: QBase,
    },
}

impl SchemeParams {
    /// Real quadruple.
    pub fn real(a: f64, b: f64, c: f64, d: f64, q: f64) -> Result<Self> {
        let c64 = |v: f64| Complex64::new(v, 0.0);
        Self::quad(c64(a), c64(b), c64(c), c64(d), QBase::new(q)?)
    }

    /// General quadruple. Parameters must be real or come in conjugate pairs,
    /// and every pairwise product must have modulus at most one.
    pub fn quad(a: Complex64, b: Complex64, c: Complex64, d: Complex64, q: QBase) -> Result<Self> {
        let vals = [a, b, c, d];
        if vals.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(invalid("non-finite parameter"));
        }
        let mut used = [false; 4];
        for i in 0..4 {
            if used[i] || vals[i].im.abs() <= REAL_TOL * vals[i].norm().max(1.0) {
                continue;
            }
            let partner = (i + 1..4).find(|&j| !used[j] && (vals[j] - vals[i].conj()).norm() <= REAL_TOL * vals[i].norm().max(1.0));
            match partner {
                Some(j) => {
                    used[i] = true;
                    used[j] = true;
                }
                None => return Err(invalid(format!("{} has no conjugate partner", vals[i]))),
            }
        }
        for i in 0..4 {
            for j in i + 1..4 {
                let p = vals[i] * vals[j];
                if p.norm() > 1.0 + REAL_TOL {
                    return Err(invalid(format!("pairwise product {p} exceeds 1 in modulus")));
                }
            }
        }
        Ok(SchemeParams::Quad { a, b, c, d, q })
    }

    pub fn conjugate(y: f64, rho1: f64, z: f64, rho2: f64, q: f64) -> Result<Self> {
        Self::conjugate_in(y, rho1, z, rho2, QBase::new(q)?)
    }

    pub fn conjugate_in(y: f64, rho1: f64, z: f64, rho2: f64, q: QBase) -> Result<Self> {
        for (name, v) in [("y", y), ("rho1", rho1), ("z", z), ("rho2", rho2)] {
            if !v.is_finite() || v.abs() > 1.0 {
                return Err(invalid(format!("{name} = {v} outside [-1, 1]")));
            }
        }
        Ok(SchemeParams::Conjugate { y, rho1, z, rho2, q })
    }

    pub fn q(&self) -> QBase {
        match *self {
            SchemeParams::Quad { q, .. } | SchemeParams::Conjugate { q, .. } => q,
        }
    }

    pub fn is_conjugate(&self) -> bool {
        matches!(self, SchemeParams::Conjugate { .. })
    }

    /// `(a, b, c, d)` in either form.
    pub fn quad_values(&self) -> [Complex64; 4] {
        match *self {
            SchemeParams::Quad { a, b, c, d, .. } => [a, b, c, d],
            SchemeParams::Conjugate { y, rho1, z, rho2, .. } => {
                let e1 = Complex64::new(y, (1.0 - y * y).max(0.0).sqrt());
                let e2 = Complex64::new(z, (1.0 - z * z).max(0.0).sqrt());
                [e1 * rho1, e1.conj() * rho1, e2 * rho2, e2.conj() * rho2]
            }
        }
    }

    pub fn to_quad(&self) -> SchemeParams {
        let [a, b, c, d] = self.quad_values();
        SchemeParams::Quad { a, b, c, d, q: self.q() }
    }

    /// Conjugate form; fails unless `b = conj(a)` and `d = conj(c)`.
    pub fn to_conjugate(&self) -> Result<SchemeParams> {
        match *self {
            SchemeParams::Conjugate { .. } => Ok(*self),
            SchemeParams::Quad { a, b, c, d, q } => {
                let pair = |u: Complex64, v: Complex64| -> Result<(f64, f64)> {
                    if (u - v.conj()).norm() > REAL_TOL * u.norm().max(1.0) {
                        return Err(invalid(format!("{u} and {v} are not a conjugate pair")));
                    }
                    let r = u.norm();
                    let cos = if r == 0.0 { 0.0 } else { (u.re / r).clamp(-1.0, 1.0) };
                    Ok((cos, r))
                };
                let (y, rho1) = pair(a, b)?;
                let (z, rho2) = pair(c, d)?;
                Self::conjugate_in(y, rho1, z, rho2, q)
            }
        }
    }

    /// Parameters of a lower family: the leading `family.zeroed()` entries of
    /// `(a, b, c, d)` set to zero. The conjugate form is kept when the zeroing
    /// removes whole pairs.
    pub fn restrict(&self, family: Family) -> SchemeParams {
        match (*self, family) {
            (SchemeParams::Conjugate { y, z, rho2, q, .. }, Family::Asc) => {
                SchemeParams::Conjugate { y, rho1: 0.0, z, rho2, q }
            }
            (SchemeParams::Conjugate { y, z, q, .. }, Family::Qh) => {
                SchemeParams::Conjugate { y, rho1: 0.0, z, rho2: 0.0, q }
            }
            (SchemeParams::Conjugate { .. }, Family::Aw | Family::W | Family::P) => *self,
            _ => {
                let mut v = self.quad_values();
                for x in v.iter_mut().take(family.zeroed()) {
                    *x = Complex64::new(0.0, 0.0);
                }
                SchemeParams::Quad { a: v[0], b: v[1], c: v[2], d: v[3], q: self.q() }
            }
        }
    }

    /// `abcd`, real for admissible parameters.
    pub fn abcd(&self) -> f64 {
        match *self {
            SchemeParams::Conjugate { rho1, rho2, .. } => (rho1 * rho2).powi(2),
            SchemeParams::Quad { a, b, c, d, .. } => (a * b * c * d).re,
        }
    }

    /// The six pairwise products `ab, ac, ad, bc, bd, cd`. Only their full
    /// product is real in general.
    pub fn pair_products(&self) -> [Complex64; 6] {
        let [a, b, c, d] = self.quad_values();
        [a * b, a * c, a * d, b * c, b * d, c * d]
    }
}

/// `omega(x, y | rho)`, the real form of `v(x|rho e^{i theta}) v(x|rho e^{-i theta})`.
pub fn omega(x: f64, y: f64, rho: f64) -> f64 {
    let r2 = rho * rho;
    (1.0 - r2).powi(2) - 4.0 * x * y * rho * (1.0 + r2) + 4.0 * r2 * (x * x + y * y)
}
