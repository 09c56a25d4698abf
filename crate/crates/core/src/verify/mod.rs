//! Quadrature and the checks that turn orthogonality relations, integral
//! formulas and expansions into pass/fail reports.

mod checks;
mod quadrature;

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use checks::{
    check_conditional_moment, check_expansion, check_normalization, check_orthogonality,
    check_quadruple_product, conditional_moment_target, quadruple_moment_series, ExpansionKind, MomentKind, EXPANSION_DEGREE,
};
pub use quadrature::{gauss_legendre_nodes, integrate, integrate_many, QuadratureKind, QuadratureRule};

/// A check passes when `abs_err <= max(abs, rel * |target|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn abs(abs: f64) -> Self {
        Self { abs, rel: 0.0 }
    }

    pub const fn rel(rel: f64) -> Self {
        Self { abs: 0.0, rel }
    }

    pub fn admits(&self, target: f64, computed: f64) -> bool {
        (computed - target).abs() <= self.abs.max(self.rel * target.abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub target: f64,
    pub computed: f64,
    pub abs_err: f64,
    /// `abs_err / |target|`, or `abs_err` when the target is zero.
    pub rel_err: f64,
    pub passed: bool,
    pub runtime_ms: f64,
    pub tolerance: Tolerance,
    pub seed: Option<u64>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>, target: f64, computed: f64, tolerance: Tolerance, started: Instant) -> Self {
        let abs_err = (computed - target).abs();
        let rel_err = if target == 0.0 { abs_err } else { abs_err / target.abs() };
        Self {
            name: name.into(),
            target,
            computed,
            abs_err,
            rel_err,
            passed: tolerance.admits(target, computed) && computed.is_finite(),
            runtime_ms: started.elapsed().as_secs_f64() * 1e3,
            tolerance,
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Plain-text table, one line per report.
pub fn summary_table(reports: &[VerificationReport]) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut out = format!(
        "{:<width$}  {:>24}  {:>24}  {:>10}  {:>10}  status\n",
        "name", "target", "computed", "abs_err", "rel_err"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<width$}  {:>24.16e}  {:>24.16e}  {:>10.3e}  {:>10.3e}  {}",
            r.name,
            r.target,
            r.computed,
            r.abs_err,
            r.rel_err,
            if r.passed { "pass" } else { "FAIL" }
        );
    }
    out
}
