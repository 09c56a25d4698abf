use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{Family, PolySequence, SchemeParams};

/// Which way a connection runs. For `connection_x_y`, `Forward` expands
/// `x_n` in the `y_k` and `Inverse` expands `y_n` in the `x_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Inverse,
}

/// `source_n = sum_{k <= n} coeff[k][n] target_k`, upper triangular in `(k, n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionMatrix {
    pub source: Family,
    pub target: Family,
    pub n_max: usize,
    pub coeff: Vec<Vec<f64>>,
    pub params: SchemeParams,
}

impl ConnectionMatrix {
    /// Builds the matrix entry by entry from `entry(k, n)`, `k <= n`.
    pub(crate) fn build<F>(source: Family, target: Family, n_max: usize, params: SchemeParams, mut entry: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Result<f64>,
    {
        let mut coeff = vec![vec![0.0; n_max + 1]; n_max + 1];
        for n in 0..=n_max {
            for k in 0..=n {
                coeff[k][n] = entry(k, n)?;
            }
        }
        Ok(Self { source, target, n_max, coeff, params })
    }

    pub fn get(&self, k: usize, n: usize) -> f64 {
        self.coeff[k][n]
    }

    /// Chains `self: X -> Y` with `next: Y -> Z` into `X -> Z`.
    pub fn compose(&self, next: &ConnectionMatrix) -> Result<ConnectionMatrix> {
        if next.n_max != self.n_max {
            return Err(Error::LengthMismatch { expected: self.n_max, got: next.n_max });
        }
        let m = self.n_max;
        let mut coeff = vec![vec![0.0; m + 1]; m + 1];
        for n in 0..=m {
            for j in 0..=n {
                coeff[j][n] = (j..=n).map(|k| next.coeff[j][k] * self.coeff[k][n]).sum();
            }
        }
        Ok(ConnectionMatrix { source: self.source, target: next.target, n_max: m, coeff, params: self.params })
    }

    /// Largest entrywise distance from the identity, each column scaled by its max entry.
    pub fn identity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for n in 0..=self.n_max {
            let scale = (0..=n).map(|k| self.coeff[k][n].abs()).fold(1.0, f64::max);
            for k in 0..=n {
                let target = if k == n { 1.0 } else { 0.0 };
                worst = worst.max((self.coeff[k][n] - target).abs() / scale);
            }
        }
        worst
    }
}

/// `out[n] = sum_{k <= n} coeff[k][n] values[k]`: turns values of the target
/// family into values of the source family.
pub fn apply_connection(m: &ConnectionMatrix, values: &PolySequence) -> Result<PolySequence> {
    if values.values.len() != m.n_max + 1 {
        return Err(Error::LengthMismatch { expected: m.n_max + 1, got: values.values.len() });
    }
    let out = (0..=m.n_max)
        .map(|n| (0..=n).map(|k| m.coeff[k][n] * values.values[k]).sum())
        .collect();
    Ok(PolySequence::new(m.source, out))
}
