use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};
use tetradecomp::instance::{matrix_to_json, JsonMatrix, SCHEMA};
use tetradecomp::ComplexMatrix;

const QUANTUM: f64 = 1e-9;

/// First 8 hex digits of the SHA-256 of the entries (row-major, re then
/// im), each rounded to a multiple of 1e-9 and written as little-endian
/// f64.
pub fn checksum(m: &ComplexMatrix) -> String {
    let mut hasher = Sha256::new();
    hasher.update((m.nrows() as u64).to_le_bytes());
    hasher.update((m.ncols() as u64).to_le_bytes());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            for x in [z.re, z.im] {
                let mut q = (x / QUANTUM).round() * QUANTUM;
                if q == 0.0 {
                    q = 0.0;
                }
                hasher.update(q.to_le_bytes());
            }
        }
    }
    let digest = hasher.finalize();
    digest[..4].iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct LeafReport {
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checksum: Option<String>,
    /// Per-member type of the restriction, in member order.
    pub classifications: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wandering_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projection: Option<JsonMatrix>,
}

impl LeafReport {
    pub fn dense(dim: usize, projection: &ComplexMatrix, classifications: Vec<String>, full: bool) -> Self {
        LeafReport {
            dim,
            checksum: Some(checksum(projection)),
            classifications,
            blocks: None,
            wandering_dim: None,
            projection: full.then(|| matrix_to_json(projection)),
        }
    }
}

/// Common envelope of every report. `wall_time_ms` is kept last so that
/// golden comparisons can drop it by line.
#[derive(Debug, Clone, Serialize)]
pub struct ReportFile<C: Serialize, B: Serialize> {
    pub schema: &'static str,
    pub command: C,
    pub tol: f64,
    #[serde(flatten)]
    pub body: B,
    pub verdicts: BTreeMap<&'static str, bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub wall_time_ms: u64,
}

impl<C: Serialize, B: Serialize> ReportFile<C, B> {
    pub fn new(command: C, tol: f64, body: B) -> Self {
        ReportFile { schema: SCHEMA, command, tol, body, verdicts: BTreeMap::new(), error: None, wall_time_ms: 0 }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.verdicts.values().all(|&v| v)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tetradecomp::linalg::{c, diag, identity};

    #[test]
    fn checksum_ignores_sub_quantum_noise_and_signed_zero() {
        let a = diag(&[1.0, 0.0]);
        let mut b = a.clone();
        b[(0, 1)] = c(-0.0, 1e-13);
        b[(1, 0)] = c(-1e-14, -0.0);
        assert_eq!(checksum(&a), checksum(&b));
        assert_eq!(checksum(&a).len(), 8);
    }

    #[test]
    fn checksum_sees_shape_and_values() {
        assert_ne!(checksum(&identity(2)), checksum(&identity(3)));
        assert_ne!(checksum(&diag(&[1.0, 0.0])), checksum(&diag(&[0.0, 1.0])));
    }
}
