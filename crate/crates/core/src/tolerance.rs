//! Norm- and dimension-scaled tolerances.

use serde::{Deserialize, Serialize};

/// Default base tolerance.
pub const DEFAULT_BASE: f64 = 1e-9;

/// A base tolerance that is scaled per call site.
///
/// The effective threshold is `base * max(1, dim) * max(1, norm)` where
/// `norm` is the operator norm of the input being tested. Singular values
/// (or residuals) are treated as zero iff they do not exceed it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub base: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { base: DEFAULT_BASE }
    }
}

impl Tolerance {
    /// Panics if `base` is not strictly positive and finite.
    pub fn new(base: f64) -> Self {
        assert!(base > 0.0 && base.is_finite(), "tolerance base must be positive, got {base}");
        Self { base }
    }

    pub fn effective(&self, dim: usize, norm: f64) -> f64 {
        self.base * dim.max(1) as f64 * norm.max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effective_scales_and_stays_positive() {
        let tol = Tolerance::default();
        assert_eq!(tol.effective(0, 0.0), DEFAULT_BASE);
        assert_eq!(tol.effective(4, 0.5), 4.0 * DEFAULT_BASE);
        assert_eq!(tol.effective(4, 2.0), 8.0 * DEFAULT_BASE);
        assert!(Tolerance::new(1e-6).effective(3, 1.0) > tol.effective(3, 1.0));
    }

    #[test]
    #[should_panic]
    fn rejects_zero_base() {
        Tolerance::new(0.0);
    }
}
