//! Point membership in the tetrablock and its closure.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::tolerance::Tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TetraPoint {
    pub x1: Complex64,
    pub x2: Complex64,
    pub x3: Complex64,
}

impl TetraPoint {
    pub fn new(x1: Complex64, x2: Complex64, x3: Complex64) -> Self {
        Self { x1, x2, x3 }
    }

    /// `(x2, x1, x3)`.
    pub fn swapped(&self) -> Self {
        Self { x1: self.x2, x2: self.x1, x3: self.x3 }
    }

    pub fn is_finite(&self) -> bool {
        [self.x1, self.x2, self.x3].iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Interior,
    ClosureBoundary,
    Outside,
}

impl Region {
    pub fn in_closure(self) -> bool {
        self != Region::Outside
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership {
    pub region: Region,
    /// In the closure and `|x3| = 1` within tolerance.
    pub distinguished_boundary: bool,
    /// `|x1 − x̄2 x3| + |x1x2 − x3| + |x2|²`, compared against 1.
    pub lhs2: f64,
    /// `|x2 − x̄1 x3| + |x1x2 − x3| + |x1|²`, compared against 1.
    pub lhs3: f64,
    /// Whether the two symmetric criteria place the point in the same region.
    pub forms_agree: bool,
}

/// Region decided by one of the two characterisations. `lead` is the
/// coordinate whose modulus the degenerate case `x1x2 = x3` bounds.
fn region_from(lhs: f64, product_gap: f64, lead: f64, tol: f64) -> Region {
    if lhs > 1.0 + tol {
        return Region::Outside;
    }
    if product_gap <= tol && lead > 1.0 + tol {
        return Region::Outside;
    }
    if lhs < 1.0 - tol {
        Region::Interior
    } else {
        Region::ClosureBoundary
    }
}

pub fn tetra_membership(p: &TetraPoint, tol: Tolerance) -> Membership {
    let TetraPoint { x1, x2, x3 } = *p;
    let scale = x1.norm().max(x2.norm()).max(x3.norm());
    let eff = tol.effective(1, scale * scale);
    let product_gap = (x1 * x2 - x3).norm();
    let lhs2 = (x1 - x2.conj() * x3).norm() + product_gap + x2.norm_sqr();
    let lhs3 = (x2 - x1.conj() * x3).norm() + product_gap + x1.norm_sqr();
    let region = region_from(lhs2, product_gap, x1.norm(), eff);
    let region3 = region_from(lhs3, product_gap, x2.norm(), eff);
    Membership {
        region,
        distinguished_boundary: region.in_closure() && (x3.norm() - 1.0).abs() <= eff,
        lhs2,
        lhs3,
        forms_agree: region == region3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(a: f64, b: f64, c: f64) -> TetraPoint {
        TetraPoint::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0), Complex64::new(c, 0.0))
    }

    #[test]
    fn origin_is_interior() {
        let m = tetra_membership(&pt(0.0, 0.0, 0.0), Tolerance::default());
        assert_eq!(m.region, Region::Interior);
        assert!(!m.distinguished_boundary);
        assert!(m.forms_agree);
    }

    #[test]
    fn boundary_point_on_distinguished_boundary() {
        // |0.3 − 0.3| + |0.09 − 1| + 0.09 = 1
        let m = tetra_membership(&pt(0.3, 0.3, 1.0), Tolerance::default());
        assert_eq!(m.region, Region::ClosureBoundary);
        assert!(m.distinguished_boundary);
        assert!((m.lhs2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn far_point_is_outside() {
        let m = tetra_membership(&pt(2.0, 0.0, 0.0), Tolerance::default());
        assert_eq!(m.region, Region::Outside);
        assert!((m.lhs2 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_product_case_needs_modulus_bound() {
        // x2 = 1, x3 = x1 x2: the inequality degenerates to 0 ≤ 0
        let m = tetra_membership(&pt(1.5, 1.0, 1.5), Tolerance::default());
        assert_eq!(m.region, Region::Outside);
        let m = tetra_membership(&pt(0.5, 1.0, 0.5), Tolerance::default());
        assert_eq!(m.region, Region::ClosureBoundary);
    }
}
