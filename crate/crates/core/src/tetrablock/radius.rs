//! Numerical radius `ω(X) = max_θ λ_max(Re(e^{iθ} X))`.

use num_complex::Complex64;

use crate::linalg::{hermitian_max_eigenvalue, ComplexMatrix};

const GOLDEN: f64 = 0.618_033_988_749_894_8;
const ANGULAR_WIDTH: f64 = 1e-10;

fn support(x: &ComplexMatrix, theta: f64) -> f64 {
    let rotated = x * Complex64::from_polar(1.0, theta);
    hermitian_max_eigenvalue(&rotated)
}

/// Grid search over `n_angles` angles followed by golden-section
/// refinement around the best grid angle.
pub fn numerical_radius(x: &ComplexMatrix, n_angles: usize) -> f64 {
    if x.nrows() == 0 {
        return 0.0;
    }
    let n = n_angles.max(3);
    let step = std::f64::consts::TAU / n as f64;
    let (best_idx, best) = (0..n)
        .map(|j| (j, support(x, step * j as f64)))
        .fold((0, f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
    let center = step * best_idx as f64;
    let (mut lo, mut hi) = (center - step, center + step);
    let mut m1 = hi - GOLDEN * (hi - lo);
    let mut m2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (support(x, m1), support(x, m2));
    while hi - lo > ANGULAR_WIDTH {
        if f1 < f2 {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + GOLDEN * (hi - lo);
            f2 = support(x, m2);
        } else {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - GOLDEN * (hi - lo);
            f1 = support(x, m1);
        }
    }
    best.max(f1).max(f2).max(0.0)
}
