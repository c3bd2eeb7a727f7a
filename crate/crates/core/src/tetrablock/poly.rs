//! Polynomials in three commuting variables, their sampled supremum over
//! the distinguished boundary, and the von Neumann falsification check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{identity, op_norm, ComplexMatrix};
use crate::tetrablock::triple::ETriple;

/// `coeff · x1^a x2^b x3^c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub coeff: Complex64,
}

/// Sparse term list.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polynomial {
    pub terms: Vec<Term>,
}

impl Polynomial {
    pub fn new(terms: Vec<Term>) -> Self {
        Self { terms }
    }

    /// Builds from `(a, b, c, re, im)` tuples.
    pub fn from_terms(terms: &[(u32, u32, u32, f64, f64)]) -> Self {
        Self {
            terms: terms
                .iter()
                .map(|&(a, b, c, re, im)| Term { a, b, c, coeff: Complex64::new(re, im) })
                .collect(),
        }
    }

    pub fn monomial(a: u32, b: u32, c: u32) -> Self {
        Self::from_terms(&[(a, b, c, 1.0, 0.0)])
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.a + t.b + t.c).max().unwrap_or(0)
    }

    pub fn eval(&self, x1: Complex64, x2: Complex64, x3: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coeff * x1.powu(t.a) * x2.powu(t.b) * x3.powu(t.c))
            .sum()
    }

    /// `p(A, B, P)`; the variables are assumed to commute.
    pub fn eval_matrix(&self, a: &ComplexMatrix, b: &ComplexMatrix, p: &ComplexMatrix) -> ComplexMatrix {
        let d = a.nrows();
        let deg = self.degree() as usize;
        let powers = |m: &ComplexMatrix| {
            let mut out = vec![identity(d)];
            for k in 1..=deg {
                let next = &out[k - 1] * m;
                out.push(next);
            }
            out
        };
        let (pa, pb, pp) = (powers(a), powers(b), powers(p));
        let mut acc = ComplexMatrix::zeros(d, d);
        for t in &self.terms {
            acc += (&pa[t.a as usize] * &pb[t.b as usize] * &pp[t.c as usize]) * t.coeff;
        }
        acc
    }
}

/// Sampling grid over `{(w̄t, w, t) : |w| ≤ 1, |t| = 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryGrid {
    /// Radii for `w`, evenly spaced from 0 to 1 inclusive.
    pub radii: usize,
    /// Angles for `w`.
    pub angles: usize,
    /// Points for `t` on the unit circle.
    pub circle: usize,
}

impl Default for BoundaryGrid {
    fn default() -> Self {
        Self { radii: 21, angles: 72, circle: 72 }
    }
}

/// Largest `|p(w̄t, w, t)|` over the grid. Only a lower bound for the true
/// supremum over the closed tetrablock.
pub fn sample_sup_boundary(poly: &Polynomial, grid: BoundaryGrid) -> f64 {
    let radii: Vec<f64> = match grid.radii.max(1) {
        1 => vec![1.0],
        n => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    };
    let tau = std::f64::consts::TAU;
    let n_w = grid.angles.max(1);
    let n_t = grid.circle.max(1);
    let mut best: f64 = 0.0;
    for &r in &radii {
        for j in 0..n_w {
            let w = Complex64::from_polar(r, tau * j as f64 / n_w as f64);
            for k in 0..n_t {
                let t = Complex64::from_polar(1.0, tau * k as f64 / n_t as f64);
                best = best.max(poly.eval(w.conj() * t, w, t).norm());
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VonNeumannReport {
    pub operator_norm: f64,
    pub sup_estimate: f64,
    pub margin: f64,
    pub pass: bool,
}

/// Compares `‖p(A, B, P)‖` with the sampled boundary supremum. A failure
/// falsifies the E-contraction property; a pass certifies nothing.
pub fn vn_check(triple: &ETriple, poly: &Polynomial, grid: BoundaryGrid, margin: f64) -> VonNeumannReport {
    let operator_norm = op_norm(&poly.eval_matrix(triple.a(), triple.b(), triple.p()));
    let sup_estimate = sample_sup_boundary(poly, grid);
    VonNeumannReport { operator_norm, sup_estimate, margin, pass: operator_norm <= sup_estimate + margin }
}
