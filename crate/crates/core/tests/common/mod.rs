#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use tetradecomp::linalg::{direct_sum, identity, matrix_power, op_norm, ComplexMatrix};
use tetradecomp::modelgen::{haar_unitary, random_contraction, truncated_shift, CounterRng, Stream};

/// Projection onto the joint kernel of the stacked blocks, by one SVD.
/// Independent of the library's subspace code.
pub fn kernel_projection(blocks: &[ComplexMatrix], d: usize, tol: f64) -> ComplexMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum::<usize>().max(d);
    let mut stacked = DMatrix::<Complex64>::zeros(rows, d);
    let mut r = 0;
    for b in blocks {
        stacked.view_mut((r, 0), b.shape()).copy_from(b);
        r += b.nrows();
    }
    let svd = stacked.svd(false, true);
    let v = svd.v_t.unwrap().adjoint();
    let mut p = DMatrix::<Complex64>::zeros(d, d);
    for i in 0..d {
        if svd.singular_values[i] <= tol {
            let col = v.column(i);
            p += col * col.adjoint();
        }
    }
    p
}

/// `∩_{n=1}^{d} ker(I − T*ⁿTⁿ) ∩ ker(I − TⁿT*ⁿ)` as a projection.
pub fn unitary_part_oracle(t: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let d = t.nrows();
    let id = identity(d);
    let mut blocks = Vec::new();
    for n in 1..=d {
        let p = matrix_power(t, n);
        blocks.push(&id - p.adjoint() * &p);
        blocks.push(&id - &p * p.adjoint());
    }
    kernel_projection(&blocks, d, tol)
}

pub fn proj_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    op_norm(&(a - b))
}

/// `Q (U ⊕ C) Q*` with a `k`-dimensional unitary block and a strict or
/// shift block on the rest; returns the matrix and the planted unitary
/// projection.
pub fn mixed_contraction(d: usize, seed: u64) -> (ComplexMatrix, ComplexMatrix) {
    let mut rng = CounterRng::new(seed, Stream::Sampling);
    let k = (rng.next_u64() % (d as u64 + 1)) as usize;
    let mut blocks = Vec::new();
    if k > 0 {
        blocks.push(haar_unitary(k, seed ^ 0xA5A5).unwrap());
    }
    if d > k {
        let rest = d - k;
        let c = if rng.next_u64().is_multiple_of(3) {
            truncated_shift(1, rest).unwrap()
        } else {
            random_contraction(rest, seed ^ 0x5A5A, rng.uniform_in(0.3, 0.95)).unwrap()
        };
        blocks.push(c);
    }
    let t = direct_sum(&blocks);
    let q = haar_unitary(d, seed.wrapping_mul(31).wrapping_add(7)).unwrap();
    let mut planted = DMatrix::<Complex64>::zeros(d, d);
    for i in 0..k {
        planted[(i, i)] = Complex64::new(1.0, 0.0);
    }
    (&q * t * q.adjoint(), &q * planted * q.adjoint())
}

/// `[a | b]`.
pub fn hstack(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut m = DMatrix::<Complex64>::zeros(a.nrows(), a.ncols() + b.ncols());
    m.columns_mut(0, a.ncols()).copy_from(a);
    m.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    m
}
