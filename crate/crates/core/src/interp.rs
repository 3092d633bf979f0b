//! Exact polynomial interpolation in a scalar parameter.
//!
//! Quantities such as `K(nabla + t Pi)` are polynomials in `t`. Sampling them
//! at enough rational nodes and solving the Vandermonde system recovers every
//! coefficient exactly, which turns variation formulas into equalities.

use crate::scalars::{Rational, Real, TrigScalar};
use crate::tensors::{SymTensorField, Tensor};

/// Vector space over the rationals.
pub trait Linear: Clone {
    fn zero_like(&self) -> Self;
    fn axpy(&mut self, a: &Rational, x: &Self);
}

impl Linear for Rational {
    fn zero_like(&self) -> Self {
        <Rational as Real>::zero()
    }
    fn axpy(&mut self, a: &Rational, x: &Self) {
        *self += a * x;
    }
}

impl Linear for TrigScalar<Rational> {
    fn zero_like(&self) -> Self {
        TrigScalar::zero(self.dim())
    }
    fn axpy(&mut self, a: &Rational, x: &Self) {
        self.add_scaled(x, a);
    }
}

impl Linear for SymTensorField<Rational> {
    fn zero_like(&self) -> Self {
        SymTensorField::zero(self.model(), self.degree())
    }
    fn axpy(&mut self, a: &Rational, x: &Self) {
        *self = self.add(&x.scale(a)).expect("same shape");
    }
}

impl Linear for Tensor<Rational> {
    fn zero_like(&self) -> Self {
        Tensor::zeros(self.dim(), self.rank())
    }
    fn axpy(&mut self, a: &Rational, x: &Self) {
        *self = self.add(&x.scale(a));
    }
}

/// Coefficients `c_0..c_{n-1}` of the unique polynomial of degree `< n`
/// through `(nodes[i], values[i])`.
pub fn poly_coeffs<T: Linear>(nodes: &[Rational], values: &[T]) -> Vec<T> {
    assert_eq!(nodes.len(), values.len());
    assert!(!nodes.is_empty());
    let n = nodes.len();
    // Vandermonde inverse by Gauss-Jordan on [V | I]
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational> = (0..n).map(|j| pow(&nodes[i], j)).collect();
            row.extend((0..n).map(|j| if i == j { <Rational as Real>::one() } else { <Rational as Real>::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).expect("distinct nodes");
        a.swap(col, piv);
        let inv = <Rational as Real>::one().over(&a[col][col]);
        for x in a[col].iter_mut() {
            *x = x.times(&inv);
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..2 * n {
                    let v = a[col][j].times(&f);
                    a[r][j] = a[r][j].minus(&v);
                }
            }
        }
    }
    (0..n)
        .map(|j| {
            let mut acc = values[0].zero_like();
            for (i, v) in values.iter().enumerate() {
                let w = &a[j][n + i];
                if !w.is_zero() {
                    acc.axpy(w, v);
                }
            }
            acc
        })
        .collect()
}

fn pow(x: &Rational, k: usize) -> Rational {
    let mut r = <Rational as Real>::one();
    for _ in 0..k {
        r = r.times(x);
    }
    r
}

/// Standard sample nodes `0, 1, -1, 2, -2, ...`.
pub fn nodes(n: usize) -> Vec<Rational> {
    (0..n as i64).map(|k| if k % 2 == 1 { (k + 1) / 2 } else { -k / 2 }).map(|k| Rational::from_int(k)).collect()
}
