//! Small dense-matrix helpers shared by the rest of the crate.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

/// A generic N×N complex operator, in the position basis unless stated otherwise.
pub type Operator = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity(n: usize) -> Operator {
    DMatrix::identity(n, n)
}

/// Largest entry modulus.
pub fn max_abs(m: &Operator) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn frobenius(m: &Operator) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖U†U − I‖_max`
pub fn unitarity_residual(u: &Operator) -> f64 {
    let mut g = u.adjoint() * u;
    for i in 0..g.nrows() {
        g[(i, i)] -= ONE;
    }
    max_abs(&g)
}

/// `‖A − A†‖_max`
pub fn hermiticity_residual(a: &Operator) -> f64 {
    max_abs(&(a - a.adjoint()))
}

pub fn hermitian_part(a: &Operator) -> Operator {
    (a + a.adjoint()).scale(0.5)
}

pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    a * b - b * a
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &Operator) -> Vec<f64> {
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| x.total_cmp(y));
    vals
}

/// Trace norm of a Hermitian matrix.
pub fn trace_norm_hermitian(a: &Operator) -> f64 {
    hermitian_eigenvalues(a).iter().map(|v| v.abs()).sum()
}

/// `|u⟩⟨v|`
pub fn outer(u: &DVector<Complex64>, v: &DVector<Complex64>) -> Operator {
    u * v.adjoint()
}

/// `tr[A B]` without forming the product.
pub fn trace_of_product(a: &Operator, b: &Operator) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub(crate) fn check_square(a: &Operator) -> crate::Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(crate::Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}
