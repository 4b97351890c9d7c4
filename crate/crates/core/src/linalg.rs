//! Thin wrappers over the dense kernels in `faer`.

use faer::linalg::solvers::DenseSolveCore;
use num_complex::Complex64;

use crate::{Error, Mat, Result};

pub(crate) fn adjoint_product(a: &Mat<Complex64>) -> Mat<Complex64> {
    a * a.adjoint()
}

pub(crate) fn product_adjoint_first(a: &Mat<Complex64>) -> Mat<Complex64> {
    a.adjoint() * a
}

pub(crate) fn shifted(h: &Mat<Complex64>, z: Complex64) -> Mat<Complex64> {
    let mut m = h.clone();
    for k in 0..m.nrows() {
        m[(k, k)] -= z;
    }
    m
}

/// `max |(M·G − I)_{kl}|`.
pub(crate) fn inverse_residual(m: &Mat<Complex64>, g: &Mat<Complex64>) -> f64 {
    let prod = m * g;
    let mut worst = 0.0_f64;
    for l in 0..prod.ncols() {
        for k in 0..prod.nrows() {
            let target = if k == l { 1.0 } else { 0.0 };
            worst = worst.max((prod[(k, l)] - target).norm());
        }
    }
    worst
}

/// Inverse by LU with partial pivoting, rejected if `‖M·G − I‖_max > tol`.
pub(crate) fn checked_inverse(m: &Mat<Complex64>, tol: f64) -> Result<Mat<Complex64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!("cannot invert a {}x{} matrix", m.nrows(), m.ncols())));
    }
    if m.nrows() == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    let g = m.partial_piv_lu().inverse();
    let residual = inverse_residual(m, &g);
    if !(residual <= tol) {
        return Err(Error::SolverResidual { residual, tolerance: tol });
    }
    Ok(g)
}

/// `(H − z)^{-1}` for a Hermitian `H` and `Im z ≠ 0`.
pub(crate) fn resolvent(h: &Mat<Complex64>, z: Complex64, tol: f64) -> Result<Mat<Complex64>> {
    checked_inverse(&shifted(h, z), tol)
}

pub(crate) fn max_abs_diff(a: &Mat<Complex64>, b: &Mat<Complex64>) -> f64 {
    let mut worst = 0.0_f64;
    for l in 0..a.ncols() {
        for k in 0..a.nrows() {
            worst = worst.max((a[(k, l)] - b[(k, l)]).norm());
        }
    }
    worst
}

#[cfg(test)]
pub(crate) fn hermitian_defect(h: &Mat<Complex64>) -> f64 {
    let mut worst = 0.0_f64;
    for l in 0..h.ncols() {
        for k in 0..=l.min(h.nrows().saturating_sub(1)) {
            worst = worst.max((h[(k, l)] - h[(l, k)].conj()).norm());
        }
    }
    worst
}
