//! Dense Hermitian spectral computations for the Gram matrix `XX*`, its row
//! minors and their Green's functions.
//!
//! Row indices in this module are 0-based.

use faer::Side;
use num_complex::Complex64;
use serde::Serialize;

use crate::ensemble::{build_matrix, sample_omegas, EnsembleParams, PhaseMatrix};
use crate::linalg;
use crate::{Error, Mat, Result};

/// Tolerance on `‖(M − z)G − I‖_max` accepted from a dense solve.
pub const SOLVE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SpectralSource {
    /// `XX*`
    Gram,
    /// `(X^{(i)})* X^{(i)}`, the `N×N` Gram of the minor with row `i` removed.
    MinorGram { removed: usize },
    Other,
}

/// Sorted eigenvalues and (optionally) orthonormal eigenvectors.
///
/// Eigenvector columns are phase-fixed so that their largest-modulus
/// component is real and positive.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Option<Mat<Complex64>>,
    pub source: SpectralSource,
}

impl SpectralDecomposition {
    /// Decomposition from known eigenpairs, e.g. for diagonal test matrices.
    pub fn from_parts(mut eigenvalues: Vec<f64>, eigenvectors: Option<Mat<Complex64>>, source: SpectralSource) -> Result<Self> {
        if let Some(u) = &eigenvectors {
            if u.nrows() != eigenvalues.len() || u.ncols() != eigenvalues.len() {
                return Err(Error::Dimension("eigenvector matrix does not match eigenvalue count".into()));
            }
            let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
            order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
            let sorted_u = Mat::from_fn(u.nrows(), u.ncols(), |r, c| u[(r, order[c])]);
            let sorted_l = order.iter().map(|&k| eigenvalues[k]).collect();
            let mut out = Self { eigenvalues: sorted_l, eigenvectors: Some(sorted_u), source };
            out.fix_phases();
            return Ok(out);
        }
        eigenvalues.sort_by(f64::total_cmp);
        Ok(Self { eigenvalues, eigenvectors: None, source })
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> Option<&Mat<Complex64>> {
        self.eigenvectors.as_ref()
    }

    fn fix_phases(&mut self) {
        let Some(u) = self.eigenvectors.as_mut() else { return };
        for c in 0..u.ncols() {
            let mut best = Complex64::new(0.0, 0.0);
            for r in 0..u.nrows() {
                if u[(r, c)].norm() > best.norm() {
                    best = u[(r, c)];
                }
            }
            if best.norm() == 0.0 {
                continue;
            }
            let rot = best.conj() / best.norm();
            for r in 0..u.nrows() {
                u[(r, c)] *= rot;
            }
        }
    }

    /// `max_α ‖H u_α − λ_α u_α‖₂`.
    pub fn max_residual(&self, h: &Mat<Complex64>) -> Option<f64> {
        let u = self.eigenvectors.as_ref()?;
        let hu = h * u;
        let mut worst = 0.0_f64;
        for c in 0..u.ncols() {
            let lambda = self.eigenvalues[c];
            let mut s = 0.0;
            for r in 0..u.nrows() {
                s += (hu[(r, c)] - u[(r, c)] * lambda).norm_sqr();
            }
            worst = worst.max(s.sqrt());
        }
        Some(worst)
    }

    /// `‖U*U − I‖_max`.
    pub fn orthonormality_defect(&self) -> Option<f64> {
        let u = self.eigenvectors.as_ref()?;
        let g = u.adjoint() * u;
        Some(linalg::max_abs_diff(&g, &Mat::identity(u.ncols(), u.ncols())))
    }

    /// `‖H‖₂` as the largest eigenvalue modulus.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()))
    }

    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64> {
        stieltjes_mn(self, z)
    }

    pub fn counting(&self, e: f64) -> f64 {
        counting_function(self, e)
    }
}

/// `H = XX*`.
pub fn gram(x: &PhaseMatrix) -> Mat<Complex64> {
    let mut h = linalg::adjoint_product(&x.matrix);
    symmetrize(&mut h);
    h
}

/// Enforce exact Hermitian symmetry by averaging `H` and `H*`.
fn symmetrize(h: &mut Mat<Complex64>) {
    let n = h.nrows();
    for l in 0..n {
        h[(l, l)] = Complex64::new(h[(l, l)].re, 0.0);
        for k in 0..l {
            let avg = (h[(k, l)] + h[(l, k)].conj()) * 0.5;
            h[(k, l)] = avg;
            h[(l, k)] = avg.conj();
        }
    }
}

fn check_square(h: &Mat<Complex64>) -> Result<()> {
    if h.nrows() != h.ncols() {
        return Err(Error::Dimension(format!("expected a square matrix, got {}x{}", h.nrows(), h.ncols())));
    }
    Ok(())
}

/// Eigenvalues and eigenvectors of a Hermitian matrix.
pub fn eig_herm(h: &Mat<Complex64>, source: SpectralSource) -> Result<SpectralDecomposition> {
    check_square(h)?;
    if h.nrows() == 0 {
        return SpectralDecomposition::from_parts(vec![], Some(Mat::zeros(0, 0)), source);
    }
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenNonConvergence { residual: f64::NAN })?;
    let s = evd.S().column_vector();
    let eigenvalues: Vec<f64> = (0..h.nrows()).map(|k| s[k].re).collect();
    let u = evd.U().to_owned();
    let mut out = SpectralDecomposition { eigenvalues, eigenvectors: Some(u), source };
    out.fix_phases();
    Ok(out)
}

/// Eigenpairs with a residual gate: fails with the offending residual when
/// `max_α ‖Hu_α − λ_αu_α‖₂ > rel_tol·‖H‖₂`.
pub fn eig_herm_checked(h: &Mat<Complex64>, source: SpectralSource, rel_tol: f64) -> Result<SpectralDecomposition> {
    let dec = eig_herm(h, source)?;
    let residual = dec.max_residual(h).unwrap_or(0.0);
    let scale = dec.spectral_norm().max(f64::MIN_POSITIVE);
    if !(residual <= rel_tol * scale) {
        return Err(Error::EigenNonConvergence { residual });
    }
    Ok(dec)
}

/// Eigenvalues only.
pub fn eigvals_herm(h: &Mat<Complex64>, source: SpectralSource) -> Result<SpectralDecomposition> {
    check_square(h)?;
    if h.nrows() == 0 {
        return SpectralDecomposition::from_parts(vec![], None, source);
    }
    let mut eigenvalues = h
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenNonConvergence { residual: f64::NAN })?;
    eigenvalues.sort_by(f64::total_cmp);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors: None, source })
}

pub(crate) fn require_upper_half(z: Complex64) -> Result<()> {
    if !(z.im > 0.0) {
        return Err(Error::SpectralParameter { re: z.re, im: z.im });
    }
    Ok(())
}

/// `σ(XX*)` for the base draw of `params`, with eigenvectors on request.
pub fn draw_spectrum(params: &EnsembleParams, vectors: bool) -> Result<SpectralDecomposition> {
    let x = build_matrix(params, &sample_omegas(params, 0, None)?)?;
    let h = gram(&x);
    if vectors {
        eig_herm(&h, SpectralSource::Gram)
    } else {
        eigvals_herm(&h, SpectralSource::Gram)
    }
}

/// `m_N(z) = (1/N) Σ_j (σ_j² − z)^{-1}`.
pub fn stieltjes_mn(decomp: &SpectralDecomposition, z: Complex64) -> Result<Complex64> {
    require_upper_half(z)?;
    let n = decomp.n();
    if n == 0 {
        return Err(Error::Dimension("empty spectrum".into()));
    }
    let s: Complex64 = decomp.eigenvalues.iter().map(|&l| (Complex64::new(l, 0.0) - z).inv()).sum();
    Ok(s / n as f64)
}

/// `√z·m_N(z)` written as `(1/2N) Σ_j ((σ_j − √z)^{-1} − (σ_j + √z)^{-1})`,
/// with the principal square root. Its imaginary part is positive whenever
/// `Im z > 0` and the spectrum is nonnegative.
pub fn sqrt_z_stieltjes_partial_fractions(decomp: &SpectralDecomposition, z: Complex64) -> Result<Complex64> {
    require_upper_half(z)?;
    let w = z.sqrt();
    let n = decomp.n() as f64;
    let s: Complex64 = decomp
        .eigenvalues
        .iter()
        .map(|&l| {
            let sigma = Complex64::new(l.max(0.0).sqrt(), 0.0);
            (sigma - w).inv() - (sigma + w).inv()
        })
        .sum();
    Ok(s / (2.0 * n))
}

/// `F_N(E) = (1/N)·#{j : σ_j² ≤ E}`.
pub fn counting_function(decomp: &SpectralDecomposition, e: f64) -> f64 {
    if decomp.n() == 0 {
        return 0.0;
    }
    let count = decomp.eigenvalues.partition_point(|&l| l <= e);
    count as f64 / decomp.n() as f64
}

/// `X^{(i)}`: the `(N−1)×N` matrix with row `i` deleted.
#[derive(Clone, Debug)]
pub struct MinorData {
    pub matrix: Mat<Complex64>,
    pub removed: usize,
}

impl MinorData {
    /// `(X^{(i)})* X^{(i)}`, an `N×N` matrix of rank at most `N − 1`.
    pub fn gram_adjoint_first(&self) -> Mat<Complex64> {
        let mut a = linalg::product_adjoint_first(&self.matrix);
        symmetrize(&mut a);
        a
    }

    /// `B = X^{(i)} (X^{(i)})*`, i.e. `XX*` with row and column `i` removed.
    pub fn companion_gram(&self) -> Mat<Complex64> {
        let mut b = linalg::adjoint_product(&self.matrix);
        symmetrize(&mut b);
        b
    }
}

pub fn minor(x: &PhaseMatrix, i: usize) -> Result<MinorData> {
    let n = x.matrix.nrows();
    if i >= n {
        return Err(Error::InvalidParameter(format!("row {i} out of range for N={n}")));
    }
    let m = Mat::from_fn(n - 1, x.matrix.ncols(), |r, c| {
        let src = if r < i { r } else { r + 1 };
        x.matrix[(src, c)]
    });
    Ok(MinorData { matrix: m, removed: i })
}

/// Resolvent `G = (A − z)^{-1}` of a Hermitian operator `A`, usually the
/// minor Gram `(X^{(i)})* X^{(i)}`.
#[derive(Clone, Debug)]
pub struct GreenMatrix {
    pub g: Mat<Complex64>,
    pub removed: usize,
    pub z: Complex64,
}

impl GreenMatrix {
    pub fn n(&self) -> usize {
        self.g.nrows()
    }

    /// `(1/N) tr G`; for the minor resolvent this is `m_N^{(i)}(z)`.
    pub fn normalized_trace(&self) -> Complex64 {
        let n = self.n();
        let s: Complex64 = (0..n).map(|k| self.g[(k, k)]).sum();
        s / n as f64
    }

    /// `max_k |Σ_l |G_{kl}|² − Im G_kk/η| / (Im G_kk/η)`.
    pub fn ward_row_defect(&self) -> f64 {
        let eta = self.z.im;
        (0..self.n())
            .map(|k| {
                let lhs: f64 = (0..self.n()).map(|l| self.g[(k, l)].norm_sqr()).sum();
                let rhs = self.g[(k, k)].im / eta;
                (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }

    /// Column version: `Σ_k |G_{kl}|² = Im G_ll/η`.
    pub fn ward_column_defect(&self) -> f64 {
        let eta = self.z.im;
        (0..self.n())
            .map(|l| {
                let lhs: f64 = (0..self.n()).map(|k| self.g[(k, l)].norm_sqr()).sum();
                let rhs = self.g[(l, l)].im / eta;
                (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }

    pub fn max_entry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for l in 0..self.n() {
            for k in 0..self.n() {
                worst = worst.max(self.g[(k, l)].norm());
            }
        }
        worst
    }

    /// `max_{k,l} ||G_{kl}| − |G_{lk}||`. Not an identity for complex
    /// Hermitian operators; reported for diagnostics only.
    pub fn modulus_symmetry_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for l in 0..self.n() {
            for k in 0..l {
                worst = worst.max((self.g[(k, l)].norm() - self.g[(l, k)].norm()).abs());
            }
        }
        worst
    }

    /// Number of entries with `|G_{kl}| > threshold`, overall and in the worst row and column.
    pub fn large_entry_counts(&self, threshold: f64) -> (usize, usize, usize) {
        let n = self.n();
        let mut total = 0;
        let mut rows = vec![0usize; n];
        let mut cols = vec![0usize; n];
        for (l, col) in cols.iter_mut().enumerate() {
            for (k, row) in rows.iter_mut().enumerate() {
                if self.g[(k, l)].norm() > threshold {
                    total += 1;
                    *row += 1;
                    *col += 1;
                }
            }
        }
        (total, rows.into_iter().max().unwrap_or(0), cols.into_iter().max().unwrap_or(0))
    }
}

/// `G = (A − z)^{-1}` by a dense LU solve, checked against `SOLVE_TOLERANCE`.
pub fn green_of_operator(a: &Mat<Complex64>, removed: usize, z: Complex64) -> Result<GreenMatrix> {
    require_upper_half(z)?;
    check_square(a)?;
    let g = linalg::resolvent(a, z, SOLVE_TOLERANCE)?;
    Ok(GreenMatrix { g, removed, z })
}

/// `G^{(i)}(z) = ((X^{(i)})* X^{(i)} − z)^{-1}`.
pub fn green_minor(minor: &MinorData, z: Complex64) -> Result<GreenMatrix> {
    green_of_operator(&minor.gram_adjoint_first(), minor.removed, z)
}

/// `‖A*(AA* − z)^{-1}A − A*A(A*A − z)^{-1}‖_max`, each side from its own dense solve.
pub fn check_operator_identity(a: &Mat<Complex64>, z: Complex64) -> Result<f64> {
    if z.im == 0.0 {
        return Err(Error::SpectralParameter { re: z.re, im: z.im });
    }
    let aa = linalg::adjoint_product(a);
    let left_inner = linalg::resolvent(&aa, z, SOLVE_TOLERANCE)?;
    let lhs = a.adjoint() * &left_inner * a;
    let ata = linalg::product_adjoint_first(a);
    let right_inner = linalg::resolvent(&ata, z, SOLVE_TOLERANCE)?;
    let rhs = &ata * &right_inner;
    Ok(linalg::max_abs_diff(&lhs, &rhs))
}

/// Both sides of the Schur complement identity for the `i`-th diagonal entry.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SchurDiag {
    /// `[(XX* − z)^{-1}]_{ii}` from a dense solve of the full problem.
    pub lhs: Complex64,
    /// `−1/(z + z·m^{(i)} + z·F_i)`.
    pub rhs: Complex64,
}

impl SchurDiag {
    pub fn defect(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }
}

pub fn schur_diag(x: &PhaseMatrix, i: usize, z: Complex64, f_i: Complex64, m_minor: Complex64) -> Result<SchurDiag> {
    require_upper_half(z)?;
    let n = x.n();
    if i >= n {
        return Err(Error::InvalidParameter(format!("row {i} out of range for N={n}")));
    }
    let h = gram(x);
    let full = linalg::resolvent(&h, z, SOLVE_TOLERANCE)?;
    let lhs = full[(i, i)];
    let rhs = -(z + z * m_minor + z * f_i).inv();
    Ok(SchurDiag { lhs, rhs })
}

/// `[(XX* − z)^{-1}]_{ii}` for every `i`, from one dense solve.
pub fn full_resolvent_diagonal(x: &PhaseMatrix, z: Complex64) -> Result<Vec<Complex64>> {
    require_upper_half(z)?;
    let full = linalg::resolvent(&gram(x), z, SOLVE_TOLERANCE)?;
    Ok((0..x.n()).map(|i| full[(i, i)]).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct InterlacingReport {
    pub removed: usize,
    /// `|m_N(z) − m_N^{(i)}(z)|`
    pub gap: f64,
    /// `C/(Nη)`
    pub bound: f64,
    /// Cauchy interlacing `λ_j ≤ μ_j ≤ λ_{j+1}` failures beyond tolerance.
    pub violations: usize,
    pub worst_violation: f64,
    /// Smallest eigenvalue of `(X^{(i)})* X^{(i)}`; zero up to rounding.
    pub kernel_eigenvalue: f64,
    /// `|m^{(i)} − (1/N) tr (B − z)^{-1}|` and its exact value `1/(N|z|)`.
    pub kernel_gap: f64,
    pub kernel_gap_expected: f64,
}

impl InterlacingReport {
    pub fn within_bound(&self) -> bool {
        self.gap <= self.bound
    }
}

/// Default constant in `|m_N − m_N^{(i)}| ≤ C/(Nη)`.
pub const INTERLACING_CONSTANT: f64 = 4.0;

const INTERLACING_TOL: f64 = 1e-9;

pub fn interlacing_check(x: &PhaseMatrix, i: usize, z: Complex64, c: f64) -> Result<InterlacingReport> {
    require_upper_half(z)?;
    let n = x.n();
    let h = gram(x);
    let full = eigvals_herm(&h, SpectralSource::Gram)?;
    let mi = minor(x, i)?;
    let b = eigvals_herm(&mi.companion_gram(), SpectralSource::Other)?;
    let a = eigvals_herm(&mi.gram_adjoint_first(), SpectralSource::MinorGram { removed: i })?;

    let lam = full.eigenvalues();
    let mu = b.eigenvalues();
    let mut violations = 0;
    let mut worst = 0.0_f64;
    for (j, &m) in mu.iter().enumerate() {
        let below = lam[j] - m;
        let above = m - lam[j + 1];
        let v = below.max(above);
        if v > INTERLACING_TOL {
            violations += 1;
        }
        worst = worst.max(v.max(0.0));
    }

    let m_full = stieltjes_mn(&full, z)?;
    let m_minor = stieltjes_mn(&a, z)?;
    let trace_b: Complex64 = mu.iter().map(|&l| (Complex64::new(l, 0.0) - z).inv()).sum();
    let kernel_gap = (m_minor - trace_b / n as f64).norm();

    Ok(InterlacingReport {
        removed: i,
        gap: (m_full - m_minor).norm(),
        bound: c / (n as f64 * z.im),
        violations,
        worst_violation: worst,
        kernel_eigenvalue: a.eigenvalues()[0],
        kernel_gap,
        kernel_gap_expected: 1.0 / (n as f64 * z.norm()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{build_matrix, sample_omegas, EnsembleParams, OmegaTable};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn draw(n: usize, d: usize, seed: u64) -> PhaseMatrix {
        let p = EnsembleParams::new(n, d, seed);
        build_matrix(&p, &sample_omegas(&p, 0, None).unwrap()).unwrap()
    }

    #[test]
    fn gram_of_scalar_one() {
        let p = EnsembleParams::new(1, 1, 0);
        let x = build_matrix(&p, &OmegaTable::from_values(1, 1, vec![0.0]).unwrap()).unwrap();
        let h = gram(&x);
        assert_eq!(h[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn gram_two_by_two_entrywise() {
        let p = EnsembleParams::new(2, 1, 0);
        let x = build_matrix(&p, &OmegaTable::from_values(2, 1, vec![0.5, 0.5]).unwrap()).unwrap();
        let h = gram(&x);
        assert!((h[(0, 0)] - 1.0).norm() < 1e-14 && (h[(1, 1)] - 1.0).norm() < 1e-14);
        // H_12 = (1/2) Σ_k e^{iπk} e^{-iπk} = 1
        assert!((h[(0, 1)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gram_is_hermitian_with_unit_diagonal() {
        let x = draw(40, 3, 9);
        let h = gram(&x);
        assert!(linalg::hermitian_defect(&h) <= 1e-14);
        for k in 0..40 {
            assert!((h[(k, k)].re - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn eig_of_identity_and_diagonal() {
        let dec = eig_herm(&Mat::identity(4, 4), SpectralSource::Other).unwrap();
        assert!(dec.eigenvalues().iter().all(|&l| (l - 1.0).abs() < 1e-14));
        let mut d = Mat::<Complex64>::zeros(2, 2);
        d[(1, 1)] = c(4.0, 0.0);
        let dec = eig_herm(&d, SpectralSource::Other).unwrap();
        assert!((dec.eigenvalues()[0]).abs() < 1e-14 && (dec.eigenvalues()[1] - 4.0).abs() < 1e-14);
        let u = dec.eigenvectors().unwrap();
        assert!((u[(0, 0)] - 1.0).norm() < 1e-14 && (u[(1, 1)] - 1.0).norm() < 1e-14);
    }

    #[test]
    fn eig_invariants_on_random_gram() {
        let x = draw(60, 2, 3);
        let h = gram(&x);
        let dec = eig_herm_checked(&h, SpectralSource::Gram, 1e-9).unwrap();
        assert!(dec.orthonormality_defect().unwrap() <= 1e-10);
        assert!(dec.eigenvalues().iter().all(|&l| l >= -1e-10));
        let trace: f64 = (0..60).map(|k| h[(k, k)].re).sum();
        let sum: f64 = dec.eigenvalues().iter().sum();
        assert!((trace - sum).abs() <= 1e-10 * trace);
        // phase convention
        let u = dec.eigenvectors().unwrap();
        for col in 0..60 {
            let best = (0..60).max_by(|&a, &b| u[(a, col)].norm().total_cmp(&u[(b, col)].norm())).unwrap();
            assert!(u[(best, col)].im.abs() < 1e-15 && u[(best, col)].re > 0.0);
        }
    }

    #[test]
    fn stieltjes_examples() {
        let dec = SpectralDecomposition::from_parts(vec![1.0], None, SpectralSource::Other).unwrap();
        let m = stieltjes_mn(&dec, c(0.0, 1.0)).unwrap();
        assert!((m - c(0.5, 0.5)).norm() < 1e-15);
        assert!(stieltjes_mn(&dec, c(1.0, 0.0)).is_err());
        assert!(stieltjes_mn(&dec, c(1.0, -0.5)).is_err());
    }

    #[test]
    fn stieltjes_bounds_and_sqrt_positivity() {
        let dec = eigvals_herm(&gram(&draw(50, 2, 1)), SpectralSource::Gram).unwrap();
        for &(e, eta) in &[(-3.0, 0.01), (0.1, 0.05), (2.0, 0.2), (3.9, 1.0), (10.0, 0.001)] {
            let z = c(e, eta);
            let m = stieltjes_mn(&dec, z).unwrap();
            assert!(m.im > 0.0 && m.norm() <= 1.0 / eta);
            let pf = sqrt_z_stieltjes_partial_fractions(&dec, z).unwrap();
            assert!((pf - z.sqrt() * m).norm() <= 1e-10 * (1.0 + m.norm()));
            assert!(pf.im > 0.0);
        }
    }

    #[test]
    fn counting_examples() {
        let dec = SpectralDecomposition::from_parts(vec![4.0, 0.0], None, SpectralSource::Other).unwrap();
        assert_eq!(counting_function(&dec, -0.5), 0.0);
        assert_eq!(counting_function(&dec, 1.0), 0.5);
        assert_eq!(counting_function(&dec, 4.0), 1.0);
        assert_eq!(counting_function(&dec, 0.0), 0.5);
    }

    #[test]
    fn two_by_two_minor_green() {
        let x = draw(2, 1, 4);
        let mi = minor(&x, 0).unwrap();
        let z = c(0.7, 0.3);
        let g = green_minor(&mi, z).unwrap();
        // G is normal but not Hermitian; compare trace and determinant
        let tr = g.g[(0, 0)] + g.g[(1, 1)];
        let det = g.g[(0, 0)] * g.g[(1, 1)] - g.g[(0, 1)] * g.g[(1, 0)];
        let e1 = (c(1.0, 0.0) - z).inv();
        let e2 = -z.inv();
        assert!((tr - (e1 + e2)).norm() < 1e-12);
        assert!((det - e1 * e2).norm() < 1e-12);
    }

    #[test]
    fn minor_rows_are_bit_identical() {
        let x = draw(7, 2, 8);
        let mi = minor(&x, 3).unwrap();
        for r in 0..6 {
            let src = if r < 3 { r } else { r + 1 };
            for k in 0..7 {
                assert_eq!(mi.matrix[(r, k)], x.matrix[(src, k)]);
            }
        }
        assert!(minor(&x, 7).is_err());
    }

    #[test]
    fn ward_identities_and_a_priori_bound() {
        let n = 80;
        let x = draw(n, 2, 12);
        let theta = 0.3;
        let eta = (n as f64).powf(-theta);
        for i in [0, 17, 79] {
            let g = green_minor(&minor(&x, i).unwrap(), c(1.5, eta)).unwrap();
            assert!(g.ward_row_defect() <= 1e-8);
            assert!(g.ward_column_defect() <= 1e-8);
            assert!(g.max_entry() <= (n as f64).powf(theta));
        }
        assert!(green_minor(&minor(&x, 0).unwrap(), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn operator_identity_examples() {
        let z = c(0.0, 1.0);
        assert!(check_operator_identity(&Mat::identity(3, 3), z).unwrap() < 1e-15);
        assert!(check_operator_identity(&Mat::zeros(3, 2), z).unwrap() == 0.0);
        let a = Mat::from_fn(8, 6, |r, k| c(((r * 13 + k * 7) % 11) as f64 / 5.0 - 1.0, ((r * 3 + k * 5) % 7) as f64 / 3.5 - 1.0));
        assert!(check_operator_identity(&a, c(2.0, 1.0)).unwrap() <= 1e-10);
        assert!(check_operator_identity(&a, c(2.0, 0.0)).is_err());
    }

    #[test]
    fn interlacing_two_by_two() {
        let x = draw(2, 1, 33);
        let rep = interlacing_check(&x, 1, c(1.0, 0.5), INTERLACING_CONSTANT).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.kernel_eigenvalue.abs() <= 1e-10);
    }

    #[test]
    fn interlacing_on_random_draw() {
        let x = draw(100, 2, 5);
        for i in [0, 50, 99] {
            let rep = interlacing_check(&x, i, c(2.0, 0.2), INTERLACING_CONSTANT).unwrap();
            assert_eq!(rep.violations, 0);
            assert!(rep.within_bound(), "gap {} bound {}", rep.gap, rep.bound);
            assert!(rep.kernel_eigenvalue.abs() <= 1e-10);
            assert!((rep.kernel_gap - rep.kernel_gap_expected).abs() <= 1e-10);
        }
    }
}
