//! Independent oracles shared by the integration tests. Nothing here calls
//! into the crate's numerical routines.

#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64;
use phaselaw::Mat;

/// Tanh-sinh quadrature of `f` over `[a, b]`. The integrand receives the
/// abscissa together with its distances to both endpoints, computed without
/// cancellation so that endpoint singularities are resolved.
pub fn tanh_sinh<F>(a: f64, b: f64, level: u32, f: F) -> Complex64
where
    F: Fn(f64, f64, f64) -> Complex64,
{
    let h = 2f64.powi(-(level as i32));
    let half = 0.5 * (b - a);
    let pi2 = std::f64::consts::FRAC_PI_2;
    let mut sum = Complex64::new(0.0, 0.0);
    let kmax = (4.5 / h) as i64;
    for k in -kmax..=kmax {
        let t = k as f64 * h;
        let u = pi2 * t.sinh();
        let ch = u.cosh();
        let w = pi2 * t.cosh() / (ch * ch);
        // distance to each endpoint: half·(1 ± tanh u) = half·2/(1 + e^{∓2u})
        let da = half * 2.0 / (1.0 + (-2.0 * u).exp());
        let db = half * 2.0 / (1.0 + (2.0 * u).exp());
        if da <= 0.0 || db <= 0.0 || !w.is_finite() || w == 0.0 {
            continue;
        }
        let x = if u < 0.0 { a + da } else { b - db };
        sum += f(x, da, db) * (w * half);
    }
    sum * h
}

/// Naive Gauss–Jordan inverse with partial pivoting.
pub fn gauss_jordan_inverse(a: &Mat<Complex64>) -> Mat<Complex64> {
    let n = a.nrows();
    let mut m: Vec<Vec<Complex64>> = (0..n).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect();
    let mut inv: Vec<Vec<Complex64>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }).collect()).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| m[x][col].norm().partial_cmp(&m[y][col].norm()).unwrap()).unwrap();
        m.swap(col, piv);
        inv.swap(col, piv);
        let p = m[col][col].inv();
        for j in 0..n {
            m[col][j] *= p;
            inv[col][j] *= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != Complex64::new(0.0, 0.0) {
                    for j in 0..n {
                        let (mc, ic) = (m[col][j], inv[col][j]);
                        m[r][j] -= f * mc;
                        inv[r][j] -= f * ic;
                    }
                }
            }
        }
    }
    Mat::from_fn(n, n, |i, j| inv[i][j])
}

/// `A − z` for square `A`.
pub fn shift(a: &Mat<Complex64>, z: Complex64) -> Mat<Complex64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| if i == j { a[(i, j)] - z } else { a[(i, j)] })
}

/// `X X*` by explicit triple loop.
pub fn naive_gram(x: &Mat<Complex64>) -> Mat<Complex64> {
    let (r, c) = (x.nrows(), x.ncols());
    Mat::from_fn(r, r, |i, j| (0..c).map(|k| x[(i, k)] * x[(j, k)].conj()).sum())
}

/// Number of eigenvalues of the Hermitian matrix `h` strictly below `e`,
/// from the inertia of an unpivoted `LDL*` factorization of `h − e`
/// (Sylvester's law). Only the lower triangle is updated. Generic shifts
/// never hit a zero pivot.
pub fn inertia_below(h: &Mat<Complex64>, e: f64) -> usize {
    let n = h.nrows();
    let mut a: Vec<Vec<Complex64>> = (0..n).map(|i| (0..n).map(|j| h[(i, j)]).collect()).collect();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= e;
    }
    let mut negatives = 0;
    for k in 0..n {
        let dk = a[k][k].re;
        assert!(dk.abs() > 1e-300, "zero pivot at {k}");
        if dk < 0.0 {
            negatives += 1;
        }
        for i in k + 1..n {
            let lik = a[i][k] / dk;
            for j in k + 1..=i {
                let v = lik * a[j][k].conj();
                a[i][j] -= v;
            }
        }
    }
    negatives
}

/// Marchenko–Pastur density `√(x(4 − x))/(2πx)` written through the
/// endpoint distances `x = da`, `4 − x = db`.
pub fn rho_mp_oracle(da: f64, db: f64) -> f64 {
    (db / da).sqrt() / (2.0 * std::f64::consts::PI)
}

/// `∫ ρ_MP(x)/(x − z) dx` by tanh-sinh, split at `Re z` so that the nodes
/// cluster around the near-singular point.
pub fn m_mp_quadrature(z: Complex64) -> Complex64 {
    let f = |x: f64| Complex64::new(x, 0.0) - z;
    if z.re <= 0.0 || z.re >= 4.0 {
        return tanh_sinh(0.0, 4.0, 9, |x, da, db| Complex64::new(rho_mp_oracle(da, db), 0.0) / f(x));
    }
    let e = z.re;
    let left = tanh_sinh(0.0, e, 10, |x, da, _| Complex64::new(rho_mp_oracle(da, 4.0 - x), 0.0) / f(x));
    let right = tanh_sinh(e, 4.0, 10, |x, _, db| Complex64::new(rho_mp_oracle(x, db), 0.0) / f(x));
    left + right
}

/// Number of `(k, l) ∈ [N]^{2p} × [N]^{2p}` with `Σ_α (k_α^q − l_α^q) = v_q`,
/// by direct iteration over every tuple.
pub fn brute_force_count(n: u64, d: u32, p: u32, v: &[i128], off_diagonal: bool) -> u64 {
    let w = 2 * p as usize;
    let total = (n as u128).pow(2 * w as u32);
    let mut count = 0;
    let mut digits = vec![1u64; 2 * w];
    for _ in 0..total {
        let ok_diag = !off_diagonal || (0..w).all(|a| digits[a] != digits[w + a]);
        if ok_diag {
            let good = (1..=d).all(|q| {
                let s: i128 = (0..w).map(|a| (digits[a] as i128).pow(q) - (digits[w + a] as i128).pow(q)).sum();
                s == v[q as usize - 1]
            });
            if good {
                count += 1;
            }
        }
        for slot in digits.iter_mut() {
            if *slot < n {
                *slot += 1;
                break;
            }
            *slot = 1;
        }
    }
    count
}
