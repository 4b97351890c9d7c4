use num_complex::Complex64;

/// Pairwise (cascade) summation with a fixed tree shape.
///
/// The reduction order depends only on the slice length, so parallel producers
/// that collect into a `Vec` in index order get bit-identical totals.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().fold(Complex64::new(0.0, 0.0), |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub(crate) fn pairwise_sum_real(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_real(&values[..mid]) + pairwise_sum_real(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_sum_on_small_inputs() {
        let v: Vec<Complex64> = (0..100).map(|k| Complex64::new(k as f64, -(k as f64))).collect();
        let s = pairwise_sum(&v);
        assert_eq!(s, Complex64::new(4950.0, -4950.0));
        assert_eq!(pairwise_sum(&[]), Complex64::new(0.0, 0.0));
        assert_eq!(pairwise_sum_real(&[1.0, 2.0, 3.5]), 6.5);
    }
}
