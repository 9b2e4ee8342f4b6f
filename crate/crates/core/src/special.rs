//! Small special-function kernels: log-factorials, generalized Laguerre
//! polynomials and a pairwise complex summation.

use num_complex::Complex64;

/// `ln(k!)` for `k = 0..len`.
pub fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len.max(1));
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..len {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out.truncate(len.max(1));
    out
}

/// Generalized Laguerre polynomials `L_k^{(alpha)}(x)` for `k = 0..count`,
/// by the three-term recurrence in `k`.
pub fn laguerre_column(count: usize, alpha: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(1.0);
    if count == 1 {
        return out;
    }
    out.push(1.0 + alpha - x);
    for k in 1..count - 1 {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// Single `L_n^{(alpha)}(x)`.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    laguerre_column(n + 1, alpha, x)[n]
}

/// Pairwise (cascade) summation; the reduction order depends only on the
/// length, so results are bit-reproducible.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        let mut acc = Complex64::new(0.0, 0.0);
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials_match_products() {
        let lf = ln_factorials(11);
        assert_eq!(lf[0], 0.0);
        assert_eq!(lf[1], 0.0);
        assert!((lf[10].exp() - 3_628_800.0).abs() < 1e-6);
    }

    #[test]
    fn laguerre_low_orders() {
        let x = 0.7;
        let a = 1.5;
        assert_eq!(laguerre(0, a, x), 1.0);
        assert!((laguerre(1, a, x) - (1.0 + a - x)).abs() < 1e-15);
        // L_2^{(a)}(x) = x^2/2 - (a+2)x + (a+1)(a+2)/2
        let l2 = x * x / 2.0 - (a + 2.0) * x + (a + 1.0) * (a + 2.0) / 2.0;
        assert!((laguerre(2, a, x) - l2).abs() < 1e-14);
    }

    #[test]
    fn pairwise_matches_naive_sum() {
        let v: Vec<Complex64> = (0..1000).map(|k| Complex64::new(k as f64, -(k as f64) / 2.0)).collect();
        let s = pairwise_sum(&v);
        assert_eq!(s, Complex64::new(499_500.0, -249_750.0));
    }
}
