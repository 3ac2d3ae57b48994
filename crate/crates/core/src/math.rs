//! Exact combinatorics helpers.
//!
//! Factorials and binomial coefficients are accumulated in `u128` and converted
//! to `f64` once, so every value below the integer-exactness limit carries a
//! single rounding at most. Amplitude formulas combine these as ratios, which
//! keeps beam-splitter and loss coefficients accurate to a few ulp at the
//! photon numbers this crate targets (total photon number <= ~33).

/// Largest n with n! representable in u128.
const MAX_EXACT_FACTORIAL: u32 = 33;

/// n! as f64, exact (up to one rounding) for n <= 33, extended by
/// multiplication beyond that.
pub(crate) fn factorial(n: u32) -> f64 {
    if n <= MAX_EXACT_FACTORIAL {
        let mut acc: u128 = 1;
        for k in 2..=n as u128 {
            acc *= k;
        }
        acc as f64
    } else {
        let mut acc = factorial(MAX_EXACT_FACTORIAL);
        for k in (MAX_EXACT_FACTORIAL + 1)..=n {
            acc *= k as f64;
        }
        acc
    }
}

/// Binomial coefficient C(n, k) as f64, computed multiplicatively in u128.
pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}

/// sqrt(a! * b! / (c! * d!)) with the ratio formed before the square root.
pub(crate) fn sqrt_factorial_ratio(a: u32, b: u32, c: u32, d: u32) -> f64 {
    ((factorial(a) * factorial(b)) / (factorial(c) * factorial(d))).sqrt()
}

/// Binomial probability weights [C(n,k) p^k (1-p)^(n-k)] for k = 0..=n.
///
/// Uses powi with the 0^0 = 1 convention so the p = 0 and p = 1 edges are
/// exact point masses.
pub(crate) fn binomial_weights(n: u32, p: f64) -> Vec<f64> {
    (0..=n)
        .map(|k| binomial(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorials_exact() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(1), 1.0);
        assert_eq!(factorial(5), 120.0);
        assert_eq!(factorial(12), 479_001_600.0);
    }

    #[test]
    fn binomial_row_sums() {
        for n in 0..20 {
            let sum: f64 = (0..=n).map(|k| binomial(n, k)).sum();
            assert_eq!(sum, (2.0f64).powi(n as i32));
        }
        assert_eq!(binomial(40, 20), 137_846_528_820.0);
        assert_eq!(binomial(3, 7), 0.0);
    }

    #[test]
    fn binomial_weights_normalized_at_edges() {
        for &p in &[0.0, 0.3, 1.0] {
            let w = binomial_weights(5, p);
            let sum: f64 = w.iter().sum();
            assert!((sum - 1.0).abs() < 1e-14);
        }
        let w = binomial_weights(4, 0.0);
        assert_eq!(w[0], 1.0);
        let w = binomial_weights(4, 1.0);
        assert_eq!(w[4], 1.0);
    }
}
