//! Legendre and associated Legendre polynomials by stable upward recurrence.
//!
//! The associated polynomials include the Condon-Shortley factor (-1)^l; the
//! photon-counting probabilities square them, so only sign-sensitive helper
//! tests can tell.

use crate::{Error, Result};

fn check_domain(x: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange {
            name: "x",
            value: x,
            min: -1.0,
            max: 1.0,
        });
    }
    Ok(())
}

/// Legendre polynomial P_n(x) on [-1, 1].
pub fn legendre(n: u32, x: f64) -> Result<f64> {
    check_domain(x)?;
    Ok(legendre_unchecked(n, x))
}

pub(crate) fn legendre_unchecked(n: u32, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let mut prev = 1.0;
            let mut curr = x;
            for k in 1..n {
                let kf = k as f64;
                let next = ((2.0 * kf + 1.0) * x * curr - kf * prev) / (kf + 1.0);
                prev = curr;
                curr = next;
            }
            curr
        }
    }
}

/// Derivative P_n'(x), with the |x| = 1 limits handled separately.
pub fn legendre_derivative(n: u32, x: f64) -> Result<f64> {
    check_domain(x)?;
    if n == 0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    if (x - 1.0).abs() < 1e-14 {
        return Ok(nf * (nf + 1.0) / 2.0);
    }
    if (x + 1.0).abs() < 1e-14 {
        let sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
        return Ok(sign * nf * (nf + 1.0) / 2.0);
    }
    let pn = legendre_unchecked(n, x);
    let pn1 = legendre_unchecked(n - 1, x);
    Ok(nf * (x * pn - pn1) / (x * x - 1.0))
}

/// Associated Legendre P_n^l(x) for 0 <= l <= n, Condon-Shortley convention.
///
/// Recurrence: P_l^l = (-1)^l (2l-1)!! (1-x^2)^(l/2), then upward in degree.
pub fn assoc_legendre(n: u32, l: u32, x: f64) -> Result<f64> {
    check_domain(x)?;
    if l > n {
        return Err(Error::OutOfRange {
            name: "l",
            value: l as f64,
            min: 0.0,
            max: n as f64,
        });
    }
    if l == 0 {
        return Ok(legendre_unchecked(n, x));
    }
    let s = (1.0 - x * x).sqrt();
    let mut pll = 1.0;
    for k in 1..=l {
        pll *= -((2 * k - 1) as f64) * s;
    }
    if n == l {
        return Ok(pll);
    }
    let lf = l as f64;
    let mut prev = pll;
    let mut curr = x * (2.0 * lf + 1.0) * pll;
    for m in (l + 1)..n {
        let mf = m as f64;
        let next = (x * (2.0 * mf + 1.0) * curr - (mf + lf) * prev) / (mf + 1.0 - lf);
        prev = curr;
        curr = next;
    }
    Ok(curr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(legendre(0, 0.3).unwrap(), 1.0);
        assert_eq!(legendre(1, 0.3).unwrap(), 0.3);
        assert!((legendre(2, 0.5).unwrap() - (-0.125)).abs() < 1e-15);
        assert!((legendre(3, 0.5).unwrap() - (-0.4375)).abs() < 1e-15);
    }

    #[test]
    fn endpoint_values() {
        for n in 0..=20 {
            assert!((legendre(n, 1.0).unwrap() - 1.0).abs() < 1e-13);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((legendre(n, -1.0).unwrap() - sign).abs() < 1e-13);
        }
    }

    #[test]
    fn condon_shortley_sign() {
        // P_1^1(x) = -sqrt(1-x^2).
        assert!((assoc_legendre(1, 1, 0.0).unwrap() - (-1.0)).abs() < 1e-15);
        // P_2^1(x) = -3x sqrt(1-x^2).
        let x = 0.6f64;
        let expect = -3.0 * x * (1.0 - x * x).sqrt();
        assert!((assoc_legendre(2, 1, x).unwrap() - expect).abs() < 1e-14);
        // P_2^2(x) = 3(1-x^2).
        assert!((assoc_legendre(2, 2, x).unwrap() - 3.0 * (1.0 - x * x)).abs() < 1e-14);
    }

    #[test]
    fn domain_checks() {
        assert!(legendre(3, 1.5).is_err());
        assert!(assoc_legendre(2, 3, 0.5).is_err());
    }

    #[test]
    fn derivative_consistency() {
        // Central differences against the analytic derivative.
        for n in 1..=8 {
            for &x in &[-0.8, -0.2, 0.1, 0.7] {
                let h = 1e-6;
                let fd = (legendre_unchecked(n, x + h) - legendre_unchecked(n, x - h)) / (2.0 * h);
                let an = legendre_derivative(n, x).unwrap();
                assert!((fd - an).abs() < 1e-7, "n={n}, x={x}");
            }
        }
        assert!((legendre_derivative(4, 1.0).unwrap() - 10.0).abs() < 1e-13);
    }
}
