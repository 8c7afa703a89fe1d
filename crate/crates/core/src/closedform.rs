//! Binomial-sum closed forms, obtained by writing each function through
//! complex exponentials and expanding the `n`-th power with the binomial
//! theorem. This path shares no code with the polynomial recurrence and
//! serves as an independent check on it.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::binomial;
use num_traits::{One, Pow, Zero};

use crate::error::Error;
use crate::exactpoly::big_to_f64;
use crate::families::Family;

/// `d^k/dx^k exp(x)^n = n^k e^(n x)`, with `0^0 = 1`.
pub fn exp_power_derivative(n: i64, k: u32, x: Complex64) -> Complex64 {
    // powi(0) is 1 for a zero base
    let scale = (n as f64).powi(k as i32);
    (x * n as f64).exp() * scale
}

/// `i^e` reduced mod 4 to an exact unit.
fn i_pow(e: i64) -> Complex64 {
    match e.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `C(n, r)` for `r = 0..=n`, exact.
pub fn binomial_row(n: u32) -> Vec<BigInt> {
    let row: Vec<BigInt> = (0..=n)
        .map(|r| binomial(BigInt::from(n), BigInt::from(r)))
        .collect();
    debug_assert_eq!(
        row.iter().fold(BigInt::zero(), |a, c| a + c),
        BigInt::one() << n as usize
    );
    row
}

/// `(2r - n)^k` as an exact integer; `0^0 = 1`.
fn centered_power(r: u32, n: u32, k: u32) -> BigInt {
    let base = BigInt::from(2 * i64::from(r) - i64::from(n));
    Pow::pow(&base, k)
}

/// Evaluates the `k`-th derivative of `family(x)^n` via its binomial
/// expansion. Only natural `n` is supported.
///
/// For sin the summand is `(-1)^r C(n,r) (2r-n)^k i^(k-n) e^(i(2r-n)x)` with
/// prefactor `(-1)^n / 2^n`; cos drops the signs and uses `i^k`; the
/// hyperbolic forms replace `i x` by `x` and have no `i` power.
pub fn binomial_derivative(
    family: Family,
    n: i64,
    k: u32,
    x: Complex64,
) -> Result<Complex64, Error> {
    if n < 0 {
        return Err(Error::NegativeExponentUnsupported(n));
    }
    let n_u = n as u32;
    let row = binomial_row(n_u);
    let alternating = matches!(family, Family::Sin | Family::Sinh);
    let prefactor = {
        let sign = if alternating && n % 2 == 1 { -1.0 } else { 1.0 };
        sign * 0.5f64.powi(n as i32)
    };

    if !family.is_trigonometric() && x.im == 0.0 {
        let mut acc = 0.0;
        for (r, c) in row.iter().enumerate() {
            let r = r as u32;
            let sign = if alternating && r % 2 == 1 { -1.0 } else { 1.0 };
            let freq = 2.0 * f64::from(r) - n as f64;
            acc += sign * big_to_f64(&(c * centered_power(r, n_u, k))) * (freq * x.re).exp();
        }
        return Ok(Complex64::new(prefactor * acc, 0.0));
    }

    let unit = match family {
        Family::Sin => i_pow(i64::from(k) - n),
        Family::Cos => i_pow(i64::from(k)),
        Family::Sinh | Family::Cosh => Complex64::new(1.0, 0.0),
    };
    let mut acc = Complex64::zero();
    for (r, c) in row.iter().enumerate() {
        let r = r as u32;
        let sign = if alternating && r % 2 == 1 { -1.0 } else { 1.0 };
        let freq = 2.0 * f64::from(r) - n as f64;
        let phase = if family.is_trigonometric() {
            Complex64::new(0.0, freq) * x
        } else {
            x * freq
        };
        acc += phase.exp() * (sign * big_to_f64(&(c * centered_power(r, n_u, k))));
    }
    Ok(acc * unit * prefactor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn exp_power_examples() {
        assert_eq!(exp_power_derivative(0, 0, re(3.7)), re(1.0));
        assert_eq!(
            exp_power_derivative(0, 0, Complex64::new(-1.0, 2.0)),
            re(1.0)
        );
        assert_eq!(exp_power_derivative(0, 3, re(1.0)), re(0.0));
        assert_eq!(exp_power_derivative(1, 5, re(0.0)), re(1.0));
        let v = exp_power_derivative(3, 2, re(0.5));
        assert!((v.re - 9.0 * 1.5f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn binomial_examples() {
        let v = binomial_derivative(Family::Sin, 1, 1, re(0.0)).unwrap();
        assert!((v - re(1.0)).norm() < 1e-15);
        let v = binomial_derivative(Family::Sin, 2, 1, re(FRAC_PI_4)).unwrap();
        assert!((v - re(1.0)).norm() < 1e-15);
        let v = binomial_derivative(Family::Cos, 4, 0, re(0.3)).unwrap();
        assert!((v.re - 0.3f64.cos().powi(4)).abs() < 1e-15);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn cosh_cubed_second_derivative() {
        // (cosh^3)'' = 6 cosh sinh^2 + 3 cosh^3
        let x = 0.5f64;
        let expected = 6.0 * x.cosh() * x.sinh().powi(2) + 3.0 * x.cosh().powi(3);
        let v = binomial_derivative(Family::Cosh, 3, 2, re(x)).unwrap();
        assert!((v.re - expected).abs() < 1e-12);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn rejects_negative_exponent() {
        assert_eq!(
            binomial_derivative(Family::Sin, -1, 1, re(0.3)),
            Err(Error::NegativeExponentUnsupported(-1))
        );
    }

    #[test]
    fn zeroth_derivative_is_the_power() {
        for family in Family::ALL {
            for n in 0..=10 {
                for &x in &[-2.0, -0.7, 0.0, 0.4, 1.3, 2.0] {
                    let v = binomial_derivative(family, n, 0, re(x)).unwrap();
                    let want = family.apply_real(x).powi(n as i32);
                    assert!(
                        (v.re - want).abs() <= 1e-12 * want.abs().max(1.0),
                        "{family} n={n} x={x}: {v} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn binomial_row_sums_to_power_of_two() {
        for n in 0..40 {
            let s = binomial_row(n)
                .into_iter()
                .fold(BigInt::zero(), |a, c| a + c);
            assert_eq!(s, BigInt::one() << n as usize);
        }
    }
}
