//! Exact polynomial arithmetic.
//!
//! [`NPoly`] is a dense univariate polynomial in the exponent variable `n`
//! with unbounded integer coefficients. [`UPoly`] is a sparse polynomial in
//! a second variable (`u` for the intermediate families, `v` for the final
//! ones) whose coefficients are [`NPoly`] values.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Polynomial in `n` with exact integer coefficients, ascending powers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NPoly {
    coeffs: Vec<BigInt>,
}

impl NPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::from_coeffs(vec![c.into()])
    }

    /// The polynomial `n`.
    pub fn n() -> Self {
        Self::from_coeffs(vec![BigInt::zero(), BigInt::one()])
    }

    /// Builds `c * n^power`.
    pub fn monomial(c: impl Into<BigInt>, power: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); power + 1];
        coeffs[power] = c.into();
        Self::from_coeffs(coeffs)
    }

    /// Coefficients in ascending powers of `n`; trailing zeros are dropped.
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn coeff(&self, power: usize) -> BigInt {
        self.coeffs.get(power).cloned().unwrap_or_default()
    }

    /// Number of nonzero coefficients.
    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval_integer(&self, n: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * n + c)
    }

    pub fn eval_rational(&self, n: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| {
                acc * n + BigRational::from_integer(c.clone())
            })
    }

    pub fn eval_f64(&self, n: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * n + big_to_f64(c))
    }

    pub fn eval_complex(&self, n: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, c| acc * n + big_to_f64(c))
    }
}

pub(crate) fn big_to_f64(c: &BigInt) -> f64 {
    c.to_f64().unwrap_or(if c.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

impl Add for &NPoly {
    type Output = NPoly;

    fn add(self, rhs: &NPoly) -> NPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) | (None, Some(a)) => a.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        NPoly::from_coeffs(coeffs)
    }
}

impl Add for NPoly {
    type Output = NPoly;

    fn add(self, rhs: NPoly) -> NPoly {
        &self + &rhs
    }
}

impl Neg for &NPoly {
    type Output = NPoly;

    fn neg(self) -> NPoly {
        NPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for NPoly {
    type Output = NPoly;

    fn neg(self) -> NPoly {
        -&self
    }
}

impl Sub for &NPoly {
    type Output = NPoly;

    fn sub(self, rhs: &NPoly) -> NPoly {
        self + &(-rhs)
    }
}

impl Sub for NPoly {
    type Output = NPoly;

    fn sub(self, rhs: NPoly) -> NPoly {
        &self - &rhs
    }
}

impl Mul for &NPoly {
    type Output = NPoly;

    fn mul(self, rhs: &NPoly) -> NPoly {
        if self.is_zero() || rhs.is_zero() {
            return NPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        NPoly::from_coeffs(coeffs)
    }
}

impl Mul for NPoly {
    type Output = NPoly;

    fn mul(self, rhs: NPoly) -> NPoly {
        &self * &rhs
    }
}

/// Plain-text form, descending powers: `-3n^2 + 2n` prints as `-3 n^2 + 2 n`.
impl fmt::Display for NPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (p, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            match (p, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                (_, false) => write!(f, "{mag} ")?,
            }
            match p {
                0 => {}
                1 => f.write_str("n")?,
                _ => write!(f, "n^{p}")?,
            }
        }
        Ok(())
    }
}

/// Quadratic substitution `u^2 -> a v^2 + b` used to trade the co-function
/// for the base function (or back).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EvenSubstitution {
    square_coeff: i8,
    constant: i8,
}

impl EvenSubstitution {
    /// `u^2 -> 1 - v^2`
    pub const ONE_MINUS_SQUARE: Self = Self::new(-1, 1);
    /// `u^2 -> v^2 + 1`
    pub const SQUARE_PLUS_ONE: Self = Self::new(1, 1);
    /// `u^2 -> v^2 - 1`
    pub const SQUARE_MINUS_ONE: Self = Self::new(1, -1);

    const fn new(square_coeff: i8, constant: i8) -> Self {
        Self {
            square_coeff,
            constant,
        }
    }

    pub fn square_coeff(self) -> i8 {
        self.square_coeff
    }

    pub fn constant(self) -> i8 {
        self.constant
    }

    /// Value of the substituted square for a given `v`.
    pub fn apply(self, v: Complex64) -> Complex64 {
        v * v * f64::from(self.square_coeff) + f64::from(self.constant)
    }

    /// The quadratic `a v^2 + b` as a polynomial.
    fn as_upoly(self) -> UPoly {
        let mut p = UPoly::zero();
        p.add_term(2, NPoly::constant(self.square_coeff));
        p.add_term(0, NPoly::constant(self.constant));
        p
    }
}

/// Sparse polynomial in one variable with [`NPoly`] coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct UPoly {
    terms: BTreeMap<usize, NPoly>,
}

impl UPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(NPoly::one())
    }

    pub fn constant(c: NPoly) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(power: usize, c: NPoly) -> Self {
        let mut p = Self::zero();
        p.add_term(power, c);
        p
    }

    /// The polynomial `u` (or `v`).
    pub fn var() -> Self {
        Self::monomial(1, NPoly::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, NPoly)>) -> Self {
        let mut p = Self::zero();
        for (power, c) in terms {
            p.add_term(power, c);
        }
        p
    }

    /// Adds `c * u^power` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, power: usize, c: NPoly) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&power) {
            Some(existing) => &existing + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(power, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().copied()
    }

    /// Coefficient of the highest power present.
    pub fn leading(&self) -> Option<&NPoly> {
        self.terms.values().next_back()
    }

    pub fn coeff(&self, power: usize) -> Option<&NPoly> {
        self.terms.get(&power)
    }

    /// Nonzero terms in ascending power order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (usize, &NPoly)> {
        self.terms.iter().map(|(&p, c)| (p, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &NPoly) -> Self {
        Self::from_terms(self.terms().map(|(p, a)| (p, a * c)))
    }

    pub fn scale_int(&self, c: &BigInt) -> Self {
        Self::from_terms(self.terms().map(|(p, a)| (p, a.scale(c))))
    }

    /// Multiplies by `u^shift`.
    pub fn shift_up(&self, shift: usize) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&p, c)| (p + shift, c.clone()))
                .collect(),
        }
    }

    /// Formal derivative with respect to the polynomial variable.
    pub fn derivative(&self) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|&(p, _)| p > 0)
                .map(|(p, c)| (p - 1, c.scale(&BigInt::from(p)))),
        )
    }

    /// Exact quotient by `u`.
    pub fn div_var(&self) -> Result<Self, Error> {
        if self.terms.contains_key(&0) {
            return Err(Error::NotDivisible);
        }
        Ok(Self {
            terms: self
                .terms
                .iter()
                .map(|(&p, c)| (p - 1, c.clone()))
                .collect(),
        })
    }

    pub fn pow(&self, exp: usize) -> Self {
        (0..exp).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Replaces every `u^(2m)` by `(a v^2 + b)^m` and expands.
    pub fn substitute_even(&self, sub: EvenSubstitution) -> Result<Self, Error> {
        if let Some((p, _)) = self.terms().find(|&(p, _)| p % 2 == 1) {
            return Err(Error::OddPowerPresent { power: p });
        }
        let quadratic = sub.as_upoly();
        let mut out = Self::zero();
        let mut power_of_quadratic = Self::one();
        let mut m = 0;
        for (p, c) in self.terms() {
            while 2 * m < p {
                power_of_quadratic = &power_of_quadratic * &quadratic;
                m += 1;
            }
            out = &out + &power_of_quadratic.scale(c);
        }
        Ok(out)
    }

    /// Whether every nonzero term has a power congruent to `parity` mod 2.
    pub fn has_parity(&self, parity: usize) -> bool {
        self.terms.keys().all(|p| p % 2 == parity % 2)
    }

    pub fn eval_complex(&self, n: Complex64, u: Complex64) -> Complex64 {
        self.eval_with(u, |c| c.eval_complex(n))
    }

    /// Horner evaluation in `u` with each coefficient mapped through `coeff`.
    pub fn eval_with<F>(&self, u: Complex64, mut coeff: F) -> Complex64
    where
        F: FnMut(&NPoly) -> Complex64,
    {
        let Some(deg) = self.degree() else {
            return Complex64::zero();
        };
        let mut acc = Complex64::zero();
        for p in (0..=deg).rev() {
            acc *= u;
            if let Some(c) = self.terms.get(&p) {
                acc += coeff(c);
            }
        }
        acc
    }

    /// Specializes every coefficient at an integer `n`.
    pub fn specialize(&self, n: &BigInt) -> Vec<BigInt> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        let mut out = vec![BigInt::zero(); deg + 1];
        for (p, c) in self.terms() {
            out[p] = c.eval_integer(n);
        }
        while out.last().is_some_and(Zero::is_zero) {
            out.pop();
        }
        out
    }
}

impl Add for &UPoly {
    type Output = UPoly;

    fn add(self, rhs: &UPoly) -> UPoly {
        let mut out = self.clone();
        for (p, c) in rhs.terms() {
            out.add_term(p, c.clone());
        }
        out
    }
}

impl Add for UPoly {
    type Output = UPoly;

    fn add(self, rhs: UPoly) -> UPoly {
        &self + &rhs
    }
}

impl Neg for &UPoly {
    type Output = UPoly;

    fn neg(self) -> UPoly {
        UPoly {
            terms: self.terms.iter().map(|(&p, c)| (p, -c)).collect(),
        }
    }
}

impl Neg for UPoly {
    type Output = UPoly;

    fn neg(self) -> UPoly {
        -&self
    }
}

impl Sub for &UPoly {
    type Output = UPoly;

    fn sub(self, rhs: &UPoly) -> UPoly {
        self + &(-rhs)
    }
}

impl Mul for &UPoly {
    type Output = UPoly;

    fn mul(self, rhs: &UPoly) -> UPoly {
        let mut out = UPoly::zero();
        for (p, a) in self.terms() {
            for (q, b) in rhs.terms() {
                out.add_term(p + q, a * b);
            }
        }
        out
    }
}

impl Mul for UPoly {
    type Output = UPoly;

    fn mul(self, rhs: UPoly) -> UPoly {
        &self * &rhs
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (p, c)) in self.terms().rev().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            match p {
                0 => {}
                1 => f.write_str(" u")?,
                _ => write!(f, " u^{p}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn np(c: &[i64]) -> NPoly {
        NPoly::from_i64s(c)
    }

    fn up(terms: &[(usize, &[i64])]) -> UPoly {
        UPoly::from_terms(terms.iter().map(|&(p, c)| (p, np(c))))
    }

    #[test]
    fn npoly_ring_examples() {
        let n = NPoly::n();
        let n_minus_1 = np(&[-1, 1]);
        assert_eq!(&n * &n_minus_1, np(&[0, -1, 1]));
        assert_eq!(&np(&[0, -1, 1]) + &n, np(&[0, 0, 1]));
        // (-3n^2 + 2n)(n - 3) = -3n^3 + 11n^2 - 6n
        assert_eq!(&np(&[0, 2, -3]) * &np(&[-3, 1]), np(&[0, -6, 11, -3]));
        assert_eq!(-np(&[0, 2, -3]), np(&[0, -2, 3]));
        assert!((&n - &n).is_zero());
    }

    #[test]
    fn npoly_normalizes_trailing_zeros() {
        assert_eq!(np(&[1, 2, 0, 0]).coeffs().len(), 2);
        assert_eq!(np(&[0, 0]), NPoly::zero());
        assert_eq!(NPoly::zero().degree(), None);
    }

    #[test]
    fn npoly_evaluation() {
        let p = np(&[0, -1, 1]);
        assert_eq!(p.eval_integer(&BigInt::from(0)), BigInt::from(0));
        assert_eq!(p.eval_integer(&BigInt::from(3)), BigInt::from(6));
        assert_eq!(NPoly::monomial(1, 3).eval_f64(2.5), 15.625);
        let half = BigRational::new(BigInt::from(5), BigInt::from(2));
        assert_eq!(
            NPoly::monomial(1, 3).eval_rational(&half),
            BigRational::new(BigInt::from(125), BigInt::from(8))
        );
    }

    #[test]
    fn npoly_display() {
        assert_eq!(np(&[0, 2, -3]).to_string(), "-3 n^2 + 2 n");
        assert_eq!(
            np(&[0, -6, 11, -6, 1]).to_string(),
            "n^4 - 6 n^3 + 11 n^2 - 6 n"
        );
        assert_eq!(np(&[-5]).to_string(), "-5");
        assert_eq!(NPoly::zero().to_string(), "0");
    }

    #[test]
    fn upoly_arithmetic_examples() {
        let nu = up(&[(1, &[0, 1])]);
        assert_eq!(&nu * &nu, up(&[(2, &[0, 0, 1])]));
        let a = up(&[(2, &[0, 0, 1]), (0, &[0, -1])]);
        assert_eq!(&a + &up(&[(0, &[0, 1])]), up(&[(2, &[0, 0, 1])]));
        let q = up(&[(2, &[1]), (0, &[-1])]);
        assert_eq!(q.scale(&NPoly::n()), up(&[(2, &[0, 1]), (0, &[0, -1])]));
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn upoly_derivative_examples() {
        let a = up(&[(2, &[0, 0, 1]), (0, &[0, -1])]);
        assert_eq!(a.derivative(), up(&[(1, &[0, 0, 2])]));
        assert!(UPoly::one().derivative().is_zero());
        let f3 = up(&[(3, &[0, 0, 0, 1]), (1, &[0, 2, -3])]);
        assert_eq!(f3.derivative(), up(&[(2, &[0, 0, 0, 3]), (0, &[0, 2, -3])]));
    }

    #[test]
    fn upoly_div_var_examples() {
        let f3 = up(&[(3, &[0, 0, 0, 1]), (1, &[0, 2, -3])]);
        assert_eq!(
            f3.div_var().unwrap(),
            up(&[(2, &[0, 0, 0, 1]), (0, &[0, 2, -3])])
        );
        assert_eq!(up(&[(1, &[0, 1])]).div_var().unwrap(), up(&[(0, &[0, 1])]));
        let f2 = up(&[(2, &[0, 0, 1]), (0, &[0, -1])]);
        assert_eq!(f2.div_var(), Err(Error::NotDivisible));
    }

    #[test]
    fn substitute_even_examples() {
        let f2 = up(&[(2, &[0, 0, 1]), (0, &[0, -1])]);
        assert_eq!(
            f2.substitute_even(EvenSubstitution::ONE_MINUS_SQUARE)
                .unwrap(),
            up(&[(2, &[0, 0, -1]), (0, &[0, -1, 1])])
        );
        assert_eq!(
            f2.substitute_even(EvenSubstitution::SQUARE_PLUS_ONE)
                .unwrap(),
            up(&[(2, &[0, 0, 1]), (0, &[0, -1, 1])])
        );
        for sub in [
            EvenSubstitution::ONE_MINUS_SQUARE,
            EvenSubstitution::SQUARE_PLUS_ONE,
            EvenSubstitution::SQUARE_MINUS_ONE,
        ] {
            assert_eq!(UPoly::one().substitute_even(sub).unwrap(), UPoly::one());
        }
        let odd = up(&[(3, &[1]), (2, &[1])]);
        assert_eq!(
            odd.substitute_even(EvenSubstitution::SQUARE_PLUS_ONE),
            Err(Error::OddPowerPresent { power: 3 })
        );
    }

    #[test]
    fn substitution_expands_powers_not_monomials() {
        // u^4 -> (1 - v^2)^2 = v^4 - 2 v^2 + 1
        let u4 = up(&[(4, &[1])]);
        assert_eq!(
            u4.substitute_even(EvenSubstitution::ONE_MINUS_SQUARE)
                .unwrap(),
            up(&[(4, &[1]), (2, &[-2]), (0, &[1])])
        );
    }

    #[test]
    fn large_coefficients_stay_exact() {
        let big = NPoly::constant(BigInt::from(u64::MAX));
        let sq = &big * &big;
        assert_eq!(sq.coeff(0), BigInt::from(u64::MAX) * BigInt::from(u64::MAX));
    }
}
