//! Numeric evaluation of the derivative identities.
//!
//! Three routes are available: the intermediate identity
//! `b^(n-k) * P_k(n)(c)`, the final identity `b^(n-k) * [c] * S_k(n)(b)` (the
//! co-function factor appears only for odd `k`), and a finite-difference
//! oracle on `b(x)^n` that knows nothing about either polynomial.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::error::Error;
use crate::exactpoly::{big_to_f64, UPoly};
use crate::families::{shared_cache, Family, SequenceCache};

/// `|b(x)|` below this counts as a zero of the base function.
pub const POLE_THRESHOLD: f64 = 1e-12;

/// Highest derivative order supported by [`finite_difference`].
pub const MAX_FD_ORDER: usize = 6;

/// Smallest accepted finite-difference step.
pub const MIN_STEP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Form {
    Intermediate,
    Final,
}

impl Form {
    pub fn name(self) -> &'static str {
        match self {
            Form::Intermediate => "intermediate",
            Form::Final => "final",
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Form {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "intermediate" => Ok(Form::Intermediate),
            "final" => Ok(Form::Final),
            other => Err(format!(
                "unknown form `{other}` (expected intermediate or final)"
            )),
        }
    }
}

/// The exponent `n`: an integer, or a real number (supported only where the
/// base function is real and nonnegative).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Integer(i64),
    Real(f64),
}

impl Exponent {
    /// Integral reals collapse to [`Exponent::Integer`].
    pub fn normalized(self) -> Self {
        match self {
            Exponent::Real(r) if r.fract() == 0.0 && r.abs() < 9.0e15 => {
                Exponent::Integer(r as i64)
            }
            other => other,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Integer(n) => n as f64,
            Exponent::Real(r) => r,
        }
    }

    /// True for integers `>= 0`, where every power is an entire function.
    pub fn is_natural(self) -> bool {
        matches!(self.normalized(), Exponent::Integer(n) if n >= 0)
    }
}

impl From<i64> for Exponent {
    fn from(n: i64) -> Self {
        Exponent::Integer(n)
    }
}

impl From<f64> for Exponent {
    fn from(r: f64) -> Self {
        Exponent::Real(r).normalized()
    }
}

impl FromStr for Exponent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Ok(n) = s.parse::<i64>() {
            return Ok(Exponent::Integer(n));
        }
        match s.parse::<f64>() {
            Ok(r) if r.is_finite() => Ok(Exponent::Real(r).normalized()),
            _ => Err(format!("invalid exponent `{s}`")),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Integer(n) => write!(f, "{n}"),
            Exponent::Real(r) => write!(f, "{r}"),
        }
    }
}

/// `d^k/dx^k [b^n(x)]` written as `b^(n-k)(x) * [cofactor] * poly`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivativeExpression {
    pub family: Family,
    pub k: usize,
    pub form: Form,
    /// A single co-function factor in front of the polynomial; only the
    /// final form of an odd derivative has one.
    pub cofactor: bool,
    /// In the co-function value `u` (intermediate) or base value `v` (final).
    pub poly: UPoly,
}

impl DerivativeExpression {
    /// Base exponent `n - k` at a concrete `n`.
    pub fn base_exponent(&self, n: Exponent) -> Exponent {
        match n.normalized() {
            Exponent::Integer(n) => Exponent::Integer(n - self.k as i64),
            Exponent::Real(r) => Exponent::Real(r - self.k as f64),
        }
    }

    /// Reduces an intermediate-form expression to the final form.
    pub fn to_final(&self) -> DerivativeExpression {
        if self.form == Form::Final {
            return self.clone();
        }
        let even = if self.k % 2 == 1 {
            self.poly
                .div_var()
                .expect("odd intermediate poly has no constant term")
        } else {
            self.poly.clone()
        };
        DerivativeExpression {
            family: self.family,
            k: self.k,
            form: Form::Final,
            cofactor: self.k % 2 == 1,
            poly: even
                .substitute_even(self.family.substitution())
                .expect("intermediate poly has the parity of k"),
        }
    }
}

pub fn build_expression(family: Family, k: usize, form: Form) -> DerivativeExpression {
    build_expression_with(shared_cache(), family, k, form)
}

pub fn build_expression_with(
    cache: &SequenceCache,
    family: Family,
    k: usize,
    form: Form,
) -> DerivativeExpression {
    match form {
        Form::Intermediate => DerivativeExpression {
            family,
            k,
            form,
            cofactor: false,
            poly: (*cache.intermediate(family.sequence(), k)).clone(),
        },
        Form::Final => DerivativeExpression {
            family,
            k,
            form,
            cofactor: k % 2 == 1,
            poly: cache.final_poly(family, k),
        },
    }
}

fn base_is_zero(b: Complex64) -> bool {
    b.norm() < POLE_THRESHOLD
}

/// Evaluates the expression at exponent `n` and point `x`.
///
/// For natural `n` at a zero of the base function the removable singularity
/// is cancelled exactly via [`specialize_expression`].
pub fn evaluate(
    expr: &DerivativeExpression,
    n: Exponent,
    x: Complex64,
) -> Result<Complex64, Error> {
    let family = expr.family;
    let b = family.apply(x);
    let co = family.cofunction().apply(x);
    let var = match expr.form {
        Form::Final => b,
        Form::Intermediate => co,
    };
    let cofactor = if expr.cofactor {
        co
    } else {
        Complex64::new(1.0, 0.0)
    };

    match n.normalized() {
        Exponent::Integer(n_int) => {
            let e = n_int - expr.k as i64;
            if e < 0 && base_is_zero(b) {
                if n_int >= 0 {
                    return specialize_expression(expr, n_int)?.evaluate(x);
                }
                return Err(Error::PoleAtEvaluationPoint { exponent: e as f64 });
            }
            let n_big = BigInt::from(n_int);
            let poly = expr.poly.eval_with(var, |c| {
                Complex64::new(big_to_f64(&c.eval_integer(&n_big)), 0.0)
            });
            Ok(powi(b, e) * cofactor * poly)
        }
        Exponent::Real(r) => {
            if b.im.abs() > POLE_THRESHOLD || b.re < -POLE_THRESHOLD {
                return Err(Error::NonIntegerNeedsPositiveBase { n: r });
            }
            let e = r - expr.k as f64;
            let base = b.re.max(0.0);
            if e < 0.0 && base < POLE_THRESHOLD {
                return Err(Error::PoleAtEvaluationPoint { exponent: e });
            }
            let poly = expr
                .poly
                .eval_with(var, |c| Complex64::new(c.eval_f64(r), 0.0));
            Ok(cofactor * poly * base.powf(e))
        }
    }
}

fn powi(b: Complex64, e: i64) -> Complex64 {
    if b.im == 0.0 {
        return Complex64::new(b.re.powi(e as i32), 0.0);
    }
    b.powi(e as i32)
}

/// The final identity at a fixed integer `n`, with exact integer
/// coefficients and removable singularities cancelled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecializedExpression {
    pub family: Family,
    pub k: usize,
    pub n: i64,
    pub reduced_exponent: i64,
    pub cofactor: bool,
    /// Ascending powers of `v`, trailing zeros removed.
    pub poly_v: Vec<BigInt>,
}

impl SpecializedExpression {
    pub fn evaluate(&self, x: Complex64) -> Result<Complex64, Error> {
        let b = self.family.apply(x);
        if self.reduced_exponent < 0 && base_is_zero(b) {
            return Err(Error::PoleAtEvaluationPoint {
                exponent: self.reduced_exponent as f64,
            });
        }
        let poly = self
            .poly_v
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, c| acc * b + big_to_f64(c));
        let cofactor = if self.cofactor {
            self.family.cofunction().apply(x)
        } else {
            Complex64::new(1.0, 0.0)
        };
        Ok(powi(b, self.reduced_exponent) * cofactor * poly)
    }
}

pub fn specialize(family: Family, k: usize, n: i64) -> Result<SpecializedExpression, Error> {
    specialize_expression(&build_expression(family, k, Form::Final), n)
}

/// Specializes at integer `n`. For `0 <= n < k` the whole power of `v`
/// dividing the polynomial is cancelled against `b^(n-k)`; it must be at
/// least `v^(k-n)` because the derivative of a natural power is entire.
pub fn specialize_expression(
    expr: &DerivativeExpression,
    n: i64,
) -> Result<SpecializedExpression, Error> {
    let expr = expr.to_final();
    let mut poly_v = expr.poly.specialize(&BigInt::from(n));
    let mut reduced_exponent = n - expr.k as i64;
    if n >= 0 && reduced_exponent < 0 {
        let needed = (-reduced_exponent) as usize;
        match poly_v.iter().position(|c| !c.is_zero()) {
            None => reduced_exponent = 0,
            Some(lowest) if lowest >= needed => {
                poly_v.drain(..lowest);
                reduced_exponent += lowest as i64;
            }
            Some(_) => return Err(Error::InternalCancellationFailure { expected: needed }),
        }
    }
    Ok(SpecializedExpression {
        family: expr.family,
        k: expr.k,
        n,
        reduced_exponent,
        cofactor: expr.cofactor,
        poly_v,
    })
}

/// Second-order central difference for the `k`-th derivative, improved by one
/// Richardson step over `h` and `h/2`.
///
/// The stencil is `sum_j (-1)^j C(k,j) f(x + (k/2 - j) h) / h^k`.
pub fn central_difference<F>(f: F, x: f64, k: usize, h: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let stencil = |h: f64| {
        let mut sum = 0.0;
        let mut c = 1.0;
        for j in 0..=k {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * c * f(x + (k as f64 / 2.0 - j as f64) * h);
            c = c * (k - j) as f64 / (j + 1) as f64;
        }
        sum / h.powi(k as i32)
    };
    (4.0 * stencil(h / 2.0) - stencil(h)) / 3.0
}

/// Step used when none is given: grows with `k` to hold roundoff down and
/// shrinks near a pole of a negative or fractional power.
pub fn default_step(family: Family, n: Exponent, k: usize, x: f64) -> f64 {
    let h: f64 = match k {
        0..=4 => 1e-2,
        5 => 2e-2,
        _ => 3e-2,
    };
    if n.is_natural() {
        h
    } else {
        h.min(0.02 * family.distance_to_zero(x))
    }
}

/// Numeric `k`-th derivative of `family(x)^n` at real `x`.
pub fn finite_difference(
    family: Family,
    n: Exponent,
    k: usize,
    x: f64,
    h: f64,
) -> Result<f64, Error> {
    if k > MAX_FD_ORDER {
        return Err(Error::OrderTooHigh {
            k,
            max: MAX_FD_ORDER,
        });
    }
    if h.is_nan() || h < MIN_STEP {
        return Err(Error::StepTooSmall(h));
    }
    let n = n.normalized();
    if !n.is_natural() {
        let distance = family.distance_to_zero(x);
        if distance < 10.0 * h {
            return Err(Error::PoleNearby { distance, step: h });
        }
    }
    match n {
        Exponent::Integer(p) => {
            let p = p.to_i32().unwrap_or(i32::MAX);
            Ok(central_difference(
                |t| family.apply_real(t).powi(p),
                x,
                k,
                h,
            ))
        }
        Exponent::Real(r) => {
            if family.apply_real(x) <= 0.0 {
                return Err(Error::NonIntegerNeedsPositiveBase { n: r });
            }
            Ok(central_difference(
                |t| family.apply_real(t).powf(r),
                x,
                k,
                h,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::NPoly;
    use std::f64::consts::FRAC_PI_2;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn build_examples() {
        let e = build_expression(Family::Sin, 2, Form::Final);
        assert!(!e.cofactor);
        assert_eq!(
            e.poly,
            UPoly::from_terms([
                (2, NPoly::from_i64s(&[0, 0, -1])),
                (0, NPoly::from_i64s(&[0, -1, 1]))
            ])
        );
        let e = build_expression(Family::Cos, 3, Form::Final);
        assert!(e.cofactor);
        assert_eq!(
            e.poly,
            UPoly::from_terms([
                (2, NPoly::from_i64s(&[0, 0, 0, 1])),
                (0, NPoly::from_i64s(&[0, -2, 3, -1]))
            ])
        );
        for family in Family::ALL {
            for form in [Form::Intermediate, Form::Final] {
                let e = build_expression(family, 0, form);
                assert_eq!(e.poly, UPoly::one());
                assert_eq!(e.base_exponent(Exponent::Integer(7)), Exponent::Integer(7));
            }
        }
    }

    #[test]
    fn evaluate_examples() {
        let e = build_expression(Family::Sin, 2, Form::Final);
        let v = evaluate(&e, 1.into(), re(0.7)).unwrap();
        assert!(close(v.re, -(0.7f64.sin()), 1e-14));

        let e = build_expression(Family::Sin, 1, Form::Final);
        let v = evaluate(&e, (-1).into(), re(FRAC_PI_2)).unwrap();
        assert!(v.norm() < 1e-15);
        assert!(matches!(
            evaluate(&e, (-1).into(), re(0.0)),
            Err(Error::PoleAtEvaluationPoint { .. })
        ));

        let e = build_expression(Family::Cosh, 1, Form::Final);
        let v = evaluate(&e, Exponent::Real(2.5), re(0.4)).unwrap();
        let want = 2.5 * 0.4f64.cosh().powf(1.5) * 0.4f64.sinh();
        assert!(close(v.re, want, 1e-14));
    }

    #[test]
    fn real_exponent_needs_nonnegative_base() {
        let e = build_expression(Family::Sin, 1, Form::Final);
        assert!(matches!(
            evaluate(&e, Exponent::Real(2.5), re(-0.5)),
            Err(Error::NonIntegerNeedsPositiveBase { .. })
        ));
        assert!(evaluate(&e, Exponent::Real(2.5), re(0.5)).is_ok());
        // sin^0.5 has a branch point at 0 with a negative exponent after one derivative
        assert!(matches!(
            evaluate(&e, Exponent::Real(0.5), re(0.0)),
            Err(Error::PoleAtEvaluationPoint { .. })
        ));
    }

    #[test]
    fn natural_powers_evaluate_at_zeros_of_the_base() {
        // (sin x)'' = -sin x, fine at x = 0 although n - k = -1
        let e = build_expression(Family::Sin, 2, Form::Final);
        let v = evaluate(&e, 1.into(), re(0.0)).unwrap();
        assert_eq!(v, re(0.0));
        // (sin^2)'''' = -8 cos 2x
        let e = build_expression(Family::Sin, 4, Form::Intermediate);
        let v = evaluate(&e, 2.into(), re(0.0)).unwrap();
        assert!(close(v.re, -8.0, 1e-14));
    }

    #[test]
    fn specialize_examples() {
        let s = specialize(Family::Sin, 2, 1).unwrap();
        assert_eq!(s.reduced_exponent, 1);
        assert_eq!(s.poly_v, vec![BigInt::from(-1)]);

        let s = specialize(Family::Sin, 4, 2).unwrap();
        assert_eq!(s.reduced_exponent, 0);
        assert_eq!(
            s.poly_v,
            vec![BigInt::from(-8), BigInt::zero(), BigInt::from(16)]
        );

        let s = specialize(Family::Cosh, 0, 5).unwrap();
        assert_eq!(s.reduced_exponent, 5);
        assert_eq!(s.poly_v, vec![BigInt::from(1)]);

        let s = specialize(Family::Sin, 3, 0).unwrap();
        assert!(s.poly_v.is_empty());
        assert_eq!(s.reduced_exponent, 0);
    }

    #[test]
    fn negative_n_is_not_cancelled() {
        let s = specialize(Family::Sin, 2, -1).unwrap();
        assert_eq!(s.reduced_exponent, -3);
    }

    #[test]
    fn finite_difference_examples() {
        let x = 0.5f64;
        let v = finite_difference(Family::Sin, 3.into(), 1, x, 1e-2).unwrap();
        assert!(close(v, 3.0 * x.sin().powi(2) * x.cos(), 1e-5));

        let v = finite_difference(Family::Cos, 0.into(), 2, 1.0, 1e-2).unwrap();
        assert!(v.abs() < 1e-5);

        let e = build_expression(Family::Sinh, 3, Form::Final);
        let want = evaluate(&e, 4.into(), re(0.8)).unwrap().re;
        let v = finite_difference(Family::Sinh, 4.into(), 3, 0.8, 1e-2).unwrap();
        assert!(close(v, want, 1e-5));
    }

    #[test]
    fn finite_difference_errors() {
        assert!(matches!(
            finite_difference(Family::Sin, 2.into(), 2, 0.3, 1e-7),
            Err(Error::StepTooSmall(_))
        ));
        assert!(matches!(
            finite_difference(Family::Sin, (-1).into(), 2, 0.05, 1e-2),
            Err(Error::PoleNearby { .. })
        ));
        assert!(matches!(
            finite_difference(Family::Sin, 2.into(), 7, 0.3, 1e-2),
            Err(Error::OrderTooHigh { .. })
        ));
        // natural powers have no poles
        assert!(finite_difference(Family::Sin, 2.into(), 2, 0.0, 1e-2).is_ok());
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("3".parse::<Exponent>().unwrap(), Exponent::Integer(3));
        assert_eq!("-2".parse::<Exponent>().unwrap(), Exponent::Integer(-2));
        assert_eq!("2.5".parse::<Exponent>().unwrap(), Exponent::Real(2.5));
        assert_eq!("4.0".parse::<Exponent>().unwrap(), Exponent::Integer(4));
        assert!("abc".parse::<Exponent>().is_err());
        assert!("inf".parse::<Exponent>().is_err());
    }
}
