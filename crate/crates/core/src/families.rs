//! The four function families and the polynomial sequences behind their
//! derivatives.
//!
//! For the `n`-th power of a base function `b` with co-function `c`, the
//! `k`-th derivative is `b^(n-k)(x) * P_k(n)(c(x))` where `P_k` is one of the
//! intermediate sequences `f`, `g`, `h`:
//!
//! ```text
//! P_0 = 1
//! P_{k+1} = sign * ((n - k) u P_k + Q(u) P_k')
//! ```
//!
//! with `(sign, Q) = (+1, u^2 - 1)` for `f`, `(-1, u^2 - 1)` for `g` and
//! `(+1, u^2 + 1)` for `h`. `sin` and `sinh` share `f`, `cos` uses `g` and
//! `cosh` uses `h`.
//!
//! The final sequences (`s`, `c`, `t`, `d` for sin, cos, sinh, cosh) trade the
//! co-function for the base function through `sin^2 + cos^2 = 1` and
//! `cosh^2 - sinh^2 = 1`, after first dividing out a single `u` when `k` is
//! odd.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;

use crate::exactpoly::{EvenSubstitution, NPoly, UPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Sin,
    Cos,
    Sinh,
    Cosh,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Sin, Family::Cos, Family::Sinh, Family::Cosh];

    pub fn name(self) -> &'static str {
        match self {
            Family::Sin => "sin",
            Family::Cos => "cos",
            Family::Sinh => "sinh",
            Family::Cosh => "cosh",
        }
    }

    pub fn cofunction(self) -> Family {
        match self {
            Family::Sin => Family::Cos,
            Family::Cos => Family::Sin,
            Family::Sinh => Family::Cosh,
            Family::Cosh => Family::Sinh,
        }
    }

    pub fn is_trigonometric(self) -> bool {
        matches!(self, Family::Sin | Family::Cos)
    }

    pub fn sequence(self) -> Sequence {
        match self {
            Family::Sin | Family::Sinh => Sequence::F,
            Family::Cos => Sequence::G,
            Family::Cosh => Sequence::H,
        }
    }

    /// `u^2` (co-function squared) expressed through `v^2` (base squared).
    pub fn substitution(self) -> EvenSubstitution {
        match self {
            Family::Sin | Family::Cos => EvenSubstitution::ONE_MINUS_SQUARE,
            Family::Sinh => EvenSubstitution::SQUARE_PLUS_ONE,
            Family::Cosh => EvenSubstitution::SQUARE_MINUS_ONE,
        }
    }

    /// `v^2` expressed through `u^2`; undoes [`Family::substitution`].
    pub fn inverse_substitution(self) -> EvenSubstitution {
        match self {
            Family::Sin | Family::Cos => EvenSubstitution::ONE_MINUS_SQUARE,
            Family::Sinh => EvenSubstitution::SQUARE_MINUS_ONE,
            Family::Cosh => EvenSubstitution::SQUARE_PLUS_ONE,
        }
    }

    /// Evaluates the function itself.
    pub fn apply(self, x: Complex64) -> Complex64 {
        if x.im == 0.0 {
            let r = x.re;
            return Complex64::new(
                match self {
                    Family::Sin => r.sin(),
                    Family::Cos => r.cos(),
                    Family::Sinh => r.sinh(),
                    Family::Cosh => r.cosh(),
                },
                0.0,
            );
        }
        match self {
            Family::Sin => x.sin(),
            Family::Cos => x.cos(),
            Family::Sinh => x.sinh(),
            Family::Cosh => x.cosh(),
        }
    }

    pub fn apply_real(self, x: f64) -> f64 {
        self.apply(Complex64::new(x, 0.0)).re
    }

    /// Distance from real `x` to the nearest real zero of the function, or
    /// infinity for `cosh`.
    pub fn distance_to_zero(self, x: f64) -> f64 {
        use std::f64::consts::{FRAC_PI_2, PI};
        match self {
            Family::Sin => {
                let r = x.rem_euclid(PI);
                r.min(PI - r)
            }
            Family::Cos => {
                let r = (x - FRAC_PI_2).rem_euclid(PI);
                r.min(PI - r)
            }
            Family::Sinh => x.abs(),
            Family::Cosh => f64::INFINITY,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sin" => Ok(Family::Sin),
            "cos" => Ok(Family::Cos),
            "sinh" => Ok(Family::Sinh),
            "cosh" => Ok(Family::Cosh),
            other => Err(format!(
                "unknown family `{other}` (expected sin, cos, sinh or cosh)"
            )),
        }
    }
}

/// Tag of an intermediate polynomial sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sequence {
    F,
    G,
    H,
}

impl Sequence {
    pub const ALL: [Sequence; 3] = [Sequence::F, Sequence::G, Sequence::H];

    fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Sequence::F => "f",
            Sequence::G => "g",
            Sequence::H => "h",
        }
    }

    fn sign(self) -> i64 {
        match self {
            Sequence::F | Sequence::H => 1,
            Sequence::G => -1,
        }
    }

    /// The quadratic multiplying `P_k'` in the recurrence.
    fn derivative_factor(self) -> UPoly {
        let constant = match self {
            Sequence::F | Sequence::G => -1,
            Sequence::H => 1,
        };
        UPoly::from_terms([(2, NPoly::one()), (0, NPoly::constant(constant))])
    }
}

/// One recurrence step: computes `P_{k+1}` from `P_k`.
pub fn recurrence_step(seq: Sequence, k: usize, prev: &UPoly) -> UPoly {
    let n_minus_k = &NPoly::n() - &NPoly::constant(BigInt::from(k));
    let first = prev.shift_up(1).scale(&n_minus_k);
    let second = &seq.derivative_factor() * &prev.derivative();
    let sum = &first + &second;
    if seq.sign() < 0 {
        -sum
    } else {
        sum
    }
}

/// Runs the recurrence from scratch, returning `P_0..=P_max_k`. Independent of
/// any cache.
pub fn run_recurrence(seq: Sequence, max_k: usize) -> Vec<UPoly> {
    let mut out = Vec::with_capacity(max_k + 1);
    out.push(UPoly::one());
    for k in 0..max_k {
        let next = recurrence_step(seq, k, &out[k]);
        out.push(next);
    }
    out
}

/// How the `g` sequence is produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GStrategy {
    /// `g_k = (-1)^k f_k`.
    #[default]
    FromF,
    /// The `g` recurrence itself, independent of `f`.
    Recurrence,
}

/// Memoized intermediate sequences. Readers share a lock; extending a
/// sequence takes the write lock, so extension is serialized.
#[derive(Debug, Default)]
pub struct SequenceCache {
    entries: [RwLock<Vec<Arc<UPoly>>>; 3],
    g_strategy: GStrategy,
}

impl SequenceCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_g_strategy(g_strategy: GStrategy) -> Self {
        Self {
            g_strategy,
            ..Self::default()
        }
    }

    pub fn g_strategy(&self) -> GStrategy {
        self.g_strategy
    }

    /// The intermediate polynomial `P_k` for `seq`; fills `0..=k` if needed.
    pub fn intermediate(&self, seq: Sequence, k: usize) -> Arc<UPoly> {
        if let Some(p) = self.entries[seq.index()].read().unwrap().get(k) {
            return Arc::clone(p);
        }
        if seq == Sequence::G && self.g_strategy == GStrategy::FromF {
            // fill f first so the g lock is never held while taking f's
            self.intermediate(Sequence::F, k);
        }
        let mut guard = self.entries[seq.index()].write().unwrap();
        while guard.len() <= k {
            let next_k = guard.len();
            let next = match (seq, self.g_strategy) {
                _ if next_k == 0 => UPoly::one(),
                (Sequence::G, GStrategy::FromF) => {
                    let f = self.entries[Sequence::F.index()].read().unwrap()[next_k].clone();
                    if next_k.is_multiple_of(2) {
                        (*f).clone()
                    } else {
                        -&*f
                    }
                }
                _ => recurrence_step(seq, next_k - 1, &guard[next_k - 1]),
            };
            guard.push(Arc::new(next));
        }
        Arc::clone(&guard[k])
    }

    /// The final polynomial (in `v`, the base-function value) for `family`.
    pub fn final_poly(&self, family: Family, k: usize) -> UPoly {
        let inter = self.intermediate(family.sequence(), k);
        let even_part = if k % 2 == 1 {
            inter
                .div_var()
                .expect("odd-k intermediate polynomials have no constant term")
        } else {
            (*inter).clone()
        };
        even_part
            .substitute_even(family.substitution())
            .expect("intermediate polynomials have the parity of k")
    }

    /// Test hook: perturbs a cached entry so verification failure paths can
    /// be exercised. Computes `0..=k` first.
    #[doc(hidden)]
    pub fn corrupt_entry_for_testing(&self, seq: Sequence, k: usize) {
        self.intermediate(seq, k);
        let mut guard = self.entries[seq.index()].write().unwrap();
        let mut bad = (*guard[k]).clone();
        bad.add_term(k, NPoly::one());
        guard[k] = Arc::new(bad);
    }
}

/// The process-wide cache behind the free functions.
pub fn shared_cache() -> &'static SequenceCache {
    static CACHE: OnceLock<SequenceCache> = OnceLock::new();
    CACHE.get_or_init(SequenceCache::new)
}

/// `P_k` for `seq`, from the process-wide cache.
pub fn intermediate_poly(seq: Sequence, k: usize) -> Arc<UPoly> {
    shared_cache().intermediate(seq, k)
}

/// Final polynomial for `family`, from the process-wide cache.
pub fn final_poly(family: Family, k: usize) -> UPoly {
    shared_cache().final_poly(family, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(terms: &[(usize, &[i64])]) -> UPoly {
        UPoly::from_terms(terms.iter().map(|&(p, c)| (p, NPoly::from_i64s(c))))
    }

    #[test]
    fn sequence_mapping() {
        assert_eq!(Family::Sin.sequence(), Sequence::F);
        assert_eq!(Family::Sinh.sequence(), Sequence::F);
        assert_eq!(Family::Cos.sequence(), Sequence::G);
        assert_eq!(Family::Cosh.sequence(), Sequence::H);
    }

    #[test]
    fn intermediate_examples() {
        assert_eq!(*intermediate_poly(Sequence::F, 0), UPoly::one());
        assert_eq!(
            *intermediate_poly(Sequence::F, 2),
            up(&[(2, &[0, 0, 1]), (0, &[0, -1])])
        );
        assert_eq!(*intermediate_poly(Sequence::G, 1), up(&[(1, &[0, -1])]));
        assert_eq!(
            *intermediate_poly(Sequence::H, 2),
            up(&[(2, &[0, 0, 1]), (0, &[0, 1])])
        );
    }

    #[test]
    fn final_examples() {
        assert_eq!(
            final_poly(Family::Sin, 4),
            up(&[
                (4, &[0, 0, 0, 0, 1]),
                (2, &[0, 4, -8, 6, -2]),
                (0, &[0, -6, 11, -6, 1]),
            ])
        );
        assert_eq!(
            final_poly(Family::Sinh, 3),
            up(&[(2, &[0, 0, 0, 1]), (0, &[0, 2, -3, 1])])
        );
        assert_eq!(final_poly(Family::Cos, 0), UPoly::one());
    }

    #[test]
    fn g_strategies_agree() {
        let a = SequenceCache::with_g_strategy(GStrategy::FromF);
        let b = SequenceCache::with_g_strategy(GStrategy::Recurrence);
        for k in 0..12 {
            assert_eq!(
                a.intermediate(Sequence::G, k),
                b.intermediate(Sequence::G, k)
            );
        }
    }

    #[test]
    fn cache_matches_fresh_recurrence() {
        let cache = SequenceCache::new();
        let fresh = run_recurrence(Sequence::H, 9);
        // request out of order to exercise partial fills
        assert_eq!(*cache.intermediate(Sequence::H, 5), fresh[5]);
        assert_eq!(*cache.intermediate(Sequence::H, 9), fresh[9]);
        assert_eq!(*cache.intermediate(Sequence::H, 2), fresh[2]);
    }

    #[test]
    fn concurrent_readers_see_identical_values() {
        let cache = Arc::new(SequenceCache::new());
        let handles: Vec<_> = (0..4)
            .map(|i| {
                let cache = Arc::clone(&cache);
                std::thread::spawn(move || cache.intermediate(Sequence::F, 10 + i % 2))
            })
            .collect();
        let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        let fresh = run_recurrence(Sequence::F, 11);
        for (i, r) in results.iter().enumerate() {
            assert_eq!(**r, fresh[10 + i % 2]);
        }
    }

    #[test]
    fn family_distance_to_zero() {
        assert!(
            (Family::Cos.distance_to_zero(1.7) - (1.7 - std::f64::consts::FRAC_PI_2)).abs() < 1e-15
        );
        assert!((Family::Sin.distance_to_zero(-0.3) - 0.3).abs() < 1e-15);
        assert!((Family::Sin.distance_to_zero(3.0) - (std::f64::consts::PI - 3.0)).abs() < 1e-15);
        assert_eq!(Family::Cosh.distance_to_zero(0.0), f64::INFINITY);
    }
}
