//! The verification suite behind `trigpow check`.
//!
//! Every group walks a fixed grid so the output is reproducible; a seed adds
//! extra random evaluation points to the specialization group.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::closedform::{binomial_derivative, binomial_row, exp_power_derivative};
use crate::evaluator::{
    build_expression_with, central_difference, default_step, evaluate, finite_difference,
    specialize_expression, DerivativeExpression, Exponent, Form,
};
use crate::exactpoly::{NPoly, UPoly};
use crate::families::{run_recurrence, Family, Sequence, SequenceCache};
use crate::golden;
use crate::render::{render_expression, RenderFormat, RenderOptions};
use crate::triangle::verify_triangle_with;

/// Real evaluation grid.
pub const REAL_GRID: [f64; 7] = [1.7, -1.7, 0.9, -0.9, 0.3, -0.3, 0.1];

/// Complex points used for the polynomial-vs-binomial comparison.
pub const COMPLEX_POINTS: [(f64, f64); 2] = [(0.3, 0.4), (-1.0, 0.25)];

pub const THREE_WAY_TOLERANCE: f64 = 1e-9;
pub const FD_TOLERANCE: f64 = 1e-5;
pub const FD_TOLERANCE_HIGH_ORDER: f64 = 1e-3;
pub const CHAIN_TOLERANCE: f64 = 1e-4;
pub const SPECIALIZATION_TOLERANCE: f64 = 1e-12;
pub const CYCLE_TOLERANCE: f64 = 1e-10;

/// Closeness relative to the larger magnitude, with an absolute floor of
/// `tol` for values below 1.
pub fn rel_close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

/// Sum of absolute term values of a polynomial-form evaluation at integer
/// `n`: the magnitude floating-point roundoff scales with.
pub fn evaluation_scale(expr: &DerivativeExpression, n: i64, x: Complex64) -> f64 {
    let family = expr.family;
    let b = family.apply(x).norm();
    let co = family.cofunction().apply(x).norm();
    let var = match expr.form {
        Form::Final => b,
        Form::Intermediate => co,
    };
    let cofactor = if expr.cofactor { co } else { 1.0 };
    let n_big = BigInt::from(n);
    let sum: f64 = expr
        .poly
        .terms()
        .map(|(p, c)| {
            c.eval_integer(&n_big)
                .to_f64()
                .unwrap_or(f64::INFINITY)
                .abs()
                * var.powi(p as i32)
        })
        .sum();
    b.powi((n - expr.k as i64) as i32) * cofactor * sum
}

/// Sum of absolute term values of the binomial closed form.
pub fn binomial_scale(family: Family, n: i64, k: usize, x: Complex64) -> f64 {
    let row = binomial_row(n as u32);
    let growth = if family.is_trigonometric() {
        -x.im
    } else {
        x.re
    };
    row.iter()
        .enumerate()
        .map(|(r, c)| {
            let m = (2 * r as i64 - n) as f64;
            c.to_f64().unwrap_or(f64::INFINITY) * m.abs().powi(k as i32) * (m * growth).exp()
        })
        .sum::<f64>()
        / 2f64.powi(n as i32)
}

/// [`rel_close`] with the floor raised to `scale`, for values computed by
/// summing terms of that total magnitude.
pub fn scaled_close(a: Complex64, b: Complex64, scale: f64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(scale).max(1.0)
}

fn show_lead(c: Option<&NPoly>) -> String {
    c.map_or_else(|| "none".to_string(), ToString::to_string)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn fd_tolerance(k: usize) -> f64 {
    if k <= 4 {
        FD_TOLERANCE
    } else {
        FD_TOLERANCE_HIGH_ORDER
    }
}

/// Twenty fixed points in `[-1.9, 1.9]`, none at a zero of any family.
pub fn specialization_points() -> Vec<f64> {
    (0..20)
        .map(|i| -1.9 + 0.2 * f64::from(i) + 0.0137)
        .collect()
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub max_k: usize,
    pub max_n: i64,
    pub tolerance: f64,
    pub seed: Option<u64>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            max_k: 12,
            max_n: 8,
            tolerance: THREE_WAY_TOLERANCE,
            seed: None,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GroupResult {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl GroupResult {
    pub fn new(name: &'static str) -> Self {
        Self {
            name,
            ..Self::default()
        }
    }

    pub fn assert(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(describe());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CheckReport {
    pub groups: Vec<GroupResult>,
    /// Informational findings that do not fail the suite.
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.groups.iter().all(GroupResult::passed)
    }

    pub fn total_checks(&self) -> usize {
        self.groups.iter().map(|g| g.checks).sum()
    }

    pub fn total_failures(&self) -> usize {
        self.groups.iter().map(|g| g.failures.len()).sum()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.groups {
            let status = if g.passed() { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "{status} {:<16} {} checks, {} failures",
                g.name,
                g.checks,
                g.failures.len()
            )?;
        }
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        write!(
            f,
            "total: {} checks, {} failures",
            self.total_checks(),
            self.total_failures()
        )
    }
}

pub fn run_checks(cache: &SequenceCache, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::default();
    report.groups.push(check_structure(cache, cfg.max_k));
    report.groups.push(check_golden(cache, cfg.max_k));
    report.groups.push(check_three_way(cache, cfg));
    report.groups.push(check_oracle(cache, cfg));
    let (triangle, notes) = check_triangle(cache, cfg.max_k);
    report.groups.push(triangle);
    report.notes.extend(notes);
    report.groups.push(check_conventions(cache, cfg.max_k));
    report.groups.push(check_specialization(cache, cfg));
    report
}

fn sign_pow(k: usize) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sign of the final polynomial's leading coefficient, which is `±n^k`.
pub fn final_leading_sign(family: Family, k: usize) -> i64 {
    match family {
        Family::Sinh | Family::Cosh => 1,
        Family::Sin => {
            if k % 4 <= 1 {
                1
            } else {
                -1
            }
        }
        Family::Cos => {
            if matches!(k % 4, 0 | 3) {
                1
            } else {
                -1
            }
        }
    }
}

pub fn check_structure(cache: &SequenceCache, max_k: usize) -> GroupResult {
    let mut g = GroupResult::new("structure");
    let g_by_recurrence = run_recurrence(Sequence::G, max_k);
    for seq in Sequence::ALL {
        for k in 0..=max_k {
            let p = cache.intermediate(seq, k);
            let tag = seq.name();
            g.assert(p.degree() == Some(k), || {
                format!("{tag}_{k}: degree {:?}", p.degree())
            });
            let lead = match seq {
                Sequence::G => sign_pow(k),
                _ => 1,
            };
            g.assert(p.leading() == Some(&NPoly::monomial(lead, k)), || {
                format!(
                    "{tag}_{k}: leading coefficient {}, want {}",
                    show_lead(p.leading()),
                    NPoly::monomial(lead, k)
                )
            });
            g.assert(p.has_parity(k), || format!("{tag}_{k}: parity broken"));
            for (r, c) in p.terms() {
                let want = (k + r) / 2;
                g.assert(r <= k && c.degree() == Some(want), || {
                    format!(
                        "{tag}_{k}: coefficient of u^{r} has degree {:?}, want {want}",
                        c.degree()
                    )
                });
            }
            for r in (0..=k).filter(|r| (k - r) % 2 == 0) {
                g.assert(p.coeff(r).is_some(), || format!("{tag}_{k}: u^{r} missing"));
            }
            if k >= 1 {
                g.assert(p.specialize(&BigInt::zero()).is_empty(), || {
                    format!("{tag}_{k}: does not vanish at n = 0")
                });
            }
        }
    }
    for (k, gk) in g_by_recurrence.iter().enumerate() {
        let f = cache.intermediate(Sequence::F, k);
        let want = f.scale_int(&BigInt::from(sign_pow(k)));
        g.assert(*gk == want, || format!("g_{k} != (-1)^{k} f_{k}"));
        g.assert(*cache.intermediate(Sequence::G, k) == *gk, || {
            format!("cached g_{k} differs from the g recurrence")
        });
    }
    for k in 0..=max_k {
        let finals: Vec<(Family, UPoly)> = Family::ALL
            .iter()
            .map(|&fam| (fam, cache.final_poly(fam, k)))
            .collect();
        let want_deg = k - k % 2;
        for (fam, s) in &finals {
            g.assert(s.degree() == Some(want_deg), || {
                format!(
                    "{fam} final k={k}: degree {:?}, want {want_deg}",
                    s.degree()
                )
            });
            let lead = final_leading_sign(*fam, k);
            g.assert(s.leading() == Some(&NPoly::monomial(lead, k)), || {
                format!(
                    "{fam} final k={k}: leading {}, want {}",
                    show_lead(s.leading()),
                    NPoly::monomial(lead, k)
                )
            });
            g.assert(s.has_parity(0), || {
                format!("{fam} final k={k}: odd power present")
            });
            let back = s.substitute_even(fam.inverse_substitution());
            let inter = cache.intermediate(fam.sequence(), k);
            let want = if k % 2 == 1 {
                inter.div_var().ok()
            } else {
                Some((*inter).clone())
            };
            g.assert(back.ok() == want, || {
                format!("{fam} final k={k}: round trip failed")
            });
        }
        let s = &finals[0].1;
        let c = &finals[1].1;
        g.assert(*c == s.scale_int(&BigInt::from(sign_pow(k))), || {
            format!("c_{k} != (-1)^{k} s_{k}")
        });
    }
    g
}

pub fn check_golden(cache: &SequenceCache, max_k: usize) -> GroupResult {
    let mut g = GroupResult::new("golden");
    let latex = RenderOptions::new(RenderFormat::Latex);
    let text = RenderOptions::new(RenderFormat::Text);
    for entry in golden::entries().into_iter().filter(|e| e.k <= max_k) {
        let expr = build_expression_with(cache, entry.family, entry.k, entry.form);
        let got = render_expression(&expr, &latex);
        g.assert(got == entry.latex, || {
            format!(
                "{} k={} {}: got `{got}`, want `{}`",
                entry.family, entry.k, entry.form, entry.latex
            )
        });
        let got = render_expression(&expr, &text);
        let want = entry.text();
        g.assert(got == want, || {
            format!(
                "{} k={} {} (text): got `{got}`, want `{want}`",
                entry.family, entry.k, entry.form
            )
        });
    }
    g
}

fn eval_points() -> impl Iterator<Item = Complex64> {
    REAL_GRID.iter().map(|&x| Complex64::new(x, 0.0)).chain(
        COMPLEX_POINTS
            .iter()
            .map(|&(re, im)| Complex64::new(re, im)),
    )
}

pub fn check_three_way(cache: &SequenceCache, cfg: &CheckConfig) -> GroupResult {
    let mut g = GroupResult::new("three-way");
    let tol = cfg.tolerance;
    for family in Family::ALL {
        for k in 0..=cfg.max_k {
            let fin = build_expression_with(cache, family, k, Form::Final);
            let inter = build_expression_with(cache, family, k, Form::Intermediate);
            for n in 0..=cfg.max_n {
                for x in eval_points() {
                    let a = evaluate(&fin, n.into(), x);
                    let b = evaluate(&inter, n.into(), x);
                    let c = binomial_derivative(family, n, k as u32, x);
                    let (Ok(a), Ok(b), Ok(c)) = (a, b, c) else {
                        g.assert(false, || {
                            format!("{family} n={n} k={k} x={x}: evaluation error")
                        });
                        continue;
                    };
                    let sa = evaluation_scale(&fin, n, x);
                    let sb = evaluation_scale(&inter, n, x);
                    let sc = binomial_scale(family, n, k, x);
                    if x.im == 0.0 {
                        g.assert(scaled_close(a, b, sa.max(sb), tol), || {
                            format!("{family} n={n} k={k} x={x}: final {a} vs intermediate {b}")
                        });
                        if family.is_trigonometric() {
                            g.assert(c.im.abs() <= tol * sc.max(1.0 + c.re.abs()), || {
                                format!(
                                    "{family} n={n} k={k} x={x}: binomial imaginary part {}",
                                    c.im
                                )
                            });
                        }
                    }
                    g.assert(scaled_close(a, c, sa.max(sc), tol), || {
                        format!("{family} n={n} k={k} x={x}: final {a} vs binomial {c}")
                    });
                }
            }
        }
    }
    g
}

/// `(n, family)` pairs checked against the finite-difference oracle.
fn oracle_exponents(max_n: i64) -> Vec<(Family, Exponent)> {
    let mut out = Vec::new();
    for family in Family::ALL {
        for n in (0..=max_n).chain([-1, -2]) {
            out.push((family, Exponent::Integer(n)));
        }
    }
    out.push((Family::Cosh, Exponent::Real(2.5)));
    out
}

pub fn check_oracle(cache: &SequenceCache, cfg: &CheckConfig) -> GroupResult {
    let mut g = GroupResult::new("oracle");
    for (family, n) in oracle_exponents(cfg.max_n) {
        for k in 0..=cfg.max_k.min(6) {
            let expr = build_expression_with(cache, family, k, Form::Final);
            for &x in &REAL_GRID {
                let h = default_step(family, n, k, x);
                let exact = evaluate(&expr, n, Complex64::new(x, 0.0));
                let numeric = finite_difference(family, n, k, x, h);
                let (Ok(exact), Ok(numeric)) = (exact, numeric) else {
                    g.assert(false, || {
                        format!("{family} n={n} k={k} x={x}: evaluation error")
                    });
                    continue;
                };
                g.assert(rel_close(exact, numeric.into(), fd_tolerance(k)), || {
                    format!("{family} n={n} k={k} x={x}: identity {exact} vs finite difference {numeric}")
                });
            }
        }
        // differentiate the k-th expression numerically and compare with k+1
        for k in 0..=cfg.max_k.min(5) {
            let cur = build_expression_with(cache, family, k, Form::Final);
            let next = build_expression_with(cache, family, k + 1, Form::Final);
            for &x in &REAL_GRID {
                let h = default_step(family, n, 1, x);
                let f = |t: f64| {
                    evaluate(&cur, n, Complex64::new(t, 0.0))
                        .map(|v| v.re)
                        .unwrap_or(f64::NAN)
                };
                let numeric = central_difference(f, x, 1, h);
                let Ok(exact) = evaluate(&next, n, Complex64::new(x, 0.0)) else {
                    g.assert(false, || {
                        format!("{family} n={n} k={} x={x}: evaluation error", k + 1)
                    });
                    continue;
                };
                g.assert(rel_close(exact, numeric.into(), CHAIN_TOLERANCE), || {
                    format!(
                        "{family} n={n} k={k}->{} x={x}: {exact} vs {numeric}",
                        k + 1
                    )
                });
            }
        }
    }
    // sin with n = 1 cycles through sin, cos, -sin, -cos
    for k in 0..=cfg.max_k {
        let expr = build_expression_with(cache, Family::Sin, k, Form::Final);
        for &x in &REAL_GRID {
            let want = (x + k as f64 * FRAC_PI_2).sin();
            let got = evaluate(&expr, 1.into(), Complex64::new(x, 0.0));
            g.assert(
                got.as_ref()
                    .is_ok_and(|v| (v.re - want).abs() <= CYCLE_TOLERANCE),
                || format!("sin n=1 k={k} x={x}: {got:?} vs {want}"),
            );
        }
    }
    g
}

pub fn check_triangle(cache: &SequenceCache, max_k: usize) -> (GroupResult, Vec<String>) {
    let mut g = GroupResult::new("triangle");
    let report = verify_triangle_with(cache, max_k);
    for (k, err) in &report.errors {
        g.assert(false, || format!("row {k}: {err}"));
    }
    for row in &report.rows {
        g.assert(row.matches, || {
            format!(
                "row {}: extracted {:?} vs product {:?}",
                row.k,
                row.extracted
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>(),
                row.product_without_left
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
            )
        });
    }
    let notes = report
        .display_discrepancies()
        .map(|d| {
            format!(
                "printed product-matrix row {} reads [{}]; exact value is [{}]",
                d.k,
                join(&d.displayed),
                join(&d.engine)
            )
        })
        .collect();
    (g, notes)
}

pub fn check_conventions(cache: &SequenceCache, max_k: usize) -> GroupResult {
    let mut g = GroupResult::new("conventions");
    let one = Complex64::new(1.0, 0.0);
    for x in eval_points().chain([Complex64::zero()]) {
        g.assert(exp_power_derivative(0, 0, x) == one, || {
            format!("exp^0 at {x}")
        });
        for family in Family::ALL {
            for form in [Form::Intermediate, Form::Final] {
                let e0 = build_expression_with(cache, family, 0, form);
                let v = evaluate(&e0, 0.into(), x);
                g.assert(v == Ok(one), || format!("{family}^0 at {x}: {v:?}"));
                for k in 1..=max_k {
                    let e = build_expression_with(cache, family, k, form);
                    let v = evaluate(&e, 0.into(), x);
                    g.assert(v.as_ref().is_ok_and(|v| *v == Complex64::zero()), || {
                        format!("k={k} derivative of {family}^0 at {x}: {v:?}")
                    });
                }
            }
        }
    }
    g
}

pub fn check_specialization(cache: &SequenceCache, cfg: &CheckConfig) -> GroupResult {
    let mut g = GroupResult::new("specialization");
    let mut points = specialization_points();
    if let Some(seed) = cfg.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        points.extend((0..20).map(|_| rng.gen_range(-2.0..2.0)));
    }
    for family in Family::ALL {
        for k in 0..=cfg.max_k {
            let expr = build_expression_with(cache, family, k, Form::Final);
            for n in 0..=cfg.max_n {
                let spec = match specialize_expression(&expr, n) {
                    Ok(s) => s,
                    Err(e) => {
                        g.assert(false, || format!("{family} k={k} n={n}: {e}"));
                        continue;
                    }
                };
                g.assert(spec.reduced_exponent >= 0, || {
                    format!(
                        "{family} k={k} n={n}: reduced exponent {}",
                        spec.reduced_exponent
                    )
                });
                for &x in &points {
                    if family.distance_to_zero(x) < 1e-6 {
                        continue;
                    }
                    let x = Complex64::new(x, 0.0);
                    let a = spec.evaluate(x);
                    let b = evaluate(&expr, n.into(), x);
                    let ok = matches!((&a, &b), (Ok(a), Ok(b)) if rel_close(*a, *b, SPECIALIZATION_TOLERANCE));
                    g.assert(ok, || format!("{family} k={k} n={n} x={x}: {a:?} vs {b:?}"));
                }
            }
        }
    }
    // the natural-power case must evaluate at zeros of the base too
    for family in [Family::Sin, Family::Sinh] {
        let expr = build_expression_with(cache, family, 2, Form::Final);
        let v = evaluate(&expr, 1.into(), Complex64::zero());
        g.assert(v.is_ok(), || format!("{family} n=1 k=2 at 0: {v:?}"));
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let cache = SequenceCache::new();
        let report = run_checks(
            &cache,
            &CheckConfig {
                max_k: 2,
                max_n: 1,
                ..CheckConfig::default()
            },
        );
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn corrupted_cache_fails() {
        let cache = SequenceCache::new();
        cache.corrupt_entry_for_testing(Sequence::F, 2);
        let report = run_checks(
            &cache,
            &CheckConfig {
                max_k: 3,
                max_n: 2,
                ..CheckConfig::default()
            },
        );
        assert!(!report.passed());
        let structure = &report.groups[0];
        assert!(!structure.passed());
    }

    #[test]
    fn leading_sign_table() {
        let s: Vec<i64> = (0..8).map(|k| final_leading_sign(Family::Sin, k)).collect();
        assert_eq!(s, [1, 1, -1, -1, 1, 1, -1, -1]);
        let c: Vec<i64> = (0..8).map(|k| final_leading_sign(Family::Cos, k)).collect();
        assert_eq!(c, [1, -1, -1, 1, 1, -1, -1, 1]);
    }
}
