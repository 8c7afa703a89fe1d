//! The integer triangle hidden in the second-highest power of `f_k`.
//!
//! The coefficient of `u^(k-2)` in `f_k` is a polynomial in `n` whose signs
//! alternate; its absolute values form row `k` of the lower-triangular matrix
//! `Pascal x Bidiagonal x diag(1, 1, 2, 4, 8, ...)` once the left column is
//! removed (OEIS A133341). Rows are numbered from 1 here: row `k` has `k`
//! entries and starts with `k`.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::binomial;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::Error;
use crate::families::{intermediate_poly, Sequence, SequenceCache};

/// The product matrix as printed in the original table, rows 1 through 6.
/// Row 4 ends in 2 there; exact extraction gives 4.
pub const DISPLAYED_ROWS: [&[u32]; 6] = [
    &[1],
    &[2, 1],
    &[3, 3, 2],
    &[4, 6, 8, 2],
    &[5, 10, 20, 20, 8],
    &[6, 15, 40, 60, 48, 16],
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriangleRow {
    pub k: usize,
    #[serde(serialize_with = "serialize_decimal")]
    pub entries: Vec<BigUint>,
}

fn serialize_decimal<S: serde::Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| c.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSource {
    /// Exact product of the three factor matrices.
    Computed,
    /// `T(i, j) = (C(i,j) + C(i,j+1)) 2^max(j-1, 0)` with `i = k - 1`.
    Closed,
}

/// Absolute values of the `u^(k-2)` coefficient of `f_k`, highest power of
/// `n` first. Fails if the signs do not strictly alternate starting negative
/// over consecutive powers.
pub fn second_highest_coeffs(k: usize) -> Result<Vec<BigUint>, Error> {
    second_highest_from(&intermediate_poly(Sequence::F, k), k)
}

pub fn second_highest_coeffs_with(cache: &SequenceCache, k: usize) -> Result<Vec<BigUint>, Error> {
    second_highest_from(&cache.intermediate(Sequence::F, k), k)
}

fn second_highest_from(f_k: &crate::exactpoly::UPoly, k: usize) -> Result<Vec<BigUint>, Error> {
    if k < 2 {
        return Err(Error::DegenerateRow(k));
    }
    let coeff = f_k.coeff(k - 2).ok_or(Error::SignPatternBroken(k))?;
    let top = coeff.degree().ok_or(Error::SignPatternBroken(k))?;
    let mut out = Vec::with_capacity(top);
    let mut expected = Sign::Minus;
    for p in (1..=top).rev() {
        let c: &BigInt = &coeff.coeffs()[p];
        if c.sign() != expected {
            return Err(Error::SignPatternBroken(k));
        }
        out.push(c.magnitude().clone());
        expected = -expected;
    }
    if !coeff.coeffs()[0].is_zero() || out.len() != k - 1 {
        return Err(Error::SignPatternBroken(k));
    }
    Ok(out)
}

fn power_of_two_factor(j: usize) -> BigUint {
    BigUint::one() << j.saturating_sub(1)
}

/// Row `k` (1-based) of the product matrix.
pub fn product_matrix_row(k: usize, source: RowSource) -> Result<TriangleRow, Error> {
    if k == 0 {
        return Err(Error::InvalidRow(k));
    }
    let i = k - 1;
    let entries = match source {
        RowSource::Closed => (0..=i)
            .map(|j| {
                let c = binomial(BigUint::from(i), BigUint::from(j))
                    + if j < i {
                        binomial(BigUint::from(i), BigUint::from(j + 1))
                    } else {
                        BigUint::zero()
                    };
                c * power_of_two_factor(j)
            })
            .collect(),
        RowSource::Computed => {
            let size = k;
            let pascal = |r: usize, c: usize| -> BigUint {
                if c <= r {
                    binomial(BigUint::from(r), BigUint::from(c))
                } else {
                    BigUint::zero()
                }
            };
            let bidiagonal = |r: usize, c: usize| -> BigUint {
                if c == r || c + 1 == r {
                    BigUint::one()
                } else {
                    BigUint::zero()
                }
            };
            // row i of Pascal x Bidiagonal
            let pb: Vec<BigUint> = (0..size)
                .map(|c| (0..size).map(|m| pascal(i, m) * bidiagonal(m, c)).sum())
                .collect();
            // times the diagonal factor
            pb.into_iter()
                .enumerate()
                .map(|(c, v)| v * power_of_two_factor(c))
                .collect()
        }
    };
    Ok(TriangleRow { k, entries })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowCheck {
    pub k: usize,
    #[serde(serialize_with = "serialize_decimal")]
    pub extracted: Vec<BigUint>,
    #[serde(serialize_with = "serialize_decimal")]
    pub product_without_left: Vec<BigUint>,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DisplayCheck {
    pub k: usize,
    pub displayed: Vec<u32>,
    #[serde(serialize_with = "serialize_decimal")]
    pub engine: Vec<BigUint>,
    pub matches: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TriangleReport {
    pub rows: Vec<RowCheck>,
    pub display: Vec<DisplayCheck>,
    /// Rows whose sign pattern was broken, with the error text.
    pub errors: Vec<(usize, String)>,
}

impl TriangleReport {
    /// True when every extracted row matches its product row. Display
    /// discrepancies are reported separately and do not count.
    pub fn all_rows_match(&self) -> bool {
        self.errors.is_empty() && self.rows.iter().all(|r| r.matches)
    }

    pub fn display_discrepancies(&self) -> impl Iterator<Item = &DisplayCheck> {
        self.display.iter().filter(|d| !d.matches)
    }
}

/// Compares extraction from `f_k` against the product matrix for
/// `2 <= k <= max_k`, and the product matrix against the printed rows.
pub fn verify_triangle(max_k: usize) -> TriangleReport {
    verify_triangle_with(crate::families::shared_cache(), max_k)
}

pub fn verify_triangle_with(cache: &SequenceCache, max_k: usize) -> TriangleReport {
    let mut report = TriangleReport::default();
    for k in 2..=max_k {
        let product = product_matrix_row(k, RowSource::Closed).expect("k >= 1");
        let tail = product.entries[1..].to_vec();
        match second_highest_coeffs_with(cache, k) {
            Ok(extracted) => report.rows.push(RowCheck {
                k,
                matches: extracted == tail,
                extracted,
                product_without_left: tail,
            }),
            Err(e) => report.errors.push((k, e.to_string())),
        }
    }
    for (idx, displayed) in DISPLAYED_ROWS.iter().enumerate().take(max_k.max(1)) {
        let k = idx + 1;
        let engine = product_matrix_row(k, RowSource::Closed)
            .expect("k >= 1")
            .entries;
        let displayed = displayed.to_vec();
        let matches = engine.len() == displayed.len()
            && engine
                .iter()
                .zip(&displayed)
                .all(|(a, &b)| *a == BigUint::from(b));
        report.display.push(DisplayCheck {
            k,
            displayed,
            engine,
            matches,
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(v: &[u32]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn extraction_examples() {
        assert_eq!(second_highest_coeffs(2).unwrap(), row(&[1]));
        assert_eq!(second_highest_coeffs(3).unwrap(), row(&[3, 2]));
        assert_eq!(second_highest_coeffs(4).unwrap(), row(&[6, 8, 4]));
        assert_eq!(
            second_highest_coeffs(6).unwrap(),
            row(&[15, 40, 60, 48, 16])
        );
        assert_eq!(second_highest_coeffs(1), Err(Error::DegenerateRow(1)));
        assert_eq!(second_highest_coeffs(0), Err(Error::DegenerateRow(0)));
    }

    #[test]
    fn product_examples() {
        assert_eq!(
            product_matrix_row(5, RowSource::Computed).unwrap().entries,
            row(&[5, 10, 20, 20, 8])
        );
        assert_eq!(
            product_matrix_row(1, RowSource::Computed).unwrap().entries,
            row(&[1])
        );
        let r4 = product_matrix_row(4, RowSource::Computed).unwrap();
        assert_eq!(r4.entries[2..], row(&[8, 4])[..]);
        assert_eq!(
            product_matrix_row(0, RowSource::Closed),
            Err(Error::InvalidRow(0))
        );
    }

    #[test]
    fn computed_and_closed_rows_agree() {
        for k in 1..=64 {
            assert_eq!(
                product_matrix_row(k, RowSource::Computed).unwrap(),
                product_matrix_row(k, RowSource::Closed).unwrap(),
                "row {k}"
            );
        }
    }

    #[test]
    fn left_column_is_row_index() {
        for k in 1..=30 {
            let r = product_matrix_row(k, RowSource::Closed).unwrap();
            assert_eq!(r.entries.len(), k);
            assert_eq!(r.entries[0], BigUint::from(k));
            assert!(r.entries.iter().all(|e| !e.is_zero()));
        }
    }

    #[test]
    fn verify_reports_the_row_four_display_entry() {
        let report = verify_triangle(6);
        assert!(report.all_rows_match());
        let bad: Vec<_> = report.display_discrepancies().collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].k, 4);
        assert_eq!(bad[0].engine, row(&[4, 6, 8, 4]));
        assert_eq!(bad[0].displayed, vec![4, 6, 8, 2]);
    }

    #[test]
    fn verify_small_and_large() {
        assert!(verify_triangle(2).all_rows_match());
        assert!(verify_triangle(20).all_rows_match());
    }
}
