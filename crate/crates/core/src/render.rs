//! Text, LaTeX and JSON renderings of derivative expressions.
//!
//! Text and LaTeX follow the layout of the printed derivative tables:
//!
//! ```text
//! -sin^(n-2)(x) [n^2 sin^2(x) + (-n^2 + n)]
//! -\sin^{n-2}(x) \bigl[n^2 \sin^2(x) + (-n^2 + n)\bigr]
//! ```
//!
//! Terms run in descending powers. A coefficient with several terms in `n`
//! is parenthesized; a single-term coefficient is written inline with its
//! sign folded into the joining `+`/`-`. When the leading coefficient has a
//! negative top term and `factor_minus_one` is set, one minus sign moves in
//! front of the whole expression.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::evaluator::{DerivativeExpression, Form};
use crate::exactpoly::{NPoly, UPoly};
use crate::families::Family;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    Text,
    Latex,
    Json,
}

impl FromStr for RenderFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(RenderFormat::Text),
            "latex" => Ok(RenderFormat::Latex),
            "json" => Ok(RenderFormat::Json),
            other => Err(format!(
                "unknown format `{other}` (expected text, latex or json)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RenderOptions {
    pub format: RenderFormat,
    pub factor_minus_one: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            format: RenderFormat::Text,
            factor_minus_one: true,
        }
    }
}

impl RenderOptions {
    pub fn new(format: RenderFormat) -> Self {
        Self {
            format,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy)]
enum Style {
    Text,
    Latex,
}

impl Style {
    fn sup(self, e: &dyn fmt::Display) -> String {
        let e = e.to_string();
        match self {
            Style::Text if e.len() > 1 && !e.chars().all(|c| c.is_ascii_digit()) => {
                format!("^({e})")
            }
            Style::Text => format!("^{e}"),
            Style::Latex if e.len() > 1 => format!("^{{{e}}}"),
            Style::Latex => format!("^{e}"),
        }
    }

    fn func(self, family: Family) -> String {
        match self {
            Style::Text => family.name().to_string(),
            Style::Latex => format!("\\{}", family.name()),
        }
    }

    /// `sin(x)`, `sin^3(x)`.
    fn func_power(self, family: Family, power: &dyn fmt::Display) -> String {
        let power = power.to_string();
        if power == "1" {
            format!("{}(x)", self.func(family))
        } else {
            format!("{}{}(x)", self.func(family), self.sup(&power))
        }
    }
}

/// `n^q` with integer magnitude `m`, unsigned.
fn n_monomial(style: Style, magnitude: &BigInt, q: usize) -> String {
    let var = match q {
        0 => String::new(),
        1 => "n".to_string(),
        _ => format!("n{}", style.sup(&q)),
    };
    match (q, magnitude.is_one()) {
        (0, _) => magnitude.to_string(),
        (_, true) => var,
        _ => format!("{magnitude} {var}"),
    }
}

fn npoly_string(style: Style, c: &NPoly) -> String {
    let mut out = String::new();
    for (q, a) in c.coeffs().iter().enumerate().rev() {
        if a.is_zero() {
            continue;
        }
        if out.is_empty() {
            if a.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if a.is_negative() { " - " } else { " + " });
        }
        out.push_str(&n_monomial(style, &a.abs(), q));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn join_factor(coeff: String, var: &str) -> String {
    match (coeff.as_str(), var.is_empty()) {
        (_, true) => coeff,
        ("1", false) => var.to_string(),
        _ => format!("{coeff} {var}"),
    }
}

fn poly_string(style: Style, poly: &UPoly, var_family: Family) -> String {
    if poly.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (p, c) in poly.terms().rev() {
        let var = if p == 0 {
            String::new()
        } else {
            style.func_power(var_family, &p)
        };
        let first = out.is_empty();
        if c.term_count() > 1 {
            if !first {
                out.push_str(" + ");
            }
            out.push_str(&join_factor(format!("({})", npoly_string(style, c)), &var));
        } else {
            let (q, a) = c
                .coeffs()
                .iter()
                .enumerate()
                .rev()
                .find(|(_, a)| !a.is_zero())
                .expect("stored coefficients are nonzero");
            if first {
                if a.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if a.is_negative() { " - " } else { " + " });
            }
            out.push_str(&join_factor(n_monomial(style, &a.abs(), q), &var));
        }
    }
    out
}

/// Whether the displayed form pulls a `-1` out of the bracket.
pub fn leads_negative(poly: &UPoly) -> bool {
    poly.leading()
        .and_then(NPoly::leading)
        .is_some_and(Signed::is_negative)
}

pub fn render_expression(expr: &DerivativeExpression, opts: &RenderOptions) -> String {
    let style = match opts.format {
        RenderFormat::Json => return render_json(expr),
        RenderFormat::Text => Style::Text,
        RenderFormat::Latex => Style::Latex,
    };
    let family = expr.family;
    let factor = opts.factor_minus_one && leads_negative(&expr.poly);
    let poly = if factor {
        -&expr.poly
    } else {
        expr.poly.clone()
    };
    let var_family = match expr.form {
        Form::Intermediate => family.cofunction(),
        Form::Final => family,
    };

    let mut out = String::new();
    if factor {
        out.push('-');
    }
    out.push_str(&style.func_power(family, &format!("n-{}", expr.k)));
    if expr.cofactor {
        out.push(' ');
        out.push_str(&style.func_power(family.cofunction(), &1));
    }
    let body = poly_string(style, &poly, var_family);
    match style {
        Style::Text => out.push_str(&format!(" [{body}]")),
        Style::Latex => out.push_str(&format!(" \\bigl[{body}\\bigr]")),
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpressionJson {
    family: String,
    k: usize,
    form: String,
    cofactor: bool,
    terms: Vec<TermJson>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    power: usize,
    coeff_n: Vec<String>,
}

/// Canonical JSON: fixed key order, descending powers, coefficients of each
/// `n`-polynomial as ascending decimal strings.
pub fn render_json(expr: &DerivativeExpression) -> String {
    let doc = ExpressionJson {
        family: expr.family.name().to_string(),
        k: expr.k,
        form: expr.form.name().to_string(),
        cofactor: expr.cofactor,
        terms: expr
            .poly
            .terms()
            .rev()
            .map(|(power, c)| TermJson {
                power,
                coeff_n: c.coeffs().iter().map(BigInt::to_string).collect(),
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("plain struct serializes")
}

pub fn parse_json(s: &str) -> Result<DerivativeExpression, Error> {
    let doc: ExpressionJson =
        serde_json::from_str(s).map_err(|e| Error::MalformedJson(e.to_string()))?;
    let family: Family = doc.family.parse().map_err(Error::MalformedJson)?;
    let form: Form = doc.form.parse().map_err(Error::MalformedJson)?;
    let mut poly = UPoly::zero();
    for term in doc.terms {
        let coeffs = term
            .coeff_n
            .iter()
            .map(|c| {
                c.parse::<BigInt>()
                    .map_err(|_| Error::MalformedJson(format!("bad coefficient `{c}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        poly.add_term(term.power, NPoly::from_coeffs(coeffs));
    }
    Ok(DerivativeExpression {
        family,
        k: doc.k,
        form,
        cofactor: doc.cofactor,
        poly,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::build_expression;

    fn text(family: Family, k: usize, form: Form) -> String {
        render_expression(
            &build_expression(family, k, form),
            &RenderOptions::default(),
        )
    }

    #[test]
    fn text_examples() {
        assert_eq!(
            text(Family::Sin, 2, Form::Final),
            "-sin^(n-2)(x) [n^2 sin^2(x) + (-n^2 + n)]"
        );
        assert_eq!(
            text(Family::Cosh, 1, Form::Final),
            "cosh^(n-1)(x) sinh(x) [n]"
        );
        assert_eq!(text(Family::Cos, 0, Form::Intermediate), "cos^(n-0)(x) [1]");
        assert_eq!(
            text(Family::Sin, 2, Form::Intermediate),
            "sin^(n-2)(x) [n^2 cos^2(x) - n]"
        );
        assert_eq!(
            text(Family::Cos, 1, Form::Intermediate),
            "-cos^(n-1)(x) [n sin(x)]"
        );
    }

    #[test]
    fn latex_example() {
        let e = build_expression(Family::Sin, 3, Form::Final);
        assert_eq!(
            render_expression(&e, &RenderOptions::new(RenderFormat::Latex)),
            r"-\sin^{n-3}(x) \cos(x) \bigl[n^3 \sin^2(x) + (-n^3 + 3 n^2 - 2 n)\bigr]"
        );
    }

    #[test]
    fn multi_digit_exponents() {
        let e = build_expression(Family::Cosh, 10, Form::Final);
        let latex = render_expression(&e, &RenderOptions::new(RenderFormat::Latex));
        assert!(
            latex.starts_with(r"\cosh^{n-10}(x) \bigl[n^{10} \cosh^{10}(x) + "),
            "{latex}"
        );
        let text = render_expression(&e, &RenderOptions::default());
        assert!(
            text.starts_with("cosh^(n-10)(x) [n^10 cosh^10(x) + "),
            "{text}"
        );
    }

    #[test]
    fn unfactored_keeps_the_sign_inside() {
        let e = build_expression(Family::Sin, 2, Form::Final);
        let opts = RenderOptions {
            format: RenderFormat::Text,
            factor_minus_one: false,
        };
        assert_eq!(
            render_expression(&e, &opts),
            "sin^(n-2)(x) [-n^2 sin^2(x) + (n^2 - n)]"
        );
    }

    #[test]
    fn json_examples() {
        let e = build_expression(Family::Sin, 1, Form::Final);
        assert_eq!(
            render_json(&e),
            r#"{"family":"sin","k":1,"form":"final","cofactor":true,"terms":[{"power":0,"coeff_n":["0","1"]}]}"#
        );
        let e = build_expression(Family::Sinh, 2, Form::Final);
        assert!(render_json(&e).ends_with(
            r#""terms":[{"power":2,"coeff_n":["0","0","1"]},{"power":0,"coeff_n":["0","-1","1"]}]}"#
        ));
        let zero = DerivativeExpression {
            poly: UPoly::zero(),
            ..e
        };
        assert!(render_json(&zero).ends_with(r#""terms":[]}"#));
    }

    #[test]
    fn json_rejects_garbage() {
        assert!(parse_json("{}").is_err());
        assert!(
            parse_json(r#"{"family":"tan","k":1,"form":"final","cofactor":true,"terms":[]}"#)
                .is_err()
        );
        assert!(parse_json(
            r#"{"family":"sin","k":1,"form":"final","cofactor":true,"terms":[{"power":0,"coeff_n":["x"]}]}"#
        )
        .is_err());
    }

    #[test]
    fn zero_polynomial_renders() {
        let e = DerivativeExpression {
            family: Family::Sin,
            k: 3,
            form: Form::Final,
            cofactor: true,
            poly: UPoly::zero(),
        };
        assert_eq!(
            render_expression(&e, &RenderOptions::default()),
            "sin^(n-3)(x) cos(x) [0]"
        );
    }
}
