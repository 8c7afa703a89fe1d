//! Reference table of the derivatives for `k = 0..=6`, kept as the original
//! LaTeX source lines in `data/derivative_tables.tex`.
//!
//! Each entry in the source is one `\resultleft{\fn}{k} = ...` line (the
//! intermediate form) followed by one `\resultbox{} = ...` line (the final
//! form); either may wrap onto `\resultbox{}\phantom{...}\;` continuation
//! lines. Layout macros are stripped and whitespace is collapsed.

use crate::evaluator::Form;
use crate::families::Family;

pub const SOURCE: &str = include_str!("../data/derivative_tables.tex");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldenEntry {
    pub family: Family,
    pub k: usize,
    pub form: Form,
    /// Normalized LaTeX, e.g. `-\sin^{n-2}(x) \bigl[...\bigr]`.
    pub latex: String,
}

impl GoldenEntry {
    pub fn text(&self) -> String {
        latex_to_text(&self.latex)
    }
}

/// Index just past the brace group opening at `open`.
fn skip_group(s: &str, open: usize) -> usize {
    let mut depth = 0usize;
    for (i, ch) in s[open..].char_indices() {
        match ch {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return open + i + 1;
                }
            }
            _ => {}
        }
    }
    s.len()
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn finish(body: &str) -> String {
    let mut s = collapse_ws(body);
    for suffix in [",~\\ldots", ","] {
        if let Some(stripped) = s.strip_suffix(suffix) {
            s = stripped.to_string();
            break;
        }
    }
    // the k = 0 rows append "= \fn^n(x)"
    if let Some(pos) = s.find("\\bigr] =") {
        s.truncate(pos + "\\bigr]".len());
    }
    s
}

/// Parses [`SOURCE`] into 56 entries (4 families x 7 orders x 2 forms).
pub fn entries() -> Vec<GoldenEntry> {
    parse(SOURCE)
}

pub fn parse(source: &str) -> Vec<GoldenEntry> {
    let mut out: Vec<GoldenEntry> = Vec::new();
    let mut current: Option<(Family, usize, Form, String)> = None;
    let flush = |cur: &mut Option<(Family, usize, Form, String)>, out: &mut Vec<GoldenEntry>| {
        if let Some((family, k, form, body)) = cur.take() {
            out.push(GoldenEntry {
                family,
                k,
                form,
                latex: finish(&body),
            });
        }
    };
    for raw in source.lines() {
        let line = raw.trim();
        let line = line.strip_suffix("\\\\").unwrap_or(line);
        let line = line.trim_matches('$').replace("\\pnl", "");
        if let Some(rest) = line.strip_prefix("\\resultleft{\\") {
            flush(&mut current, &mut out);
            let name_end = rest.find('}').expect("family name");
            let family: Family = rest[..name_end].parse().expect("known family");
            let rest = &rest[name_end + 1..];
            let k_end = rest.find('}').expect("order");
            let k: usize = rest[1..k_end].parse().expect("numeric order");
            let body = rest[k_end + 1..].trim_start().trim_start_matches('=');
            current = Some((family, k, Form::Intermediate, body.to_string()));
        } else if let Some(rest) = line.strip_prefix("\\resultbox{}\\phantom") {
            let after = skip_group(rest, 0);
            let cont = rest[after..].trim_start_matches("\\;");
            if let Some((_, _, _, body)) = current.as_mut() {
                body.push(' ');
                body.push_str(cont);
            }
        } else if let Some(rest) = line.strip_prefix("\\resultbox{}") {
            let (family, k) = match &current {
                Some((f, k, _, _)) => (*f, *k),
                None => continue,
            };
            flush(&mut current, &mut out);
            let body = rest.trim_start().trim_start_matches('=');
            current = Some((family, k, Form::Final, body.to_string()));
        }
    }
    flush(&mut current, &mut out);
    out
}

/// Converts the table's LaTeX to the plain-text rendering:
/// `\sin^{n-2}(x) \bigl[n^2\bigr]` becomes `sin^(n-2)(x) [n^2]`.
pub fn latex_to_text(latex: &str) -> String {
    let s = latex.replace("\\bigl", "").replace("\\bigr", "");
    let mut out = String::with_capacity(s.len());
    let mut rest = s.as_str();
    while let Some(pos) = rest.find("^{") {
        out.push_str(&rest[..pos]);
        let end = skip_group(rest, pos + 1);
        let inner = &rest[pos + 2..end - 1];
        if inner.chars().all(|c| c.is_ascii_digit()) {
            out.push('^');
            out.push_str(inner);
        } else {
            out.push_str(&format!("^({inner})"));
        }
        rest = &rest[end..];
    }
    out.push_str(rest);
    collapse_ws(&out.replace('\\', ""))
}
