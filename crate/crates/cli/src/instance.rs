//! Instance files: one pair per JSON document.
//!
//! ```json
//! { "rank": 3, "twists": [0, 0, -1], "l_degree": 2,
//!   "higgs": [[null, null, null], [null, null, null], [["0", "1"], ["1", "0"], null]] }
//! ```
//!
//! Cell `(i, j)` is `null` for the zero map or the list of coefficients of a
//! form of degree `a_i + ℓ - a_j`, entry `k` multiplying `X^k Y^(d-k)`.

use std::fmt;
use std::fmt::Write;
use std::str::FromStr;

use conelim_core::forms::BinaryForm;
use conelim_core::model::{BundleModel, HitchinPair, ModelConfig};
use conelim_core::{Form, Pair, Rational};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub rank: usize,
    pub twists: Vec<i64>,
    pub l_degree: i64,
    pub higgs: Vec<Vec<Option<Vec<String>>>>,
}

/// Problems with the file itself, as opposed to the pair it describes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InputError {
    Syntax { line: usize, column: usize, message: String },
    Shape(String),
    Cell { row: usize, col: usize, message: String },
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Syntax { line, column, message } => write!(f, "line {line}, column {column}: {message}"),
            InputError::Shape(m) => f.write_str(m),
            InputError::Cell { row, col, message } => write!(f, "cell ({row}, {col}): {message}"),
        }
    }
}

impl std::error::Error for InputError {}

/// Why a file did not produce a pair.
#[derive(Debug)]
pub enum LoadError {
    Input(InputError),
    Model(conelim_core::Error),
}

impl From<InputError> for LoadError {
    fn from(e: InputError) -> Self {
        LoadError::Input(e)
    }
}

impl From<conelim_core::Error> for LoadError {
    fn from(e: conelim_core::Error) -> Self {
        LoadError::Model(e)
    }
}

/// Exact rational from `"p/q"` or `"p"`; a leading U+2212 minus is accepted.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let t = s.trim().replace('\u{2212}', "-");
    if t.is_empty() || t.contains(char::is_whitespace) {
        return None;
    }
    let v = Rational::from_str(&t).ok()?;
    if v.denominator().is_zero() {
        return None;
    }
    Some(v)
}

pub fn parse_document(text: &str) -> Result<InstanceFile, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string().split(" at line ").next().unwrap_or_default().to_string(),
    })
}

fn cell_form(cell: &Option<Vec<String>>, row: usize, col: usize, degree: i64) -> Result<Form, LoadError> {
    let Some(coeffs) = cell else { return Ok(Form::zero()) };
    let values = coeffs
        .iter()
        .enumerate()
        .map(|(k, s)| {
            parse_rational(s).ok_or_else(|| InputError::Cell { row, col, message: format!("coefficient {k}: {s:?} is not a rational") })
        })
        .collect::<Result<Vec<Rational>, InputError>>()?;
    if degree < 0 {
        // only the zero map fits a negative-degree slot
        if values.iter().all(|v| v.is_zero()) {
            return Ok(Form::zero());
        }
        return Err(conelim_core::Error::HolomorphyViolation { row, col, expected: degree, found: values.len() as i64 - 1 }.into());
    }
    if values.len() != degree as usize + 1 {
        return Err(InputError::Cell {
            row,
            col,
            message: format!("expected {} coefficients for degree {degree}, found {}", degree + 1, values.len()),
        }
        .into());
    }
    Ok(BinaryForm::new(degree as usize, values)?)
}

pub fn to_pair(doc: &InstanceFile, config: ModelConfig) -> Result<Pair, LoadError> {
    let r = doc.rank;
    if doc.twists.len() != r {
        return Err(InputError::Shape(format!("rank is {r} but {} twists are given", doc.twists.len())).into());
    }
    if doc.higgs.len() != r {
        return Err(InputError::Shape(format!("higgs has {} rows, expected {r}", doc.higgs.len())).into());
    }
    if let Some(i) = doc.higgs.iter().position(|row| row.len() != r) {
        return Err(InputError::Shape(format!("higgs row {i} has {} cells, expected {r}", doc.higgs[i].len())).into());
    }
    let bundle = BundleModel::new(doc.twists.clone())?;
    let a = &doc.twists;
    let entries = (0..r)
        .map(|i| (0..r).map(|j| cell_form(&doc.higgs[i][j], i, j, a[i] + doc.l_degree - a[j])).collect())
        .collect::<Result<Vec<Vec<Form>>, LoadError>>()?;
    Ok(HitchinPair::validate(bundle, doc.l_degree, entries, config)?)
}

pub fn parse_pair(text: &str) -> Result<Pair, LoadError> {
    to_pair(&parse_document(text)?, ModelConfig::default())
}

pub fn form_cell(f: &Form) -> Option<Vec<String>> {
    if f.is_zero() {
        None
    } else {
        Some(f.coeffs().iter().map(|c| c.to_string()).collect())
    }
}

pub fn to_document(pair: &Pair) -> InstanceFile {
    let m = pair.higgs();
    InstanceFile {
        rank: pair.rank(),
        twists: pair.twists().to_vec(),
        l_degree: pair.l_degree(),
        higgs: m.entries().iter().map(|row| row.iter().map(form_cell).collect()).collect(),
    }
}

fn compact<S: Serialize>(v: &S) -> String {
    serde_json::to_string(v).expect("instance serializes")
}

/// JSON with one Higgs row per line and a trailing newline.
pub fn emit(pair: &Pair) -> String {
    let doc = to_document(pair);
    let mut s = String::from("{\n");
    let _ = writeln!(s, "  \"rank\": {},", doc.rank);
    let _ = writeln!(s, "  \"twists\": {},", compact(&doc.twists));
    let _ = writeln!(s, "  \"l_degree\": {},", doc.l_degree);
    s.push_str("  \"higgs\": [\n");
    let rows: Vec<String> = doc.higgs.iter().map(|row| format!("    {}", compact(row))).collect();
    s.push_str(&rows.join(",\n"));
    s.push_str("\n  ]\n}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: &str = r#"{"rank": 3, "twists": [0, 0, -1], "l_degree": 2,
        "higgs": [[null, null, null], [null, null, null], [["0", "1"], ["1", "0"], null]]}"#;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-2/3").unwrap().to_string(), "-2/3");
        assert_eq!(parse_rational("\u{2212}2/3").unwrap().to_string(), "-2/3");
        assert_eq!(parse_rational("4/2").unwrap().to_string(), "2");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("1.5").is_none());
        assert!(parse_rational("").is_none());
    }

    #[test]
    fn reads_and_writes() {
        let p = parse_pair(B).unwrap();
        assert_eq!(p.degree(), -1);
        assert_eq!(p.higgs().entry(2, 0), &Form::x());
        assert_eq!(parse_pair(&emit(&p)).unwrap(), p);
    }

    #[test]
    fn wrong_cell_length_names_the_cell() {
        let bad = B.replace(r#"["1", "0"]"#, r#"["1", "0", "0"]"#);
        match parse_pair(&bad) {
            Err(LoadError::Input(InputError::Cell { row: 2, col: 1, .. })) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_document("{\n  \"rank\": 3,\n  oops\n}") {
            Err(InputError::Syntax { line: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_slot_rejects_nonzero() {
        // slot (1, 0) has degree 0 + 1 - 3 = -2
        let doc = r#"{"rank": 2, "twists": [3, 0], "l_degree": 1,
            "higgs": [[null, null], [["1"], null]]}"#;
        match parse_pair(doc) {
            Err(LoadError::Model(conelim_core::Error::HolomorphyViolation { row: 1, col: 0, .. })) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
