//! JSON and CSV interchange formats.
//!
//! Configurations are `{"K", "x", "m_odd", "n_even"}` and spectral data is
//! `{"lambda", "mu", "a", "b", "b_inf", "b_inf_star"}`. Every number may be
//! written as a JSON number or as a string holding a decimal or `"p/q"`.
//! Rational mode replaces `x` by `exp_x`, the values `e^{x_k}`.
//!
//! Binary64 output uses the shortest decimal that parses back to the same
//! double; rational output uses `"p/q"` strings.

use num::BigRational;
use serde_json::{Map, Value};

use peakon_spectral::core_types::{InterlacingConfiguration, RealLineData, SpectralData};
use peakon_spectral::scalar::{format_rational, parse_rational, Scalar};

use crate::Failure;

/// A parsed JSON object with field-level error reporting.
pub struct Document {
    root: Map<String, Value>,
}

impl Document {
    /// Parses `text`; syntax errors carry their line and column.
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let value: Value = serde_json::from_str(text).map_err(|err| {
            Failure::input(format!(
                "malformed JSON at line {}, column {}: {err}",
                err.line(),
                err.column()
            ))
        })?;
        match value {
            Value::Object(root) => Ok(Document { root }),
            other => Err(Failure::input(format!(
                "expected a JSON object at the top level, found {}",
                kind(&other)
            ))),
        }
    }

    pub fn has(&self, key: &str) -> bool {
        self.root.contains_key(key)
    }

    fn field(&self, key: &str) -> Result<&Value, Failure> {
        self.root
            .get(key)
            .ok_or_else(|| Failure::input(format!("field `{key}`: missing")))
    }

    fn list<T>(
        &self,
        key: &str,
        read: impl Fn(&Value, &str) -> Result<T, Failure>,
    ) -> Result<Vec<T>, Failure> {
        match self.field(key)? {
            Value::Array(items) => items
                .iter()
                .enumerate()
                .map(|(i, item)| read(item, &format!("{key}[{i}]")))
                .collect(),
            other => Err(Failure::input(format!(
                "field `{key}`: expected an array, found {}",
                kind(other)
            ))),
        }
    }

    pub fn floats(&self, key: &str) -> Result<Vec<f64>, Failure> {
        self.list(key, read_float)
    }

    pub fn float(&self, key: &str) -> Result<f64, Failure> {
        read_float(self.field(key)?, key)
    }

    pub fn rationals(&self, key: &str) -> Result<Vec<BigRational>, Failure> {
        self.list(key, read_rational)
    }

    pub fn rational(&self, key: &str) -> Result<BigRational, Failure> {
        read_rational(self.field(key)?, key)
    }

    /// The optional pair count `K`.
    pub fn pair_count(&self) -> Result<Option<usize>, Failure> {
        match self.root.get("K") {
            None => Ok(None),
            Some(value) => value
                .as_u64()
                .and_then(|k| usize::try_from(k).ok())
                .map(Some)
                .ok_or_else(|| {
                    Failure::input(format!(
                        "field `K`: expected a non-negative integer, found {value}"
                    ))
                }),
        }
    }
}

fn kind(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

fn read_rational(value: &Value, path: &str) -> Result<BigRational, Failure> {
    let text = match value {
        Value::Number(number) => number.to_string(),
        Value::String(text) => text.clone(),
        other => {
            return Err(Failure::input(format!(
                "field `{path}`: expected a number or a \"p/q\" string, found {}",
                kind(other)
            )))
        }
    };
    parse_rational(&text).ok_or_else(|| {
        Failure::input(format!(
            "field `{path}`: `{text}` is not a decimal or \"p/q\" rational"
        ))
    })
}

fn read_float(value: &Value, path: &str) -> Result<f64, Failure> {
    match value {
        Value::Number(number) => number.as_f64().filter(|v| v.is_finite()).ok_or_else(|| {
            Failure::input(format!(
                "field `{path}`: {number} is not a finite binary64 value"
            ))
        }),
        _ => read_rational(value, path).map(|q| q.approx()),
    }
}

/// A pair count that disagrees with the array lengths is a validation
/// failure, not a parse error.
fn check_pair_count(declared: Option<usize>, k: usize, violations: &mut Vec<String>) {
    if let Some(declared) = declared.filter(|d| *d != k) {
        violations.insert(
            0,
            format!("K = {declared} does not match {k} entries in m_odd"),
        );
    }
}

/// Reads and validates a binary64 configuration.
pub fn read_configuration(doc: &Document) -> Result<InterlacingConfiguration, Failure> {
    if !doc.has("x") && doc.has("exp_x") {
        return Err(Failure::input(
            "field `x`: missing (`exp_x` is read only with --mode rational)",
        ));
    }
    let declared = doc.pair_count()?;
    let x = doc.floats("x")?;
    let m_odd = doc.floats("m_odd")?;
    let n_even = doc.floats("n_even")?;
    let config = InterlacingConfiguration {
        k: m_odd.len(),
        x,
        m_odd,
        n_even,
    };
    let mut violations = config.violations();
    check_pair_count(declared, config.k, &mut violations);
    if violations.is_empty() {
        Ok(config)
    } else {
        Err(Failure::validation(violations))
    }
}

/// Reads and validates a rational configuration given by `e^{x_k}`.
pub fn read_rational_configuration(doc: &Document) -> Result<RealLineData<BigRational>, Failure> {
    if !doc.has("exp_x") && doc.has("x") {
        return Err(Failure::input(
            "field `exp_x`: missing; rational mode takes the exact values e^{x_k} because e^x is irrational for rational x ≠ 0",
        ));
    }
    let declared = doc.pair_count()?;
    let data = RealLineData {
        exp_x: doc.rationals("exp_x")?,
        m_odd: doc.rationals("m_odd")?,
        n_even: doc.rationals("n_even")?,
    };
    let mut violations = Vec::new();
    if let Err(err) = data.validate() {
        violations.push(err.to_string());
    }
    check_pair_count(declared, data.k(), &mut violations);
    if violations.is_empty() {
        Ok(data)
    } else {
        Err(Failure::validation(violations))
    }
}

/// Reads binary64 spectral data without checking admissibility.
pub fn read_spectral(doc: &Document) -> Result<SpectralData, Failure> {
    Ok(SpectralData {
        lambda: doc.floats("lambda")?,
        mu: doc.floats("mu")?,
        a: doc.floats("a")?,
        b: doc.floats("b")?,
        b_inf: doc.float("b_inf")?,
        b_inf_star: doc.float("b_inf_star")?,
    })
}

/// Exact spectral data: eigenvalues, residues and both boundary constants.
pub struct RationalSpectral {
    pub lambda: Vec<BigRational>,
    pub mu: Vec<BigRational>,
    pub a: Vec<BigRational>,
    pub b: Vec<BigRational>,
    pub b_inf: BigRational,
    pub b_inf_star: BigRational,
}

impl RationalSpectral {
    pub fn approx(&self) -> SpectralData {
        let round = |values: &[BigRational]| values.iter().map(Scalar::approx).collect();
        SpectralData {
            lambda: round(&self.lambda),
            mu: round(&self.mu),
            a: round(&self.a),
            b: round(&self.b),
            b_inf: self.b_inf.approx(),
            b_inf_star: self.b_inf_star.approx(),
        }
    }
}

pub fn read_rational_spectral(doc: &Document) -> Result<RationalSpectral, Failure> {
    Ok(RationalSpectral {
        lambda: doc.rationals("lambda")?,
        mu: doc.rationals("mu")?,
        a: doc.rationals("a")?,
        b: doc.rationals("b")?,
        b_inf: doc.rational("b_inf")?,
        b_inf_star: doc.rational("b_inf_star")?,
    })
}

/// `["p/q", …]` for a list of rationals.
pub fn rational_array(values: &[BigRational]) -> Value {
    Value::Array(
        values
            .iter()
            .map(|v| Value::String(format_rational(v)))
            .collect(),
    )
}

/// Serializes to compact JSON.
pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("values serialize to JSON")
}

/// CSV with a header row and one row per record.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
