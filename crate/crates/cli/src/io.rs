//! Series CSV and JSON persistence.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use stablear::StableParams;

use crate::CliError;

/// One value per line, optional non-numeric header on line 1, LF or CRLF.
/// Blank lines are skipped.
pub fn parse_series(text: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            Ok(_) => return Err(CliError::input(format!("line {}: non-finite value {line:?}", i + 1))),
            Err(_) if i == 0 => {}
            Err(_) => return Err(CliError::input(format!("line {}: cannot parse {line:?} as a number", i + 1))),
        }
    }
    if out.is_empty() {
        return Err(CliError::input("series is empty"));
    }
    Ok(out)
}

pub fn read_series(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_series(&text).map_err(|e| CliError { message: format!("{}: {}", path.display(), e.message), ..e })
}

/// Shortest of the `%.{digits}g` conventions: fixed notation for decimal
/// exponents in [−4, digits), scientific otherwise, trailing zeros dropped.
pub fn fmt_g(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp >= -4 && exp < digits as i32 {
        trim(&format!("{:.*}", (digits as i32 - 1 - exp).max(0) as usize, x))
    } else {
        format!("{}e{}", trim(mant), exp)
    }
}

/// Series text with 17 significant digits, which round-trips exactly.
pub fn format_series(x: &[f64]) -> String {
    let mut s = String::with_capacity(x.len() * 22);
    for v in x {
        s.push_str(&fmt_g(*v, 17));
        s.push('\n');
    }
    s
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let f = n.as_f64().expect("f64 number");
                let s = fmt_g(f, 17);
                out.push_str(&s);
                // keep floats recognisable as such
                if !s.contains(['.', 'e']) {
                    out.push_str(".0");
                }
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) => {
            if a.is_empty() {
                out.push_str("[]");
            } else if a.iter().all(|e| !e.is_array() && !e.is_object()) {
                out.push('[');
                for (i, e) in a.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, e, indent);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (i, e) in a.iter().enumerate() {
                    out.push_str(&pad(indent + 1));
                    write_value(out, e, indent + 1);
                    out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
                }
                out.push_str(&pad(indent));
                out.push(']');
            }
        }
        Value::Object(m) => {
            if m.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, e)) in m.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, e, indent + 1);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Pretty JSON with floats at 17 significant digits. Non-finite floats
/// become null.
pub fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let value = serde_json::to_value(v).map_err(|e| CliError::internal(format!("serialization failed: {e}")))?;
    let mut s = String::new();
    write_value(&mut s, &value, 0);
    s.push('\n');
    Ok(s)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(v: &T, path: &Path) -> Result<(), CliError> {
    write_text(path, &to_json(v)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauJson {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub mu: f64,
}

impl From<StableParams> for TauJson {
    fn from(t: StableParams) -> Self {
        TauJson { alpha: t.alpha, beta: t.beta, sigma: t.sigma, mu: t.mu }
    }
}

impl TauJson {
    pub fn params(&self) -> Result<StableParams, CliError> {
        StableParams::new(self.alpha, self.beta, self.sigma, self.mu).map_err(CliError::from)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceJson {
    pub s: usize,
    pub loglik: f64,
    pub converged: bool,
    pub iterations: Vec<usize>,
    pub evaluations: usize,
}

/// fit.json.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitFile {
    pub p: usize,
    pub s: usize,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub tau: TauJson,
    pub loglik: f64,
    /// null where the information matrix is unavailable.
    pub se_tau: Vec<Option<f64>>,
    pub seed: u64,
    pub n: usize,
    pub aic: f64,
    pub trace: Vec<TraceJson>,
    pub manifest: crate::manifest::RunManifest,
}

pub fn read_fit(path: &Path) -> Result<FitFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: malformed fit file: {e}", path.display())))
}
