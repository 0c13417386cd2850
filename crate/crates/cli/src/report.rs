//! Report envelope, number formatting and output.

use std::f64::consts::PI;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "+git.",
    env!("SPACEFORMS_GIT_HASH")
);

pub fn version() -> String {
    VERSION.to_string()
}

/// `x` rounded to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

/// Nearest integer multiple of π plus the remainder, e.g. `"4π − 0.0123"`.
pub fn pi_form(x: f64) -> String {
    let k = (x / PI).round();
    let raw = x - k * PI;
    // Digits of the remainder that survive at 12 significant digits of x.
    let digits = 12 - (x.abs().log10().floor() - raw.abs().log10().floor()) as i64;
    let rest = if raw == 0.0 || digits < 1 {
        0.0
    } else {
        round_sig(raw, digits.min(12) as usize)
    };
    let multiple = match k as i64 {
        0 => return format!("{}", round_sig(x, 12)),
        1 => "π".to_string(),
        -1 => "−π".to_string(),
        n if n < 0 => format!("−{}π", -n),
        n => format!("{n}π"),
    };
    let small = |r: f64| {
        if r >= 1e-4 {
            format!("{r}")
        } else {
            format!("{r:e}")
        }
    };
    if rest == 0.0 {
        multiple
    } else if rest < 0.0 {
        format!("{multiple} − {}", small(-rest))
    } else {
        format!("{multiple} + {}", small(rest))
    }
}

/// Angle in radians with its π-multiple form.
pub fn angle(x: f64) -> Value {
    json!({ "radians": round_sig(x, 12), "pi": pi_form(x) })
}

fn round_all(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_f64() {
                if n.is_f64() {
                    *v = json!(round_sig(x, 12));
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_all),
        Value::Object(map) => map.values_mut().for_each(round_all),
        _ => {}
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Result<Value, CliError> {
    serde_json::to_value(x).map_err(|e| CliError::Internal(e.to_string()))
}

/// Rows written when the report is requested as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub fn num(x: f64) -> String {
    format!("{}", round_sig(x, 12))
}

pub struct Report {
    pub command: &'static str,
    pub result: Value,
    pub required: &'static [&'static str],
    pub table: Option<Table>,
    pub exit_code: i32,
}

#[derive(Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: String,
    pub command: &'static str,
    pub seed: u64,
    pub budget: Value,
    pub tol: Option<f64>,
    pub input: Option<String>,
}

impl Report {
    pub fn envelope(&self, provenance: &Provenance) -> Result<Value, CliError> {
        let mut result = self.result.clone();
        round_all(&mut result);
        let env = json!({
            "schema": format!("spaceforms/{}/v{SCHEMA_VERSION}", self.command),
            "provenance": to_value(provenance)?,
            "exit_code": self.exit_code,
            "result": result,
        });
        validate(&env, self.command, self.required)?;
        Ok(env)
    }
}

fn find_null(v: &Value, path: &str) -> Option<String> {
    match v {
        Value::Null => Some(path.to_string()),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .find_map(|(i, x)| find_null(x, &format!("{path}.{i}"))),
        Value::Object(map) => map
            .iter()
            .find_map(|(k, x)| find_null(x, &format!("{path}.{k}"))),
        _ => None,
    }
}

/// Check the envelope against its schema: version tag, provenance fields,
/// the command's required result fields, and no missing or non-finite
/// numbers (which serialize as `null`).
pub fn validate(env: &Value, command: &str, required: &[&str]) -> Result<(), CliError> {
    let bad = |msg: String| {
        Err(CliError::Internal(format!(
            "report failed validation: {msg}"
        )))
    };
    let expected = format!("spaceforms/{command}/v{SCHEMA_VERSION}");
    if env.get("schema").and_then(Value::as_str) != Some(expected.as_str()) {
        return bad("schema tag".into());
    }
    let prov = match env.get("provenance").and_then(Value::as_object) {
        Some(p) => p,
        None => return bad("missing provenance".into()),
    };
    for key in ["tool", "version", "command", "seed", "budget"] {
        if !prov.contains_key(key) {
            return bad(format!("provenance lacks {key}"));
        }
    }
    let result: &Map<String, Value> = match env.get("result").and_then(Value::as_object) {
        Some(r) => r,
        None => return bad("result is not an object".into()),
    };
    for key in required {
        if !result.contains_key(*key) {
            return bad(format!("result lacks {key}"));
        }
    }
    if let Some(path) = find_null(&env["result"], "result") {
        return bad(format!("{path} is missing or not finite"));
    }
    Ok(())
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// The command's table if it has one, otherwise `field,value` pairs of the
/// whole envelope.
pub fn csv(env: &Value, table: Option<&Table>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Internal(e.to_string());
    match table {
        Some(t) => {
            w.write_record(&t.header).map_err(io)?;
            for row in &t.rows {
                w.write_record(row).map_err(io)?;
            }
        }
        None => {
            let mut pairs = Vec::new();
            flatten("", env, &mut pairs);
            w.write_record(["field", "value"]).map_err(io)?;
            for (k, v) in pairs {
                w.write_record([k, v]).map_err(io)?;
            }
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_forms() {
        assert_eq!(pi_form(2.0 * PI), "2π");
        assert_eq!(pi_form(PI), "π");
        assert_eq!(pi_form(4.0 * PI - 0.0123), "4π − 0.0123");
        assert_eq!(pi_form(-3.0 * PI + 0.5), "−3π + 0.5");
        assert_eq!(pi_form(0.25), "0.25");
        assert_eq!(pi_form(2.0 * PI - 2.5e-10), "2π − 2.5e-10");
    }

    #[test]
    fn twelve_digits() {
        assert_eq!(round_sig(PI, 12).to_string(), "3.14159265359");
        assert_eq!(round_sig(-1.234567890123456e-7, 12), -1.23456789012e-7);
    }

    #[test]
    fn validation_catches_missing_fields() {
        let r = Report {
            command: "totcurv",
            result: json!({"tc": 1.0}),
            required: &["tc", "cusps"],
            table: None,
            exit_code: 0,
        };
        let prov = Provenance {
            tool: "spaceforms",
            version: version(),
            command: "totcurv",
            seed: 0,
            budget: json!({}),
            tol: None,
            input: None,
        };
        assert!(r.envelope(&prov).is_err());
        let r = Report {
            required: &["tc"],
            result: json!({"tc": f64::NAN}),
            ..r
        };
        assert!(r.envelope(&prov).is_err());
    }

    #[test]
    fn csv_flattens_nested_fields() {
        let text = csv(&json!({"a": {"b": [1, 2]}, "c": "x,y"}), None).unwrap();
        assert_eq!(text, "field,value\na.b.0,1\na.b.1,2\nc,\"x,y\"\n");
    }
}
