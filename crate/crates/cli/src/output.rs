use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};
use tasep_core::report::round_sig;
use tasep_core::Error;

/// A failed command: the JSON record printed on stderr and the exit code.
#[derive(Debug)]
pub struct Failure {
    pub kind: &'static str,
    pub message: String,
    pub code: u8,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            kind: "usage",
            message: message.into(),
            code: 1,
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            kind: "io",
            message: message.into(),
            code: 1,
        }
    }

    pub fn record(&self) -> Value {
        serde_json::json!({ "error": { "kind": self.kind, "message": self.message, "exit_code": self.code } })
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::InvalidSymbol { .. } => "invalid_symbol",
            Error::Empty => "empty_input",
            Error::SecondClassCount { .. } => "second_class_count",
            Error::DensityOutOfRange(_) => "density_out_of_range",
            Error::TooLarge { .. } => "too_large",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Consistency(_) => "consistency",
        };
        let code = if matches!(e, Error::Consistency(_)) {
            2
        } else {
            1
        };
        Self {
            kind,
            message: e.to_string(),
            code,
        }
    }
}

/// Rounds every float to 12 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round_sig(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so the target is either complete or untouched.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| Failure::io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents).map_err(fail)?;
    tmp.flush().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

/// Artifact object: schema version, invocation, then the payload fields.
pub fn artifact(invocation: Value, payload: Value) -> Value {
    let mut map = Map::new();
    map.insert(
        "schema_version".into(),
        Value::from(tasep_core::SCHEMA_VERSION),
    );
    map.insert("invocation".into(), invocation);
    match payload {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("result".into(), other);
        }
    }
    let mut v = Value::Object(map);
    round_floats(&mut v);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_nested_floats() {
        let mut v = serde_json::json!({"a": [0.1 + 0.2, 3], "b": {"c": 1.0 / 3.0}});
        round_floats(&mut v);
        assert_eq!(v.to_string(), r#"{"a":[0.3,3],"b":{"c":0.333333333333}}"#);
    }

    #[test]
    fn consistency_exit_code() {
        assert_eq!(Failure::from(Error::Consistency("x".into())).code, 2);
        assert_eq!(Failure::from(Error::Empty).code, 1);
    }

    #[test]
    fn atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_atomic(&path, b"{}").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "{}");
        assert!(write_atomic(&dir.path().join("missing/out.json"), b"{}").is_err());
    }
}
