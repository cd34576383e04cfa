//! Reading and normalizing JSON input.

use std::io::Read;
use std::sync::Arc;

use serde_json::Value;
use vdelta_core::field::{Elem, Field, FieldSpec};
use vdelta_core::repr::MatrixK;

use crate::InputError;

/// Reads `--input` (path, `-` for stdin, or inline JSON). Parse errors name
/// the source together with line and column.
pub fn load(input: Option<&str>) -> Result<Value, InputError> {
    let src = input.ok_or_else(|| InputError("missing --input".into()))?;
    let (label, text) = if src == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| InputError(format!("<stdin>: {e}")))?;
        ("<stdin>".to_string(), s)
    } else if src.trim_start().starts_with(['{', '[']) {
        ("<inline>".to_string(), src.to_string())
    } else {
        (src.to_string(), std::fs::read_to_string(src).map_err(|e| InputError(format!("{src}: {e}")))?)
    };
    serde_json::from_str(&text).map_err(|e| InputError(format!("{label}: malformed JSON: {e}")))
}

/// Looks up `key` in an object, reporting the JSON path when it is absent.
pub fn field<'a>(v: &'a Value, path: &str, key: &str) -> Result<&'a Value, InputError> {
    v.get(key).ok_or_else(|| InputError(format!("{path}: missing field \"{key}\"")))
}

pub fn usize_field(v: &Value, path: &str, key: &str) -> Result<usize, InputError> {
    field(v, path, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| InputError(format!("{path}/{key}: expected a non-negative integer")))
}

/// A field spec given either by catalog name or as a full object.
pub fn spec(v: &Value, path: &str) -> Result<FieldSpec, InputError> {
    match v {
        Value::String(name) => FieldSpec::named(name).map_err(|e| InputError(format!("{path}: {e}"))),
        _ => serde_json::from_value(v.clone()).map_err(|e| InputError(format!("{path}: {e}"))),
    }
}

/// Replaces a named `"spec"` by its full object so that reports are
/// self-describing.
pub fn expand_spec(v: &mut Value, path: &str) -> Result<(), InputError> {
    if let Some(s) = v.get("spec") {
        let full = serde_json::to_value(spec(s, &format!("{path}/spec"))?)?;
        v["spec"] = full;
    }
    Ok(())
}

/// Parses a matrix object at `path`, expanding a named spec in place.
pub fn matrix(v: &mut Value, path: &str) -> Result<MatrixK, InputError> {
    expand_spec(v, path)?;
    MatrixK::from_json(v).map_err(|e| InputError(format!("{path}: {e}")))
}

pub fn elem(k: &Field, v: &Value, path: &str) -> Result<Elem, InputError> {
    match v {
        Value::String(s) => k.parse(s).map_err(|e| InputError(format!("{path}: {e}"))),
        Value::Number(n) if n.is_i64() => Ok(k.int(n.as_i64().expect("checked"))),
        _ => Err(InputError(format!("{path}: expected a field element string"))),
    }
}

pub fn vector(k: &Field, v: &Value, path: &str) -> Result<Vec<Elem>, InputError> {
    let arr = v.as_array().ok_or_else(|| InputError(format!("{path}: expected an array")))?;
    arr.iter().enumerate().map(|(i, x)| elem(k, x, &format!("{path}/{i}"))).collect()
}

pub fn rows(k: &Arc<Field>, v: &Value, path: &str) -> Result<Vec<Vec<Elem>>, InputError> {
    let arr = v.as_array().ok_or_else(|| InputError(format!("{path}: expected an array of rows")))?;
    arr.iter().enumerate().map(|(i, r)| vector(k, r, &format!("{path}/{i}"))).collect()
}
