//! Serialization helpers shared by reports: reproducible float formatting
//! and schema identifiers.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Schema tag attached to every machine-readable report.
pub const SCHEMA_VERSION: &str = "padic-modelset/1";

/// Formats a float with 17 significant digits in scientific notation.
///
/// Non-finite values render as `nan`, `inf` or `-inf`.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{:.16e}", x)
    }
}

/// A float that serializes to JSON with 17 significant digits.
///
/// Non-finite values serialize as `null`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct F17(pub f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(fmt17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl From<f64> for F17 {
    fn from(x: f64) -> Self {
        F17(x)
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(v: &T) -> crate::Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(0.25), "2.5000000000000000e-1");
        assert_eq!(fmt17(1.0 / 3.0), "3.3333333333333331e-1");
        let back: f64 = fmt17(0.1 + 0.2).parse().unwrap();
        assert_eq!(back, 0.1 + 0.2);
    }

    #[test]
    fn json_float_and_null() {
        let v = vec![F17(1.5), F17(f64::NAN)];
        assert_eq!(serde_json::to_string(&v).unwrap(), "[1.5000000000000000e0,null]");
    }
}
