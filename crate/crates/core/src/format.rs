//! Fixed text formatting shared by every file the crate writes.

/// Formats a float with 17 significant digits in scientific notation.
///
/// The output round-trips to the same bits and is also a valid JSON number.
pub fn sig17(x: f64) -> String {
    if x == 0.0 {
        // normalizes -0.0 so reruns never differ by sign of zero
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}


/// A float that serializes to JSON with [`sig17`] formatting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig17(pub f64);

impl serde::Serialize for Sig17 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = serde_json::value::RawValue::from_string(sig17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}
