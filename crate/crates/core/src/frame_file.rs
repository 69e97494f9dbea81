//! The JSON input format shared by the command line and counterexample logs.
//!
//! ```json
//! {"system": {"ambient_dim": 1, "blocks": [{"dim": 1, "matrix": [[2]]}]}, "K": [[1]]}
//! ```
//!
//! Only `system` is required; `K` defaults to the identity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gframe::GFrameSystem;
use crate::numerics::{Complex64, ComplexMatrix, JsonScalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSpecFile {
    pub system: GFrameSystem,
    #[serde(rename = "K", alias = "k", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<ComplexMatrix>,
    #[serde(rename = "K2", alias = "k2", default, skip_serializing_if = "Option::is_none")]
    pub k2: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system2: Option<GFrameSystem>,
    #[serde(rename = "U", alias = "u", default, skip_serializing_if = "Option::is_none")]
    pub u: Option<ComplexMatrix>,
    #[serde(rename = "V", alias = "v", default, skip_serializing_if = "Option::is_none")]
    pub v: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<JsonScalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<JsonScalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<u32>,
}

impl FrameSpecFile {
    pub fn new(system: GFrameSystem) -> Self {
        Self {
            system,
            k: None,
            k2: None,
            system2: None,
            u: None,
            v: None,
            alpha: None,
            beta: None,
            power: None,
        }
    }

    pub fn with_k(mut self, k: ComplexMatrix) -> Self {
        self.k = Some(k);
        self
    }

    /// Parses and validates; errors name the offending field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::InvalidInput(format!("at {path}: {}", e.into_inner()))
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("frame spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.system.ambient_dim();
        let square = |field: &str, m: &Option<ComplexMatrix>| match m {
            Some(m) if m.shape() != (n, n) => Err(Error::DimensionMismatch(format!(
                "{field} is {}×{}, expected {n}×{n} (system.ambient_dim)",
                m.nrows(),
                m.ncols()
            ))),
            _ => Ok(()),
        };
        square("K", &self.k)?;
        square("K2", &self.k2)?;
        square("U", &self.u)?;
        square("V", &self.v)?;
        if let Some(other) = &self.system2 {
            if !self.system.same_shape(other) {
                return Err(Error::DimensionMismatch(format!(
                    "system2 has blocks {:?} on ℂ^{}, system has blocks {:?} on ℂ^{n}",
                    other.block_dims(),
                    other.ambient_dim(),
                    self.system.block_dims()
                )));
            }
        }
        Ok(())
    }

    pub fn k_or_identity(&self) -> ComplexMatrix {
        self.k
            .clone()
            .unwrap_or_else(|| ComplexMatrix::identity(self.system.ambient_dim()))
    }

    pub fn require<'a, T>(field: &str, value: &'a Option<T>) -> Result<&'a T> {
        value
            .as_ref()
            .ok_or_else(|| Error::InvalidInput(format!("missing field `{field}`")))
    }

    pub fn scalar_or(value: &Option<JsonScalar>, default: f64) -> Complex64 {
        value.map_or(Complex64::new(default, 0.0), |s| s.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_defaults_k() {
        let spec = FrameSpecFile::from_json(
            r#"{"system": {"ambient_dim": 2, "blocks": [{"dim": 2, "matrix": [[1, 0], [0, 1]]}]}}"#,
        )
        .unwrap();
        assert_eq!(spec.k_or_identity(), ComplexMatrix::identity(2));
    }

    #[test]
    fn round_trip_is_lossless() {
        let sys = GFrameSystem::new(1, vec![ComplexMatrix::real(1, 1, &[0.1 + 0.2])]).unwrap();
        let mut spec = FrameSpecFile::new(sys.clone()).with_k(ComplexMatrix::real(1, 1, &[1.0 / 3.0]));
        spec.system2 = Some(sys);
        spec.alpha = Some(JsonScalar(Complex64::new(0.5, -1.0 / 7.0)));
        spec.power = Some(2);
        let back = FrameSpecFile::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn errors_name_the_field() {
        let err = FrameSpecFile::from_json(
            r#"{"system": {"ambient_dim": 2, "blocks": [{"dim": 1, "matrix": [[1, "x"]]}]}}"#,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("system.blocks[0].matrix[0][1]"), "{err}");

        let err = FrameSpecFile::from_json(
            r#"{"system": {"ambient_dim": 2, "blocks": [{"dim": 1, "matrix": [[1, 0]]}]}, "K": [[1]]}"#,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("K is 1×1"), "{err}");

        let err = FrameSpecFile::from_json(r#"{"system": {"ambient_dim": 1, "blocks": [{"dim": 1, "matrix": [[1]]}]}, "W": 1}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("unknown field"), "{err}");
    }
}
