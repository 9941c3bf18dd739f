// Copyright 2026 The conebound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


//! The JSON problem file.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::conegeom::{ClosedCone, ConeSpec};
use crate::subspace::AffineInclusion;

/// `{"A": [[..], ..], "b": [..], "cone": {..}}`, plus optional `name` and
/// `comment`. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    /// Row-major.
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub cone: ConeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
}

/// A parse or validation failure, naming where it happened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemError {
    /// Field path such as `A[2]`, or `line 3, column 7` for syntax errors.
    pub location: String,
    pub message: String,
}

impl std::fmt::Display for ProblemError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for ProblemError {}

fn field(location: impl Into<String>, message: impl Into<String>) -> ProblemError {
    ProblemError { location: location.into(), message: message.into() }
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, ProblemError> {
        let file: ProblemFile = serde_json::from_str(text)
            .map_err(|e| field(format!("line {}, column {}", e.line(), e.column()), strip_position(&e.to_string())))?;
        file.validate()?;
        Ok(file)
    }

    pub fn from_inclusion(p: &AffineInclusion) -> Self {
        ProblemFile { a: p.rows(), b: p.b.clone(), cone: p.cone, name: None, comment: None }
    }

    /// Shape and finiteness checks; rows(A) = len(b) = cone.m.
    pub fn validate(&self) -> Result<(), ProblemError> {
        let m = self.cone.dim();
        if self.a.len() != m {
            return Err(field("A", format!("has {} rows but cone.m = {m}", self.a.len())));
        }
        if self.b.len() != m {
            return Err(field("b", format!("has length {} but A has {m} rows", self.b.len())));
        }
        let n = self.a[0].len();
        if n == 0 {
            return Err(field("A[0]", "rows must have at least one entry"));
        }
        for (i, row) in self.a.iter().enumerate() {
            if row.len() != n {
                return Err(field(format!("A[{i}]"), format!("has {} entries, expected {n}", row.len())));
            }
            if let Some(j) = row.iter().position(|x| !x.is_finite()) {
                return Err(field(format!("A[{i}][{j}]"), "is not finite"));
            }
        }
        if let Some(i) = self.b.iter().position(|x| !x.is_finite()) {
            return Err(field(format!("b[{i}]"), "is not finite"));
        }
        Ok(())
    }

    pub fn inclusion(&self) -> Result<AffineInclusion, ProblemError> {
        self.validate()?;
        let (m, n) = (self.a.len(), self.a[0].len());
        let a = DMatrix::from_fn(m, n, |i, j| self.a[i][j]);
        AffineInclusion::new(a, self.b.clone(), self.cone).map_err(|e| field("problem", e.to_string()))
    }
}

/// serde_json appends " at line L column C"; the location is reported
/// separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const OK: &str = r#"{"A": [[1, 0], [1, 0], [0, 1]], "b": [1, 0, 0],
        "cone": {"kind": "second_order", "m": 3}, "name": "tangent plane"}"#;

    #[test]
    fn parses_and_builds() {
        let f = ProblemFile::parse(OK).unwrap();
        assert_eq!(f.name.as_deref(), Some("tangent plane"));
        let p = f.inclusion().unwrap();
        assert_eq!((p.m(), p.n()), (3, 2));
    }

    #[test]
    fn unknown_key_names_the_key() {
        let text = OK.replace("\"name\"", "\"nmae\"");
        let e = ProblemFile::parse(&text).unwrap_err();
        assert!(e.message.contains("nmae"), "{e}");
        assert!(e.location.starts_with("line 2"), "{e}");
    }

    #[test]
    fn shape_errors_name_the_field() {
        let e = ProblemFile::parse(&OK.replace("[1, 0, 0]", "[1, 0]")).unwrap_err();
        assert_eq!(e.location, "b");
        let e = ProblemFile::parse(&OK.replace("[0, 1]]", "[0, 1, 2]]")).unwrap_err();
        assert_eq!(e.location, "A[2]");
        let e = ProblemFile::parse(&OK.replace("\"m\": 3", "\"m\": 4")).unwrap_err();
        assert_eq!(e.location, "A");
    }

    #[test]
    fn bad_cone_parameters_are_rejected() {
        let text = OK.replace(r#"{"kind": "second_order", "m": 3}"#, r#"{"kind": "p_cone", "m": 3, "p": 0.5}"#);
        assert!(ProblemFile::parse(&text).is_err());
    }
}
