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


//! Report envelopes and writers.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::certify::{CertifyReport, SampleRecord};
use crate::classify::Classification;
use crate::{Error, Result};

/// Seconds spent per phase. The only field allowed to differ between
/// identical runs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classify: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    /// Arguments as given, program name excluded.
    pub command: Vec<String>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem_name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certification: Option<CertifyReport>,
    pub wall_clock_seconds: PhaseTimes,
}

impl RunReport {
    pub fn new(command: Vec<String>, seed: u64) -> Self {
        RunReport {
            tool: "conebound".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command,
            seed,
            problem_name: None,
            classification: None,
            certification: None,
            wall_clock_seconds: PhaseTimes::default(),
        }
    }
}

/// Pretty JSON. Floats use the shortest representation that parses back
/// to the same bits.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Io(format!("serialize: {e}")))
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}

/// `radius,sample_id,dist,residual,ratio`; `ratio` is empty for excluded
/// samples.
pub fn write_trace<W: Write>(w: W, samples: &[SampleRecord]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    for s in samples {
        csv.serialize(s).map_err(|e| Error::Io(format!("trace: {e}")))?;
    }
    csv.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_has_the_documented_columns() {
        let rows = [
            SampleRecord { radius: 1.0, sample_id: 0, dist: 0.5, residual: 0.25, ratio: Some(2.0) },
            SampleRecord { radius: 1.0, sample_id: 1, dist: 0.0, residual: 0.0, ratio: None },
        ];
        let mut buf = Vec::new();
        write_trace(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines, ["radius,sample_id,dist,residual,ratio", "1.0,0,0.5,0.25,2.0", "1.0,1,0.0,0.0,"]);
    }

    #[test]
    fn floats_round_trip_through_json() {
        let x = [0.1 + 0.2, 1.0 / 3.0, 6.02214076e23, f64::MIN_POSITIVE];
        let back: Vec<f64> = serde_json::from_str(&to_json(&x).unwrap()).unwrap();
        assert_eq!(back.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), x.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }
}
