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

//! Sampled error-bound moduli.
//!
//! Samples are drawn uniformly from balls of increasing radius. Sample `j`
//! of radius `i` always uses random stream `(i << 32) | j`, and statistics
//! are reduced in sample order, so reports do not depend on the thread
//! count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::probe::{divergence_probe, ProbeTrace};
use super::{residual, with_threads, Certifier, SolveOpts, TauReport, VerdictHint};
use crate::classify::{ClassifyOpts, GebVerdict, TheoremCase};
use crate::rng::{in_ball, stream, subseed};
use crate::subspace::operator_norm;
use crate::vecops::norm;
use crate::{Error, Result};

/// Growth of the per-radius maxima that counts as divergence.
pub const DIVERGENCE_FACTOR: f64 = 10.0;
/// Relative spread of the last two maxima that counts as stable.
pub const STABILITY_SPREAD: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModulusOpts {
    /// Ball center; the origin when absent.
    pub center: Option<Vec<f64>>,
    pub radii: Vec<f64>,
    pub samples_per_radius: usize,
    pub seed: u64,
    /// Residuals at or below `ratio_floor·max(1, ‖b‖)` are skipped.
    pub ratio_floor: f64,
    /// Worker threads; the global pool when absent.
    pub threads: Option<usize>,
    pub run_probe: bool,
}

impl Default for ModulusOpts {
    fn default() -> Self {
        ModulusOpts {
            center: None,
            radii: vec![1.0, 10.0, 100.0, 1e3, 1e4],
            samples_per_radius: 200,
            seed: 42,
            ratio_floor: 1e-8,
            threads: None,
            run_probe: true,
        }
    }
}

impl ModulusOpts {
    fn validate(&self, n: usize) -> Result<()> {
        if self.radii.is_empty() {
            return Err(Error::Precondition("radii must not be empty".into()));
        }
        if self.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::Precondition("radii must be positive".into()));
        }
        if self.radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Precondition("radii must be strictly increasing".into()));
        }
        if self.samples_per_radius == 0 {
            return Err(Error::Precondition("samples_per_radius must be positive".into()));
        }
        if let Some(c) = &self.center {
            if c.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: c.len() });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusStats {
    pub radius: f64,
    /// `None` when no sample at this radius had positive residual.
    pub max_ratio: Option<f64>,
    /// Samples contributing a ratio.
    pub samples: usize,
    pub feasible: usize,
    pub solver_failures: usize,
}

/// One sample, as written to the trace file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub radius: f64,
    pub sample_id: usize,
    pub dist: f64,
    pub residual: f64,
    /// Absent for excluded samples.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub case: TheoremCase,
    pub geb: GebVerdict,
    pub solution_set: String,
    pub per_radius: Vec<RadiusStats>,
    pub sup_ratio: f64,
    pub min_ratio: f64,
    pub operator_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeTrace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<TauReport>,
    pub hint: VerdictHint,
    pub hint_basis: String,
    pub seed: u64,
    pub ratio_floor: f64,
    pub solver_tol: f64,
    #[serde(skip)]
    pub samples: Vec<SampleRecord>,
}

impl CertifyReport {
    /// True when the sampling hint points against the classifier.
    pub fn contradicts_classifier(&self) -> bool {
        self.hint.contradicts(self.geb)
    }
}

fn sample(c: &Certifier, center: &[f64], radius: f64, seed: u64, id: u64, floor: f64) -> Result<Option<(f64, f64)>> {
    let mut rng = stream(seed, id);
    let x = in_ball(&mut rng, center, radius);
    let res = residual(&c.problem, &x)?;
    if res <= floor {
        return Ok(Some((0.0, res)));
    }
    let proj = c.set.project(&x)?;
    if !proj.converged() {
        return Ok(None);
    }
    Ok(Some((proj.dist, res)))
}

/// Reads the heuristic verdict from per-radius maxima and a probe trace.
fn read_hint(per_radius: &[RadiusStats], probe: Option<&ProbeTrace>) -> (VerdictHint, String) {
    let maxima: Vec<f64> = per_radius.iter().filter_map(|s| s.max_ratio).collect();
    let hi = maxima.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = maxima.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if maxima.is_empty() || lo <= 0.0 { 1.0 } else { hi / lo };
    let growth = probe.map_or(1.0, |p| p.growth);
    if spread >= DIVERGENCE_FACTOR || growth >= DIVERGENCE_FACTOR {
        return (
            VerdictHint::DivergenceEvidence,
            format!(
                "per-radius spread {spread:.3e}, probe growth {growth:.3e}; threshold {DIVERGENCE_FACTOR}x (heuristic)"
            ),
        );
    }
    if let [.., a, b] = maxima.as_slice() {
        if (a - b).abs() <= STABILITY_SPREAD * a.max(*b) {
            return (
                VerdictHint::BoundedEvidence,
                format!("last two radius maxima {a:.6e}, {b:.6e} within {STABILITY_SPREAD} (heuristic)"),
            );
        }
    }
    (VerdictHint::Inconclusive, format!("per-radius spread {spread:.3e}, no stable tail"))
}

/// Estimates `sup d(x, S) / d(Ax + b, K)` over growing balls.
pub fn modulus_estimate(c: &Certifier, opts: &ModulusOpts) -> Result<CertifyReport> {
    let n = c.problem.n();
    opts.validate(n)?;
    let center = opts.center.clone().unwrap_or_else(|| vec![0.0; n]);
    let floor = opts.ratio_floor * norm(&c.problem.b).max(1.0);
    let seed = subseed(opts.seed, "modulus");

    let draws: Vec<Vec<Option<(f64, f64)>>> = with_threads(opts.threads, || {
        opts.radii
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                (0..opts.samples_per_radius)
                    .into_par_iter()
                    .map(|j| sample(c, &center, r, seed, ((i as u64) << 32) | j as u64, floor))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let mut per_radius = Vec::with_capacity(opts.radii.len());
    let mut samples = Vec::new();
    let mut sup = f64::NEG_INFINITY;
    let mut inf = f64::INFINITY;
    for (&radius, row) in opts.radii.iter().zip(&draws) {
        let mut stats = RadiusStats { radius, max_ratio: None, samples: 0, feasible: 0, solver_failures: 0 };
        for (j, d) in row.iter().enumerate() {
            match *d {
                None => stats.solver_failures += 1,
                Some((dist, res)) if res <= floor => {
                    stats.feasible += 1;
                    samples.push(SampleRecord { radius, sample_id: j, dist, residual: res, ratio: None });
                }
                Some((dist, res)) => {
                    let ratio = dist / res;
                    stats.samples += 1;
                    stats.max_ratio = Some(stats.max_ratio.map_or(ratio, |m: f64| m.max(ratio)));
                    sup = sup.max(ratio);
                    inf = inf.min(ratio);
                    samples.push(SampleRecord { radius, sample_id: j, dist, residual: res, ratio: Some(ratio) });
                }
            }
        }
        per_radius.push(stats);
    }
    if per_radius.iter().all(|s| s.samples == 0) {
        return Err(Error::AllSamplesFeasible);
    }

    let probe = if opts.run_probe { divergence_probe(c)? } else { None };
    let (hint, hint_basis) = read_hint(&per_radius, probe.as_ref());
    let solver_tol = match &c.set {
        super::SolutionSet::General { opts, .. } => opts.tol,
        _ => 0.0,
    };
    Ok(CertifyReport {
        case: c.classification.case,
        geb: c.classification.geb,
        solution_set: c.set.kind_name().to_string(),
        per_radius,
        sup_ratio: sup,
        min_ratio: inf,
        operator_norm: operator_norm(&c.problem.a),
        probe,
        tau: None,
        hint,
        hint_basis,
        seed: opts.seed,
        ratio_floor: opts.ratio_floor,
        solver_tol,
        samples,
    })
}

/// Classifies, then estimates the modulus with default solver settings.
pub fn certify_problem(
    problem: &crate::subspace::AffineInclusion,
    classify: &ClassifyOpts,
    solve: &SolveOpts,
    opts: &ModulusOpts,
) -> Result<CertifyReport> {
    let c = Certifier::new(problem, classify, solve)?;
    modulus_estimate(&c, opts)
}
