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

//! Deterministic probe sequences that expose a missing error bound.
//!
//! Near a tangency the ratio `d(x, S) / d(Ax + b, K)` grows like `1/ε` at
//! distance `ε`; in the tangent-at-infinity case it grows along boundary
//! points that run out along the critical ray. Each probe records a trace
//! with strictly increasing parameter.

use serde::{Deserialize, Serialize};

use super::{residual, Certifier};
use crate::classify::TheoremCase;
use crate::conegeom::ClosedCone;
use crate::subspace::{image_basis, pseudo_inverse, DEFAULT_RANK_TOL};
use crate::vecops::{add, dot, norm, scale, sub};
use crate::{Error, Result};

/// Offsets for the local sweeps, increasing.
pub const LOCAL_OFFSETS: [f64; 6] = [1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1];
/// Distances along the critical ray for the outward sweep, increasing.
pub const OUTWARD_RADII: [f64; 5] = [1e1, 1e2, 1e3, 1e4, 1e5];

const BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeKind {
    /// Offsets from the single touching point along `Im A`.
    LocalAffine,
    /// Tangential offsets from the apex preimage.
    LocalRay,
    /// Boundary points running out along the critical ray.
    Outward,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub parameter: f64,
    pub dist: f64,
    pub residual: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeTrace {
    pub kind: ProbeKind,
    pub points: Vec<TracePoint>,
    /// Least-squares slope of `ln ratio` against `ln parameter`.
    pub slope: Option<f64>,
    /// Largest over smallest ratio along the trace.
    pub growth: f64,
}

pub(crate) fn loglog_slope(points: &[TracePoint]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.ratio > 0.0 && p.parameter > 0.0)
        .map(|p| (p.parameter.ln(), p.ratio.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn trace(kind: ProbeKind, points: Vec<TracePoint>) -> ProbeTrace {
    let hi = points.iter().map(|p| p.ratio).fold(f64::NEG_INFINITY, f64::max);
    let lo = points.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
    let growth = if points.is_empty() || lo <= 0.0 { 1.0 } else { hi / lo };
    ProbeTrace { kind, slope: loglog_slope(&points), growth, points }
}

fn mat_vec(m: &nalgebra::DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (m * nalgebra::DVector::from_column_slice(v)).as_slice().to_vec()
}

/// Unit vector of `Im A` orthogonal to `d`, taken from the basis column
/// with the largest orthogonal component.
pub(crate) fn transverse_direction(c: &Certifier, d: &[f64]) -> Result<Vec<f64>> {
    let im = image_basis(&c.problem.a, DEFAULT_RANK_TOL)?;
    let mut best: Option<Vec<f64>> = None;
    for j in 0..im.rank {
        let q = im.column(j);
        let e = sub(&q, &scale(d, dot(&q, d)));
        if best.as_ref().is_none_or(|b| norm(&e) > norm(b)) {
            best = Some(e);
        }
    }
    let e = best.ok_or_else(|| Error::Precondition("Im A has no direction transverse to the ray".into()))?;
    let n = norm(&e);
    if n < 1e-8 {
        return Err(Error::Precondition("Im A has no direction transverse to the ray".into()));
    }
    Ok(scale(&e, 1.0 / n))
}

fn probe_point(c: &Certifier, parameter: f64, x: &[f64]) -> Result<TracePoint> {
    let dist = c.set.project(x)?.dist;
    let res = residual(&c.problem, x)?;
    Ok(TracePoint { parameter, dist, residual: res, ratio: if res > 0.0 { dist / res } else { f64::INFINITY } })
}

/// A point of `bd S` on the outward sweep and the data needed to read off
/// its normal cone.
#[derive(Debug, Clone)]
pub(crate) struct OutwardPoint {
    pub radius: f64,
    pub x: Vec<f64>,
    /// Unit generator of `N_K(Ax + b)`.
    pub normal: Vec<f64>,
}

/// Boundary points `x_bd(R)` reached from `x_f + R·A⁺d` by bisection along
/// a transverse preimage direction.
pub(crate) fn outward_boundary_points(c: &Certifier, radii: &[f64]) -> Result<Vec<OutwardPoint>> {
    let p = &c.problem;
    let d = c
        .classification
        .witnesses
        .ray
        .clone()
        .ok_or_else(|| Error::Precondition("outward sweep needs a boundary ray".into()))?;
    let xf = match &c.classification.witnesses.feasible {
        Some(x) => x.clone(),
        None => c.set.project(&vec![0.0; p.n()])?.xstar,
    };
    let pinv = pseudo_inverse(&p.a, DEFAULT_RANK_TOL);
    let yd = mat_vec(&pinv, &d);
    let e = transverse_direction(c, &d)?;
    let ye = mat_vec(&pinv, &e);
    let feasible = |x: &[f64]| p.cone.margin_unchecked(&p.apply(x)) >= 0.0;

    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        let base = add(&xf, &scale(&yd, r));
        if !feasible(&base) {
            continue;
        }
        let mut hi = 1.0;
        let mut found = false;
        for _ in 0..200 {
            if !feasible(&add(&base, &scale(&ye, hi))) {
                found = true;
                break;
            }
            hi *= 2.0;
        }
        if !found {
            continue;
        }
        let mut lo = 0.0;
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if feasible(&add(&base, &scale(&ye, mid))) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = add(&base, &scale(&ye, lo));
        let g = p.cone.gradient_unchecked(&p.apply(&x));
        let gn = norm(&g);
        if gn == 0.0 {
            continue;
        }
        out.push(OutwardPoint { radius: r, x, normal: scale(&g, -1.0 / gn) });
    }
    Ok(out)
}

fn outward_sweep(c: &Certifier) -> Result<Vec<TracePoint>> {
    let p = &c.problem;
    let mut points = Vec::new();
    for bp in outward_boundary_points(c, &OUTWARD_RADII)? {
        let g = p.adjoint(&bp.normal);
        let gn = norm(&g);
        if gn == 0.0 {
            continue;
        }
        // A*n_K is an outer normal of S at x, so the step length is the distance
        let delta = 1e-6 * norm(&bp.x).max(1.0);
        let x_out = add(&bp.x, &scale(&g, delta / gn));
        let res = residual(p, &x_out)?;
        if res > 0.0 {
            points.push(TracePoint { parameter: bp.radius, dist: delta, residual: res, ratio: delta / res });
        }
    }
    Ok(points)
}

fn local_affine_sweep(c: &Certifier) -> Result<Vec<TracePoint>> {
    let p = &c.problem;
    let xbar = c.set.project(&vec![0.0; p.n()])?.xstar;
    let row = image_basis(&p.a.transpose(), DEFAULT_RANK_TOL)?;
    if row.rank == 0 {
        return Ok(vec![]);
    }
    let v = row.column(0);
    LOCAL_OFFSETS.iter().map(|&eps| probe_point(c, eps, &add(&xbar, &scale(&v, eps)))).collect()
}

fn local_ray_sweep(c: &Certifier) -> Result<Vec<TracePoint>> {
    let p = &c.problem;
    let d = c
        .classification
        .witnesses
        .ray
        .clone()
        .ok_or_else(|| Error::Precondition("ray sweep needs a boundary ray".into()))?;
    let e = transverse_direction(c, &d)?;
    let pinv = pseudo_inverse(&p.a, DEFAULT_RANK_TOL);
    let xbar = scale(&mat_vec(&pinv, &p.b), -1.0);
    LOCAL_OFFSETS
        .iter()
        .map(|&delta| {
            let step = mat_vec(&pinv, &add(&d, &scale(&e, delta)));
            probe_point(c, delta, &add(&xbar, &step))
        })
        .collect()
}

/// Runs the probe matching the classified case, if there is one.
pub fn divergence_probe(c: &Certifier) -> Result<Option<ProbeTrace>> {
    let (kind, points) = match c.classification.case {
        TheoremCase::T52iii => (ProbeKind::LocalAffine, local_affine_sweep(c)?),
        TheoremCase::T53i => (ProbeKind::LocalRay, local_ray_sweep(c)?),
        TheoremCase::T53ii => (ProbeKind::Outward, outward_sweep(c)?),
        _ => return Ok(None),
    };
    Ok(Some(trace(kind, points)))
}
