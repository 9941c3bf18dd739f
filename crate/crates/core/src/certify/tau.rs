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

//! Estimates of the normal-cone scaling constant `τ`.
//!
//! At a feasible `x` with `z = Ax + b`, `τ(x)` is the least `τ` with
//! `A*[N_K(z)] ∩ B̄ ⊆ τ·A*[N_K(z) ∩ B̄]`. Interior points give 0, smooth
//! boundary points give `1/‖A*n‖` for the unit normal `n`, and the apex
//! needs the minimum-norm preimage in `K°` of each unit vector of
//! `A*[K°]`, computed over a mesh of `K°`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::probe::{outward_boundary_points, TracePoint, OUTWARD_RADII};
use super::{with_threads, Certifier};
use crate::classify::TheoremCase;
use crate::conegeom::{ClosedCone, ConeSpec};
use crate::rng::{stream, subseed, unit_vec};
use crate::subspace::{image_basis, operator_norm, pseudo_inverse, AffineInclusion, DEFAULT_RANK_TOL};
use crate::vecops::{add, norm, scale, sub};
use crate::{Error, Result};

/// Values above this are reported as unbounded.
pub const TAU_CEILING: f64 = 1e8;
const GROWTH_FACTOR: f64 = 10.0;
const PREIMAGE_ITERS: usize = 5000;
const PREIMAGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TauOpts {
    /// Feasible points per radius.
    pub n_points: usize,
    pub radii: Vec<f64>,
    pub seed: u64,
    /// Boundary rays of `K°` in the apex mesh; a quarter as many interior
    /// points are added.
    pub mesh: usize,
    pub threads: Option<usize>,
    pub sweep: bool,
}

impl Default for TauOpts {
    fn default() -> Self {
        TauOpts {
            n_points: 200,
            radii: vec![1.0, 10.0, 100.0, 1e3, 1e4],
            seed: 42,
            mesh: 64,
            threads: None,
            sweep: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauRadius {
    pub radius: f64,
    pub sup: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauReport {
    /// Finite estimate, absent when unbounded.
    pub tau: Option<f64>,
    pub unbounded: bool,
    pub sup: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub apex: Option<f64>,
    pub per_radius: Vec<TauRadius>,
    pub sweep: Vec<TracePoint>,
    pub interior_points: usize,
    pub ray_points: usize,
    pub apex_points: usize,
    /// Boundary points of `S` whose normal ray is annihilated by `A*`.
    pub degenerate_points: usize,
    pub solver_failures: usize,
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PointTau {
    Interior,
    Ray(f64),
    Apex,
    Degenerate,
}

fn is_feasible(p: &AffineInclusion, x: &[f64]) -> bool {
    let z = p.apply(x);
    p.cone.margin_unchecked(&z) >= -1e-12 * norm(&z).max(1.0)
}

/// Local interiority of `x` in `S`, tested along `±` row-space directions.
fn locally_interior(p: &AffineInclusion, row: &[Vec<f64>], x: &[f64], z_norm: f64, a_norm: f64) -> bool {
    let delta = 1e-3 * z_norm / a_norm;
    row.iter().all(|v| {
        is_feasible(p, &add(x, &scale(v, delta))) && is_feasible(p, &add(x, &scale(v, -delta)))
    })
}

fn point_tau(p: &AffineInclusion, row: &[Vec<f64>], a_norm: f64, x: &[f64]) -> PointTau {
    let z = p.apply(x);
    let zn = norm(&z);
    if zn <= 1e-9 * norm(&p.b).max(1.0) {
        return PointTau::Apex;
    }
    if p.cone.margin_unchecked(&z) / zn.max(1.0) > 1e-9 {
        return PointTau::Interior;
    }
    let g = p.cone.gradient_unchecked(&z);
    let gn = norm(&g);
    if gn == 0.0 {
        return PointTau::Degenerate;
    }
    let adj = norm(&p.adjoint(&g)) / gn;
    if adj > 1e-12 * a_norm {
        return PointTau::Ray(1.0 / adj);
    }
    // A*[N_K(z)] = {0}: harmless only when x is interior to S
    if locally_interior(p, row, x, zn, a_norm) {
        PointTau::Interior
    } else {
        PointTau::Degenerate
    }
}

/// Unit points of `K°`: boundary rays generated from random directions and
/// midpoints of pairs of them, plus the axis.
fn polar_mesh(cone: &ConeSpec, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let polar = cone.polar();
    let m = cone.m();
    let to_polar = |z: Vec<f64>| if polar.negated { scale(&z, -1.0) } else { z };
    let unit = |z: Vec<f64>| {
        let n = norm(&z);
        scale(&z, 1.0 / n)
    };
    let mut boundary: Vec<Vec<f64>> = (0..count.max(2) as u64)
        .map(|i| {
            let u = unit_vec(&mut stream(seed, i), m - 1);
            unit(to_polar(polar.cone.boundary_point(&u)))
        })
        .collect();
    if m == 2 {
        // both boundary rays, whatever the draws were
        boundary.push(unit(to_polar(polar.cone.boundary_point(&[1.0]))));
        boundary.push(unit(to_polar(polar.cone.boundary_point(&[-1.0]))));
    }
    let mut mesh = boundary.clone();
    let k = boundary.len();
    for i in 0..(count / 4).max(1) {
        let a = &boundary[i % k];
        let b = &boundary[(i * 7 + 3) % k];
        let mid = add(a, b);
        if norm(&mid) > 1e-12 {
            mesh.push(unit(mid));
        }
    }
    mesh.push(polar.axis());
    mesh
}

/// Minimum of `‖w‖` over `w ∈ K°` with `A*w = v`, by splitting between
/// the affine set and the polar cone. `upper` is a known feasible value.
fn min_preimage(p: &AffineInclusion, at_pinv: &DMatrix<f64>, v: &[f64], upper: f64) -> f64 {
    let polar = p.cone.polar();
    let vv = DVector::from_column_slice(v);
    let at = p.a.transpose();
    let project_affine = |y: &[f64]| {
        let yv = DVector::from_column_slice(y);
        let r = &at * &yv - &vv;
        (yv - at_pinv * r).as_slice().to_vec()
    };
    let rho = 1.0;
    let m = p.m();
    let mut s = vec![0.0; m];
    let mut u = vec![0.0; m];
    let mut w = vec![0.0; m];
    for _ in 0..PREIMAGE_ITERS {
        w = project_affine(&scale(&sub(&s, &u), rho / (1.0 + rho)));
        let s_new = match polar.project_unchecked(&add(&w, &u)) {
            Ok(s) => s,
            Err(_) => return upper,
        };
        let ds = norm(&sub(&s_new, &s));
        s = s_new;
        u = add(&u, &sub(&w, &s));
        if norm(&sub(&w, &s)) <= PREIMAGE_TOL && ds <= PREIMAGE_TOL {
            break;
        }
    }
    let affine_gap = norm(&sub(&p.adjoint(&s), v));
    if affine_gap <= 1e-8 {
        norm(&s).min(upper)
    } else {
        norm(&w).max(norm(&s)).min(upper)
    }
}

/// `τ` at the apex `Ax + b = 0`.
pub fn apex_tau(p: &AffineInclusion, mesh: usize, seed: u64) -> Result<f64> {
    let at_pinv = pseudo_inverse(&p.a.transpose(), DEFAULT_RANK_TOL);
    let a_norm = operator_norm(&p.a);
    if a_norm == 0.0 {
        return Ok(0.0);
    }
    let points = polar_mesh(&p.cone, mesh, subseed(seed, "apex-mesh"));
    let values: Vec<f64> = points
        .par_iter()
        .map(|w| {
            let aw = p.adjoint(w);
            let n = norm(&aw);
            if n <= 1e-12 * a_norm {
                return 0.0;
            }
            let v = scale(&aw, 1.0 / n);
            min_preimage(p, &at_pinv, &v, 1.0 / n)
        })
        .collect();
    Ok(values.into_iter().fold(0.0, f64::max))
}

/// Monotone growth by at least `GROWTH_FACTOR` along a sequence.
fn grows(values: &[f64]) -> bool {
    values.len() >= 2
        && values.windows(2).all(|w| w[1] >= w[0])
        && values[0] > 0.0
        && values[values.len() - 1] / values[0] >= GROWTH_FACTOR
}

pub fn tau_estimate(c: &Certifier, opts: &TauOpts) -> Result<TauReport> {
    let p = &c.problem;
    if opts.radii.is_empty() || opts.n_points == 0 {
        return Err(Error::Precondition("tau estimate needs radii and points".into()));
    }
    let a_norm = operator_norm(&p.a);
    let row_basis = image_basis(&p.a.transpose(), DEFAULT_RANK_TOL)?;
    let row: Vec<Vec<f64>> = (0..row_basis.rank).map(|j| row_basis.column(j)).collect();
    let seed = subseed(opts.seed, "tau");
    let n = p.n();

    let b_in = c.classification.diagnostics.b_in_image == Some(true)
        || c.classification.case == TheoremCase::DegenerateAZero;
    let apex = if b_in { Some(with_threads(opts.threads, || apex_tau(p, opts.mesh, opts.seed))??) } else { None };

    let draws: Vec<Vec<Option<PointTau>>> = with_threads(opts.threads, || {
        opts.radii
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                (0..opts.n_points)
                    .into_par_iter()
                    .map(|j| {
                        let mut rng = stream(seed, ((i as u64) << 32) | j as u64);
                        let x0 = crate::rng::in_ball(&mut rng, &vec![0.0; n], r);
                        let proj = c.set.project(&x0)?;
                        Ok(proj.converged().then(|| point_tau(p, &row, a_norm, &proj.xstar)))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let mut report = TauReport {
        tau: None,
        unbounded: false,
        sup: 0.0,
        apex,
        per_radius: Vec::new(),
        sweep: Vec::new(),
        interior_points: 0,
        ray_points: 0,
        apex_points: 0,
        degenerate_points: 0,
        solver_failures: 0,
        reasons: Vec::new(),
    };
    for (&radius, row) in opts.radii.iter().zip(&draws) {
        let mut sup = 0.0_f64;
        let mut count = 0;
        for d in row {
            let value = match d {
                None => {
                    report.solver_failures += 1;
                    continue;
                }
                Some(PointTau::Interior) => {
                    report.interior_points += 1;
                    0.0
                }
                Some(PointTau::Ray(t)) => {
                    report.ray_points += 1;
                    *t
                }
                Some(PointTau::Apex) => {
                    report.apex_points += 1;
                    apex.unwrap_or(0.0)
                }
                Some(PointTau::Degenerate) => {
                    report.degenerate_points += 1;
                    continue;
                }
            };
            count += 1;
            sup = sup.max(value);
        }
        report.per_radius.push(TauRadius { radius, sup, points: count });
    }
    report.sup = report.per_radius.iter().map(|r| r.sup).fold(apex.unwrap_or(0.0), f64::max);

    if opts.sweep && c.classification.case == TheoremCase::T53ii {
        for bp in outward_boundary_points(c, &OUTWARD_RADII)? {
            let adj = norm(&p.adjoint(&bp.normal));
            let t = if adj > 0.0 { 1.0 / adj } else { f64::INFINITY };
            report.sweep.push(TracePoint { parameter: bp.radius, dist: 0.0, residual: 0.0, ratio: t });
            report.sup = report.sup.max(t);
        }
    }

    if report.sup > TAU_CEILING {
        report.reasons.push(format!("sup {:.3e} exceeds {TAU_CEILING:.0e}", report.sup));
    }
    let radius_sups: Vec<f64> = report.per_radius.iter().map(|r| r.sup).collect();
    if grows(&radius_sups) {
        report.reasons.push("per-radius sup grows monotonically by 10x or more".into());
    }
    let sweep: Vec<f64> = report.sweep.iter().map(|t| t.ratio).collect();
    if grows(&sweep) {
        report.reasons.push("outward sweep grows monotonically by 10x or more".into());
    }
    if report.degenerate_points > 0 {
        report.reasons.push(format!(
            "{} boundary points with A*n = 0 (normal ray degenerate)",
            report.degenerate_points
        ));
    }
    report.unbounded = !report.reasons.is_empty();
    if !report.unbounded {
        report.tau = Some(report.sup);
    }
    Ok(report)
}
