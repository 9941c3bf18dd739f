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

//! Concave maximization of cone margins restricted to a subspace.
//!
//! Two problems are solved here: the ball-constrained maximum of `φ(Qy)`
//! and the unconstrained maximum of `φ(b + Qy)`. Both use projected
//! supergradient ascent from several starts, followed by a smooth local
//! refinement with Armijo backtracking where the margin is differentiable.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conegeom::ClosedCone;
use crate::rng::{gaussian_vec, stream, unit_vec};
use crate::subspace::SubspaceBasis;
use crate::vecops::{add, dot, norm, scale};
use crate::{Error, Result};

const REFINE_STEPS: usize = 2000;
const ARMIJO: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaxOpts {
    /// Stop once the best value improves by less than this over `patience`
    /// consecutive iterations.
    pub tol: f64,
    pub max_iter: usize,
    pub patience: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Known upper bound on the optimum; enables Polyak steps.
    pub upper_bound: Option<f64>,
}

impl Default for MaxOpts {
    fn default() -> Self {
        MaxOpts { tol: 1e-12, max_iter: 20_000, patience: 500, restarts: 5, seed: 42, upper_bound: None }
    }
}

/// Result of maximizing `φ(Qy)` over `‖y‖ ≤ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallMax {
    /// Optimum over the ball; never negative.
    pub value: f64,
    /// Maximizer `Qy*` in ambient coordinates.
    pub argmax: Vec<f64>,
    /// Best margin found on the unit sphere of the subspace; may be negative.
    pub sphere_value: f64,
    /// Unit ambient vector attaining `sphere_value`.
    pub sphere_point: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Result of maximizing `φ(b + Qy)` over all `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMax {
    pub value: f64,
    pub coords: Vec<f64>,
    /// `b + Qy*`.
    pub point: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

struct Run {
    value: f64,
    y: Vec<f64>,
    iterations: usize,
    converged: bool,
}

fn normalize(v: &[f64]) -> Option<Vec<f64>> {
    let n = norm(v);
    (n > 0.0 && n.is_finite()).then(|| scale(v, 1.0 / n))
}

/// Ordered reduction: highest value, earliest index on ties.
fn best_run(runs: Vec<Run>) -> Run {
    let mut iter = runs.into_iter();
    let mut best = iter.next().expect("at least one restart");
    let mut total = best.iterations;
    let mut any_converged = best.converged;
    for r in iter {
        total += r.iterations;
        any_converged |= r.converged;
        if r.value > best.value {
            best = r;
        }
    }
    best.iterations = total;
    best.converged = any_converged;
    best
}

/// Supergradient ascent on a generic concave `f`, projecting onto the ball
/// of radius `radius` when given. Tracks the best point under `score`.
fn ascend<F, G, S>(
    f: &F,
    grad: &G,
    score: &S,
    start: Vec<f64>,
    step0: f64,
    radius: Option<f64>,
    opts: &MaxOpts,
) -> Run
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
    S: Fn(&[f64]) -> Option<f64>,
{
    let project = |v: Vec<f64>| match radius {
        Some(r) => {
            let n = norm(&v);
            if n > r {
                scale(&v, r / n)
            } else {
                v
            }
        }
        None => v,
    };
    let mut y = project(start);
    let mut avg = y.clone();
    let mut best_y = y.clone();
    let mut best = score(&y).unwrap_or(f64::NEG_INFINITY);
    let mut last_improve = 0usize;
    let mut mark = best;
    for k in 1..=opts.max_iter {
        let g = grad(&y);
        let gn = norm(&g);
        if gn == 0.0 || !gn.is_finite() {
            return Run { value: best, y: best_y, iterations: k, converged: true };
        }
        let step = match opts.upper_bound {
            Some(ub) => ((ub - f(&y)).max(0.0) / gn).min(step0),
            None => step0 / (k as f64).sqrt(),
        };
        y = project(add(&y, &scale(&g, step / gn)));
        let w = 1.0 / (k as f64 + 1.0);
        avg = add(&scale(&avg, 1.0 - w), &scale(&y, w));
        for cand in [&y, &avg] {
            if let Some(v) = score(cand) {
                if v > best {
                    best = v;
                    best_y = cand.clone();
                }
            }
        }
        if best > mark + opts.tol {
            mark = best;
            last_improve = k;
        } else if k - last_improve >= opts.patience {
            return Run { value: best, y: best_y, iterations: k, converged: true };
        }
    }
    Run { value: best, y: best_y, iterations: opts.max_iter, converged: false }
}

/// Armijo gradient ascent; `retract` maps a trial point back to the
/// feasible manifold and `tangent` projects the gradient onto its tangent
/// space.
fn refine<F, G, R, T>(f: &F, grad: &G, retract: &R, tangent: &T, mut y: Vec<f64>) -> (Vec<f64>, f64, usize)
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
    R: Fn(Vec<f64>) -> Vec<f64>,
    T: Fn(&[f64], Vec<f64>) -> Vec<f64>,
{
    let mut fy = f(&y);
    let mut step = 1.0;
    let mut iters = 0;
    for _ in 0..REFINE_STEPS {
        iters += 1;
        let g = tangent(&y, grad(&y));
        let g2 = dot(&g, &g);
        if g2 == 0.0 || !g2.is_finite() {
            break;
        }
        let mut accepted = false;
        while step > 1e-18 {
            let trial = retract(add(&y, &scale(&g, step)));
            let ft = f(&trial);
            if ft >= fy + ARMIJO * step * g2 {
                let gain = ft - fy;
                y = trial;
                fy = ft;
                accepted = true;
                step *= 2.0;
                if gain <= f64::EPSILON * fy.abs().max(1e-300) {
                    return (y, fy, iters);
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (y, fy, iters)
}

/// Maximizes `φ(Qy)` over the unit ball of `R^rank`.
pub fn ball_concave_max<C: ClosedCone + Sync + ?Sized>(
    cone: &C,
    basis: &SubspaceBasis,
    opts: &MaxOpts,
) -> Result<BallMax> {
    if basis.rank == 0 {
        return Err(Error::Precondition("basis rank must be at least 1".into()));
    }
    if basis.ambient() != cone.dim() {
        return Err(Error::DimensionMismatch { expected: cone.dim(), got: basis.ambient() });
    }
    let r = basis.rank;
    let f = |y: &[f64]| cone.margin_unchecked(&basis.embed(y));
    let grad = |y: &[f64]| basis.coords(&cone.gradient_unchecked(&basis.embed(y)));
    // homogeneity: the sphere value of y is φ(Qy)/‖y‖
    let sphere = |y: &[f64]| {
        let n = norm(y);
        (n > 1e-300).then(|| f(y) / n)
    };

    let axis_start = normalize(&basis.coords(&cone.axis()));
    let runs: Vec<Run> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|i| {
            let start = match (i, &axis_start) {
                (0, Some(s)) => s.clone(),
                _ => unit_vec(&mut stream(opts.seed, i as u64), r),
            };
            ascend(&f, &grad, &sphere, start, 1.0, Some(1.0), opts)
        })
        .collect();
    let best = best_run(runs);

    let start = normalize(&best.y).unwrap_or_else(|| unit_vec(&mut stream(opts.seed, 0), r));
    let (y, sv, extra) = refine(
        &f,
        &grad,
        &|v: Vec<f64>| normalize(&v).unwrap_or(v),
        &|y: &[f64], g: Vec<f64>| {
            let c = dot(&g, y);
            add(&g, &scale(y, -c))
        },
        start,
    );
    let (y, sv) = if sv >= best.value || !best.value.is_finite() {
        (y, sv)
    } else {
        (normalize(&best.y).unwrap_or(y), best.value)
    };
    let point = basis.embed(&y);
    let value = sv.max(0.0);
    let argmax = if sv > -1e-9 { point.clone() } else { vec![0.0; basis.ambient()] };
    Ok(BallMax {
        value,
        argmax,
        sphere_value: sv,
        sphere_point: point,
        iterations: best.iterations + extra,
        converged: best.converged,
    })
}

/// Maximizes `φ(b + Qy)` over `y ∈ R^rank`. The caller guarantees the
/// supremum is finite.
pub fn affine_concave_max<C: ClosedCone + Sync + ?Sized>(
    cone: &C,
    basis: &SubspaceBasis,
    b: &[f64],
    opts: &MaxOpts,
) -> Result<AffineMax> {
    if b.len() != cone.dim() || basis.ambient() != cone.dim() {
        return Err(Error::DimensionMismatch { expected: cone.dim(), got: b.len() });
    }
    let r = basis.rank;
    if r == 0 {
        let v = cone.margin_unchecked(b);
        return Ok(AffineMax { value: v, coords: vec![], point: b.to_vec(), iterations: 0, converged: true });
    }
    let bn = norm(b).max(f64::MIN_POSITIVE);
    let f = |y: &[f64]| cone.margin_unchecked(&add(b, &basis.embed(y)));
    let grad = |y: &[f64]| basis.coords(&cone.gradient_unchecked(&add(b, &basis.embed(y))));
    let score = |y: &[f64]| Some(f(y));

    let runs: Vec<Run> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|i| {
            let start = if i == 0 {
                vec![0.0; r]
            } else {
                let mut rng = stream(opts.seed, 1000 + i as u64);
                let radius: f64 = rng.random_range(0.1..2.0);
                scale(&gaussian_vec(&mut rng, r), radius * bn)
            };
            ascend(&f, &grad, &score, start, bn, None, opts)
        })
        .collect();
    let best = best_run(runs);
    let (y, v, extra) = refine(&f, &grad, &|v| v, &|_: &[f64], g| g, best.y.clone());
    let (y, v) = if v >= best.value { (y, v) } else { (best.y, best.value) };
    Ok(AffineMax {
        value: v,
        point: add(b, &basis.embed(&y)),
        coords: y,
        iterations: best.iterations + extra,
        converged: best.converged,
    })
}
