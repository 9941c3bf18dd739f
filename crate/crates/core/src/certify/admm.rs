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

//! Euclidean projection onto `S = {x : Ax + b ∈ K}` by operator splitting.
//!
//! The splitting variable is `z = Ax + b`. Each iteration solves a fixed
//! regularized normal system for `x`, projects onto `K` for `z` and takes a
//! scaled dual step. The normal matrix `I + ρAᵀA` is factored once per
//! problem so the solver can be shared across samples.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::conegeom::ClosedCone;
use crate::subspace::AffineInclusion;
use crate::vecops::{dist, norm};
use crate::{Error, Result};

const POWER_STEPS: usize = 50;
const STALL_WINDOW: usize = 1000;
/// Residual balancing: every `RHO_PERIOD` iterations, scale `ρ` by
/// `RHO_STEP` when one residual exceeds the other by `RHO_IMBALANCE`.
const RHO_PERIOD: usize = 25;
const RHO_IMBALANCE: f64 = 10.0;
const RHO_STEP: f64 = 2.0;
const MULTIPLIER_STEPS: usize = 200;
const INNER_STEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOpts {
    /// Relative tolerance on the primal residual and the iterate change.
    pub tol: f64,
    pub max_iter: usize,
    /// Over-relaxation factor in `(0, 2)`.
    pub relaxation: f64,
    /// Residual level above which a stalled run is reported infeasible.
    pub stall_level: f64,
    /// Rebalance the penalty when primal and dual residuals drift apart.
    pub adaptive_rho: bool,
    pub seed: u64,
}

impl Default for SolveOpts {
    fn default() -> Self {
        SolveOpts { tol: 1e-9, max_iter: 50_000, relaxation: 1.6, stall_level: 1e-4, adaptive_rho: true, seed: 42 }
    }
}

impl SolveOpts {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Precondition(format!("solver tol {} must be positive", self.tol)));
        }
        if !(self.relaxation > 0.0 && self.relaxation < 2.0) {
            return Err(Error::Precondition(format!(
                "relaxation {} must lie in (0, 2)",
                self.relaxation
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Precondition("max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    MaxIters,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub xstar: Vec<f64>,
    pub dist: f64,
    pub iters: usize,
    pub status: SolveStatus,
    pub primal_residual: f64,
}

impl Projection {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

/// Spectral norm estimate from power iteration on `AᵀA`.
pub fn power_norm(a: &DMatrix<f64>, steps: usize) -> f64 {
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return 0.0;
    }
    // fixed start with distinct entries avoids orthogonality to the top vector
    let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.1 * i as f64);
    v /= v.norm();
    let ata = a.transpose() * a;
    let mut sigma2 = 0.0;
    for _ in 0..steps {
        let w = &ata * &v;
        let wn = w.norm();
        if wn == 0.0 {
            return 0.0;
        }
        sigma2 = v.dot(&w);
        v = w / wn;
    }
    sigma2.max(0.0).sqrt()
}

/// Factored splitting solver for one problem instance.
#[derive(Debug, Clone)]
pub struct AdmmSolver {
    problem: AffineInclusion,
    at: DMatrix<f64>,
    factor: Option<Cholesky<f64, Dyn>>,
    rho: f64,
}

impl AdmmSolver {
    pub fn new(problem: &AffineInclusion) -> Result<Self> {
        let rho = power_norm(&problem.a, POWER_STEPS);
        let at = problem.a.transpose();
        let mut solver = AdmmSolver { problem: problem.clone(), at, factor: None, rho };
        if rho > 0.0 {
            solver.factor = Some(solver.factor_for(rho)?);
        }
        Ok(solver)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn project(&self, x0: &[f64], opts: &SolveOpts) -> Result<Projection> {
        opts.validate()?;
        let p = &self.problem;
        if x0.len() != p.n() {
            return Err(Error::DimensionMismatch { expected: p.n(), got: x0.len() });
        }
        if !x0.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("x0"));
        }
        let z0 = p.apply(x0);
        if p.cone.margin_unchecked(&z0) >= 0.0 {
            return Ok(Projection {
                xstar: x0.to_vec(),
                dist: 0.0,
                iters: 0,
                status: SolveStatus::Converged,
                primal_residual: 0.0,
            });
        }
        let Some(factor) = &self.factor else {
            // A = 0 and b ∉ K: S is empty
            return Ok(Projection {
                xstar: x0.to_vec(),
                dist: 0.0,
                iters: 0,
                status: SolveStatus::Infeasible,
                primal_residual: norm(&z0),
            });
        };

        let alpha = opts.relaxation;
        let scale = norm(&p.b).max(norm(&p.apply_linear(x0))).max(1.0);
        let eps = opts.tol * scale;
        let m = p.m();
        let b = DVector::from_column_slice(&p.b);
        let x0v = DVector::from_column_slice(x0);

        let mut rho = self.rho;
        let mut local_factor: Option<Cholesky<f64, Dyn>> = None;
        let mut x = x0v.clone();
        let mut z = DVector::from_column_slice(&p.cone.project_unchecked(&z0)?);
        // scaled dual variable u = y/ρ
        let mut u = DVector::<f64>::zeros(m);
        let mut r_norm = f64::INFINITY;
        let mut window_start = f64::INFINITY;

        for k in 1..=opts.max_iter {
            let rhs = &x0v + (&self.at * (&z - &b - &u)) * rho;
            let x_new = local_factor.as_ref().unwrap_or(factor).solve(&rhs);
            let ax = &p.a * &x_new;
            let ax_hat = &ax * alpha + (&z - &b) * (1.0 - alpha);
            let v = &ax_hat + &b + &u;
            let z_new = DVector::from_column_slice(&p.cone.project_unchecked(v.as_slice())?);
            u = v - &z_new;

            r_norm = (&ax + &b - &z_new).norm();
            let dx = (&x_new - &x).norm();
            let dz = rho * (&self.at * (&z_new - &z)).norm();
            x = x_new;
            z = z_new;

            if r_norm <= eps && dx <= eps && dz <= eps {
                return Ok(self.finish(x0, x, k, SolveStatus::Converged, r_norm));
            }
            if k % STALL_WINDOW == 0 {
                if let Some(xp) = self.multiplier_search(&x0v, eps) {
                    let r = (-p.cone.margin_unchecked(&p.apply(xp.as_slice()))).max(0.0);
                    return Ok(self.finish(x0, xp, k, SolveStatus::Converged, r));
                }
                if r_norm > opts.stall_level * scale && r_norm > 0.99 * window_start {
                    return Ok(self.finish(x0, x, k, SolveStatus::Infeasible, r_norm));
                }
                window_start = r_norm;
            }
            if opts.adaptive_rho && k % RHO_PERIOD == 0 {
                let factor_change = if r_norm > RHO_IMBALANCE * dz {
                    RHO_STEP
                } else if dz > RHO_IMBALANCE * r_norm {
                    1.0 / RHO_STEP
                } else {
                    1.0
                };
                if factor_change != 1.0 {
                    rho *= factor_change;
                    u /= factor_change;
                    local_factor = Some(self.factor_for(rho)?);
                }
            }
        }
        Ok(self.finish(x0, x, opts.max_iter, SolveStatus::MaxIters, r_norm))
    }

    /// Projection through its multiplier: for `μ ≥ 0` let `x(μ)` minimize
    /// the strongly convex `½‖x − x0‖² − μφ(Ax + b)`; then `φ(Ax(μ) + b)`
    /// is nondecreasing in `μ` and its root is the projection. Returns a
    /// point only when both the inner stationarity and `φ = 0` hold to
    /// `tol`, which certifies it because `S` is convex.
    fn multiplier_search(&self, x0: &DVector<f64>, tol: f64) -> Option<DVector<f64>> {
        let p = &self.problem;
        let margin = |x: &DVector<f64>| p.cone.margin_unchecked(&p.apply(x.as_slice()));
        let mut x_lo = x0.clone();
        let mut mu_lo = 0.0;
        let mut phi_lo = margin(x0);
        if phi_lo >= 0.0 {
            return Some(x0.clone());
        }
        let mut mu_hi = 1.0;
        let mut x_hi = self.inner_minimize(x0, mu_hi, x0, tol)?;
        let mut phi_hi = margin(&x_hi);
        let mut doublings = 0;
        while phi_hi < 0.0 {
            mu_lo = mu_hi;
            x_lo = x_hi.clone();
            phi_lo = phi_hi;
            mu_hi *= 4.0;
            x_hi = self.inner_minimize(x0, mu_hi, &x_hi, tol)?;
            phi_hi = margin(&x_hi);
            doublings += 1;
            if doublings > 60 {
                return None;
            }
        }
        // Illinois regula falsi on the bracket [mu_lo, mu_hi]
        let mut side = 0i8;
        for _ in 0..MULTIPLIER_STEPS {
            if phi_hi.abs() <= tol {
                return Some(x_hi);
            }
            let mut mu = mu_hi - phi_hi * (mu_hi - mu_lo) / (phi_hi - phi_lo);
            if !(mu > mu_lo && mu < mu_hi) {
                mu = 0.5 * (mu_lo + mu_hi);
            }
            let warm = if phi_hi.abs() < phi_lo.abs() { x_hi.clone() } else { x_lo.clone() };
            let x = self.inner_minimize(x0, mu, &warm, tol)?;
            let phi = margin(&x);
            if phi.abs() <= tol {
                return Some(x);
            }
            if phi < 0.0 {
                mu_lo = mu;
                x_lo = x;
                phi_lo = phi;
                if side == -1 {
                    phi_hi *= 0.5;
                }
                side = -1;
            } else {
                mu_hi = mu;
                x_hi = x;
                phi_hi = phi;
                if side == 1 {
                    phi_lo *= 0.5;
                }
                side = 1;
            }
            if mu_hi - mu_lo <= f64::EPSILON * mu_hi {
                break;
            }
        }
        None
    }

    /// Damped Newton on `½‖x − x0‖² − μφ(Ax + b)`.
    fn inner_minimize(&self, x0: &DVector<f64>, mu: f64, start: &DVector<f64>, tol: f64) -> Option<DVector<f64>> {
        let p = &self.problem;
        let n = p.n();
        let objective = |x: &DVector<f64>| 0.5 * (x - x0).norm_squared() - mu * p.cone.margin_unchecked(&p.apply(x.as_slice()));
        let gradient = |x: &DVector<f64>| {
            let g = DVector::from_column_slice(&p.cone.gradient_unchecked(&p.apply(x.as_slice())));
            x - x0 - (&self.at * g) * mu
        };
        let mut x = start.clone();
        let mut fx = objective(&x);
        let mut grad = gradient(&x);
        for _ in 0..INNER_STEPS {
            let gnorm = grad.norm();
            if gnorm <= 0.1 * tol {
                return Some(x);
            }
            let z = p.apply(x.as_slice());
            let hess = DMatrix::identity(n, n) - (&self.at * self.margin_hessian(&z) * &p.a) * mu;
            let dir = match Cholesky::new(hess) {
                Some(c) => -c.solve(&grad),
                None => -grad.clone(),
            };
            let slope = grad.dot(&dir);
            // below rounding resolution of the objective, fall back to
            // decrease of the gradient norm
            let resolution = 64.0 * f64::EPSILON * fx.abs().max(1.0);
            let mut t = 1.0;
            loop {
                let xt = &x + &dir * t;
                let ft = objective(&xt);
                let gt = gradient(&xt);
                let armijo = ft <= fx + 1e-4 * t * slope && fx - ft > resolution;
                if armijo || (ft <= fx + resolution && gt.norm() < gnorm) {
                    x = xt;
                    fx = ft;
                    grad = gt;
                    break;
                }
                t *= 0.5;
                if t < 1e-12 {
                    return (gnorm <= tol).then_some(x);
                }
            }
        }
        (grad.norm() <= tol).then_some(x)
    }

    /// Central-difference Hessian of the margin, symmetrized.
    fn margin_hessian(&self, z: &[f64]) -> DMatrix<f64> {
        let m = z.len();
        let h = 1e-6 * norm(z).max(1.0);
        let cone = &self.problem.cone;
        let mut hess = DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            let mut zp = z.to_vec();
            let mut zm = z.to_vec();
            zp[j] += h;
            zm[j] -= h;
            let gp = cone.gradient_unchecked(&zp);
            let gm = cone.gradient_unchecked(&zm);
            for i in 0..m {
                hess[(i, j)] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        (&hess + hess.transpose()) * 0.5
    }

    fn factor_for(&self, rho: f64) -> Result<Cholesky<f64, Dyn>> {
        let n = self.problem.n();
        let normal = DMatrix::identity(n, n) + (&self.at * &self.problem.a) * rho;
        Cholesky::new(normal).ok_or_else(|| Error::NumericFailure("normal matrix not positive definite".into()))
    }

    fn finish(&self, x0: &[f64], x: DVector<f64>, iters: usize, status: SolveStatus, r: f64) -> Projection {
        let xstar = x.as_slice().to_vec();
        Projection { dist: dist(&xstar, x0), xstar, iters, status, primal_residual: r }
    }
}

/// Nearest point of `S` to `x0`.
pub fn project_onto_solution_set(
    problem: &AffineInclusion,
    x0: &[f64],
    opts: &SolveOpts,
) -> Result<Projection> {
    AdmmSolver::new(problem)?.project(x0, opts)
}
