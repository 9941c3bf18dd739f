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

//! Numerical certification of error bounds for `Ax + b ∈ K`.
//!
//! Distances to the solution set `S` come from [`SolutionSet`], which uses
//! closed forms when the classification pins `S` down to an affine set or
//! the preimage of a ray, and the splitting solver otherwise. On top of it
//! sit the sampled modulus, the normal-cone scaling constant `τ`, the
//! divergence probes and the bundled nonlinear example.

pub mod admm;
pub mod example51;
mod modulus;
mod probe;
mod tau;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::classify::{classify_geb, Classification, ClassifyOpts, GebVerdict, TheoremCase};
use crate::conegeom::distance;
use crate::subspace::{pseudo_inverse, AffineInclusion};
use crate::vecops::{dist, dot};
use crate::{Error, Result};

pub use admm::{project_onto_solution_set, AdmmSolver, Projection, SolveOpts, SolveStatus};
pub use example51::{
    example51_suite, ConcavityCheck, DivergenceSearch, Example51Report, ResidualIdentityCheck, ScqCheck,
};
pub use modulus::{certify_problem, modulus_estimate, CertifyReport, ModulusOpts, RadiusStats, SampleRecord};
pub use probe::{divergence_probe, ProbeKind, ProbeTrace, TracePoint};
pub use tau::{apex_tau, tau_estimate, TauOpts, TauReport};

/// `d(Ax + b, K)`.
pub fn residual(problem: &AffineInclusion, x: &[f64]) -> Result<f64> {
    if x.len() != problem.n() {
        return Err(Error::DimensionMismatch { expected: problem.n(), got: x.len() });
    }
    distance(&problem.cone, &problem.apply(x))
}

/// `max(f, 0)/‖g‖`: a lower bound on `d(x, {f ≤ 0})` for convex `f` with
/// subgradient `g` at `x`.
pub fn convex_lower_bound_distance(f_value: f64, grad_norm: f64) -> Result<f64> {
    if !f_value.is_finite() || !grad_norm.is_finite() || grad_norm < 0.0 {
        return Err(Error::NonFinite("lower bound inputs"));
    }
    if f_value <= 0.0 {
        return Ok(0.0);
    }
    if grad_norm <= 1e-14 {
        return Err(Error::ZeroGradient);
    }
    Ok(f_value / grad_norm)
}

/// Heuristic reading of sampled ratios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictHint {
    BoundedEvidence,
    DivergenceEvidence,
    Inconclusive,
}

impl VerdictHint {
    /// True when the hint points the opposite way from a definite verdict.
    pub fn contradicts(self, geb: GebVerdict) -> bool {
        matches!(
            (self, geb),
            (VerdictHint::DivergenceEvidence, GebVerdict::Holds | GebVerdict::TriviallyHolds)
                | (VerdictHint::BoundedEvidence, GebVerdict::Fails)
        )
    }
}

/// Exact or iterative access to the nearest point of `S`.
#[derive(Debug, Clone)]
pub enum SolutionSet {
    /// `S = R^n`.
    Whole,
    /// `S = {x : Ax = rhs}` with `rhs ∈ Im A`.
    Affine { a: DMatrix<f64>, pinv: DMatrix<f64>, rhs: Vec<f64> },
    /// `S = {x : Ax + b = λd, λ ≥ 0}` with `b ∈ Im A`.
    RayPreimage { a: DMatrix<f64>, pinv: DMatrix<f64>, b: Vec<f64>, direction: Vec<f64> },
    General { solver: AdmmSolver, opts: SolveOpts },
}

fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(v)).as_slice().to_vec()
}

impl SolutionSet {
    /// Chooses the cheapest exact representation the classification allows.
    pub fn from_classification(
        problem: &AffineInclusion,
        cls: &Classification,
        opts: &SolveOpts,
        rank_tol: f64,
    ) -> Result<Self> {
        let pinv = || pseudo_inverse(&problem.a, rank_tol);
        let b_in = cls.diagnostics.b_in_image == Some(true);
        Ok(match cls.case {
            TheoremCase::DegenerateAZero => SolutionSet::Whole,
            TheoremCase::T52ii => SolutionSet::Affine {
                a: problem.a.clone(),
                pinv: pinv(),
                rhs: problem.b.iter().map(|v| -v).collect(),
            },
            TheoremCase::T52iii => {
                let z = cls.witnesses.touching.as_ref().ok_or_else(|| {
                    Error::NumericFailure("tangent case without a touching point".into())
                })?;
                SolutionSet::Affine {
                    a: problem.a.clone(),
                    pinv: pinv(),
                    rhs: z.iter().zip(&problem.b).map(|(z, b)| z - b).collect(),
                }
            }
            TheoremCase::T53i | TheoremCase::T53iii if b_in && cls.witnesses.ray.is_some() => {
                SolutionSet::RayPreimage {
                    a: problem.a.clone(),
                    pinv: pinv(),
                    b: problem.b.clone(),
                    direction: cls.witnesses.ray.clone().expect("checked above"),
                }
            }
            _ => SolutionSet::General { solver: AdmmSolver::new(problem)?, opts: *opts },
        })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SolutionSet::Whole => "whole",
            SolutionSet::Affine { .. } => "affine",
            SolutionSet::RayPreimage { .. } => "ray_preimage",
            SolutionSet::General { .. } => "splitting",
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, SolutionSet::General { .. })
    }

    pub fn project(&self, x0: &[f64]) -> Result<Projection> {
        let exact = |xstar: Vec<f64>| Projection {
            dist: dist(&xstar, x0),
            xstar,
            iters: 0,
            status: SolveStatus::Converged,
            primal_residual: 0.0,
        };
        match self {
            SolutionSet::Whole => Ok(exact(x0.to_vec())),
            SolutionSet::Affine { a, pinv, rhs } => {
                check_len(x0, a.ncols())?;
                let r: Vec<f64> = mat_vec(a, x0).iter().zip(rhs).map(|(u, v)| u - v).collect();
                let corr = mat_vec(pinv, &r);
                Ok(exact(x0.iter().zip(&corr).map(|(x, c)| x - c).collect()))
            }
            SolutionSet::RayPreimage { a, pinv, b, direction } => {
                check_len(x0, a.ncols())?;
                // minimize ‖A⁺(Ax0 + b − λd)‖ over λ ≥ 0
                let shifted: Vec<f64> = mat_vec(a, x0).iter().zip(b).map(|(u, v)| u + v).collect();
                let c = mat_vec(pinv, &shifted);
                let w = mat_vec(pinv, direction);
                let ww = dot(&w, &w);
                let lambda = if ww > 0.0 { (dot(&c, &w) / ww).max(0.0) } else { 0.0 };
                Ok(exact(
                    x0.iter().zip(c.iter().zip(&w)).map(|(x, (c, w))| x - c + lambda * w).collect(),
                ))
            }
            SolutionSet::General { solver, opts } => solver.project(x0, opts),
        }
    }
}

fn check_len(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    Ok(())
}

/// A problem together with its classification and solution-set oracle.
#[derive(Debug, Clone)]
pub struct Certifier {
    pub problem: AffineInclusion,
    pub classification: Classification,
    pub set: SolutionSet,
}

impl Certifier {
    pub fn new(problem: &AffineInclusion, classify: &ClassifyOpts, solve: &SolveOpts) -> Result<Self> {
        let classification = classify_geb(problem, classify)?;
        Self::with_classification(problem, classification, solve, classify.rank_tol)
    }

    pub fn with_classification(
        problem: &AffineInclusion,
        classification: Classification,
        solve: &SolveOpts,
        rank_tol: f64,
    ) -> Result<Self> {
        let set = SolutionSet::from_classification(problem, &classification, solve, rank_tol)?;
        Ok(Certifier { problem: problem.clone(), classification, set })
    }
}

/// Runs `f` on a dedicated pool when a thread count is given.
pub(crate) fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::NumericFailure(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conegeom::ConeSpec;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn problem(rows: &[&[f64]], b: &[f64], cone: ConeSpec) -> AffineInclusion {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        AffineInclusion::from_rows(&rows, b.to_vec(), cone).unwrap()
    }

    #[test]
    fn residual_examples() {
        let k2 = ConeSpec::second_order(2).unwrap();
        let p = problem(&[&[1.0, 0.0], &[0.0, 1.0]], &[0.0, 0.0], k2);
        assert!((residual(&p, &[0.0, 1.0]).unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(residual(&p, &[2.0, 1.0]).unwrap(), 0.0);
        let orth = problem(&[&[1.0, 0.0], &[0.0, 1.0]], &[0.0, 0.0], ConeSpec::orthant(2).unwrap());
        assert!((residual(&orth, &[-1.0, -1.0]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(residual(&orth, &[1.0]).is_err());
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(convex_lower_bound_distance(2.0, 1.0).unwrap(), 2.0);
        assert_eq!(convex_lower_bound_distance(-1.0, 5.0).unwrap(), 0.0);
        assert!((convex_lower_bound_distance(1.0, 1e-3).unwrap() - 1000.0).abs() < 1e-9);
        assert_eq!(convex_lower_bound_distance(1.0, 0.0), Err(Error::ZeroGradient));
    }

    #[test]
    fn tangent_line_projects_to_origin() {
        let k3 = ConeSpec::second_order(3).unwrap();
        let p = problem(&[&[0.0], &[1.0], &[0.0]], &[1.0, 0.0, 1.0], k3);
        let c = Certifier::new(&p, &ClassifyOpts::default(), &SolveOpts::default()).unwrap();
        assert_eq!(c.set.kind_name(), "affine");
        let r = c.set.project(&[0.3]).unwrap();
        assert!(r.xstar[0].abs() < 1e-9 && (r.dist - 0.3).abs() < 1e-9);
        // the splitting solver heads the same way but converges sublinearly at a tangency
        let admm = project_onto_solution_set(&p, &[0.3], &SolveOpts::default()).unwrap();
        assert!(admm.xstar[0].abs() < 0.05, "{admm:?}");
    }

    #[test]
    fn ray_preimage_matches_half_line() {
        let k2 = ConeSpec::second_order(2).unwrap();
        let p = problem(&[&[1.0], &[1.0]], &[0.0, 0.0], k2);
        let c = Certifier::new(&p, &ClassifyOpts::default(), &SolveOpts::default()).unwrap();
        assert_eq!(c.set.kind_name(), "ray_preimage");
        assert_eq!(c.set.project(&[-2.0]).unwrap().xstar, vec![0.0]);
        assert!((c.set.project(&[3.0]).unwrap().dist).abs() < 1e-15);
    }

    #[test]
    fn hint_contradictions() {
        assert!(VerdictHint::DivergenceEvidence.contradicts(GebVerdict::Holds));
        assert!(VerdictHint::BoundedEvidence.contradicts(GebVerdict::Fails));
        assert!(!VerdictHint::Inconclusive.contradicts(GebVerdict::Fails));
        assert!(!VerdictHint::BoundedEvidence.contradicts(GebVerdict::Unknown));
    }
}
