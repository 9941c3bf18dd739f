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

//! Decides where `Im A` sits relative to `K` and maps that position to an
//! error-bound verdict for `Ax + b ∈ K`.
//!
//! The position is one of three: `Im A` meets `int K`, meets `K` only in a
//! boundary ray, or meets `K` only at the origin. Two convex interior tests
//! separate them: the margin of `K` maximized over `Im A`, and the margin
//! of `K°` maximized over `Ker Aᵀ`. Values within one decade of the
//! threshold on either side are reported as indeterminate.

mod solver;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::certify::admm::{AdmmSolver, SolveOpts};
use crate::conegeom::{ClosedCone, ConeSpec};
use crate::subspace::{complement, image_basis, pseudo_inverse, AffineInclusion, SubspaceBasis};
use crate::vecops::{add, norm, scale, sub};
use crate::{Error, Result};

pub use solver::{affine_concave_max, ball_concave_max, AffineMax, BallMax, MaxOpts};

/// Steps of alternating projection used to clean up a recovered ray.
const PURIFY_STEPS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntersectionClass {
    MeetsInterior,
    BoundaryRayOnly,
    ZeroOnly,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremCase {
    T51,
    T52i,
    T52ii,
    T52iii,
    T53i,
    T53ii,
    T53iii,
    DegenerateAZero,
    Infeasible,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GebVerdict {
    Holds,
    Fails,
    TriviallyHolds,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AcqVerdict {
    Holds,
    Fails,
    Unknown,
}

impl TheoremCase {
    pub const ALL: [TheoremCase; 10] = [
        TheoremCase::T51,
        TheoremCase::T52i,
        TheoremCase::T52ii,
        TheoremCase::T52iii,
        TheoremCase::T53i,
        TheoremCase::T53ii,
        TheoremCase::T53iii,
        TheoremCase::DegenerateAZero,
        TheoremCase::Infeasible,
        TheoremCase::Indeterminate,
    ];

    /// The `(error bound, Abadie)` pair implied by the case.
    pub fn verdicts(self) -> (GebVerdict, AcqVerdict) {
        use TheoremCase::*;
        match self {
            T51 | T52i | T52ii | T53iii => (GebVerdict::Holds, AcqVerdict::Holds),
            T52iii | T53i => (GebVerdict::Fails, AcqVerdict::Fails),
            T53ii => (GebVerdict::Fails, AcqVerdict::Holds),
            DegenerateAZero => (GebVerdict::TriviallyHolds, AcqVerdict::Holds),
            Infeasible | Indeterminate => (GebVerdict::Unknown, AcqVerdict::Unknown),
        }
    }

    pub fn name(self) -> &'static str {
        use TheoremCase::*;
        match self {
            T51 => "T51",
            T52i => "T52i",
            T52ii => "T52ii",
            T52iii => "T52iii",
            T53i => "T53i",
            T53ii => "T53ii",
            T53iii => "T53iii",
            DegenerateAZero => "DegenerateAZero",
            Infeasible => "Infeasible",
            Indeterminate => "Indeterminate",
        }
    }

    pub fn is_definite(self) -> bool {
        !matches!(self, TheoremCase::Infeasible | TheoremCase::Indeterminate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyOpts {
    /// Threshold on normalized margins and relative residuals.
    pub eps: f64,
    pub rank_tol: f64,
    pub seed: u64,
    pub solver: MaxOpts,
    pub feasibility: SolveOpts,
}

impl Default for ClassifyOpts {
    fn default() -> Self {
        ClassifyOpts {
            eps: 1e-7,
            rank_tol: crate::subspace::DEFAULT_RANK_TOL,
            seed: 42,
            solver: MaxOpts::default(),
            feasibility: SolveOpts { max_iter: 20_000, ..SolveOpts::default() },
        }
    }
}

impl ClassifyOpts {
    pub fn with_eps(eps: f64) -> Self {
        ClassifyOpts { eps, ..Self::default() }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::Precondition(format!("eps {} must be positive", self.eps)));
        }
        Ok(())
    }

    fn solver_opts(&self, salt: u64) -> MaxOpts {
        MaxOpts { seed: crate::rng::subseed(self.seed, &format!("solver-{salt}")), ..self.solver }
    }
}

/// Three-way reading of a value against `eps` with a one-decade band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Band {
    Below,
    Ambiguous,
    Above,
}

fn band(value: f64, eps: f64) -> Band {
    if !value.is_finite() || (value >= eps / 10.0 && value <= eps * 10.0) {
        Band::Ambiguous
    } else if value > eps * 10.0 {
        Band::Above
    } else {
        Band::Below
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trichotomy {
    pub class: IntersectionClass,
    /// Unit interior point of `K` in the subspace, or the unit ray direction.
    pub witness: Option<Vec<f64>>,
    pub primal_value: f64,
    /// Not computed when the primal test already decides.
    pub dual_value: Option<f64>,
    pub solver_tol: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Recovers the unit ray of `L ∩ K` from an approximate sphere maximizer.
fn purify_ray<C: ClosedCone + ?Sized>(cone: &C, basis: &SubspaceBasis, start: &[f64]) -> Result<Vec<f64>> {
    let quality = |d: &[f64]| cone.margin_unchecked(d).abs() + basis.residual(d);
    let mut best = basis.project(start);
    best = scale(&best, 1.0 / norm(&best).max(f64::MIN_POSITIVE));
    let mut d = best.clone();
    for _ in 0..PURIFY_STEPS {
        let p = basis.project(&cone.project_unchecked(&d)?);
        let n = norm(&p);
        if n == 0.0 {
            break;
        }
        d = scale(&p, 1.0 / n);
        if quality(&d) < quality(&best) {
            best = d.clone();
        }
    }
    Ok(best)
}

pub fn trichotomy(basis: &SubspaceBasis, cone: &ConeSpec, opts: &ClassifyOpts) -> Result<Trichotomy> {
    opts.validate()?;
    if basis.ambient() != cone.m() {
        return Err(Error::DimensionMismatch { expected: cone.m(), got: basis.ambient() });
    }
    let eps = opts.eps;
    let mut out = Trichotomy {
        class: IntersectionClass::Indeterminate,
        witness: None,
        primal_value: 0.0,
        dual_value: None,
        solver_tol: opts.solver.tol,
        iterations: 0,
        converged: true,
    };
    if basis.rank > 0 {
        let primal = ball_concave_max(cone, basis, &opts.solver_opts(1))?;
        out.primal_value = primal.value;
        out.iterations += primal.iterations;
        out.converged &= primal.converged;
        match band(primal.value, eps) {
            Band::Above if primal.converged || primal.value > 0.0 => {
                let w = &primal.argmax;
                out.class = IntersectionClass::MeetsInterior;
                out.witness = Some(scale(w, 1.0 / norm(w)));
                return Ok(out);
            }
            Band::Ambiguous => return Ok(out),
            _ => {}
        }
        if !primal.converged {
            return Ok(out);
        }
    }

    let kernel = complement(basis);
    let polar = cone.polar();
    let dual = if kernel.rank > 0 {
        ball_concave_max(&polar, &kernel, &opts.solver_opts(2))?
    } else {
        BallMax {
            value: 0.0,
            argmax: vec![0.0; cone.m()],
            sphere_value: f64::NEG_INFINITY,
            sphere_point: vec![0.0; cone.m()],
            iterations: 0,
            converged: true,
        }
    };
    out.dual_value = Some(dual.value);
    out.iterations += dual.iterations;
    out.converged &= dual.converged;
    match band(dual.value, eps) {
        Band::Above => {
            out.class = IntersectionClass::ZeroOnly;
            return Ok(out);
        }
        Band::Ambiguous => return Ok(out),
        Band::Below => {}
    }
    if !dual.converged || basis.rank == 0 {
        return Ok(out);
    }

    // the ray maximizes the margin over the unit sphere of the subspace
    let primal = ball_concave_max(cone, basis, &opts.solver_opts(1))?;
    let d = purify_ray(cone, basis, &primal.sphere_point)?;
    if cone.margin_unchecked(&d).abs() <= eps && basis.residual(&d) <= 1e-8 {
        out.class = IntersectionClass::BoundaryRayOnly;
        out.witness = Some(d);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineTest {
    /// Point of `(Im A + b) ∩ int K`, when one was found.
    pub witness: Option<Vec<f64>>,
    /// Best margin on `Im A + b`, divided by `‖b‖` when `b ≠ 0`.
    pub value: f64,
    /// Best point `b + Qy*`.
    pub point: Vec<f64>,
    /// The margin grows without bound along `Im A + b`.
    pub unbounded: bool,
    pub iterations: usize,
    pub converged: bool,
}

pub fn affine_interior_test(
    basis: &SubspaceBasis,
    b: &[f64],
    cone: &ConeSpec,
    opts: &ClassifyOpts,
) -> Result<AffineTest> {
    opts.validate()?;
    if b.len() != cone.m() || basis.ambient() != cone.m() {
        return Err(Error::DimensionMismatch { expected: cone.m(), got: b.len() });
    }
    let bn = norm(b);
    let unit = if bn > 0.0 { bn } else { 1.0 };
    if basis.rank > 0 {
        let ball = ball_concave_max(cone, basis, &opts.solver_opts(1))?;
        if band(ball.value, opts.eps) == Band::Above {
            // superadditivity: φ(b + tw) ≥ φ(b) + tφ(w)
            let w = &ball.argmax;
            let t = 1.0 + 2.0 * (-cone.margin_unchecked(b)).max(0.0) / ball.value;
            let point = add(b, &scale(w, t * unit / norm(w)));
            let value = cone.margin_unchecked(&point) / unit;
            return Ok(AffineTest {
                witness: Some(point.clone()),
                value,
                point,
                unbounded: true,
                iterations: ball.iterations,
                converged: true,
            });
        }
    }
    let best = affine_concave_max(cone, basis, b, &opts.solver_opts(3))?;
    let value = best.value / unit;
    let witness = (band(value, opts.eps) == Band::Above).then(|| best.point.clone());
    Ok(AffineTest {
        witness,
        value,
        point: best.point,
        unbounded: false,
        iterations: best.iterations,
        converged: best.converged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witnesses {
    /// `x̂` with `Ax̂ + b ∈ int K`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slater: Option<Vec<f64>>,
    /// Unit direction of the ray `Im A ∩ K`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ray: Option<Vec<f64>>,
    /// The single point of `(Im A + b) ∩ K` in the tangent case.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub touching: Option<Vec<f64>>,
    /// Some `x ∈ S`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feasible: Option<Vec<f64>>,
    /// `‖b − P_{Im A} b‖ / ‖b‖`, zero when `b = 0`.
    pub b_residual: f64,
    #[serde(rename = "rank_imA")]
    pub rank_im_a: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub intersection: IntersectionClass,
    pub primal_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub affine_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_in_image: Option<bool>,
    pub eps: f64,
    pub solver_tol: f64,
    pub solver_iters: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub case: TheoremCase,
    pub geb: GebVerdict,
    pub acq: AcqVerdict,
    pub witnesses: Witnesses,
    pub diagnostics: Diagnostics,
}

/// Mutable state threaded through the decision tree.
struct Tree<'a> {
    problem: &'a AffineInclusion,
    opts: &'a ClassifyOpts,
    pinv: DMatrix<f64>,
    witnesses: Witnesses,
    diag: Diagnostics,
}

impl Tree<'_> {
    fn finish(self, case: TheoremCase) -> Classification {
        let (geb, acq) = case.verdicts();
        Classification { case, geb, acq, witnesses: self.witnesses, diagnostics: self.diag }
    }

    fn undecided(mut self, case: TheoremCase, reason: &str) -> Classification {
        self.diag.reason = Some(reason.to_string());
        self.finish(case)
    }

    /// Minimum-norm `x` with `Ax = v` for `v ∈ Im A`.
    fn preimage(&self, v: &[f64]) -> Vec<f64> {
        let y = &self.pinv * nalgebra::DVector::from_column_slice(v);
        y.as_slice().to_vec()
    }

    /// Records `x̂ = A⁺(z − b)` for a point `z ∈ (Im A + b) ∩ K`.
    fn record_point(&mut self, z: &[f64], slater: bool) {
        let x = self.preimage(&sub(z, &self.problem.b));
        if slater {
            self.witnesses.slater = Some(x.clone());
        }
        self.witnesses.feasible = Some(x);
    }

    /// Decides feasibility from the best affine margin, falling back on the
    /// splitting solver when the margin is inconclusive.
    fn feasibility(&mut self, test: &AffineTest) -> Result<Option<bool>> {
        let eps = self.opts.eps;
        if test.value >= -eps / 10.0 {
            self.record_point(&test.point, false);
            return Ok(Some(true));
        }
        let solver = AdmmSolver::new(self.problem)?;
        let run = solver.project(&vec![0.0; self.problem.n()], &self.opts.feasibility)?;
        self.diag.solver_iters += run.iters;
        if run.converged() {
            self.witnesses.feasible = Some(run.xstar);
            return Ok(Some(true));
        }
        Ok((test.value < -10.0 * eps).then_some(false))
    }
}

/// Classifies `Ax + b ∈ K` and derives the error-bound and Abadie verdicts.
pub fn classify_geb(problem: &AffineInclusion, opts: &ClassifyOpts) -> Result<Classification> {
    opts.validate()?;
    let eps = opts.eps;
    let cone = problem.cone;
    let b = &problem.b;
    let im = image_basis(&problem.a, opts.rank_tol)?;
    let bn = norm(b);
    let b_residual = if bn > 0.0 { im.residual(b) / bn } else { 0.0 };
    let b_in_image = match band(b_residual, eps) {
        Band::Below => Some(true),
        Band::Above => Some(false),
        Band::Ambiguous => None,
    };
    let mut tree = Tree {
        problem,
        opts,
        pinv: pseudo_inverse(&problem.a, opts.rank_tol),
        witnesses: Witnesses {
            slater: None,
            ray: None,
            touching: None,
            feasible: None,
            b_residual,
            rank_im_a: im.rank,
        },
        diag: Diagnostics {
            intersection: IntersectionClass::Indeterminate,
            primal_value: 0.0,
            dual_value: None,
            affine_value: None,
            b_in_image,
            eps,
            solver_tol: opts.solver.tol,
            solver_iters: 0,
            reason: None,
        },
    };

    if im.rank == 0 {
        let v = cone.margin_unchecked(b) / bn.max(1.0);
        tree.diag.affine_value = Some(v);
        return Ok(match band(-v, eps) {
            Band::Below => {
                tree.witnesses.feasible = Some(vec![0.0; problem.n()]);
                tree.finish(TheoremCase::DegenerateAZero)
            }
            Band::Above => tree.undecided(TheoremCase::Infeasible, "A = 0 and b lies outside K"),
            Band::Ambiguous => tree.undecided(TheoremCase::Indeterminate, "b is within tolerance of bd K"),
        });
    }

    let tri = trichotomy(&im, &cone, opts)?;
    tree.diag.intersection = tri.class;
    tree.diag.primal_value = tri.primal_value;
    tree.diag.dual_value = tri.dual_value;
    tree.diag.solver_iters += tri.iterations;

    match tri.class {
        IntersectionClass::Indeterminate => {
            Ok(tree.undecided(TheoremCase::Indeterminate, "interior tests inside the ambiguity band"))
        }
        IntersectionClass::MeetsInterior => {
            let w = tri.witness.expect("interior witness");
            let t = 1.0 + 2.0 * (-cone.margin_unchecked(b)).max(0.0) / cone.margin_unchecked(&w);
            let z = add(b, &scale(&w, t));
            tree.record_point(&z, true);
            Ok(tree.finish(TheoremCase::T51))
        }
        IntersectionClass::ZeroOnly => {
            let test = affine_interior_test(&im, b, &cone, opts)?;
            tree.diag.affine_value = Some(test.value);
            tree.diag.solver_iters += test.iterations;
            if let Some(z) = &test.witness {
                tree.record_point(z, true);
                return Ok(tree.finish(TheoremCase::T52i));
            }
            if band(test.value, eps) == Band::Ambiguous {
                return Ok(tree.undecided(TheoremCase::Indeterminate, "affine margin inside the ambiguity band"));
            }
            match b_in_image {
                None => Ok(tree.undecided(TheoremCase::Indeterminate, "b-membership residual inside the ambiguity band")),
                Some(true) => {
                    tree.witnesses.feasible = Some(tree.preimage(&scale(b, -1.0)));
                    Ok(tree.finish(TheoremCase::T52ii))
                }
                Some(false) => match tree.feasibility(&test)? {
                    None => Ok(tree.undecided(TheoremCase::Indeterminate, "feasibility undecided")),
                    Some(false) => Ok(tree.undecided(TheoremCase::Infeasible, "Im A + b misses K")),
                    Some(true) => {
                        tree.witnesses.touching = Some(test.point.clone());
                        Ok(tree.finish(TheoremCase::T52iii))
                    }
                },
            }
        }
        IntersectionClass::BoundaryRayOnly => {
            tree.witnesses.ray = tri.witness.clone();
            let b_in = match b_in_image {
                None => {
                    return Ok(tree.undecided(
                        TheoremCase::Indeterminate,
                        "b-membership residual inside the ambiguity band",
                    ))
                }
                Some(v) => v,
            };
            if b_in {
                tree.witnesses.feasible = Some(tree.preimage(&scale(b, -1.0)));
            } else {
                let test = affine_interior_test(&im, b, &cone, opts)?;
                tree.diag.affine_value = Some(test.value);
                tree.diag.solver_iters += test.iterations;
                match tree.feasibility(&test)? {
                    None => return Ok(tree.undecided(TheoremCase::Indeterminate, "feasibility undecided")),
                    Some(false) => return Ok(tree.undecided(TheoremCase::Infeasible, "Im A + b misses K")),
                    Some(true) => {
                        if test.witness.is_some() {
                            tree.record_point(&test.point, true);
                        }
                    }
                }
            }
            let case = if im.rank == 1 {
                TheoremCase::T53iii
            } else if b_in {
                TheoremCase::T53i
            } else {
                TheoremCase::T53ii
            };
            Ok(tree.finish(case))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn k2(m: usize) -> ConeSpec {
        ConeSpec::second_order(m).unwrap()
    }

    fn basis(cols: &[&[f64]]) -> SubspaceBasis {
        let m = cols[0].len();
        let a = DMatrix::from_fn(m, cols.len(), |r, c| cols[c][r]);
        image_basis(&a, 1e-10).unwrap()
    }

    fn problem(rows: &[&[f64]], b: &[f64], cone: ConeSpec) -> AffineInclusion {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        AffineInclusion::from_rows(&rows, b.to_vec(), cone).unwrap()
    }

    #[test]
    fn ball_max_examples() {
        let opts = MaxOpts::default();
        let full = basis(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let r = ball_concave_max(&k2(3), &full, &opts).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!((r.argmax[0] - 1.0).abs() < 1e-9 && r.argmax[1].abs() < 1e-9);

        let line = basis(&[&[0.0, 1.0, 0.0]]);
        let r = ball_concave_max(&k2(3), &line, &opts).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(norm(&r.argmax) == 0.0);

        let plane = basis(&[&[FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0], &[0.0, 0.0, 1.0]]);
        let r = ball_concave_max(&k2(3), &plane, &opts).unwrap();
        assert!(r.value < 1e-12);
        let d = &r.sphere_point;
        let s = d[0].signum();
        assert!((s * d[0] - FRAC_1_SQRT_2).abs() < 1e-5 && (s * d[1] - FRAC_1_SQRT_2).abs() < 1e-5);
    }

    #[test]
    fn trichotomy_examples() {
        let opts = ClassifyOpts::default();
        let full = basis(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let t = trichotomy(&full, &k2(3), &opts).unwrap();
        assert_eq!(t.class, IntersectionClass::MeetsInterior);
        let w = t.witness.unwrap();
        assert!((w[0] - 1.0).abs() < 1e-9);

        let line = basis(&[&[0.0, 1.0, 0.0]]);
        assert_eq!(trichotomy(&line, &k2(3), &opts).unwrap().class, IntersectionClass::ZeroOnly);

        let plane = basis(&[&[1.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let t = trichotomy(&plane, &k2(3), &opts).unwrap();
        assert_eq!(t.class, IntersectionClass::BoundaryRayOnly);
        let d = t.witness.unwrap();
        assert!((d[0] - FRAC_1_SQRT_2).abs() < 1e-7 && (d[1] - FRAC_1_SQRT_2).abs() < 1e-7);
        assert!(k2(3).margin_unchecked(&d).abs() <= 1e-7);
    }

    #[test]
    fn affine_test_examples() {
        let opts = ClassifyOpts::default();
        let line = basis(&[&[0.0, 1.0, 0.0]]);
        let t = affine_interior_test(&line, &[1.0, 0.0, 0.0], &k2(3), &opts).unwrap();
        let w = t.witness.unwrap();
        assert!(k2(3).margin_unchecked(&w) > 0.0);

        let t = affine_interior_test(&line, &[1.0, 0.0, 1.0], &k2(3), &opts).unwrap();
        assert!(t.witness.is_none());
        assert!(t.value.abs() < 1e-12);

        let t = affine_interior_test(&line, &[-1.0, 0.0, 0.0], &k2(3), &opts).unwrap();
        assert!(t.witness.is_none());
        assert!((t.value + 1.0).abs() < 1e-9);
    }

    #[test]
    fn worked_instances() {
        let opts = ClassifyOpts::default();
        let cases = [
            (problem(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]], &[0.0; 3], k2(3)), TheoremCase::T51),
            (problem(&[&[0.0], &[1.0], &[0.0]], &[1.0, 0.0, 1.0], k2(3)), TheoremCase::T52iii),
            (problem(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]], &[1.0, 0.0, 0.0], k2(3)), TheoremCase::T53ii),
            (problem(&[&[1.0], &[1.0]], &[0.0, 0.0], k2(2)), TheoremCase::T53iii),
            (problem(&[&[0.0], &[1.0], &[0.0]], &[-1.0, 0.0, 0.0], k2(3)), TheoremCase::Infeasible),
            (problem(&[&[0.0], &[1.0], &[0.0]], &[1.0, 0.0, 0.0], k2(3)), TheoremCase::T52i),
            (problem(&[&[0.0], &[1.0], &[0.0]], &[0.0, 2.0, 0.0], k2(3)), TheoremCase::T52ii),
            (problem(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]], &[1.0, 1.0, 0.0], k2(3)), TheoremCase::T53i),
        ];
        for (p, expected) in cases {
            let c = classify_geb(&p, &opts).unwrap();
            assert_eq!(c.case, expected, "{:?}", c.diagnostics);
            assert_eq!((c.geb, c.acq), expected.verdicts());
        }
    }

    #[test]
    fn zero_matrix_cases() {
        let opts = ClassifyOpts::default();
        let zero = AffineInclusion::new(DMatrix::zeros(3, 2), vec![1.0, 0.0, 1.0], k2(3)).unwrap();
        let c = classify_geb(&zero, &opts).unwrap();
        assert_eq!(c.case, TheoremCase::DegenerateAZero);
        assert_eq!(c.geb, GebVerdict::TriviallyHolds);
        let out = AffineInclusion::new(DMatrix::zeros(3, 2), vec![-1.0, 0.0, 0.0], k2(3)).unwrap();
        assert_eq!(classify_geb(&out, &opts).unwrap().case, TheoremCase::Infeasible);
    }

    #[test]
    fn large_eps_is_indeterminate() {
        let p = problem(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]], &[1.0, 0.0, 0.0], k2(3));
        let c = classify_geb(&p, &ClassifyOpts::with_eps(0.1)).unwrap();
        assert_eq!(c.case, TheoremCase::Indeterminate);
    }

    #[test]
    fn verdict_table_is_exact() {
        use AcqVerdict as A;
        use GebVerdict as G;
        use TheoremCase::*;
        assert_eq!(T51.verdicts(), (G::Holds, A::Holds));
        assert_eq!(T52i.verdicts(), (G::Holds, A::Holds));
        assert_eq!(T52ii.verdicts(), (G::Holds, A::Holds));
        assert_eq!(T52iii.verdicts(), (G::Fails, A::Fails));
        assert_eq!(T53i.verdicts(), (G::Fails, A::Fails));
        assert_eq!(T53ii.verdicts(), (G::Fails, A::Holds));
        assert_eq!(T53iii.verdicts(), (G::Holds, A::Holds));
    }
}
