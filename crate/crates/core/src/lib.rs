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

//! Smooth convex cones, global error bounds for affine conic inclusions
//! `Ax + b ∈ K`, and sampling-based certification of those bounds.
//!
//! The crate is organised bottom-up:
//!
//! * [`conegeom`]: margins, projections, polars and normal rays for the
//!   second-order cone, p-cones, circular cones and the 2-D orthant.
//! * [`subspace`]: orthonormal bases for `Im A` and `Ker Aᵀ`.
//! * [`classify`]: decides which position `Im A` has relative to `K` and
//!   maps it to an error-bound / Abadie verdict.
//! * [`certify`]: projection onto the solution set, sampled moduli, the
//!   normal-cone scaling constant and divergence probes.
//! * [`cli`]: problem files, reports and the command implementations used
//!   by the `conebound` binary.

pub mod certify;
pub mod classify;
pub mod cli;
pub mod conegeom;
pub mod instances;
mod error;
pub mod rng;
pub mod selftest;
pub mod subspace;
pub(crate) mod vecops;

pub use error::{Error, Result};

pub use certify::{
    convex_lower_bound_distance, example51_suite, modulus_estimate, project_onto_solution_set,
    residual, tau_estimate, CertifyReport, ModulusOpts, SolutionSet, SolveOpts, TauOpts,
    TauReport, VerdictHint,
};
pub use classify::{
    affine_interior_test, ball_concave_max, classify_geb, trichotomy, AcqVerdict, Classification,
    ClassifyOpts, GebVerdict, IntersectionClass, TheoremCase, Trichotomy,
};
pub use conegeom::{
    classify_point, distance, moreau_decompose, normal_ray, strict_convexity_probe, ClosedCone,
    ConeSpec, ExponentRule, MemberClass, Membership, NormalRay, SignedCone, DEFAULT_TOL,
};
pub use subspace::{
    contains_vector, image_basis, kernel_adjoint_basis, span_shift_invariance_check,
    AffineInclusion, SubspaceBasis, DEFAULT_RANK_TOL,
};
