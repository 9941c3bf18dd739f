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


//! Hand-built inclusions, one per theorem case, used by the self-test, the
//! acceptance suite and the examples in the README.

use crate::classify::TheoremCase;
use crate::conegeom::ConeSpec;
use crate::subspace::AffineInclusion;

fn build(rows: &[&[f64]], b: &[f64], m: usize) -> AffineInclusion {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    let cone = ConeSpec::second_order(m).expect("m >= 2");
    AffineInclusion::from_rows(&rows, b.to_vec(), cone).expect("consistent shapes")
}

/// `x ∈ K₂ ⊂ R³`; `Im A` meets the interior.
pub fn t51() -> AffineInclusion {
    build(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]], &[0.0; 3], 3)
}

/// `(1, x, 1) ∈ K₂`: the line touches the cone at the single point `x = 0`.
pub fn t52iii() -> AffineInclusion {
    build(&[&[0.0], &[1.0], &[0.0]], &[1.0, 0.0, 1.0], 3)
}

/// `(x₁ + 1, x₁, x₂) ∈ K₂`: the plane is tangent along a ray, `b ∉ Im A`.
pub fn t53ii() -> AffineInclusion {
    build(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]], &[1.0, 0.0, 0.0], 3)
}

/// `(x, x) ∈ K₂ ⊂ R²`: `Im A` is a boundary ray.
pub fn t53iii() -> AffineInclusion {
    build(&[&[1.0], &[1.0]], &[0.0, 0.0], 2)
}

/// `(1, x, 0) ∈ K₂`: the line crosses the interior.
pub fn t52i() -> AffineInclusion {
    build(&[&[0.0], &[1.0], &[0.0]], &[1.0, 0.0, 0.0], 3)
}

/// `(0, x + 2, 0) ∈ K₂`: `b ∈ Im A` and `Im A ∩ K = {0}`.
pub fn t52ii() -> AffineInclusion {
    build(&[&[0.0], &[1.0], &[0.0]], &[0.0, 2.0, 0.0], 3)
}

/// `(x₁ + 1, x₁ + 1, x₂) ∈ K₂`: tangent plane with `b ∈ Im A`.
pub fn t53i() -> AffineInclusion {
    build(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]], &[1.0, 1.0, 0.0], 3)
}

/// `(−1, x, 0) ∈ K₂` has no solution.
pub fn infeasible() -> AffineInclusion {
    build(&[&[0.0], &[1.0], &[0.0]], &[-1.0, 0.0, 0.0], 3)
}

/// The four instances the certification contract is stated on.
pub fn certified() -> Vec<(&'static str, AffineInclusion, TheoremCase)> {
    vec![
        ("T51", t51(), TheoremCase::T51),
        ("T52iii", t52iii(), TheoremCase::T52iii),
        ("T53ii", t53ii(), TheoremCase::T53ii),
        ("T53iii", t53iii(), TheoremCase::T53iii),
    ]
}

/// Every labelled instance.
pub fn all() -> Vec<(&'static str, AffineInclusion, TheoremCase)> {
    let mut v = certified();
    v.extend([
        ("T52i", t52i(), TheoremCase::T52i),
        ("T52ii", t52ii(), TheoremCase::T52ii),
        ("T53i", t53i(), TheoremCase::T53i),
        ("infeasible", infeasible(), TheoremCase::Infeasible),
    ]);
    v
}
