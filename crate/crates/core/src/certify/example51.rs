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

//! The nonlinear inclusion `h(x) ∈ R²₊` on `R⁴` with
//! `h₁ = −x₁` and `h₂ = x₄ − p(x)`, where `p` is a convex polynomial of
//! degree 16. Its solution set is `{f ≤ 0}` for `f = max(−h₁, −h₂)`.
//!
//! Residuals are measured in the max-norm on `R²`, under which
//! `d(h(x), R²₊) = max(f(x), 0)` holds exactly; the Euclidean residual is
//! within a factor `√2` of it and is reported alongside.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{convex_lower_bound_distance, VerdictHint};
use crate::rng::{stream, subseed, unit_vec};
use crate::vecops::{dot, norm, sub};

const BOX: f64 = 2.0;
const TRIPLES: u64 = 1000;
const IDENTITY_SAMPLES: u64 = 1000;
const DIRECTIONS: u64 = 64;
const WALK_STEPS: usize = 500;
/// Lower-bound ratio regarded as evidence of a missing global bound.
pub const DIVERGENCE_THRESHOLD: f64 = 1e3;
pub const CONCAVITY_SLACK: f64 = -1e-9;
pub const IDENTITY_TOL: f64 = 1e-10;

/// The convex polynomial with `h₂ = x₄ − p`.
pub fn poly(x: &[f64; 4]) -> f64 {
    let [a, b, c, _] = *x;
    a.powi(16)
        + b.powi(8)
        + c.powi(6)
        + a * b.powi(3) * c.powi(3)
        + a.powi(2) * b.powi(4) * c.powi(2)
        + b.powi(2) * c.powi(4)
        + a.powi(4) * c.powi(4)
        + a.powi(4) * b.powi(6)
        + a * a
        + b * b
        + c * c
}

fn poly_grad(x: &[f64; 4]) -> [f64; 3] {
    let [a, b, c, _] = *x;
    [
        16.0 * a.powi(15)
            + b.powi(3) * c.powi(3)
            + 2.0 * a * b.powi(4) * c.powi(2)
            + 4.0 * a.powi(3) * c.powi(4)
            + 4.0 * a.powi(3) * b.powi(6)
            + 2.0 * a,
        8.0 * b.powi(7)
            + 3.0 * a * b.powi(2) * c.powi(3)
            + 4.0 * a.powi(2) * b.powi(3) * c.powi(2)
            + 2.0 * b * c.powi(4)
            + 6.0 * a.powi(4) * b.powi(5)
            + 2.0 * b,
        6.0 * c.powi(5)
            + 3.0 * a * b.powi(3) * c.powi(2)
            + 2.0 * a.powi(2) * b.powi(4) * c
            + 4.0 * b.powi(2) * c.powi(3)
            + 4.0 * a.powi(4) * c.powi(3)
            + 2.0 * c,
    ]
}

pub fn h(x: &[f64; 4]) -> [f64; 2] {
    [-x[0], x[3] - poly(x)]
}

/// `f = max(−h₁, −h₂)`.
pub fn f(x: &[f64; 4]) -> f64 {
    let [h1, h2] = h(x);
    (-h1).max(-h2)
}

/// A subgradient of `f`: the gradient of the active piece.
pub fn f_subgradient(x: &[f64; 4]) -> [f64; 4] {
    let [h1, h2] = h(x);
    if -h1 >= -h2 {
        [1.0, 0.0, 0.0, 0.0]
    } else {
        let g = poly_grad(x);
        [g[0], g[1], g[2], -1.0]
    }
}

/// `d∞(h(x), R²₊)`.
pub fn residual_max_norm(x: &[f64; 4]) -> f64 {
    let [h1, h2] = h(x);
    (-h1).max(-h2).max(0.0)
}

/// `d₂(h(x), R²₊)`.
pub fn residual_euclidean(x: &[f64; 4]) -> f64 {
    let [h1, h2] = h(x);
    h1.min(0.0).hypot(h2.min(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScqCheck {
    pub point: [f64; 4],
    pub value: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<[f64; 2]>,
    pub matches_expected: bool,
    /// Both components strictly positive.
    pub interior: bool,
}

impl ScqCheck {
    fn at(point: [f64; 4], expected: Option<[f64; 2]>) -> Self {
        let value = h(&point);
        ScqCheck {
            point,
            value,
            expected,
            matches_expected: expected.is_none_or(|e| e == value),
            interior: value[0] > 0.0 && value[1] > 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcavityCheck {
    pub triples: usize,
    /// Smallest component of `h((1−λ)x + λy) − (1−λ)h(x) − λh(y)`.
    pub worst_slack: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualIdentityCheck {
    pub samples: usize,
    /// Largest `|d∞(h(x), R²₊) − max(f(x), 0)|`.
    pub max_error: f64,
    pub pass: bool,
    /// Samples where the Euclidean residual differs from `max(f, 0)`.
    pub euclidean_mismatches: usize,
    /// `max(f,0) ≤ d₂ ≤ √2·max(f,0)` on every sample.
    pub euclidean_within_bounds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceSearch {
    pub directions: usize,
    pub evaluated: usize,
    /// Largest lower bound on `d(x, S) / d∞(h(x), R²₊)` found.
    pub max_lower_ratio: f64,
    pub best_point: Vec<f64>,
    pub threshold: f64,
    pub hint: VerdictHint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example51Report {
    pub seed: u64,
    /// The Slater point as commonly stated, with its stated image `(1, 1)`.
    pub scq_stated: ScqCheck,
    /// A point that does map to `(1, 1)`.
    pub scq_witness: ScqCheck,
    pub concavity: ConcavityCheck,
    pub residual_identity: ResidualIdentityCheck,
    pub divergence: DivergenceSearch,
}

impl Example51Report {
    /// The properties the library vouches for: some strict Slater point,
    /// concavity and the residual identity.
    pub fn checks_pass(&self) -> bool {
        self.scq_witness.interior && self.concavity.pass && self.residual_identity.pass
    }
}

fn box_point<R: Rng>(rng: &mut R) -> [f64; 4] {
    std::array::from_fn(|_| rng.random_range(-BOX..=BOX))
}

fn concavity(seed: u64) -> ConcavityCheck {
    let worst = (0..TRIPLES)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i);
            let x = box_point(&mut rng);
            let y = box_point(&mut rng);
            let lam: f64 = rng.random_range(0.0..=1.0);
            let mid: [f64; 4] = std::array::from_fn(|k| (1.0 - lam) * x[k] + lam * y[k]);
            let (hm, hx, hy) = (h(&mid), h(&x), h(&y));
            (0..2).map(|k| hm[k] - (1.0 - lam) * hx[k] - lam * hy[k]).fold(f64::INFINITY, f64::min)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    ConcavityCheck { triples: TRIPLES as usize, worst_slack: worst, pass: worst >= CONCAVITY_SLACK }
}

fn residual_identity(seed: u64) -> ResidualIdentityCheck {
    let rows: Vec<(f64, bool, bool)> = (0..IDENTITY_SAMPLES)
        .into_par_iter()
        .map(|i| {
            let x = box_point(&mut stream(seed, i));
            let lhs = residual_max_norm(&x);
            let rhs = f(&x).max(0.0);
            let d2 = residual_euclidean(&x);
            let mismatch = (d2 - rhs).abs() > IDENTITY_TOL;
            let within = d2 >= rhs * (1.0 - 1e-15) && d2 <= std::f64::consts::SQRT_2 * rhs * (1.0 + 1e-15);
            ((lhs - rhs).abs(), mismatch, within)
        })
        .collect();
    let max_error = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    ResidualIdentityCheck {
        samples: rows.len(),
        max_error,
        pass: max_error <= IDENTITY_TOL,
        euclidean_mismatches: rows.iter().filter(|r| r.1).count(),
        euclidean_within_bounds: rows.iter().all(|r| r.2),
    }
}

/// Lower bound on `d(x, {f ≤ 0})` from cutting planes collected along a
/// Polyak walk towards the set.
pub fn cutting_plane_lower_bound(x: &[f64; 4]) -> f64 {
    let mut y = *x;
    let mut best = 0.0_f64;
    for _ in 0..WALK_STEPS {
        let fy = f(&y);
        if fy <= 0.0 || !fy.is_finite() {
            break;
        }
        let g = f_subgradient(&y);
        let gn = norm(&g);
        // the linearization at y underestimates f, so S lies in {l ≤ 0}
        let l_at_x = fy + dot(&g, &sub(x, &y));
        if let Ok(lb) = convex_lower_bound_distance(l_at_x, gn) {
            best = best.max(lb);
        }
        if gn <= 1e-14 {
            break;
        }
        let step = fy / (gn * gn);
        for k in 0..4 {
            y[k] -= step * g[k];
        }
    }
    best
}

fn divergence(seed: u64) -> DivergenceSearch {
    let scales: Vec<f64> = (0..=8).map(|k| 10f64.powf(k as f64 / 2.0)).collect();
    let per_direction: Vec<(f64, Vec<f64>, usize)> = (0..DIRECTIONS)
        .into_par_iter()
        .map(|i| {
            let mut v = unit_vec(&mut stream(seed, i), 4);
            v[0] = -v[0].abs();
            let mut best = (0.0, vec![0.0; 4], 0usize);
            for &t in &scales {
                let x: [f64; 4] = std::array::from_fn(|k| t * v[k]);
                let fx = f(&x);
                if !(fx > 0.0 && fx.is_finite()) {
                    continue;
                }
                best.2 += 1;
                let ratio = cutting_plane_lower_bound(&x) / fx;
                if ratio > best.0 {
                    best.0 = ratio;
                    best.1 = x.to_vec();
                }
            }
            best
        })
        .collect();
    let evaluated = per_direction.iter().map(|r| r.2).sum();
    let (max_lower_ratio, best_point) = per_direction
        .into_iter()
        .fold((0.0, vec![0.0; 4]), |acc, r| if r.0 > acc.0 { (r.0, r.1) } else { acc });
    DivergenceSearch {
        directions: DIRECTIONS as usize,
        evaluated,
        max_lower_ratio,
        best_point,
        threshold: DIVERGENCE_THRESHOLD,
        hint: if max_lower_ratio > DIVERGENCE_THRESHOLD {
            VerdictHint::DivergenceEvidence
        } else {
            VerdictHint::Inconclusive
        },
    }
}

pub fn example51_suite(seed: u64) -> Example51Report {
    Example51Report {
        seed,
        scq_stated: ScqCheck::at([1.0, 0.0, 0.0, 3.0], Some([1.0, 1.0])),
        scq_witness: ScqCheck::at([-1.0, 0.0, 0.0, 3.0], Some([1.0, 1.0])),
        concavity: concavity(subseed(seed, "ex51-concavity")),
        residual_identity: residual_identity(subseed(seed, "ex51-identity")),
        divergence: divergence(subseed(seed, "ex51-divergence")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_matches_finite_differences() {
        let x = [0.7, -0.4, 0.9, 0.1];
        let g = poly_grad(&x);
        for k in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += 1e-6;
            xm[k] -= 1e-6;
            let fd = (poly(&xp) - poly(&xm)) / 2e-6;
            assert!((fd - g[k]).abs() < 1e-6 * fd.abs().max(1.0), "{k}: {fd} vs {}", g[k]);
        }
    }

    #[test]
    fn concavity_degenerates_at_equal_points() {
        let x = [0.3, -1.2, 0.5, 2.0];
        for lam in [0.0, 0.25, 1.0] {
            let mid: [f64; 4] = std::array::from_fn(|k| (1.0 - lam) * x[k] + lam * x[k]);
            let hx = h(&x);
            let hm = h(&mid);
            for k in 0..2 {
                assert!((hm[k] - (1.0 - lam) * hx[k] - lam * hx[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_at_feasible_point() {
        let x = [-1.0, 0.0, 0.0, 3.0];
        assert_eq!(residual_max_norm(&x), 0.0);
        assert_eq!(f(&x).max(0.0), 0.0);
    }

    #[test]
    fn stated_point_maps_elsewhere() {
        assert_eq!(h(&[1.0, 0.0, 0.0, 3.0]), [-1.0, 1.0]);
        assert_eq!(h(&[-1.0, 0.0, 0.0, 3.0]), [1.0, 1.0]);
    }

    #[test]
    fn lower_bound_is_below_walk_endpoint() {
        let x = [0.5, 1.0, -0.5, -1.0];
        let lb = cutting_plane_lower_bound(&x);
        assert!(lb > 0.0);
        // (−1, 0, 0, 3) is feasible, so it bounds the distance from above
        assert!(lb <= crate::vecops::dist(&x, &[-1.0, 0.0, 0.0, 3.0]));
    }
}
