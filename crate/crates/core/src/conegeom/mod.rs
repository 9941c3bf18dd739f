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

//! Margins, membership, projection, polars and normal rays for the supported
//! smooth cones.
//!
//! Every cone is written as `K = {z : φ(z) ≥ 0}` with a concave, positively
//! homogeneous margin `φ`:
//!
//! | kind           | margin `φ(t, u)`           |
//! |----------------|----------------------------|
//! | `SecondOrder`  | `t − ‖u‖₂`                 |
//! | `PCone(p)`     | `t − ‖u‖_p`                |
//! | `Circular(θ)`  | `t·tan θ − ‖u‖₂`           |
//! | `Orthant` (m=2)| `min(z₁, z₂)`              |
//!
//! The circular cone is usually stated as `t ≥ cos θ·‖z‖`; squaring under
//! `t ≥ 0` gives the form above, which is differentiable off the apex.
//!
//! Polars of the supported cones are reflections of supported cones, so a
//! polar is carried as a [`SignedCone`] (`K° = −K'`).

mod project;

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::vecops::{dot, norm, pnorm, sub};
use crate::{Error, Result};


/// Default boundary tolerance on normalized margins.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Coordinates smaller than this fraction of `‖u‖` are treated as zero in
/// p-norm gradients.
const GRAD_ZERO_FRACTION: f64 = 1e-14;

/// Descriptor of a supported regular cone in `R^m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConeSpecJson", into = "ConeSpecJson")]
pub enum ConeSpec {
    SecondOrder { m: usize },
    PCone { m: usize, p: f64 },
    Circular { m: usize, theta: f64 },
    /// Only `m = 2` is a smooth cone and only that is accepted.
    Orthant { m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ConeKindTag {
    SecondOrder,
    PCone,
    Circular,
    Orthant,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConeSpecJson {
    kind: ConeKindTag,
    m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
}

impl TryFrom<ConeSpecJson> for ConeSpec {
    type Error = Error;

    fn try_from(j: ConeSpecJson) -> Result<Self> {
        match j.kind {
            ConeKindTag::PCone => {
                if j.theta.is_some() {
                    return Err(Error::InvalidCone("theta is only valid for circular cones".into()));
                }
                let p = j
                    .p
                    .ok_or_else(|| Error::InvalidCone("p_cone requires field p".into()))?;
                ConeSpec::p_cone(j.m, p)
            }
            ConeKindTag::Circular => {
                if j.p.is_some() {
                    return Err(Error::InvalidCone("p is only valid for p_cone".into()));
                }
                let theta = j
                    .theta
                    .ok_or_else(|| Error::InvalidCone("circular requires field theta".into()))?;
                ConeSpec::circular(j.m, theta)
            }
            ConeKindTag::SecondOrder | ConeKindTag::Orthant => {
                if j.p.is_some() || j.theta.is_some() {
                    return Err(Error::InvalidCone(
                        "p/theta are not valid for this cone kind".into(),
                    ));
                }
                if j.kind == ConeKindTag::Orthant {
                    ConeSpec::orthant(j.m)
                } else {
                    ConeSpec::second_order(j.m)
                }
            }
        }
    }
}

impl From<ConeSpec> for ConeSpecJson {
    fn from(c: ConeSpec) -> Self {
        let (kind, p, theta) = match c {
            ConeSpec::SecondOrder { .. } => (ConeKindTag::SecondOrder, None, None),
            ConeSpec::PCone { p, .. } => (ConeKindTag::PCone, Some(p), None),
            ConeSpec::Circular { theta, .. } => (ConeKindTag::Circular, None, Some(theta)),
            ConeSpec::Orthant { .. } => (ConeKindTag::Orthant, None, None),
        };
        ConeSpecJson { kind, m: c.m(), p, theta }
    }
}

fn check_m(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidCone(format!("ambient dimension m = {m} must be at least 2")));
    }
    Ok(())
}

impl ConeSpec {
    pub fn second_order(m: usize) -> Result<Self> {
        check_m(m)?;
        Ok(ConeSpec::SecondOrder { m })
    }

    pub fn p_cone(m: usize, p: f64) -> Result<Self> {
        check_m(m)?;
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidCone(format!("p = {p} must lie in (1, inf)")));
        }
        Ok(ConeSpec::PCone { m, p })
    }

    pub fn circular(m: usize, theta: f64) -> Result<Self> {
        check_m(m)?;
        if !(theta > 0.0 && theta < FRAC_PI_2) {
            return Err(Error::InvalidCone(format!("theta = {theta} must lie in (0, pi/2)")));
        }
        Ok(ConeSpec::Circular { m, theta })
    }

    pub fn orthant(m: usize) -> Result<Self> {
        if m != 2 {
            return Err(Error::InvalidCone(format!(
                "orthant is only supported with m = 2 (got m = {m})"
            )));
        }
        Ok(ConeSpec::Orthant { m })
    }

    pub fn m(&self) -> usize {
        match *self {
            ConeSpec::SecondOrder { m }
            | ConeSpec::PCone { m, .. }
            | ConeSpec::Circular { m, .. }
            | ConeSpec::Orthant { m } => m,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ConeSpec::SecondOrder { .. } => "second_order",
            ConeSpec::PCone { .. } => "p_cone",
            ConeSpec::Circular { .. } => "circular",
            ConeSpec::Orthant { .. } => "orthant",
        }
    }

    /// Polar descriptor using an explicit rule for the p-cone exponent.
    ///
    /// The returned cone is not validated, so a rule that produces `q ≤ 1`
    /// still yields a descriptor whose margin can be evaluated.
    pub fn polar_with(&self, rule: ExponentRule) -> SignedCone {
        let dual = match *self {
            ConeSpec::SecondOrder { m } => ConeSpec::SecondOrder { m },
            ConeSpec::PCone { m, p } => ConeSpec::PCone { m, p: rule.conjugate(p) },
            ConeSpec::Circular { m, theta } => ConeSpec::Circular { m, theta: FRAC_PI_2 - theta },
            ConeSpec::Orthant { m } => ConeSpec::Orthant { m },
        };
        SignedCone { cone: dual, negated: true }
    }

    /// A point on the boundary generated by the direction `u ∈ R^{m−1}`:
    /// `(‖u‖, u)` scaled to the cone's opening. For the orthant the sign of
    /// `u[0]` picks the axis.
    pub fn boundary_point(&self, u: &[f64]) -> Vec<f64> {
        match *self {
            ConeSpec::SecondOrder { .. } => {
                let mut z = vec![norm(u)];
                z.extend_from_slice(u);
                z
            }
            ConeSpec::PCone { p, .. } => {
                let mut z = vec![pnorm(u, p)];
                z.extend_from_slice(u);
                z
            }
            ConeSpec::Circular { theta, .. } => {
                let mut z = vec![norm(u) / theta.tan()];
                z.extend_from_slice(u);
                z
            }
            ConeSpec::Orthant { .. } => {
                let r = u[0].abs();
                if u[0] >= 0.0 {
                    vec![r, 0.0]
                } else {
                    vec![0.0, r]
                }
            }
        }
    }

    fn raw_margin(&self, z: &[f64]) -> f64 {
        match *self {
            ConeSpec::SecondOrder { .. } => z[0] - norm(&z[1..]),
            ConeSpec::PCone { p, .. } => z[0] - pnorm(&z[1..], p),
            ConeSpec::Circular { theta, .. } => z[0] * theta.tan() - norm(&z[1..]),
            ConeSpec::Orthant { .. } => z[0].min(z[1]),
        }
    }

    fn raw_gradient(&self, z: &[f64]) -> Vec<f64> {
        let m = z.len();
        match *self {
            ConeSpec::SecondOrder { .. } => pnorm_gradient(z, 2.0, 1.0),
            ConeSpec::PCone { p, .. } => pnorm_gradient(z, p, 1.0),
            ConeSpec::Circular { theta, .. } => pnorm_gradient(z, 2.0, theta.tan()),
            ConeSpec::Orthant { .. } => {
                let mut g = vec![0.0; m];
                if z[0] < z[1] {
                    g[0] = 1.0;
                } else if z[1] < z[0] {
                    g[1] = 1.0;
                } else {
                    g[0] = 0.5;
                    g[1] = 0.5;
                }
                g
            }
        }
    }

    fn raw_axis(&self) -> Vec<f64> {
        let m = self.m();
        match self {
            ConeSpec::Orthant { .. } => vec![std::f64::consts::FRAC_1_SQRT_2; 2],
            _ => {
                let mut a = vec![0.0; m];
                a[0] = 1.0;
                a
            }
        }
    }
}

/// Supergradient of `lead·t − ‖u‖_p` at `z = (t, u)`.
fn pnorm_gradient(z: &[f64], p: f64, lead: f64) -> Vec<f64> {
    let u = &z[1..];
    let mut g = vec![0.0; z.len()];
    g[0] = lead;
    let nu = pnorm(u, p);
    if nu == 0.0 {
        return g;
    }
    let cutoff = GRAD_ZERO_FRACTION * norm(u);
    for (gi, &ui) in g[1..].iter_mut().zip(u) {
        if ui.abs() < cutoff {
            continue;
        }
        *gi = -ui.signum() * (ui.abs() / nu).powf(p - 1.0);
    }
    g
}

/// How the dual exponent of a p-cone is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentRule {
    /// `1/p + 1/q = 1`.
    #[default]
    Hoelder,
    /// `1/p + 1/q = 2`; kept so the duality tests can reject it.
    SumTwo,
}

impl ExponentRule {
    pub fn conjugate(self, p: f64) -> f64 {
        match self {
            ExponentRule::Hoelder => p / (p - 1.0),
            ExponentRule::SumTwo => 1.0 / (2.0 - 1.0 / p),
        }
    }
}

/// A closed convex cone with a concave homogeneous margin.
pub trait ClosedCone {
    fn dim(&self) -> usize;

    /// Margin `φ(z)`; callers guarantee `z.len() == self.dim()`.
    fn margin_unchecked(&self, z: &[f64]) -> f64;

    /// A supergradient of the margin at `z`. Equals the gradient wherever the
    /// margin is differentiable.
    fn gradient_unchecked(&self, z: &[f64]) -> Vec<f64>;

    fn project_unchecked(&self, z: &[f64]) -> Result<Vec<f64>>;

    /// `K°` as a reflected supported cone.
    fn polar(&self) -> SignedCone;

    /// Unit vector in the interior of the cone.
    fn axis(&self) -> Vec<f64>;

    fn check_dim(&self, z: &[f64]) -> Result<()> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: z.len() });
        }
        Ok(())
    }

    fn margin(&self, z: &[f64]) -> Result<f64> {
        self.check_dim(z)?;
        Ok(self.margin_unchecked(z))
    }

    fn project(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(z)?;
        if !z.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("point"));
        }
        self.project_unchecked(z)
    }
}

impl ClosedCone for ConeSpec {
    fn dim(&self) -> usize {
        self.m()
    }

    fn margin_unchecked(&self, z: &[f64]) -> f64 {
        self.raw_margin(z)
    }

    fn gradient_unchecked(&self, z: &[f64]) -> Vec<f64> {
        self.raw_gradient(z)
    }

    fn project_unchecked(&self, z: &[f64]) -> Result<Vec<f64>> {
        project::project(self, z)
    }

    fn polar(&self) -> SignedCone {
        self.polar_with(ExponentRule::Hoelder)
    }

    fn axis(&self) -> Vec<f64> {
        self.raw_axis()
    }
}

/// `cone` or `−cone`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedCone {
    pub cone: ConeSpec,
    pub negated: bool,
}

impl SignedCone {
    pub fn positive(cone: ConeSpec) -> Self {
        SignedCone { cone, negated: false }
    }

    fn sign(&self) -> f64 {
        if self.negated {
            -1.0
        } else {
            1.0
        }
    }

    fn flip(&self, z: &[f64]) -> Vec<f64> {
        let s = self.sign();
        z.iter().map(|x| s * x).collect()
    }
}

impl From<ConeSpec> for SignedCone {
    fn from(cone: ConeSpec) -> Self {
        SignedCone::positive(cone)
    }
}

impl ClosedCone for SignedCone {
    fn dim(&self) -> usize {
        self.cone.m()
    }

    fn margin_unchecked(&self, z: &[f64]) -> f64 {
        if self.negated {
            self.cone.raw_margin(&self.flip(z))
        } else {
            self.cone.raw_margin(z)
        }
    }

    fn gradient_unchecked(&self, z: &[f64]) -> Vec<f64> {
        if self.negated {
            // d/dz φ(−z) = −∇φ(−z)
            self.flip(&self.cone.raw_gradient(&self.flip(z)))
        } else {
            self.cone.raw_gradient(z)
        }
    }

    fn project_unchecked(&self, z: &[f64]) -> Result<Vec<f64>> {
        if self.negated {
            Ok(self.flip(&project::project(&self.cone, &self.flip(z))?))
        } else {
            project::project(&self.cone, z)
        }
    }

    fn polar(&self) -> SignedCone {
        let inner = self.cone.polar();
        SignedCone { cone: inner.cone, negated: inner.negated ^ self.negated }
    }

    fn axis(&self) -> Vec<f64> {
        self.flip(&self.cone.raw_axis())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MemberClass {
    Interior,
    Boundary,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub class: MemberClass,
    /// Raw margin `φ(z)`.
    pub margin: f64,
    /// `φ(z) / max(1, ‖z‖)`, the quantity compared against the tolerance.
    pub normalized: f64,
}

/// Unit generator of `N_K(z)` at a non-apex boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalRay {
    pub direction: Vec<f64>,
    pub valid_at: Vec<f64>,
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Precondition(format!("tolerance {tol} must be positive")));
    }
    Ok(())
}

pub fn classify_point<C: ClosedCone + ?Sized>(cone: &C, z: &[f64], tol: f64) -> Result<Membership> {
    check_tol(tol)?;
    let margin = cone.margin(z)?;
    let normalized = margin / norm(z).max(1.0);
    let class = if normalized > tol {
        MemberClass::Interior
    } else if normalized < -tol {
        MemberClass::Outside
    } else {
        MemberClass::Boundary
    };
    Ok(Membership { class, margin, normalized })
}

pub fn distance<C: ClosedCone + ?Sized>(cone: &C, z: &[f64]) -> Result<f64> {
    let p = cone.project(z)?;
    Ok(norm(&sub(z, &p)))
}

/// `(P_K z, z − P_K z)`; the second component is `P_{K°} z`.
pub fn moreau_decompose<C: ClosedCone + ?Sized>(cone: &C, z: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let p = cone.project(z)?;
    let rest = sub(z, &p);
    Ok((p, rest))
}

pub fn normal_ray<C: ClosedCone + ?Sized>(cone: &C, z: &[f64], tol: f64) -> Result<NormalRay> {
    let member = classify_point(cone, z, tol)?;
    if norm(z) <= tol {
        return Err(Error::ApexNotRay);
    }
    if member.class != MemberClass::Boundary {
        return Err(Error::NotOnBoundary(member.normalized));
    }
    let g = cone.gradient_unchecked(z);
    let gn = norm(&g);
    if gn == 0.0 {
        return Err(Error::NumericFailure("vanishing margin gradient".into()));
    }
    Ok(NormalRay { direction: g.iter().map(|x| -x / gn).collect(), valid_at: z.to_vec() })
}

/// True iff the midpoint of two non-colinear cone points lies in the interior.
pub fn strict_convexity_probe<C: ClosedCone + ?Sized>(
    cone: &C,
    x: &[f64],
    y: &[f64],
    tol: f64,
) -> Result<bool> {
    check_tol(tol)?;
    for (name, v) in [("x", x), ("y", y)] {
        let mem = classify_point(cone, v, tol)?;
        if mem.class == MemberClass::Outside {
            return Err(Error::Precondition(format!("{name} is not in the cone")));
        }
        if norm(v) <= tol {
            return Err(Error::Precondition(format!("{name} is the apex")));
        }
    }
    let cos = dot(x, y) / (norm(x) * norm(y));
    if cos >= 1.0 - tol {
        return Err(Error::Colinear);
    }
    let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
    let scale = norm(x).max(norm(y));
    Ok(cone.margin_unchecked(&mid) > tol * scale)
}
