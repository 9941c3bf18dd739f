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

//! Euclidean projections onto the supported cones.

use super::ConeSpec;
use crate::vecops::{norm, pnorm};
use crate::{Error, Result};

/// Scalar residual tolerance for the p-cone multiplier equation (on the
/// unit-normalized point).
const PCONE_RESIDUAL_TOL: f64 = 1e-12;
const PCONE_MAX_ITER: usize = 200;

pub(super) fn project(cone: &ConeSpec, z: &[f64]) -> Result<Vec<f64>> {
    match *cone {
        ConeSpec::SecondOrder { .. } => Ok(project_second_order(z)),
        ConeSpec::Circular { theta, .. } => Ok(project_circular(z, theta)),
        ConeSpec::Orthant { .. } => Ok(z.iter().map(|x| x.max(0.0)).collect()),
        ConeSpec::PCone { p, .. } => project_pcone(p, z),
    }
}

/// Second-order cone `{t ≥ ‖u‖}`.
fn project_second_order(z: &[f64]) -> Vec<f64> {
    let t = z[0];
    let u = &z[1..];
    let s = norm(u);
    if s <= t {
        return z.to_vec();
    }
    if s <= -t {
        return vec![0.0; z.len()];
    }
    let alpha = 0.5 * (t + s);
    let mut out = Vec::with_capacity(z.len());
    out.push(alpha);
    out.extend(u.iter().map(|x| alpha * x / s));
    out
}

/// `{(t, u) : t·tan θ ≥ ‖u‖}`: identity inside, apex when `−z` lies in the
/// polar `{‖u‖ ≤ −t·cot θ}`, otherwise the projection onto the boundary ray
/// through `u`.
fn project_circular(z: &[f64], theta: f64) -> Vec<f64> {
    let (sin, cos) = theta.sin_cos();
    let t = z[0];
    let u = &z[1..];
    let s = norm(u);
    if s * cos <= t * sin {
        return z.to_vec();
    }
    if s * sin <= -t * cos {
        return vec![0.0; z.len()];
    }
    let coef = t * cos + s * sin;
    let mut out = Vec::with_capacity(z.len());
    out.push(coef * cos);
    out.extend(u.iter().map(|x| coef * sin * x / s));
    out
}

/// Projection onto `{t ≥ ‖u‖_p}`.
///
/// On the boundary regime the solution is `(τ, sign(u)·w)` with
/// `wᵢ + c·wᵢ^{p−1} = |uᵢ|`, where `c = λ/τ^{p−1}` is the scaled multiplier
/// of the constraint `‖v‖_p ≤ τ`. The scalar equation
/// `F(c) = τ(c) − t − c·τ(c)^{p−1} = 0` has exactly one root; it is solved
/// in `s = ln c` by Newton's method inside a sign bracket, falling back to
/// bisection.
pub(crate) fn project_pcone(p: f64, z: &[f64]) -> Result<Vec<f64>> {
    let scale = norm(z);
    if scale == 0.0 {
        return Ok(vec![0.0; z.len()]);
    }
    let zs: Vec<f64> = z.iter().map(|x| x / scale).collect();
    let t = zs[0];
    let u = &zs[1..];
    if pnorm(u, p) <= t {
        return Ok(z.to_vec());
    }
    let q = p / (p - 1.0);
    if pnorm(u, q) <= -t {
        return Ok(vec![0.0; z.len()]);
    }

    let a: Vec<f64> = u.iter().map(|x| x.abs()).collect();
    let eval = |s: f64| -> (f64, f64, Vec<f64>) {
        let c = s.exp();
        let w: Vec<f64> = a.iter().map(|&ai| solve_component(ai, c, p)).collect();
        let tau = pnorm(&w, p);
        if tau == 0.0 {
            return (-t, 0.0, w);
        }
        let tp = tau.powf(p - 1.0);
        let f = tau - t - c * tp;
        // dτ/dc = Σ (wᵢ/τ)^{p−1} dwᵢ/dc, dwᵢ/dc = −wᵢ / (wᵢ^{2−p} + c(p−1))
        let dtau: f64 = w
            .iter()
            .filter(|&&wi| wi > 0.0)
            .map(|&wi| -(wi / tau).powf(p - 1.0) * wi / (wi.powf(2.0 - p) + c * (p - 1.0)))
            .sum();
        let df_dc = dtau - tp - c * (p - 1.0) * tau.powf(p - 2.0) * dtau;
        (f, c * df_dc, w)
    };

    let mut lo = 0.0_f64;
    let mut hi = 0.0_f64;
    let (mut f_lo, _, _) = eval(lo);
    let mut f_hi = f_lo;
    let mut expansions = 0;
    while f_lo <= 0.0 {
        lo -= 2.0;
        f_lo = eval(lo).0;
        expansions += 1;
        if expansions > 60 {
            return Err(Error::NumericFailure("p-cone projection: no lower bracket".into()));
        }
    }
    while f_hi >= 0.0 {
        hi += 2.0;
        f_hi = eval(hi).0;
        expansions += 1;
        if expansions > 120 {
            return Err(Error::NumericFailure("p-cone projection: no upper bracket".into()));
        }
    }

    let mut s = 0.5 * (lo + hi);
    for _ in 0..PCONE_MAX_ITER {
        let (f, df, w) = eval(s);
        if f.abs() <= PCONE_RESIDUAL_TOL || hi - lo <= 1e-15 * (1.0 + s.abs()) {
            let tau = pnorm(&w, p);
            let mut out = Vec::with_capacity(z.len());
            out.push(tau * scale);
            out.extend(w.iter().zip(u).map(|(wi, ui)| wi.copysign(*ui) * scale));
            return Ok(out);
        }
        if f > 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let newton = if df < 0.0 { s - f / df } else { f64::NAN };
        s = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NumericFailure(format!(
        "p-cone projection did not converge in {PCONE_MAX_ITER} iterations"
    )))
}

/// Root of `w + c·w^{p−1} = a` on `[0, a]`.
fn solve_component(a: f64, c: f64, p: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let g = |w: f64| w + c * w.powf(p - 1.0) - a;
    let (mut lo, mut hi) = (0.0_f64, a);
    let mut w = a.min((a / c).powf(1.0 / (p - 1.0)));
    for _ in 0..200 {
        let gw = g(w);
        if gw == 0.0 {
            return w;
        }
        if gw > 0.0 {
            hi = w;
        } else {
            lo = w;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let dg = 1.0 + c * (p - 1.0) * w.powf(p - 2.0);
        let next = w - gw / dg;
        w = if next.is_finite() && next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pcone_at_two_matches_second_order_closed_form() {
        for z in [[0.0, 1.0, 0.0], [0.3, -2.0, 1.5], [-0.2, 0.1, 0.4], [1.0, 3.0, -4.0]] {
            let a = project_pcone(2.0, &z).unwrap();
            let b = project_second_order(&z);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-11, "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn circular_at_quarter_pi_matches_second_order() {
        let z = [0.2, -1.0, 0.7, 0.1];
        let a = project_circular(&z, std::f64::consts::FRAC_PI_4);
        let b = project_second_order(&z);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn pcone_projection_lands_on_boundary() {
        for p in [1.2, 1.5, 3.0, 7.0] {
            let z = [0.1, 2.0, -0.5, 0.0, 1e-9];
            let y = project_pcone(p, &z).unwrap();
            let margin = y[0] - pnorm(&y[1..], p);
            assert!(margin.abs() < 1e-11, "p = {p}: margin {margin}");
            assert_eq!(y[3], 0.0);
        }
    }

    #[test]
    fn component_solver_handles_both_regimes() {
        for p in [1.1, 1.5, 2.0, 4.0] {
            for (a, c) in [(1.0, 1e-8), (1.0, 1e8), (3.0, 1.0), (1e-10, 5.0)] {
                let w = solve_component(a, c, p);
                let r = w + c * w.powf(p - 1.0) - a;
                assert!(r.abs() <= 1e-12 * a.max(1e-300) + 1e-15, "p={p} a={a} c={c} r={r}");
            }
        }
    }
}
