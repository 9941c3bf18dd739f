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


//! Named invariant suites run by `conebound selftest`.
//!
//! Every suite draws from `stream(subseed(seed, name), i)`, so a report is a
//! pure function of [`SelftestOpts`]. Reports carry no timings.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::certify::{
    example51_suite, modulus_estimate, tau_estimate, Certifier, ModulusOpts, SolveOpts, TauOpts,
    VerdictHint,
};
use crate::classify::{classify_geb, trichotomy, ClassifyOpts, GebVerdict, IntersectionClass, TheoremCase};
use crate::conegeom::{
    classify_point, moreau_decompose, normal_ray, strict_convexity_probe, ClosedCone, ConeSpec,
    ExponentRule, SignedCone, DEFAULT_TOL,
};
use crate::instances;
use crate::rng::{gaussian_matrix, gaussian_vec, stream, subseed, StreamRng};
use crate::subspace::{contains_vector, image_basis, kernel_adjoint_basis, AffineInclusion, DEFAULT_RANK_TOL};
use crate::vecops::{dot, norm, scale, sub};
use crate::Result;

const MOREAU_TOL: f64 = 1e-8;
const PAIRING_TOL: f64 = 1e-8;
const VI_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelftestOpts {
    pub seed: u64,
    /// Run a tenth of the samples.
    pub quick: bool,
    /// Rule used for p-cone polars in the polar-pairing suite.
    pub exponent_rule: ExponentRule,
}

impl Default for SelftestOpts {
    fn default() -> Self {
        SelftestOpts { seed: 42, quick: false, exponent_rule: ExponentRule::Hoelder }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub module: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: usize,
    /// Largest defect divided by its tolerance; at most 1 on a pass.
    pub worst: f64,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub quick: bool,
    pub exponent_rule: ExponentRule,
    pub suites: Vec<SuiteOutcome>,
    pub passed: bool,
}

impl SelftestReport {
    pub fn failing(&self) -> Vec<&str> {
        self.suites.iter().filter(|s| !s.passed).map(|s| s.name.as_str()).collect()
    }
}

/// Pass/fail bookkeeping; a check fails when `defect > tol`.
#[derive(Default)]
struct Tally {
    checks: usize,
    failures: usize,
    worst: f64,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, defect: f64, tol: f64) {
        self.checks += 1;
        let r = if defect.is_nan() { f64::INFINITY } else { defect.max(0.0) / tol };
        self.worst = self.worst.max(r);
        if defect.is_nan() || defect > tol {
            self.failures += 1;
        }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.notes.len() < 4 {
                self.notes.push(what());
            }
        }
    }

    fn finish(self, name: &str, module: &str) -> SuiteOutcome {
        SuiteOutcome {
            name: name.into(),
            module: module.into(),
            passed: self.failures == 0 && self.checks > 0,
            checks: self.checks,
            failures: self.failures,
            worst: self.worst,
            note: self.notes.join("; "),
        }
    }
}

struct Ctx {
    opts: SelftestOpts,
}

impl Ctx {
    fn count(&self, full: usize) -> usize {
        if self.opts.quick {
            (full / 10).max(1)
        } else {
            full
        }
    }

    fn rng(&self, suite: &str, i: usize) -> StreamRng {
        stream(subseed(self.opts.seed, suite), i as u64)
    }
}

/// One cone of each kind and opening the suites sweep over.
pub fn sample_cones() -> Vec<ConeSpec> {
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_6};
    vec![
        ConeSpec::SecondOrder { m: 2 },
        ConeSpec::SecondOrder { m: 3 },
        ConeSpec::SecondOrder { m: 5 },
        ConeSpec::PCone { m: 3, p: 1.5 },
        ConeSpec::PCone { m: 4, p: 3.0 },
        ConeSpec::Circular { m: 3, theta: FRAC_PI_6 },
        ConeSpec::Circular { m: 4, theta: FRAC_PI_3 },
        ConeSpec::Orthant { m: 2 },
    ]
}

fn gaussian_point(rng: &mut StreamRng, m: usize) -> Vec<f64> {
    let s = 10f64.powf(rng.random_range(-1.0..1.0));
    scale(&gaussian_vec(rng, m), s)
}

/// A boundary point of `cone` (or of `−cone`), away from the apex.
fn boundary_sample(rng: &mut StreamRng, cone: &ConeSpec, negated: bool) -> Vec<f64> {
    let u = gaussian_vec(rng, cone.m() - 1);
    let z = cone.boundary_point(&u);
    if negated {
        scale(&z, -1.0)
    } else {
        z
    }
}

/// A point of `cone` (or `−cone`): boundary for even `i`, pushed inside
/// along the axis for odd `i`.
fn cone_sample(rng: &mut StreamRng, cone: &ConeSpec, negated: bool, i: usize) -> Vec<f64> {
    let z = boundary_sample(rng, cone, negated);
    if i.is_multiple_of(2) {
        return z;
    }
    let axis = SignedCone { cone: *cone, negated }.axis();
    let a = rng.random_range(0.0..1.0) * norm(&z);
    z.iter().zip(&axis).map(|(zi, ai)| zi + a * ai).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingOutcome {
    pub rule: ExponentRule,
    pub samples: usize,
    /// Largest `⟨z, w⟩ / (‖z‖‖w‖)` over `z ∈ K`, `w` in the candidate polar.
    pub max_pairing: f64,
    /// Largest `|margin|` of a unit normal of `K` under the candidate polar.
    pub max_tightness: f64,
    pub passed: bool,
}

/// Checks a candidate polar both ways: it must pair non-positively with
/// `K`, and every unit normal of `K` must sit on its boundary. The second
/// half is what separates exponent rules; a polar that is too small passes
/// the first half. For `m = 2` every p-norm of a scalar agrees, so use
/// `m ≥ 3` to tell rules apart.
pub fn polar_pairing_check(cone: &ConeSpec, rule: ExponentRule, samples: usize, seed: u64) -> Result<PairingOutcome> {
    let polar = cone.polar_with(rule);
    let mut max_pairing = f64::NEG_INFINITY;
    let mut max_tightness = 0.0_f64;
    for i in 0..samples {
        let mut rng = stream(seed, i as u64);
        let z = cone_sample(&mut rng, cone, false, i);
        let w = cone_sample(&mut rng, &polar.cone, polar.negated, i / 2);
        max_pairing = max_pairing.max(dot(&z, &w) / (norm(&z) * norm(&w)));
        let zb = boundary_sample(&mut rng, cone, false);
        let d = normal_ray(cone, &zb, DEFAULT_TOL)?.direction;
        max_tightness = max_tightness.max(polar.margin_unchecked(&d).abs());
    }
    let passed = max_pairing <= PAIRING_TOL && max_tightness <= PAIRING_TOL;
    Ok(PairingOutcome { rule, samples, max_pairing, max_tightness, passed })
}

fn projection_optimality(cx: &Ctx) -> Result<SuiteOutcome> {
    let name = "projection-optimality";
    let mut t = Tally::default();
    for (k, cone) in sample_cones().iter().enumerate() {
        for i in 0..cx.count(1000) {
            let mut rng = cx.rng(name, k * 100_000 + i);
            let z = gaussian_point(&mut rng, cone.m());
            let w = cone.project(&gaussian_point(&mut rng, cone.m()))?;
            let pz = cone.project(&z)?;
            let vi = dot(&sub(&z, &pz), &sub(&w, &pz));
            let s = norm(&z).max(1.0) * (norm(&w) + norm(&pz)).max(1.0);
            t.check(vi / s, VI_TOL);
        }
    }
    Ok(t.finish(name, "conegeom"))
}

fn moreau(cx: &Ctx) -> Result<SuiteOutcome> {
    let name = "moreau";
    let mut t = Tally::default();
    for (k, cone) in sample_cones().iter().enumerate() {
        let polar = cone.polar();
        for i in 0..cx.count(1000) {
            let z = gaussian_point(&mut cx.rng(name, k * 100_000 + i), cone.m());
            let (pk, _) = moreau_decompose(cone, &z)?;
            let pp = polar.project(&z)?;
            let gap: Vec<f64> = z.iter().zip(&pk).zip(&pp).map(|((a, b), c)| a - b - c).collect();
            let zn = norm(&z);
            t.check(norm(&gap) / zn.max(1.0), MOREAU_TOL);
            t.check(dot(&pk, &pp).abs() / (zn * zn).max(f64::MIN_POSITIVE), MOREAU_TOL);
        }
    }
    Ok(t.finish(name, "conegeom"))
}

fn bipolar(cx: &Ctx) -> Result<SuiteOutcome> {
    let name = "bipolar";
    let mut t = Tally::default();
    for (k, cone) in sample_cones().iter().enumerate() {
        let bi = cone.polar().polar();
        for i in 0..cx.count(1000) {
            let mut rng = cx.rng(name, k * 100_000 + i);
            let z = if i % 3 == 0 { boundary_sample(&mut rng, cone, false) } else { gaussian_point(&mut rng, cone.m()) };
            let a = classify_point(cone, &z, DEFAULT_TOL)?.class;
            let b = classify_point(&bi, &z, DEFAULT_TOL)?.class;
            t.require(a == b, || format!("{} at {z:?}: {a:?} vs {b:?}", cone.kind_name()));
        }
    }
    Ok(t.finish(name, "conegeom"))
}

fn polar_pairing(cx: &Ctx) -> Result<SuiteOutcome> {
    let name = "polar-pairing";
    let mut t = Tally::default();
    let mut cones = sample_cones();
    cones.push(ConeSpec::PCone { m: 3, p: 3.0 });
    for (k, cone) in cones.iter().enumerate() {
        let out = polar_pairing_check(cone, cx.opts.exponent_rule, cx.count(1000), subseed(cx.opts.seed, &format!("{name}-{k}")))?;
        t.check(out.max_pairing, PAIRING_TOL);
        t.check(out.max_tightness, PAIRING_TOL);
        if !out.passed && t.notes.len() < 4 {
            t.notes.push(format!("{:?}: pairing {:.3e}, tightness {:.3e}", cone, out.max_pairing, out.max_tightness));
        }
    }
    Ok(t.finish(name, "conegeom"))
}

fn normal_rays(cx: &Ctx) -> Result<SuiteOutcome> {
    let name = "normal-ray";
    let mut t = Tally::default();
    for (k, cone) in sample_cones().iter().enumerate() {
        let polar = cone.polar();
        for i in 0..cx.count(1000) {
            let z = boundary_sample(&mut cx.rng(name, k * 100_000 + i), cone, false);
            let d = normal_ray(cone, &z, DEFAULT_TOL)?.direction;
            t.check(dot(&d, &z).abs() / norm(&z), 1e-8);
            t.check(polar.margin_unchecked(&d).abs(), 1e-8);
        }
    }
    Ok(t.finish(name, "conegeom"))
}

fn strict_convexity(cx: &Ctx) -> Result<SuiteOutcome> {
    let name = "strict-convexity";
    let mut t = Tally::default();
    for (k, cone) in sample_cones().iter().enumerate() {
        let polar = cone.polar();
        for (side, negated, target) in [(0, false, SignedCone::positive(*cone)), (1, true, polar)] {
            let base = if side == 0 { *cone } else { polar.cone };
            let mut pairs = 0;
            let mut i = 0;
            while pairs < cx.count(1000) && i < 20 * cx.count(1000) {
                let mut rng = cx.rng(name, (2 * k + side) * 1_000_000 + i);
                i += 1;
                let x = boundary_sample(&mut rng, &base, negated);
                let y = boundary_sample(&mut rng, &base, negated);
                match strict_convexity_probe(&target, &x, &y, DEFAULT_TOL) {
                    Ok(ok) => {
                        pairs += 1;
                        t.require(ok, || format!("{:?}: midpoint of {x:?}, {y:?} not interior", target));
                    }
                    Err(crate::Error::Colinear) => {}
                    Err(e) => return Err(e),
                }
            }
            t.require(pairs == cx.count(1000), || format!("{:?}: only {pairs} non-colinear pairs", target));
        }
    }
    Ok(t.finish(name, "conegeom"))
}

fn homogeneity(cx: &Ctx) -> Result<SuiteOutcome> {
    let name = "margin-homogeneity";
    let mut t = Tally::default();
    for (k, cone) in sample_cones().iter().enumerate() {
        for i in 0..cx.count(1000) {
            let mut rng = cx.rng(name, k * 100_000 + i);
            let z = gaussian_point(&mut rng, cone.m());
            let lam = 10f64.powf(rng.random_range(-3.0..3.0));
            let lhs = cone.margin_unchecked(&scale(&z, lam));
            let rhs = lam * cone.margin_unchecked(&z);
            t.check((lhs - rhs).abs() / (lam * norm(&z)), 1e-10);
        }
    }
    Ok(t.finish(name, "conegeom"))
}

/// Random `m × n` matrix of random rank, possibly zero.
fn random_matrix(rng: &mut StreamRng, max_m: usize) -> DMatrix<f64> {
    let m = rng.random_range(2..=max_m);
    let n = rng.random_range(1..=max_m);
    let r = rng.random_range(0..=m.min(n));
    gaussian_matrix(rng, m, r) * gaussian_matrix(rng, r, n)
}

fn orthogonal_decomposition(cx: &Ctx) -> Result<SuiteOutcome> {
    let name = "orthogonal-decomposition";
    let mut t = Tally::default();
    for i in 0..cx.count(500) {
        let a = random_matrix(&mut cx.rng(name, i), 6);
        let im = image_basis(&a, DEFAULT_RANK_TOL)?;
        let ker = kernel_adjoint_basis(&a, DEFAULT_RANK_TOL)?;
        t.require(im.rank + ker.rank == a.nrows(), || format!("ranks {} + {} != {}", im.rank, ker.rank, a.nrows()));
        let cross = im.q.transpose() * &ker.q;
        t.check(cross.amax(), 1e-10);
        for b in [&im, &ker] {
            let gram = b.q.transpose() * &b.q - DMatrix::<f64>::identity(b.rank, b.rank);
            t.check(gram.amax(), 1e-10);
        }
    }
    Ok(t.finish(name, "subspace"))
}

fn image_membership(cx: &Ctx) -> Result<SuiteOutcome> {
    let name = "image-membership";
    let mut t = Tally::default();
    for i in 0..cx.count(500) {
        let mut rng = cx.rng(name, i);
        let a = random_matrix(&mut rng, 6);
        let x = nalgebra::DVector::from_vec(gaussian_vec(&mut rng, a.ncols()));
        let im = image_basis(&a, DEFAULT_RANK_TOL)?;
        let ax = &a * x;
        t.require(contains_vector(&im, ax.as_slice(), 1e-8)?, || format!("A·x outside Im A for {a}"));
    }
    Ok(t.finish(name, "subspace"))
}

fn rank_stability(cx: &Ctx) -> Result<SuiteOutcome> {
    let name = "rank-stability";
    let mut t = Tally::default();
    for i in 0..cx.count(200) {
        let a = random_matrix(&mut cx.rng(name, i), 6);
        let r0 = image_basis(&a, DEFAULT_RANK_TOL)?.rank;
        for k in -6..=6 {
            let r = image_basis(&(&a * 10f64.powi(k)), DEFAULT_RANK_TOL)?.rank;
            t.require(r == r0, || format!("rank {r} at 1e{k} vs {r0}"));
        }
    }
    Ok(t.finish(name, "subspace"))
}

fn random_cone(rng: &mut StreamRng, m: usize) -> ConeSpec {
    let kinds = if m == 2 { 4 } else { 3 };
    match rng.random_range(0..kinds) {
        0 => ConeSpec::SecondOrder { m },
        1 => ConeSpec::PCone { m, p: rng.random_range(1.2..4.0) },
        2 => ConeSpec::Circular { m, theta: rng.random_range(0.2..1.3) },
        _ => ConeSpec::Orthant { m },
    }
}

fn prop33(cx: &Ctx) -> Result<SuiteOutcome> {
    let name = "prop33-consistency";
    let opts = ClassifyOpts { seed: cx.opts.seed, ..ClassifyOpts::default() };
    let mut t = Tally::default();
    for i in 0..cx.count(100) {
        let mut rng = cx.rng(name, i);
        let m = rng.random_range(2..=6);
        let n = rng.random_range(1..=m);
        let cone = random_cone(&mut rng, m);
        let a = gaussian_matrix(&mut rng, m, n);
        let tri = trichotomy(&image_basis(&a, opts.rank_tol)?, &cone, &opts)?;
        let both = tri.primal_value > opts.eps && tri.dual_value.is_some_and(|d| d > opts.eps);
        t.require(!both, || format!("{cone:?}: primal {} and dual {:?} both positive", tri.primal_value, tri.dual_value));

        // an instance whose image contains the cone axis
        let mut b = gaussian_matrix(&mut rng, m, n);
        b.set_column(0, &nalgebra::DVector::from_vec(cone.axis()));
        let tri = trichotomy(&image_basis(&b, opts.rank_tol)?, &cone, &opts)?;
        t.require(tri.primal_value > opts.eps && tri.class == IntersectionClass::MeetsInterior, || {
            format!("{cone:?}: axis in Im A but primal value {}", tri.primal_value)
        });
    }
    Ok(t.finish(name, "classify"))
}

fn verdict_map(cx: &Ctx) -> Result<SuiteOutcome> {
    let name = "worked-instances";
    let opts = ClassifyOpts { seed: cx.opts.seed, ..ClassifyOpts::default() };
    let mut t = Tally::default();
    for (label, p, expected) in instances::all() {
        let c = classify_geb(&p, &opts)?;
        t.require(c.case == expected, || format!("{label}: got {:?}", c.case));
        t.require((c.geb, c.acq) == c.case.verdicts(), || format!("{label}: verdicts off the case table"));
        if matches!(c.case, TheoremCase::T52i | TheoremCase::T52ii | TheoremCase::T52iii) {
            t.require(c.geb as u8 == c.acq as u8, || format!("{label}: geb and acq differ"));
        }
        if let Some(d) = &c.witnesses.ray {
            t.check(p.cone.margin_unchecked(d).abs(), 1e-7);
            t.check(image_basis(&p.a, opts.rank_tol)?.residual(d), 1e-8);
        }
    }
    Ok(t.finish(name, "classify"))
}

fn random_orthogonal(rng: &mut StreamRng, k: usize) -> DMatrix<f64> {
    gaussian_matrix(rng, k, k).qr().q()
}

/// `(A, b) ↦ (A·R, b)`, `(cA, cb)` and `(QA, Qb)` with `Q = diag(1, O)`.
fn invariance(cx: &Ctx) -> Result<SuiteOutcome> {
    let name = "classification-invariance";
    let opts = ClassifyOpts { seed: cx.opts.seed, ..ClassifyOpts::default() };
    let mut t = Tally::default();
    for (f, (label, p, expected)) in instances::certified().into_iter().enumerate() {
        let (m, n) = (p.m(), p.n());
        let mut variants: Vec<(String, AffineInclusion)> = Vec::new();
        for i in 0..cx.count(50) {
            let mut rng = cx.rng(name, f * 1_000_000 + i);
            let r = loop {
                let r = gaussian_matrix(&mut rng, n, n);
                let sv = r.singular_values();
                if sv.min() > 1e-2 * sv.max() {
                    break r;
                }
            };
            variants.push((format!("{label}·R#{i}"), AffineInclusion::new(&p.a * r, p.b.clone(), p.cone)?));
            let mut q = DMatrix::<f64>::identity(m, m);
            q.view_mut((1, 1), (m - 1, m - 1)).copy_from(&random_orthogonal(&mut rng, m - 1));
            let qb = (&q * nalgebra::DVector::from_column_slice(&p.b)).as_slice().to_vec();
            variants.push((format!("Q#{i}·{label}"), AffineInclusion::new(&q * &p.a, qb, p.cone)?));
        }
        for c in [1e-3, 1.0, 1e3] {
            let b = p.b.iter().map(|x| c * x).collect();
            variants.push((format!("{c}·{label}"), AffineInclusion::new(&p.a * c, b, p.cone)?));
        }
        for (vl, v) in variants {
            let got = classify_geb(&v, &opts)?.case;
            t.require(got == expected, || format!("{vl}: {got:?}"));
        }
    }
    Ok(t.finish(name, "classify"))
}

fn certify_consistency(cx: &Ctx) -> Result<SuiteOutcome> {
    let name = "certify-consistency";
    let copts = ClassifyOpts { seed: cx.opts.seed, ..ClassifyOpts::default() };
    let mopts = ModulusOpts { seed: cx.opts.seed, samples_per_radius: cx.count(200), ..ModulusOpts::default() };
    let mut t = Tally::default();
    for (label, p, _) in instances::certified() {
        let c = Certifier::new(&p, &copts, &SolveOpts::default())?;
        let r = modulus_estimate(&c, &mopts)?;
        let want = match r.geb {
            GebVerdict::Holds | GebVerdict::TriviallyHolds => VerdictHint::BoundedEvidence,
            _ => VerdictHint::DivergenceEvidence,
        };
        t.require(r.hint == want, || format!("{label}: hint {:?} against geb {:?}", r.hint, r.geb));
        // d(Ax + b, K) ≤ ‖A‖·d(x, S)
        let floor = 1.0 / r.operator_norm - 1e-6;
        for s in &r.samples {
            if let Some(ratio) = s.ratio {
                t.require(ratio >= floor, || format!("{label}: ratio {ratio} below 1/‖A‖"));
            }
        }
        if r.case == TheoremCase::T52iii {
            let slope = r.probe.as_ref().and_then(|pr| pr.slope);
            t.require(slope.is_some_and(|s| s <= -0.9), || format!("{label}: probe slope {slope:?}"));
        }
    }
    Ok(t.finish(name, "certify"))
}

fn tau_flags(cx: &Ctx) -> Result<SuiteOutcome> {
    let name = "tau-estimate";
    let copts = ClassifyOpts { seed: cx.opts.seed, ..ClassifyOpts::default() };
    let topts = TauOpts { seed: cx.opts.seed, n_points: cx.count(200), ..TauOpts::default() };
    let mut t = Tally::default();
    for (label, p, case) in instances::certified() {
        if case == TheoremCase::T52iii {
            continue;
        }
        let c = Certifier::new(&p, &copts, &SolveOpts::default())?;
        let r = tau_estimate(&c, &topts)?;
        let want_unbounded = case == TheoremCase::T53ii;
        t.require(r.unbounded == want_unbounded, || format!("{label}: unbounded = {}", r.unbounded));
    }
    Ok(t.finish(name, "certify"))
}

fn example51(cx: &Ctx) -> Result<SuiteOutcome> {
    let name = "example51";
    let r = example51_suite(cx.opts.seed);
    let mut t = Tally::default();
    t.require(r.scq_witness.interior, || format!("no strict Slater point: h = {:?}", r.scq_witness.value));
    t.check(-r.concavity.worst_slack, 1e-9);
    t.check(r.residual_identity.max_error, 1e-10);
    let mut out = t.finish(name, "certify");
    if !r.scq_stated.matches_expected {
        out.note = format!("h{:?} = {:?}, not the stated {:?}", r.scq_stated.point, r.scq_stated.value, r.scq_stated.expected);
    }
    Ok(out)
}

type Suite = fn(&Ctx) -> Result<SuiteOutcome>;

const SUITES: [(&str, Suite); 15] = [
    ("projection-optimality", projection_optimality),
    ("moreau", moreau),
    ("bipolar", bipolar),
    ("polar-pairing", polar_pairing),
    ("normal-ray", normal_rays),
    ("strict-convexity", strict_convexity),
    ("margin-homogeneity", homogeneity),
    ("orthogonal-decomposition", orthogonal_decomposition),
    ("image-membership", image_membership),
    ("rank-stability", rank_stability),
    ("prop33-consistency", prop33),
    ("worked-instances", verdict_map),
    ("classification-invariance", invariance),
    ("certify-consistency", certify_consistency),
    ("tau-estimate", tau_flags),
];

/// Names of all suites, in run order.
pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).chain(["example51"]).collect()
}

/// Runs one suite by name.
pub fn run_suite(name: &str, opts: &SelftestOpts) -> Result<Option<SuiteOutcome>> {
    let cx = Ctx { opts: *opts };
    if name == "example51" {
        return example51(&cx).map(Some);
    }
    SUITES.iter().find(|s| s.0 == name).map(|s| (s.1)(&cx)).transpose()
}

/// Runs every suite. An error inside a suite is reported as its failure.
pub fn run_selftest(opts: &SelftestOpts) -> SelftestReport {
    let suites: Vec<SuiteOutcome> = suite_names()
        .into_iter()
        .map(|name| match run_suite(name, opts) {
            Ok(Some(s)) => s,
            Ok(None) => unreachable!("suite list and dispatch agree"),
            Err(e) => SuiteOutcome {
                name: name.into(),
                module: String::new(),
                passed: false,
                checks: 0,
                failures: 1,
                worst: f64::INFINITY,
                note: e.to_string(),
            },
        })
        .collect();
    let passed = suites.iter().all(|s| s.passed);
    SelftestReport { seed: opts.seed, quick: opts.quick, exponent_rule: opts.exponent_rule, suites, passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_separates_exponent_rules_at_p3() {
        let cone = ConeSpec::PCone { m: 3, p: 3.0 };
        assert!(polar_pairing_check(&cone, ExponentRule::Hoelder, 200, 7).unwrap().passed);
        let wrong = polar_pairing_check(&cone, ExponentRule::SumTwo, 200, 7).unwrap();
        assert!(!wrong.passed);
        // the wrong polar is too small, not too large
        assert!(wrong.max_pairing <= PAIRING_TOL);
    }

    #[test]
    fn quick_counts_are_a_tenth() {
        let cx = Ctx { opts: SelftestOpts { quick: true, ..SelftestOpts::default() } };
        assert_eq!(cx.count(1000), 100);
        assert_eq!(cx.count(5), 1);
    }
}
