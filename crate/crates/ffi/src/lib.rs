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


//! C ABI over the cone primitives and the classifier.
//!
//! Objects cross the boundary as opaque handles created by `cb_*_new` and
//! released by the matching `cb_*_free`. Every fallible call returns a
//! [`CbStatus`]; on failure `cb_last_error_message` describes the cause on
//! the calling thread. Panics never unwind into C: they become
//! `CB_STATUS_PANIC`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use conebound::classify::{classify_geb, AcqVerdict, Classification, ClassifyOpts, GebVerdict, TheoremCase};
use conebound::cli::ProblemFile;
use conebound::conegeom::{distance, ClosedCone, ConeSpec};
use conebound::subspace::AffineInclusion;
use conebound::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidCone = 3,
    DimensionMismatch = 4,
    NumericFailure = 5,
    ParseError = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbConeKind {
    SecondOrder = 0,
    /// `param` is the exponent `p > 1`.
    PCone = 1,
    /// `param` is the half-angle `θ ∈ (0, π/2)`.
    Circular = 2,
    /// Only `m = 2`.
    Orthant = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbCase {
    T51 = 0,
    T52i = 1,
    T52ii = 2,
    T52iii = 3,
    T53i = 4,
    T53ii = 5,
    T53iii = 6,
    DegenerateAZero = 7,
    Infeasible = 8,
    Indeterminate = 9,
}

/// Shared by the error-bound and Abadie verdicts; `TriviallyHolds` only
/// occurs for the former.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbVerdict {
    Holds = 0,
    Fails = 1,
    TriviallyHolds = 2,
    Unknown = 3,
}

/// A validated cone.
pub struct CbCone {
    inner: ConeSpec,
}

/// A validated inclusion `Ax + b ∈ K`.
pub struct CbProblem {
    inner: AffineInclusion,
}

/// The outcome of classifying a problem.
pub struct CbClassification {
    inner: Classification,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

type Failure = (CbStatus, String);

fn status_of(e: &Error) -> CbStatus {
    match e {
        Error::InvalidCone(_) => CbStatus::InvalidCone,
        Error::DimensionMismatch { .. } => CbStatus::DimensionMismatch,
        Error::InvalidProblem(_) | Error::Precondition(_) | Error::NonFinite(_) => CbStatus::InvalidArgument,
        _ => CbStatus::NumericFailure,
    }
}

fn fail(e: Error) -> Failure {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> Failure {
    (CbStatus::NullPointer, format!("{what} is NULL"))
}

/// Runs `f`, records any failure and converts panics.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CbStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            CbStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn cone_ref<'a>(cone: *const CbCone) -> Result<&'a ConeSpec, Failure> {
    cone.as_ref().map(|c| &c.inner).ok_or_else(|| null("cone"))
}

/// Checks the length and rejects non-finite entries before they reach the
/// margin, which does not validate them.
unsafe fn point<'a>(cone: &ConeSpec, z: *const f64, len: usize) -> Result<&'a [f64], Failure> {
    if len != cone.m() {
        return Err(fail(Error::DimensionMismatch { expected: cone.m(), got: len }));
    }
    let z = slice(z, len, "z")?;
    if !z.iter().all(|v| v.is_finite()) {
        return Err(fail(Error::NonFinite("point")));
    }
    Ok(z)
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a cone in `R^m`. `param` is ignored for the second-order cone
/// and the orthant.
#[no_mangle]
pub unsafe extern "C" fn cb_cone_new(kind: CbConeKind, m: usize, param: f64, out: *mut *mut CbCone) -> CbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = match kind {
            CbConeKind::SecondOrder => ConeSpec::second_order(m),
            CbConeKind::PCone => ConeSpec::p_cone(m, param),
            CbConeKind::Circular => ConeSpec::circular(m, param),
            CbConeKind::Orthant => ConeSpec::orthant(m),
        }
        .map_err(fail)?;
        *out = Box::into_raw(Box::new(CbCone { inner }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn cb_cone_free(cone: *mut CbCone) {
    if !cone.is_null() {
        drop(Box::from_raw(cone));
    }
}

/// Ambient dimension, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn cb_cone_dim(cone: *const CbCone) -> usize {
    cone.as_ref().map_or(0, |c| c.inner.m())
}

/// Margin `φ(z)`; `z ∈ K` iff it is non-negative.
#[no_mangle]
pub unsafe extern "C" fn cb_cone_margin(cone: *const CbCone, z: *const f64, len: usize, out: *mut f64) -> CbStatus {
    guard(|| {
        let c = cone_ref(cone)?;
        let z = point(c, z, len)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = c.margin(z).map_err(fail)?;
        Ok(())
    })
}

/// Writes the projection of `z` onto the cone to `out[0..len]`.
#[no_mangle]
pub unsafe extern "C" fn cb_cone_project(cone: *const CbCone, z: *const f64, len: usize, out: *mut f64) -> CbStatus {
    guard(|| {
        let c = cone_ref(cone)?;
        let z = point(c, z, len)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = c.project(z).map_err(fail)?;
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&p);
        Ok(())
    })
}

/// Euclidean distance from `z` to the cone.
#[no_mangle]
pub unsafe extern "C" fn cb_cone_distance(cone: *const CbCone, z: *const f64, len: usize, out: *mut f64) -> CbStatus {
    guard(|| {
        let c = cone_ref(cone)?;
        let z = point(c, z, len)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = distance(c, z).map_err(fail)?;
        Ok(())
    })
}

/// Builds `Ax + b ∈ K` from a row-major `m × n` matrix, where `m` is the
/// cone dimension. The cone is copied; the caller keeps ownership.
#[no_mangle]
pub unsafe extern "C" fn cb_problem_new(
    a: *const f64,
    rows: usize,
    cols: usize,
    b: *const f64,
    cone: *const CbCone,
    out: *mut *mut CbProblem,
) -> CbStatus {
    guard(|| {
        let c = cone_ref(cone)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if rows == 0 || cols == 0 {
            return Err((CbStatus::InvalidArgument, "A must have at least one row and column".into()));
        }
        let a = slice(a, rows * cols, "a")?;
        let b = slice(b, rows, "b")?;
        let matrix: Vec<Vec<f64>> = a.chunks(cols).map(<[f64]>::to_vec).collect();
        let inner = AffineInclusion::from_rows(&matrix, b.to_vec(), *c).map_err(fail)?;
        *out = Box::into_raw(Box::new(CbProblem { inner }));
        Ok(())
    })
}

/// Parses a problem file (`{"A": .., "b": .., "cone": {..}}`).
#[no_mangle]
pub unsafe extern "C" fn cb_problem_from_json(json: *const c_char, out: *mut *mut CbProblem) -> CbStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (CbStatus::ParseError, format!("json is not UTF-8: {e}")))?;
        let file = ProblemFile::parse(text).map_err(|e| (CbStatus::ParseError, e.to_string()))?;
        let inner = file.inclusion().map_err(|e| (CbStatus::InvalidArgument, e.to_string()))?;
        *out = Box::into_raw(Box::new(CbProblem { inner }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn cb_problem_free(problem: *mut CbProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Classifies with threshold `eps` (pass 0 for the default) and `seed`.
#[no_mangle]
pub unsafe extern "C" fn cb_classify(
    problem: *const CbProblem,
    eps: f64,
    seed: u64,
    out: *mut *mut CbClassification,
) -> CbStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let opts = if eps == 0.0 { ClassifyOpts::default() } else { ClassifyOpts::with_eps(eps) }.with_seed(seed);
        let inner = classify_geb(&p.inner, &opts).map_err(fail)?;
        *out = Box::into_raw(Box::new(CbClassification { inner }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn cb_classification_free(c: *mut CbClassification) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Theorem case; `CB_CASE_INDETERMINATE` for NULL.
#[no_mangle]
pub unsafe extern "C" fn cb_classification_case(c: *const CbClassification) -> CbCase {
    let Some(c) = c.as_ref() else { return CbCase::Indeterminate };
    match c.inner.case {
        TheoremCase::T51 => CbCase::T51,
        TheoremCase::T52i => CbCase::T52i,
        TheoremCase::T52ii => CbCase::T52ii,
        TheoremCase::T52iii => CbCase::T52iii,
        TheoremCase::T53i => CbCase::T53i,
        TheoremCase::T53ii => CbCase::T53ii,
        TheoremCase::T53iii => CbCase::T53iii,
        TheoremCase::DegenerateAZero => CbCase::DegenerateAZero,
        TheoremCase::Infeasible => CbCase::Infeasible,
        TheoremCase::Indeterminate => CbCase::Indeterminate,
    }
}

/// Global error bound verdict; `CB_VERDICT_UNKNOWN` for NULL.
#[no_mangle]
pub unsafe extern "C" fn cb_classification_geb(c: *const CbClassification) -> CbVerdict {
    match c.as_ref().map(|c| c.inner.geb) {
        Some(GebVerdict::Holds) => CbVerdict::Holds,
        Some(GebVerdict::Fails) => CbVerdict::Fails,
        Some(GebVerdict::TriviallyHolds) => CbVerdict::TriviallyHolds,
        Some(GebVerdict::Unknown) | None => CbVerdict::Unknown,
    }
}

/// Abadie constraint qualification verdict; `CB_VERDICT_UNKNOWN` for NULL.
#[no_mangle]
pub unsafe extern "C" fn cb_classification_acq(c: *const CbClassification) -> CbVerdict {
    match c.as_ref().map(|c| c.inner.acq) {
        Some(AcqVerdict::Holds) => CbVerdict::Holds,
        Some(AcqVerdict::Fails) => CbVerdict::Fails,
        Some(AcqVerdict::Unknown) | None => CbVerdict::Unknown,
    }
}

/// Full classification as JSON. Release with [`cb_string_free`].
#[no_mangle]
pub unsafe extern "C" fn cb_classification_to_json(c: *const CbClassification, out: *mut *mut c_char) -> CbStatus {
    guard(|| {
        let c = c.as_ref().ok_or_else(|| null("classification"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = serde_json::to_string(&c.inner).map_err(|e| (CbStatus::NumericFailure, e.to_string()))?;
        *out = CString::new(text).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn cb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
