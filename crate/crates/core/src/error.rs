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

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid cone parameters: {0}")]
    InvalidCone(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// `N_K(0)` is the whole polar cone; use [`crate::ClosedCone::polar`].
    #[error("the normal cone at the apex is the polar cone, not a ray")]
    ApexNotRay,

    #[error("point is not on the cone boundary (normalized margin {0:e})")]
    NotOnBoundary(f64),

    #[error("inputs are positive multiples of each other")]
    Colinear,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("zero subgradient at an infeasible point")]
    ZeroGradient,

    #[error("every sample had zero residual")]
    AllSamplesFeasible,

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
