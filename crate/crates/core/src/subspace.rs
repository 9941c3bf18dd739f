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

//! Orthonormal bases for `Im A` and `Ker Aᵀ`, and the affine inclusion type.
//!
//! Ranks are decided by singular values relative to the largest one, so a
//! rescaled matrix has the same rank.

use nalgebra::{DMatrix, DVector};

use crate::conegeom::ConeSpec;
use crate::vecops::{all_finite, norm};
use crate::{Error, Result};

pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Orthonormal columns spanning a subspace of `R^ambient`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    pub q: DMatrix<f64>,
    pub rank: usize,
    /// Relative rank tolerance the basis was computed with.
    pub tol: f64,
}

impl SubspaceBasis {
    pub fn ambient(&self) -> usize {
        self.q.nrows()
    }

    pub fn zero(ambient: usize, tol: f64) -> Self {
        SubspaceBasis { q: DMatrix::zeros(ambient, 0), rank: 0, tol }
    }

    /// Coordinates `Qᵀv`.
    pub fn coords(&self, v: &[f64]) -> Vec<f64> {
        (self.q.transpose() * DVector::from_column_slice(v)).as_slice().to_vec()
    }

    /// `Qy`.
    pub fn embed(&self, y: &[f64]) -> Vec<f64> {
        if self.rank == 0 {
            return vec![0.0; self.ambient()];
        }
        (&self.q * DVector::from_column_slice(y)).as_slice().to_vec()
    }

    /// Orthogonal projection `QQᵀv`.
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        self.embed(&self.coords(v))
    }

    /// `‖v − QQᵀv‖`.
    pub fn residual(&self, v: &[f64]) -> f64 {
        let p = self.project(v);
        norm(&v.iter().zip(&p).map(|(a, b)| a - b).collect::<Vec<_>>())
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.q.column(j).iter().copied().collect()
    }
}

fn check_finite(a: &DMatrix<f64>) -> Result<()> {
    if a.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("matrix"))
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("rank tolerance {tol} must be positive")))
    }
}

/// Left singular vectors with `σᵢ ≥ tol·σ_max`.
fn dominant_left_vectors(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let m = a.nrows();
    if a.ncols() == 0 || m == 0 {
        return DMatrix::zeros(m, 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sigma = &svd.singular_values;
    let smax = sigma.iter().fold(0.0_f64, |acc, s| acc.max(*s));
    if smax == 0.0 {
        return DMatrix::zeros(m, 0);
    }
    let mut keep: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] >= tol * smax).collect();
    keep.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    DMatrix::from_fn(m, keep.len(), |r, c| u[(r, keep[c])])
}

pub fn image_basis(a: &DMatrix<f64>, tol: f64) -> Result<SubspaceBasis> {
    check_tol(tol)?;
    check_finite(a)?;
    let q = dominant_left_vectors(a, tol);
    let rank = q.ncols();
    Ok(SubspaceBasis { q, rank, tol })
}

/// Orthogonal complement of a basis in its ambient space.
pub fn complement(basis: &SubspaceBasis) -> SubspaceBasis {
    let m = basis.ambient();
    let proj = DMatrix::identity(m, m) - &basis.q * basis.q.transpose();
    // the complementary projector has eigenvalues 0 and 1 only
    let eig = proj.symmetric_eigen();
    let keep: Vec<usize> = (0..m).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
    let q = DMatrix::from_fn(m, keep.len(), |r, c| eig.eigenvectors[(r, keep[c])]);
    let rank = q.ncols();
    SubspaceBasis { q, rank, tol: basis.tol }
}

/// Basis of `Ker Aᵀ = (Im A)^⊥`.
pub fn kernel_adjoint_basis(a: &DMatrix<f64>, tol: f64) -> Result<SubspaceBasis> {
    Ok(complement(&image_basis(a, tol)?))
}

/// Moore-Penrose pseudo-inverse, dropping singular values below `tol·σ_max`.
pub fn pseudo_inverse(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let (m, n) = a.shape();
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0_f64, |acc, s| acc.max(*s));
    if smax == 0.0 {
        return DMatrix::zeros(n, m);
    }
    svd.pseudo_inverse(tol * smax).unwrap_or_else(|_| DMatrix::zeros(n, m))
}

/// Largest singular value.
pub fn operator_norm(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.singular_values().iter().fold(0.0_f64, |acc, s| acc.max(*s))
}

/// True iff `‖v − QQᵀv‖ ≤ tol·max(1, ‖v‖)`.
pub fn contains_vector(basis: &SubspaceBasis, v: &[f64], tol: f64) -> Result<bool> {
    if v.len() != basis.ambient() {
        return Err(Error::DimensionMismatch { expected: basis.ambient(), got: v.len() });
    }
    Ok(basis.residual(v) <= tol * norm(v).max(1.0))
}

/// Checks that `span(D − x) = span(D − y)` for every pair of base points
/// `x, y` among the first five points of `D`.
pub fn span_shift_invariance_check(points: &[Vec<f64>], tol: f64) -> Result<bool> {
    if points.len() < 2 {
        return Err(Error::Precondition("need at least two points".into()));
    }
    let dim = points[0].len();
    if let Some(bad) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: bad.len() });
    }
    let shifted_span = |base: &[f64]| -> Result<SubspaceBasis> {
        let mat = DMatrix::from_fn(dim, points.len(), |r, c| points[c][r] - base[r]);
        image_basis(&mat, DEFAULT_RANK_TOL)
    };
    let bases: Vec<SubspaceBasis> =
        points.iter().take(5).map(|p| shifted_span(p)).collect::<Result<_>>()?;
    for (i, bx) in bases.iter().enumerate() {
        for by in &bases[i + 1..] {
            if bx.rank != by.rank {
                return Ok(false);
            }
            for j in 0..bx.rank {
                if by.residual(&bx.column(j)) > tol || bx.residual(&by.column(j)) > tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The inclusion `Ax + b ∈ K`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineInclusion {
    pub a: DMatrix<f64>,
    pub b: Vec<f64>,
    pub cone: ConeSpec,
}

impl AffineInclusion {
    pub fn new(a: DMatrix<f64>, b: Vec<f64>, cone: ConeSpec) -> Result<Self> {
        if a.ncols() == 0 {
            return Err(Error::InvalidProblem("A must have at least one column".into()));
        }
        if a.nrows() != b.len() {
            return Err(Error::InvalidProblem(format!(
                "rows(A) = {} but len(b) = {}",
                a.nrows(),
                b.len()
            )));
        }
        if a.nrows() != cone.m() {
            return Err(Error::InvalidProblem(format!(
                "rows(A) = {} but cone.m = {}",
                a.nrows(),
                cone.m()
            )));
        }
        check_finite(&a)?;
        if !all_finite(&b) {
            return Err(Error::NonFinite("b"));
        }
        Ok(AffineInclusion { a, b, cone })
    }

    /// Builds from row-major rows.
    pub fn from_rows(rows: &[Vec<f64>], b: Vec<f64>, cone: ConeSpec) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::InvalidProblem(format!(
                "row {i} of A has {} entries, expected {n}",
                r.len()
            )));
        }
        let a = DMatrix::from_fn(m, n, |r, c| rows[r][c]);
        Self::new(a, b, cone)
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    /// `Ax + b`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let ax = &self.a * DVector::from_column_slice(x);
        ax.iter().zip(&self.b).map(|(u, v)| u + v).collect()
    }

    /// `Ax`.
    pub fn apply_linear(&self, x: &[f64]) -> Vec<f64> {
        (&self.a * DVector::from_column_slice(x)).as_slice().to_vec()
    }

    /// `Aᵀw`.
    pub fn adjoint(&self, w: &[f64]) -> Vec<f64> {
        (self.a.transpose() * DVector::from_column_slice(w)).as_slice().to_vec()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.m()).map(|r| self.a.row(r).iter().copied().collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), rows[0].len(), |r, c| rows[r][c])
    }

    #[test]
    fn image_examples() {
        assert_eq!(image_basis(&DMatrix::identity(3, 3), 1e-10).unwrap().rank, 3);

        let col = mat(&[&[0.0], &[1.0], &[0.0]]);
        let b = image_basis(&col, 1e-10).unwrap();
        assert_eq!(b.rank, 1);
        assert!((b.q[(1, 0)].abs() - 1.0).abs() < 1e-15);

        let a = mat(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let b = image_basis(&a, 1e-10).unwrap();
        assert_eq!(b.rank, 2);
        assert!(norm(&b.coords(&[1.0, -1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn kernel_adjoint_examples() {
        assert_eq!(kernel_adjoint_basis(&DMatrix::identity(3, 3), 1e-10).unwrap().rank, 0);
        // full rank with a projector that is rounding noise, not exact zero
        let full = mat(&[&[0.3, -1.7, 2.0], &[1.1, 0.4, -0.9], &[-0.6, 2.2, 0.5]]);
        assert_eq!(kernel_adjoint_basis(&full, 1e-10).unwrap().rank, 0);

        let col = mat(&[&[0.0], &[1.0], &[0.0]]);
        let k = kernel_adjoint_basis(&col, 1e-10).unwrap();
        assert_eq!(k.rank, 2);
        assert!(k.q.row(1).iter().all(|x| x.abs() < 1e-15));

        let a = mat(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let k = kernel_adjoint_basis(&a, 1e-10).unwrap();
        assert_eq!(k.rank, 1);
        // Aᵀ(1, −1, 0) = 0, so the kernel is spanned by it.
        let v = k.column(0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[0].abs() - s).abs() < 1e-14 && (v[0] + v[1]).abs() < 1e-14 && v[2].abs() < 1e-14);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let b = image_basis(&DMatrix::zeros(3, 2), 1e-10).unwrap();
        assert_eq!(b.rank, 0);
        assert_eq!(kernel_adjoint_basis(&DMatrix::zeros(3, 2), 1e-10).unwrap().rank, 3);
    }

    #[test]
    fn non_finite_rejected() {
        let mut a = DMatrix::identity(2, 2);
        a[(0, 1)] = f64::NAN;
        assert_eq!(image_basis(&a, 1e-10), Err(Error::NonFinite("matrix")));
    }

    #[test]
    fn contains_examples() {
        let col = image_basis(&mat(&[&[0.0], &[1.0], &[0.0]]), 1e-10).unwrap();
        assert!(contains_vector(&col, &[0.0, 2.0, 0.0], 1e-10).unwrap());
        assert!(!contains_vector(&col, &[1.0, 0.0, 1.0], 1e-10).unwrap());
        let zero = SubspaceBasis::zero(3, 1e-10);
        assert!(contains_vector(&zero, &[0.0, 0.0, 0.0], 1e-10).unwrap());
        assert!(contains_vector(&col, &[0.0, 1.0], 1e-10).is_err());
    }

    #[test]
    fn span_shift_examples() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(span_shift_invariance_check(&pts, 1e-9).unwrap());
        assert!(span_shift_invariance_check(&[vec![5.0, 5.0], vec![6.0, 5.0]], 1e-9).unwrap());
        assert!(span_shift_invariance_check(&[vec![1.0, 2.0]], 1e-9).is_err());
    }

    #[test]
    fn inclusion_shape_checks() {
        let k = ConeSpec::second_order(3).unwrap();
        assert!(AffineInclusion::new(DMatrix::identity(3, 3), vec![0.0; 2], k).is_err());
        assert!(AffineInclusion::new(DMatrix::identity(2, 2), vec![0.0; 2], k).is_err());
        assert!(AffineInclusion::from_rows(&[vec![1.0], vec![1.0, 2.0], vec![0.0]], vec![0.0; 3], k).is_err());
        let p = AffineInclusion::new(DMatrix::identity(3, 3), vec![1.0, 0.0, 0.0], k).unwrap();
        assert_eq!(p.apply(&[0.0, 1.0, 0.0]), vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn pseudo_inverse_of_rank_deficient() {
        let a = mat(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let pinv = pseudo_inverse(&a, 1e-10);
        let back = &a * &pinv * &a;
        assert!((back - &a).norm() < 1e-14);
        let col = mat(&[&[1.0], &[1.0]]);
        let p = pseudo_inverse(&col, 1e-10);
        assert!((p[(0, 0)] - 0.5).abs() < 1e-15 && (p[(0, 1)] - 0.5).abs() < 1e-15);
        assert!((operator_norm(&col) - 2f64.sqrt()).abs() < 1e-15);
    }
}
