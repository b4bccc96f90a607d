//! Small dense symmetric bilinear forms.
//!
//! Forms are stored as a packed upper triangle, so symmetry holds by
//! construction. Signatures are counted from symmetric eigenvalues with a
//! relative zero threshold `tol * max(1, scale)`, where `scale` is the largest
//! absolute entry.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Default relative zero threshold for signature counting.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricForm {
    dim: usize,
    packed: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Signature {
    pub n_pos: usize,
    pub n_neg: usize,
    pub n_zero: usize,
    pub tol: f64,
}

impl Signature {
    pub fn dim(&self) -> usize {
        self.n_pos + self.n_neg + self.n_zero
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        (self.n_pos, self.n_neg, self.n_zero)
    }

    /// One negative direction, the rest positive.
    pub fn is_lorentzian(&self) -> bool {
        self.n_neg == 1 && self.n_zero == 0 && self.n_pos + 1 == self.dim()
    }
}

fn packed_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * (i + 1) / 2 + j
}

impl SymmetricForm {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            packed: vec![0.0; dim * (dim + 1) / 2],
        }
    }

    /// Builds the form from `f(i, j)` evaluated on the upper triangle `i <= j`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut packed = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in i..dim {
                packed.push(f(i, j));
            }
        }
        Self { dim, packed }
    }

    /// Builds from full rows; the input must be square and symmetric up to
    /// `1e-12` relative, and the upper triangle is kept.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::Dimension {
                expected: dim,
                got: r.len(),
            });
        }
        let scale = rows.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs()));
        for i in 0..dim {
            for j in 0..i {
                if (rows[i][j] - rows[j][i]).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::pre(format!("matrix is not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self::from_fn(dim, |i, j| rows[i][j]))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[packed_index(self.dim, i, j)]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Largest absolute entry.
    pub fn scale(&self) -> f64 {
        linalg::max_abs(&self.packed)
    }

    pub fn apply(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += u[i] * self.get(i, j) * v[j];
            }
        }
        s
    }

    /// The covector `f(u, .)`.
    pub fn lower(&self, u: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| u[i] * self.get(i, j)).sum())
            .collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            packed: self.packed.iter().map(|x| x * s).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            packed: self.packed.iter().zip(&other.packed).map(|(a, b)| a + b).collect(),
        }
    }

    /// `f + s * (a ⊗ a)`
    pub fn plus_outer(&self, s: f64, a: &[f64]) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(i, j) + s * a[i] * a[j])
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.packed
            .iter()
            .zip(&other.packed)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim == 0 {
            return Vec::new();
        }
        let eig = SymmetricEigen::new(self.to_matrix());
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn determinant(&self) -> f64 {
        if self.dim == 0 {
            return 1.0;
        }
        self.to_matrix().determinant()
    }

    pub fn zero_threshold(&self, tol: f64) -> f64 {
        tol * self.scale().max(1.0)
    }

    pub fn signature(&self, tol: f64) -> Signature {
        let thr = self.zero_threshold(tol);
        let mut sig = Signature {
            n_pos: 0,
            n_neg: 0,
            n_zero: 0,
            tol,
        };
        for ev in self.eigenvalues() {
            if ev.abs() <= thr {
                sig.n_zero += 1;
            } else if ev > 0.0 {
                sig.n_pos += 1;
            } else {
                sig.n_neg += 1;
            }
        }
        sig
    }

    /// Gram matrix `f(b_i, b_j)` of the given vectors, after checking that
    /// they are linearly independent at `tol`.
    pub fn restrict(&self, basis: &[Vec<f64>], tol: f64) -> Result<Self> {
        if let Some(b) = basis.iter().find(|b| b.len() != self.dim) {
            return Err(Error::Dimension {
                expected: self.dim,
                got: b.len(),
            });
        }
        if !basis.is_empty() {
            let gram = Self::from_fn(basis.len(), |i, j| linalg::dot(&basis[i], &basis[j]));
            let ev = gram.eigenvalues();
            if ev[0] <= tol * ev[ev.len() - 1] {
                return Err(Error::RankDeficient { tol });
            }
        }
        Ok(self.gram(basis))
    }

    /// Gram matrix without the independence check.
    pub fn gram(&self, vectors: &[Vec<f64>]) -> Self {
        let lowered: Vec<Vec<f64>> = vectors.iter().map(|v| self.lower(v)).collect();
        Self::from_fn(vectors.len(), |i, j| linalg::dot(&lowered[i], &vectors[j]))
    }

    pub fn is_definite(&self, sign: Sign, tol: f64) -> bool {
        let sig = self.signature(tol);
        match sign {
            Sign::Positive => sig.n_pos == self.dim,
            Sign::Negative => sig.n_neg == self.dim,
        }
    }

    /// `(n_neg == 0, n_zero)`
    pub fn psd_with_kernel_dim(&self, tol: f64) -> (bool, usize) {
        let sig = self.signature(tol);
        (sig.n_neg == 0, sig.n_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn form(rows: &[&[f64]]) -> SymmetricForm {
        SymmetricForm::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn signature_examples() {
        assert_eq!(form(&[&[6.0, 0.0], &[0.0, -2.0]]).signature(1e-9).counts(), (1, 1, 0));
        assert_eq!(SymmetricForm::zeros(3).signature(1e-9).counts(), (0, 0, 3));
        assert_eq!(form(&[&[0.0, -2.0], &[-2.0, 0.0]]).signature(1e-9).counts(), (1, 1, 0));
    }

    #[test]
    fn restrict_examples() {
        let f = form(&[&[2.0, 2.0], &[2.0, 0.0]]);
        let r = f.restrict(&[vec![1.0, -2.0]], 1e-9).unwrap();
        assert_eq!(r.get(0, 0), -6.0);
        let std = f.restrict(&[vec![1.0, 0.0], vec![0.0, 1.0]], 1e-9).unwrap();
        assert_eq!(std, f);
        let empty = f.restrict(&[], 1e-9).unwrap();
        assert_eq!(empty.dim(), 0);
        assert!(matches!(
            f.restrict(&[vec![1.0, 1.0], vec![2.0, 2.0]], 1e-9),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn definiteness_examples() {
        assert!(form(&[&[-6.0]]).is_definite(Sign::Negative, 1e-9));
        let mixed = form(&[&[6.0, 0.0], &[0.0, -2.0]]);
        assert!(!mixed.is_definite(Sign::Positive, 1e-9));
        assert!(!mixed.is_definite(Sign::Negative, 1e-9));
        assert!(SymmetricForm::zeros(0).is_definite(Sign::Negative, 1e-9));
        assert!(SymmetricForm::zeros(0).is_definite(Sign::Positive, 1e-9));
    }

    #[test]
    fn psd_kernel_examples() {
        assert_eq!(form(&[&[0.0, 0.0], &[0.0, 3.0]]).psd_with_kernel_dim(1e-9), (true, 1));
        assert_eq!(form(&[&[0.0, -2.0], &[-2.0, 0.0]]).psd_with_kernel_dim(1e-9), (false, 0));
        assert_eq!(SymmetricForm::zeros(1).psd_with_kernel_dim(1e-9), (true, 1));
    }

    #[test]
    fn asymmetric_rows_rejected() {
        let rows = vec![vec![1.0, 2.0], vec![2.5, 1.0]];
        assert!(SymmetricForm::from_rows(&rows).is_err());
    }

    #[test]
    fn lorentzian_determinant_sign() {
        let f = form(&[&[1.0, 0.3, 0.0], &[0.3, -2.0, 0.1], &[0.0, 0.1, 4.0]]);
        let sig = f.signature(1e-9);
        assert!(sig.is_lorentzian());
        assert!(f.determinant() < 0.0);
    }

    fn well_conditioned(d: usize, seed: Vec<f64>) -> Vec<Vec<f64>> {
        // identity plus a bounded perturbation keeps the condition number small
        (0..d)
            .map(|i| (0..d).map(|j| if i == j { 2.0 } else { 0.0 } + 0.5 * seed[i * d + j]).collect())
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn signature_is_congruence_invariant(
            diag in proptest::collection::vec(prop_oneof![-5.0..-0.5f64, 0.5..5.0f64, Just(0.0)], 3),
            pert in proptest::collection::vec(-1.0..1.0f64, 9),
        ) {
            let f = SymmetricForm::diagonal(&diag);
            let m = well_conditioned(3, pert);
            let mm = linalg::columns(&m);
            prop_assume!(linalg::condition_number(&mm) <= 1e3);
            let g = f.gram(&m);
            prop_assert_eq!(f.signature(1e-8).counts(), g.signature(1e-8).counts());
        }
    }
}
