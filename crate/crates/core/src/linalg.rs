//! Dense vector helpers for the small dimensions this crate works in.

use nalgebra::{DMatrix, DVector};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `a + s * b`
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

/// Linear combination `sum_i c_i v_i` of equally sized vectors.
pub fn combine(coeffs: &[f64], vectors: &[Vec<f64>], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (c, v) in coeffs.iter().zip(vectors) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    out
}

pub fn unit(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    scale(a, 1.0 / n)
}

pub fn basis_vector(dim: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[i] = 1.0;
    e
}

/// Matrix with the given vectors as columns.
pub fn columns(cols: &[Vec<f64>]) -> DMatrix<f64> {
    let rows = cols.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// Solves `m x = rhs`; `None` when singular.
pub fn solve(m: &DMatrix<f64>, rhs: &[f64]) -> Option<Vec<f64>> {
    let b = DVector::from_column_slice(rhs);
    m.clone().lu().solve(&b).map(|x| x.iter().copied().collect())
}

/// 2-norm condition number via singular values.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().fold(0.0_f64, |a, &b| a.max(b));
    let min = sv.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Orthonormal basis of the orthogonal complement of `against` (which need
/// not be orthonormal), built by Gram-Schmidt over the standard basis in
/// index order. Deterministic; returns exactly `dim - rank(against)` vectors.
pub fn complement_basis(dim: usize, against: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    for a in against {
        if let Some(v) = orthogonalize(a, &ortho, 1e-10) {
            ortho.push(v);
        }
    }
    let rank = ortho.len();
    let mut out = Vec::with_capacity(dim - rank);
    for i in 0..dim {
        if out.len() == dim - rank {
            break;
        }
        if let Some(v) = orthogonalize(&basis_vector(dim, i), &ortho, 1e-6) {
            ortho.push(v.clone());
            out.push(v);
        }
    }
    out
}

/// Removes the components along the orthonormal set `ortho` (twice, for
/// stability) and normalizes; `None` if the residual norm is below `min_norm`
/// relative to the input.
fn orthogonalize(v: &[f64], ortho: &[Vec<f64>], min_norm: f64) -> Option<Vec<f64>> {
    let n0 = norm(v);
    if n0 == 0.0 {
        return None;
    }
    let mut w = v.to_vec();
    for _ in 0..2 {
        for q in ortho {
            let c = dot(&w, q);
            w = axpy(&w, -c, q);
        }
    }
    let n = norm(&w);
    (n > min_norm * n0).then(|| scale(&w, 1.0 / n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_of_gradient() {
        let b = complement_basis(2, &[vec![3.0, 0.0]]);
        assert_eq!(b, vec![vec![0.0, 1.0]]);
        let b = complement_basis(2, &[vec![2.0, 1.0]]);
        let expected = unit(&[1.0, -2.0]);
        assert!((b[0][0] - expected[0]).abs() < 1e-15 && (b[0][1] - expected[1]).abs() < 1e-15);
    }

    #[test]
    fn complement_is_orthonormal() {
        let g = vec![0.3, -1.2, 0.7, 2.0];
        let b = complement_basis(4, std::slice::from_ref(&g));
        assert_eq!(b.len(), 3);
        for (i, u) in b.iter().enumerate() {
            assert!(dot(u, &g).abs() < 1e-14);
            for (j, v) in b.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(u, v) - want).abs() < 1e-14);
            }
        }
    }
}
