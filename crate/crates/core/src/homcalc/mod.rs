//! Homogeneous functions: exact polynomials and closed-form smooth maps.

mod polynomial;
mod univariate;

use std::fmt;
use std::sync::Arc;

pub use polynomial::{Exponents, HomogeneousPolynomial, PolyJson, TermJson};
pub use univariate::UPoly;

use crate::error::{Error, Result};
use crate::forms::SymmetricForm;
use crate::linalg;

/// A function with `h(λx) = λ^k h(x)` on an open cone, together with its
/// first three derivatives.
pub trait HomogeneousFunction: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    /// Homogeneity degree `k`.
    fn degree(&self) -> f64;
    /// Membership in the open domain cone; polynomials are defined everywhere.
    fn contains(&self, _x: &[f64]) -> bool {
        true
    }
    fn value(&self, x: &[f64]) -> Result<f64>;
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn hessian(&self, x: &[f64]) -> Result<SymmetricForm>;
    fn third(&self, x: &[f64]) -> Result<SymTensor3>;
    fn as_polynomial(&self) -> Option<&HomogeneousPolynomial> {
        None
    }
    fn describe(&self) -> String {
        match self.as_polynomial() {
            Some(p) => p.to_string(),
            None => format!("{self:?}"),
        }
    }
}

pub type SharedFunction = Arc<dyn HomogeneousFunction>;

/// Totally symmetric 3-tensor stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor3 {
    dim: usize,
    data: Vec<f64>,
}

impl SymTensor3 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    /// Fills from `f(i, j, l)` evaluated once per sorted triple `i <= j <= l`,
    /// in lexicographic order.
    pub fn from_upper(dim: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                for l in j..dim {
                    let v = f(i, j, l);
                    for (a, b, c) in [(i, j, l), (i, l, j), (j, i, l), (j, l, i), (l, i, j), (l, j, i)] {
                        t.data[(a * dim + b) * dim + c] = v;
                    }
                }
            }
        }
        t
    }

    /// Builds from an arbitrary function and symmetrizes over the six
    /// permutations.
    pub fn symmetrized(dim: usize, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        Self::from_upper(dim, |i, j, l| {
            (f(i, j, l) + f(i, l, j) + f(j, i, l) + f(j, l, i) + f(l, i, j) + f(l, j, i)) / 6.0
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, l: usize) -> f64 {
        self.data[(i * self.dim + j) * self.dim + l]
    }

    pub fn apply(&self, u: &[f64], v: &[f64], w: &[f64]) -> f64 {
        let d = self.dim;
        let mut s = 0.0;
        for i in 0..d {
            if u[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                if v[j] == 0.0 {
                    continue;
                }
                let base = (i * d + j) * d;
                let mut inner = 0.0;
                for l in 0..d {
                    inner += self.data[base + l] * w[l];
                }
                s += u[i] * v[j] * inner;
            }
        }
        s
    }

    /// The bilinear form `T(u, ., .)`.
    pub fn contract(&self, u: &[f64]) -> SymmetricForm {
        let d = self.dim;
        SymmetricForm::from_fn(d, |j, l| (0..d).map(|i| u[i] * self.get(i, j, l)).sum())
    }

    /// The covector `T(u, v, .)`.
    pub fn contract2(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|l| {
                let mut s = 0.0;
                for i in 0..d {
                    for j in 0..d {
                        s += u[i] * v[j] * self.get(i, j, l);
                    }
                }
                s
            })
            .collect()
    }

    /// Components `T(b_i, b_j, b_l)` in the given vectors.
    pub fn gram(&self, vectors: &[Vec<f64>]) -> Self {
        Self::from_upper(vectors.len(), |i, j, l| self.apply(&vectors[i], &vectors[j], &vectors[l]))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.data)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// `⟨x, ∇h(x)⟩ − k h(x)`
pub fn euler_residual(h: &dyn HomogeneousFunction, x: &[f64]) -> Result<f64> {
    let g = h.gradient(x)?;
    Ok(linalg::dot(x, &g) - h.degree() * h.value(x)?)
}

/// Max-norm of `∇²h_x(x, .) − (k−1) dh_x`.
pub fn position_identity_residual(h: &dyn HomogeneousFunction, x: &[f64]) -> Result<f64> {
    let hx = h.hessian(x)?.lower(x);
    let g = h.gradient(x)?;
    let k = h.degree();
    Ok(hx
        .iter()
        .zip(&g)
        .fold(0.0_f64, |m, (a, b)| m.max((a - (k - 1.0) * b).abs())))
}

/// `t ↦ h(x + t v)`, exact for polynomials.
#[derive(Debug, Clone)]
pub enum UnivariateRestriction {
    Polynomial {
        base: Vec<f64>,
        dir: Vec<f64>,
        poly: UPoly,
    },
    Sampled {
        base: Vec<f64>,
        dir: Vec<f64>,
        h: SharedFunction,
    },
}

impl UnivariateRestriction {
    pub fn base(&self) -> &[f64] {
        match self {
            Self::Polynomial { base, .. } | Self::Sampled { base, .. } => base,
        }
    }

    pub fn dir(&self) -> &[f64] {
        match self {
            Self::Polynomial { dir, .. } | Self::Sampled { dir, .. } => dir,
        }
    }

    fn point(&self, t: f64) -> Vec<f64> {
        linalg::axpy(self.base(), t, self.dir())
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        match self {
            Self::Polynomial { poly, .. } => Ok(poly.eval(t)),
            Self::Sampled { h, .. } => h.value(&self.point(t)),
        }
    }

    pub fn d1(&self, t: f64) -> Result<f64> {
        match self {
            Self::Polynomial { poly, .. } => Ok(poly.derivative().eval(t)),
            Self::Sampled { h, dir, .. } => Ok(linalg::dot(&h.gradient(&self.point(t))?, dir)),
        }
    }

    pub fn d2(&self, t: f64) -> Result<f64> {
        match self {
            Self::Polynomial { poly, .. } => Ok(poly.derivative().derivative().eval(t)),
            Self::Sampled { h, dir, .. } => Ok(h.hessian(&self.point(t))?.apply(dir, dir)),
        }
    }

    pub fn polynomial(&self) -> Option<&UPoly> {
        match self {
            Self::Polynomial { poly, .. } => Some(poly),
            Self::Sampled { .. } => None,
        }
    }
}

pub fn restrict_to_line(h: &SharedFunction, x: &[f64], v: &[f64]) -> Result<UnivariateRestriction> {
    if v.iter().all(|c| *c == 0.0) {
        return Err(Error::pre("line direction must be nonzero"));
    }
    match h.as_polynomial() {
        Some(p) => Ok(UnivariateRestriction::Polynomial {
            base: x.to_vec(),
            dir: v.to_vec(),
            poly: p.restrict_to_line(x, v)?,
        }),
        None => {
            if x.len() != h.dim() || v.len() != h.dim() {
                return Err(Error::Dimension {
                    expected: h.dim(),
                    got: x.len().min(v.len()),
                });
            }
            Ok(UnivariateRestriction::Sampled {
                base: x.to_vec(),
                dir: v.to_vec(),
                h: h.clone(),
            })
        }
    }
}

/// `x ↦ h(Ax)`, with `A` given by its columns.
#[derive(Debug, Clone)]
pub struct LinearPullback {
    base: SharedFunction,
    columns: Vec<Vec<f64>>,
}

impl LinearPullback {
    pub fn new(base: SharedFunction, columns: Vec<Vec<f64>>) -> Result<Self> {
        let dim = base.dim();
        if columns.len() != dim || columns.iter().any(|c| c.len() != dim) {
            return Err(Error::Dimension {
                expected: dim,
                got: columns.len(),
            });
        }
        Ok(Self { base, columns })
    }

    fn map(&self, x: &[f64]) -> Vec<f64> {
        linalg::combine(x, &self.columns, self.base.dim())
    }
}

impl HomogeneousFunction for LinearPullback {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn degree(&self) -> f64 {
        self.base.degree()
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.base.contains(&self.map(x))
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.base.value(&self.map(x))
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let g = self.base.gradient(&self.map(x))?;
        Ok(self.columns.iter().map(|c| linalg::dot(&g, c)).collect())
    }

    fn hessian(&self, x: &[f64]) -> Result<SymmetricForm> {
        Ok(self.base.hessian(&self.map(x))?.gram(&self.columns))
    }

    fn third(&self, x: &[f64]) -> Result<SymTensor3> {
        Ok(self.base.third(&self.map(x))?.gram(&self.columns))
    }
}

/// `h∘A`. Polynomials are expanded exactly so that evaluation near a
/// column of `A` does not cancel; other functions are wrapped.
pub fn pullback(h: &SharedFunction, columns: &[Vec<f64>]) -> Result<SharedFunction> {
    match h.as_polynomial() {
        Some(p) => Ok(Arc::new(p.linear_substitute(columns)?)),
        None => Ok(Arc::new(LinearPullback::new(h.clone(), columns.to_vec())?)),
    }
}

/// Largest relative violation of `∇^ℓ h(λx) = λ^{k−ℓ} ∇^ℓ h(x)` for
/// ℓ = 0..3.
pub fn homogeneity_defect(h: &dyn HomogeneousFunction, x: &[f64], lambda: f64) -> Result<f64> {
    let k = h.degree();
    let y = linalg::scale(x, lambda);
    let rel = |a: f64, b: f64, s: f64| (a - b).abs() / s.max(f64::MIN_POSITIVE);
    let mut worst = 0.0_f64;

    let (v0, v1) = (h.value(x)?, h.value(&y)?);
    worst = worst.max(rel(v1, lambda.powf(k) * v0, v0.abs() * lambda.powf(k)));

    let (g0, g1) = (h.gradient(x)?, h.gradient(&y)?);
    let f = lambda.powf(k - 1.0);
    let s = linalg::max_abs(&g0) * f;
    for (a, b) in g1.iter().zip(&g0) {
        worst = worst.max(rel(*a, f * b, s));
    }

    let (h0, h1) = (h.hessian(x)?, h.hessian(&y)?);
    let f = lambda.powf(k - 2.0);
    worst = worst.max(h1.max_abs_diff(&h0.scaled(f)) / (h0.scale() * f).max(f64::MIN_POSITIVE));

    let (t0, t1) = (h.third(x)?, h.third(&y)?);
    let f = lambda.powf(k - 3.0);
    let s = t0.max_abs() * f;
    if s > 0.0 {
        worst = worst.max(t1.max_abs_diff(&t0.scaled(f)) / s);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_examples() {
        let h = HomogeneousPolynomial::parse("x^3 - x*y^2").unwrap();
        assert_eq!(euler_residual(&h, &[2.0, 1.0]).unwrap(), 0.0);
        let g = HomogeneousPolynomial::parse("x^2*y").unwrap();
        assert_eq!(position_identity_residual(&g, &[1.0, 1.0]).unwrap(), 0.0);
        let q = HomogeneousPolynomial::parse("x^2 - 3*x*y + 0.5*y^2").unwrap();
        assert_eq!(position_identity_residual(&q, &[0.3, -1.7]).unwrap(), 0.0);
    }

    #[test]
    fn corrupted_table_breaks_euler() {
        // same monomials but a degree-2 part smuggled in through a wrong
        // homogeneity claim
        #[derive(Debug)]
        struct Liar(HomogeneousPolynomial);
        impl HomogeneousFunction for Liar {
            fn dim(&self) -> usize {
                2
            }
            fn degree(&self) -> f64 {
                3.0
            }
            fn value(&self, x: &[f64]) -> Result<f64> {
                Ok(self.0.eval(x) + 0.1 * x[0] * x[0])
            }
            fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
                self.0.gradient(x)
            }
            fn hessian(&self, x: &[f64]) -> Result<SymmetricForm> {
                self.0.hessian(x)
            }
            fn third(&self, x: &[f64]) -> Result<SymTensor3> {
                self.0.third(x)
            }
        }
        let l = Liar(HomogeneousPolynomial::parse("x^3 - x*y^2").unwrap());
        assert!(euler_residual(&l, &[2.0, 1.0]).unwrap().abs() > 0.1);
    }

    #[test]
    fn sampled_restriction_matches() {
        let h: SharedFunction = Arc::new(HomogeneousPolynomial::parse("x^2*y + y^3").unwrap());
        let r = restrict_to_line(&h, &[1.0, 1.0], &[1.0, -2.0]).unwrap();
        let p = h.as_polynomial().unwrap().restrict_to_line(&[1.0, 1.0], &[1.0, -2.0]).unwrap();
        let s = UnivariateRestriction::Sampled {
            base: vec![1.0, 1.0],
            dir: vec![1.0, -2.0],
            h: h.clone(),
        };
        for t in [-0.7, 0.0, 0.3, 1.1] {
            assert!((r.value(t).unwrap() - p.eval(t)).abs() < 1e-12);
            assert!((s.d1(t).unwrap() - r.d1(t).unwrap()).abs() < 1e-12);
            assert!((s.d2(t).unwrap() - r.d2(t).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn tensor_symmetry() {
        let t = SymTensor3::symmetrized(3, |i, j, l| (i * 9 + j * 3 + l) as f64);
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    assert_eq!(t.get(i, j, l), t.get(l, i, j));
                    assert_eq!(t.get(i, j, l), t.get(j, i, l));
                }
            }
        }
    }
}
