//! Level-set geometry: radial charts over affine hyperplanes and the
//! centroaffine and Lorentzian metrics.
//!
//! A chart is an affine hyperplane `E = o + span(b_1..b_n)` missing the
//! origin. Chart coordinates `c` name the point `y(c) = o + Σ c_i b_i`, and
//! the hypersurface point over it is the radial projection `φ(c) = ψ(y(c))`.
//! Tangent charts take `o = p` on the level set and an orthonormal basis of
//! `ker dh_p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{Sign, SymmetricForm};
use crate::homcalc::{HomogeneousFunction, SharedFunction};
use crate::linalg;
use crate::par::{self, Exec};
use crate::sampling;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartKind {
    Tangent,
    Slice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricMethod {
    Pullback,
    PsiFormula,
    UFormula,
}

pub const METRIC_METHODS: [MetricMethod; 3] = [
    MetricMethod::Pullback,
    MetricMethod::PsiFormula,
    MetricMethod::UFormula,
];

#[derive(Debug, Clone)]
pub struct ChartFrame {
    h: SharedFunction,
    kind: ChartKind,
    p: Vec<f64>,
    normal: Vec<f64>,
    origin: Vec<f64>,
    basis: Vec<Vec<f64>>,
    center: Vec<f64>,
    plane_normal: Vec<f64>,
    basis_gram: SymmetricForm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartPoint {
    pub coords: Vec<f64>,
    pub ambient: Vec<f64>,
    pub hval: f64,
}

/// `x / h(x)^{1/k}`
pub fn radial_projection(h: &dyn HomogeneousFunction, x: &[f64]) -> Result<Vec<f64>> {
    if !h.contains(x) {
        return Err(Error::Domain { point: x.to_vec() });
    }
    let v = h.value(x)?;
    if v.is_nan() || v <= 0.0 {
        return Err(Error::NonPositive {
            point: x.to_vec(),
            value: v,
        });
    }
    Ok(linalg::scale(x, (-v.ln() / h.degree()).exp()))
}

/// `g_L = −(1/k) ∇²h_x`, checked to have exactly one negative direction.
pub fn lorentz_metric(h: &dyn HomogeneousFunction, x: &[f64], tol: f64) -> Result<SymmetricForm> {
    let v = h.value(x)?;
    if v <= 0.0 {
        return Err(Error::NonPositive {
            point: x.to_vec(),
            value: v,
        });
    }
    let gl = h.hessian(x)?.scaled(-1.0 / h.degree());
    if !gl.signature(tol).is_lorentzian() {
        return Err(Error::NotLorentzian {
            eigenvalues: gl.eigenvalues(),
        });
    }
    Ok(gl)
}

impl ChartFrame {
    /// Tangent chart of the component of `{h = 1}` through the ray of `seed`.
    pub fn make_chart(h: SharedFunction, seed: &[f64], tol: f64) -> Result<Self> {
        if seed.len() != h.dim() {
            return Err(Error::Dimension {
                expected: h.dim(),
                got: seed.len(),
            });
        }
        let p = radial_projection(h.as_ref(), seed)?;
        let normal = h.gradient(&p)?;
        let norm = linalg::norm(&normal);
        if norm <= tol {
            return Err(Error::DegenerateGradient { point: p, norm });
        }
        let basis = linalg::complement_basis(h.dim(), std::slice::from_ref(&normal));
        let n = basis.len();
        Ok(Self {
            plane_normal: linalg::scale(&normal, 1.0 / norm),
            basis_gram: SymmetricForm::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 }),
            origin: p.clone(),
            center: vec![0.0; n],
            kind: ChartKind::Tangent,
            p,
            normal,
            basis,
            h,
        })
    }

    /// Chart over an arbitrary affine hyperplane `origin + span(basis)` not
    /// through zero. `seed` is a chart coordinate inside the positive set; its
    /// radial projection becomes the base point.
    pub fn slice(h: SharedFunction, origin: &[f64], basis: Vec<Vec<f64>>, seed: &[f64]) -> Result<Self> {
        let dim = h.dim();
        if origin.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: origin.len(),
            });
        }
        if basis.len() + 1 != dim || seed.len() != basis.len() {
            return Err(Error::Dimension {
                expected: dim - 1,
                got: basis.len(),
            });
        }
        let basis_gram = SymmetricForm::from_fn(basis.len(), |i, j| linalg::dot(&basis[i], &basis[j]));
        let ev = basis_gram.eigenvalues();
        if ev.first().is_some_and(|lo| *lo <= 1e-12 * ev[ev.len() - 1]) {
            return Err(Error::RankDeficient { tol: 1e-12 });
        }
        let complement = linalg::complement_basis(dim, &basis);
        let plane_normal = complement
            .first()
            .cloned()
            .ok_or(Error::RankDeficient { tol: 1e-10 })?;
        if linalg::dot(&plane_normal, origin).abs() <= 1e-12 * linalg::norm(origin).max(1.0) {
            return Err(Error::pre("chart hyperplane passes through the origin"));
        }
        let y = linalg::add(origin, &linalg::combine(seed, &basis, dim));
        let p = radial_projection(h.as_ref(), &y)?;
        let normal = h.gradient(&p)?;
        Ok(Self {
            h,
            kind: ChartKind::Slice,
            p,
            normal,
            origin: origin.to_vec(),
            basis,
            center: seed.to_vec(),
            plane_normal,
            basis_gram,
        })
    }

    pub fn h(&self) -> &SharedFunction {
        &self.h
    }

    pub fn k(&self) -> f64 {
        self.h.degree()
    }

    /// Ambient dimension `n + 1`.
    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// Chart dimension `n`.
    pub fn n(&self) -> usize {
        self.basis.len()
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// Position vector at the base point; equals `p`.
    pub fn xi(&self) -> &[f64] {
        &self.p
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Chart coordinates of the point over `p`.
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// Unit normal of the chart hyperplane.
    pub fn plane_normal(&self) -> &[f64] {
        &self.plane_normal
    }

    pub fn ambient(&self, c: &[f64]) -> Vec<f64> {
        linalg::add(&self.origin, &linalg::combine(c, &self.basis, self.dim()))
    }

    /// Ambient image of a chart direction.
    pub fn push(&self, v: &[f64]) -> Vec<f64> {
        linalg::combine(v, &self.basis, self.dim())
    }

    /// Value of `h` on the chart, `h̄(c) = h(y(c))`.
    pub fn hbar(&self, c: &[f64]) -> Result<f64> {
        let y = self.ambient(c);
        if !self.h.contains(&y) {
            return Err(Error::Domain { point: y });
        }
        self.h.value(&y)
    }

    pub fn inside(&self, c: &[f64]) -> bool {
        matches!(self.hbar(c), Ok(v) if v > 0.0)
    }

    pub fn point(&self, c: &[f64]) -> Result<ChartPoint> {
        let ambient = self.ambient(c);
        let hval = self.hbar(c)?;
        Ok(ChartPoint {
            coords: c.to_vec(),
            ambient,
            hval,
        })
    }

    /// Chart coordinates of the hyperplane point on the ray through `x`, or
    /// `None` if the ray misses the hyperplane.
    pub fn locate(&self, x: &[f64]) -> Option<Vec<f64>> {
        let num = linalg::dot(&self.plane_normal, &self.origin);
        let den = linalg::dot(&self.plane_normal, x);
        if den == 0.0 || num / den <= 0.0 {
            return None;
        }
        let y = linalg::scale(x, num / den);
        self.coords_of(&y)
    }

    /// Coordinates of a point already on the hyperplane.
    pub fn coords_of(&self, y: &[f64]) -> Option<Vec<f64>> {
        let d = linalg::sub(y, &self.origin);
        let rhs: Vec<f64> = self.basis.iter().map(|b| linalg::dot(b, &d)).collect();
        linalg::solve(&self.basis_gram.to_matrix(), &rhs)
    }

    /// Hypersurface point over a chart coordinate, `φ(c) = ψ(y(c))`.
    pub fn embed(&self, c: &[f64]) -> Result<Vec<f64>> {
        radial_projection(self.h.as_ref(), &self.ambient(c))
    }

    fn positive_point(&self, c: &[f64]) -> Result<(Vec<f64>, f64)> {
        let y = self.ambient(c);
        if !self.h.contains(&y) {
            return Err(Error::Domain { point: y });
        }
        let v = self.h.value(&y)?;
        if v.is_nan() || v <= 0.0 {
            return Err(Error::NonPositive { point: y, value: v });
        }
        Ok((y, v))
    }

    /// Centroaffine metric in chart coordinates.
    pub fn chart_metric(&self, c: &[f64], method: MetricMethod) -> Result<SymmetricForm> {
        let (y, hv) = self.positive_point(c)?;
        let k = self.k();
        let hf = self.h.as_ref();
        match method {
            MetricMethod::Pullback => {
                let q = linalg::scale(&y, (-hv.ln() / k).exp());
                let dh = hf.gradient(&y)?;
                let m = (-hv.ln() / k).exp();
                let pushed: Vec<Vec<f64>> = self
                    .basis
                    .iter()
                    .map(|b| {
                        let s = linalg::dot(&dh, b) / (k * hv);
                        linalg::scale(&linalg::axpy(b, -s, &y), m)
                    })
                    .collect();
                Ok(hf.hessian(&q)?.gram(&pushed).scaled(-1.0 / k))
            }
            MetricMethod::PsiFormula => {
                let hess = hf.hessian(&y)?.gram(&self.basis);
                let dh = hf.gradient(&y)?;
                let db: Vec<f64> = self.basis.iter().map(|b| linalg::dot(&dh, b)).collect();
                let f = SymmetricForm::from_fn(self.n(), |i, j| {
                    -hess.get(i, j) / hv + (k - 1.0) / (k * hv * hv) * db[i] * db[j]
                });
                Ok(f.scaled(1.0 / k))
            }
            MetricMethod::UFormula => {
                // u = h^{1/k}
                let u = (hv.ln() / k).exp();
                let hess = hf.hessian(&y)?.gram(&self.basis);
                let dh = hf.gradient(&y)?;
                let db: Vec<f64> = self.basis.iter().map(|b| linalg::dot(&dh, b)).collect();
                let a = u / (k * hv);
                let b = a * (1.0 / k - 1.0) / hv;
                let d2u = SymmetricForm::from_fn(self.n(), |i, j| a * hess.get(i, j) + b * db[i] * db[j]);
                Ok(d2u.scaled(-1.0 / u))
            }
        }
    }

    /// Computes the metric by all three routes and fails if any two differ by
    /// more than `rel_tol` relative to the metric's scale.
    pub fn chart_metric_checked(&self, c: &[f64], rel_tol: f64) -> Result<SymmetricForm> {
        let forms: Vec<SymmetricForm> = METRIC_METHODS
            .iter()
            .map(|m| self.chart_metric(c, *m))
            .collect::<Result<_>>()?;
        let disc = metric_disagreement(&forms);
        if disc > rel_tol {
            return Err(Error::Inconsistent { discrepancy: disc });
        }
        Ok(forms.into_iter().nth(1).expect("three forms"))
    }

    /// Gram matrix of `−(1/k)∇²h_q` on an orthonormal basis of `T_q𝓗`, for
    /// `q` on the level set. Returns the form and the basis used.
    pub fn centroaffine_metric_ambient(&self, q: &[f64]) -> Result<(SymmetricForm, Vec<Vec<f64>>)> {
        let hv = self.h.value(q)?;
        if (hv - 1.0).abs() > 1e-10 {
            return Err(Error::pre(format!("point is not on the level set: h = {hv}")));
        }
        let dh = self.h.gradient(q)?;
        let norm = linalg::norm(&dh);
        if norm <= 1e-12 {
            return Err(Error::DegenerateGradient {
                point: q.to_vec(),
                norm,
            });
        }
        let basis = linalg::complement_basis(self.dim(), std::slice::from_ref(&dh));
        let g = self.h.hessian(q)?.gram(&basis).scaled(-1.0 / self.k());
        Ok((g, basis))
    }

    /// Distance in chart coordinates from `c` along the unit direction `dir`
    /// to the first point where `h̄` stops being positive, or `None` if it
    /// stays positive up to `max_radius`.
    pub fn ray_exit(&self, c: &[f64], dir: &[f64], max_radius: f64) -> Result<Option<f64>> {
        let y = self.ambient(c);
        let v = self.push(dir);
        if let Some(poly) = self.h.as_polynomial() {
            let line = poly.restrict_to_line(&y, &v)?;
            let first = line.real_roots().into_iter().find(|t| *t > 0.0);
            return Ok(first.filter(|t| *t <= max_radius));
        }
        let pos = |t: f64| {
            let x = linalg::axpy(&y, t, &v);
            self.h.contains(&x) && self.h.value(&x).is_ok_and(|hv| hv > 0.0)
        };
        if !pos(0.0) {
            return Err(Error::NonPositive {
                point: y.clone(),
                value: self.h.value(&y).unwrap_or(f64::NAN),
            });
        }
        let mut lo = 0.0;
        let mut hi = 1e-3 * (1.0 + linalg::norm(c));
        while pos(hi) {
            lo = hi;
            hi *= 2.0;
            if lo > max_radius {
                return Ok(None);
            }
        }
        Ok(Some(bisect_exit(&pos, lo, hi)))
    }

    /// Smallest exit distance over a fixed set of directions.
    pub fn boundary_distance(&self, c: &[f64]) -> Result<f64> {
        let n = self.n();
        let count = if n == 1 { 2 } else { 16 * n };
        let mut best = f64::INFINITY;
        for d in sampling::directions(n, count) {
            if let Some(t) = self.ray_exit(c, &d, 1e6)? {
                best = best.min(t);
            }
        }
        Ok(best)
    }

    /// Metric signature class at sampled chart points. Points lie on a
    /// deterministic low-discrepancy pattern inside the positive set.
    pub fn classify(&self, sample_size: usize, tol: f64, exec: Exec) -> Result<Classification> {
        let n = self.n();
        let dirs = sampling::directions(n, sample_size.max(1));
        let samples = par::try_map_indexed(exec, sample_size, |i| {
            let frac = 0.95 * sampling::halton(i, 1)[0];
            let reach = self.ray_exit(&self.center, &dirs[i], 1e3)?.unwrap_or(1e3);
            let c = linalg::axpy(&self.center, frac * reach, &dirs[i]);
            let g = self.chart_metric(&c, MetricMethod::PsiFormula)?;
            let ev = g.eigenvalues();
            let class = if g.is_definite(Sign::Positive, tol) {
                MetricClass::Hyperbolic
            } else if g.is_definite(Sign::Negative, tol) {
                MetricClass::Elliptic
            } else {
                MetricClass::Indefinite
            };
            Ok::<_, Error>(ClassSample {
                coords: c,
                class,
                min_eigenvalue: ev.first().copied().unwrap_or(0.0),
                max_eigenvalue: ev.last().copied().unwrap_or(0.0),
            })
        })?;
        let first = samples.first().map(|s| s.class).unwrap_or(MetricClass::Indefinite);
        let unanimous = samples.iter().all(|s| s.class == first);
        let aggregate = if unanimous { first } else { MetricClass::Indefinite };
        let witnesses = if unanimous {
            Vec::new()
        } else {
            samples
                .iter()
                .filter(|s| s.class != MetricClass::Hyperbolic)
                .take(5)
                .cloned()
                .collect()
        };
        Ok(Classification {
            aggregate,
            samples,
            witnesses,
        })
    }

    /// Compares `g_L` at `x` with the metric cone `−ds² + s² ĝ` over the
    /// level set. Here `s = (2/k)√((k−1) h)` is the `g_L`-length of the
    /// rescaled position field `(2/k)ξ`, and the cross-section metric is
    /// `ĝ = k²/(4(k−1)) · g`; for `k = 2` this is `−ds² + s²g` with `x = s p`.
    /// The frame is `∂_s` and `∂_{c_i}` of `(s, c) ↦ λ(s) φ(c)`, with `∂_iφ`
    /// by central differences. Returns the max entry difference relative to
    /// `max(1, scale)`.
    pub fn cone_identity_residual(&self, x: &[f64], fd_step: f64) -> Result<f64> {
        self.cone_identity_residual_with(x, fd_step, |c| self.chart_metric(c, MetricMethod::PsiFormula))
    }

    /// Same as [`cone_identity_residual`](Self::cone_identity_residual) with a
    /// caller-supplied chart metric.
    pub fn cone_identity_residual_with(
        &self,
        x: &[f64],
        fd_step: f64,
        metric: impl Fn(&[f64]) -> Result<SymmetricForm>,
    ) -> Result<f64> {
        let k = self.k();
        let hv = self.h.value(x)?;
        if hv <= 0.0 {
            return Err(Error::NonPositive {
                point: x.to_vec(),
                value: hv,
            });
        }
        let lambda = (hv.ln() / k).exp();
        let s = cone_parameter(k, hv);
        let c = self
            .locate(x)
            .ok_or_else(|| Error::pre("ray through the point misses the chart hyperplane"))?;
        let q = self.embed(&c)?;
        let mut vectors = vec![linalg::scale(&q, 2.0 * lambda / (k * s))];
        for i in 0..self.n() {
            let mut cp = c.clone();
            let mut cm = c.clone();
            cp[i] += fd_step;
            cm[i] -= fd_step;
            let d = linalg::sub(&self.embed(&cp)?, &self.embed(&cm)?);
            vectors.push(linalg::scale(&d, lambda / (2.0 * fd_step)));
        }
        let gl = self.h.hessian(x)?.scaled(-1.0 / k).gram(&vectors);
        let g = metric(&c)?;
        let n = self.n();
        let w = s * s * cone_section_factor(k);
        let cone = SymmetricForm::from_fn(n + 1, |i, j| match (i, j) {
            (0, 0) => -1.0,
            (0, _) | (_, 0) => 0.0,
            _ => w * g.get(i - 1, j - 1),
        });
        Ok(gl.max_abs_diff(&cone) / cone.scale().max(1.0))
    }
}

/// Cone coordinate `s = (2/k)√((k−1)h)`, the `g_L`-length of `(2/k)ξ`.
pub fn cone_parameter(k: f64, hval: f64) -> f64 {
    2.0 / k * ((k - 1.0) * hval).sqrt()
}

/// Ratio `k²/(4(k−1))` between the cone cross-section metric and `g`.
pub fn cone_section_factor(k: f64) -> f64 {
    k * k / (4.0 * (k - 1.0))
}

fn bisect_exit(pos: &impl Fn(f64) -> bool, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..80 {
        if hi - lo <= 1e-15 * hi.abs() {
            break;
        }
        let m = 0.5 * (lo + hi);
        if pos(m) {
            lo = m;
        } else {
            hi = m;
        }
    }
    lo
}

/// Largest pairwise entry difference among the forms, relative to
/// `max(1, scale)` of the first.
pub fn metric_disagreement(forms: &[SymmetricForm]) -> f64 {
    let scale = forms.first().map(|f| f.scale()).unwrap_or(0.0).max(1.0);
    let mut worst = 0.0_f64;
    for (i, a) in forms.iter().enumerate() {
        for b in &forms[i + 1..] {
            worst = worst.max(a.max_abs_diff(b));
        }
    }
    worst / scale
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricClass {
    Elliptic,
    Hyperbolic,
    Indefinite,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassSample {
    pub coords: Vec<f64>,
    pub class: MetricClass,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub aggregate: MetricClass,
    #[serde(skip)]
    pub samples: Vec<ClassSample>,
    pub witnesses: Vec<ClassSample>,
}
