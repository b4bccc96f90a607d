//! Boundary of the cone: locating boundary rays, regularity of the boundary,
//! the Lorentzian extension across it, the compactness comparison, and the
//! regularizing perturbation.

use serde::Serialize;

use crate::chart::{ChartFrame, ChartKind, MetricMethod};
use crate::error::{Error, Result};
use crate::forms::{Sign, SymmetricForm};
use crate::homcalc::{HomogeneousPolynomial, SharedFunction};
use crate::linalg;
use crate::par::{self, Exec};
use crate::sampling;

/// Rays further out than this multiple of `|p|` count as unbounded.
pub const UNBOUNDED_RADIUS: f64 = 1e6;

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryPoint {
    /// Boundary point normalized to unit Euclidean length.
    pub point: Vec<f64>,
    /// Where the ray leaves the positive set, on the chart hyperplane.
    pub chart_point: Vec<f64>,
    pub ray_origin: Vec<f64>,
    pub direction: Vec<f64>,
    pub distance: f64,
    /// `h` at the normalized point, when defined there.
    pub hval: Option<f64>,
    pub gradient: Option<Vec<f64>>,
}

/// Two rays for a planar curve, where only two directions exist.
pub fn default_direction_count(n: usize) -> usize {
    if n == 1 {
        2
    } else if n <= 3 {
        500
    } else {
        5000
    }
}

/// Locates the first boundary crossing along each chart ray from the chart
/// centre. Fails with a closedness witness on the first unbounded ray.
pub fn boundary_scan(frame: &ChartFrame, directions: &[Vec<f64>], exec: Exec) -> Result<Vec<BoundaryPoint>> {
    if directions.iter().any(|d| d.len() != frame.n() || linalg::norm(d) == 0.0) {
        return Err(Error::pre("scan directions must be nonzero chart vectors"));
    }
    let c0 = frame.center().to_vec();
    let radius = UNBOUNDED_RADIUS * linalg::norm(frame.p()).max(1.0);
    par::try_map_indexed(exec, directions.len(), |i| {
        let d = linalg::unit(&directions[i]);
        match frame.ray_exit(&c0, &d, radius)? {
            None => Err(Error::ClosednessFailure {
                base: frame.ambient(&c0),
                direction: frame.push(&d),
            }),
            Some(t) => {
                let coords = linalg::axpy(&c0, t, &d);
                let y = frame.ambient(&coords);
                let x = linalg::unit(&y);
                let h = frame.h();
                let defined = h.contains(&x);
                Ok(BoundaryPoint {
                    hval: if defined { h.value(&x).ok() } else { None },
                    gradient: if defined { h.gradient(&x).ok() } else { None },
                    point: x,
                    chart_point: coords,
                    ray_origin: c0.clone(),
                    direction: d,
                    distance: t,
                })
            }
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionTwo {
    /// `β = −∇²h` positive definite on `T∂B`.
    pub definite: bool,
    pub min_eigenvalue: Option<f64>,
    /// `β` on all of `ker dh_x`: semidefinite with this kernel dimension.
    pub psd: bool,
    pub kernel_dim: usize,
    /// `max |β(ξ, ·)|` on `ξ` and `T∂B`, which should vanish at a boundary point.
    pub xi_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LorentzExtension {
    pub determinant: f64,
    pub n_pos: usize,
    pub n_neg: usize,
    pub n_zero: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularityEntry {
    pub point: Vec<f64>,
    pub gradient_norm: Option<f64>,
    pub condition_i: bool,
    pub condition_ii: Option<ConditionTwo>,
    pub lorentz: Option<LorentzExtension>,
}

impl RegularityEntry {
    pub fn regular(&self) -> bool {
        self.condition_i && self.condition_ii.as_ref().is_some_and(|c| c.definite)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    pub points: usize,
    pub condition_i_failures: usize,
    pub condition_ii_failures: usize,
    pub aggregate: bool,
    /// Indices of failing points, at most ten.
    pub failing: Vec<usize>,
    pub entries: Vec<RegularityEntry>,
}

/// `T_x∂B = ker dh_x ∩ span(chart directions)`, as ambient vectors.
fn boundary_tangent(frame: &ChartFrame, grad: &[f64]) -> Vec<Vec<f64>> {
    let n = frame.n();
    let row: Vec<f64> = frame.basis().iter().map(|b| linalg::dot(grad, b)).collect();
    linalg::complement_basis(n, &[row])
        .into_iter()
        .map(|a| frame.push(&a))
        .collect()
}

/// Conditions (i) `dh ≠ 0` and (ii) `β = −∇²h > 0` on `T∂B` at one boundary
/// point, plus the Lorentzian extension test when (i) holds.
pub fn regular_boundary_check(frame: &ChartFrame, bp: &BoundaryPoint, tol: f64) -> RegularityEntry {
    let h = frame.h();
    let x = &bp.point;
    let Some(grad) = bp.gradient.clone() else {
        return RegularityEntry {
            point: x.clone(),
            gradient_norm: None,
            condition_i: false,
            condition_ii: None,
            lorentz: None,
        };
    };
    let gnorm = linalg::norm(&grad);
    let condition_i = gnorm > tol;
    if !condition_i {
        return RegularityEntry {
            point: x.clone(),
            gradient_norm: Some(gnorm),
            condition_i,
            condition_ii: None,
            lorentz: None,
        };
    }
    let Ok(hess) = h.hessian(x) else {
        return RegularityEntry {
            point: x.clone(),
            gradient_norm: Some(gnorm),
            condition_i,
            condition_ii: None,
            lorentz: None,
        };
    };
    let beta = hess.scaled(-1.0);
    let tb = boundary_tangent(frame, &grad);
    let restricted = beta.gram(&tb);
    let ev = restricted.eigenvalues();
    let definite = restricted.is_definite(Sign::Positive, tol);
    let kernel = linalg::complement_basis(frame.dim(), std::slice::from_ref(&grad));
    let (psd, kernel_dim) = beta.gram(&kernel).psd_with_kernel_dim(tol);
    let mut xi_defect = beta.apply(x, x).abs();
    for e in &tb {
        xi_defect = xi_defect.max(beta.apply(x, e).abs());
    }
    let lorentz = lorentz_extension_check(&beta, x, &grad, &tb, tol);
    RegularityEntry {
        point: x.clone(),
        gradient_norm: Some(gnorm),
        condition_i,
        condition_ii: Some(ConditionTwo {
            definite,
            min_eigenvalue: ev.first().copied(),
            psd,
            kernel_dim,
            xi_defect,
        }),
        lorentz: Some(lorentz),
    }
}

/// Gram matrix of `β` in the adapted basis `(η, ξ, e_3..)` with `η = ∇h`;
/// a Lorentzian extension has negative determinant and one negative
/// direction.
pub fn lorentz_extension_check(
    beta: &SymmetricForm,
    xi: &[f64],
    eta: &[f64],
    tangent: &[Vec<f64>],
    tol: f64,
) -> LorentzExtension {
    let mut basis = vec![eta.to_vec(), xi.to_vec()];
    basis.extend(tangent.iter().cloned());
    let gram = beta.gram(&basis);
    let det = gram.determinant();
    let sig = gram.signature(tol);
    LorentzExtension {
        determinant: det,
        n_pos: sig.n_pos,
        n_neg: sig.n_neg,
        n_zero: sig.n_zero,
        pass: det < 0.0 && sig.is_lorentzian(),
    }
}

pub fn regularity_report(frame: &ChartFrame, points: &[BoundaryPoint], tol: f64, exec: Exec) -> RegularityReport {
    let entries = par::map_indexed(exec, points.len(), |i| regular_boundary_check(frame, &points[i], tol));
    let ci = entries.iter().filter(|e| !e.condition_i).count();
    let cii = entries
        .iter()
        .filter(|e| e.condition_i && !e.condition_ii.as_ref().is_some_and(|c| c.definite))
        .count();
    let failing = entries
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.regular())
        .map(|(i, _)| i)
        .take(10)
        .collect();
    RegularityReport {
        points: entries.len(),
        condition_i_failures: ci,
        condition_ii_failures: cii,
        aggregate: !entries.is_empty() && ci == 0 && cii == 0,
        failing,
        entries,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompactnessBound {
    pub delta: f64,
    pub epsilon: f64,
    /// Every chart point of `B` lies within this distance of the centre.
    pub radius_bound: f64,
    pub verified_points: usize,
    /// `min (v − u)` over the verification sample.
    pub min_margin: f64,
    pub halvings: usize,
}

fn comparison(eps: f64, delta: f64, r: f64) -> f64 {
    if r <= delta {
        1.0 - 0.5 * eps * r * r
    } else {
        1.0 + 0.5 * eps * delta * delta - eps * delta * r
    }
}

/// Builds the comparison function `v ≥ u = h̄^{1/k}` from a Hessian bound
/// `∇²u ≤ −ε` on `B_δ(p)`, verifies it at `samples` points of `B`, and
/// returns the outer radius of `{v ≥ 0}`.
pub fn compactness_bound(frame: &ChartFrame, samples: usize, exec: Exec) -> Result<CompactnessBound> {
    if frame.kind() != ChartKind::Tangent {
        return Err(Error::pre("compactness bound needs a tangent chart"));
    }
    let n = frame.n();
    let k = frame.k();
    let c0 = frame.center().to_vec();
    let dist = frame.boundary_distance(&c0)?;
    if !dist.is_finite() {
        return Err(Error::pre("chart domain is unbounded"));
    }
    let delta = 0.5 * dist;

    let dirs = sampling::directions(n, if n == 1 { 2 } else { 64 });
    let u_hess_max = |c: &[f64]| -> Result<f64> {
        let u = (frame.hbar(c)?.ln() / k).exp();
        let g = frame.chart_metric(c, MetricMethod::UFormula)?;
        Ok(-u * g.eigenvalues()[0])
    };
    let mut worst = u_hess_max(&c0)?;
    for d in &dirs {
        for j in 1..=8 {
            let c = linalg::axpy(&c0, delta * j as f64 / 8.0, d);
            worst = worst.max(u_hess_max(&c)?);
        }
    }
    if !(worst < 0.0) {
        return Err(Error::pre(format!(
            "u is not uniformly concave near the base point (max Hessian eigenvalue {worst})"
        )));
    }
    let mut eps = -0.99 * worst;

    let vdirs = sampling::directions(n, samples.max(2));
    let checks = par::try_map_indexed(exec, samples, |i| {
        let d = &vdirs[i];
        let reach = frame.ray_exit(&c0, d, 1e6)?.unwrap_or(1e6);
        let r = reach * (1.0 - 1e-3) * sampling::halton(i, 1)[0].sqrt();
        let c = linalg::axpy(&c0, r, d);
        let u = (frame.hbar(&c)?.ln() / k).exp();
        Ok::<_, Error>((r, u))
    })?;
    for halvings in 0..30 {
        let min_margin = checks
            .iter()
            .map(|(r, u)| comparison(eps, delta, *r) - u)
            .fold(f64::INFINITY, f64::min);
        if min_margin >= 0.0 {
            return Ok(CompactnessBound {
                delta,
                epsilon: eps,
                radius_bound: (1.0 + 0.5 * eps * delta * delta) / (eps * delta),
                verified_points: checks.len(),
                min_margin,
                halvings,
            });
        }
        eps *= 0.5;
    }
    Err(Error::pre("comparison function could not be verified"))
}

#[derive(Debug, Clone)]
pub struct Perturbation {
    pub h_eps: HomogeneousPolynomial,
    pub frame: ChartFrame,
    /// Coefficients of the linear form `ℓ` with `ℓ = 1` on the chart plane.
    pub linear_form: Vec<f64>,
    pub eps: f64,
}

/// `h_ε = h − ε ℓ^k`, where `ℓ` is the linear coordinate transverse to the
/// chart plane, normalized to 1 on it. The returned chart is the tangent
/// chart of `h_ε` through the ray of the base point.
pub fn gen_perturb(frame: &ChartFrame, eps: f64) -> Result<Perturbation> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::pre(format!("perturbation size must lie in (0, 1), got {eps}")));
    }
    let poly = frame
        .h()
        .as_polynomial()
        .ok_or_else(|| Error::pre("perturbation needs a polynomial"))?;
    let nrm = frame.plane_normal();
    let scale = linalg::dot(nrm, frame.origin());
    let ell: Vec<f64> = nrm.iter().map(|v| v / scale).collect();
    let lk = HomogeneousPolynomial::linear_form(&ell)?.pow(poly.degree())?;
    let h_eps = poly.sub(&lk.scale(eps))?.pruned(1e-15);
    let shared: SharedFunction = std::sync::Arc::new(h_eps.clone());
    let new_frame = ChartFrame::make_chart(shared, frame.p(), 1e-12)?;
    Ok(Perturbation {
        h_eps,
        frame: new_frame,
        linear_form: ell,
        eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn frame(s: &str, seed: &[f64]) -> ChartFrame {
        let h: SharedFunction = Arc::new(HomogeneousPolynomial::parse(s).unwrap());
        ChartFrame::make_chart(h, seed, 1e-12).unwrap()
    }

    #[test]
    fn scan_examples() {
        let f = frame("x^3 - x*y^2", &[1.0, 0.0]);
        let pts = boundary_scan(&f, &[vec![1.0]], Exec::Sequential).unwrap();
        let s = 0.5f64.sqrt();
        assert!((pts[0].point[0] - s).abs() < 1e-14 && (pts[0].point[1] - s).abs() < 1e-14);
        let g = frame("x^2*y", &[1.0, 1.0]);
        let pts = boundary_scan(&g, &[vec![1.0], vec![-1.0]], Exec::Sequential).unwrap();
        let mut faces: Vec<usize> = pts
            .iter()
            .map(|p| if p.point[0].abs() < 1e-12 { 0 } else { 1 })
            .collect();
        faces.sort();
        assert_eq!(faces, vec![0, 1]);
        assert!(boundary_scan(&g, &[vec![0.0]], Exec::Sequential).is_err());
    }

    #[test]
    fn regularity_examples() {
        let f = frame("x^3 - x*y^2", &[1.0, 0.0]);
        let pts = boundary_scan(&f, &sampling::directions(1, 4), Exec::Sequential).unwrap();
        let rep = regularity_report(&f, &pts, 1e-9, Exec::Sequential);
        assert!(rep.aggregate);
        let l = rep.entries[0].lorentz.as_ref().unwrap();
        assert!(l.pass && l.determinant < 0.0);

        let g = frame("x^2*y", &[1.0, 1.0]);
        let pts = boundary_scan(&g, &sampling::directions(1, 2), Exec::Sequential).unwrap();
        let rep = regularity_report(&g, &pts, 1e-9, Exec::Sequential);
        assert!(!rep.aggregate);
        for (p, e) in pts.iter().zip(&rep.entries) {
            if p.point[0].abs() < 1e-12 {
                assert!(!e.condition_i);
                assert!(e.condition_ii.is_none());
            } else {
                assert!(e.regular());
            }
        }
    }

    #[test]
    fn light_cone_extension() {
        let f = frame("x^2 - y^2 - z^2", &[1.0, 0.0, 0.0]);
        let pts = boundary_scan(&f, &sampling::directions(2, 40), Exec::Sequential).unwrap();
        let rep = regularity_report(&f, &pts, 1e-9, Exec::Sequential);
        assert!(rep.aggregate);
        assert!(rep.entries.iter().all(|e| e.lorentz.as_ref().unwrap().determinant < 0.0));
        assert!(rep.entries.iter().all(|e| e.condition_ii.as_ref().unwrap().xi_defect < 1e-8));
    }

    #[test]
    fn compactness_examples() {
        let f = frame("x^3 - x*y^2", &[1.0, 0.0]);
        let cb = compactness_bound(&f, 1000, Exec::Sequential).unwrap();
        assert!(cb.radius_bound >= 1.0);
        assert!(cb.min_margin >= 0.0);
    }

    #[test]
    fn perturbation_examples() {
        let g = frame("x^2*y", &[1.0, 1.0]);
        assert!(gen_perturb(&g, 1.0).is_err());
        assert!(gen_perturb(&g, 0.0).is_err());
        let p = gen_perturb(&g, 0.5).unwrap();
        let pts = boundary_scan(&p.frame, &sampling::directions(1, 10), Exec::Sequential).unwrap();
        assert!(regularity_report(&p.frame, &pts, 1e-9, Exec::Sequential).aggregate);
        // ℓ = 1 on the chart plane and h_ε(p) = 1 − ε
        let lp: f64 = linalg::dot(&p.linear_form, g.p());
        assert!((lp - 1.0).abs() < 1e-14);
        assert!((p.h_eps.eval(g.p()) - 0.5).abs() < 1e-14);
        let small = gen_perturb(&g, 1e-9).unwrap();
        let orig = g.h().as_polynomial().unwrap();
        assert!(small.h_eps.sub(orig).unwrap().coefficient_scale() < 1e-8);
    }
}
