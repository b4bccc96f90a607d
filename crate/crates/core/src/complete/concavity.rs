//! Concavity of `h̄^{1/(k−ε)}` on `B` and the resulting logarithmic lower
//! bound on the length of curves that run into the boundary.

use serde::Serialize;

use crate::chart::ChartFrame;
use crate::error::{Error, Result};
use crate::forms::SymmetricForm;
use crate::linalg;
use crate::par::{self, Exec};
use crate::sampling;

pub const DEFAULT_SAMPLES: usize = 4000;
/// Fraction of the exit distance covered by the outermost sample.
const REACH: f64 = 1.0 - 1e-3;

/// Default grid `{k/8, k/4, k/2, 3k/4, 7k/8}`.
pub fn default_eps_grid(k: f64) -> Vec<f64> {
    vec![k / 8.0, k / 4.0, k / 2.0, 3.0 * k / 4.0, 7.0 * k / 8.0]
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcavityWitness {
    pub coords: Vec<f64>,
    /// Largest Hessian eigenvalue of `h̄^{1/(k−ε)}` there.
    pub eigenvalue: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcavityResult {
    pub eps: f64,
    pub pass: bool,
    pub samples: usize,
    /// Largest value of `λ_max(M) / scale(M)` over the sample.
    pub worst_relative: f64,
    pub witness: Option<ConcavityWitness>,
}

/// `M = h̄ ∇²h̄ + (α−1) ∇h̄ ∇h̄ᵀ`, so that `∇²(h̄^α) = α h̄^{α−2} M`.
fn concavity_form(frame: &ChartFrame, c: &[f64], alpha: f64) -> Result<(f64, SymmetricForm)> {
    let h = frame.h();
    let y = frame.ambient(c);
    let hv = h.value(&y)?;
    let grad = h.gradient(&y)?;
    let gb: Vec<f64> = frame.basis().iter().map(|b| linalg::dot(&grad, b)).collect();
    let m = h.hessian(&y)?.gram(frame.basis()).scaled(hv).plus_outer(alpha - 1.0, &gb);
    Ok((hv, m))
}

/// Sample points of `B`: rays from the centre, each cut at evenly spaced
/// fractions of its exit distance up to just short of the boundary.
pub fn concavity_samples(frame: &ChartFrame, samples: usize) -> Result<Vec<Vec<f64>>> {
    let n = frame.n();
    let rays = if n == 1 { 2 } else { ((samples as f64).sqrt().ceil() as usize).max(2) };
    let levels = samples.div_ceil(rays).max(1);
    let c0 = frame.center();
    let mut out = vec![c0.to_vec()];
    for d in sampling::directions(n, rays) {
        let reach = frame
            .ray_exit(c0, &d, 1e6)?
            .ok_or_else(|| Error::pre("concavity test needs a bounded chart domain"))?;
        for j in 1..=levels {
            out.push(linalg::axpy(c0, REACH * reach * j as f64 / levels as f64, &d));
        }
    }
    Ok(out)
}

pub fn concavity_test(frame: &ChartFrame, eps: f64, samples: usize, tol: f64, exec: Exec) -> Result<ConcavityResult> {
    let k = frame.k();
    if !(eps > 0.0 && eps < k) {
        return Err(Error::pre(format!("ε must lie in (0, k), got {eps}")));
    }
    let alpha = 1.0 / (k - eps);
    let points = concavity_samples(frame, samples)?;
    let evals = par::try_map_indexed(exec, points.len(), |i| {
        let (hv, m) = concavity_form(frame, &points[i], alpha)?;
        let top = *m.eigenvalues().last().unwrap_or(&0.0);
        Ok::<_, Error>((hv, top, m.scale()))
    })?;
    let mut worst_relative = f64::NEG_INFINITY;
    let mut witness: Option<ConcavityWitness> = None;
    for (i, (hv, top, scale)) in evals.iter().enumerate() {
        let rel = top / scale.max(f64::MIN_POSITIVE);
        worst_relative = worst_relative.max(rel);
        if *top > tol * scale && witness.is_none() {
            witness = Some(ConcavityWitness {
                coords: points[i].clone(),
                eigenvalue: alpha * hv.powf(alpha - 2.0) * top,
            });
        }
    }
    Ok(ConcavityResult {
        eps,
        pass: witness.is_none(),
        samples: points.len(),
        worst_relative,
        witness,
    })
}

/// `C = (1/k) √(ε/(k−ε))`, the constant in `L(γ) ≥ C |Δ ln h̄|`.
pub fn log_bound_constant(k: f64, eps: f64) -> f64 {
    (eps / (k - eps)).sqrt() / k
}

/// Lower bound on the length of a curve in `B` between chart points with
/// values `h_start` and `h_end`, valid when the concavity test passes at `ε`.
pub fn log_length_bound(k: f64, eps: f64, h_start: f64, h_end: f64) -> f64 {
    log_bound_constant(k, eps) * (h_end.ln() - h_start.ln()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::homcalc::{HomogeneousPolynomial, SharedFunction};
    use std::sync::Arc;

    fn frame(s: &str, seed: &[f64]) -> ChartFrame {
        let h: SharedFunction = Arc::new(HomogeneousPolynomial::parse(s).unwrap());
        ChartFrame::make_chart(h, seed, 1e-12).unwrap()
    }

    #[test]
    fn cubic_concave_up_to_one() {
        // h̄ = 1 − t², so h̄^α is concave exactly when α ≤ 1
        let f = frame("x^3 - x*y^2", &[1.0, 0.0]);
        for eps in [0.375, 0.75, 1.0] {
            assert!(concavity_test(&f, eps, 400, 1e-9, Exec::Sequential).unwrap().pass, "{eps}");
        }
        let r = concavity_test(&f, 2.5, 400, 1e-9, Exec::Sequential).unwrap();
        assert!(!r.pass && r.witness.unwrap().eigenvalue > 0.0);
    }

    #[test]
    fn analytic_fails() {
        let (_, f) = catalog::analytic_example(2.0).unwrap();
        for eps in default_eps_grid(2.0) {
            assert!(!concavity_test(&f, eps, 400, 1e-9, Exec::Sequential).unwrap().pass);
        }
    }

    #[test]
    fn quartic_fails_somewhere() {
        let h: SharedFunction = Arc::new(catalog::quartic_surface(1e-4).unwrap());
        let f = ChartFrame::slice(h, &[0.0, 1.0], vec![vec![1.0, 0.0]], &[0.5]).unwrap();
        for eps in default_eps_grid(4.0) {
            let r = concavity_test(&f, eps, 2000, 1e-9, Exec::Sequential).unwrap();
            assert!(!r.pass, "{eps}");
        }
    }

    #[test]
    fn range_checked() {
        let f = frame("x^3 - x*y^2", &[1.0, 0.0]);
        assert!(concavity_test(&f, 0.0, 10, 1e-9, Exec::Sequential).is_err());
        assert!(concavity_test(&f, 3.0, 10, 1e-9, Exec::Sequential).is_err());
    }

    #[test]
    fn bound_constant() {
        assert!((log_bound_constant(3.0, 1.0) - (0.5f64).sqrt() / 3.0).abs() < 1e-15);
        assert!(log_length_bound(3.0, 1.0, 1.0, 1e-4) > 0.0);
    }
}
