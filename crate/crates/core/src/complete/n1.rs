//! Monomial test for planar cones: after a linear change of coordinates
//! taking the cone to the open quadrant, each axis face must be approached
//! by a monomial `x^l y^{k−l}` with `1 ≤ l ≤ k−1` and positive coefficient.

use serde::Serialize;

use crate::boundary::UNBOUNDED_RADIUS;
use crate::chart::ChartFrame;
use crate::error::{Error, Result};
use crate::homcalc::HomogeneousPolynomial;
use crate::linalg;

#[derive(Debug, Clone, Serialize)]
pub struct FaceCheck {
    /// Variable index whose vanishing defines the face.
    pub axis: usize,
    pub l: u32,
    pub coefficient: f64,
    pub condition: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonomialReport {
    /// Boundary rays `r_a, r_b` used as the new coordinate axes.
    pub rays: [Vec<f64>; 2],
    pub normalized: String,
    pub faces: Vec<FaceCheck>,
    pub pass: bool,
}

/// Pulls `h` back by `(s, t) ↦ s r_a + t r_b`, where `r_a, r_b` span the
/// boundary rays of `B` with positive orientation, so `U` becomes the quadrant.
pub fn normalize_quadrant(frame: &ChartFrame) -> Result<(HomogeneousPolynomial, [Vec<f64>; 2])> {
    let poly = frame
        .h()
        .as_polynomial()
        .ok_or_else(|| Error::pre("monomial test needs a polynomial"))?;
    if poly.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: poly.dim(),
        });
    }
    let c0 = frame.center();
    let radius = UNBOUNDED_RADIUS * linalg::norm(frame.p()).max(1.0);
    let mut rays = Vec::new();
    for s in [1.0, -1.0] {
        let t = frame
            .ray_exit(c0, &[s], radius)?
            .ok_or_else(|| Error::pre("cone is not bounded by two rays"))?;
        rays.push(linalg::unit(&frame.ambient(&[c0[0] + s * t])));
    }
    let det = rays[0][0] * rays[1][1] - rays[0][1] * rays[1][0];
    if det < 0.0 {
        rays.swap(0, 1);
    }
    let pulled = poly.linear_substitute(&rays)?.pruned(1e-10);
    Ok((pulled, [rays[0].clone(), rays[1].clone()]))
}

fn face(poly: &HomogeneousPolynomial, axis: usize) -> Result<FaceCheck> {
    let k = poly.degree();
    let (l, coefficient) = poly
        .terms()
        .map(|(e, c)| (e[axis], c))
        .min_by_key(|(l, _)| *l)
        .ok_or_else(|| Error::pre("zero polynomial"))?;
    if l == 0 {
        return Err(Error::pre(format!(
            "h does not vanish on the face where variable {axis} is zero"
        )));
    }
    let condition = f64::from(l) * f64::from(l) - f64::from(l) * f64::from(k - 1);
    Ok(FaceCheck {
        axis,
        l,
        coefficient,
        condition,
        ok: l < k && coefficient > 0.0 && condition <= 0.0,
    })
}

pub fn n1_monomial_test(frame: &ChartFrame) -> Result<MonomialReport> {
    let (pulled, rays) = normalize_quadrant(frame)?;
    let faces = vec![face(&pulled, 0)?, face(&pulled, 1)?];
    Ok(MonomialReport {
        rays,
        normalized: pulled.to_string(),
        pass: faces.iter().all(|f| f.ok),
        faces,
    })
}
