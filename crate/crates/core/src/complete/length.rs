//! Centroaffine length of chart curves.

use serde::Serialize;

use crate::chart::{ChartFrame, MetricMethod};
use crate::error::{Error, Result};
use crate::linalg;
use crate::quad;

/// A curve in chart coordinates on a parameter interval.
pub trait ChartPath: Sync {
    fn interval(&self) -> (f64, f64);
    fn point(&self, t: f64) -> Vec<f64>;
    fn velocity(&self, t: f64) -> Vec<f64>;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segment {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
}

impl Segment {
    pub fn new(from: Vec<f64>, to: Vec<f64>) -> Self {
        Self { from, to }
    }
}

impl ChartPath for Segment {
    fn interval(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn point(&self, t: f64) -> Vec<f64> {
        self.from
            .iter()
            .zip(&self.to)
            .map(|(a, b)| a + t * (b - a))
            .collect()
    }

    fn velocity(&self, _t: f64) -> Vec<f64> {
        linalg::sub(&self.to, &self.from)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthEstimate {
    pub length: f64,
    pub error: f64,
    pub intervals: usize,
}

/// `∫ √g(c', c') dt` by adaptive quadrature after endpoint smoothing, so
/// the endpoints may sit on `∂B` where the metric blows up. A divergent
/// integral comes back as `QuadratureDiverged`.
pub fn curve_length(frame: &ChartFrame, path: &dyn ChartPath, tol: f64) -> Result<LengthEstimate> {
    let (a, b) = path.interval();
    if !(a <= b) {
        return Err(Error::pre("path interval is reversed"));
    }
    if a == b {
        return Ok(LengthEstimate {
            length: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    // nodes within rounding distance of an end are not resolved by the
    // chart coordinates; they count as zero, which for an integrable end
    // singularity `1/√r` drops at most `O(√ulp)`
    let ends = [path.point(a), path.point(b)];
    let resolution = 64.0 * f64::EPSILON * ends.iter().map(|e| linalg::max_abs(e)).fold(1.0, f64::max);
    let near_end = |c: &[f64]| ends.iter().any(|e| linalg::max_abs(&linalg::sub(c, e)) <= resolution);
    let q = quad::integrate_smoothed(
        |t| {
            let c = path.point(t);
            let v = path.velocity(t);
            if linalg::norm(&v) == 0.0 || near_end(&c) {
                return Ok(0.0);
            }
            let g = frame.chart_metric(&c, MetricMethod::PsiFormula)?;
            let s = g.apply(&v, &v);
            if s < 0.0 {
                return Err(Error::pre(format!("metric not positive along the path (g(v,v) = {s})")));
            }
            Ok(s.sqrt())
        },
        a,
        b,
        tol,
        quad::DEFAULT_MAX_INTERVALS,
    )?;
    Ok(LengthEstimate {
        length: q.value,
        error: q.error,
        intervals: q.intervals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::homcalc::{HomogeneousPolynomial, SharedFunction};
    use std::sync::Arc;

    #[test]
    fn analytic_segment_length() {
        let (_, f) = catalog::analytic_example(2.0).unwrap();
        // origin (0,1) and basis (1,−1): coordinate x runs over (0, 1)
        let l = curve_length(&f, &Segment::new(vec![0.0], vec![1.0]), 1e-12).unwrap();
        assert!((l.length - 2f64.sqrt() * std::f64::consts::PI).abs() < 1e-9, "{}", l.length);
        let half = curve_length(&f, &Segment::new(vec![0.5], vec![1.0]), 1e-12).unwrap();
        assert!((half.length - l.length / 2.0).abs() < 1e-9);
    }

    #[test]
    fn cubic_diverges_at_boundary() {
        let h: SharedFunction = Arc::new(HomogeneousPolynomial::parse("x^3 - x*y^2").unwrap());
        let f = ChartFrame::make_chart(h, &[1.0, 0.0], 1e-12).unwrap();
        assert!(matches!(
            curve_length(&f, &Segment::new(vec![0.0], vec![1.0]), 1e-10),
            Err(Error::QuadratureDiverged { .. })
        ));
        let inner = curve_length(&f, &Segment::new(vec![0.0], vec![0.5]), 1e-12).unwrap();
        assert!(inner.length > 0.0);
        let zero = curve_length(&f, &Segment::new(vec![0.2], vec![0.2]), 1e-12).unwrap();
        assert_eq!(zero.length, 0.0);
    }
}
