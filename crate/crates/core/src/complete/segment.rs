//! The cubic segment test: along each line through `B`, the restriction
//! `h_0` must satisfy `2 h_0 h_0'' − h_0'^2 ≤ 0` on the whole positive
//! interval around the base point.

use serde::Serialize;

use crate::boundary::UNBOUNDED_RADIUS;
use crate::chart::ChartFrame;
use crate::error::{Error, Result};
use crate::homcalc::UPoly;
use crate::linalg;
use crate::par::{self, Exec};
use crate::sampling;

pub const DEFAULT_LINES: usize = 2000;
const RADIAL_LEVELS: [f64; 4] = [0.0, 0.3, 0.6, 0.9];
const CHEBYSHEV_NODES: usize = 33;

#[derive(Debug, Clone, Serialize)]
pub struct LineResult {
    pub base: Vec<f64>,
    pub direction: Vec<f64>,
    /// Positive interval of `h_0` containing 0.
    pub interval: (f64, f64),
    pub max_f0: f64,
    pub argmax: f64,
    pub f0_ends: (f64, f64),
    /// `−h_0'^2` at the interval ends.
    pub slope_terms: (f64, f64),
    pub scale: f64,
    pub tolerance: f64,
    /// `f_0' = 2 h_0 h_0'''` keeps one sign on the interval.
    pub monotone: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SegmentReport {
    pub lines: usize,
    pub passed: usize,
    pub pass: bool,
    pub worst_line: usize,
    /// `max f_0 − tolerance` on the worst line.
    pub worst_margin: f64,
    #[serde(skip)]
    pub results: Vec<LineResult>,
}

/// `2 h_0 h_0'' − h_0'^2`
pub fn f0_poly(h0: &UPoly) -> UPoly {
    let d1 = h0.derivative();
    let d2 = d1.derivative();
    h0.mul(&d2).scale(2.0).sub(&d1.mul(&d1))
}

/// Checks one line. Returns a closedness failure if the positive interval
/// is unbounded on either side.
pub fn test_line(frame: &ChartFrame, base: &[f64], dir: &[f64]) -> Result<LineResult> {
    let poly = frame
        .h()
        .as_polynomial()
        .ok_or_else(|| Error::Degree("cubic segment test needs a polynomial".into()))?;
    let y = frame.ambient(base);
    let v = frame.push(dir);
    let h0 = poly.restrict_to_line(&y, &v)?;
    if !(h0.eval(0.0) > 0.0) {
        return Err(Error::NonPositive {
            point: y,
            value: h0.eval(0.0),
        });
    }
    let roots = h0.real_roots();
    let limit = UNBOUNDED_RADIUS * linalg::norm(frame.p()).max(1.0);
    let a = roots.iter().rev().copied().find(|t| *t < 0.0 && *t >= -limit);
    let b = roots.iter().copied().find(|t| *t > 0.0 && *t <= limit);
    let (Some(a), Some(b)) = (a, b) else {
        return Err(Error::ClosednessFailure { base: y, direction: v });
    };

    let f0 = f0_poly(&h0);
    let df0 = f0.derivative();
    let mut candidates = vec![a, b];
    candidates.extend(df0.real_roots().into_iter().filter(|t| *t > a && *t < b));
    let mut monotone_sign = 0.0;
    let mut monotone = true;
    for j in 0..CHEBYSHEV_NODES {
        let s = (std::f64::consts::PI * (j as f64 + 0.5) / CHEBYSHEV_NODES as f64).cos();
        let t = 0.5 * (a + b) + 0.5 * (b - a) * s;
        candidates.push(t);
        let d = df0.eval(t);
        if d != 0.0 {
            if monotone_sign != 0.0 && d.signum() != monotone_sign {
                monotone = false;
            }
            monotone_sign = d.signum();
        }
    }
    let (argmax, max_f0) = candidates
        .iter()
        .map(|&t| (t, f0.eval(t)))
        .fold((a, f64::NEG_INFINITY), |m, c| if c.1 > m.1 { c } else { m });
    let scale = h0.coeffs().iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let tolerance = 1e-9 * scale.max(1.0).powi(4);
    let d1 = h0.derivative();
    Ok(LineResult {
        base: y,
        direction: v,
        interval: (a, b),
        max_f0,
        argmax,
        f0_ends: (f0.eval(a), f0.eval(b)),
        slope_terms: (-d1.eval(a).powi(2), -d1.eval(b).powi(2)),
        scale,
        tolerance,
        monotone,
        pass: max_f0 <= tolerance,
    })
}

/// Base point and direction of line `i` out of `count`: directions follow
/// the low-discrepancy sequence, base points sit on a radial grid.
pub fn line_geometry(frame: &ChartFrame, i: usize, count: usize, dirs: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
    let c0 = frame.center();
    let dir = dirs[i].clone();
    let level = RADIAL_LEVELS[i % RADIAL_LEVELS.len()];
    if level == 0.0 {
        return Ok((c0.to_vec(), dir));
    }
    let e = &dirs[(i * 37 + 11) % count];
    let reach = frame.ray_exit(c0, e, 1e6)?.unwrap_or(1.0);
    Ok((linalg::axpy(c0, level * reach, e), dir))
}

/// Runs the segment test on `lines` lines through `B`. Requires a cubic
/// polynomial. The first unbounded line (in index order) is reported as a
/// closedness failure.
pub fn cubic_segment_test(frame: &ChartFrame, lines: usize, exec: Exec) -> Result<SegmentReport> {
    match frame.h().as_polynomial() {
        Some(p) if p.degree() == 3 => {}
        _ => return Err(Error::Degree("cubic segment test needs a cubic polynomial".into())),
    }
    if lines == 0 {
        return Err(Error::pre("need at least one line"));
    }
    let dirs = sampling::directions(frame.n(), lines);
    let results = par::try_map_indexed(exec, lines, |i| {
        let (base, dir) = line_geometry(frame, i, lines, &dirs)?;
        test_line(frame, &base, &dir)
    })?;
    let passed = results.iter().filter(|r| r.pass).count();
    let (worst_line, worst_margin) = results
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r.max_f0 - r.tolerance))
        .fold((0, f64::NEG_INFINITY), |m, c| if c.1 > m.1 { c } else { m });
    Ok(SegmentReport {
        lines,
        passed,
        pass: passed == lines,
        worst_line,
        worst_margin,
        results,
    })
}
