//! Levi-Civita geodesics of the centroaffine metric in chart coordinates.
//!
//! The chart metric `g = (1/k)(−∇²h̄/h̄ + (k−1)/k · dh̄²/h̄²)` and its first
//! derivatives come from the jet of `h̄` up to order three. Close to `∂B`
//! the chart is re-centred on the boundary point ahead (a linear change of
//! ambient coordinates, under which the geometry is invariant), so `h̄`
//! keeps full relative precision as it tends to zero.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::chart::ChartFrame;
use crate::forms::SymmetricForm;
use crate::error::{Error, Result};
use crate::homcalc::{self, HomogeneousPolynomial, SharedFunction};
use crate::linalg;
use crate::sampling;

use super::length::{curve_length, Segment};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeodesicOptions {
    pub max_length: f64,
    /// Stop once `h̄` on the chart drops below this.
    pub min_h: f64,
    /// Stop once the estimated chart distance to `∂B` drops below this
    /// fraction of the chart diameter. Zero disables the check.
    pub boundary_fraction: f64,
    /// Local error tolerance per step, relative to the state size.
    pub step_tol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        Self {
            max_length: 100.0,
            min_h: 0.0,
            boundary_fraction: 1e-8,
            step_tol: 1e-11,
            initial_step: 1e-2,
            max_steps: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    MaxLength,
    MinH,
    NearBoundary,
    LeftDomain,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveTrace {
    pub t: Vec<f64>,
    pub coords: Vec<Vec<f64>>,
    pub ambient: Vec<Vec<f64>>,
    pub h: Vec<f64>,
    pub cum_length: Vec<f64>,
    /// `max |g(q', q') − 1|` along the curve.
    pub speed_drift: f64,
    pub stop: StopReason,
}

impl CurveTrace {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.cum_length.last().copied().unwrap_or(0.0)
    }

    /// Drift per unit length, `speed_drift / max(1, L)`.
    pub fn drift_rate(&self) -> f64 {
        self.speed_drift / self.length().max(1.0)
    }

    /// Length accumulated when `h̄` first reaches `level`, interpolated in
    /// `ln h̄`. `None` if the trace never gets that low.
    pub fn length_at_h(&self, level: f64) -> Option<f64> {
        let target = level.ln();
        for i in 1..self.h.len() {
            let (a, b) = (self.h[i - 1].ln(), self.h[i].ln());
            if b <= target && a > target {
                let s = (target - a) / (b - a);
                return Some(self.cum_length[i - 1] + s * (self.cum_length[i] - self.cum_length[i - 1]));
            }
            if b == target {
                return Some(self.cum_length[i]);
            }
        }
        None
    }

    /// Columns `t, c_1..c_n, x_0..x_n, h, cum_length`.
    pub fn to_csv(&self) -> String {
        let n = self.coords.first().map_or(0, Vec::len);
        let m = self.ambient.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for i in 1..=n {
            let _ = write!(out, ",c_{i}");
        }
        for i in 0..m {
            let _ = write!(out, ",x_{i}");
        }
        out.push_str(",h,cum_length\n");
        for i in 0..self.len() {
            let _ = write!(out, "{:e}", self.t[i]);
            for v in self.coords[i].iter().chain(&self.ambient[i]) {
                let _ = write!(out, ",{v:e}");
            }
            let _ = writeln!(out, ",{:e},{:e}", self.h[i], self.cum_length[i]);
        }
        out
    }
}

struct Field<'a> {
    h: &'a SharedFunction,
    n: usize,
}

/// Chart metric at a local chart point and its first derivatives
/// `dg[l][i][j] = ∂_l g_ij`, from the jet of `h̄` up to order three.
struct MetricJet {
    hbar: f64,
    grad: Vec<f64>,
    g: SymmetricForm,
    dg: Vec<Vec<Vec<f64>>>,
}

impl Field<'_> {
    fn jet(&self, d: &[f64]) -> Result<MetricJet> {
        let n = self.n;
        let x: Vec<f64> = std::iter::once(1.0).chain(d.iter().copied()).collect();
        let k = self.h.degree();
        let hv = self.h.value(&x)?;
        if !(hv > 0.0) {
            return Err(Error::NonPositive { point: x, value: hv });
        }
        let tangent: Vec<Vec<f64>> = (1..=n).map(|i| linalg::basis_vector(n + 1, i)).collect();
        let h1 = self.h.gradient(&x)?[1..].to_vec();
        let h2 = self.h.hessian(&x)?.gram(&tangent);
        let h3 = self.h.third(&x)?.gram(&tangent);
        let c = (k - 1.0) / k;
        let g = SymmetricForm::from_fn(n, |i, j| (-h2.get(i, j) / hv + c * h1[i] * h1[j] / (hv * hv)) / k);
        let dg = (0..n)
            .map(|l| {
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let a = -h3.get(i, j, l) / hv + h2.get(i, j) * h1[l] / (hv * hv);
                                let b = (h2.get(i, l) * h1[j] + h1[i] * h2.get(j, l)) / (hv * hv)
                                    - 2.0 * h1[i] * h1[j] * h1[l] / (hv * hv * hv);
                                (a + c * b) / k
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(MetricJet {
            hbar: hv,
            grad: h1,
            g,
            dg,
        })
    }

    /// `d'' = −Γ̂(d', d')` for the Levi-Civita connection of the chart metric.
    fn deriv(&self, z: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let (d, w) = z.split_at(n);
        let jet = self.jet(d)?;
        let mut rhs = vec![0.0; n];
        for (l, r) in rhs.iter_mut().enumerate() {
            let mut a = 0.0;
            let mut b = 0.0;
            for i in 0..n {
                for j in 0..n {
                    a += jet.dg[i][j][l] * w[i] * w[j];
                    b += jet.dg[l][i][j] * w[i] * w[j];
                }
            }
            *r = -(a - 0.5 * b);
        }
        let acc = linalg::solve(&jet.g.to_matrix(), &rhs).ok_or(Error::IllConditioned { cond: f64::INFINITY })?;
        Ok([w.to_vec(), acc].concat())
    }

    fn rk4(&self, y: &[f64], dt: f64) -> Result<Vec<f64>> {
        let k1 = self.deriv(y)?;
        let k2 = self.deriv(&linalg::axpy(y, 0.5 * dt, &k1))?;
        let k3 = self.deriv(&linalg::axpy(y, 0.5 * dt, &k2))?;
        let k4 = self.deriv(&linalg::axpy(y, dt, &k3))?;
        Ok((0..y.len())
            .map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect())
    }
}

/// Linear coordinates `x = A x̃` in which the chart plane is `x̃_0 = 1` and
/// the chart point `a + d` sits at `x̃ = (1, d)`. With `a` a boundary point
/// the function is expanded around it, so `h̄` stays accurate as `d → a`.
struct Anchor {
    h: SharedFunction,
    columns: Vec<Vec<f64>>,
    /// Chart coordinates of the anchor point in the caller's chart.
    offset: Vec<f64>,
}

impl Anchor {
    fn new(frame: &ChartFrame, offset: Vec<f64>) -> Result<Self> {
        let mut columns = vec![frame.ambient(&offset)];
        columns.extend(frame.basis().iter().cloned());
        let h = homcalc::pullback(frame.h(), &columns)?;
        Ok(Self {
            h: snap_root(h),
            columns,
            offset,
        })
    }

    /// Level-set point over the local chart point `d`, in the caller's
    /// ambient coordinates.
    fn ambient(&self, d: &[f64], hbar: f64, k: f64) -> Vec<f64> {
        let x: Vec<f64> = std::iter::once(1.0).chain(d.iter().copied()).collect();
        let y = linalg::combine(&x, &self.columns, self.columns.len());
        linalg::scale(&y, (-hbar.ln() / k).exp())
    }
}

/// Drops a pure `x̃_0^k` term at rounding level: the anchor is a boundary
/// root known only to working precision.
fn snap_root(h: SharedFunction) -> SharedFunction {
    let Some(p) = h.as_polynomial() else {
        return h;
    };
    let mut pure = vec![0u32; p.dim()];
    pure[0] = p.degree();
    let c = p.coefficient(&pure);
    if c == 0.0 || c.abs() > 1e-13 * p.coefficient_scale() {
        return h;
    }
    let terms: Vec<(Vec<u32>, f64)> = p
        .terms()
        .filter(|(e, _)| *e != pure.as_slice())
        .map(|(e, c)| (e.to_vec(), c))
        .collect();
    match HomogeneousPolynomial::from_terms(p.dim(), p.degree(), terms) {
        Ok(q) => Arc::new(q),
        Err(_) => h,
    }
}

/// Largest chord of `B` through the centre over a fixed set of directions;
/// unbounded directions are skipped.
pub fn chart_diameter(frame: &ChartFrame) -> Result<f64> {
    let n = frame.n();
    let c0 = frame.center();
    let mut best: f64 = 0.0;
    for d in sampling::directions(n, if n == 1 { 1 } else { 16 * n }) {
        let a = frame.ray_exit(c0, &d, 1e6)?;
        let b = frame.ray_exit(c0, &linalg::scale(&d, -1.0), 1e6)?;
        if let (Some(a), Some(b)) = (a, b) {
            best = best.max(a + b);
        }
    }
    Ok(if best > 0.0 { best } else { 1.0 })
}

/// Ratio by which the boundary distance must shrink before the integration
/// re-anchors at the boundary point ahead.
const REANCHOR_RATIO: f64 = 1e-3;

/// Shoots the geodesic from chart point `c0` with chart velocity `dir`,
/// rescaled to unit speed. The parameter is arclength.
pub fn geodesic_shoot(frame: &ChartFrame, c0: &[f64], dir: &[f64], opts: &GeodesicOptions) -> Result<CurveTrace> {
    let n = frame.n();
    if dir.len() != n || linalg::norm(dir) == 0.0 {
        return Err(Error::pre("initial direction must be a nonzero chart vector"));
    }
    if !(opts.max_length > 0.0) {
        return Err(Error::pre("max_length must be positive"));
    }
    let k = frame.k();
    let m = frame.dim();
    let diameter = chart_diameter(frame)?;
    let stop_distance = opts.boundary_fraction * diameter;
    // re-anchoring only pays off for polynomials, which expand exactly
    let polynomial = frame.h().as_polynomial().is_some();

    let mut anchor = Anchor::new(frame, c0.to_vec())?;
    let jet0 = Field { h: &anchor.h, n }.jet(&vec![0.0; n])?;
    let g0 = jet0.g.apply(dir, dir);
    if !(g0 > 0.0) {
        return Err(Error::pre("metric is not positive in the initial direction"));
    }
    let mut z = [vec![0.0; n], linalg::scale(dir, 1.0 / g0.sqrt())].concat();

    let mut trace = CurveTrace {
        t: vec![0.0],
        coords: vec![c0.to_vec()],
        ambient: vec![anchor.ambient(&z[..n], jet0.hbar, k)],
        h: vec![jet0.hbar],
        cum_length: vec![0.0],
        speed_drift: 0.0,
        stop: StopReason::MaxLength,
    };
    let mut anchor_scale = diameter;
    let mut t = 0.0;
    let mut speed = 1.0;
    let mut dt = opts.initial_step;
    for _ in 0..opts.max_steps {
        if t >= opts.max_length {
            trace.stop = StopReason::MaxLength;
            return Ok(trace);
        }
        let field = Field { h: &anchor.h, n };
        let step = dt.min(opts.max_length - t);
        let attempt = field.rk4(&z, step).and_then(|big| {
            let mid = field.rk4(&z, 0.5 * step)?;
            let small = field.rk4(&mid, 0.5 * step)?;
            Ok((big, small))
        });
        let (big, small) = match attempt {
            Ok(pair) => pair,
            Err(_) => {
                dt = 0.25 * step;
                if dt < 1e-14 * t.max(1.0) {
                    return Err(Error::StepUnderflow { arclength: t });
                }
                continue;
            }
        };
        // componentwise with a floor, since position components shrink
        // towards the anchor while velocities grow
        let floor = 1e-10 * linalg::max_abs(&small);
        let err = (0..z.len()).fold(0.0_f64, |e, i| e.max((big[i] - small[i]).abs() / (small[i].abs() + floor)));
        if !(err <= opts.step_tol) {
            let factor = if err.is_finite() { (0.9 * (opts.step_tol / err).powf(0.2)).clamp(0.1, 0.5) } else { 0.1 };
            dt = step * factor;
            if dt < 1e-14 * t.max(1.0) {
                return Err(Error::StepUnderflow { arclength: t });
            }
            continue;
        }
        let next: Vec<f64> = (0..z.len()).map(|i| small[i] + (small[i] - big[i]) / 15.0).collect();
        let jet = match field.jet(&next[..n]) {
            Ok(j) => j,
            Err(Error::NonPositive { .. } | Error::Domain { .. }) => {
                trace.stop = StopReason::LeftDomain;
                return Ok(trace);
            }
            Err(e) => return Err(e),
        };
        let gvv = jet.g.apply(&next[n..], &next[n..]);
        if !(gvv > 0.0) {
            trace.stop = StopReason::LeftDomain;
            return Ok(trace);
        }
        let new_speed = gvv.sqrt();
        let seg = 0.5 * step * (speed + new_speed);
        speed = new_speed;
        t += step;
        z = next;
        let distance = jet.hbar / linalg::norm(&jet.grad);
        trace.speed_drift = trace.speed_drift.max((gvv - 1.0).abs());
        trace.t.push(t);
        trace.ambient.push(anchor.ambient(&z[..n], jet.hbar, k));
        trace.coords.push(linalg::add(&anchor.offset, &z[..n]));
        trace.h.push(jet.hbar);
        trace.cum_length.push(trace.length() + seg);
        if jet.hbar < opts.min_h {
            trace.stop = StopReason::MinH;
            return Ok(trace);
        }
        if distance < stop_distance {
            trace.stop = StopReason::NearBoundary;
            return Ok(trace);
        }
        if polynomial && distance < REANCHOR_RATIO * anchor_scale {
            let local = ChartFrame::slice(
                anchor.h.clone(),
                &linalg::basis_vector(m, 0),
                (1..m).map(|i| linalg::basis_vector(m, i)).collect(),
                &z[..n],
            )?;
            let heading = linalg::unit(&z[n..]);
            if let Some(reach) = local.ray_exit(&z[..n], &heading, 1e6)? {
                let d_b = linalg::axpy(&z[..n], reach, &heading);
                anchor = Anchor::new(frame, linalg::add(&anchor.offset, &d_b))?;
                for i in 0..n {
                    z[i] -= d_b[i];
                }
                anchor_scale = distance;
            }
        }
        let grow = if err > 0.0 { (0.9 * (opts.step_tol / err).powf(0.2)).clamp(0.2, 4.0) } else { 4.0 };
        dt = step * grow;
    }
    Err(Error::StepUnderflow { arclength: t })
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessSide {
    pub geodesic_length: f64,
    pub end_coords: Vec<f64>,
    pub boundary_coords: Vec<f64>,
    pub cap_length: f64,
    pub cap_error: f64,
    pub speed_drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiniteLengthWitness {
    pub start: Vec<f64>,
    pub direction: Vec<f64>,
    pub forward: WitnessSide,
    pub backward: WitnessSide,
    /// Length of the whole curve from boundary to boundary.
    pub total: f64,
}

fn witness_side(frame: &ChartFrame, c0: &[f64], dir: &[f64], opts: &GeodesicOptions, quad_tol: f64) -> Result<Option<WitnessSide>> {
    let trace = geodesic_shoot(frame, c0, dir, opts)?;
    if trace.stop != StopReason::NearBoundary || trace.len() < 2 {
        return Ok(None);
    }
    let end = trace.coords[trace.len() - 1].clone();
    let prev = &trace.coords[trace.len() - 2];
    let heading = linalg::sub(&end, prev);
    if linalg::norm(&heading) == 0.0 {
        return Ok(None);
    }
    let heading = linalg::unit(&heading);
    let Some(reach) = frame.ray_exit(&end, &heading, 1e6)? else {
        return Ok(None);
    };
    let target = linalg::axpy(&end, reach, &heading);
    match curve_length(frame, &Segment::new(end.clone(), target.clone()), quad_tol) {
        Ok(cap) => Ok(Some(WitnessSide {
            geodesic_length: trace.length(),
            end_coords: end,
            boundary_coords: target,
            cap_length: cap.length,
            cap_error: cap.error,
            speed_drift: trace.speed_drift,
        })),
        Err(Error::QuadratureDiverged { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// A curve of finite length from `∂B` to `∂B`: the geodesic through the
/// centre in direction `dir`, shot both ways until it is close to the
/// boundary, closed off by straight chart segments whose lengths converge.
/// `None` when either end fails to reach the boundary in finite length.
pub fn finite_length_witness(
    frame: &ChartFrame,
    dir: &[f64],
    opts: &GeodesicOptions,
    quad_tol: f64,
) -> Result<Option<FiniteLengthWitness>> {
    let c0 = frame.center().to_vec();
    let back = linalg::scale(dir, -1.0);
    let Some(forward) = witness_side(frame, &c0, dir, opts, quad_tol)? else {
        return Ok(None);
    };
    let Some(backward) = witness_side(frame, &c0, &back, opts, quad_tol)? else {
        return Ok(None);
    };
    let total = forward.geodesic_length + forward.cap_length + backward.geodesic_length + backward.cap_length;
    Ok(Some(FiniteLengthWitness {
        start: c0,
        direction: dir.to_vec(),
        forward,
        backward,
        total,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::complete::concavity::log_length_bound;
    use crate::homcalc::{HomogeneousPolynomial, SharedFunction};
    use std::sync::Arc;

    fn cubic() -> ChartFrame {
        let h: SharedFunction = Arc::new(HomogeneousPolynomial::parse("x^3 - x*y^2").unwrap());
        ChartFrame::make_chart(h, &[1.0, 0.0], 1e-12).unwrap()
    }

    #[test]
    fn analytic_witness_length() {
        let (_, f) = catalog::analytic_example(2.0).unwrap();
        let w = finite_length_witness(&f, &[1.0], &GeodesicOptions::default(), 1e-10)
            .unwrap()
            .unwrap();
        assert!((w.total - 2f64.sqrt() * std::f64::consts::PI).abs() < 1e-5, "{}", w.total);
    }

    #[test]
    fn cubic_has_no_witness() {
        let f = cubic();
        assert!(finite_length_witness(&f, &[1.0], &GeodesicOptions::default(), 1e-10)
            .unwrap()
            .is_none());
    }

    #[test]
    fn cubic_length_beats_log_bound() {
        let f = cubic();
        let opts = GeodesicOptions {
            min_h: 1e-12,
            boundary_fraction: 0.0,
            ..Default::default()
        };
        let tr = geodesic_shoot(&f, &[0.0], &[1.0], &opts).unwrap();
        assert_eq!(tr.stop, StopReason::MinH);
        assert!(tr.drift_rate() < 1e-6, "{}", tr.speed_drift);
        for j in 1..=12 {
            let level = 10f64.powi(-j);
            let l = tr.length_at_h(level).unwrap();
            assert!(l >= log_length_bound(3.0, 1.0, 1.0, level), "{j}");
        }
        // the length along the chart line matches quadrature, where h̄ = 1 − t²
        let t6 = (1.0 - 1e-6f64).sqrt();
        let q = curve_length(&f, &Segment::new(vec![0.0], vec![t6]), 1e-10).unwrap();
        assert!((q.length - tr.length_at_h(1e-6).unwrap()).abs() < 1e-6 * q.length);
    }

    #[test]
    fn planar_geodesic_in_higher_dimension() {
        let h: SharedFunction = Arc::new(HomogeneousPolynomial::parse("x^3 - x*y^2 - x*z^2").unwrap());
        let f = ChartFrame::make_chart(h, &[1.0, 0.0, 0.0], 1e-12).unwrap();
        let opts = GeodesicOptions {
            max_length: 3.0,
            ..Default::default()
        };
        let tr = geodesic_shoot(&f, &[0.0, 0.0], &[0.6, 0.8], &opts).unwrap();
        assert_eq!(tr.stop, StopReason::MaxLength);
        // rotational symmetry keeps the curve on its initial ray
        for c in &tr.coords {
            assert!((0.8 * c[0] - 0.6 * c[1]).abs() < 1e-8);
        }
        let csv = tr.to_csv();
        assert!(csv.starts_with("t,c_1,c_2,x_0,x_1,x_2,h,cum_length\n"));
        assert_eq!(csv.lines().count(), tr.len() + 1);
    }

    #[test]
    fn zero_direction_rejected() {
        let f = cubic();
        assert!(geodesic_shoot(&f, &[0.0], &[0.0], &GeodesicOptions::default()).is_err());
    }
}
