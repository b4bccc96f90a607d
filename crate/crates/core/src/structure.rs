//! Induced centroaffine structure in a chart: connection, volume form, cubic
//! form, and residuals of the intrinsic structure equations.
//!
//! The embedding is `φ(c) = m(y) y` with `y = o + Σ c_i b_i` and
//! `m = h^{−1/k}`. Its first and second derivatives are exact in terms of
//! the derivatives of `h`; only derivatives of derived quantities (Γ, g, C)
//! use central differences.

use serde::Serialize;

use crate::chart::ChartFrame;
use crate::error::{Error, Result};
use crate::forms::SymmetricForm;
use crate::homcalc::SymTensor3;
use crate::linalg;

const MAX_FRAME_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CubicMethod {
    /// `∇g` from finite differences of the metric plus Γ-corrections.
    NablaG,
    /// `−2H` on tangent vectors; cubic polynomials only.
    Polarization,
    /// `−(1/k)∇³h` on tangent vectors at the hypersurface point.
    ThirdDerivative,
}

#[derive(Debug, Clone)]
pub struct ConnectionSample {
    pub coords: Vec<f64>,
    n: usize,
    gamma: Vec<f64>,
    pub metric: SymmetricForm,
    pub condition: f64,
}

impl ConnectionSample {
    /// `Γ^l_{ij}`
    pub fn gamma(&self, l: usize, i: usize, j: usize) -> f64 {
        self.gamma[(l * self.n + i) * self.n + j]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest `|Γ^l_{ij} − Γ^l_{ji}|`.
    pub fn torsion(&self) -> f64 {
        let n = self.n;
        let mut t = 0.0_f64;
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    t = t.max((self.gamma(l, i, j) - self.gamma(l, j, i)).abs());
                }
            }
        }
        t
    }
}

#[derive(Debug, Clone)]
pub struct CubicFormSample {
    pub coords: Vec<f64>,
    pub tensor: SymTensor3,
    /// Largest deviation from total symmetry before symmetrization.
    pub asymmetry: f64,
}

/// Exact embedding derivatives at a chart point.
pub(crate) struct Jet {
    pub phi: Vec<f64>,
    pub d1: Vec<Vec<f64>>,
    pub d2: Vec<Vec<Vec<f64>>>,
}

pub(crate) fn jet(frame: &ChartFrame, c: &[f64]) -> Result<Jet> {
    let h = frame.h();
    let k = frame.k();
    let y = frame.ambient(c);
    if !h.contains(&y) {
        return Err(Error::Domain { point: y });
    }
    let hv = h.value(&y)?;
    if hv.is_nan() || hv <= 0.0 {
        return Err(Error::NonPositive { point: y, value: hv });
    }
    let n = frame.n();
    let b = frame.basis();
    let grad = h.gradient(&y)?;
    let hess = h.hessian(&y)?.gram(b);
    let hi: Vec<f64> = b.iter().map(|v| linalg::dot(&grad, v)).collect();
    let m = (-hv.ln() / k).exp();
    let mi: Vec<f64> = hi.iter().map(|x| -m * x / (k * hv)).collect();
    let mij = |i: usize, j: usize| -m / k * (hess.get(i, j) / hv - (1.0 + 1.0 / k) * hi[i] * hi[j] / (hv * hv));
    let phi = linalg::scale(&y, m);
    let d1 = (0..n).map(|i| linalg::axpy(&linalg::scale(&b[i], m), mi[i], &y)).collect();
    let d2 = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = linalg::axpy(&linalg::scale(&b[i], mi[j]), mi[i], &b[j]);
                    linalg::axpy(&v, mij(i, j), &y)
                })
                .collect()
        })
        .collect();
    Ok(Jet { phi, d1, d2 })
}

/// Decomposes `∂_i∂_j φ = Γ^l_{ij} ∂_l φ + g_{ij} φ`.
pub fn gauss_split(frame: &ChartFrame, c: &[f64]) -> Result<ConnectionSample> {
    let j = jet(frame, c)?;
    let n = frame.n();
    let mut cols = j.d1.clone();
    cols.push(j.phi.clone());
    let mat = linalg::columns(&cols);
    let condition = linalg::condition_number(&mat);
    if !(condition <= MAX_FRAME_CONDITION) {
        return Err(Error::IllConditioned { cond: condition });
    }
    let lu = mat.lu();
    let mut gamma = vec![0.0; n * n * n];
    let mut g = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in a..n {
            let rhs = nalgebra::DVector::from_column_slice(&j.d2[a][b]);
            let sol = lu.solve(&rhs).ok_or(Error::IllConditioned { cond: condition })?;
            for l in 0..n {
                gamma[(l * n + a) * n + b] = sol[l];
                gamma[(l * n + b) * n + a] = sol[l];
            }
            g[a][b] = sol[n];
            g[b][a] = sol[n];
        }
    }
    Ok(ConnectionSample {
        coords: c.to_vec(),
        n,
        gamma,
        metric: SymmetricForm::from_fn(n, |a, b| g[a][b]),
        condition,
    })
}

/// `det(ξ, ∂_1φ, …, ∂_nφ)`
pub fn volume_form(frame: &ChartFrame, c: &[f64]) -> Result<f64> {
    let j = jet(frame, c)?;
    let mut cols = vec![j.phi];
    cols.extend(j.d1);
    Ok(linalg::columns(&cols).determinant())
}

/// Default finite-difference step: `1e−4` times the chart distance to the
/// boundary.
pub fn default_fd_step(frame: &ChartFrame, c: &[f64]) -> Result<f64> {
    let d = frame.boundary_distance(c)?;
    Ok(1e-4 * if d.is_finite() { d } else { 1.0 })
}

fn shifted(c: &[f64], i: usize, delta: f64) -> Vec<f64> {
    let mut v = c.to_vec();
    v[i] += delta;
    v
}

/// Central-difference derivatives `∂_i g` of the Gauss-split metric.
pub fn metric_derivatives(frame: &ChartFrame, c: &[f64], fd_step: f64) -> Result<Vec<SymmetricForm>> {
    (0..frame.n())
        .map(|i| {
            let gp = gauss_split(frame, &shifted(c, i, fd_step))?.metric;
            let gm = gauss_split(frame, &shifted(c, i, -fd_step))?.metric;
            Ok(gp.plus(&gm.scaled(-1.0)).scaled(0.5 / fd_step))
        })
        .collect()
}

/// Cubic form `C = ∇g` in chart coordinates.
pub fn cubic_form(frame: &ChartFrame, c: &[f64], method: CubicMethod, fd_step: f64) -> Result<CubicFormSample> {
    let n = frame.n();
    match method {
        CubicMethod::NablaG => {
            let conn = gauss_split(frame, c)?;
            let dg = metric_derivatives(frame, c, fd_step)?;
            let g = &conn.metric;
            let raw = |i: usize, j: usize, l: usize| {
                let mut v = dg[i].get(j, l);
                for m in 0..n {
                    v -= conn.gamma(m, i, j) * g.get(m, l) + conn.gamma(m, i, l) * g.get(j, m);
                }
                v
            };
            let mut asym = 0.0_f64;
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        asym = asym.max((raw(i, j, l) - raw(j, i, l)).abs());
                    }
                }
            }
            Ok(CubicFormSample {
                coords: c.to_vec(),
                tensor: SymTensor3::symmetrized(n, raw),
                asymmetry: asym,
            })
        }
        CubicMethod::Polarization => {
            let poly = frame
                .h()
                .as_polynomial()
                .ok_or_else(|| Error::Degree("polarization needs a cubic polynomial".into()))?;
            let hh = poly.polarization()?;
            let j = jet(frame, c)?;
            Ok(CubicFormSample {
                coords: c.to_vec(),
                tensor: hh.gram(&j.d1).scaled(-2.0),
                asymmetry: 0.0,
            })
        }
        CubicMethod::ThirdDerivative => {
            let j = jet(frame, c)?;
            let t = frame.h().third(&j.phi)?;
            Ok(CubicFormSample {
                coords: c.to_vec(),
                tensor: t.gram(&j.d1).scaled(-1.0 / frame.k()),
                asymmetry: 0.0,
            })
        }
    }
}

/// `g_{ij} = −2H(ξ, ∂_iφ, ∂_jφ)` for cubic polynomials.
pub fn metric_from_polarization(frame: &ChartFrame, c: &[f64]) -> Result<SymmetricForm> {
    let poly = frame
        .h()
        .as_polynomial()
        .ok_or_else(|| Error::Degree("polarization needs a cubic polynomial".into()))?;
    let hh = poly.polarization()?;
    let j = jet(frame, c)?;
    Ok(hh.contract(&j.phi).gram(&j.d1).scaled(-2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    /// Max-norm of the defect.
    pub value: f64,
    /// Max-norm of the target quantity, for relative comparisons.
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        self.value / self.scale.max(1.0)
    }
}

/// Defect of `(∇_X C)(Y,Z,W) = g(X,Y)g(Z,W) + g(X,Z)g(Y,W) + g(X,W)g(Y,Z)`,
/// with `∂C` by central differences of the exact cubic form.
pub fn fund_equation_residual(frame: &ChartFrame, c: &[f64], fd_step: f64) -> Result<Residual> {
    if frame.k() != 3.0 {
        return Err(Error::Degree(format!(
            "the fundamental equation applies to cubics, got degree {}",
            frame.k()
        )));
    }
    let n = frame.n();
    let conn = gauss_split(frame, c)?;
    let cc = cubic_form(frame, c, CubicMethod::ThirdDerivative, fd_step)?.tensor;
    let dc: Vec<SymTensor3> = (0..n)
        .map(|i| {
            let p = cubic_form(frame, &shifted(c, i, fd_step), CubicMethod::ThirdDerivative, fd_step)?.tensor;
            let m = cubic_form(frame, &shifted(c, i, -fd_step), CubicMethod::ThirdDerivative, fd_step)?.tensor;
            Ok(SymTensor3::from_upper(n, |a, b, d| (p.get(a, b, d) - m.get(a, b, d)) / (2.0 * fd_step)))
        })
        .collect::<Result<_>>()?;
    let g = &conn.metric;
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = dc[i].get(j, k, l);
                    for m in 0..n {
                        v -= conn.gamma(m, i, j) * cc.get(m, k, l)
                            + conn.gamma(m, i, k) * cc.get(j, m, l)
                            + conn.gamma(m, i, l) * cc.get(j, k, m);
                    }
                    let target = g.get(i, j) * g.get(k, l) + g.get(i, k) * g.get(j, l) + g.get(i, l) * g.get(j, k);
                    worst = worst.max((v - target).abs());
                    scale = scale.max(target.abs());
                }
            }
        }
    }
    Ok(Residual { value: worst, scale })
}

/// Max-norm of `R^l_{ijk} + (g_{jk}δ^l_i − g_{ik}δ^l_j)` given Γ, its
/// derivatives `dgamma[i]` (a full `ConnectionSample`-shaped table per
/// coordinate), and g.
pub fn curvature_mismatch(
    n: usize,
    gamma: impl Fn(usize, usize, usize) -> f64,
    dgamma: impl Fn(usize, usize, usize, usize) -> f64,
    g: &SymmetricForm,
) -> Residual {
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut r = dgamma(i, l, j, k) - dgamma(j, l, i, k);
                    for m in 0..n {
                        r += gamma(l, i, m) * gamma(m, j, k) - gamma(l, j, m) * gamma(m, i, k);
                    }
                    let target = -(g.get(j, k) * delta(l, i) - g.get(i, k) * delta(l, j));
                    worst = worst.max((r - target).abs());
                    scale = scale.max(target.abs());
                }
            }
        }
    }
    Residual { value: worst, scale }
}

/// Defect of `R(X,Y)Z = −(g(Y,Z)X − g(X,Z)Y)` with Γ differentiated
/// numerically.
pub fn curvature_residual(frame: &ChartFrame, c: &[f64], fd_step: f64) -> Result<Residual> {
    let n = frame.n();
    let conn = gauss_split(frame, c)?;
    let derivs: Vec<(ConnectionSample, ConnectionSample)> = (0..n)
        .map(|i| {
            Ok((
                gauss_split(frame, &shifted(c, i, fd_step))?,
                gauss_split(frame, &shifted(c, i, -fd_step))?,
            ))
        })
        .collect::<Result<_>>()?;
    Ok(curvature_mismatch(
        n,
        |l, i, j| conn.gamma(l, i, j),
        |d, l, i, j| (derivs[d].0.gamma(l, i, j) - derivs[d].1.gamma(l, i, j)) / (2.0 * fd_step),
        &conn.metric,
    ))
}

/// `max_i |∂_iν − Γ^j_{ji} ν| / |ν|`
pub fn volume_parallel_residual(frame: &ChartFrame, c: &[f64], fd_step: f64) -> Result<f64> {
    let n = frame.n();
    let conn = gauss_split(frame, c)?;
    let nu = volume_form(frame, c)?;
    let mut worst = 0.0_f64;
    for i in 0..n {
        let dnu = (volume_form(frame, &shifted(c, i, fd_step))? - volume_form(frame, &shifted(c, i, -fd_step))?)
            / (2.0 * fd_step);
        let trace: f64 = (0..n).map(|j| conn.gamma(j, j, i)).sum();
        worst = worst.max((dnu - trace * nu).abs());
    }
    Ok(worst / nu.abs())
}
