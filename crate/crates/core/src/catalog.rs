//! Built-in examples and counterexamples with their expected outcomes.

use std::sync::Arc;

use serde::Serialize;

use crate::chart::ChartFrame;
use crate::error::{Error, Result};
use crate::forms::SymmetricForm;
use crate::homcalc::{HomogeneousFunction, HomogeneousPolynomial, SharedFunction, SymTensor3, UPoly};

/// `h(x, y) = (xy/(x+y))^k` on the open quadrant.
/// Value, gradient, Hessian and third derivatives of a planar function.
type WJet = (f64, [f64; 2], [[f64; 2]; 2], [[[f64; 2]; 2]; 2]);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticQuadrantMap {
    k: f64,
}

impl AnalyticQuadrantMap {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 1.0) {
            return Err(Error::Degree(format!("need k > 1, got {k}")));
        }
        Ok(Self { k })
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != 2 {
            return Err(Error::Dimension { expected: 2, got: x.len() });
        }
        if !self.contains(x) {
            return Err(Error::Domain { point: x.to_vec() });
        }
        Ok(())
    }

    /// `w = xy/(x+y)` with its first three derivatives.
    fn w_jet(x: f64, y: f64) -> WJet {
        let s = x + y;
        let (s2, s3, s4) = (s * s, s * s * s, s * s * s * s);
        let w = x * y / s;
        let d1 = [y * y / s2, x * x / s2];
        let d2 = [[-2.0 * y * y / s3, 2.0 * x * y / s3], [2.0 * x * y / s3, -2.0 * x * x / s3]];
        let wxxx = 6.0 * y * y / s4;
        let wxxy = (2.0 * y * y - 4.0 * x * y) / s4;
        let wxyy = (2.0 * x * x - 4.0 * x * y) / s4;
        let wyyy = 6.0 * x * x / s4;
        let d3 = [[[wxxx, wxxy], [wxxy, wxyy]], [[wxxy, wxyy], [wxyy, wyyy]]];
        (w, d1, d2, d3)
    }
}

impl HomogeneousFunction for AnalyticQuadrantMap {
    fn dim(&self) -> usize {
        2
    }

    fn degree(&self) -> f64 {
        self.k
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.len() == 2 && x[0] > 0.0 && x[1] > 0.0
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        let (w, ..) = Self::w_jet(x[0], x[1]);
        Ok(w.powf(self.k))
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        let (w, d1, ..) = Self::w_jet(x[0], x[1]);
        let a = self.k * w.powf(self.k - 1.0);
        Ok(vec![a * d1[0], a * d1[1]])
    }

    fn hessian(&self, x: &[f64]) -> Result<SymmetricForm> {
        self.check(x)?;
        let k = self.k;
        let (w, d1, d2, _) = Self::w_jet(x[0], x[1]);
        let a = k * (k - 1.0) * w.powf(k - 2.0);
        let b = k * w.powf(k - 1.0);
        Ok(SymmetricForm::from_fn(2, |i, j| a * d1[i] * d1[j] + b * d2[i][j]))
    }

    fn third(&self, x: &[f64]) -> Result<SymTensor3> {
        self.check(x)?;
        let k = self.k;
        let (w, d1, d2, d3) = Self::w_jet(x[0], x[1]);
        let a = k * (k - 1.0) * (k - 2.0) * w.powf(k - 3.0);
        let b = k * (k - 1.0) * w.powf(k - 2.0);
        let c = k * w.powf(k - 1.0);
        Ok(SymTensor3::from_upper(2, |i, j, l| {
            a * d1[i] * d1[j] * d1[l]
                + b * (d2[i][j] * d1[l] + d2[i][l] * d1[j] + d2[j][l] * d1[i])
                + c * d3[i][j][l]
        }))
    }

    fn describe(&self) -> String {
        format!("(x*y/(x+y))^{}", self.k)
    }
}

/// The quadrant map together with its chart on `{x + y = 1}`, where the
/// chart coordinate equals `x`. The base point sits over `x = 1/2`.
pub fn analytic_example(k: f64) -> Result<(SharedFunction, ChartFrame)> {
    let h: SharedFunction = Arc::new(AnalyticQuadrantMap::new(k)?);
    let frame = ChartFrame::slice(h.clone(), &[0.0, 1.0], vec![vec![1.0, -1.0]], &[0.5])?;
    Ok((h, frame))
}

/// `η_a(x) = x(1−x)((x − 3/20)² + 51/400 + a)`
pub fn quartic_eta(a: f64) -> UPoly {
    let base = UPoly::new(vec![0.0, 1.0, -1.0]);
    let quad = UPoly::new(vec![9.0 / 400.0 + 51.0 / 400.0 + a, -0.3, 1.0]);
    base.mul(&quad)
}

/// `P_a = (3/4)η_a′² − η_a η_a″`
pub fn quartic_p(a: f64) -> UPoly {
    let e = quartic_eta(a);
    let d1 = e.derivative();
    let d2 = d1.derivative();
    d1.mul(&d1).scale(0.75).sub(&e.mul(&d2))
}

/// `Q = −80x⁴ + 188x³ − 42x² − 24x + 9`
pub fn quartic_q() -> UPoly {
    UPoly::new(vec![9.0, -24.0, -42.0, 188.0, -80.0])
}

/// The closed-form expansion
/// `3(14x²+6x−3)²/1600 + Q a/40 + (4x²−4x+3) a²/4`.
pub fn quartic_p_expansion(a: f64) -> UPoly {
    let l = UPoly::new(vec![-3.0, 6.0, 14.0]);
    l.mul(&l)
        .scale(3.0 / 1600.0)
        .add(&quartic_q().scale(a / 40.0))
        .add(&UPoly::new(vec![3.0, -4.0, 4.0]).scale(a * a / 4.0))
}

/// Bivariate quartic whose restriction to `{y = 1}` is `η_a`:
/// `h_a(x, y) = x(y − x)((x − 3y/20)² + (51/400 + a) y²)`.
pub fn quartic_surface(a: f64) -> Result<HomogeneousPolynomial> {
    let c = 9.0 / 400.0 + 51.0 / 400.0 + a;
    // x(y−x) = xy − x², times x² − (3/10)xy + c y²
    HomogeneousPolynomial::from_terms(
        2,
        4,
        [
            (vec![3, 1], 1.0),
            (vec![2, 2], -0.3),
            (vec![1, 3], c),
            (vec![4, 0], -1.0),
            (vec![3, 1], 0.3),
            (vec![2, 2], -c),
        ],
    )
}

/// `x₀ = −3/14 + √51/14`, the zero of `14x² + 6x − 3` in `[0, 1]`.
pub fn quartic_x0() -> f64 {
    (-3.0 + 51f64.sqrt()) / 14.0
}

/// `η_a(x)η_a″(x)/η_a′(x)²`
pub fn quartic_ratio(a: f64, x: f64) -> f64 {
    let e = quartic_eta(a);
    let d1 = e.derivative();
    let d2 = d1.derivative();
    e.eval(x) * d2.eval(x) / d1.eval(x).powi(2)
}

#[derive(Debug, Clone, Serialize)]
pub struct Claim {
    pub name: String,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Claim {
    pub fn new(name: impl Into<String>, expected: f64, computed: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            expected,
            computed,
            tolerance,
            pass: (computed - expected).abs() <= tolerance,
        }
    }

    /// Passes when `computed` satisfies a one-sided bound.
    pub fn at_least(name: impl Into<String>, bound: f64, computed: f64) -> Self {
        Self {
            name: name.into(),
            expected: bound,
            computed,
            tolerance: 0.0,
            pass: computed > bound,
        }
    }
}

/// Numbers around the quartic family: the double zero of `P_0`, the values
/// of `Q` and `η_0′` there, positivity of `P_a`, and the ratio obstruction.
pub fn quartic_claims() -> Vec<Claim> {
    let x0 = quartic_x0();
    let lin = UPoly::new(vec![-3.0, 6.0, 14.0]);
    let roots: Vec<f64> = lin.real_roots().into_iter().filter(|r| (0.0..=1.0).contains(r)).collect();
    let root = roots.first().copied().unwrap_or(f64::NAN);
    let mut claims = vec![
        Claim::new("x0 (root of 14x^2+6x-3 in [0,1])", x0, root, 1e-12),
        Claim::new("x0 to four digits", 0.2958, x0, 5e-5),
        Claim::new("unique root in [0,1]", 1.0, roots.len() as f64, 0.0),
        Claim::new("P_0(x0)", 0.0, quartic_p(0.0).eval(x0), 1e-9),
        Claim::new("Q(x0)", 2.479, quartic_q().eval(x0), 5e-3),
        Claim::new("eta_0'(x0)", 0.1215, quartic_eta(0.0).derivative().eval(x0), 5e-4),
        Claim::new(
            "eta_0'(x0) closed form",
            -4.0 * x0.powi(3) + 3.9 * x0 * x0 - 0.9 * x0 + 0.15,
            quartic_eta(0.0).derivative().eval(x0),
            1e-14,
        ),
        Claim::new("eta_0(0)", 0.0, quartic_eta(0.0).eval(0.0), 0.0),
        Claim::new("eta_0(1)", 0.0, quartic_eta(0.0).eval(1.0), 1e-15),
    ];
    for a in [0.0, 1.0] {
        let p = quartic_p(a);
        let q = quartic_p_expansion(a);
        let worst = (0..100)
            .map(|i| {
                let x = i as f64 / 99.0;
                (p.eval(x) - q.eval(x)).abs()
            })
            .fold(0.0_f64, f64::max);
        claims.push(Claim::new(format!("P_{a} expansion defect"), 0.0, worst, 1e-10));
    }
    let grid = |i: usize| i as f64 / 9999.0;
    let p0_min = (0..10_000).map(|i| quartic_p(0.0).eval(grid(i))).fold(f64::INFINITY, f64::min);
    claims.push(Claim::at_least("min P_0 on [0,1] (nonnegative)", -1e-12, p0_min));
    for a in [1e-2, 1e-3, 1e-4] {
        let p = quartic_p(a);
        let min = (0..10_000).map(|i| p.eval(grid(i))).fold(f64::INFINITY, f64::min);
        claims.push(Claim::at_least(format!("min P_{a:e} on [0,1]"), 0.0, min));
    }
    let ratios: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|a| quartic_ratio(*a, x0)).collect();
    claims.push(Claim::at_least("ratio at x0, a=1e-4", 0.749, ratios[2]));
    claims.push(Claim::new("ratio at x0, a=0", 0.75, quartic_ratio(0.0, x0), 1e-12));
    claims.push(Claim {
        name: "ratio increases as a decreases".into(),
        expected: 1.0,
        computed: if ratios.windows(2).all(|w| w[0] < w[1]) { 1.0 } else { 0.0 },
        tolerance: 0.0,
        pass: ratios.windows(2).all(|w| w[0] < w[1]) && ratios[2] < 0.75,
    });
    claims
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Source {
    Polynomial { text: String },
    Analytic { k: f64 },
    Quartic { a: f64 },
}

/// Chart request: either a tangent chart at the seed's level-set point or a
/// slice chart over `origin + span(basis)` centred at coordinate `seed`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChartSpec {
    Tangent { seed: Vec<f64> },
    Slice { origin: Vec<f64>, basis: Vec<Vec<f64>>, seed: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expected {
    pub hyperbolic: bool,
    pub regular: Option<bool>,
    pub status: &'static str,
    pub route: Option<&'static str>,
    pub numbers: Vec<(&'static str, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub description: &'static str,
    pub source: Source,
    pub chart: ChartSpec,
    pub expected: Expected,
}

impl CatalogEntry {
    pub fn function(&self) -> Result<SharedFunction> {
        Ok(match &self.source {
            Source::Polynomial { text } => Arc::new(HomogeneousPolynomial::parse(text)?),
            Source::Analytic { k } => Arc::new(AnalyticQuadrantMap::new(*k)?),
            Source::Quartic { a } => Arc::new(quartic_surface(*a)?),
        })
    }

    pub fn frame(&self) -> Result<ChartFrame> {
        let h = self.function()?;
        build_frame(h, &self.chart, 1e-12)
    }

    pub fn is_cubic_polynomial(&self) -> bool {
        matches!(&self.source, Source::Polynomial { text }
            if HomogeneousPolynomial::parse(text).is_ok_and(|p| p.degree() == 3))
    }
}

pub fn build_frame(h: SharedFunction, spec: &ChartSpec, tol: f64) -> Result<ChartFrame> {
    match spec {
        ChartSpec::Tangent { seed } => ChartFrame::make_chart(h, seed, tol),
        ChartSpec::Slice { origin, basis, seed } => ChartFrame::slice(h, origin, basis.clone(), seed),
    }
}

fn cubic(id: &'static str, description: &'static str, text: &str, seed: &[f64], regular: bool) -> CatalogEntry {
    CatalogEntry {
        id,
        description,
        source: Source::Polynomial { text: text.into() },
        chart: ChartSpec::Tangent { seed: seed.to_vec() },
        expected: Expected {
            hyperbolic: true,
            regular: Some(regular),
            status: "complete",
            route: Some("cubic-criterion"),
            numbers: Vec::new(),
        },
    }
}

/// The two planar cubic curves: one with regular boundary behaviour, one
/// without; both complete.
pub fn cubic_curves() -> Vec<CatalogEntry> {
    vec![
        cubic(
            "cubic-regular",
            "x(x^2 - y^2) = 1, x > 0; regular boundary, complete",
            "x^3 - x*y^2",
            &[1.0, 0.0],
            true,
        ),
        cubic(
            "cubic-nonregular",
            "x^2 y = 1, x > 0; gradient vanishes on the face x = 0, still complete",
            "x^2*y",
            &[1.0, 1.0],
            false,
        ),
    ]
}

pub fn analytic_entry(k: f64) -> CatalogEntry {
    CatalogEntry {
        id: "analytic",
        description: "(xy/(x+y))^k on the quadrant; concave u = x(1-x) yet incomplete",
        source: Source::Analytic { k },
        chart: ChartSpec::Slice {
            origin: vec![0.0, 1.0],
            basis: vec![vec![1.0, -1.0]],
            seed: vec![0.5],
        },
        expected: Expected {
            hyperbolic: true,
            regular: None,
            status: "incomplete",
            route: Some("finite-length-witness"),
            numbers: vec![("total length", std::f64::consts::SQRT_2 * std::f64::consts::PI, 1e-6)],
        },
    }
}

pub fn entries() -> Vec<CatalogEntry> {
    let mut v = cubic_curves();
    v.push(cubic(
        "cubic-cone3",
        "x(x^2 - y^2 - z^2) = 1 inside the round cone; regular, complete",
        "x^3 - x*y^2 - x*z^2",
        &[1.0, 0.0, 0.0],
        true,
    ));
    v.push(cubic(
        "cubic-xyz",
        "xyz = 1 in the positive octant; singular edges, complete",
        "x*y*z",
        &[1.0, 1.0, 1.0],
        false,
    ));
    v.push(analytic_entry(2.0));
    v.push(CatalogEntry {
        id: "quartic",
        description: "x(y-x)((x-3y/20)^2 + (51/400+a)y^2) with a = 1e-4; no uniform concavity constant",
        source: Source::Quartic { a: 1e-4 },
        chart: ChartSpec::Slice {
            origin: vec![0.0, 1.0],
            basis: vec![vec![1.0, 0.0]],
            seed: vec![0.5],
        },
        expected: Expected {
            hyperbolic: true,
            regular: Some(true),
            status: "complete",
            route: Some("regular-boundary"),
            numbers: Vec::new(),
        },
    });
    v.push(CatalogEntry {
        id: "open-piece",
        description: "y(x^2 + y^2) = 1 near (3, 0.11): locally convex but not closed",
        source: Source::Polynomial {
            text: "x^2*y + y^3".into(),
        },
        chart: ChartSpec::Tangent { seed: vec![3.0, 0.11] },
        expected: Expected {
            hyperbolic: true,
            regular: None,
            status: "inconclusive",
            route: None,
            numbers: Vec::new(),
        },
    });
    v
}

pub fn get(id: &str) -> Option<CatalogEntry> {
    entries().into_iter().find(|e| e.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::MetricMethod;
    use crate::homcalc::{euler_residual, homogeneity_defect, position_identity_residual};

    fn fd_check(h: &AnalyticQuadrantMap, x: [f64; 2]) {
        let e = 1e-6;
        for i in 0..2 {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += e;
            xm[i] -= e;
            let dv = (h.value(&xp).unwrap() - h.value(&xm).unwrap()) / (2.0 * e);
            let g = h.gradient(&x).unwrap();
            assert!((dv - g[i]).abs() < 1e-7 * (1.0 + g[i].abs()));
            let gp = h.gradient(&xp).unwrap();
            let gm = h.gradient(&xm).unwrap();
            let hs = h.hessian(&x).unwrap();
            let tp = h.hessian(&xp).unwrap();
            let tm = h.hessian(&xm).unwrap();
            let t = h.third(&x).unwrap();
            for j in 0..2 {
                let d2 = (gp[j] - gm[j]) / (2.0 * e);
                assert!((d2 - hs.get(i, j)).abs() < 1e-7 * (1.0 + hs.scale()));
                for l in 0..2 {
                    let d3 = (tp.get(j, l) - tm.get(j, l)) / (2.0 * e);
                    assert!((d3 - t.get(i, j, l)).abs() < 1e-7 * (1.0 + t.max_abs()));
                }
            }
        }
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        for k in [1.5, 2.0, 3.0, 4.5] {
            let h = AnalyticQuadrantMap::new(k).unwrap();
            for x in [[1.0, 1.0], [0.3, 1.7], [2.0, 0.5]] {
                fd_check(&h, x);
                assert!(euler_residual(&h, &x).unwrap().abs() < 1e-10);
                assert!(position_identity_residual(&h, &x).unwrap() < 1e-9);
                assert!(homogeneity_defect(&h, &x, 3.7).unwrap() < 1e-8);
            }
        }
        let h2 = AnalyticQuadrantMap::new(2.0).unwrap();
        assert_eq!(h2.value(&[1.0, 1.0]).unwrap(), 0.25);
        assert!(h2.value(&[-1.0, 1.0]).is_err());
        assert!(AnalyticQuadrantMap::new(1.0).is_err());
    }

    #[test]
    fn analytic_chart_metric() {
        for k in [2.0, 3.0] {
            let (_, f) = analytic_example(k).unwrap();
            let g = f.chart_metric(&[0.5], MetricMethod::UFormula).unwrap();
            assert!((g.get(0, 0) - 8.0).abs() < 1e-12);
            let g = f.chart_metric(&[0.25], MetricMethod::Pullback).unwrap();
            assert!((g.get(0, 0) - 32.0 / 3.0).abs() < 1e-11);
            let u = f.hbar(&[0.5]).unwrap().powf(1.0 / k);
            assert!((u - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn quartic_basics() {
        let e = quartic_eta(0.0);
        assert_eq!(e.eval(0.0), 0.0);
        assert!(e.eval(1.0).abs() < 1e-15);
        assert!((e.eval(0.5) - 0.0625).abs() < 1e-15);
        let s = quartic_surface(0.3).unwrap();
        let e3 = quartic_eta(0.3);
        for x in [0.1, 0.4, 0.9] {
            assert!((s.eval(&[x, 1.0]) - e3.eval(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn claims_hold() {
        for c in quartic_claims() {
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn entries_build() {
        for e in entries() {
            e.frame().unwrap_or_else(|err| panic!("{}: {err}", e.id));
        }
        assert!(get("cubic-regular").is_some());
        assert!(get("nope").is_none());
    }
}
