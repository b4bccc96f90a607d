//! Run configuration, analysis and reproduction reports, the fixed-precision
//! JSON writer, and SVG plots of planar curves.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;
use serde_json::Value;

use crate::boundary::{self, RegularityReport};
use crate::catalog::{self, Claim};
use crate::chart::{self, ChartFrame, ChartKind, MetricClass, MetricMethod, METRIC_METHODS};
use crate::complete::{
    self, curve_length, geodesic_shoot, Attempt, CompletenessVerdict, CurveTrace, Evidence, GeodesicOptions,
    Segment, Status, VerdictConfig,
};
use crate::error::{Error, Result};
use crate::homcalc::{self, HomogeneousPolynomial, SharedFunction};
use crate::linalg;
use crate::par::Exec;
use crate::sampling;
use crate::structure;

pub const SCHEMA: u32 = 1;
/// Chart points used for the identity residuals.
pub const RESIDUAL_POINTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputSource {
    /// Polynomial in the text syntax of [`HomogeneousPolynomial::parse`].
    Polynomial { text: String },
    /// Polynomial in the JSON term-list format.
    PolynomialJson { json: String },
    /// Catalog entry; `k` overrides the degree of the analytic example.
    Example { id: String, k: Option<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub source: InputSource,
    /// Seed point for a tangent chart. Required for polynomial input.
    pub seed: Option<Vec<f64>>,
    pub tol_def: f64,
    pub tol_quad: f64,
    /// Finite-difference step; `None` picks one per point.
    pub fd_step: Option<f64>,
    /// Chart samples for the signature classification.
    pub samples: usize,
    pub eps_grid: Option<Vec<f64>>,
    pub rng_seed: u64,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            source: InputSource::Polynomial { text: String::new() },
            seed: None,
            tol_def: 1e-9,
            tol_quad: 1e-10,
            fd_step: None,
            samples: 200,
            eps_grid: None,
            rng_seed: 0,
            exec: Exec::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tol-def", self.tol_def), ("tol-quad", self.tol_quad)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::pre(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(h) = self.fd_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::pre(format!("fd-step must be positive, got {h}")));
            }
        }
        if self.samples == 0 {
            return Err(Error::pre("samples must be positive"));
        }
        if let Some(grid) = &self.eps_grid {
            if grid.is_empty() || grid.iter().any(|e| !(*e > 0.0)) {
                return Err(Error::pre("ε grid entries must be positive"));
            }
        }
        Ok(())
    }

    pub fn function(&self) -> Result<SharedFunction> {
        Ok(match &self.source {
            InputSource::Polynomial { text } => Arc::new(HomogeneousPolynomial::parse(text)?),
            InputSource::PolynomialJson { json } => Arc::new(HomogeneousPolynomial::from_json_str(json)?),
            InputSource::Example { .. } => self.entry()?.function()?,
        })
    }

    fn entry(&self) -> Result<catalog::CatalogEntry> {
        let InputSource::Example { id, k } = &self.source else {
            return Err(Error::pre("not a catalog input"));
        };
        if id == "analytic" {
            return Ok(catalog::analytic_entry(k.unwrap_or(2.0)));
        }
        if k.is_some() {
            return Err(Error::pre("--k applies to the analytic example only"));
        }
        catalog::get(id).ok_or_else(|| {
            let ids: Vec<&str> = catalog::entries().iter().map(|e| e.id).collect();
            Error::pre(format!("unknown example `{id}`; known: {}", ids.join(", ")))
        })
    }

    /// Chart of the component through the seed, or the catalog chart.
    pub fn frame(&self) -> Result<ChartFrame> {
        self.validate()?;
        let h = self.function()?;
        if let Some(seed) = &self.seed {
            if seed.len() != h.dim() {
                return Err(Error::Dimension {
                    expected: h.dim(),
                    got: seed.len(),
                });
            }
            return ChartFrame::make_chart(h, seed, 1e-12);
        }
        match &self.source {
            InputSource::Example { .. } => catalog::build_frame(h, &self.entry()?.chart, 1e-12),
            _ => Err(Error::pre("a seed point is required for polynomial input")),
        }
    }

    pub fn verdict_config(&self) -> VerdictConfig {
        VerdictConfig {
            eps_grid: self.eps_grid.clone(),
            tol: self.tol_def,
            quad_tol: self.tol_quad,
            exec: self.exec,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChartSummary {
    pub kind: ChartKind,
    pub n: usize,
    pub degree: f64,
    /// Level-set point at the chart centre.
    pub p: Vec<f64>,
    pub origin: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
    pub center: Vec<f64>,
}

impl ChartSummary {
    fn of(frame: &ChartFrame) -> Self {
        Self {
            kind: frame.kind(),
            n: frame.n(),
            degree: frame.k(),
            p: frame.p().to_vec(),
            origin: frame.origin().to_vec(),
            basis: frame.basis().to_vec(),
            center: frame.center().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationSummary {
    pub aggregate: MetricClass,
    pub samples: usize,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub witnesses: Vec<chart::ClassSample>,
}

/// Largest identity defects over the residual sample, each relative to the
/// size of the quantity it tests. `None` where the identity does not apply.
#[derive(Debug, Clone, Serialize)]
pub struct Residuals {
    pub points: usize,
    pub euler: f64,
    pub position_identity: f64,
    pub metric_disagreement: f64,
    pub cone_identity: Option<f64>,
    pub fund_equation: Option<f64>,
    pub curvature: Option<f64>,
    pub volume_parallel: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub source: String,
    pub config: RunConfig,
    pub chart: ChartSummary,
    pub classification: ClassificationSummary,
    pub regularity: Option<RegularityReport>,
    pub verdict: CompletenessVerdict,
    pub residuals: Residuals,
    /// Set when the chart is not known to cover the whole component.
    pub chart_coverage_assumed: bool,
}

impl AnalysisReport {
    /// 0 for a decided verdict, 2 for an inconclusive one.
    pub fn exit_code(&self) -> i32 {
        if self.verdict.status.is_decided() {
            0
        } else {
            2
        }
    }
}

/// Points of `B` drawn from the run's RNG: a random direction and a radius
/// up to 90% of the exit distance.
pub fn random_chart_points(frame: &ChartFrame, count: usize, rng_seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut rng = sampling::rng(rng_seed);
    let c0 = frame.center();
    (0..count)
        .map(|_| {
            let d = sampling::random_unit(&mut rng, frame.n());
            let reach = frame.ray_exit(c0, &d, 1e3)?.unwrap_or(1e3);
            let r = 0.9 * reach * rng.random::<f64>();
            Ok(linalg::axpy(c0, r, &d))
        })
        .collect()
}

fn fd_step_at(frame: &ChartFrame, c: &[f64], fd: Option<f64>) -> Result<f64> {
    match fd {
        Some(h) => Ok(h),
        None => structure::default_fd_step(frame, c),
    }
}

pub fn residuals(frame: &ChartFrame, points: &[Vec<f64>], fd_step: Option<f64>) -> Result<Residuals> {
    let h = frame.h();
    let k = frame.k();
    let mut r = Residuals {
        points: points.len(),
        euler: 0.0,
        position_identity: 0.0,
        metric_disagreement: 0.0,
        cone_identity: Some(0.0),
        fund_equation: (k == 3.0).then_some(0.0),
        curvature: Some(0.0),
        volume_parallel: Some(0.0),
    };
    let bump = |slot: &mut Option<f64>, v: Result<f64>| {
        *slot = match (*slot, v) {
            (Some(a), Ok(b)) => Some(a.max(b)),
            _ => None,
        }
    };
    for c in points {
        let q = frame.embed(c)?;
        let hq = h.value(&q)?;
        let grad = h.gradient(&q)?;
        r.euler = r.euler.max(homcalc::euler_residual(h.as_ref(), &q)?.abs() / (k * hq).abs().max(1e-300));
        r.position_identity = r
            .position_identity
            .max(homcalc::position_identity_residual(h.as_ref(), &q)? / linalg::max_abs(&grad).max(1e-300));
        let forms: Vec<_> = METRIC_METHODS
            .iter()
            .map(|m| frame.chart_metric(c, *m))
            .collect::<Result<_>>()?;
        r.metric_disagreement = r.metric_disagreement.max(chart::metric_disagreement(&forms));
        let step = fd_step_at(frame, c, fd_step)?;
        bump(&mut r.cone_identity, frame.cone_identity_residual(&linalg::scale(&q, 1.5), step));
        if r.fund_equation.is_some() {
            bump(
                &mut r.fund_equation,
                structure::fund_equation_residual(frame, c, step).map(|x| x.relative()),
            );
        }
        bump(
            &mut r.curvature,
            structure::curvature_residual(frame, c, step).map(|x| x.relative()),
        );
        bump(&mut r.volume_parallel, structure::volume_parallel_residual(frame, c, step));
    }
    Ok(r)
}

/// Signature classification, boundary regularity, completeness verdict and
/// identity residuals for one input. Errors are input errors.
pub fn run_analyze(config: &RunConfig) -> Result<AnalysisReport> {
    let frame = config.frame()?;
    let cls = frame.classify(config.samples, config.tol_def, config.exec)?;
    let classification = ClassificationSummary {
        aggregate: cls.aggregate,
        samples: cls.samples.len(),
        min_eigenvalue: cls.samples.iter().map(|s| s.min_eigenvalue).fold(f64::INFINITY, f64::min),
        max_eigenvalue: cls.samples.iter().map(|s| s.max_eigenvalue).fold(f64::NEG_INFINITY, f64::max),
        witnesses: cls.witnesses.clone(),
    };
    let n = frame.n();
    let dirs = sampling::directions(n, boundary::default_direction_count(n));
    let regularity = match boundary::boundary_scan(&frame, &dirs, config.exec) {
        Ok(points) => Some(boundary::regularity_report(&frame, &points, config.tol_def, config.exec)),
        Err(Error::ClosednessFailure { .. }) => None,
        Err(e) => return Err(e),
    };
    let verdict = if cls.aggregate == MetricClass::Hyperbolic {
        complete::completeness_verdict(&frame, &config.verdict_config())
    } else {
        CompletenessVerdict {
            status: Status::Inconclusive,
            route: None,
            evidence: Evidence {
                attempts: vec![Attempt {
                    route: "hyperbolicity".into(),
                    outcome: format!("metric is {:?} on the sample", cls.aggregate).to_lowercase(),
                }],
                ..Default::default()
            },
        }
    };
    let points = random_chart_points(&frame, RESIDUAL_POINTS, config.rng_seed)?;
    let residuals = residuals(&frame, &points, config.fd_step)?;
    let closed = verdict.evidence.closedness.as_ref().map_or(regularity.is_some(), |c| c.closed);
    Ok(AnalysisReport {
        schema: SCHEMA,
        source: frame.h().describe(),
        config: config.clone(),
        chart: ChartSummary::of(&frame),
        classification,
        regularity,
        chart_coverage_assumed: !closed || frame.h().as_polynomial().is_none(),
        verdict,
        residuals,
    })
}

/// Geodesic from the chart centre along the first coordinate direction.
pub fn default_trace(frame: &ChartFrame) -> Result<CurveTrace> {
    let mut dir = vec![0.0; frame.n()];
    dir[0] = 1.0;
    geodesic_shoot(frame, frame.center(), &dir, &GeodesicOptions::default())
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproBlock {
    pub name: &'static str,
    pub claims: Vec<Claim>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproReport {
    pub schema: u32,
    pub blocks: Vec<ReproBlock>,
    pub pass: bool,
}

impl ReproReport {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    /// Plain-text table: claim, expected, computed, tolerance, status.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            let _ = writeln!(out, "[{}]", b.name);
            for c in &b.claims {
                let _ = writeln!(
                    out,
                    "  {:<44} expected {:>22} computed {:>22} tol {:>9.1e}  {}",
                    c.name,
                    fmt17(c.expected),
                    fmt17(c.computed),
                    c.tolerance,
                    if c.pass { "PASS" } else { "FAIL" }
                );
            }
        }
        out
    }
}

fn analytic_claims(tol_quad: f64, exec: Exec) -> Result<Vec<Claim>> {
    let target = std::f64::consts::SQRT_2 * std::f64::consts::PI;
    let (_, frame) = catalog::analytic_example(2.0)?;
    let mut worst = 0.0_f64;
    for i in 1..100 {
        let x = i as f64 / 100.0;
        let g = frame.chart_metric(&[x], MetricMethod::PsiFormula)?.get(0, 0);
        let exact = 2.0 / (x * (1.0 - x));
        worst = worst.max((g - exact).abs() / exact);
    }
    let length = curve_length(&frame, &Segment::new(vec![0.0], vec![1.0]), tol_quad)?;
    let config = VerdictConfig {
        quad_tol: tol_quad,
        exec,
        ..Default::default()
    };
    let v = complete::completeness_verdict(&frame, &config);
    let witness = v.evidence.witness.as_ref().map_or(f64::NAN, |w| w.total);
    Ok(vec![
        Claim::new("metric vs 2/(x(1-x)), relative", 0.0, worst, 1e-10),
        Claim::new("length of the chart segment", target, length.length, 1e-6),
        Claim::new(
            "verdict is incomplete",
            1.0,
            if v.status == Status::Incomplete { 1.0 } else { 0.0 },
            0.0,
        ),
        Claim::new("witness curve length", target, witness, 1e-5),
    ])
}

fn identity_claims(fd_step: Option<f64>, rng_seed: u64) -> Result<Vec<Claim>> {
    let mut euler = 0.0_f64;
    let mut position = 0.0_f64;
    let mut metric = 0.0_f64;
    let mut fund = 0.0_f64;
    let mut curvature = 0.0_f64;
    for entry in catalog::entries().into_iter().filter(|e| e.is_cubic_polynomial()) {
        let frame = entry.frame()?;
        let points = random_chart_points(&frame, RESIDUAL_POINTS, rng_seed)?;
        let r = residuals(&frame, &points, fd_step)?;
        euler = euler.max(r.euler);
        position = position.max(r.position_identity);
        metric = metric.max(r.metric_disagreement);
        fund = fund.max(r.fund_equation.unwrap_or(f64::NAN));
        curvature = curvature.max(r.curvature.unwrap_or(f64::NAN));
    }
    Ok(vec![
        Claim::new("Euler identity, max relative", 0.0, euler, 1e-12),
        Claim::new("position identity, max relative", 0.0, position, 1e-10),
        Claim::new("metric formulas, max disagreement", 0.0, metric, 1e-8),
        Claim::new("fundamental equation, max relative", 0.0, fund, 1e-4),
        Claim::new("curvature identity, max relative", 0.0, curvature, 1e-4),
    ])
}

/// Quartic numbers, the analytic example's length and verdict, and the
/// identity residuals on the catalog cubics.
pub fn run_repro(config: &RunConfig) -> Result<ReproReport> {
    config.validate()?;
    let blocks = vec![
        ReproBlock {
            name: "quartic",
            claims: catalog::quartic_claims(),
        },
        ReproBlock {
            name: "analytic",
            claims: analytic_claims(config.tol_quad, config.exec)?,
        },
        ReproBlock {
            name: "identities",
            claims: identity_claims(config.fd_step, config.rng_seed)?,
        },
    ];
    let pass = blocks.iter().all(|b| b.claims.iter().all(|c| c.pass));
    Ok(ReproReport {
        schema: SCHEMA,
        blocks,
        pass,
    })
}

/// `x` with 17 significant digits in scientific notation.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

/// Pretty JSON in which every float carries 17 significant digits, so the
/// text round-trips exactly and is stable across runs.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(num) => {
            if num.is_f64() {
                out.push_str(&fmt17(num.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&num.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            if items.iter().all(|x| x.is_number()) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, depth);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, x, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (key, x)) in map.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, x, depth + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

const PLOT_SIZE: f64 = 600.0;
const PLOT_CURVE_POINTS: usize = 801;

/// SVG of a planar level curve: the component of `{h = 1}`, the boundary
/// rays of its cone, and optionally a curve on it given in ambient points.
/// The view is the square of half-width `radius` around the origin.
pub fn plot_svg(frame: &ChartFrame, trace: Option<&[Vec<f64>]>, radius: f64) -> Result<String> {
    if frame.n() != 1 {
        return Err(Error::pre(format!(
            "plots are for planar curves (n = 1), this level set has n = {}",
            frame.n()
        )));
    }
    if !(radius > 0.0) {
        return Err(Error::pre("plot radius must be positive"));
    }
    let c0 = frame.center()[0];
    let exit = |s: f64| -> Result<f64> {
        frame
            .ray_exit(&[c0], &[s], 1e6)?
            .ok_or_else(|| Error::pre("the curve is unbounded in the chart; nothing to plot"))
    };
    let (lo, hi) = (c0 - exit(-1.0)?, c0 + exit(1.0)?);
    let half = PLOT_SIZE / 2.0;
    let scale = half / radius;
    let px = |x: &[f64]| (half + scale * x[0], half - scale * x[1]);
    let visible = |x: &[f64]| x[0].abs() <= radius && x[1].abs() <= radius;

    let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
    for i in 1..PLOT_CURVE_POINTS - 1 {
        // cosine spacing resolves the ends, where the curve runs off
        let s = 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / (PLOT_CURVE_POINTS - 1) as f64).cos());
        let c = lo + s * (hi - lo);
        let q = frame.embed(&[c]).ok().filter(|q| visible(q));
        match q {
            Some(q) => runs.last_mut().unwrap().push(px(&q)),
            None if !runs.last().unwrap().is_empty() => runs.push(Vec::new()),
            None => {}
        }
    }

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#,
        s = PLOT_SIZE
    );
    let _ = writeln!(svg, r#"  <rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r##"  <g stroke="#bbbbbb" stroke-width="1"><line x1="0" y1="{half}" x2="{PLOT_SIZE}" y2="{half}"/><line x1="{half}" y1="0" x2="{half}" y2="{PLOT_SIZE}"/></g>"##
    );
    for s in [lo, hi] {
        let y = frame.ambient(&[s]);
        let u = linalg::unit(&y);
        // ray to the edge of the view square
        let t = radius / u[0].abs().max(u[1].abs());
        let (x2, y2) = px(&linalg::scale(&u, t));
        let _ = writeln!(
            svg,
            r##"  <line class="boundary-ray" x1="{half:.3}" y1="{half:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="#cc3333" stroke-width="1.5" stroke-dasharray="6,4"/>"##
        );
    }
    for run in runs.iter().filter(|r| r.len() > 1) {
        let _ = writeln!(
            svg,
            r##"  <polyline class="level-curve" fill="none" stroke="#1f4e9c" stroke-width="2" points="{}"/>"##,
            points_attr(run)
        );
    }
    if let Some(tr) = trace {
        let pts: Vec<(f64, f64)> = tr.iter().filter(|q| q.len() == 2 && visible(q)).map(|q| px(q)).collect();
        if pts.len() > 1 {
            let _ = writeln!(
                svg,
                r##"  <polyline class="trace" fill="none" stroke="#2a9d3a" stroke-width="3" stroke-opacity="0.7" points="{}"/>"##,
                points_attr(&pts)
            );
        }
    }
    let (cx, cy) = px(frame.p());
    let _ = writeln!(svg, r##"  <circle cx="{cx:.3}" cy="{cy:.3}" r="3" fill="#000000"/>"##);
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn points_attr(points: &[(f64, f64)]) -> String {
    let mut s = String::new();
    for (i, (x, y)) in points.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x:.3},{y:.3}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_config(text: &str, seed: &[f64]) -> RunConfig {
        RunConfig {
            source: InputSource::Polynomial { text: text.into() },
            seed: Some(seed.to_vec()),
            exec: Exec::Sequential,
            ..Default::default()
        }
    }

    #[test]
    fn json_floats_have_17_digits() {
        let s = to_json_string(&serde_json::json!({"a": 0.1, "b": [1, 2.5], "c": "x"})).unwrap();
        assert!(s.contains("\"a\": 1.0000000000000001e-1"), "{s}");
        assert!(s.contains("[1, 2.5000000000000000e0]"), "{s}");
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"].as_f64(), Some(0.1));
    }

    #[test]
    fn invalid_config_rejected() {
        let mut c = poly_config("x^3 - x*y^2", &[1.0, 0.0]);
        c.tol_def = 0.0;
        assert!(c.frame().is_err());
        assert!(poly_config("x^3 - x*y^2", &[1.0, 0.0, 0.0]).frame().is_err());
        let mut c = poly_config("x^3 - x*y^2", &[1.0, 0.0]);
        c.seed = None;
        assert!(c.frame().is_err());
    }

    #[test]
    fn cubic_plot() {
        let f = poly_config("x^3 - x*y^2", &[1.0, 0.0]).frame().unwrap();
        let a = plot_svg(&f, None, 4.0).unwrap();
        assert_eq!(a, plot_svg(&f, None, 4.0).unwrap());
        assert_eq!(a.matches("boundary-ray").count(), 2);
        // boundary rays along y = ±x end at the corners of the view
        assert!(a.contains(r#"x2="600.000" y2="0.000""#) && a.contains(r#"x2="600.000" y2="600.000""#), "{a}");
        let g = poly_config("x*y*z", &[1.0, 1.0, 1.0]).frame().unwrap();
        assert!(plot_svg(&g, None, 4.0).is_err());
    }
}
