//! Completeness of the centroaffine metric: certificate routes and the
//! decision cascade that combines them.

pub mod concavity;
pub mod geodesic;
pub mod length;
pub mod n1;
pub mod segment;

use std::fmt;

use serde::{Serialize, Serializer};

use crate::boundary::{self, RegularityReport};
use crate::chart::ChartFrame;
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::sampling;

pub use concavity::{concavity_test, default_eps_grid, log_bound_constant, log_length_bound, ConcavityResult};
pub use geodesic::{finite_length_witness, geodesic_shoot, CurveTrace, FiniteLengthWitness, GeodesicOptions, StopReason};
pub use length::{curve_length, ChartPath, LengthEstimate, Segment};
pub use n1::{n1_monomial_test, MonomialReport};
pub use segment::{cubic_segment_test, LineResult, SegmentReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Complete,
    Incomplete,
    NumericallyCertified,
    Inconclusive,
}

impl Status {
    pub fn is_decided(self) -> bool {
        self != Status::Inconclusive
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Complete => "complete",
            Status::Incomplete => "incomplete",
            Status::NumericallyCertified => "numerically-certified",
            Status::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Route {
    /// Quadratic polynomial: the ambient Hessian is constant.
    Quadric,
    CubicCriterion,
    RegularBoundary,
    N1Monomial,
    Concavity(f64),
    FiniteLengthWitness,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Route::Quadric => f.write_str("quadric"),
            Route::CubicCriterion => f.write_str("cubic-criterion"),
            Route::RegularBoundary => f.write_str("regular-boundary"),
            Route::N1Monomial => f.write_str("n1-monomial"),
            Route::Concavity(eps) => write!(f, "concavity({eps})"),
            Route::FiniteLengthWitness => f.write_str("finite-length-witness"),
        }
    }
}

impl Serialize for Route {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Which certificate routes the cascade may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Routes {
    pub quadric: bool,
    pub cubic: bool,
    pub regular: bool,
    pub n1: bool,
    pub concavity: bool,
    pub witness: bool,
}

impl Default for Routes {
    fn default() -> Self {
        Self::all()
    }
}

impl Routes {
    pub fn all() -> Self {
        Self {
            quadric: true,
            cubic: true,
            regular: true,
            n1: true,
            concavity: true,
            witness: true,
        }
    }

    pub fn none() -> Self {
        Self {
            quadric: false,
            cubic: false,
            regular: false,
            n1: false,
            concavity: false,
            witness: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerdictConfig {
    pub lines: usize,
    /// Boundary scan size; `None` picks 500 for `n ≤ 3` and 5000 above.
    pub boundary_directions: Option<usize>,
    /// `None` uses the default grid for the degree.
    pub eps_grid: Option<Vec<f64>>,
    pub concavity_samples: usize,
    pub tol: f64,
    pub quad_tol: f64,
    pub geodesic: GeodesicOptions,
    pub routes: Routes,
    pub exec: Exec,
}

impl Default for VerdictConfig {
    fn default() -> Self {
        Self {
            lines: segment::DEFAULT_LINES,
            boundary_directions: None,
            eps_grid: None,
            concavity_samples: concavity::DEFAULT_SAMPLES,
            tol: 1e-9,
            quad_tol: 1e-10,
            geodesic: GeodesicOptions::default(),
            routes: Routes::all(),
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Closedness {
    pub closed: bool,
    pub boundary_points: usize,
    /// Ambient base point and direction of a line whose positive set is
    /// unbounded.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularitySummary {
    pub points: usize,
    pub condition_i_failures: usize,
    pub condition_ii_failures: usize,
    pub aggregate: bool,
}

impl From<&RegularityReport> for RegularitySummary {
    fn from(r: &RegularityReport) -> Self {
        Self {
            points: r.points,
            condition_i_failures: r.condition_i_failures,
            condition_ii_failures: r.condition_ii_failures,
            aggregate: r.aggregate,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Attempt {
    pub route: String,
    pub outcome: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Evidence {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closedness: Option<Closedness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segment: Option<SegmentReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regularity: Option<RegularitySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n1: Option<MonomialReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub concavity: Vec<ConcavityResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<FiniteLengthWitness>,
    pub attempts: Vec<Attempt>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompletenessVerdict {
    pub status: Status,
    pub route: Option<Route>,
    pub evidence: Evidence,
}

impl Evidence {
    fn note(&mut self, route: &str, outcome: impl Into<String>) {
        self.attempts.push(Attempt {
            route: route.into(),
            outcome: outcome.into(),
        });
    }
}

fn decided(status: Status, route: Route, evidence: Evidence) -> CompletenessVerdict {
    CompletenessVerdict {
        status,
        route: Some(route),
        evidence,
    }
}

/// Runs the certificate routes in order and returns the first decision.
///
/// Order: quadratic polynomial; cubic segment test when every boundary ray
/// is bounded; regular boundary; planar monomial test; concavity over the
/// ε grid; finite-length witness. A line with unbounded positive set skips
/// every route that presumes a closed level set. Failures inside a route
/// are recorded and the cascade moves on.
pub fn completeness_verdict(frame: &ChartFrame, config: &VerdictConfig) -> CompletenessVerdict {
    let mut ev = Evidence::default();
    let routes = config.routes;
    let poly = frame.h().as_polynomial();
    let n = frame.n();

    if routes.quadric {
        match poly {
            Some(p) if p.degree() == 2 => {
                ev.note("quadric", "pass");
                return decided(Status::Complete, Route::Quadric, ev);
            }
            _ => ev.note("quadric", "not a quadratic polynomial"),
        }
    }

    let count = config
        .boundary_directions
        .unwrap_or_else(|| boundary::default_direction_count(n));
    let dirs = sampling::directions(n, count);
    let mut scan = None;
    let mut closed = match boundary::boundary_scan(frame, &dirs, config.exec) {
        Ok(points) => {
            ev.closedness = Some(Closedness {
                closed: true,
                boundary_points: points.len(),
                witness: None,
            });
            scan = Some(points);
            true
        }
        Err(Error::ClosednessFailure { base, direction }) => {
            ev.closedness = Some(Closedness {
                closed: false,
                boundary_points: 0,
                witness: Some((base, direction)),
            });
            false
        }
        Err(e) => {
            ev.note("boundary-scan", format!("error: {e}"));
            false
        }
    };
    let is_cubic = poly.is_some_and(|p| p.degree() == 3);

    if routes.cubic && is_cubic {
        if closed {
            match cubic_segment_test(frame, config.lines, config.exec) {
                Ok(rep) => {
                    let pass = rep.pass;
                    ev.note(
                        "cubic-criterion",
                        if pass { "pass".to_string() } else { format!("{} of {} lines pass", rep.passed, rep.lines) },
                    );
                    ev.segment = Some(rep);
                    if pass {
                        return decided(Status::Complete, Route::CubicCriterion, ev);
                    }
                }
                Err(Error::ClosednessFailure { base, direction }) => {
                    closed = false;
                    ev.closedness = Some(Closedness {
                        closed: false,
                        boundary_points: 0,
                        witness: Some((base, direction)),
                    });
                    ev.note("cubic-criterion", "unbounded line");
                }
                Err(e) => ev.note("cubic-criterion", format!("error: {e}")),
            }
        } else {
            ev.note("cubic-criterion", "skipped: level set not closed");
        }
    }

    if routes.regular {
        match (&scan, closed) {
            (Some(points), true) => {
                let rep = boundary::regularity_report(frame, points, config.tol, config.exec);
                let pass = rep.aggregate;
                ev.regularity = Some(RegularitySummary::from(&rep));
                ev.note("regular-boundary", if pass { "pass" } else { "fail" });
                if pass {
                    return decided(Status::Complete, Route::RegularBoundary, ev);
                }
            }
            _ => ev.note("regular-boundary", "skipped: level set not closed"),
        }
    }

    if routes.n1 && n == 1 && poly.is_some() {
        if closed {
            match n1_monomial_test(frame) {
                Ok(rep) => {
                    let pass = rep.pass;
                    ev.n1 = Some(rep);
                    ev.note("n1-monomial", if pass { "pass" } else { "fail" });
                    if pass {
                        return decided(Status::Complete, Route::N1Monomial, ev);
                    }
                }
                Err(e) => ev.note("n1-monomial", format!("skipped: {e}")),
            }
        } else {
            ev.note("n1-monomial", "skipped: level set not closed");
        }
    }

    if routes.concavity {
        if closed {
            let grid = config.eps_grid.clone().unwrap_or_else(|| default_eps_grid(frame.k()));
            for eps in grid {
                match concavity_test(frame, eps, config.concavity_samples, config.tol, config.exec) {
                    Ok(r) => {
                        let pass = r.pass;
                        ev.concavity.push(r);
                        if pass {
                            ev.note("concavity", format!("pass at ε = {eps}"));
                            return decided(Status::NumericallyCertified, Route::Concavity(eps), ev);
                        }
                    }
                    Err(e) => ev.note("concavity", format!("ε = {eps}: {e}")),
                }
            }
            ev.note("concavity", "no ε in the grid passes");
        } else {
            ev.note("concavity", "skipped: level set not closed");
        }
    }

    if routes.witness {
        let tries = if n == 1 { vec![vec![1.0]] } else { sampling::directions(n, 4) };
        for d in tries {
            match finite_length_witness(frame, &d, &config.geodesic, config.quad_tol) {
                Ok(Some(w)) => {
                    ev.note("finite-length-witness", format!("curve of length {}", w.total));
                    ev.witness = Some(w);
                    return decided(Status::Incomplete, Route::FiniteLengthWitness, ev);
                }
                Ok(None) => ev.note("finite-length-witness", "no finite curve found"),
                Err(e) => ev.note("finite-length-witness", format!("error: {e}")),
            }
        }
    }

    CompletenessVerdict {
        status: Status::Inconclusive,
        route: None,
        evidence: ev,
    }
}

/// Fails unless every chart sample is hyperbolic, which the cascade assumes.
pub fn require_hyperbolic(frame: &ChartFrame, samples: usize, tol: f64, exec: Exec) -> Result<()> {
    let cls = frame.classify(samples, tol, exec)?;
    if cls.aggregate != crate::chart::MetricClass::Hyperbolic {
        return Err(Error::pre("completeness needs a hyperbolic (locally strictly convex) component"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn quick() -> VerdictConfig {
        VerdictConfig {
            lines: 200,
            concavity_samples: 400,
            exec: Exec::Sequential,
            ..Default::default()
        }
    }

    #[test]
    fn catalog_verdicts() {
        for e in catalog::entries() {
            let f = e.frame().unwrap();
            let v = completeness_verdict(&f, &quick());
            let status = serde_json::to_value(v.status).unwrap();
            assert_eq!(status, e.expected.status, "{}: {:?}", e.id, v.evidence.attempts);
            let route = v.route.map(|r| r.to_string());
            assert_eq!(route.as_deref(), e.expected.route, "{}", e.id);
        }
    }

    #[test]
    fn quadric_shortcut() {
        let f = catalog::build_frame(
            std::sync::Arc::new(crate::homcalc::HomogeneousPolynomial::parse("x^2 - y^2 - z^2").unwrap()),
            &catalog::ChartSpec::Tangent { seed: vec![1.0, 0.0, 0.0] },
            1e-12,
        )
        .unwrap();
        let v = completeness_verdict(&f, &quick());
        assert_eq!((v.status, v.route), (Status::Complete, Some(Route::Quadric)));
    }

    #[test]
    fn route_strings() {
        assert_eq!(Route::Concavity(0.75).to_string(), "concavity(0.75)");
        assert_eq!(serde_json::to_string(&Status::NumericallyCertified).unwrap(), "\"numerically-certified\"");
    }
}
