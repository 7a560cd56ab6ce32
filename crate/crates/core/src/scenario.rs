//! JSON scenario files and reports.
//!
//! A scenario holds one configuration: shapes for the Monge check, or
//! simplex vertices with edge points for the Menelaus check. Numbers are
//! JSON numbers or strings holding decimals or fractions such as `"1/5"`.
//! Edge point and shape indices are 1-based in files and reports.

use std::collections::BTreeMap;
use std::time::Instant;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::generators::{
    gen_ball_shapes, gen_euclid_menelaus, gen_vertex_shapes, gen_xn_menelaus, GenKind, GenSpec, Space,
};
use crate::kernel::{Hyperplane, Point};
use crate::menelaus::{menelaus_products, EdgePointSet, MenelausReport};
use crate::monge::{cross_ratio_consistency, run_monge, MongeConfig, MongeReport};
use crate::noneuclid::{verify_prop2, XnConfig, XnMenelausReport, XnPoint};
use crate::polytope::Halfspace;
use crate::scalar::{Scalar, Tolerance};
use crate::shapes::{Ball, HalfspaceSet, Shape, VertexSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Number(f64),
    Text(String),
}

impl Num {
    pub fn to_scalar<S: Scalar>(&self) -> Result<S> {
        match self {
            Num::Number(v) => S::from_f64(*v),
            Num::Text(s) => S::parse_literal(s),
        }
    }

    /// A JSON number when that reads back as exactly `v`, else a string.
    pub fn from_scalar<S: Scalar>(v: &S) -> Self {
        let f = v.to_f64();
        match v.to_json() {
            Value::String(s) if S::from_f64(f).ok().as_ref() != Some(v) => Num::Text(s),
            _ => Num::Number(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Shapes,
    EdgePoints,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constraint {
    pub normal: Vec<Num>,
    pub offset: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ShapeSpec {
    Ball { center: Vec<Num>, radius: Num },
    Vertices { points: Vec<Vec<Num>> },
    Halfspaces { constraints: Vec<Constraint> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgePointSpec {
    pub i: usize,
    pub j: usize,
    pub point: Vec<Num>,
}

/// Zero-based edge and the coordinates given for its point.
type EdgeEntry<'a> = ((usize, usize), &'a [Num]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub geometry: Space,
    pub dimension: usize,
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shapes: Option<Vec<ShapeSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<Num>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_points: Option<Vec<EdgePointSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<bool>,
}

fn nums<S: Scalar>(v: &[S]) -> Vec<Num> {
    v.iter().map(Num::from_scalar).collect()
}

fn coords<S: Scalar>(v: &[Num], len: usize) -> Result<Vec<S>> {
    if v.len() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            found: v.len(),
        });
    }
    v.iter().map(Num::to_scalar).collect()
}

fn point<S: Scalar>(v: &[Num], len: usize) -> Result<Point<S>> {
    Point::new(coords(v, len)?)
}

fn missing(field: &str) -> Error {
    Error::InvalidScenario(format!("missing field `{field}`"))
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text).map_err(|e| Error::InvalidScenario(e.to_string()))?;
        if file.dimension == 0 {
            return Err(Error::InvalidScenario("dimension must be positive".into()));
        }
        Ok(file)
    }

    pub fn to_pretty_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes") + "\n"
    }

    fn euclidean_only(&self, what: &str) -> Result<()> {
        if self.geometry != Space::Euclidean {
            return Err(Error::InvalidScenario(format!("{what} need a Euclidean scenario")));
        }
        Ok(())
    }

    pub fn shapes<S: Scalar>(&self, tol: Tolerance) -> Result<Vec<Shape<S>>> {
        self.euclidean_only("shapes")?;
        let n = self.dimension;
        let specs = self.shapes.as_ref().ok_or_else(|| missing("shapes"))?;
        if specs.is_empty() {
            return Err(Error::Empty);
        }
        specs
            .iter()
            .map(|s| {
                Ok(match s {
                    ShapeSpec::Ball { center, radius } => {
                        Shape::Ball(Ball::new(point(center, n)?, radius.to_scalar()?)?)
                    }
                    ShapeSpec::Vertices { points } => Shape::Vertices(VertexSet::new(
                        points.iter().map(|p| point(p, n)).collect::<Result<_>>()?,
                    )?),
                    ShapeSpec::Halfspaces { constraints } => Shape::Halfspaces(HalfspaceSet::new(
                        constraints
                            .iter()
                            .map(|c| Ok(Halfspace::new(coords(&c.normal, n)?, c.offset.to_scalar()?)))
                            .collect::<Result<_>>()?,
                        tol,
                    )?),
                })
            })
            .collect()
    }

    fn edge_keys(&self, m: usize) -> Result<Vec<EdgeEntry<'_>>> {
        let eps = self.edge_points.as_ref().ok_or_else(|| missing("edge_points"))?;
        eps.iter()
            .map(|e| {
                if e.i == 0 || e.i >= e.j || e.j > m {
                    return Err(Error::InvalidScenario(format!("no edge ({}, {})", e.i, e.j)));
                }
                Ok(((e.i - 1, e.j - 1), e.point.as_slice()))
            })
            .collect()
    }

    pub fn edge_point_set<S: Scalar>(&self, tol: Tolerance) -> Result<EdgePointSet<S>> {
        self.euclidean_only("edge points")?;
        let n = self.dimension;
        let vs = self.vertices.as_ref().ok_or_else(|| missing("vertices"))?;
        let vertices: Vec<Point<S>> = vs.iter().map(|v| point(v, n)).collect::<Result<_>>()?;
        let mut edge_points = BTreeMap::new();
        for (k, p) in self.edge_keys(vertices.len())? {
            edge_points.insert(k, point(p, n)?);
        }
        EdgePointSet::new(vertices, edge_points, tol)
    }

    pub fn xn_config(&self, tol: Tolerance) -> Result<XnConfig> {
        let geometry = self
            .geometry
            .model()
            .ok_or_else(|| Error::InvalidScenario("not a spherical or hyperbolic scenario".into()))?;
        let len = self.dimension + 1;
        let xn = |v: &[Num]| XnPoint::new(geometry, coords(v, len)?, tol);
        let vs = self.vertices.as_ref().ok_or_else(|| missing("vertices"))?;
        let vertices: Vec<XnPoint> = vs.iter().map(|v| xn(v)).collect::<Result<_>>()?;
        let mut edge_points = BTreeMap::new();
        for (k, p) in self.edge_keys(vertices.len())? {
            edge_points.insert(k, xn(p)?);
        }
        XnConfig::new(vertices, edge_points, tol)
    }

    pub fn from_shapes<S: Scalar>(shapes: &[Shape<S>], expect: Option<bool>) -> Self {
        let specs = shapes
            .iter()
            .map(|s| match s {
                Shape::Ball(b) => ShapeSpec::Ball {
                    center: nums(b.center().coords()),
                    radius: Num::from_scalar(b.radius()),
                },
                Shape::Vertices(v) => ShapeSpec::Vertices {
                    points: v.points().iter().map(|p| nums(p.coords())).collect(),
                },
                Shape::Halfspaces(h) => ShapeSpec::Halfspaces {
                    constraints: h
                        .constraints()
                        .iter()
                        .map(|c| Constraint {
                            normal: nums(&c.normal),
                            offset: Num::from_scalar(&c.offset),
                        })
                        .collect(),
                },
            })
            .collect();
        Self {
            geometry: Space::Euclidean,
            dimension: shapes.first().map_or(0, Shape::dim),
            kind: ScenarioKind::Shapes,
            shapes: Some(specs),
            vertices: None,
            edge_points: None,
            expect,
        }
    }

    pub fn from_edge_point_set<S: Scalar>(set: &EdgePointSet<S>, expect: Option<bool>) -> Self {
        Self {
            geometry: Space::Euclidean,
            dimension: set.dim(),
            kind: ScenarioKind::EdgePoints,
            shapes: None,
            vertices: Some(set.vertices().iter().map(|v| nums(v.coords())).collect()),
            edge_points: Some(
                set.edge_points()
                    .iter()
                    .map(|(&(i, j), p)| EdgePointSpec {
                        i: i + 1,
                        j: j + 1,
                        point: nums(p.coords()),
                    })
                    .collect(),
            ),
            expect,
        }
    }

    pub fn from_xn_config(config: &XnConfig, expect: Option<bool>) -> Self {
        let geometry = match config.geometry() {
            crate::noneuclid::Geometry::Sphere => Space::Spherical,
            crate::noneuclid::Geometry::Hyperbolic => Space::Hyperbolic,
        };
        Self {
            geometry,
            dimension: config.dim(),
            kind: ScenarioKind::EdgePoints,
            shapes: None,
            vertices: Some(config.vertices().iter().map(|v| nums(v.vector())).collect()),
            edge_points: Some(
                config
                    .edge_points()
                    .iter()
                    .map(|(&(i, j), p)| EdgePointSpec {
                        i: i + 1,
                        j: j + 1,
                        point: nums(p.vector()),
                    })
                    .collect(),
            ),
            expect,
        }
    }
}

/// Case `case` of a generator spec as a scenario. Euclidean cases are built
/// with exact arithmetic so both backends can read them back without loss.
/// Edge point cases are negative exactly when the spec has a perturbation.
pub fn generate_scenario(spec: &GenSpec, case: usize) -> Result<ScenarioFile> {
    type Q = BigRational;
    match (spec.kind, spec.geometry) {
        (GenKind::Balls, _) => Ok(ScenarioFile::from_shapes(
            &gen_ball_shapes::<Q>(spec, case)?,
            Some(true),
        )),
        (GenKind::VertexSets, _) => Ok(ScenarioFile::from_shapes(
            &gen_vertex_shapes::<Q>(spec, case)?,
            Some(true),
        )),
        (GenKind::EdgePoints, Space::Euclidean) => {
            let positive = spec.perturb.is_none();
            let set = gen_euclid_menelaus::<Q>(spec, case, positive)?;
            Ok(ScenarioFile::from_edge_point_set(&set, Some(positive)))
        }
        (GenKind::EdgePoints, _) => {
            let positive = spec.perturb.is_none();
            let config = gen_xn_menelaus(spec, case, positive)?;
            Ok(ScenarioFile::from_xn_config(&config, Some(positive)))
        }
    }
}

/// The verdict of one scenario and the full report.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub verdict: bool,
    pub expect: Option<bool>,
    /// Largest `|product - 1|`, for edge point scenarios.
    pub triple_residual: Option<f64>,
    pub hyperplane_residual: f64,
    pub report: Value,
}

impl Outcome {
    /// The verdict equals the expectation, or is true without one.
    pub fn as_expected(&self) -> bool {
        self.verdict == self.expect.unwrap_or(true)
    }
}

fn hyperplane_json<S: Scalar>(h: &Option<Hyperplane<S>>) -> Value {
    match h {
        Some(h) => json!({
            "normal": h.normal().iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "offset": h.offset().to_json(),
        }),
        None => Value::Null,
    }
}

fn point_json<S: Scalar>(p: &Point<S>) -> Value {
    Value::Array(p.coords().iter().map(Scalar::to_json).collect())
}

fn f64_json(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

fn monge_json<S: Scalar>(r: &MongeReport<S>) -> Value {
    let label = |k: usize| r.order[k] + 1;
    json!({
        "order": r.order.iter().map(|k| k + 1).collect::<Vec<_>>(),
        "centers": r.centers.iter().map(|(&(i, j), c)| json!({
            "i": label(i), "j": label(j), "point": point_json(c),
        })).collect::<Vec<_>>(),
        "ratios": r.ratios.iter().map(|(&(i, j), l)| json!({
            "i": label(i), "j": label(j), "value": l.to_json(),
        })).collect::<Vec<_>>(),
        "cross_ratio_residuals": cross_ratio_consistency(r).iter().map(|(&(i, j, k), v)| json!({
            "i": label(i), "j": label(j), "k": label(k), "residual": f64_json(*v),
        })).collect::<Vec<_>>(),
        "hyperplane": hyperplane_json(&r.hyperplane),
        "residual": f64_json(r.residual),
        "span_dim": r.span_dim,
        "degenerate": r.degenerate,
        "verdict": r.verdict,
    })
}

fn menelaus_json<S: Scalar>(set: &EdgePointSet<S>, r: &MenelausReport<S>) -> Value {
    json!({
        "edge_points": set.edge_points().iter().map(|(&(i, j), p)| json!({
            "i": i + 1, "j": j + 1, "point": point_json(p),
        })).collect::<Vec<_>>(),
        "lambdas": r.lambdas.iter().map(|(&(i, j), l)| json!({
            "i": i + 1, "j": j + 1, "value": l.to_json(),
        })).collect::<Vec<_>>(),
        "triple_products": r.products.iter().map(|(&(i, j, k), p)| json!({
            "i": i + 1, "j": j + 1, "k": k + 1,
            "product": p.to_json(),
            "residual": f64_json(r.triple_residuals[&(i, j, k)]),
        })).collect::<Vec<_>>(),
        "products_hold": r.products_hold,
        "hyperplane": hyperplane_json(&r.hyperplane),
        "residual": f64_json(r.hyperplane_residual),
        "coplanar": r.coplanar,
        "degenerate": r.degenerate,
        "verdict": r.verdict,
    })
}

fn xn_json(r: &XnMenelausReport) -> Value {
    json!({
        "lambdas": r.lambdas.iter().map(|(&(i, j), l)| json!({
            "i": i + 1, "j": j + 1, "value": f64_json(*l),
        })).collect::<Vec<_>>(),
        "triple_products": r.products.iter().map(|(&(i, j, k), p)| json!({
            "i": i + 1, "j": j + 1, "k": k + 1,
            "product": f64_json(*p),
            "residual": f64_json(r.triple_residuals[&(i, j, k)]),
        })).collect::<Vec<_>>(),
        "products_hold": r.products_hold,
        "hyperplane": r.hyperplane.as_ref().map(|h| json!({ "normal": h.normal() })),
        "residual": f64_json(r.hyperplane_residual),
        "section_error": r.section_error.as_ref().map(|e| e.to_string()),
        "contained": r.contained,
        "verdict": r.verdict,
    })
}

fn verify_euclid<S: Scalar>(file: &ScenarioFile, tol: Tolerance) -> Result<(bool, Option<f64>, f64, Value)> {
    match file.kind {
        ScenarioKind::Shapes => {
            let config = MongeConfig::new(file.shapes::<S>(tol)?, tol)?;
            let r = run_monge(&config, tol)?;
            Ok((r.verdict, None, r.residual, monge_json(&r)))
        }
        ScenarioKind::EdgePoints => {
            let set = file.edge_point_set::<S>(tol)?;
            let r = menelaus_products(&set, tol)?;
            Ok((
                r.verdict,
                Some(r.max_triple_residual()),
                r.hyperplane_residual,
                menelaus_json(&set, &r),
            ))
        }
    }
}

/// Runs the check the scenario asks for. Exact mode covers Euclidean
/// scenarios only.
pub fn verify(file: &ScenarioFile, tol: Tolerance, exact: bool) -> Result<Outcome> {
    tol.validate()?;
    let start = Instant::now();
    let (verdict, triple, residual, mut report) = match (file.geometry, exact) {
        (Space::Euclidean, false) => verify_euclid::<f64>(file, tol)?,
        (Space::Euclidean, true) => verify_euclid::<BigRational>(file, tol)?,
        (_, true) => {
            return Err(Error::ExactUnsupported(
                "spherical and hyperbolic scenarios need floating point",
            ))
        }
        (_, false) => {
            if file.kind != ScenarioKind::EdgePoints {
                return Err(Error::InvalidScenario(
                    "spherical and hyperbolic scenarios hold edge points".into(),
                ));
            }
            let r = verify_prop2(&file.xn_config(tol)?, tol)?;
            (
                r.verdict,
                Some(r.max_triple_residual()),
                r.hyperplane_residual,
                xn_json(&r),
            )
        }
    };
    let elapsed = start.elapsed().as_secs_f64();
    let obj = report.as_object_mut().expect("reports are objects");
    obj.insert("mode".into(), json!(if exact { "exact" } else { "float" }));
    obj.insert("tolerance".into(), json!({ "abs": tol.abs, "rel": tol.rel }));
    obj.insert("expect".into(), json!(file.expect));
    obj.insert("timing".into(), json!({ "seconds": elapsed }));
    obj.insert("input".into(), serde_json::to_value(file).expect("scenario serializes"));
    Ok(Outcome {
        verdict,
        expect: file.expect,
        triple_residual: triple,
        hyperplane_residual: residual,
        report,
    })
}

/// Machine-readable error object.
pub fn error_json(e: &Error) -> Value {
    let mut v = json!({ "error": e.kind(), "message": e.to_string() });
    if let Error::AtPair { i, j, .. } = e {
        v["pair"] = json!([i, j]);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    const CIRCLES: &str = r#"{
        "geometry": "euclidean", "dimension": 2, "kind": "shapes",
        "shapes": [
            {"type": "ball", "center": [0, 0], "radius": 3},
            {"type": "ball", "center": [6, 0], "radius": 2},
            {"type": "ball", "center": [0, 6], "radius": 1}
        ]
    }"#;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn circles_report() {
        let file = ScenarioFile::parse(CIRCLES).unwrap();
        let exact = verify(&file, tol(), true).unwrap();
        assert!(exact.verdict && exact.as_expected());
        let r = &exact.report;
        assert_eq!(r["hyperplane"]["normal"], json!(["1", "2"]));
        assert_eq!(r["hyperplane"]["offset"], json!("18"));
        assert_eq!(r["centers"][2]["point"], json!(["-6", "12"]));
        assert_eq!(r["mode"], json!("exact"));
        let float = verify(&file, tol(), false).unwrap();
        assert_eq!(float.report["hyperplane"]["normal"], json!([0.5, 1.0]));
        assert_eq!(float.report["hyperplane"]["offset"], json!(9.0));
        assert_eq!(float.report["centers"][0]["point"], json!([18.0, 0.0]));
    }

    #[test]
    fn echoed_input_roundtrips() {
        let file = ScenarioFile::parse(CIRCLES).unwrap();
        let out = verify(&file, tol(), false).unwrap();
        let echoed: ScenarioFile = serde_json::from_value(out.report["input"].clone()).unwrap();
        assert_eq!(echoed, file);
        let again = verify(&echoed, tol(), false).unwrap();
        assert_eq!(again.hyperplane_residual, out.hyperplane_residual);
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(ScenarioFile::parse("{}"), Err(Error::InvalidScenario(_))));
        let extra = CIRCLES.replace("\"kind\"", "\"colour\": 1, \"kind\"");
        assert!(ScenarioFile::parse(&extra).is_err());
        let short = CIRCLES.replace("[6, 0]", "[6]");
        let file = ScenarioFile::parse(&short).unwrap();
        assert_eq!(
            verify(&file, tol(), false).unwrap_err(),
            Error::DimensionMismatch { expected: 2, found: 1 }
        );
    }

    #[test]
    fn fractions_are_read_exactly() {
        assert_eq!(
            Num::Text("1/5".into()).to_scalar::<BigRational>().unwrap(),
            BigRational::new(1.into(), 5.into())
        );
        assert_eq!(
            Num::from_scalar(&BigRational::new(1.into(), 5.into())),
            Num::Number(0.2)
        );
        assert_eq!(
            Num::from_scalar(&BigRational::new(1.into(), 3.into())),
            Num::Text("1/3".into())
        );
    }

    #[test]
    fn exact_mode_refuses_sphere() {
        let text = r#"{
            "geometry": "spherical", "dimension": 2, "kind": "edge_points",
            "vertices": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            "edge_points": []
        }"#;
        let file = ScenarioFile::parse(text).unwrap();
        assert!(matches!(verify(&file, tol(), true), Err(Error::ExactUnsupported(_))));
        assert_eq!(
            verify(&file, tol(), false).unwrap_err(),
            Error::MissingEdgePoint { i: 1, j: 2 }
        );
    }

    #[test]
    fn generated_scenarios_agree_across_backends() {
        let spec = GenSpec {
            geometry: Space::Euclidean,
            dim: 3,
            count: 4,
            seed: 11,
            kind: GenKind::EdgePoints,
            ratio_gap: 1.5,
            perturb: None,
        };
        for case in 0..4 {
            let file = generate_scenario(&spec, case).unwrap();
            let text = file.to_pretty_json();
            let back = ScenarioFile::parse(&text).unwrap();
            assert_eq!(back, file);
            let e = verify(&back, tol(), true).unwrap();
            let f = verify(&back, tol(), false).unwrap();
            assert!(e.verdict && f.verdict);
            assert_eq!(e.hyperplane_residual, 0.0);
        }
    }
}
