//! Seeded random configurations, positive and negative, for all three
//! geometries.
//!
//! Every case `k` of a spec draws from its own SplitMix64 stream with state
//! `seed + k * 0x9E3779B97F4A7C15` (wrapping). Uniform reals are
//! `(next_u64 >> 11) * 2^-53`; Euclidean coordinates, radii, weights and
//! ratios are then rounded to multiples of `1/1000` so they are exact
//! decimals and the float and rational backends see the same input.

use nalgebra::DMatrix;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::kernel::Point;
use crate::menelaus::{edge_points_from_weights, pairs, point_with_ratio, EdgePointSet, Homothety};
use crate::monge::MongeConfig;
use crate::noneuclid::{xn_edge_points_from_weights, xn_independent, xn_point_with_ratio, Geometry, XnConfig, XnPoint};
use crate::scalar::{Scalar, Tolerance};
use crate::shapes::{apply_homothety, Ball, Shape, VertexSet};

pub const MAX_ATTEMPTS: usize = 1000;
const GRID: f64 = 1000.0;
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
/// Smallest accepted `σ_min / σ_max` of a generated Euclidean simplex.
const MIN_CONDITION: f64 = 0.1;
/// The same for spherical and hyperbolic vertex matrices.
const MIN_XN_CONDITION: f64 = 1e-2;
/// Smallest accepted relative gap between two Euclidean weights.
const MIN_WEIGHT_GAP: f64 = 0.05;
/// Smallest accepted `ln(μ_i / μ_j)` between consecutive hyperbolic weights.
const MIN_LOG_GAP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Euclidean,
    Spherical,
    Hyperbolic,
}

impl Space {
    /// The model geometry for spherical and hyperbolic space.
    pub fn model(self) -> Option<Geometry> {
        match self {
            Space::Euclidean => None,
            Space::Spherical => Some(Geometry::Sphere),
            Space::Hyperbolic => Some(Geometry::Hyperbolic),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Space::Euclidean => "euclidean",
            Space::Spherical => "spherical",
            Space::Hyperbolic => "hyperbolic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    Balls,
    VertexSets,
    EdgePoints,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub geometry: Space,
    pub dim: usize,
    pub count: usize,
    pub seed: u64,
    pub kind: GenKind,
    /// Smallest size ratio between consecutive shapes.
    pub ratio_gap: f64,
    /// Relative change of one edge ratio in negative cases.
    pub perturb: Option<f64>,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidSpec(format!("dimension {} is below 2", self.dim)));
        }
        if self.kind != GenKind::EdgePoints {
            if self.geometry != Space::Euclidean {
                return Err(Error::InvalidSpec("shape configurations are Euclidean only".into()));
            }
            if !(self.ratio_gap.is_finite() && self.ratio_gap > 1.0) {
                return Err(Error::InvalidSpec(format!(
                    "ratio gap {} must exceed 1",
                    self.ratio_gap
                )));
            }
        }
        if let Some(p) = self.perturb {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidSpec(format!("perturbation {p} is outside (0, 1)")));
            }
        }
        Ok(())
    }
}

/// The random stream of one generated case.
#[derive(Debug, Clone)]
pub struct ScenarioRng(SplitMix64);

impl ScenarioRng {
    pub fn for_case(seed: u64, case: usize) -> Self {
        Self(SplitMix64::seed_from_u64(
            seed.wrapping_add((case as u64).wrapping_mul(GOLDEN_GAMMA)),
        ))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform in `[lo, hi]`, rounded to the `1/1000` grid.
    pub fn grid(&mut self, lo: f64, hi: f64) -> f64 {
        quantize(self.range(lo, hi))
    }

    /// Uniform in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }

    /// Fisher-Yates, last position first.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            items.swap(i, self.index(i + 1));
        }
    }
}

pub fn quantize(x: f64) -> f64 {
    (x * GRID).round() / GRID
}

fn singular_value_ratio(rows: &[Vec<f64>]) -> f64 {
    let cols = rows[0].len();
    let m = DMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c]);
    let sv = m.singular_values();
    let max = sv.max();
    if max == 0.0 || rows.len() > cols {
        return 0.0;
    }
    sv.min() / max
}

/// `n + 1` grid points in `[-10, 10]^n` forming a reasonably fat simplex.
fn draw_simplex(rng: &mut ScenarioRng, n: usize) -> Result<Vec<Vec<f64>>> {
    for _ in 0..MAX_ATTEMPTS {
        let pts: Vec<Vec<f64>> = (0..=n)
            .map(|_| (0..n).map(|_| rng.grid(-10.0, 10.0)).collect())
            .collect();
        let diffs: Vec<Vec<f64>> = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| a - b).collect())
            .collect();
        if singular_value_ratio(&diffs) >= MIN_CONDITION {
            return Ok(pts);
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
        reason: "no well-conditioned simplex".into(),
    })
}

fn to_point<S: Scalar>(coords: &[f64]) -> Result<Point<S>> {
    Point::from_f64(coords)
}

fn expect_kind(spec: &GenSpec, kind: GenKind) -> Result<()> {
    spec.validate()?;
    if spec.kind != kind || spec.geometry != Space::Euclidean && kind != GenKind::EdgePoints {
        return Err(Error::InvalidSpec("spec does not describe this kind of case".into()));
    }
    Ok(())
}

/// `n + 1` balls with centers at a random simplex and radii
/// `s * gap^(n + 1 - k)`, listed in random order.
pub fn gen_ball_shapes<S: Scalar>(spec: &GenSpec, case: usize) -> Result<Vec<Shape<S>>> {
    expect_kind(spec, GenKind::Balls)?;
    let n = spec.dim;
    let mut rng = ScenarioRng::for_case(spec.seed, case);
    let centers = draw_simplex(&mut rng, n)?;
    let scale = rng.range(0.5, 2.0);
    let radii: Vec<f64> = (1..=n + 1)
        .map(|k| quantize(scale * spec.ratio_gap.powi((n + 1 - k) as i32)).max(1.0 / GRID))
        .collect();
    if radii.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::GenerationFailed {
            attempts: 1,
            reason: "radii collapse on the grid".into(),
        });
    }
    let mut shapes = centers
        .iter()
        .zip(&radii)
        .map(|(c, r)| Ok(Shape::Ball(Ball::new(to_point(c)?, S::from_f64(*r)?)?)))
        .collect::<Result<Vec<_>>>()?;
    rng.shuffle(&mut shapes);
    Ok(shapes)
}

pub fn gen_ball_config<S: Scalar>(spec: &GenSpec, case: usize) -> Result<MongeConfig<S>> {
    MongeConfig::new(gen_ball_shapes(spec, case)?, Tolerance::default())
}

/// A random vertex set and `n` homothetic copies of it with ratios growing
/// by at least the gap, listed in random order.
pub fn gen_vertex_shapes<S: Scalar>(spec: &GenSpec, case: usize) -> Result<Vec<Shape<S>>> {
    expect_kind(spec, GenKind::VertexSets)?;
    let n = spec.dim;
    let mut rng = ScenarioRng::for_case(spec.seed, case);
    let m = n + 1 + rng.index(12 - n.min(11));
    let base: Vec<Point<S>> = (0..m)
        .map(|_| to_point(&(0..n).map(|_| rng.grid(-5.0, 5.0)).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    let base = Shape::Vertices(VertexSet::new(base)?);
    let mut shapes = vec![base.clone()];
    let mut ratio = 1.0;
    for _ in 0..n {
        ratio = (ratio * spec.ratio_gap * rng.range(1.0, 1.5) * GRID).ceil() / GRID;
        let center: Vec<f64> = (0..n).map(|_| rng.grid(-10.0, 10.0)).collect();
        let h = Homothety::new(to_point(&center)?, S::from_f64(ratio)?)?;
        shapes.push(apply_homothety(&h, &base)?);
    }
    rng.shuffle(&mut shapes);
    Ok(shapes)
}

pub fn gen_vertex_config<S: Scalar>(spec: &GenSpec, case: usize) -> Result<MongeConfig<S>> {
    MongeConfig::new(gen_vertex_shapes(spec, case)?, Tolerance::default())
}

fn perturbation(spec: &GenSpec, positive: bool) -> Result<Option<f64>> {
    match (positive, spec.perturb) {
        (true, _) => Ok(None),
        (false, Some(p)) => Ok(Some(p)),
        (false, None) => Err(Error::InvalidSpec(
            "negative cases need a perturbation in (0, 1)".into(),
        )),
    }
}

/// Weights in `[1, 10]` on the grid, pairwise at least `MIN_WEIGHT_GAP`
/// apart relative to the larger one.
fn draw_weights(rng: &mut ScenarioRng, m: usize) -> Result<Vec<f64>> {
    for _ in 0..MAX_ATTEMPTS {
        let w: Vec<f64> = (0..m).map(|_| rng.grid(1.0, 10.0)).collect();
        let spread = pairs(m).all(|(i, j)| (w[i] - w[j]).abs() >= MIN_WEIGHT_GAP * w[i].max(w[j]));
        if spread {
            return Ok(w);
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
        reason: "no well-separated weights".into(),
    })
}

/// Edge points of a random simplex from random weights; a negative case then
/// scales the edge ratio of one random pair by `1 + perturb`.
pub fn gen_euclid_menelaus<S: Scalar>(spec: &GenSpec, case: usize, positive: bool) -> Result<EdgePointSet<S>> {
    expect_kind(spec, GenKind::EdgePoints)?;
    if spec.geometry != Space::Euclidean {
        return Err(Error::InvalidSpec("not a Euclidean spec".into()));
    }
    let perturb = perturbation(spec, positive)?;
    let n = spec.dim;
    let tol = Tolerance::default();
    let mut rng = ScenarioRng::for_case(spec.seed, case);
    let vertices: Vec<Point<S>> = draw_simplex(&mut rng, n)?
        .iter()
        .map(|p| to_point(p))
        .collect::<Result<_>>()?;
    let weights = draw_weights(&mut rng, n + 1)?;
    let weights_s: Vec<S> = weights.iter().map(|w| S::from_f64(*w)).collect::<Result<_>>()?;
    let set = edge_points_from_weights(&vertices, &weights_s, tol)?;
    let Some(p) = perturb else {
        return Ok(set);
    };
    let all: Vec<(usize, usize)> = pairs(n + 1).collect();
    let (i, j) = all[rng.index(all.len())];
    let ratio = weights_s[i].clone() / weights_s[j].clone() * (S::one() + S::from_f64(p)?);
    let b = point_with_ratio(&vertices[i], &vertices[j], &ratio)?;
    set.with_edge_point(i, j, b, tol)
}

fn draw_direction(rng: &mut ScenarioRng, len: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| rng.range(-1.0, 1.0)).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (0.1..=1.0).contains(&r) {
            return v.iter().map(|x| x / r).collect();
        }
    }
}

/// Lorentz boost of rapidity `phi` along the unit spatial direction `u`.
pub fn boost(x: &[f64], u: &[f64], phi: f64) -> Vec<f64> {
    let ux: f64 = u.iter().zip(&x[1..]).map(|(a, b)| a * b).sum();
    let mut out = Vec::with_capacity(x.len());
    out.push(phi.cosh() * x[0] + phi.sinh() * ux);
    let k = (phi.cosh() - 1.0) * ux + phi.sinh() * x[0];
    out.extend(x[1..].iter().zip(u).map(|(xs, us)| xs + k * us));
    out
}

fn draw_sphere_vertices(rng: &mut ScenarioRng, n: usize, tol: Tolerance) -> Result<Vec<XnPoint>> {
    for _ in 0..MAX_ATTEMPTS {
        let pts = (0..=n)
            .map(|_| XnPoint::normalize(Geometry::Sphere, &draw_direction(rng, n + 1)))
            .collect::<Result<Vec<_>>>()?;
        let rows: Vec<Vec<f64>> = pts.iter().map(|p| p.vector().to_vec()).collect();
        if xn_independent(&pts, tol) && singular_value_ratio(&rows) >= MIN_XN_CONDITION {
            return Ok(pts);
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
        reason: "no well-conditioned spherical simplex".into(),
    })
}

/// Vertices within distance `2 * radius` of each other: a tangent-space
/// ball at the apex, moved by a random boost.
fn draw_hyperbolic_vertices(rng: &mut ScenarioRng, n: usize, radius: f64, tol: Tolerance) -> Result<Vec<XnPoint>> {
    for _ in 0..MAX_ATTEMPTS {
        let u = draw_direction(rng, n);
        let phi = rng.range(0.0, 1.0);
        let pts = (0..=n)
            .map(|_| {
                let dir = draw_direction(rng, n);
                let t = radius * rng.range(0.3, 1.0);
                let mut x = vec![t.cosh()];
                x.extend(dir.iter().map(|d| t.sinh() * d));
                XnPoint::normalize(Geometry::Hyperbolic, &boost(&x, &u, phi))
            })
            .collect::<Result<Vec<_>>>()?;
        let rows: Vec<Vec<f64>> = pts.iter().map(|p| p.vector().to_vec()).collect();
        if xn_independent(&pts, tol) && singular_value_ratio(&rows) >= MIN_XN_CONDITION * radius * radius {
            return Ok(pts);
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
        reason: "no independent hyperbolic simplex".into(),
    })
}

/// Weights sorted decreasingly with consecutive log gaps of at least
/// `MIN_LOG_GAP`, so every edge point lands beyond its second vertex.
fn draw_hyperbolic_weights(rng: &mut ScenarioRng, m: usize) -> Result<(Vec<f64>, f64)> {
    for _ in 0..MAX_ATTEMPTS {
        let mut w: Vec<f64> = (0..m).map(|_| rng.range(1.0, 10.0)).collect();
        w.sort_by(|a, b| b.total_cmp(a));
        let gap = w.windows(2).map(|p| (p[0] / p[1]).ln()).fold(f64::INFINITY, f64::min);
        if gap >= MIN_LOG_GAP {
            return Ok((w, gap));
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
        reason: "no weights with a usable log gap".into(),
    })
}

/// Spherical or hyperbolic analogue of [`gen_euclid_menelaus`].
pub fn gen_xn_menelaus(spec: &GenSpec, case: usize, positive: bool) -> Result<XnConfig> {
    expect_kind(spec, GenKind::EdgePoints)?;
    let geometry = spec
        .geometry
        .model()
        .ok_or_else(|| Error::InvalidSpec("not a spherical or hyperbolic spec".into()))?;
    let perturb = perturbation(spec, positive)?;
    let n = spec.dim;
    let tol = Tolerance::default();
    let mut rng = ScenarioRng::for_case(spec.seed, case);
    let mut last = None;
    for _ in 0..MAX_ATTEMPTS {
        let (vertices, weights) = match geometry {
            Geometry::Sphere => {
                let v = draw_sphere_vertices(&mut rng, n, tol)?;
                (v, draw_weights(&mut rng, n + 1)?)
            }
            Geometry::Hyperbolic => {
                let (w, gap) = draw_hyperbolic_weights(&mut rng, n + 1)?;
                (draw_hyperbolic_vertices(&mut rng, n, 0.45 * gap, tol)?, w)
            }
        };
        match xn_edge_points_from_weights(&vertices, &weights, tol) {
            Ok(config) => {
                let Some(p) = perturb else {
                    return Ok(config);
                };
                let all: Vec<(usize, usize)> = pairs(n + 1).collect();
                let (i, j) = all[rng.index(all.len())];
                let ratio = weights[i] / weights[j] * (1.0 + p);
                let b = xn_point_with_ratio(&vertices[i], &vertices[j], ratio, tol)?;
                return config.with_edge_point(i, j, b, tol);
            }
            Err(e) => last = Some(e),
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
        reason: last.map_or_else(String::new, |e| e.to_string()),
    })
}
