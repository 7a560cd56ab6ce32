//! The sphere `S^n` and the hyperboloid model `H^n`, both as subsets of
//! E^{n+1}, with the sin/sinh edge ratios of the Menelaus condition.
//!
//! Everything here is floating point; square roots and transcendental
//! distances make an exact backend pointless.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::menelaus::{pairs, triple_products};
use crate::scalar::{Scalar, Tolerance};

/// Distances within this of `π` count as antipodal on the sphere.
pub const ANTIPODAL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Geometry {
    Sphere,
    Hyperbolic,
}

impl Geometry {
    /// Bilinear form defining the model: dot product or Lorentz form.
    pub fn form(self, x: &[f64], y: &[f64]) -> f64 {
        let e: f64 = x.iter().zip(y).skip(1).map(|(a, b)| a * b).sum();
        match self {
            Geometry::Sphere => x[0] * y[0] + e,
            Geometry::Hyperbolic => -x[0] * y[0] + e,
        }
    }

    /// The vector `v` with `v . w = B(x, w)` for every `w`.
    pub fn flip(self, x: &[f64]) -> Vec<f64> {
        let mut v = x.to_vec();
        if self == Geometry::Hyperbolic {
            v[0] = -v[0];
        }
        v
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Geometry::Sphere => "spherical",
            Geometry::Hyperbolic => "hyperbolic",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct XnPoint {
    geometry: Geometry,
    vector: Vec<f64>,
}

impl XnPoint {
    /// Checks the point lies on the model: unit norm, or Lorentz norm `-1`
    /// with `x_0 > 0`.
    pub fn new(geometry: Geometry, vector: Vec<f64>, tol: Tolerance) -> Result<Self> {
        if vector.len() < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: vector.len(),
            });
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let q = geometry.form(&vector, &vector);
        let scale = vector.iter().map(|v| v * v).sum::<f64>();
        match geometry {
            Geometry::Sphere if (q - 1.0).abs() > tol.threshold(1.0) => {
                Err(Error::NotOnManifold("sphere points need unit norm"))
            }
            Geometry::Hyperbolic if (q + 1.0).abs() > tol.threshold(scale) => {
                Err(Error::NotOnManifold("hyperboloid points need Lorentz norm -1"))
            }
            Geometry::Hyperbolic if vector[0] <= 0.0 => Err(Error::NotOnManifold("hyperboloid points need x_0 > 0")),
            _ => Ok(Self { geometry, vector }),
        }
    }

    /// Rescales `v` onto the model. Hyperbolic input must be timelike; its
    /// sign is flipped if needed so that `x_0 > 0`.
    pub fn normalize(geometry: Geometry, v: &[f64]) -> Result<Self> {
        let q = geometry.form(v, v);
        let vector: Vec<f64> = match geometry {
            Geometry::Sphere => {
                if q <= 0.0 {
                    return Err(Error::ZeroNormal);
                }
                v.iter().map(|x| x / q.sqrt()).collect()
            }
            Geometry::Hyperbolic => {
                if q >= 0.0 {
                    return Err(Error::NotTimelike);
                }
                let s = (-q).sqrt() * v[0].signum();
                v.iter().map(|x| x / s).collect()
            }
        };
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { geometry, vector })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn vector(&self) -> &[f64] {
        &self.vector
    }

    /// Dimension `n` of the model, one less than the vector length.
    pub fn dim(&self) -> usize {
        self.vector.len() - 1
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.geometry != other.geometry {
            return Err(Error::GeometryMismatch);
        }
        if self.vector.len() != other.vector.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vector.len(),
                found: other.vector.len(),
            });
        }
        Ok(())
    }
}

pub fn geodesic_distance(x: &XnPoint, y: &XnPoint) -> Result<f64> {
    x.same_space(y)?;
    Ok(match x.geometry {
        Geometry::Sphere => {
            let s: f64 = x.vector.iter().zip(&y.vector).map(|(a, b)| (a - b) * (a - b)).sum();
            let t: f64 = x.vector.iter().zip(&y.vector).map(|(a, b)| (a + b) * (a + b)).sum();
            2.0 * s.sqrt().atan2(t.sqrt())
        }
        Geometry::Hyperbolic => {
            let q = (-Geometry::Hyperbolic.form(&x.vector, &y.vector)).max(1.0);
            (q + (q * q - 1.0).sqrt()).ln()
        }
    })
}

fn check_not_antipodal(d: f64) -> Result<()> {
    if d >= std::f64::consts::PI - ANTIPODAL_EPS {
        return Err(Error::Antipodal);
    }
    Ok(())
}

/// Whether `y` lies on the geodesic segment from `x` to `z`.
pub fn arc_contains(x: &XnPoint, z: &XnPoint, y: &XnPoint, tol: Tolerance) -> Result<bool> {
    x.same_space(z)?;
    x.same_space(y)?;
    let xz = geodesic_distance(x, z)?;
    if x.geometry == Geometry::Sphere {
        check_not_antipodal(xz)?;
    }
    let gap = geodesic_distance(x, y)? + geodesic_distance(y, z)? - xz;
    Ok(gap <= tol.threshold(xz))
}

fn unit_tangent(c: &XnPoint, p: &XnPoint, d: f64) -> Vec<f64> {
    let (cd, sd) = match c.geometry {
        Geometry::Sphere => (d.cos(), d.sin()),
        Geometry::Hyperbolic => (d.cosh(), d.sinh()),
    };
    p.vector
        .iter()
        .zip(&c.vector)
        .map(|(pv, cv)| (pv - cv * cd) / sd)
        .collect()
}

fn along(c: &XnPoint, u: &[f64], t: f64) -> Vec<f64> {
    let (ct, st) = match c.geometry {
        Geometry::Sphere => (t.cos(), t.sin()),
        Geometry::Hyperbolic => (t.cosh(), t.sinh()),
    };
    c.vector.iter().zip(u).map(|(cv, uv)| cv * ct + uv * st).collect()
}

/// The point `r` on the geodesic ray from `c` through `p` with
/// `|cr| = ratio * |cp|`.
pub fn xn_homothety_image(c: &XnPoint, p: &XnPoint, ratio: f64) -> Result<XnPoint> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::InvalidRatio);
    }
    let d = geodesic_distance(c, p)?;
    if d == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    if c.geometry == Geometry::Sphere {
        check_not_antipodal(d)?;
    }
    let t = ratio * d;
    if c.geometry == Geometry::Sphere && t >= std::f64::consts::PI - ANTIPODAL_EPS {
        return Err(Error::ParameterOutOfRange);
    }
    let r = along(c, &unit_tangent(c, p, d), t);
    XnPoint::normalize(c.geometry, &r)
}

/// Coefficients `(α, β)` of the best approximation `b ≈ α a_i + β a_j` and
/// the Euclidean norm of what is left over.
fn span_coefficients(a_i: &[f64], a_j: &[f64], b: &[f64]) -> Result<(f64, f64, f64)> {
    let d = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
    let (g11, g12, g22) = (d(a_i, a_i), d(a_i, a_j), d(a_j, a_j));
    let (r1, r2) = (d(a_i, b), d(a_j, b));
    let det = g11 * g22 - g12 * g12;
    if det.abs() <= 1e-14 * g11 * g22 {
        return Err(Error::CoincidentPoints);
    }
    let alpha = (r1 * g22 - r2 * g12) / det;
    let beta = (r2 * g11 - r1 * g12) / det;
    let rest: f64 = b
        .iter()
        .zip(a_i.iter().zip(a_j))
        .map(|(bv, (p, q))| (bv - alpha * p - beta * q).powi(2))
        .sum();
    Ok((alpha, beta, rest.sqrt()))
}

fn check_edge_point(a_i: &XnPoint, a_j: &XnPoint, b: &XnPoint, tol: Tolerance) -> Result<(f64, f64)> {
    a_i.same_space(a_j)?;
    a_i.same_space(b)?;
    let scale = b.vector.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (alpha, beta, rest) = span_coefficients(&a_i.vector, &a_j.vector, &b.vector)?;
    if rest > tol.threshold(scale) {
        return Err(Error::NotOnLine { distance: rest });
    }
    let near = tol.unitless();
    if geodesic_distance(a_i, b)? <= near || geodesic_distance(a_j, b)? <= near {
        return Err(Error::CoincidesWithVertex);
    }
    if !arc_contains(a_i, b, a_j, tol)? {
        return Err(Error::ArcOrder);
    }
    Ok((alpha, beta))
}

/// `sin|a_i b| / sin|b a_j|` (sphere) or `sinh|a_i b| / sinh|b a_j|`, for
/// `b` on the geodesic through `a_i, a_j` beyond `a_j`. Evaluated as
/// `|β| / |α|` where `b = α a_i + β a_j`.
pub fn xn_lambda(a_i: &XnPoint, a_j: &XnPoint, b: &XnPoint, tol: Tolerance) -> Result<f64> {
    let (alpha, beta) = check_edge_point(a_i, a_j, b, tol)?;
    Ok(beta.abs() / alpha.abs())
}

/// The same ratio evaluated from geodesic distances.
pub fn xn_lambda_trig(a_i: &XnPoint, a_j: &XnPoint, b: &XnPoint, tol: Tolerance) -> Result<f64> {
    check_edge_point(a_i, a_j, b, tol)?;
    let (x, y) = (geodesic_distance(a_i, b)?, geodesic_distance(b, a_j)?);
    Ok(match a_i.geometry {
        Geometry::Sphere => x.sin() / y.sin(),
        Geometry::Hyperbolic => x.sinh() / y.sinh(),
    })
}

/// The point beyond `a_j` on the geodesic from `a_i` with edge ratio
/// `ratio`, i.e. the normalization of `ratio * a_j - a_i`.
pub fn xn_point_with_ratio(a_i: &XnPoint, a_j: &XnPoint, ratio: f64, tol: Tolerance) -> Result<XnPoint> {
    a_i.same_space(a_j)?;
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::InvalidRatio);
    }
    let v: Vec<f64> = a_i.vector.iter().zip(&a_j.vector).map(|(p, q)| ratio * q - p).collect();
    let b = XnPoint::normalize(a_i.geometry, &v)?;
    if b.geometry == Geometry::Hyperbolic && v[0] <= 0.0 {
        return Err(Error::ArcOrder);
    }
    if !arc_contains(a_i, &b, a_j, tol)? {
        return Err(Error::ArcOrder);
    }
    Ok(b)
}

/// Linear independence in E^{n+1}, i.e. affine independence together with
/// the origin.
pub fn xn_independent(points: &[XnPoint], tol: Tolerance) -> bool {
    if points.is_empty() {
        return true;
    }
    let rows: Vec<Vec<f64>> = points.iter().map(|p| p.vector.clone()).collect();
    matches!(crate::kernel::rank(&rows, tol), Ok(r) if r == points.len())
}

/// The section `{x : B(normal, x) = 0}` of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct XnHyperplane {
    geometry: Geometry,
    normal: Vec<f64>,
}

impl XnHyperplane {
    /// Scales the normal so its largest-magnitude entry is `1`. Hyperbolic
    /// sections need a spacelike normal to be non-empty.
    pub fn new(geometry: Geometry, normal: Vec<f64>) -> Result<Self> {
        let lead = normal
            .iter()
            .copied()
            .fold(0.0_f64, |m, v| if v.abs() > m.abs() { v } else { m });
        if lead == 0.0 {
            return Err(Error::ZeroNormal);
        }
        let normal: Vec<f64> = normal.iter().map(|v| v / lead).collect();
        if geometry == Geometry::Hyperbolic {
            let q = geometry.form(&normal, &normal);
            if q <= 0.0 {
                return Err(Error::NotSpacelike { norm: q });
            }
        }
        Ok(Self { geometry, normal })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn eval(&self, x: &XnPoint) -> f64 {
        self.geometry.form(&self.normal, &x.vector)
    }

    /// `|B(w, x)| / |x|`.
    pub fn residual(&self, x: &XnPoint) -> f64 {
        let n = x.vector.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.eval(x).abs() / n
    }
}

/// Best section through the points and the largest residual. Needs the
/// points to span at least `n` dimensions so the section is pinned down.
pub fn xn_hyperplane_fit(points: &[XnPoint], tol: Tolerance) -> Result<(XnHyperplane, f64)> {
    let first = points.first().ok_or(Error::Empty)?;
    for p in points {
        first.same_space(p)?;
    }
    let n = first.dim();
    if points.len() < n {
        return Err(Error::PointCount {
            expected: n,
            found: points.len(),
        });
    }
    let geometry = first.geometry;
    let rows: Vec<Vec<f64>> = points.iter().map(|p| geometry.flip(&p.vector)).collect();
    let span = crate::kernel::rank(&rows, tol)?;
    if span < n {
        return Err(Error::DegenerateConfiguration { span_dim: span });
    }
    let w = f64::least_direction(&rows, n + 1).ok_or(Error::DegenerateConfiguration { span_dim: span })?;
    let h = XnHyperplane::new(geometry, w)?;
    let residual = points.iter().map(|p| h.residual(p)).fold(0.0, f64::max);
    Ok((h, residual))
}

/// Vertices `a_1..a_{n+1}` of a simplex in X^n and a point `b_ij` for every
/// edge, beyond `a_j` on the geodesic from `a_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct XnConfig {
    vertices: Vec<XnPoint>,
    edge_points: BTreeMap<(usize, usize), XnPoint>,
}

impl XnConfig {
    pub fn new(vertices: Vec<XnPoint>, edge_points: BTreeMap<(usize, usize), XnPoint>, tol: Tolerance) -> Result<Self> {
        let first = vertices.first().ok_or(Error::Empty)?;
        for p in vertices.iter().chain(edge_points.values()) {
            first.same_space(p)?;
        }
        let m = first.dim() + 1;
        if vertices.len() != m {
            return Err(Error::PointCount {
                expected: m,
                found: vertices.len(),
            });
        }
        if !xn_independent(&vertices, tol) {
            return Err(Error::DependentVertices);
        }
        if let Some(&(i, j)) = edge_points.keys().find(|&&(i, j)| i >= j || j >= m) {
            return Err(Error::InvalidScenario(format!("no edge ({}, {})", i + 1, j + 1)));
        }
        for (i, j) in pairs(m) {
            let b = edge_points
                .get(&(i, j))
                .ok_or(Error::MissingEdgePoint { i: i + 1, j: j + 1 })?;
            check_edge_point(&vertices[i], &vertices[j], b, tol).map_err(|e| Error::at_pair(i, j, e))?;
        }
        Ok(Self { vertices, edge_points })
    }

    pub fn geometry(&self) -> Geometry {
        self.vertices[0].geometry
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn vertices(&self) -> &[XnPoint] {
        &self.vertices
    }

    pub fn edge_points(&self) -> &BTreeMap<(usize, usize), XnPoint> {
        &self.edge_points
    }

    pub fn edge_point(&self, i: usize, j: usize) -> &XnPoint {
        &self.edge_points[&(i, j)]
    }

    pub fn with_edge_point(mut self, i: usize, j: usize, b: XnPoint, tol: Tolerance) -> Result<Self> {
        self.edge_points.insert((i, j), b);
        Self::new(self.vertices, self.edge_points, tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct XnMenelausReport {
    pub geometry: Geometry,
    pub lambdas: BTreeMap<(usize, usize), f64>,
    pub products: BTreeMap<(usize, usize, usize), f64>,
    pub triple_residuals: BTreeMap<(usize, usize, usize), f64>,
    pub products_hold: bool,
    pub hyperplane: Option<XnHyperplane>,
    pub hyperplane_residual: f64,
    /// Why no section was reported, e.g. a timelike best-fit normal.
    pub section_error: Option<Error>,
    pub contained: bool,
    pub verdict: bool,
}

impl XnMenelausReport {
    pub fn max_triple_residual(&self) -> f64 {
        self.triple_residuals.values().copied().fold(0.0, f64::max)
    }
}

/// Checks both sides of the equivalence: all triple products equal one, and
/// all edge points lie in one section.
pub fn verify_prop2(config: &XnConfig, tol: Tolerance) -> Result<XnMenelausReport> {
    let m = config.vertices.len();
    let mut lambdas = BTreeMap::new();
    for (i, j) in pairs(m) {
        let l = xn_lambda(&config.vertices[i], &config.vertices[j], config.edge_point(i, j), tol)
            .map_err(|e| Error::at_pair(i, j, e))?;
        lambdas.insert((i, j), l);
    }
    let products = triple_products(&lambdas, m);
    let triple_residuals: BTreeMap<_, _> = products.iter().map(|(k, p)| (*k, (p - 1.0).abs())).collect();
    let products_hold = triple_residuals.values().all(|&r| r <= tol.unitless());
    let points: Vec<XnPoint> = config.edge_points.values().cloned().collect();
    let (hyperplane, hyperplane_residual, section_error) = match xn_hyperplane_fit(&points, tol) {
        Ok((h, r)) => (Some(h), r, None),
        Err(e @ Error::NotSpacelike { .. }) => (None, f64::INFINITY, Some(e)),
        Err(e) => return Err(e),
    };
    let contained = hyperplane.is_some() && hyperplane_residual <= tol.unitless();
    Ok(XnMenelausReport {
        geometry: config.geometry(),
        lambdas,
        products,
        triple_residuals,
        products_hold,
        hyperplane,
        hyperplane_residual,
        section_error,
        contained,
        verdict: products_hold && contained,
    })
}

/// Edge points `b_ij ∝ μ_i a_j - μ_j a_i`, which satisfy `λ_ij = μ_i / μ_j`
/// and lie in the section `B(w, x) = 0` where `B(w, a_k) = μ_k`.
///
/// Weights must be positive and pairwise distinct. In `H^n` the combination
/// only lands on the hyperboloid beyond `a_j` when `μ_i > μ_j` and
/// `|a_i a_j| < ln(μ_i / μ_j)`; other weights are rejected.
pub fn xn_edge_points_from_weights(vertices: &[XnPoint], weights: &[f64], tol: Tolerance) -> Result<XnConfig> {
    if weights.len() != vertices.len() {
        return Err(Error::PointCount {
            expected: vertices.len(),
            found: weights.len(),
        });
    }
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::InvalidRatio);
    }
    let mut edge_points = BTreeMap::new();
    for (i, j) in pairs(vertices.len()) {
        if (weights[i] - weights[j]).abs() <= tol.threshold(weights[i].abs()) {
            return Err(Error::EqualWeights);
        }
        let b = xn_point_with_ratio(&vertices[i], &vertices[j], weights[i] / weights[j], tol)
            .map_err(|e| Error::at_pair(i, j, e))?;
        edge_points.insert((i, j), b);
    }
    XnConfig::new(vertices.to_vec(), edge_points, tol)
}

/// Sections through the vertices with `B(w, a_k) = μ_k`.
pub fn xn_section_from_weights(vertices: &[XnPoint], weights: &[f64]) -> Result<XnHyperplane> {
    let first = vertices.first().ok_or(Error::Empty)?;
    let rows: Vec<Vec<f64>> = vertices.iter().map(|a| first.geometry.flip(&a.vector)).collect();
    let w = crate::kernel::solve_linear(rows, weights.to_vec()).map_err(|_| Error::DependentVertices)?;
    XnHyperplane::new(first.geometry, w)
}
