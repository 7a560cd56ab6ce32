//! Signed homothety ratios on the edges of a simplex and the Menelaus
//! ratio-product criterion for points on those edges.
//!
//! For vertices `a_1..a_{n+1}` and a point `b_ij` on the line `a_i a_j`, the
//! ratio `λ_ij` is the homothety ratio with center `b_ij` sending `a_j` to
//! `a_i`. It is negative when `b_ij` lies strictly between the vertices. The
//! `n(n+1)/2` edge points lie in one hyperplane exactly when
//! `λ_ik = λ_ij · λ_jk` for every triple `i < j < k`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::kernel::{
    affinely_independent, bbox_diagonal, containing_hyperplane, dot, leave_one_out_residual, norm_sq, solve_linear,
    Hyperplane, Point,
};
use crate::scalar::{Scalar, Tolerance};

/// The map `x -> center + ratio * (x - center)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Homothety<S> {
    center: Point<S>,
    ratio: S,
}

impl<S: Scalar> Homothety<S> {
    pub fn new(center: Point<S>, ratio: S) -> Result<Self> {
        if ratio.is_zero() || ratio == S::one() || !ratio.is_finite() {
            return Err(Error::InvalidRatio);
        }
        Ok(Self { center, ratio })
    }

    pub fn center(&self) -> &Point<S> {
        &self.center
    }

    pub fn ratio(&self) -> &S {
        &self.ratio
    }

    pub fn apply(&self, x: &Point<S>) -> Point<S> {
        self.center.offset(&self.ratio, &x.diff(&self.center))
    }

    pub fn inverse(&self) -> Self {
        Self {
            center: self.center.clone(),
            ratio: S::one() / self.ratio.clone(),
        }
    }
}

/// The unique `λ` with `a_i = b + λ (a_j - b)`.
pub fn signed_ratio<S: Scalar>(a_i: &Point<S>, a_j: &Point<S>, b: &Point<S>, tol: Tolerance) -> Result<S> {
    if a_i.dim() != a_j.dim() || a_i.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a_i.dim(),
            found: if a_j.dim() != a_i.dim() { a_j.dim() } else { b.dim() },
        });
    }
    let edge = a_j.diff(a_i);
    let edge_sq = norm_sq(&edge);
    if edge_sq.is_zero() {
        return Err(Error::CoincidentPoints);
    }
    let thr = tol.threshold(edge_sq.to_f64().sqrt());
    if b.dist_sq(a_i).within(thr * thr) || b.dist_sq(a_j).within(thr * thr) {
        return Err(Error::CoincidesWithVertex);
    }
    let w = b.diff(a_i);
    let t = dot(&w, &edge) / edge_sq.clone();
    let perp: Vec<S> = w
        .iter()
        .zip(&edge)
        .map(|(wk, ek)| wk.clone() - t.clone() * ek.clone())
        .collect();
    let perp_sq = norm_sq(&perp);
    if !perp_sq.within(thr * thr) {
        return Err(Error::NotOnLine {
            distance: perp_sq.to_f64().sqrt(),
        });
    }
    let u = a_i.diff(b);
    let v = a_j.diff(b);
    Ok(dot(&u, &v) / norm_sq(&v))
}

/// The point `b` on the line `a_i a_j` whose signed ratio is `ratio`:
/// `b = (a_i - ratio * a_j) / (1 - ratio)`.
pub fn point_with_ratio<S: Scalar>(a_i: &Point<S>, a_j: &Point<S>, ratio: &S) -> Result<Point<S>> {
    if ratio.is_zero() || *ratio == S::one() {
        return Err(Error::InvalidRatio);
    }
    let denom = S::one() - ratio.clone();
    let coords = a_i
        .coords()
        .iter()
        .zip(a_j.coords())
        .map(|(x, y)| (x.clone() - ratio.clone() * y.clone()) / denom.clone())
        .collect();
    Point::new(coords)
}

/// A simplex with one point on (the line of) every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePointSet<S> {
    vertices: Vec<Point<S>>,
    edge_points: BTreeMap<(usize, usize), Point<S>>,
}

impl<S: Scalar> EdgePointSet<S> {
    /// Validates independence of the vertices and the position of every edge
    /// point. Keys are 0-based pairs `(i, j)` with `i < j`.
    pub fn new(
        vertices: Vec<Point<S>>,
        edge_points: BTreeMap<(usize, usize), Point<S>>,
        tol: Tolerance,
    ) -> Result<Self> {
        if !affinely_independent(&vertices, tol)? {
            return Err(Error::DependentVertices);
        }
        let m = vertices.len();
        for &(i, j) in edge_points.keys() {
            if i >= j || j >= m {
                return Err(Error::InvalidScenario(format!(
                    "edge point index ({}, {}) is not a pair i < j <= {m}",
                    i + 1,
                    j + 1
                )));
            }
        }
        for (i, j) in pairs(m) {
            let b = edge_points
                .get(&(i, j))
                .ok_or(Error::MissingEdgePoint { i: i + 1, j: j + 1 })?;
            signed_ratio(&vertices[i], &vertices[j], b, tol).map_err(|e| Error::at_pair(i, j, e))?;
        }
        Ok(Self { vertices, edge_points })
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn vertices(&self) -> &[Point<S>] {
        &self.vertices
    }

    pub fn edge_points(&self) -> &BTreeMap<(usize, usize), Point<S>> {
        &self.edge_points
    }

    pub fn edge_point(&self, i: usize, j: usize) -> &Point<S> {
        &self.edge_points[&(i, j)]
    }

    /// Replaces one edge point, re-validating its position.
    pub fn with_edge_point(mut self, i: usize, j: usize, b: Point<S>, tol: Tolerance) -> Result<Self> {
        if i >= j || j >= self.vertices.len() {
            return Err(Error::MissingEdgePoint { i: i + 1, j: j + 1 });
        }
        signed_ratio(&self.vertices[i], &self.vertices[j], &b, tol).map_err(|e| Error::at_pair(i, j, e))?;
        self.edge_points.insert((i, j), b);
        Ok(self)
    }
}

/// All 0-based pairs `i < j < m` in lexicographic order.
pub fn pairs(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..m).flat_map(move |i| (i + 1..m).map(move |j| (i, j)))
}

/// All 0-based triples `i < j < k < m` in lexicographic order.
pub fn triples(m: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..m).flat_map(move |i| (i + 1..m).flat_map(move |j| (j + 1..m).map(move |k| (i, j, k))))
}

/// `λ_ij⁻¹ λ_ik λ_jk⁻¹`, evaluated as `(λ_ik / λ_ij) / λ_jk` so that large
/// and small ratios cancel before they can overflow.
pub fn triple_product<S: Scalar>(l_ij: &S, l_ik: &S, l_jk: &S) -> S {
    (l_ik.clone() / l_ij.clone()) / l_jk.clone()
}

/// Per-triple products of a ratio table keyed by 0-based pairs.
pub fn triple_products<S: Scalar>(
    lambdas: &BTreeMap<(usize, usize), S>,
    m: usize,
) -> BTreeMap<(usize, usize, usize), S> {
    triples(m)
        .map(|(i, j, k)| {
            let p = triple_product(&lambdas[&(i, j)], &lambdas[&(i, k)], &lambdas[&(j, k)]);
            ((i, j, k), p)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MenelausReport<S> {
    pub lambdas: BTreeMap<(usize, usize), S>,
    pub products: BTreeMap<(usize, usize, usize), S>,
    /// `|product - 1|` per triple.
    pub triple_residuals: BTreeMap<(usize, usize, usize), f64>,
    pub products_hold: bool,
    pub hyperplane: Option<Hyperplane<S>>,
    /// Largest distance from an edge point to the hyperplane fitted through
    /// the other edge points, relative to the bounding box diagonal of the
    /// vertices. Zero when the exact backend finds a common hyperplane.
    pub hyperplane_residual: f64,
    pub coplanar: bool,
    pub degenerate: bool,
    pub verdict: bool,
}

impl<S> MenelausReport<S> {
    pub fn max_triple_residual(&self) -> f64 {
        self.triple_residuals.values().cloned().fold(0.0, f64::max)
    }
}

/// Evaluates both sides of the Menelaus criterion for an edge-point set.
///
/// The verdict requires every triple product to equal one and the edge points
/// to lie in a common hyperplane; the two checks must agree.
pub fn menelaus_products<S: Scalar>(eps: &EdgePointSet<S>, tol: Tolerance) -> Result<MenelausReport<S>> {
    let m = eps.vertices.len();
    let mut lambdas = BTreeMap::new();
    for (i, j) in pairs(m) {
        let l = signed_ratio(&eps.vertices[i], &eps.vertices[j], eps.edge_point(i, j), tol)
            .map_err(|e| Error::at_pair(i, j, e))?;
        lambdas.insert((i, j), l);
    }
    let products = triple_products(&lambdas, m);
    let bound = tol.unitless();
    let mut products_hold = true;
    let mut triple_residuals = BTreeMap::new();
    for (key, p) in &products {
        let dev = p.clone() - S::one();
        products_hold &= dev.within(bound);
        triple_residuals.insert(*key, dev.to_f64().abs());
    }
    let points: Vec<Point<S>> = eps.edge_points.values().cloned().collect();
    let containment = containing_hyperplane(&points, tol)?;
    let exact_fit = S::EXACT && containment.hyperplane.is_some();
    let residual = if containment.degenerate || exact_fit {
        containment.residual
    } else {
        leave_one_out_residual(&points, bbox_diagonal(&eps.vertices), tol)?
    };
    let coplanar = containment.degenerate || containment.hyperplane.is_some() && residual <= tol.unitless();
    Ok(MenelausReport {
        lambdas,
        products,
        triple_residuals,
        products_hold,
        hyperplane: containment.hyperplane,
        hyperplane_residual: residual,
        coplanar,
        degenerate: containment.degenerate,
        verdict: products_hold && coplanar,
    })
}

fn check_weights<S: Scalar>(weights: &[S], count: usize) -> Result<()> {
    if weights.len() != count {
        return Err(Error::PointCount {
            expected: count,
            found: weights.len(),
        });
    }
    if weights.iter().any(|w| *w <= S::zero()) {
        return Err(Error::EqualWeights);
    }
    for (i, j) in pairs(count) {
        if weights[i] == weights[j] {
            return Err(Error::EqualWeights);
        }
    }
    Ok(())
}

/// Edge points `b_ij = (μ_j a_i - μ_i a_j) / (μ_j - μ_i)`, which have
/// `λ_ij = μ_i / μ_j` and therefore satisfy every triple product.
pub fn edge_points_from_weights<S: Scalar>(
    vertices: &[Point<S>],
    weights: &[S],
    tol: Tolerance,
) -> Result<EdgePointSet<S>> {
    check_weights(weights, vertices.len())?;
    if !affinely_independent(vertices, tol)? {
        return Err(Error::DependentVertices);
    }
    let mut edge_points = BTreeMap::new();
    for (i, j) in pairs(vertices.len()) {
        let denom = weights[j].clone() - weights[i].clone();
        let coords = vertices[i]
            .coords()
            .iter()
            .zip(vertices[j].coords())
            .map(|(x, y)| (weights[j].clone() * x.clone() - weights[i].clone() * y.clone()) / denom.clone())
            .collect();
        edge_points.insert((i, j), Point::new(coords)?);
    }
    EdgePointSet::new(vertices.to_vec(), edge_points, tol)
}

/// Zero set of the affine functional `g` with `g(a_k) = μ_k`; it contains
/// every point produced by [`edge_points_from_weights`].
pub fn monge_hyperplane_from_weights<S: Scalar>(vertices: &[Point<S>], weights: &[S]) -> Result<Hyperplane<S>> {
    let m = vertices.len();
    let n = vertices.first().ok_or(Error::Empty)?.dim();
    if m != n + 1 {
        return Err(Error::PointCount {
            expected: n + 1,
            found: m,
        });
    }
    check_weights(weights, m)?;
    let rows: Vec<Vec<S>> = vertices
        .iter()
        .map(|v| {
            let mut r = v.coords().to_vec();
            r.push(S::one());
            r
        })
        .collect();
    let g = solve_linear(rows, weights.to_vec()).map_err(|e| match e {
        Error::Singular => Error::DependentVertices,
        e => e,
    })?;
    let (normal, constant) = g.split_at(n);
    Hyperplane::new(normal.to_vec(), -constant[0].clone()).map_err(|e| match e {
        Error::ZeroNormal => Error::EqualWeights,
        e => e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(s: &str) -> Q {
        Q::parse_literal(s).unwrap()
    }

    fn pq(c: &[&str]) -> Point<Q> {
        Point::new(c.iter().map(|s| q(s)).collect()).unwrap()
    }

    fn pf(c: &[f64]) -> Point<f64> {
        Point::new(c.to_vec()).unwrap()
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn signed_ratio_examples() {
        let (a, b) = (pq(&["0", "0"]), pq(&["1", "0"]));
        assert_eq!(signed_ratio(&a, &b, &pq(&["2", "0"]), tol()).unwrap(), q("2"));
        assert_eq!(signed_ratio(&a, &b, &pq(&["1/2", "0"]), tol()).unwrap(), q("-1"));
        assert_eq!(signed_ratio(&a, &b, &pq(&["-1", "0"]), tol()).unwrap(), q("1/2"));
    }

    #[test]
    fn signed_ratio_errors() {
        let (a, b) = (pf(&[0.0, 0.0]), pf(&[1.0, 0.0]));
        assert!(matches!(
            signed_ratio(&a, &b, &pf(&[0.5, 0.1]), tol()),
            Err(Error::NotOnLine { .. })
        ));
        assert_eq!(
            signed_ratio(&a, &b, &pf(&[1.0, 0.0]), tol()),
            Err(Error::CoincidesWithVertex)
        );
        assert_eq!(
            signed_ratio(&a, &b, &pf(&[0.0, 0.0]), tol()),
            Err(Error::CoincidesWithVertex)
        );
        assert_eq!(signed_ratio(&a, &a, &b, tol()), Err(Error::CoincidentPoints));
    }

    #[test]
    fn point_with_ratio_inverts_signed_ratio() {
        let (a, b) = (pq(&["1", "2"]), pq(&["4", "-1"]));
        for r in ["3", "-1", "1/7", "-5/2"] {
            let p = point_with_ratio(&a, &b, &q(r)).unwrap();
            assert_eq!(signed_ratio(&a, &b, &p, tol()).unwrap(), q(r));
        }
        assert_eq!(point_with_ratio(&a, &b, &q("1")), Err(Error::InvalidRatio));
    }

    fn unit_triangle() -> Vec<Point<Q>> {
        vec![pq(&["0", "0"]), pq(&["1", "0"]), pq(&["0", "1"])]
    }

    #[test]
    fn weights_124_on_unit_triangle() {
        let w = [q("1"), q("2"), q("4")];
        let eps = edge_points_from_weights(&unit_triangle(), &w, tol()).unwrap();
        assert_eq!(eps.edge_point(0, 1), &pq(&["-1", "0"]));
        assert_eq!(eps.edge_point(0, 2), &pq(&["0", "-1/3"]));
        assert_eq!(eps.edge_point(1, 2), &pq(&["2", "-1"]));

        let rep = menelaus_products(&eps, tol()).unwrap();
        assert_eq!(rep.lambdas[&(0, 1)], q("1/2"));
        assert_eq!(rep.lambdas[&(0, 2)], q("1/4"));
        assert_eq!(rep.lambdas[&(1, 2)], q("1/2"));
        assert_eq!(rep.products[&(0, 1, 2)], q("1"));
        assert_eq!(rep.triple_residuals[&(0, 1, 2)], 0.0);
        assert_eq!(rep.hyperplane_residual, 0.0);
        assert!(rep.verdict);
        // 1 + x + 3y = 0
        let h = rep.hyperplane.unwrap();
        assert_eq!(h.normal(), &[q("1"), q("3")]);
        assert_eq!(h.offset(), &q("-1"));
        assert_eq!(h, monge_hyperplane_from_weights(&unit_triangle(), &w).unwrap());
    }

    #[test]
    fn midpoints_fail_both_checks() {
        let v = unit_triangle();
        let mut e = BTreeMap::new();
        e.insert((0, 1), pq(&["1/2", "0"]));
        e.insert((0, 2), pq(&["0", "1/2"]));
        e.insert((1, 2), pq(&["1/2", "1/2"]));
        let eps = EdgePointSet::new(v, e, tol()).unwrap();
        let rep = menelaus_products(&eps, tol()).unwrap();
        assert!(rep.lambdas.values().all(|l| *l == q("-1")));
        assert_eq!(rep.products[&(0, 1, 2)], q("-1"));
        assert_eq!(rep.triple_residuals[&(0, 1, 2)], 2.0);
        assert!(rep.hyperplane.is_none());
        assert!(!rep.products_hold && !rep.coplanar && !rep.verdict);
    }

    #[test]
    fn three_circle_centers_as_edge_points() {
        let v = vec![pq(&["0", "0"]), pq(&["6", "0"]), pq(&["0", "6"])];
        let w = [q("3"), q("2"), q("1")];
        let eps = edge_points_from_weights(&v, &w, tol()).unwrap();
        assert_eq!(eps.edge_point(0, 1), &pq(&["18", "0"]));
        assert_eq!(eps.edge_point(0, 2), &pq(&["0", "9"]));
        assert_eq!(eps.edge_point(1, 2), &pq(&["-6", "12"]));
        let rep = menelaus_products(&eps, tol()).unwrap();
        assert_eq!(rep.lambdas[&(0, 1)], q("3/2"));
        assert_eq!(rep.lambdas[&(0, 2)], q("3"));
        assert_eq!(rep.lambdas[&(1, 2)], q("2"));
        assert!(rep.verdict);
        let h = monge_hyperplane_from_weights(&v, &w).unwrap();
        assert_eq!(h.normal(), &[q("1"), q("2")]);
        assert_eq!(h.offset(), &q("18"));
    }

    #[test]
    fn weight_errors() {
        let v = unit_triangle();
        assert_eq!(
            edge_points_from_weights(&v, &[q("1"), q("1"), q("2")], tol()).unwrap_err(),
            Error::EqualWeights
        );
        assert_eq!(
            monge_hyperplane_from_weights(&v, &[q("2"), q("2"), q("2")]).unwrap_err(),
            Error::EqualWeights
        );
        let flat = vec![pq(&["0", "0"]), pq(&["1", "0"]), pq(&["2", "0"])];
        assert_eq!(
            edge_points_from_weights(&flat, &[q("1"), q("2"), q("3")], tol()).unwrap_err(),
            Error::DependentVertices
        );
        assert_eq!(
            monge_hyperplane_from_weights(&flat, &[q("1"), q("2"), q("3")]).unwrap_err(),
            Error::DependentVertices
        );
    }

    #[test]
    fn missing_edge_point_is_reported() {
        let mut e = BTreeMap::new();
        e.insert((0, 1), pq(&["2", "0"]));
        e.insert((0, 2), pq(&["0", "2"]));
        assert_eq!(
            EdgePointSet::new(unit_triangle(), e, tol()).unwrap_err(),
            Error::MissingEdgePoint { i: 2, j: 3 }
        );
    }

    #[test]
    fn off_line_edge_point_carries_pair() {
        let mut e = BTreeMap::new();
        e.insert((0, 1), pq(&["2", "0"]));
        e.insert((0, 2), pq(&["0", "2"]));
        e.insert((1, 2), pq(&["2", "2"]));
        let err = EdgePointSet::new(unit_triangle(), e, tol()).unwrap_err();
        assert!(matches!(err, Error::AtPair { i: 2, j: 3, .. }));
        assert_eq!(err.kind(), "NotOnLine");
    }

    #[test]
    fn homothety_apply_and_inverse() {
        let h = Homothety::new(pf(&[18.0, 0.0]), 1.5).unwrap();
        let img = h.apply(&pf(&[6.0, 0.0]));
        assert_eq!(img.coords(), &[0.0, 0.0]);
        assert_eq!(h.inverse().apply(&img).coords(), &[6.0, 0.0]);
        assert_eq!(Homothety::new(pf(&[0.0]), 1.0).unwrap_err(), Error::InvalidRatio);
        assert_eq!(Homothety::new(pf(&[0.0]), 0.0).unwrap_err(), Error::InvalidRatio);
    }
}
