//! The sets whose pairwise homotheties produce Monge centers: balls, finite
//! vertex sets and intersections of halfspaces.

use crate::error::{Error, Result};
use crate::kernel::{dot, Point};
use crate::menelaus::Homothety;
use crate::polytope::{self, Halfspace};
use crate::scalar::{Scalar, Tolerance};

#[derive(Debug, Clone, PartialEq)]
pub struct Ball<S> {
    center: Point<S>,
    radius: S,
}

impl<S: Scalar> Ball<S> {
    pub fn new(center: Point<S>, radius: S) -> Result<Self> {
        if radius <= S::zero() || !radius.is_finite() {
            return Err(Error::InvalidShape("ball radius must be positive".into()));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &Point<S> {
        &self.center
    }

    pub fn radius(&self) -> &S {
        &self.radius
    }
}

/// A finite point set; homotheties act on it pointwise, so it stands in for
/// its convex hull.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSet<S> {
    points: Vec<Point<S>>,
}

impl<S: Scalar> VertexSet<S> {
    /// Removes exact duplicates, keeping first occurrences.
    pub fn new(points: Vec<Point<S>>) -> Result<Self> {
        let dim = points.first().ok_or(Error::Empty)?.dim();
        let mut unique: Vec<Point<S>> = Vec::with_capacity(points.len());
        for p in points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            if !unique.contains(&p) {
                unique.push(p);
            }
        }
        Ok(Self { points: unique })
    }

    pub fn points(&self) -> &[Point<S>] {
        &self.points
    }

    fn centroid(&self) -> Point<S> {
        let n = self.points[0].dim();
        let m = S::from_i64(self.points.len() as i64);
        let mut c = vec![S::zero(); n];
        for p in &self.points {
            for (acc, v) in c.iter_mut().zip(p.coords()) {
                *acc = acc.clone() + v.clone();
            }
        }
        Point::new(c.into_iter().map(|v| v / m.clone()).collect()).expect("non-empty")
    }

    fn diameter_sq(&self) -> S {
        let mut best = S::zero();
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                let d = p.dist_sq(q);
                if d > best {
                    best = d;
                }
            }
        }
        best
    }
}

/// Intersection of closed halfspaces `{x : normal . x >= offset}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfspaceSet<S> {
    dim: usize,
    constraints: Vec<Halfspace<S>>,
}

impl<S: Scalar> HalfspaceSet<S> {
    /// Normalizes every constraint, drops duplicates and rejects empty
    /// intersections.
    pub fn new(constraints: Vec<Halfspace<S>>, tol: Tolerance) -> Result<Self> {
        let dim = constraints.first().ok_or(Error::Empty)?.normal.len();
        if dim == 0 {
            return Err(Error::Empty);
        }
        let mut out: Vec<Halfspace<S>> = Vec::with_capacity(constraints.len());
        for h in constraints {
            if h.normal.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: h.normal.len(),
                });
            }
            if !h.normal.iter().all(Scalar::is_finite) || !h.offset.is_finite() {
                return Err(Error::NonFinite);
            }
            let h = h
                .normalized()
                .ok_or_else(|| Error::InvalidShape("constraint with zero normal".into()))?;
            if !out.iter().any(|o| same_constraint(o, &h, tol)) {
                out.push(h);
            }
        }
        if !polytope::feasible(&out, dim, tol) {
            return Err(Error::Infeasible);
        }
        Ok(Self { dim, constraints: out })
    }

    pub fn constraints(&self) -> &[Halfspace<S>] {
        &self.constraints
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_bounded(&self, tol: Tolerance) -> bool {
        polytope::bounded(&self.constraints, self.dim, tol)
    }

    /// Finite vertices of the region.
    pub fn vertices(&self, tol: Tolerance) -> Vec<Point<S>> {
        polytope::vertices(&self.constraints, self.dim, tol)
    }
}

fn close<S: Scalar>(a: &S, b: &S, thr: f64) -> bool {
    (a.clone() - b.clone()).within(thr)
}

fn same_normal<S: Scalar>(a: &Halfspace<S>, b: &Halfspace<S>, tol: Tolerance) -> bool {
    let thr = tol.threshold(1.0);
    a.normal.iter().zip(&b.normal).all(|(x, y)| close(x, y, thr))
}

fn same_constraint<S: Scalar>(a: &Halfspace<S>, b: &Halfspace<S>, tol: Tolerance) -> bool {
    same_normal(a, b, tol) && close(&a.offset, &b.offset, tol.threshold(a.offset.to_f64()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    Ball,
    Vertices,
    Halfspaces,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape<S> {
    Ball(Ball<S>),
    Vertices(VertexSet<S>),
    Halfspaces(HalfspaceSet<S>),
}

impl<S: Scalar> Shape<S> {
    pub fn kind(&self) -> ShapeKind {
        match self {
            Shape::Ball(_) => ShapeKind::Ball,
            Shape::Vertices(_) => ShapeKind::Vertices,
            Shape::Halfspaces(_) => ShapeKind::Halfspaces,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Shape::Ball(b) => b.center.dim(),
            Shape::Vertices(v) => v.points[0].dim(),
            Shape::Halfspaces(h) => h.dim,
        }
    }
}

/// Linear size of a bounded shape, stored squared so that the exact backend
/// can compare sizes without square roots.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeMeasure<S> {
    squared: S,
}

impl<S: Scalar> SizeMeasure<S> {
    pub fn squared(&self) -> &S {
        &self.squared
    }

    pub fn value(&self) -> f64 {
        self.squared.to_f64().sqrt()
    }

    /// The size itself, when representable in the backend.
    pub fn exact(&self) -> Option<S> {
        self.squared.sqrt_exact()
    }

    /// `self / other`, when representable.
    pub fn ratio_to(&self, other: &Self) -> Option<S> {
        (self.squared.clone() / other.squared.clone()).sqrt_exact()
    }
}

/// Radius of a ball, or diameter of a vertex set or bounded polyhedron.
pub fn size_measure<S: Scalar>(shape: &Shape<S>, tol: Tolerance) -> Result<SizeMeasure<S>> {
    let squared = match shape {
        Shape::Ball(b) => b.radius.clone() * b.radius.clone(),
        Shape::Vertices(v) => v.diameter_sq(),
        Shape::Halfspaces(h) => {
            if !h.is_bounded(tol) {
                return Err(Error::UnboundedShape);
            }
            VertexSet::new(h.vertices(tol))?.diameter_sq()
        }
    };
    Ok(SizeMeasure { squared })
}

/// Image of a shape under a homothety.
pub fn apply_homothety<S: Scalar>(h: &Homothety<S>, shape: &Shape<S>) -> Result<Shape<S>> {
    if h.center().dim() != shape.dim() {
        return Err(Error::DimensionMismatch {
            expected: shape.dim(),
            found: h.center().dim(),
        });
    }
    let ratio = h.ratio().clone();
    Ok(match shape {
        Shape::Ball(b) => Shape::Ball(Ball {
            center: h.apply(&b.center),
            radius: ratio.abs() * b.radius.clone(),
        }),
        Shape::Vertices(v) => Shape::Vertices(VertexSet {
            points: v.points.iter().map(|p| h.apply(p)).collect(),
        }),
        Shape::Halfspaces(set) => {
            if ratio <= S::zero() {
                return Err(Error::NonPositiveRatio);
            }
            let constraints = set
                .constraints
                .iter()
                .map(|c| {
                    let nb = dot(&c.normal, h.center().coords());
                    let offset = ratio.clone() * c.offset.clone() + (S::one() - ratio.clone()) * nb;
                    Halfspace::new(c.normal.clone(), offset)
                })
                .collect();
            Shape::Halfspaces(HalfspaceSet {
                dim: set.dim,
                constraints,
            })
        }
    })
}

fn check_ratio<S: Scalar>(ratio: &S, tol: Tolerance) -> Result<()> {
    if *ratio <= S::zero() {
        return Err(Error::NotHomothetic(format!(
            "ratio {} is not positive",
            ratio.to_f64()
        )));
    }
    let excess = ratio.clone() - S::one();
    if excess.within(tol.unitless()) || excess < S::zero() {
        return Err(Error::RatioNotGreaterThanOne { ratio: ratio.to_f64() });
    }
    Ok(())
}

/// `(ratio * from - to) / (ratio - 1)`: the fixed point of the homothety
/// with the given ratio sending `from` to `to`.
fn center_from<S: Scalar>(from: &Point<S>, to: &Point<S>, ratio: &S) -> Result<Point<S>> {
    let denom = ratio.clone() - S::one();
    Point::new(
        from.coords()
            .iter()
            .zip(to.coords())
            .map(|(f, t)| (ratio.clone() * f.clone() - t.clone()) / denom.clone())
            .collect(),
    )
}

/// The homothety of ratio greater than one sending `from` onto `to`.
pub fn detect_homothety<S: Scalar>(from: &Shape<S>, to: &Shape<S>, tol: Tolerance) -> Result<Homothety<S>> {
    if from.kind() != to.kind() {
        return Err(Error::NotHomothetic("shapes are of different kinds".into()));
    }
    if from.dim() != to.dim() {
        return Err(Error::DimensionMismatch {
            expected: from.dim(),
            found: to.dim(),
        });
    }
    match (from, to) {
        (Shape::Ball(a), Shape::Ball(b)) => {
            let ratio = b.radius.clone() / a.radius.clone();
            check_ratio(&ratio, tol)?;
            let center = center_from(&a.center, &b.center, &ratio)?;
            Homothety::new(center, ratio)
        }
        (Shape::Vertices(a), Shape::Vertices(b)) => detect_vertex_sets(a, b, tol),
        (Shape::Halfspaces(a), Shape::Halfspaces(b)) => detect_halfspace_sets(a, b, tol),
        _ => unreachable!("kinds checked above"),
    }
}

fn detect_vertex_sets<S: Scalar>(a: &VertexSet<S>, b: &VertexSet<S>, tol: Tolerance) -> Result<Homothety<S>> {
    let da = a.diameter_sq();
    let db = b.diameter_sq();
    if da.is_zero() || db.is_zero() {
        return Err(Error::DegenerateShape(
            "vertex set with a single point has no unique homothety".into(),
        ));
    }
    if a.points.len() != b.points.len() {
        return Err(Error::NotHomothetic(format!(
            "vertex counts differ ({} vs {})",
            a.points.len(),
            b.points.len()
        )));
    }
    let ratio = (db.clone() / da)
        .sqrt_exact()
        .ok_or_else(|| Error::NotHomothetic("diameter ratio is not representable".into()))?;
    check_ratio(&ratio, tol)?;
    let center = center_from(&a.centroid(), &b.centroid(), &ratio)?;
    let h = Homothety::new(center, ratio)?;
    let image: Vec<Point<S>> = a.points.iter().map(|p| h.apply(p)).collect();
    let thr = tol.threshold(db.to_f64().sqrt());
    let thr_sq = thr * thr;
    let covered =
        |from: &[Point<S>], to: &[Point<S>]| from.iter().all(|p| to.iter().any(|q| p.dist_sq(q).within(thr_sq)));
    if covered(&image, &b.points) && covered(&b.points, &image) {
        Ok(h)
    } else {
        Err(Error::NotHomothetic(
            "scaled vertex set does not match the target within tolerance".into(),
        ))
    }
}

fn detect_halfspace_sets<S: Scalar>(a: &HalfspaceSet<S>, b: &HalfspaceSet<S>, tol: Tolerance) -> Result<Homothety<S>> {
    if a.constraints.len() != b.constraints.len() {
        return Err(Error::NotHomothetic(format!(
            "constraint counts differ ({} vs {})",
            a.constraints.len(),
            b.constraints.len()
        )));
    }
    for set in [a, b] {
        for (i, c) in set.constraints.iter().enumerate() {
            if set.constraints[i + 1..].iter().any(|d| same_normal(c, d, tol)) {
                return Err(Error::NotHomothetic(
                    "parallel constraints with equal normals; strip redundant constraints first".into(),
                ));
            }
        }
    }
    let n = a.dim;
    let mut rows = Vec::with_capacity(a.constraints.len());
    let mut rhs = Vec::with_capacity(a.constraints.len());
    let mut used = vec![false; b.constraints.len()];
    for c in &a.constraints {
        let k = b
            .constraints
            .iter()
            .enumerate()
            .position(|(k, d)| !used[k] && same_normal(c, d, tol))
            .ok_or_else(|| Error::NotHomothetic("constraint normals do not correspond".into()))?;
        used[k] = true;
        // ratio * d_from + n . ((1 - ratio) b) = d_to, linear in (ratio, (1 - ratio) b).
        let mut row = Vec::with_capacity(n + 1);
        row.push(c.offset.clone());
        row.extend(c.normal.iter().cloned());
        rows.push(row);
        rhs.push(b.constraints[k].offset.clone());
    }
    let x = S::least_squares(&rows, &rhs, tol).ok_or(Error::NonUniqueHomothety)?;
    let ratio = x[0].clone();
    let scale = rows
        .iter()
        .zip(&rhs)
        .map(|(r, d)| d.to_f64().abs().max((r[0].clone() * ratio.clone()).to_f64().abs()))
        .fold(0.0, f64::max);
    let thr = tol.threshold(scale);
    for (r, d) in rows.iter().zip(&rhs) {
        if !(dot(r, &x) - d.clone()).within(thr) {
            return Err(Error::NotHomothetic(
                "constraint offsets are not related by a single homothety".into(),
            ));
        }
    }
    check_ratio(&ratio, tol)?;
    let shift = S::one() - ratio.clone();
    let center = Point::new(x[1..].iter().map(|c| c.clone() / shift.clone()).collect())?;
    Homothety::new(center, ratio)
}
