//! Dimension-generic linear algebra over either scalar backend: ranks,
//! affine independence, hyperplane fitting and line/hyperplane intersection.

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerance};

/// A point of E^n.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<S> {
    coords: Vec<S>,
}

impl<S: Scalar> Point<S> {
    pub fn new(coords: Vec<S>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Empty);
        }
        if !coords.iter().all(Scalar::is_finite) {
            return Err(Error::NonFinite);
        }
        Ok(Self { coords })
    }

    pub fn from_f64(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| S::from_f64(c)).collect::<Result<_>>()?)
    }

    pub fn origin(dim: usize) -> Self {
        Self {
            coords: vec![S::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(Scalar::to_f64).collect()
    }

    /// `self - other` as a vector.
    pub fn diff(&self, other: &Self) -> Vec<S> {
        sub(&self.coords, &other.coords)
    }

    /// `self + t * v`.
    pub fn offset(&self, t: &S, v: &[S]) -> Self {
        Self {
            coords: axpy(t, v, &self.coords),
        }
    }

    pub fn dist_sq(&self, other: &Self) -> S {
        norm_sq(&self.diff(other))
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.dist_sq(other).to_f64().sqrt()
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn scale<S: Scalar>(t: &S, v: &[S]) -> Vec<S> {
    v.iter().map(|x| t.clone() * x.clone()).collect()
}

/// `t * x + y`.
pub fn axpy<S: Scalar>(t: &S, x: &[S], y: &[S]) -> Vec<S> {
    x.iter()
        .zip(y)
        .map(|(a, b)| t.clone() * a.clone() + b.clone())
        .collect()
}

pub fn norm_sq<S: Scalar>(v: &[S]) -> S {
    dot(v, v)
}

pub fn norm_f64<S: Scalar>(v: &[S]) -> f64 {
    v.iter()
        .map(|x| {
            let f = x.to_f64();
            f * f
        })
        .sum::<f64>()
        .sqrt()
}

/// Index of the first entry with the largest magnitude.
pub(crate) fn lead_index<S: Scalar>(v: &[S]) -> usize {
    let mut best = 0;
    let mut best_abs = S::zero();
    for (i, x) in v.iter().enumerate() {
        let a = x.abs();
        if a > best_abs {
            best = i;
            best_abs = a;
        }
    }
    best
}

/// The set `{x : normal . x = offset}` in canonical form.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane<S> {
    normal: Vec<S>,
    offset: S,
}

impl<S: Scalar> Hyperplane<S> {
    /// Builds a hyperplane and rescales it so the largest-magnitude normal
    /// entry is `1` (float) or the coefficients are primitive integers with
    /// that entry positive (exact).
    pub fn new(normal: Vec<S>, offset: S) -> Result<Self> {
        if normal.is_empty() {
            return Err(Error::Empty);
        }
        if normal.iter().all(Scalar::is_zero) {
            return Err(Error::ZeroNormal);
        }
        if !normal.iter().all(Scalar::is_finite) || !offset.is_finite() {
            return Err(Error::NonFinite);
        }
        let lead = lead_index(&normal);
        let mut coeffs = normal;
        coeffs.push(offset);
        S::canonicalize(&mut coeffs, lead);
        let offset = coeffs.pop().expect("offset was pushed");
        Ok(Self { normal: coeffs, offset })
    }

    pub fn normal(&self) -> &[S] {
        &self.normal
    }

    pub fn offset(&self) -> &S {
        &self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// `normal . x - offset`.
    pub fn eval(&self, x: &Point<S>) -> S {
        dot(&self.normal, x.coords()) - self.offset.clone()
    }

    /// Euclidean distance from `x` to the hyperplane.
    pub fn distance(&self, x: &Point<S>) -> f64 {
        self.eval(x).to_f64().abs() / norm_f64(&self.normal)
    }

    /// Equality of canonical forms within `tol` (exactly, for exact scalars).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .normal
                .iter()
                .chain(std::iter::once(&self.offset))
                .zip(other.normal.iter().chain(std::iter::once(&other.offset)))
                .all(|(a, b)| {
                    let d = a.clone() - b.clone();
                    d.within(tol * (1.0 + a.to_f64().abs().max(b.to_f64().abs())))
                })
    }
}

fn check_rectangular<S>(rows: &[Vec<S>]) -> Result<usize> {
    let cols = rows.first().ok_or(Error::Empty)?.len();
    if cols == 0 {
        return Err(Error::Empty);
    }
    for (row, r) in rows.iter().enumerate() {
        if r.len() != cols {
            return Err(Error::NonRectangular {
                row,
                expected: cols,
                found: r.len(),
            });
        }
    }
    Ok(cols)
}

/// Numerical rank (singular values above `max(abs, rel * sigma_1)`) or exact
/// rank (fraction-free elimination).
pub fn rank<S: Scalar>(rows: &[Vec<S>], tol: Tolerance) -> Result<usize> {
    check_rectangular(rows)?;
    Ok(S::rank(rows, tol))
}

fn common_dim<S: Scalar>(points: &[Point<S>]) -> Result<usize> {
    let n = points.first().ok_or(Error::Empty)?.dim();
    for p in points {
        if p.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.dim(),
            });
        }
    }
    Ok(n)
}

/// Dimension of the affine span of `points`.
pub fn affine_span_dim<S: Scalar>(points: &[Point<S>], tol: Tolerance) -> Result<usize> {
    common_dim(points)?;
    if points.len() == 1 {
        return Ok(0);
    }
    let diffs: Vec<Vec<S>> = points[1..].iter().map(|p| p.diff(&points[0])).collect();
    rank(&diffs, tol)
}

/// Whether `n + 1` points of E^n form a non-degenerate simplex.
pub fn affinely_independent<S: Scalar>(points: &[Point<S>], tol: Tolerance) -> Result<bool> {
    let n = common_dim(points)?;
    if points.len() != n + 1 {
        return Err(Error::PointCount {
            expected: n + 1,
            found: points.len(),
        });
    }
    Ok(affine_span_dim(points, tol)? == n)
}

/// Fitted hyperplane together with its scale-free residual.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperplaneFit<S> {
    pub hyperplane: Hyperplane<S>,
    /// Largest point-to-hyperplane distance divided by the diagonal of the
    /// points' bounding box.
    pub residual: f64,
}

pub(crate) fn bbox_diagonal<S: Scalar>(points: &[Point<S>]) -> f64 {
    let n = points[0].dim();
    let mut sq = 0.0;
    for k in 0..n {
        let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            let v = p.coords()[k].to_f64();
            (lo.min(v), hi.max(v))
        });
        sq += (hi - lo) * (hi - lo);
    }
    sq.sqrt()
}

/// Largest distance from `points` to `h`, relative to the bounding box
/// diagonal of the points (or to 1 for smaller clouds).
pub fn relative_residual<S: Scalar>(h: &Hyperplane<S>, points: &[Point<S>]) -> f64 {
    if S::EXACT && points.iter().all(|p| h.eval(p).is_zero()) {
        return 0.0;
    }
    let worst = points.iter().map(|p| h.distance(p)).fold(0.0, f64::max);
    worst / bbox_diagonal(points).max(1.0)
}

/// Least-squares hyperplane through `points` (at least `n` of them in E^n).
///
/// Float mode takes the smallest right singular vector of the centered
/// point matrix; with exactly `n` points it interpolates their affine span.
/// Exact mode returns the hyperplane only when every point lies on it and
/// reports [`Error::NotCoplanar`] otherwise. Spans of dimension below `n - 1`
/// yield [`Error::DegenerateConfiguration`].
pub fn fit_hyperplane<S: Scalar>(points: &[Point<S>], tol: Tolerance) -> Result<HyperplaneFit<S>> {
    let n = common_dim(points)?;
    if points.len() < n {
        return Err(Error::PointCount {
            expected: n,
            found: points.len(),
        });
    }
    let span_dim = affine_span_dim(points, tol)?;
    if span_dim + 1 < n {
        return Err(Error::DegenerateConfiguration { span_dim });
    }
    let anchor: Vec<S>;
    let rows: Vec<Vec<S>>;
    if S::EXACT || points.len() == n {
        anchor = points[0].coords().to_vec();
        rows = points[1..].iter().map(|p| p.diff(&points[0])).collect();
    } else {
        let m = S::from_i64(points.len() as i64);
        let mut c = vec![S::zero(); n];
        for p in points {
            c = c.into_iter().zip(p.coords()).map(|(a, b)| a + b.clone()).collect();
        }
        anchor = c.into_iter().map(|v| v / m.clone()).collect();
        rows = points.iter().map(|p| sub(p.coords(), &anchor)).collect();
    }
    let Some(normal) = S::least_direction(&rows, n) else {
        // Exact backend: the differences have full rank, so no hyperplane contains the points.
        let shadow: Vec<Point<f64>> = points
            .iter()
            .map(|p| Point::<f64>::new(p.to_f64()))
            .collect::<Result<_>>()?;
        let residual = fit_hyperplane(&shadow, tol).map(|f| f.residual).unwrap_or(f64::NAN);
        return Err(Error::NotCoplanar { residual });
    };
    let offset = dot(&normal, &anchor);
    let hyperplane = Hyperplane::new(normal, offset)?;
    let residual = relative_residual(&hyperplane, points);
    Ok(HyperplaneFit { hyperplane, residual })
}

/// Largest distance from a point to the least-squares hyperplane through
/// all the other points, divided by `scale`. Points whose complement does
/// not span a hyperplane are skipped. Unlike the residual of a single fit,
/// an outlying point cannot pull the hyperplane towards itself.
pub fn leave_one_out_residual<S: Scalar>(points: &[Point<S>], scale: f64, tol: Tolerance) -> Result<f64> {
    common_dim(points)?;
    let shadow: Vec<Point<f64>> = points
        .iter()
        .map(|p| Point::<f64>::new(p.to_f64()))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for k in 0..shadow.len() {
        let rest: Vec<Point<f64>> = shadow
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, p)| p.clone())
            .collect();
        match fit_hyperplane(&rest, tol) {
            Ok(fit) => worst = worst.max(fit.hyperplane.distance(&shadow[k]) / scale),
            Err(Error::DegenerateConfiguration { .. } | Error::PointCount { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(worst)
}

/// Outcome of asking whether a point set lies in one hyperplane, including
/// the degenerate cases where it lies in many.
#[derive(Debug, Clone, PartialEq)]
pub struct Containment<S> {
    pub hyperplane: Option<Hyperplane<S>>,
    pub residual: f64,
    pub span_dim: usize,
    /// The points span fewer than `n - 1` dimensions.
    pub degenerate: bool,
}

impl<S> Containment<S> {
    pub fn holds(&self, tol: Tolerance) -> bool {
        self.degenerate || (self.hyperplane.is_some() && self.residual <= tol.unitless())
    }
}

/// Fits a hyperplane, or picks a canonical one when the points span fewer
/// than `n - 1` dimensions: the normal is the first standard basis vector
/// with a non-zero component orthogonal to the span, projected onto the
/// orthogonal complement. Coincident points therefore get `x_1 = c`.
pub fn containing_hyperplane<S: Scalar>(points: &[Point<S>], tol: Tolerance) -> Result<Containment<S>> {
    let n = common_dim(points)?;
    let span_dim = affine_span_dim(points, tol)?;
    if span_dim + 1 >= n && points.len() >= n {
        return match fit_hyperplane(points, tol) {
            Ok(fit) => Ok(Containment {
                hyperplane: Some(fit.hyperplane),
                residual: fit.residual,
                span_dim,
                degenerate: false,
            }),
            Err(Error::NotCoplanar { residual }) => Ok(Containment {
                hyperplane: None,
                residual,
                span_dim,
                degenerate: false,
            }),
            Err(e) => Err(e),
        };
    }
    let hyperplane = canonical_hyperplane(points, tol)?;
    let residual = relative_residual(&hyperplane, points);
    Ok(Containment {
        hyperplane: Some(hyperplane),
        residual,
        span_dim,
        degenerate: true,
    })
}

fn canonical_hyperplane<S: Scalar>(points: &[Point<S>], tol: Tolerance) -> Result<Hyperplane<S>> {
    let n = points[0].dim();
    let scale = bbox_diagonal(points).max(1.0);
    let mut basis: Vec<Vec<S>> = Vec::new();
    let reject = |v: Vec<S>, basis: &[Vec<S>]| -> Vec<S> {
        basis.iter().fold(v, |acc, u| {
            let t = dot(&acc, u) / norm_sq(u);
            axpy(&-t, u, &acc)
        })
    };
    for p in &points[1..] {
        let r = reject(p.diff(&points[0]), &basis);
        if !norm_sq(&r).within(tol.threshold(scale).powi(2)) {
            basis.push(r);
        }
    }
    for k in 0..n {
        let mut e = vec![S::zero(); n];
        e[k] = S::one();
        let r = reject(e, &basis);
        if !norm_sq(&r).within(tol.unitless()) {
            let offset = dot(&r, points[0].coords());
            return Hyperplane::new(r, offset);
        }
    }
    Err(Error::DegenerateConfiguration { span_dim: basis.len() })
}

/// Intersection of the line through `p` and `q` with `h`.
pub fn line_hyperplane_intersection<S: Scalar>(
    p: &Point<S>,
    q: &Point<S>,
    h: &Hyperplane<S>,
    tol: Tolerance,
) -> Result<Point<S>> {
    if p.dim() != q.dim() || p.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: if p.dim() != h.dim() { p.dim() } else { q.dim() },
        });
    }
    let dir = q.diff(p);
    if dir.iter().all(Scalar::is_zero) {
        return Err(Error::CoincidentPoints);
    }
    let denom = dot(h.normal(), &dir);
    if denom.within(tol.threshold(norm_f64(h.normal()) * norm_f64(&dir))) {
        return Err(Error::NearParallel);
    }
    let t = (h.offset().clone() - dot(h.normal(), p.coords())) / denom;
    Ok(p.offset(&t, &dir))
}

/// Solves a square system by Gaussian elimination with partial pivoting.
pub fn solve_linear<S: Scalar>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Result<Vec<S>> {
    let n = a.len();
    if n == 0 || b.len() != n {
        return Err(Error::Empty);
    }
    check_rectangular(&a)?;
    if a[0].len() != n {
        return Err(Error::NonRectangular {
            row: 0,
            expected: n,
            found: a[0].len(),
        });
    }
    let max_abs = a.iter().flatten().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    let eps = 1e-13 * max_abs;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty range");
        if a[piv][col].within(eps) {
            return Err(Error::Singular);
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() / a[col][col].clone();
            for c in col..n {
                let v = a[r][c].clone() - f.clone() * a[col][c].clone();
                a[r][c] = v;
            }
            let v = b[r].clone() - f * b[col].clone();
            b[r] = v;
        }
    }
    let mut x = vec![S::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc = acc - a[r][c].clone() * x[c].clone();
        }
        x[r] = acc / a[r][r].clone();
    }
    Ok(x)
}
