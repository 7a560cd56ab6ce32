//! Small-dimension polyhedra given as intersections of closed halfspaces.
//!
//! Feasibility is decided by Fourier-Motzkin elimination, which works over
//! any ordered field and is therefore exact for rational input. Vertex
//! enumeration tries every `n`-subset of constraints. Both are only meant for
//! desk-scale inputs (a few dozen constraints, `n <= 6`).

use crate::kernel::{dot, lead_index, solve_linear, Point};
use crate::scalar::{Scalar, Tolerance};

/// `{x : normal . x >= offset}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace<S> {
    pub normal: Vec<S>,
    pub offset: S,
}

impl<S: Scalar> Halfspace<S> {
    pub fn new(normal: Vec<S>, offset: S) -> Self {
        Self { normal, offset }
    }

    /// Rescales by `1 / |lead|` so the largest-magnitude normal entry is `±1`.
    /// Orientation is preserved.
    pub fn normalized(&self) -> Option<Self> {
        if self.normal.iter().all(Scalar::is_zero) {
            return None;
        }
        let d = self.normal[lead_index(&self.normal)].abs();
        Some(Self {
            normal: self.normal.iter().map(|v| v.clone() / d.clone()).collect(),
            offset: self.offset.clone() / d,
        })
    }

    pub fn slack(&self, x: &[S]) -> S {
        dot(&self.normal, x) - self.offset.clone()
    }
}

const COEFF_EPS: f64 = 1e-12;

fn scale_row<S: Scalar>(row: (Vec<S>, S)) -> (Vec<S>, S) {
    if S::EXACT {
        return row;
    }
    let (a, d) = row;
    let m = a.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    if m == 0.0 {
        return (a, d);
    }
    let inv = S::one() / S::from_f64(m).unwrap_or_else(|_| S::one());
    (a.iter().map(|v| v.clone() * inv.clone()).collect(), d * inv)
}

/// Whether `{x : a_i . x >= d_i for all i}` is non-empty.
pub fn feasible<S: Scalar>(constraints: &[Halfspace<S>], dim: usize, tol: Tolerance) -> bool {
    let scale = constraints.iter().map(|h| h.offset.to_f64().abs()).fold(0.0, f64::max);
    let slack = tol.threshold(scale);
    let mut rows: Vec<(Vec<S>, S)> = constraints
        .iter()
        .map(|h| scale_row((h.normal.clone(), h.offset.clone())))
        .collect();
    for k in (0..dim).rev() {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut next = Vec::new();
        for (mut a, d) in rows {
            if a[k].within(COEFF_EPS) {
                a[k] = S::zero();
                next.push((a, d));
            } else if a[k] > S::zero() {
                pos.push((a, d));
            } else {
                neg.push((a, d));
            }
        }
        for (pa, pd) in &pos {
            for (na, nd) in &neg {
                let fp = -na[k].clone();
                let fnn = pa[k].clone();
                let mut a: Vec<S> = pa
                    .iter()
                    .zip(na)
                    .map(|(x, y)| fp.clone() * x.clone() + fnn.clone() * y.clone())
                    .collect();
                a[k] = S::zero();
                let d = fp * pd.clone() + fnn * nd.clone();
                next.push(scale_row((a, d)));
            }
        }
        let mut kept: Vec<(Vec<S>, S)> = Vec::with_capacity(next.len());
        for (a, d) in next {
            if a.iter().all(|v| v.within(COEFF_EPS)) {
                if d > S::zero() && !d.within(slack) {
                    return false;
                }
                continue;
            }
            if !kept.iter().any(|(ka, kd)| *ka == a && *kd == d) {
                kept.push((a, d));
            }
        }
        rows = kept;
    }
    rows.iter().all(|(_, d)| *d <= S::zero() || d.within(slack))
}

/// Whether the (assumed non-empty) polyhedron is bounded, i.e. its
/// recession cone `{v : a_i . v >= 0}` is `{0}`.
pub fn bounded<S: Scalar>(constraints: &[Halfspace<S>], dim: usize, tol: Tolerance) -> bool {
    for k in 0..dim {
        for sign in [S::one(), -S::one()] {
            let mut cone: Vec<Halfspace<S>> = constraints
                .iter()
                .map(|h| Halfspace::new(h.normal.clone(), S::zero()))
                .collect();
            let mut e = vec![S::zero(); dim];
            e[k] = sign;
            cone.push(Halfspace::new(e, S::one()));
            if feasible(&cone, dim, Tolerance::new(tol.abs.min(1e-12), 0.0)) {
                return false;
            }
        }
    }
    true
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// Vertices of the polyhedron, in order of the constraint subsets that
/// produced them. Unbounded regions yield only their finite vertices.
pub fn vertices<S: Scalar>(constraints: &[Halfspace<S>], dim: usize, tol: Tolerance) -> Vec<Point<S>> {
    let scale = constraints.iter().map(|h| h.offset.to_f64().abs()).fold(1.0, f64::max);
    let thr = tol.threshold(scale);
    let mut out: Vec<Point<S>> = Vec::new();
    for subset in combinations(constraints.len(), dim) {
        let a = subset.iter().map(|&i| constraints[i].normal.clone()).collect();
        let b = subset.iter().map(|&i| constraints[i].offset.clone()).collect();
        let Ok(x) = solve_linear(a, b) else {
            continue;
        };
        let inside = constraints.iter().all(|h| {
            let s = h.slack(&x);
            s >= S::zero() || s.within(thr)
        });
        if !inside {
            continue;
        }
        let Ok(p) = Point::new(x) else {
            continue;
        };
        if !out.iter().any(|q| q.dist_sq(&p).within(thr * thr)) {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn hs(n: &[f64], d: f64) -> Halfspace<f64> {
        Halfspace::new(n.to_vec(), d)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn feasibility_of_simple_regions() {
        assert!(feasible(&[hs(&[0.0, 1.0], 0.0)], 2, tol()));
        let strip = [hs(&[1.0, 0.0], 0.0), hs(&[-1.0, 0.0], -1.0)];
        assert!(feasible(&strip, 2, tol()));
        let empty = [hs(&[1.0, 0.0], 2.0), hs(&[-1.0, 0.0], -1.0)];
        assert!(!feasible(&empty, 2, tol()));
        let tri = [hs(&[1.0, 0.0], 0.0), hs(&[0.0, 1.0], 0.0), hs(&[-1.0, -1.0], -1.0)];
        assert!(feasible(&tri, 2, tol()));
        let tri_empty = [hs(&[1.0, 0.0], 0.0), hs(&[0.0, 1.0], 0.0), hs(&[-1.0, -1.0], 1.0)];
        assert!(!feasible(&tri_empty, 2, tol()));
    }

    #[test]
    fn single_point_region_is_feasible() {
        let pt = [
            hs(&[1.0, 0.0], 1.0),
            hs(&[-1.0, 0.0], -1.0),
            hs(&[0.0, 1.0], 2.0),
            hs(&[0.0, -1.0], -2.0),
        ];
        assert!(feasible(&pt, 2, tol()));
        assert!(bounded(&pt, 2, tol()));
        let v = vertices(&pt, 2, tol());
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].coords(), &[1.0, 2.0]);
    }

    #[test]
    fn boundedness() {
        let tri = [hs(&[1.0, 0.0], 0.0), hs(&[0.0, 1.0], 0.0), hs(&[-1.0, -1.0], -1.0)];
        assert!(bounded(&tri, 2, tol()));
        let wedge = [hs(&[1.0, 0.0], 0.0), hs(&[0.0, 1.0], 1.0), hs(&[1.0, 1.0], 3.0)];
        assert!(!bounded(&wedge, 2, tol()));
        assert!(!bounded(&[hs(&[0.0, 1.0], 0.0)], 2, tol()));
    }

    #[test]
    fn vertices_of_unbounded_region() {
        let wedge = [hs(&[1.0, 0.0], 0.0), hs(&[0.0, 1.0], 1.0), hs(&[1.0, 1.0], 3.0)];
        let v = vertices(&wedge, 2, tol());
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].coords(), &[0.0, 3.0]);
        assert_eq!(v[1].coords(), &[2.0, 1.0]);
    }

    #[test]
    fn exact_cube_vertices() {
        let q = |v: i64| BigRational::from_integer(v.into());
        let mut cube = Vec::new();
        for k in 0..3 {
            let mut e = vec![q(0); 3];
            e[k] = q(1);
            cube.push(Halfspace::new(e.clone(), q(0)));
            cube.push(Halfspace::new(e.iter().map(|x| -x.clone()).collect(), q(-1)));
        }
        assert!(feasible(&cube, 3, tol()));
        assert!(bounded(&cube, 3, tol()));
        assert_eq!(vertices(&cube, 3, tol()).len(), 8);
    }

    #[test]
    fn normalization_keeps_orientation() {
        let h = hs(&[-2.0, 1.0], -4.0).normalized().unwrap();
        assert_eq!(h.normal, vec![-1.0, 0.5]);
        assert_eq!(h.offset, -2.0);
        assert!(hs(&[0.0, 0.0], 1.0).normalized().is_none());
    }
}
