//! Monge's theorem for `n + 1` pairwise homothetic sets in E^n: the centers
//! of the homotheties of ratio greater than one between them lie in one
//! hyperplane.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::kernel::{containing_hyperplane, Hyperplane, Point};
use crate::menelaus::{pairs, triples};
use crate::scalar::{Scalar, Tolerance};
use crate::shapes::{detect_homothety, size_measure, Shape, SizeMeasure};

/// `n + 1` shapes of one kind in E^n, ordered by strictly decreasing size
/// whenever every size is defined.
#[derive(Debug, Clone, PartialEq)]
pub struct MongeConfig<S> {
    dim: usize,
    shapes: Vec<Shape<S>>,
    order: Vec<usize>,
}

impl<S: Scalar> MongeConfig<S> {
    /// Sorts bounded shapes by decreasing size (ties are an error). Unbounded
    /// halfspace sets keep the supplied order; their pairwise ratios are
    /// checked during detection instead.
    pub fn new(shapes: Vec<Shape<S>>, tol: Tolerance) -> Result<Self> {
        let dim = shapes.first().ok_or(Error::Empty)?.dim();
        if shapes.len() != dim + 1 {
            return Err(Error::PointCount {
                expected: dim + 1,
                found: shapes.len(),
            });
        }
        for s in &shapes {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
            if s.kind() != shapes[0].kind() {
                return Err(Error::NotHomothetic("configuration mixes shape kinds".into()));
            }
        }
        let sizes: Option<Vec<SizeMeasure<S>>> = shapes
            .iter()
            .map(|s| match size_measure(s, tol) {
                Ok(m) => Ok(Some(m)),
                Err(Error::UnboundedShape) => Ok(None),
                Err(e) => Err(e),
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .collect();
        let mut order: Vec<usize> = (0..shapes.len()).collect();
        if let Some(sizes) = sizes {
            order.sort_by(|&a, &b| {
                sizes[b]
                    .squared()
                    .partial_cmp(sizes[a].squared())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            for w in order.windows(2) {
                let (big, small) = (&sizes[w[0]], &sizes[w[1]]);
                let gap = big.squared().clone() - small.squared().clone();
                if gap.within(tol.unitless() * big.squared().to_f64().abs()) {
                    let (i, j) = (w[0].min(w[1]), w[0].max(w[1]));
                    return Err(Error::EqualSizes { i: i + 1, j: j + 1 });
                }
            }
        }
        let mut slots: Vec<Option<Shape<S>>> = shapes.into_iter().map(Some).collect();
        let shapes = order.iter().map(|&k| slots[k].take().expect("permutation")).collect();
        Ok(Self { dim, shapes, order })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shapes(&self) -> &[Shape<S>] {
        &self.shapes
    }

    /// `order[k]` is the input index of the shape now at position `k`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MongeReport<S> {
    pub order: Vec<usize>,
    /// Center of the homothety sending shape `j` onto shape `i`, `i < j`.
    pub centers: BTreeMap<(usize, usize), Point<S>>,
    pub ratios: BTreeMap<(usize, usize), S>,
    pub hyperplane: Option<Hyperplane<S>>,
    pub residual: f64,
    pub span_dim: usize,
    /// Centers span fewer than `n - 1` dimensions (e.g. all coincide).
    pub degenerate: bool,
    pub verdict: bool,
}

/// Detects every pairwise homothety, collects the centers and fits the
/// hyperplane through them.
pub fn run_monge<S: Scalar>(config: &MongeConfig<S>, tol: Tolerance) -> Result<MongeReport<S>> {
    let mut centers = BTreeMap::new();
    let mut ratios = BTreeMap::new();
    for (i, j) in pairs(config.shapes.len()) {
        let h = detect_homothety(&config.shapes[j], &config.shapes[i], tol).map_err(|e| Error::at_pair(i, j, e))?;
        ratios.insert((i, j), h.ratio().clone());
        centers.insert((i, j), h.center().clone());
    }
    let points: Vec<Point<S>> = centers.values().cloned().collect();
    let c = containing_hyperplane(&points, tol)?;
    let verdict = c.holds(tol);
    Ok(MongeReport {
        order: config.order.clone(),
        centers,
        ratios,
        hyperplane: c.hyperplane,
        residual: c.residual,
        span_dim: c.span_dim,
        degenerate: c.degenerate,
        verdict,
    })
}

/// `|λ_ij λ_jk / λ_ik - 1|` per triple: composing the homotheties between
/// shapes `k -> j -> i` must give the one for `k -> i`.
pub fn cross_ratio_consistency<S: Scalar>(report: &MongeReport<S>) -> BTreeMap<(usize, usize, usize), f64> {
    let m = report.ratios.keys().map(|&(_, j)| j + 1).max().unwrap_or(0);
    triples(m)
        .map(|(i, j, k)| {
            let r = &report.ratios;
            let v = (r[&(i, j)].clone() / r[&(i, k)].clone()) * r[&(j, k)].clone() - S::one();
            ((i, j, k), v.to_f64().abs())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::Halfspace;
    use crate::shapes::{Ball, HalfspaceSet};
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(s: &str) -> Q {
        Q::parse_literal(s).unwrap()
    }

    fn pq(c: &[&str]) -> Point<Q> {
        Point::new(c.iter().map(|s| q(s)).collect()).unwrap()
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn three_circles<S: Scalar>() -> Vec<Shape<S>> {
        [([0.0, 0.0], 3.0), ([6.0, 0.0], 2.0), ([0.0, 6.0], 1.0)]
            .iter()
            .map(|(c, r)| Shape::Ball(Ball::new(Point::from_f64(c).unwrap(), S::from_f64(*r).unwrap()).unwrap()))
            .collect()
    }

    fn stacked_halfplanes(y_floor: impl Fn(i64) -> Q) -> Vec<Shape<Q>> {
        (1..=3)
            .map(|i| {
                Shape::Halfspaces(
                    HalfspaceSet::new(
                        vec![
                            Halfspace::new(vec![q("1"), q("0")], q("0")),
                            Halfspace::new(vec![q("0"), q("1")], y_floor(i)),
                            Halfspace::new(vec![q("1"), q("1")], Q::from_i64(4 - i)),
                        ],
                        tol(),
                    )
                    .unwrap(),
                )
            })
            .collect()
    }

    #[test]
    fn three_circles_exact() {
        let cfg = MongeConfig::new(three_circles::<Q>(), tol()).unwrap();
        let rep = run_monge(&cfg, tol()).unwrap();
        assert_eq!(rep.centers[&(0, 1)], pq(&["18", "0"]));
        assert_eq!(rep.centers[&(0, 2)], pq(&["0", "9"]));
        assert_eq!(rep.centers[&(1, 2)], pq(&["-6", "12"]));
        let h = rep.hyperplane.as_ref().unwrap();
        assert_eq!(h.normal(), &[q("1"), q("2")]);
        assert_eq!(h.offset(), &q("18"));
        assert_eq!(rep.residual, 0.0);
        assert!(rep.verdict && !rep.degenerate);
        let cons = cross_ratio_consistency(&rep);
        assert_eq!(cons[&(0, 1, 2)], 0.0);
    }

    #[test]
    fn input_order_does_not_matter() {
        let mut shapes = three_circles::<f64>();
        shapes.reverse();
        let cfg = MongeConfig::new(shapes, tol()).unwrap();
        assert_eq!(cfg.order(), &[2, 1, 0]);
        let rep = run_monge(&cfg, tol()).unwrap();
        assert!(rep.residual <= 1e-15);
        assert_eq!(rep.centers[&(0, 1)].coords(), &[18.0, 0.0]);
    }

    #[test]
    fn halfplane_centers_lie_on_y_axis() {
        let cfg = MongeConfig::new(stacked_halfplanes(|i| Q::from_i64(1) / Q::from_i64(i)), tol()).unwrap();
        assert_eq!(cfg.order(), &[0, 1, 2]);
        let rep = run_monge(&cfg, tol()).unwrap();
        assert_eq!(rep.centers[&(0, 1)], pq(&["0", "-1"]));
        assert_eq!(rep.centers[&(0, 2)], pq(&["0", "0"]));
        assert_eq!(rep.centers[&(1, 2)], pq(&["0", "1/5"]));
        assert_eq!(rep.ratios[&(0, 1)], q("4/3"));
        assert_eq!(rep.ratios[&(0, 2)], q("3"));
        assert_eq!(rep.ratios[&(1, 2)], q("9/4"));
        let h = rep.hyperplane.as_ref().unwrap();
        assert_eq!(h.normal(), &[q("1"), q("0")]);
        assert_eq!(h.offset(), &q("0"));
        assert!(rep.verdict && !rep.degenerate);
        assert!(cross_ratio_consistency(&rep).values().all(|&r| r == 0.0));
    }

    #[test]
    fn halfplane_variant_centers_coincide() {
        let cfg = MongeConfig::new(stacked_halfplanes(|_| q("0")), tol()).unwrap();
        let rep = run_monge(&cfg, tol()).unwrap();
        assert!(rep.centers.values().all(|c| *c == pq(&["0", "0"])));
        assert!(rep.degenerate && rep.verdict);
        assert_eq!(rep.span_dim, 0);
        let h = rep.hyperplane.unwrap();
        assert_eq!(h.normal(), &[q("1"), q("0")]);
        assert_eq!(h.offset(), &q("0"));
    }

    #[test]
    fn equal_sizes_are_rejected() {
        let shapes: Vec<Shape<f64>> = [([0.0, 0.0], 2.0), ([6.0, 0.0], 2.0), ([0.0, 6.0], 1.0)]
            .iter()
            .map(|(c, r)| Shape::Ball(Ball::new(Point::new(c.to_vec()).unwrap(), *r).unwrap()))
            .collect();
        assert_eq!(
            MongeConfig::new(shapes, tol()).unwrap_err(),
            Error::EqualSizes { i: 1, j: 2 }
        );
    }

    #[test]
    fn wrong_shape_count() {
        let mut shapes = three_circles::<f64>();
        shapes.pop();
        assert!(matches!(
            MongeConfig::new(shapes, tol()),
            Err(Error::PointCount { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn translated_halfspaces_report_pair() {
        let shapes: Vec<Shape<Q>> = (0..2)
            .map(|k| {
                Shape::Halfspaces(HalfspaceSet::new(vec![Halfspace::new(vec![q("1")], Q::from_i64(k))], tol()).unwrap())
            })
            .collect();
        let cfg = MongeConfig::new(shapes, tol()).unwrap();
        let err = run_monge(&cfg, tol()).unwrap_err();
        assert!(matches!(err, Error::AtPair { i: 1, j: 2, .. }));
        assert_eq!(err.kind(), "NonUniqueHomothety");
    }

    #[test]
    fn two_shapes_have_no_triples() {
        let shapes: Vec<Shape<f64>> = vec![
            Shape::Ball(Ball::new(Point::new(vec![0.0]).unwrap(), 2.0).unwrap()),
            Shape::Ball(Ball::new(Point::new(vec![3.0]).unwrap(), 1.0).unwrap()),
        ];
        let rep = run_monge(&MongeConfig::new(shapes, tol()).unwrap(), tol()).unwrap();
        assert!(cross_ratio_consistency(&rep).is_empty());
        assert_eq!(rep.centers[&(0, 1)].coords(), &[6.0]);
        assert!(rep.verdict);
    }
}
