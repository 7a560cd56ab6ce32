use std::collections::BTreeMap;

use monge_core::generators::boost;
use monge_core::menelaus::pairs;
use monge_core::noneuclid::{
    arc_contains, geodesic_distance, verify_prop2, xn_edge_points_from_weights, xn_homothety_image, xn_independent,
    xn_lambda, xn_lambda_trig, xn_point_with_ratio, Geometry, XnConfig, XnPoint,
};
use monge_core::Tolerance;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn unit(v: &[f64]) -> Option<Vec<f64>> {
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (r > 0.1).then(|| v.iter().map(|x| x / r).collect())
}

fn sphere_point(v: &[f64]) -> Option<XnPoint> {
    unit(v).map(|u| XnPoint::new(Geometry::Sphere, u, tol()).unwrap())
}

/// The point at distance `t` from the apex in spatial direction `dir`.
fn hyperbolic_point(dir: &[f64], t: f64) -> Option<XnPoint> {
    let u = unit(dir)?;
    let mut x = vec![t.cosh()];
    x.extend(u.iter().map(|d| t.sinh() * d));
    Some(XnPoint::normalize(Geometry::Hyperbolic, &x).unwrap())
}

fn well_conditioned(points: &[XnPoint]) -> bool {
    let m = points.len();
    let d = points[0].vector().len();
    let a = DMatrix::from_fn(m, d, |r, c| points[r].vector()[c]);
    let sv = a.singular_values();
    xn_independent(points, tol()) && sv.min() >= 1e-2 * sv.max()
}

fn spread(weights: &[f64]) -> bool {
    pairs(weights.len()).all(|(i, j)| (weights[i] - weights[j]).abs() >= 0.05 * weights[i].max(weights[j]))
}

/// Orthogonal matrix from the QR factorization of `entries`.
fn orthogonal(d: usize, entries: &[f64]) -> Option<DMatrix<f64>> {
    let a = DMatrix::from_column_slice(d, d, &entries[..d * d]);
    let sv = a.singular_values();
    (sv.min() > 1e-2 * sv.max()).then(|| a.qr().q())
}

fn map_config(c: &XnConfig, f: impl Fn(&[f64]) -> Vec<f64>) -> XnConfig {
    let g = c.geometry();
    let move_point = |p: &XnPoint| XnPoint::normalize(g, &f(p.vector())).unwrap();
    let vertices: Vec<XnPoint> = c.vertices().iter().map(move_point).collect();
    let edge: BTreeMap<_, _> = c.edge_points().iter().map(|(k, p)| (*k, move_point(p))).collect();
    XnConfig::new(vertices, edge, tol()).unwrap()
}

fn sphere_case() -> impl Strategy<Value = (Vec<XnPoint>, Vec<f64>)> {
    (2usize..5).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::vec(-1.0f64..1.0, n + 1), n + 1),
            prop::collection::vec(1.0f64..10.0, n + 1),
        )
            .prop_filter_map("degenerate draw", |(rows, w)| {
                let pts: Option<Vec<XnPoint>> = rows.iter().map(|r| sphere_point(r)).collect();
                let pts = pts?;
                (well_conditioned(&pts) && spread(&w)).then_some((pts, w))
            })
    })
}

/// Vertices in a ball of radius `0.45 * gap` around the apex, where `gap`
/// is the smallest log ratio of consecutive sorted weights.
fn hyperbolic_case() -> impl Strategy<Value = (Vec<XnPoint>, Vec<f64>)> {
    (2usize..5).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::vec(-1.0f64..1.0, n), n + 1),
            prop::collection::vec(0.3f64..1.0, n + 1),
            prop::collection::vec(1.0f64..10.0, n + 1),
        )
            .prop_filter_map("degenerate draw", |(dirs, radii, w)| {
                let mut w = w;
                w.sort_by(|a, b| b.total_cmp(a));
                let gap = w.windows(2).map(|p| (p[0] / p[1]).ln()).fold(f64::INFINITY, f64::min);
                if gap < 0.1 {
                    return None;
                }
                let pts: Option<Vec<XnPoint>> = dirs
                    .iter()
                    .zip(&radii)
                    .map(|(d, r)| hyperbolic_point(d, 0.45 * gap * r))
                    .collect();
                let pts = pts?;
                xn_independent(&pts, tol()).then_some((pts, w))
            })
    })
}

fn assert_sound(config: &XnConfig, weights: &[f64]) -> Result<(), TestCaseError> {
    let rep = verify_prop2(config, tol()).unwrap();
    prop_assert!(rep.verdict, "{:?}", rep.section_error);
    prop_assert!(rep.max_triple_residual() <= 1e-10, "{}", rep.max_triple_residual());
    prop_assert!(rep.hyperplane_residual <= 1e-10, "{}", rep.hyperplane_residual);
    for ((i, j), l) in &rep.lambdas {
        let want = weights[*i] / weights[*j];
        prop_assert!((l - want).abs() <= 1e-10 * want, "{l} vs {want}");
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sphere_weight_construction((v, w) in sphere_case()) {
        // Not every weight order puts b_ij beyond a_j on the short arc.
        if let Ok(config) = xn_edge_points_from_weights(&v, &w, tol()) {
            assert_sound(&config, &w)?;
        }
    }

    #[test]
    fn hyperbolic_weight_construction((v, w) in hyperbolic_case()) {
        let config = xn_edge_points_from_weights(&v, &w, tol()).unwrap();
        assert_sound(&config, &w)?;
    }

    #[test]
    fn sphere_isometry_invariance((v, w) in sphere_case(), entries in prop::collection::vec(-1.0f64..1.0, 25),
                                  pick in 0usize..100) {
        let Ok(config) = xn_edge_points_from_weights(&v, &w, tol()) else { return Ok(()); };
        let d = v[0].vector().len();
        let Some(q) = orthogonal(d, &entries) else { return Ok(()); };
        let rotate = |x: &[f64]| (&q * DMatrix::from_column_slice(d, 1, x)).as_slice().to_vec();
        // One perturbed copy as well, so a false verdict is also preserved.
        let all: Vec<(usize, usize)> = pairs(v.len()).collect();
        let (i, j) = all[pick % all.len()];
        let bad = xn_point_with_ratio(&v[i], &v[j], w[i] / w[j] * 1.01, tol())
            .and_then(|b| config.clone().with_edge_point(i, j, b, tol()));
        let mut cases = vec![config];
        cases.extend(bad);
        for c in cases {
            let before = verify_prop2(&c, tol()).unwrap();
            let after = verify_prop2(&map_config(&c, rotate), tol()).unwrap();
            prop_assert_eq!(before.verdict, after.verdict);
            for (k, l) in &before.lambdas {
                prop_assert!((l - after.lambdas[k]).abs() <= 1e-10 * l.max(1.0));
            }
        }
    }

    #[test]
    fn hyperbolic_isometry_invariance((v, w) in hyperbolic_case(), dir in prop::collection::vec(-1.0f64..1.0, 4),
                                      phi in -1.0f64..1.0, pick in 0usize..100) {
        let config = xn_edge_points_from_weights(&v, &w, tol()).unwrap();
        let n = v[0].dim();
        let Some(u) = unit(&dir[..n]) else { return Ok(()); };
        let lorentz = |x: &[f64]| boost(x, &u, phi);
        let all: Vec<(usize, usize)> = pairs(v.len()).collect();
        let (i, j) = all[pick % all.len()];
        let bad = xn_point_with_ratio(&v[i], &v[j], w[i] / w[j] * 1.01, tol())
            .and_then(|b| config.clone().with_edge_point(i, j, b, tol()));
        let mut cases = vec![config];
        cases.extend(bad);
        for c in cases {
            let before = verify_prop2(&c, tol()).unwrap();
            let after = verify_prop2(&map_config(&c, lorentz), tol()).unwrap();
            prop_assert_eq!(before.verdict, after.verdict);
            for (k, l) in &before.lambdas {
                prop_assert!((l - after.lambdas[k]).abs() <= 1e-10 * l.max(1.0));
            }
        }
    }

    #[test]
    fn algebraic_and_trig_ratios_agree(a in prop::collection::vec(-1.0f64..1.0, 3),
                                       b in prop::collection::vec(-1.0f64..1.0, 3),
                                       ratio in 0.2f64..5.0) {
        let (Some(ai), Some(aj)) = (sphere_point(&a), sphere_point(&b)) else { return Ok(()); };
        let d = geodesic_distance(&ai, &aj).unwrap();
        prop_assume!(d > 0.1 && d < 2.5);
        let Ok(p) = xn_point_with_ratio(&ai, &aj, ratio, tol()) else { return Ok(()); };
        let alg = xn_lambda(&ai, &aj, &p, tol()).unwrap();
        let trig = xn_lambda_trig(&ai, &aj, &p, tol()).unwrap();
        prop_assert!((alg - ratio).abs() <= 1e-12 * ratio.max(1.0), "{alg} vs {ratio}");
        prop_assert!((alg - trig).abs() <= 1e-12 * alg.max(1.0), "{alg} vs {trig}");
    }

    #[test]
    fn homothety_roundtrip(t in 0.1f64..1.0, s in 0.05f64..1.0, hyperbolic in any::<bool>(),
                           dir in prop::collection::vec(-1.0f64..1.0, 3), phi in 0.0f64..1.0) {
        // a_i at distance t from the apex, a_j further along, b beyond a_j.
        let Some(u) = unit(&dir) else { return Ok(()); };
        let geometry = if hyperbolic { Geometry::Hyperbolic } else { Geometry::Sphere };
        let at = |x: f64| {
            let (c, sn) = if hyperbolic { (x.cosh(), x.sinh()) } else { (x.cos(), x.sin()) };
            let mut v = vec![c];
            v.extend(u.iter().map(|d| sn * d));
            let v = if hyperbolic { boost(&v, &u, phi) } else { v };
            XnPoint::normalize(geometry, &v).unwrap()
        };
        let (ai, aj, b) = (at(0.0), at(t), at(t + s));
        let d_ib = geodesic_distance(&b, &ai).unwrap();
        let d_jb = geodesic_distance(&b, &aj).unwrap();
        prop_assert!((d_ib - (t + s)).abs() <= 1e-12 && (d_jb - s).abs() <= 1e-12);
        let image = xn_homothety_image(&b, &aj, d_ib / d_jb).unwrap();
        let gap: f64 = image.vector().iter().zip(ai.vector()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        prop_assert!(gap <= 1e-10, "image misses a_i by {gap}");
        let want = match geometry {
            Geometry::Sphere => (t + s).sin() / s.sin(),
            Geometry::Hyperbolic => (t + s).sinh() / s.sinh(),
        };
        let l = xn_lambda(&ai, &aj, &b, tol()).unwrap();
        prop_assert!((l - want).abs() <= 1e-10 * want, "{l} vs {want}");
    }

    #[test]
    fn geodesic_additivity(t in 0.05f64..1.5, s in 0.05f64..1.5, hyperbolic in any::<bool>(),
                           dir in prop::collection::vec(-1.0f64..1.0, 3)) {
        let Some(u) = unit(&dir) else { return Ok(()); };
        let geometry = if hyperbolic { Geometry::Hyperbolic } else { Geometry::Sphere };
        let at = |x: f64| {
            let (c, sn) = if hyperbolic { (x.cosh(), x.sinh()) } else { (x.cos(), x.sin()) };
            let mut v = vec![c];
            v.extend(u.iter().map(|d| sn * d));
            XnPoint::normalize(geometry, &v).unwrap()
        };
        let (x, y, z) = (at(0.0), at(t), at(t + s));
        prop_assert!(arc_contains(&x, &z, &y, tol()).unwrap());
        let xy = geodesic_distance(&x, &y).unwrap();
        let yz = geodesic_distance(&y, &z).unwrap();
        let xz = geodesic_distance(&x, &z).unwrap();
        prop_assert!((xy + yz - xz).abs() <= 1e-12 * xz.max(1.0));
        // Swapping the order puts the middle point outside.
        prop_assert!(!arc_contains(&x, &y, &z, tol()).unwrap());
    }
}

#[test]
fn standard_basis_golden() {
    let e = |k: usize| {
        let mut v = vec![0.0; 3];
        v[k] = 1.0;
        XnPoint::new(Geometry::Sphere, v, tol()).unwrap()
    };
    let v = [e(0), e(1), e(2)];
    let config = xn_edge_points_from_weights(&v, &[1.0, 2.0, 4.0], tol()).unwrap();
    let rep = verify_prop2(&config, tol()).unwrap();
    assert!(rep.verdict);
    let want = [((0, 1), 0.5), ((0, 2), 0.25), ((1, 2), 0.5)];
    for (k, l) in want {
        assert!((rep.lambdas[&k] - l).abs() <= 1e-15);
    }
    let n = rep.hyperplane.unwrap().normal().to_vec();
    for (got, want) in n.iter().zip([0.25, 0.5, 1.0]) {
        assert!((got - want).abs() <= 1e-12, "{n:?}");
    }
    // b_12 = (-2, 1, 0) / sqrt(5).
    let b = config.edge_point(0, 1).vector().to_vec();
    let r5 = 5f64.sqrt();
    assert!((b[0] + 2.0 / r5).abs() < 1e-15 && (b[1] - 1.0 / r5).abs() < 1e-15 && b[2] == 0.0);
}
