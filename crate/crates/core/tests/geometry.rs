use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use torus_spread::geom::{
    convex_hull, diameter, eps_dense, hausdorff, minkowski_zonogon, op_norm, primitive_completion,
    zonogon_vertices_exact, Mat2, PointCloud, Vec2Q, Vec2R,
};

fn cloud(points: Vec<Vec2R>) -> PointCloud {
    PointCloud::from_points(points).unwrap()
}

fn brute_directed(a: &[Vec2R], b: &[Vec2R]) -> f64 {
    a.iter()
        .map(|p| b.iter().map(|q| p.dist(*q)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Extreme points of a finite rational set: endpoints of every ordered pair
/// `(p, q)` with all other points strictly left of `p→q` or strictly inside
/// the segment `[p, q]`.
fn brute_hull(points: &[Vec2Q]) -> BTreeSet<(BigRational, BigRational)> {
    let mut pts: Vec<Vec2Q> = points.to_vec();
    pts.sort_by(|a, b| (&a.x, &a.y).cmp(&(&b.x, &b.y)));
    pts.dedup();
    let mut out = BTreeSet::new();
    for p in &pts {
        for q in &pts {
            if p == q {
                continue;
            }
            let e = q - p;
            let edge = pts.iter().all(|r| {
                if r == p || r == q {
                    return true;
                }
                let c = e.cross(&(r - p));
                if c.is_positive() {
                    return true;
                }
                if c.is_negative() {
                    return false;
                }
                let t = e.dot(&(r - p));
                t.is_positive() && t < e.norm_sq()
            });
            if edge {
                out.insert((p.x.clone(), p.y.clone()));
                out.insert((q.x.clone(), q.y.clone()));
            }
        }
    }
    out
}

fn key(v: &Vec2Q) -> (BigRational, BigRational) {
    (v.x.clone(), v.y.clone())
}

fn small_points(max: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-20i64..=20, -20i64..=20), 1..max)
}

fn real_points(max: usize) -> impl Strategy<Value = Vec<Vec2R>> {
    prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..max)
        .prop_map(|v| v.into_iter().map(|(x, y)| Vec2R::new(x, y)).collect())
}

fn generators() -> impl Strategy<Value = Vec<Vec2Q>> {
    prop::collection::vec((-6i64..=6, -6i64..=6, 1i64..=3), 1..6).prop_map(|v| {
        v.into_iter()
            .map(|(x, y, d)| {
                if x == 0 && y == 0 {
                    (1, 0, d)
                } else {
                    (x, y, d)
                }
            })
            .map(|(x, y, d)| Vec2Q::from_fractions(x, d, y, d).unwrap())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hull_matches_brute_force(raw in small_points(40)) {
        let real: Vec<Vec2R> = raw.iter().map(|&(x, y)| Vec2R::new(x as f64, y as f64)).collect();
        let exact: Vec<Vec2Q> = raw.iter().map(|&(x, y)| Vec2Q::from_ints(x, y)).collect();
        let hull: BTreeSet<_> = convex_hull(&real)
            .iter()
            .map(|p| key(&Vec2Q::from_ints(p.x as i64, p.y as i64)))
            .collect();
        let oracle = brute_hull(&exact);
        if oracle.is_empty() {
            // A single distinct point.
            prop_assert_eq!(hull.len(), 1);
        } else {
            prop_assert_eq!(hull, oracle);
        }
    }

    #[test]
    fn zonogon_matches_sign_enumeration(gens in generators()) {
        let (vertices, degenerate) = zonogon_vertices_exact(&gens).unwrap();
        let mut sums = vec![Vec2Q::zero()];
        for g in &gens {
            sums = sums.iter().flat_map(|s| [s + g, s - g]).collect();
        }
        let oracle = brute_hull(&sums);
        let got: BTreeSet<_> = vertices.iter().map(key).collect();
        prop_assert_eq!(got, oracle);
        let all_parallel = gens.iter().all(|g| g.cross(&gens[0]).is_zero());
        prop_assert_eq!(degenerate, all_parallel);
    }

    #[test]
    fn zonogon_is_point_symmetric(gens in generators()) {
        let (vertices, _) = zonogon_vertices_exact(&gens).unwrap();
        let set: BTreeSet<_> = vertices.iter().map(key).collect();
        let negated: BTreeSet<_> = vertices.iter().map(|v| key(&-v)).collect();
        prop_assert_eq!(set, negated);
        prop_assert!(minkowski_zonogon(&gens).unwrap().is_point_symmetric());
    }

    #[test]
    fn hausdorff_matches_brute_force(a in real_points(200), b in real_points(200)) {
        let d = hausdorff(&cloud(a.clone()), &cloud(b.clone()));
        let oracle = brute_directed(&a, &b).max(brute_directed(&b, &a));
        prop_assert!((d - oracle).abs() <= 1e-12, "{} vs {}", d, oracle);
    }

    #[test]
    fn hausdorff_triangle_and_translation(
        a in real_points(60),
        b in real_points(60),
        c in real_points(60),
        t in (-5.0f64..5.0, -5.0f64..5.0),
    ) {
        let (a, b, c) = (cloud(a), cloud(b), cloud(c));
        let ab = hausdorff(&a, &b);
        prop_assert!(hausdorff(&a, &c) <= ab + hausdorff(&b, &c) + 1e-12);
        // Exact when the shift is representable without rounding.
        let t = Vec2R::new((t.0 * 8.0).round() / 8.0, (t.1 * 8.0).round() / 8.0);
        let shifted = hausdorff(&a.translate(t), &b.translate(t));
        prop_assert!((shifted - ab).abs() <= 1e-12);
    }

    #[test]
    fn diameter_of_union_dominates(a in real_points(80), b in real_points(80)) {
        let (a, b) = (cloud(a), cloud(b));
        let u = diameter(&a.union(&b));
        prop_assert!(u >= diameter(&a).max(diameter(&b)));
    }

    #[test]
    fn op_norm_submultiplicative(
        m in prop::array::uniform4(-5.0f64..5.0),
        n in prop::array::uniform4(-5.0f64..5.0),
    ) {
        let a = Mat2::new(m[0], m[1], m[2], m[3]);
        let b = Mat2::new(n[0], n[1], n[2], n[3]);
        prop_assert!(op_norm(&a.mul(&b)) <= op_norm(&a) * op_norm(&b) * (1.0 + 1e-12) + 1e-12);
        if a.det().abs() > 1e-3 {
            let inv = a.inverse().unwrap();
            prop_assert!(op_norm(&a) * op_norm(&inv) >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn primitive_completion_exact(w1 in -500i64..=500, w2 in -500i64..=500) {
        let g = num_integer::gcd(w1, w2);
        prop_assume!(g == 1);
        let a = primitive_completion(w1, w2).unwrap();
        prop_assert_eq!(a.det(), 1);
        prop_assert_eq!(a.second_column(), (w1, w2));
    }

    #[test]
    fn eps_dense_monotone(a in real_points(50), b in real_points(50), eps in 0.01f64..5.0) {
        let (a, b) = (cloud(a), cloud(b));
        if eps_dense(&a, &b, eps).unwrap() {
            prop_assert!(eps_dense(&a, &b, eps * 1.5).unwrap());
            prop_assert!(eps_dense(&a, &b, eps + 1e-9).unwrap());
        }
    }
}

#[test]
fn primitive_completion_rejects_non_primitive() {
    assert!(primitive_completion(2, 4).is_err());
    assert!(primitive_completion(0, 0).is_err());
}

#[test]
fn big_rational_generators_survive() {
    let big = BigRational::new(BigInt::from(10).pow(30), BigInt::from(3));
    let g = Vec2Q::new(big.clone(), BigRational::zero());
    let (v, degenerate) = zonogon_vertices_exact(&[g, Vec2Q::from_ints(0, 1)]).unwrap();
    assert!(!degenerate);
    assert_eq!(v.len(), 4);
    assert!(v.iter().any(|p| p.x == big));
}
