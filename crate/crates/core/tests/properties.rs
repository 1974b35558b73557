//! Property tests over randomly generated primitives, graphs, models and
//! images.

use proptest::prelude::*;

use roofkit::io::json::{graph_from_json, graph_to_json, model_from_json, model_to_json};
use roofkit::model::{Facet, PrimitiveType, RelationVector, RoofGraph, RoofModel, RoofPrimitive, Symmetry, Vertex};
use roofkit::raster::{rasterize_primitive, RasterConfig};
use roofkit::relations::{enforce_colinearity, snap_ground_truth};
use roofkit::rmmd::{model_distance, normalize_model, set_distance, RmmdConfig, SQUARE_SIDE};
use roofkit::vectorize::boundary_coordinate;
use roofkit::{Grid, Side};

fn ptype() -> impl Strategy<Value = PrimitiveType> {
    prop::sample::select(PrimitiveType::ALL.to_vec())
}

prop_compose! {
    fn int_primitive()(l in 0u32..30, t in 0u32..30, w in 2u32..32, h in 2u32..32, ty in ptype(),
                       a in 0.05f64..1.5, b in 0.05f64..1.5) -> RoofPrimitive<f64> {
        let r = (l + w).min(32).max(l + 2);
        let bt = (t + h).min(32).max(t + 2);
        let alr = if ty.has_lr_facets() { a } else { 0.0 };
        let atb = if ty.has_tb_facets() { b } else { 0.0 };
        RoofPrimitive::new([l as f64, t as f64, r as f64, bt as f64], ty, alr, atb)
    }
}

prop_compose! {
    fn graph()(prims in prop::collection::vec(int_primitive(), 1..6), seed in any::<u64>()) -> RoofGraph<f64> {
        let mut g = RoofGraph::with_primitives(32, 0.5, prims);
        let mut s = seed;
        let pairs: Vec<_> = g.pairs().collect();
        for (i, j) in pairs {
            let v = std::array::from_fn(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 40) as f64 / (1u64 << 24) as f64
            });
            g.set_relation(i, j, RelationVector::from_array(v));
        }
        g
    }
}

fn symmetry() -> impl Strategy<Value = Symmetry> {
    prop::sample::select(Symmetry::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rasterization_commutes_with_symmetries(p in int_primitive(), sym in symmetry()) {
        let cfg = RasterConfig::default();
        let n = 32.0;
        let direct = rasterize_primitive(&sym.apply_primitive(&p, n), &cfg).unwrap();
        let moved = rasterize_primitive(&p, &cfg).unwrap().transformed(sym);
        prop_assert_eq!(&direct.height, &moved.height);
        for y in 0..32 {
            for x in 0..32 {
                let (a, b) = (direct.facet_of(x, y).map(|f| f.side), moved.facet_of(x, y).map(|f| f.side));
                if a == b {
                    prop_assert_eq!(direct.orientation.get(x, y), moved.orientation.get(x, y));
                    prop_assert_eq!(direct.angle.get(x, y), moved.angle.get(x, y));
                    continue;
                }
                // Only tie pixels may differ: the tie rule prefers top over
                // bottom over left over right, and the symmetry relabels sides.
                let (cx, cy) = (x as f64 + 0.5, y as f64 + 0.5);
                let q = sym.apply_primitive(&p, n);
                let planes = roofkit::raster::facet_planes(&q, 3.0, 0.5);
                let heights: Vec<f64> = planes.iter().map(|pl| pl.height_at(cx, cy)).collect();
                let lowest = heights.iter().copied().fold(f64::INFINITY, f64::min);
                prop_assert!(heights.iter().filter(|h| **h == lowest).count() >= 2);
            }
        }
    }

    #[test]
    fn symmetry_actions_compose(g in graph(), a in symmetry(), b in symmetry()) {
        prop_assert_eq!(g.transformed(a).transformed(b), g.transformed(a.then(b)));
        prop_assert_eq!(g.transformed(a).transformed(a.inverse()), g.clone());
        prop_assert!(g.transformed(a).check().is_ok());
    }

    #[test]
    fn graph_json_round_trips(g in graph()) {
        prop_assert_eq!(graph_from_json::<f64>(&graph_to_json(&g)).unwrap(), g.clone());
        let g32 = g.cast::<f32>();
        prop_assert_eq!(graph_from_json::<f32>(&graph_to_json(&g32)).unwrap(), g32);
    }

    #[test]
    fn snapping_is_idempotent(g in graph()) {
        let once = snap_ground_truth(&g);
        prop_assert_eq!(snap_ground_truth(&once), once);
    }

    #[test]
    fn enforcement_stays_in_hull(g in graph()) {
        let boxes: Vec<[f64; 4]> = g.primitives.iter().map(|p| p.bbox()).collect();
        let out = enforce_colinearity(&boxes, &g.relations);
        for (i, b) in out.iter().enumerate() {
            for k in 0..4 {
                let lo = boxes.iter().map(|x| x[k]).fold(f64::INFINITY, f64::min);
                let hi = boxes.iter().map(|x| x[k]).fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(b[k] >= lo - 1e-12 && b[k] <= hi + 1e-12, "{} {}", i, k);
            }
        }
    }

    #[test]
    fn boundary_coordinates_translate(l in 0usize..10, t in 0usize..10, w in 2usize..12, h in 2usize..12,
                                      k in 0usize..10, soft in 0.05f64..1.0) {
        let mask = |dx: usize| Grid::from_fn(32, 32, |x, y| {
            let inside = (l + dx..l + dx + w).contains(&x) && (t..t + h).contains(&y);
            let rim = x == l + dx + w && (t..t + h).contains(&y);
            if inside { 1.0 } else if rim { soft } else { 0.0 }
        });
        let (m0, mk) = (mask(0), mask(k));
        for side in [Side::Left, Side::Right] {
            let a = boundary_coordinate(&m0, side).unwrap();
            let b = boundary_coordinate(&mk, side).unwrap();
            prop_assert!((b - a - k as f64).abs() < 1e-9);
        }
        for side in [Side::Top, Side::Bottom] {
            prop_assert_eq!(boundary_coordinate(&m0, side).unwrap(), boundary_coordinate(&mk, side).unwrap());
        }
    }
}

prop_compose! {
    fn facet()(pts in prop::collection::vec((0.0f64..40.0, 0.0f64..40.0), 3..7), angle in 0.0f64..1.2) -> Facet<f64> {
        Facet::new(pts.into_iter().map(|(x, y)| Vertex::xy(x, y)).collect(), angle)
    }
}

prop_compose! {
    fn model()(facets in prop::collection::vec(facet(), 1..5)) -> RoofModel<f64> {
        RoofModel::new(facets)
    }
}

fn rotate<T: Clone>(v: &[T], k: usize) -> Vec<T> {
    let mut out = v.to_vec();
    if !out.is_empty() {
        let n = out.len();
        out.rotate_left(k % n);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn model_json_round_trips(m in model()) {
        prop_assert_eq!(model_from_json::<f64>(&model_to_json(&m)).unwrap(), m);
    }

    #[test]
    fn set_distance_identity_and_permutations(s1 in prop::collection::vec(model(), 1..4),
                                              s2 in prop::collection::vec(model(), 1..4),
                                              k in 0usize..5) {
        let cfg = RmmdConfig::default();
        let norm = |s: &[RoofModel<f64>]| s.iter().map(|m| normalize_model(m, SQUARE_SIDE).unwrap()).collect::<Vec<_>>();
        let (a, b) = (norm(&s1), norm(&s2));
        prop_assert_eq!(set_distance(&a, &a, &cfg).unwrap(), 0.0);
        let d = set_distance(&a, &b, &cfg).unwrap();
        let b_rot = rotate(&b, k);
        let a_rot: Vec<RoofModel<f64>> = rotate(&a, k + 1)
            .into_iter()
            .map(|m| RoofModel::new(rotate(&m.facets, k)))
            .collect();
        let d2 = set_distance(&a_rot, &b_rot, &cfg).unwrap();
        prop_assert!((d - d2).abs() <= 1e-9 * d.max(1.0), "{} vs {}", d, d2);
    }

    #[test]
    fn normalization_absorbs_uniform_scale(s1 in prop::collection::vec(model(), 1..3),
                                           s2 in prop::collection::vec(model(), 1..3)) {
        let cfg = RmmdConfig::default();
        let scaled = |s: &[RoofModel<f64>], f: f64| s
            .iter()
            .map(|m| {
                let facets = m.facets.iter().map(|fa| Facet::new(
                    fa.vertices.iter().map(|v| Vertex::xy(v.x * f, v.y * f)).collect(), fa.plane_angle)).collect();
                normalize_model(&RoofModel::new(facets), SQUARE_SIDE).unwrap()
            })
            .collect::<Vec<_>>();
        let d1 = set_distance(&scaled(&s1, 1.0), &scaled(&s2, 1.0), &cfg).unwrap();
        let d2 = set_distance(&scaled(&s1, 2.0), &scaled(&s2, 2.0), &cfg).unwrap();
        prop_assert!((d1 - d2).abs() <= 1e-9 * d1.max(1.0));
    }

    #[test]
    fn penalty_is_irrelevant_when_counts_match(
        m1 in prop::collection::vec(prop::collection::vec((0.0f64..40.0, 0.0f64..40.0), 4), 2),
        m2 in prop::collection::vec(prop::collection::vec((0.0f64..40.0, 0.0f64..40.0), 4), 2),
        extra in 0.0f64..50.0,
    ) {
        let build = |fs: Vec<Vec<(f64, f64)>>| RoofModel::new(
            fs.into_iter().map(|v| Facet::new(v.into_iter().map(|(x, y)| Vertex::xy(x, y)).collect(), 0.0)).collect());
        let (a, b) = (build(m1), build(m2));
        let lo = RmmdConfig::default();
        let hi = RmmdConfig { penalty: lo.penalty + extra, ..lo };
        prop_assert_eq!(model_distance(&a, &b, &hi), model_distance(&a, &b, &lo));
    }
}
