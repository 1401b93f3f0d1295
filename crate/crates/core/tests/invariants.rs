use hypercube_sections::codim1::{codim1_size, level_count, SignCount};
use hypercube_sections::cube::{
    evaluate_pattern, evaluate_pattern_with, oracle_enumerate, IntersectionPattern, LinearMap, VertexSet,
};
use hypercube_sections::search::{bfs_search_with, SearchConfig};
use hypercube_sections::shape::{
    canonical_form, is_isomorphic, max_intersection, max_intersection_exhaustive, max_intersection_with, Shape,
};
use hypercube_sections::{Exec, Rational};
use proptest::prelude::*;

fn entry() -> impl Strategy<Value = Rational> {
    (-3i64..=3, 1i64..=3).prop_map(|(p, q)| Rational::new(p, q))
}

fn map_strategy(max_k: usize, max_m: usize) -> impl Strategy<Value = LinearMap> {
    (1..=max_k, 0..=max_m).prop_flat_map(|(k, m)| {
        prop::collection::vec(prop::collection::vec(entry(), k), m)
            .prop_map(move |rows| LinearMap::new(k, rows).expect("valid dimensions"))
    })
}

fn shape_strategy() -> impl Strategy<Value = Shape> {
    prop::collection::vec(1u32..64, 1..=3).prop_filter_map("valid shape", |bits| {
        Shape::new(bits.into_iter().map(VertexSet::from_bits).collect()).ok()
    })
}

fn permute_columns(map: &LinearMap, perm: &[usize]) -> LinearMap {
    let rows = map.rows().iter().map(|r| perm.iter().map(|&j| r[j]).collect()).collect();
    LinearMap::new(map.k(), rows).unwrap()
}

fn relabel(shape: &Shape, perm: &[usize]) -> Shape {
    let edges = shape.edges().iter().rev().map(|e| VertexSet::from_indices(e.iter().map(|v| perm[v]))).collect();
    Shape::new(edges).unwrap().with_free(shape.free_count()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn adding_a_row_never_grows(map in map_strategy(6, 3), row in prop::collection::vec(entry(), 6)) {
        let row = row[..map.k()].to_vec();
        let (p, t) = evaluate_pattern(&map);
        let (q, u) = evaluate_pattern(&map.with_row(row).unwrap());
        prop_assert!(u <= t);
        prop_assert!(q.is_subset(&p));
    }

    #[test]
    fn zero_column_doubles(map in map_strategy(7, 3)) {
        let t = evaluate_pattern(&map).1;
        prop_assert_eq!(evaluate_pattern(&map.with_zero_column().unwrap()).1, 2 * t);
    }

    #[test]
    fn column_permutations_keep_size(map in map_strategy(6, 3), seed in any::<u64>()) {
        let k = map.k();
        let mut perm: Vec<usize> = (0..k).collect();
        let mut s = seed;
        for i in (1..k).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(evaluate_pattern(&permute_columns(&map, &perm)).1, map.size());
    }

    #[test]
    fn row_order_is_irrelevant(map in map_strategy(6, 3)) {
        let mut rows = map.rows().to_vec();
        rows.reverse();
        prop_assert_eq!(LinearMap::new(map.k(), rows).unwrap().size(), map.size());
    }

    #[test]
    fn codim1_closed_form_matches_cube(a in 0usize..=12, b in 0usize..=12, c in 0usize..=12) {
        prop_assume!(a + b + c >= 1 && a + b + c <= 12);
        let sc = SignCount::new(a, b, c);
        let map = sc.to_map().unwrap();
        prop_assert_eq!(u128::from(evaluate_pattern(&map).1), codim1_size(sc));
        let total: u128 = (-(b as i64)..=a as i64).map(|j| level_count(sc, j)).sum();
        prop_assert_eq!(total, 1u128 << (a + b + c));
        let level1 = (0u32..1 << sc.k())
            .filter(|&x| (x & ((1 << a) - 1)).count_ones() as i64 - (x >> a & ((1 << b) - 1)).count_ones() as i64 == 1)
            .count() as u128;
        prop_assert_eq!(level1, level_count(sc, 1));
    }

    #[test]
    fn levels_are_symmetric(a in 0usize..=20, b in 0usize..=20, c in 0usize..=4, j in -20i64..=20) {
        let sc = SignCount::new(a, b, c);
        prop_assert_eq!(level_count(sc, j), level_count(sc.swapped(), -j));
        prop_assert_eq!(codim1_size(sc), level_count(sc, 0) + level_count(sc, 1));
    }

    #[test]
    fn canonical_form_ignores_labels(shape in shape_strategy(), seed in any::<u64>()) {
        let v = 6;
        let mut perm: Vec<usize> = (0..v).collect();
        let mut s = seed;
        for i in (1..v).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let other = relabel(&shape, &perm);
        prop_assert!(is_isomorphic(&shape, &other));
        prop_assert_eq!(canonical_form(&shape), canonical_form(&other));
        prop_assert_eq!(canonical_form(&canonical_form(&shape)), canonical_form(&shape));
        prop_assert_eq!(
            max_intersection(&shape, None).map(|m| m.max),
            max_intersection(&other, None).map(|m| m.max)
        );
    }

    #[test]
    fn max_intersection_matches_exhaustive(shape in shape_strategy(), cut in 0u64..=64) {
        let exclude = (cut > 0).then_some(cut);
        let fast = max_intersection(&shape, exclude);
        let slow = max_intersection_exhaustive(&shape, exclude);
        prop_assert_eq!(fast.as_ref().map(|m| m.max), slow.as_ref().map(|m| m.max));
        if let Some(m) = fast {
            prop_assert_eq!(evaluate_pattern(&shape.to_map(&m.witness).unwrap()).1, m.max);
        }
    }

    #[test]
    fn hex_round_trip(map in map_strategy(8, 2)) {
        let p = map.pattern();
        prop_assert_eq!(IntersectionPattern::from_hex(map.k(), &p.to_hex()).unwrap(), p);
        let json = serde_json::to_string(&map).unwrap();
        prop_assert_eq!(serde_json::from_str::<LinearMap>(&json).unwrap(), map);
    }

    #[test]
    fn sequential_and_parallel_agree(map in map_strategy(10, 3), shape in shape_strategy()) {
        prop_assert_eq!(
            evaluate_pattern_with(&map, Exec::Sequential),
            evaluate_pattern_with(&map, Exec::Parallel)
        );
        let a = max_intersection_with(&shape, None, Exec::Sequential);
        let b = max_intersection_with(&shape, None, Exec::Parallel);
        prop_assert_eq!(a.as_ref().map(|m| (m.max, serde_json::to_value(&m.witness).unwrap())),
                        b.as_ref().map(|m| (m.max, serde_json::to_value(&m.witness).unwrap())));
    }
}

#[test]
fn searches_agree_across_executors() {
    for cfg in [SearchConfig::large(7).unwrap().with_max_edges(3), SearchConfig::small(6).unwrap().with_max_edges(4)] {
        let a = serde_json::to_value(bfs_search_with(&cfg, Exec::Sequential).unwrap().depths).unwrap();
        let b = serde_json::to_value(bfs_search_with(&cfg, Exec::Parallel).unwrap().depths).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn oracle_agrees_across_executors() {
    let entries: Vec<Rational> = (-1..=1).map(Rational::from_integer).collect();
    let a = oracle_enumerate(3, 2, &entries, Rational::new(0, 1), u128::MAX, Exec::Sequential).unwrap();
    let b = oracle_enumerate(3, 2, &entries, Rational::new(0, 1), u128::MAX, Exec::Parallel).unwrap();
    assert_eq!(a, b);
}
