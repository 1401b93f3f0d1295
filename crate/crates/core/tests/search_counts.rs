use hypercube_sections::search::{bfs_search, SearchConfig};
use hypercube_sections::shape::{classify_star, StarClass};

#[test]
fn small_mode_pairs() {
    let cfg = SearchConfig::small(8).unwrap().with_max_edges(2);
    let res = bfs_search(&cfg).unwrap();
    let pairs = res.survivors(2);
    assert_eq!(pairs.len(), 20);
    let doubled = pairs.iter().filter(|s| s.shape.edges()[0] == s.shape.edges()[1]).count();
    assert_eq!(doubled, 2);
    assert_eq!(pairs.len() - doubled, 18);
    assert!(pairs.iter().all(|s| s.shape.vertex_count() <= 6));
    let raw = bfs_search(&cfg.with_dedupe(false)).unwrap();
    assert_eq!(raw.survivors(2).len(), 20);
}

#[test]
fn small_mode_full_run() {
    let res = bfs_search(&SearchConfig::small(8).unwrap().with_max_edges(16)).unwrap();
    let counts: Vec<usize> = res.depths.iter().map(|d| d.shapes.len()).collect();
    assert_eq!(counts, vec![7, 20, 24, 6, 6, 6, 5, 2, 0]);
    // every deeper survivor hangs off a common centre
    for d in res.depths.iter().filter(|d| d.edges >= 4) {
        for s in &d.shapes {
            let centre = s.shape.edges().iter().fold(s.shape.edges()[0], |a, &e| a.intersection(e));
            assert!(!centre.is_empty(), "{}", s.shape);
            assert!(s.shape.edges().iter().all(|e| e.difference(centre).len() <= 1), "{}", s.shape);
        }
    }
    let stars = res.survivors(4).iter().filter(|s| classify_star(&s.shape) != StarClass::Other).count();
    assert_eq!(stars, 4);
}
