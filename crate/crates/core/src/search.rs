//! Breadth-first search over shapes.
//!
//! Shapes are grown one edge at a time, in order of non-increasing edge size,
//! and a shape survives while its best sign assignment keeps more than
//! `threshold` of its cube. Since adding an edge never increases that
//! fraction, pruned shapes cannot have surviving descendants.

use crate::codim1::support_size_bound;
use crate::cube::VertexSet;
use crate::rational::{format_fraction, serde_fraction};
use crate::shape::{canonical_form, max_intersection_with, MaxIntersection, Shape, SignAssignment};
use crate::{Error, Exec, Rational, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Sizes above half the cube: every edge keeps a private vertex.
    #[serde(rename = "large")]
    MinimalLarge,
    /// Sizes just below half: duplicate edges allowed, and assignments at or
    /// above the parent's (scaled) size are skipped as redundant.
    #[serde(rename = "small")]
    NonRedundantSmall,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "large" => Ok(Mode::MinimalLarge),
            "small" => Ok(Mode::NonRedundantSmall),
            other => Err(Error::InvalidArgument(format!("unknown mode {other:?}, expected large or small"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    pub mode: Mode,
    /// Largest number of vertices a shape may cover.
    pub k: usize,
    #[serde(with = "serde_fraction")]
    pub threshold: Rational,
    pub max_edge_size: usize,
    pub max_edges: usize,
    pub dedupe: bool,
    /// Upper bound on the number of shapes evaluated.
    pub node_budget: u64,
}

impl SearchConfig {
    pub fn new(mode: Mode, k: usize, threshold: Rational, max_edges: usize) -> Result<Self> {
        if threshold <= Rational::from_integer(0) || threshold >= Rational::from_integer(1) {
            return Err(Error::InvalidArgument(format!("threshold {} not in (0, 1)", format_fraction(&threshold))));
        }
        if !(2..=crate::cube::MAX_DIM).contains(&k) {
            return Err(Error::DimensionOutOfRange { k, max: crate::cube::MAX_DIM });
        }
        if max_edges == 0 {
            return Err(Error::InvalidArgument("max_edges must be positive".into()));
        }
        let max_edge_size = support_size_bound(threshold)?.max(2);
        Ok(SearchConfig { mode, k, threshold, max_edge_size, max_edges, dedupe: true, node_budget: 10_000_000 })
    }

    /// Threshold 1/2, edges of size at most 7, up to `k - 1` edges.
    pub fn large(k: usize) -> Result<Self> {
        Self::new(Mode::MinimalLarge, k, Rational::new(1, 2), k.saturating_sub(1).max(1))
    }

    /// Threshold 15/32, edges of size at most 9, up to `k - 1` edges.
    pub fn small(k: usize) -> Result<Self> {
        Self::new(Mode::NonRedundantSmall, k, Rational::new(15, 32), k.saturating_sub(1).max(1))
    }

    pub fn with_max_edges(mut self, max_edges: usize) -> Self {
        self.max_edges = max_edges;
        self
    }

    pub fn with_dedupe(mut self, dedupe: bool) -> Self {
        self.dedupe = dedupe;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Survivor {
    pub shape: Shape,
    pub max: u64,
    #[serde(with = "serde_fraction")]
    pub fraction: Rational,
    pub witness: SignAssignment,
    /// The skip bound passed to the maximisation, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excluded_at_or_above: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Depth {
    pub edges: usize,
    pub shapes: Vec<Survivor>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// A depth produced no survivors.
    Exhausted,
    /// Stopped at `max_edges` with survivors left.
    DepthLimit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub config: SearchConfig,
    pub depths: Vec<Depth>,
    pub evaluated: u64,
    pub pruned: u64,
    pub termination: Termination,
}

impl SearchResult {
    pub fn survivors(&self, edges: usize) -> &[Survivor] {
        self.depths.iter().find(|d| d.edges == edges).map_or(&[], |d| d.shapes.as_slice())
    }
}

/// Vertices grouped by which edges contain them, classes in ascending order
/// of membership mask.
fn venn_classes(shape: &Shape) -> Vec<Vec<usize>> {
    let mut classes: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for v in 0..shape.vertex_count() {
        classes.entry(shape.vertex_type(v)).or_default().push(v);
    }
    classes.into_values().collect()
}

/// All shapes obtained by adding one edge no larger than the current smallest
/// one (and `max_edge_size`), covering at most `config.k` vertices.
///
/// Vertices of one Venn class are interchangeable, so only the number taken
/// from each class matters. In large mode additions that break minimality are
/// dropped.
pub fn expand(shape: &Shape, config: &SearchConfig) -> Vec<Shape> {
    let classes = venn_classes(shape);
    let nv = shape.vertex_count();
    let top = config.max_edge_size.min(shape.smallest_edge().unwrap_or(config.max_edge_size));
    let radix: Vec<usize> = classes.iter().map(|c| c.len() + 1).collect();
    let combos: usize = radix.iter().product();
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for size in 2..=top {
        for mut code in 0..combos {
            let mut edge = VertexSet::EMPTY;
            let mut taken = 0;
            for (class, &r) in classes.iter().zip(&radix) {
                let n = code % r;
                code /= r;
                taken += n;
                for &v in &class[..n] {
                    edge.insert(v);
                }
            }
            if taken > size || nv + size - taken > config.k {
                continue;
            }
            for v in nv..nv + size - taken {
                edge.insert(v);
            }
            let child = shape.add_edge(edge).expect("edge within limits");
            if config.mode == Mode::MinimalLarge && !child.is_minimal() {
                continue;
            }
            if config.dedupe && !seen.insert(canonical_form(&child)) {
                continue;
            }
            out.push(child);
        }
    }
    out
}

fn fraction_of(max: u64, shape: &Shape) -> Rational {
    Rational::new(max as i64, 1i64 << shape.k())
}

fn evaluate(shape: Shape, exclude: Option<u64>, threshold: Rational) -> Option<Survivor> {
    let MaxIntersection { max, witness } = max_intersection_with(&shape, exclude, Exec::Sequential)?;
    let fraction = fraction_of(max, &shape);
    (fraction > threshold).then_some(Survivor { shape, max, fraction, witness, excluded_at_or_above: exclude })
}

pub fn bfs_search(config: &SearchConfig) -> Result<SearchResult> {
    bfs_search_with(config, Exec::default())
}

/// Frontier shapes are expanded and evaluated in parallel; merging happens in
/// frontier order and, with dedupe on, the surviving canonical shapes are
/// sorted, so the result does not depend on scheduling.
pub fn bfs_search_with(config: &SearchConfig, exec: Exec) -> Result<SearchResult> {
    let mut evaluated = 0u64;
    let mut pruned = 0u64;
    let mut frontier = Vec::new();
    for s in 2..=config.max_edge_size.min(config.k) {
        let shape = Shape::new(vec![VertexSet::prefix(s)])?;
        let shape = if config.dedupe { canonical_form(&shape) } else { shape };
        evaluated += 1;
        match evaluate(shape, None, config.threshold) {
            Some(s) => frontier.push(s),
            None => pruned += 1,
        }
    }
    let mut depths = vec![Depth { edges: 1, shapes: frontier.clone() }];
    let mut termination = if frontier.is_empty() { Termination::Exhausted } else { Termination::DepthLimit };
    for edges in 2..=config.max_edges {
        if frontier.is_empty() {
            break;
        }
        let results: Vec<(u64, Vec<Survivor>)> = exec.map(&frontier, |parent| {
            let children = expand(&parent.shape, config);
            let n = children.len() as u64;
            let survivors = children
                .into_iter()
                .filter_map(|child| {
                    let exclude = match config.mode {
                        Mode::NonRedundantSmall => {
                            Some(parent.max << (child.vertex_count() - parent.shape.vertex_count()))
                        }
                        Mode::MinimalLarge => None,
                    };
                    evaluate(child, exclude, config.threshold)
                })
                .collect();
            (n, survivors)
        });
        let mut next = Vec::new();
        let mut merged: BTreeMap<Shape, Survivor> = BTreeMap::new();
        for (n, survivors) in results {
            evaluated += n;
            pruned += n - survivors.len() as u64;
            if config.dedupe {
                for s in survivors {
                    let key = canonical_form(&s.shape);
                    match merged.get(&key) {
                        Some(prev) if prev.max >= s.max => {}
                        _ => {
                            merged.insert(key, s);
                        }
                    }
                }
            } else {
                next.extend(survivors);
            }
            if evaluated > config.node_budget {
                return Err(Error::SearchBudget { depth: edges, nodes: evaluated as usize });
            }
        }
        if config.dedupe {
            let keyed: Vec<(Shape, Survivor)> = merged.into_iter().collect();
            // re-derive the witness on the canonical representative
            next = exec.map(&keyed, |(canon, s)| {
                let r = max_intersection_with(canon, s.excluded_at_or_above, Exec::Sequential)
                    .expect("isomorphic shapes have the same values");
                debug_assert_eq!(r.max, s.max);
                Survivor { shape: canon.clone(), witness: r.witness, ..s.clone() }
            });
        }
        depths.push(Depth { edges, shapes: next.clone() });
        if next.is_empty() {
            termination = Termination::Exhausted;
        }
        frontier = next;
    }
    Ok(SearchResult { config: config.clone(), depths, evaluated, pruned, termination })
}

/// Canonical survivors at a depth, one per isomorphism class with the largest
/// size recorded for it, in canonical order.
pub fn final_shapes(result: &SearchResult, edges: usize) -> Vec<(Shape, u64)> {
    let mut out: BTreeMap<Shape, u64> = BTreeMap::new();
    for s in result.survivors(edges) {
        let e = out.entry(canonical_form(&s.shape)).or_insert(0);
        *e = (*e).max(s.max);
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::{assignment_intersection, classify_star, StarClass};

    fn shape(edges: &[&[usize]]) -> Shape {
        Shape::from_edge_lists(edges).unwrap()
    }

    #[test]
    fn config_defaults() {
        let l = SearchConfig::large(8).unwrap();
        assert_eq!((l.max_edge_size, l.max_edges, l.dedupe), (7, 7, true));
        let s = SearchConfig::small(8).unwrap();
        assert_eq!(s.max_edge_size, 9);
        assert!(SearchConfig::new(Mode::MinimalLarge, 8, Rational::new(1, 1), 3).is_err());
        assert_eq!("small".parse::<Mode>().unwrap(), Mode::NonRedundantSmall);
        assert!("medium".parse::<Mode>().is_err());
    }

    #[test]
    fn large_expansion_of_a_pair() {
        let cfg = SearchConfig::large(6).unwrap();
        let kids = expand(&shape(&[&[0, 1]]), &cfg);
        let canon: Vec<Shape> = kids.iter().map(canonical_form).collect();
        assert!(canon.contains(&canonical_form(&shape(&[&[0, 1], &[1, 2]]))));
        assert!(canon.contains(&canonical_form(&shape(&[&[0, 1], &[2, 3]]))));
        assert!(!canon.contains(&canonical_form(&shape(&[&[0, 1], &[0, 1]]))));
    }

    #[test]
    fn small_mode_allows_duplicates() {
        let cfg = SearchConfig::small(8).unwrap();
        let kids = expand(&shape(&[&[0, 1, 2]]), &cfg);
        assert!(kids.contains(&shape(&[&[0, 1, 2], &[0, 1, 2]])));
    }

    #[test]
    fn edge_sizes_never_increase() {
        let cfg = SearchConfig::small(8).unwrap();
        for child in expand(&shape(&[&[0, 1, 2], &[2, 3, 4]]), &cfg) {
            assert!(child.edges().iter().all(|e| e.len() <= 3));
            assert!(child.vertex_count() <= 8);
        }
    }

    #[test]
    fn large_search_k6() {
        let r = bfs_search(&SearchConfig::large(6).unwrap()).unwrap();
        for s in r.survivors(2) {
            assert!(s.shape.vertex_count() <= 6);
        }
        let three = r.survivors(3);
        assert_eq!(three.len(), 2);
        for s in three {
            match classify_star(&s.shape) {
                StarClass::Star21 => assert_eq!(s.max, (1 << (s.shape.k() - 1)) + 1),
                StarClass::Star32 => assert_eq!(s.max, (1 << (s.shape.k() - 1)) + 2),
                other => panic!("unexpected {other:?} for {}", s.shape),
            }
        }
        for d in &r.depths {
            for s in &d.shapes {
                assert_eq!(assignment_intersection(&s.shape, &s.witness).unwrap(), s.max);
                assert!(s.fraction > Rational::new(1, 2));
            }
        }
    }

    #[test]
    fn strategies_agree() {
        let cfg = SearchConfig::large(7).unwrap().with_max_edges(3);
        assert_eq!(bfs_search_with(&cfg, Exec::Sequential).unwrap(), bfs_search_with(&cfg, Exec::Parallel).unwrap());
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let mut cfg = SearchConfig::large(8).unwrap();
        cfg.node_budget = 5;
        assert!(matches!(bfs_search(&cfg), Err(Error::SearchBudget { .. })));
    }
}
