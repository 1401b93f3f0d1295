//! Shapes: the hypergraph of row supports of a map.
//!
//! A [`Shape`] keeps only its covered vertices, relabelled `0..vertex_count`;
//! isolated coordinates are carried as `free_count` and double every size.
//! Edges are kept sorted by size (descending) and then lexicographically, and
//! may repeat.

use crate::codim1::{level_count, SignCount};
use crate::cube::{LinearMap, VertexSet, MAX_DIM};
use crate::{Error, Exec, Rational, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::{Ordering, Reverse};
use std::collections::BTreeSet;
use std::fmt;

/// Largest number of edges a shape may carry (vertex types are `u64` masks).
pub const MAX_EDGES: usize = 64;

fn edge_key(e: VertexSet) -> (Reverse<usize>, Vec<usize>) {
    (Reverse(e.len()), e.to_vec())
}

fn cmp_edges(a: &VertexSet, b: &VertexSet) -> Ordering {
    edge_key(*a).cmp(&edge_key(*b))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    edges: Vec<VertexSet>,
    vertex_count: usize,
    free_count: usize,
}

impl Shape {
    /// Compacts the covered vertices to `0..n` (keeping their relative order)
    /// and sorts the edges.
    pub fn new(edges: Vec<VertexSet>) -> Result<Self> {
        if edges.len() > MAX_EDGES {
            return Err(Error::InvalidShape(format!("{} edges exceed the limit {MAX_EDGES}", edges.len())));
        }
        if edges.iter().any(|e| e.is_empty()) {
            return Err(Error::InvalidShape("empty edge".into()));
        }
        let covered = edges.iter().fold(VertexSet::EMPTY, |a, &e| a.union(e));
        if covered.len() > MAX_DIM {
            return Err(Error::InvalidShape(format!("{} vertices exceed the limit {MAX_DIM}", covered.len())));
        }
        let mut relabel = [usize::MAX; 32];
        for (new, old) in covered.iter().enumerate() {
            relabel[old] = new;
        }
        let mut edges: Vec<VertexSet> =
            edges.iter().map(|e| VertexSet::from_indices(e.iter().map(|v| relabel[v]))).collect();
        edges.sort_by(cmp_edges);
        Ok(Shape { edges, vertex_count: covered.len(), free_count: 0 })
    }

    pub fn from_edge_lists(edges: &[&[usize]]) -> Result<Self> {
        Self::new(edges.iter().map(|e| VertexSet::from_indices(e.iter().copied())).collect())
    }

    pub fn with_free(mut self, free_count: usize) -> Result<Self> {
        if self.vertex_count + free_count > MAX_DIM {
            return Err(Error::InvalidShape("too many isolated vertices".into()));
        }
        self.free_count = free_count;
        Ok(self)
    }

    /// Shape of a map: row supports of its nonzero rows; zero columns become
    /// isolated vertices.
    pub fn of_map(map: &LinearMap) -> Result<Self> {
        let (rows, total) = crate::cube::support(map);
        let s = Shape::new(rows.into_iter().filter(|r| !r.is_empty()).collect())?;
        s.with_free(map.k() - total.len())
    }

    pub fn edges(&self) -> &[VertexSet] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn free_count(&self) -> usize {
        self.free_count
    }

    /// Dimension of the domain, isolated vertices included.
    pub fn k(&self) -> usize {
        self.vertex_count + self.free_count
    }

    pub fn smallest_edge(&self) -> Option<usize> {
        self.edges.iter().map(|e| e.len()).min()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.contains(v)).count()
    }

    /// Bit `i` set iff vertex `v` lies in edge `i`.
    pub fn vertex_type(&self, v: usize) -> u64 {
        self.edges.iter().enumerate().filter(|(_, e)| e.contains(v)).fold(0, |a, (i, _)| a | 1 << i)
    }

    pub fn add_edge(&self, edge: VertexSet) -> Result<Self> {
        let mut edges = self.edges.clone();
        edges.push(edge);
        Shape::new(edges)?.with_free(self.free_count)
    }

    /// Every edge has a vertex no other edge covers.
    pub fn is_minimal(&self) -> bool {
        (0..self.edges.len()).all(|i| {
            let others = self
                .edges
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(VertexSet::EMPTY, |a, (_, &e)| a.union(e));
            !self.edges[i].is_subset(others)
        })
    }

    /// The map whose nonzero entries are exactly the signed incidences.
    pub fn to_map(&self, signs: &SignAssignment) -> Result<LinearMap> {
        signs.check(self)?;
        let rows = self
            .edges
            .iter()
            .zip(&signs.negatives)
            .map(|(e, neg)| {
                (0..self.k())
                    .map(|v| {
                        Rational::from_integer(if !e.contains(v) {
                            0
                        } else if neg.contains(v) {
                            -1
                        } else {
                            1
                        })
                    })
                    .collect()
            })
            .collect();
        LinearMap::new(self.k().max(1), rows)
    }
}

impl PartialOrd for Shape {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Shape {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.edges.len(), self.vertex_count, self.free_count)
            .cmp(&(other.edges.len(), other.vertex_count, other.free_count))
            .then_with(|| {
                self.edges
                    .iter()
                    .zip(&other.edges)
                    .map(|(a, b)| cmp_edges(a, b))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
    }
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Shape(k={}, edges={:?})", self.k(), self.edges)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges
            .iter()
            .map(|e| format!("{{{}}}", e.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "k={} {}", self.k(), edges.join(" "))
    }
}

#[derive(Serialize, Deserialize)]
struct ShapeJson {
    k: usize,
    edges: Vec<Vec<usize>>,
}

impl Serialize for Shape {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ShapeJson { k: self.k(), edges: self.edges.iter().map(|e| e.to_vec()).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Shape {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = ShapeJson::deserialize(d)?;
        if j.edges.iter().flatten().any(|&v| v >= j.k) {
            return Err(D::Error::custom("edge vertex outside 0..k"));
        }
        let s = Shape::new(j.edges.into_iter().map(VertexSet::from_indices).collect()).map_err(D::Error::custom)?;
        let free = j.k - s.vertex_count;
        s.with_free(free).map_err(D::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Canonical form

struct Canon<'a> {
    types: Vec<u64>,
    sorted_types: Vec<u64>,
    colours: Vec<(Reverse<usize>, Vec<usize>)>,
    edges: &'a [VertexSet],
    best: Option<Vec<u64>>,
}

fn swap_bits(t: u64, e: usize, f: usize) -> u64 {
    let be = t >> e & 1;
    let bf = t >> f & 1;
    (t & !(1 << e | 1 << f)) | be << f | bf << e
}

impl Canon<'_> {
    fn transposition_is_automorphism(&self, e: usize, f: usize) -> bool {
        let mut swapped: Vec<u64> = self.types.iter().map(|&t| swap_bits(t, e, f)).collect();
        swapped.sort_unstable();
        swapped == self.sorted_types
    }

    fn search(&mut self, order: &mut Vec<usize>, remaining: &mut Vec<usize>) {
        if remaining.is_empty() {
            let mut pos = [0usize; MAX_EDGES];
            for (p, &e) in order.iter().enumerate() {
                pos[e] = p;
            }
            let mut cert: Vec<u64> = self
                .types
                .iter()
                .map(|&t| (0..order.len()).filter(|&e| t >> e & 1 == 1).fold(0u64, |a, e| a | 1 << pos[e]))
                .collect();
            cert.sort_unstable();
            if self.best.as_ref().is_none_or(|b| cert < *b) {
                self.best = Some(cert);
            }
            return;
        }
        let key = |e: usize| {
            let inter: Vec<usize> =
                order.iter().map(|&o| self.edges[e].intersection(self.edges[o]).len()).collect();
            (self.colours[e].clone(), inter)
        };
        let keys: Vec<_> = remaining.iter().map(|&e| key(e)).collect();
        let min = keys.iter().min().expect("nonempty").clone();
        let cell: Vec<usize> =
            remaining.iter().zip(&keys).filter(|(_, k)| **k == min).map(|(&e, _)| e).collect();
        let mut reps: Vec<usize> = Vec::new();
        for &e in &cell {
            if reps.iter().any(|&r| self.transposition_is_automorphism(e, r)) {
                continue;
            }
            reps.push(e);
        }
        for e in reps {
            let at = remaining.iter().position(|&x| x == e).expect("present");
            remaining.remove(at);
            order.push(e);
            self.search(order, remaining);
            order.pop();
            remaining.insert(at, e);
        }
    }
}

/// A canonical representative of the isomorphism class of `shape`: two
/// shapes are isomorphic iff their canonical forms are equal.
///
/// Vertices are identified with their membership masks over an edge order;
/// the form is the lexicographically least sorted mask list over the edge
/// orders explored. Edge orders are restricted by an invariant colouring and
/// pruned by edge transpositions that are automorphisms.
pub fn canonical_form(shape: &Shape) -> Shape {
    let m = shape.edges.len();
    if m == 0 {
        return shape.clone();
    }
    let types: Vec<u64> = (0..shape.vertex_count).map(|v| shape.vertex_type(v)).collect();
    let mut sorted_types = types.clone();
    sorted_types.sort_unstable();
    let colours = shape
        .edges
        .iter()
        .map(|e| {
            let mut degs: Vec<usize> = e.iter().map(|v| types[v].count_ones() as usize).collect();
            degs.sort_unstable();
            (Reverse(e.len()), degs)
        })
        .collect();
    let mut canon = Canon { types, sorted_types, colours, edges: &shape.edges, best: None };
    canon.search(&mut Vec::with_capacity(m), &mut (0..m).collect());
    let cert = canon.best.expect("at least one leaf");
    let edges = (0..m)
        .map(|p| VertexSet::from_indices(cert.iter().enumerate().filter(|(_, t)| *t >> p & 1 == 1).map(|(v, _)| v)))
        .collect();
    Shape::new(edges).expect("relabelling of a valid shape").with_free(shape.free_count).expect("same dimension")
}

pub fn is_isomorphic(a: &Shape, b: &Shape) -> bool {
    canonical_form(a) == canonical_form(b)
}

// ---------------------------------------------------------------------------
// Stars

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StarClass {
    /// 2-uniform, no repeated edge, one vertex in every edge.
    Star21,
    /// 3-uniform, no repeated edge, one vertex pair in every edge.
    Star32,
    /// A (3,2)-star plus one or more edges equal to its centre pair.
    Star32WithCenterEdges,
    Other,
}

fn has_duplicates(edges: &[VertexSet]) -> bool {
    edges.windows(2).any(|w| w[0] == w[1])
}

pub fn classify_star(shape: &Shape) -> StarClass {
    let edges = &shape.edges;
    if edges.is_empty() {
        return StarClass::Other;
    }
    let common = edges.iter().fold(edges[0], |a, &e| a.intersection(e));
    // edges are sorted, so equal edges are adjacent
    if edges.iter().all(|e| e.len() == 2) && !has_duplicates(edges) && !common.is_empty() {
        return StarClass::Star21;
    }
    if edges.iter().all(|e| e.len() == 3) && !has_duplicates(edges) && common.len() >= 2 {
        return StarClass::Star32;
    }
    let (triples, pairs): (Vec<VertexSet>, Vec<VertexSet>) = edges.iter().partition(|e| e.len() == 3);
    if !triples.is_empty()
        && !pairs.is_empty()
        && pairs.iter().all(|p| p.len() == 2 && *p == pairs[0])
        && !has_duplicates(&triples)
        && triples.iter().all(|t| pairs[0].is_subset(*t))
    {
        return StarClass::Star32WithCenterEdges;
    }
    StarClass::Other
}

// ---------------------------------------------------------------------------
// Sign assignments and intersection sizes

/// For each edge, the vertices carrying -1; every other incidence is +1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignAssignment {
    negatives: Vec<VertexSet>,
}

impl SignAssignment {
    pub fn new(negatives: Vec<VertexSet>) -> Self {
        SignAssignment { negatives }
    }

    pub fn all_positive(shape: &Shape) -> Self {
        SignAssignment { negatives: vec![VertexSet::EMPTY; shape.edge_count()] }
    }

    pub fn negatives(&self) -> &[VertexSet] {
        &self.negatives
    }

    fn check(&self, shape: &Shape) -> Result<()> {
        if self.negatives.len() != shape.edges.len() {
            return Err(Error::SignMismatch(format!(
                "{} sign rows for {} edges",
                self.negatives.len(),
                shape.edges.len()
            )));
        }
        for (i, (n, e)) in self.negatives.iter().zip(&shape.edges).enumerate() {
            if !n.is_subset(*e) {
                return Err(Error::SignMismatch(format!("edge {i}: signs outside the edge")));
            }
        }
        Ok(())
    }

    /// Signs edge by edge, vertices ascending; the tie-break order for
    /// witnesses compares these vectors with -1 < +1.
    pub fn signs(&self, shape: &Shape) -> Vec<Vec<i8>> {
        shape
            .edges
            .iter()
            .zip(&self.negatives)
            .map(|(e, n)| e.iter().map(|v| if n.contains(v) { -1 } else { 1 }).collect())
            .collect()
    }

    pub fn from_signs(shape: &Shape, signs: &[Vec<i8>]) -> Result<Self> {
        if signs.len() != shape.edges.len() {
            return Err(Error::SignMismatch("wrong number of edges".into()));
        }
        let mut negatives = Vec::with_capacity(signs.len());
        for (e, s) in shape.edges.iter().zip(signs) {
            if s.len() != e.len() || s.iter().any(|&x| x != 1 && x != -1) {
                return Err(Error::SignMismatch("edge sign vector malformed".into()));
            }
            negatives.push(VertexSet::from_indices(e.iter().zip(s).filter(|(_, &x)| x == -1).map(|(v, _)| v)));
        }
        Ok(SignAssignment { negatives })
    }

    fn lex_key(&self, shape: &Shape) -> Vec<i8> {
        self.signs(shape).concat()
    }
}

impl Serialize for SignAssignment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.negatives.iter().map(|n| n.to_vec()))
    }
}

/// Shared (degree >= 2) vertices and, per edge, which of them it uses and how
/// many private vertices it has.
struct Layout {
    shared: Vec<usize>,
    edge_shared: Vec<Vec<usize>>,
    edge_private: Vec<Vec<usize>>,
}

impl Layout {
    fn new(shape: &Shape) -> Self {
        let shared: Vec<usize> = (0..shape.vertex_count).filter(|&v| shape.degree(v) >= 2).collect();
        let pos = |v: usize| shared.iter().position(|&s| s == v);
        let edge_shared = shape.edges.iter().map(|e| e.iter().filter_map(pos).collect()).collect();
        let edge_private =
            shape.edges.iter().map(|e| e.iter().filter(|&v| shape.degree(v) == 1).collect()).collect();
        Layout { shared, edge_shared, edge_private }
    }

    /// Number of private completions of edge `i` at shared point `x`, given
    /// the -1 positions among its shared vertices (bit q for the q-th) and the
    /// number of +1 private entries.
    fn extensions(&self, i: usize, x: u32, shared_neg: u32, plus: usize) -> u64 {
        let partial: i64 = self.edge_shared[i]
            .iter()
            .enumerate()
            .filter(|&(_, &p)| x >> p & 1 == 1)
            .map(|(q, _)| if shared_neg >> q & 1 == 1 { -1 } else { 1 })
            .sum();
        let sc = SignCount::new(plus, self.edge_private[i].len() - plus, 0);
        (level_count(sc, -partial) + level_count(sc, 1 - partial)) as u64
    }
}

/// `t(L)` for the map with the given signed incidences, by conditioning on
/// the shared vertices and counting private completions in closed form.
pub fn assignment_intersection(shape: &Shape, signs: &SignAssignment) -> Result<u64> {
    signs.check(shape)?;
    let layout = Layout::new(shape);
    let per_edge: Vec<(u32, usize)> = (0..shape.edges.len())
        .map(|i| {
            let shared_neg = layout.edge_shared[i]
                .iter()
                .enumerate()
                .filter(|&(_, &p)| signs.negatives[i].contains(layout.shared[p]))
                .fold(0u32, |a, (q, _)| a | 1 << q);
            let plus = layout.edge_private[i].iter().filter(|&&v| !signs.negatives[i].contains(v)).count();
            (shared_neg, plus)
        })
        .collect();
    let total: u64 = (0..1u32 << layout.shared.len())
        .map(|x| {
            per_edge
                .iter()
                .enumerate()
                .map(|(i, &(neg, plus))| layout.extensions(i, x, neg, plus))
                .product::<u64>()
        })
        .sum();
    Ok(total << shape.free_count)
}

/// Best intersection size over all sign assignments and the lexicographically
/// least assignment achieving it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaxIntersection {
    pub max: u64,
    pub witness: SignAssignment,
}

/// Per-edge choice: signs on the edge's shared vertices and the number of +1
/// private entries. Only that count matters for private vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Choice {
    shared_neg: u32,
    plus: usize,
}

struct Reduced<'a> {
    shape: &'a Shape,
    layout: Layout,
    choices: Vec<Vec<Choice>>,
    // tables[i][c][x]
    tables: Vec<Vec<Vec<u64>>>,
    // twin classes: edges with the same shared vertices and private count
    classes: Vec<Vec<usize>>,
    multisets: Vec<Vec<Vec<u16>>>,
    radix: Vec<u64>,
    total: u64,
}

fn multisets(choices: usize, len: usize) -> Vec<Vec<u16>> {
    fn rec(start: usize, choices: usize, len: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for c in start..choices {
            cur.push(c as u16);
            rec(c, choices, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, choices, len, &mut Vec::new(), &mut out);
    out
}

impl<'a> Reduced<'a> {
    fn new(shape: &'a Shape) -> Self {
        let layout = Layout::new(shape);
        let m = shape.edges.len();
        let npoints = 1u32 << layout.shared.len();
        let choices: Vec<Vec<Choice>> = (0..m)
            .map(|i| {
                let ns = layout.edge_shared[i].len();
                (0..1u32 << ns)
                    .flat_map(|shared_neg| (0..=layout.edge_private[i].len()).map(move |plus| Choice { shared_neg, plus }))
                    .collect()
            })
            .collect();
        let tables = (0..m)
            .map(|i| {
                choices[i]
                    .iter()
                    .map(|c| (0..npoints).map(|x| layout.extensions(i, x, c.shared_neg, c.plus)).collect())
                    .collect()
            })
            .collect();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for i in 0..m {
            match classes.iter_mut().find(|c| {
                let j = c[0];
                layout.edge_shared[j] == layout.edge_shared[i]
                    && layout.edge_private[j].len() == layout.edge_private[i].len()
            }) {
                Some(c) => c.push(i),
                None => classes.push(vec![i]),
            }
        }
        let multisets: Vec<Vec<Vec<u16>>> =
            classes.iter().map(|c| multisets(choices[c[0]].len(), c.len())).collect();
        let radix: Vec<u64> = multisets.iter().map(|m| m.len() as u64).collect();
        let total = radix.iter().try_fold(1u64, |a, &r| a.checked_mul(r)).expect("assignment space overflows u64");
        Reduced { shape, layout, choices, tables, classes, multisets, radix, total }
    }

    fn decode(&self, mut idx: u64) -> Vec<&[u16]> {
        self.radix
            .iter()
            .zip(&self.multisets)
            .map(|(&r, ms)| {
                let d = (idx % r) as usize;
                idx /= r;
                ms[d].as_slice()
            })
            .collect()
    }

    fn value(&self, idx: u64, acc: &mut [u64]) -> u64 {
        acc.fill(1 << self.shape.free_count);
        for (class, ms) in self.classes.iter().zip(self.decode(idx)) {
            for (&edge, &c) in class.iter().zip(ms) {
                let table = &self.tables[edge][c as usize];
                for (a, t) in acc.iter_mut().zip(table) {
                    *a *= t;
                }
            }
        }
        acc.iter().sum()
    }

    fn concrete(&self, edge: usize, c: Choice) -> VertexSet {
        let mut neg = VertexSet::EMPTY;
        for (q, &p) in self.layout.edge_shared[edge].iter().enumerate() {
            if c.shared_neg >> q & 1 == 1 {
                neg.insert(self.layout.shared[p]);
            }
        }
        let private = &self.layout.edge_private[edge];
        // -1 sorts first, so the least arrangement puts the -1s lowest
        for &v in &private[..private.len() - c.plus] {
            neg.insert(v);
        }
        neg
    }

    fn edge_signs(&self, edge: usize, neg: VertexSet) -> Vec<i8> {
        self.shape.edges[edge].iter().map(|v| if neg.contains(v) { -1 } else { 1 }).collect()
    }

    /// Least assignment in the orbit of a multiset choice: within each twin
    /// class, edges in order greedily take their least available choice.
    fn witness(&self, idx: u64) -> SignAssignment {
        let mut negatives = vec![VertexSet::EMPTY; self.shape.edges.len()];
        for (class, ms) in self.classes.iter().zip(self.decode(idx)) {
            let mut pool: Vec<u16> = ms.to_vec();
            for &edge in class {
                let (at, neg) = pool
                    .iter()
                    .enumerate()
                    .map(|(at, &c)| (at, self.concrete(edge, self.choices[edge][c as usize])))
                    .min_by(|a, b| self.edge_signs(edge, a.1).cmp(&self.edge_signs(edge, b.1)))
                    .expect("pool matches class size");
                pool.remove(at);
                negatives[edge] = neg;
            }
        }
        SignAssignment { negatives }
    }
}

/// Maximum of [`assignment_intersection`] over all sign assignments.
///
/// With `exclude_at_or_above`, assignments reaching that size are skipped;
/// `None` means every assignment was skipped.
pub fn max_intersection(shape: &Shape, exclude_at_or_above: Option<u64>) -> Option<MaxIntersection> {
    max_intersection_with(shape, exclude_at_or_above, Exec::default())
}

pub fn max_intersection_with(shape: &Shape, exclude_at_or_above: Option<u64>, exec: Exec) -> Option<MaxIntersection> {
    let red = Reduced::new(shape);
    let npoints = 1usize << red.layout.shared.len();
    let allowed = |v: u64| exclude_at_or_above.is_none_or(|e| v < e);
    let best = exec.fold_range(
        0..red.total,
        || (None::<u64>, vec![0u64; npoints]),
        |(best, mut acc), idx| {
            let v = red.value(idx, &mut acc);
            let best = if allowed(v) { Some(best.map_or(v, |b: u64| b.max(v))) } else { best };
            (best, acc)
        },
        |a, b| {
            let best = match (a.0, b.0) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            };
            (best, a.1)
        },
    );
    let max = best.0?;
    let witness = exec
        .fold_range(
            0..red.total,
            || (None::<(Vec<i8>, SignAssignment)>, vec![0u64; npoints]),
            |(cur, mut acc), idx| {
                if red.value(idx, &mut acc) != max {
                    return (cur, acc);
                }
                let w = red.witness(idx);
                let key = w.lex_key(shape);
                let cur = match cur {
                    Some((ref k, _)) if *k <= key => cur,
                    _ => Some((key, w)),
                };
                (cur, acc)
            },
            |a, b| {
                let best = match (a.0, b.0) {
                    (Some(x), Some(y)) => Some(if y.0 < x.0 { y } else { x }),
                    (x, y) => x.or(y),
                };
                (best, a.1)
            },
        )
        .0
        .expect("a maximiser exists")
        .1;
    Some(MaxIntersection { max, witness })
}

/// Reference enumeration over every sign vector in lexicographic order, no
/// symmetry reduction.
pub fn max_intersection_exhaustive(shape: &Shape, exclude_at_or_above: Option<u64>) -> Option<MaxIntersection> {
    let incidences: Vec<(usize, usize)> =
        shape.edges.iter().enumerate().flat_map(|(i, e)| e.iter().map(move |v| (i, v))).collect();
    let n = incidences.len();
    assert!(n <= 24, "exhaustive enumeration over {n} incidences");
    let mut best: Option<MaxIntersection> = None;
    // bit (n-1-p) set means incidence p is +1, so counting upwards walks the
    // sign vectors in lexicographic order with -1 < +1
    for code in 0u32..1 << n {
        let mut negatives = vec![VertexSet::EMPTY; shape.edges.len()];
        for (p, &(i, v)) in incidences.iter().enumerate() {
            if code >> (n - 1 - p) & 1 == 0 {
                negatives[i].insert(v);
            }
        }
        let signs = SignAssignment { negatives };
        let t = assignment_intersection(shape, &signs).expect("well-formed");
        if exclude_at_or_above.is_some_and(|e| t >= e) {
            continue;
        }
        if best.as_ref().is_none_or(|b| t > b.max) {
            best = Some(MaxIntersection { max: t, witness: signs });
        }
    }
    best
}

/// Every value of [`assignment_intersection`] over all sign assignments.
pub fn assignment_values(shape: &Shape) -> BTreeSet<u64> {
    let red = Reduced::new(shape);
    let mut acc = vec![0u64; 1 << red.layout.shared.len()];
    (0..red.total).map(|i| red.value(i, &mut acc)).collect()
}

/// `max_intersection / 2^k` with no exclusion; unchanged by isolated vertices.
pub fn shape_fraction(shape: &Shape) -> Rational {
    let max = max_intersection(shape, None).expect("no exclusion").max;
    Rational::new(max as i64, 1i64 << shape.k())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(edges: &[&[usize]]) -> Shape {
        Shape::from_edge_lists(edges).unwrap()
    }

    fn star21(edges: usize) -> Shape {
        Shape::new((1..=edges).map(|v| VertexSet::from_indices([0, v])).collect()).unwrap()
    }

    fn star32(edges: usize) -> Shape {
        Shape::new((2..edges + 2).map(|v| VertexSet::from_indices([0, 1, v])).collect()).unwrap()
    }

    #[test]
    fn construction_compacts_and_sorts() {
        let s = shape(&[&[5, 7], &[1, 5, 9]]);
        assert_eq!(s.vertex_count(), 4);
        assert_eq!(s.edges(), &[VertexSet::from_indices([0, 1, 3]), VertexSet::from_indices([1, 2])]);
        assert!(Shape::new(vec![VertexSet::EMPTY]).is_err());
    }

    #[test]
    fn canonical_relabelling() {
        let a = shape(&[&[1, 2], &[1, 3]]);
        let b = shape(&[&[2, 3], &[2, 1]]);
        assert_eq!(canonical_form(&a), canonical_form(&b));
        let path = shape(&[&[0, 1], &[1, 2], &[2, 3]]);
        assert_ne!(canonical_form(&star21(3)), canonical_form(&path));
        // a twin-heavy shape stays cheap
        let big = star32(12);
        assert_eq!(canonical_form(&big).edge_count(), 12);
    }

    #[test]
    fn canonical_form_is_invariant_under_permutation() {
        let s = shape(&[&[0, 1, 2], &[2, 3, 4], &[0, 4], &[1, 3], &[0, 1, 2]]);
        let c = canonical_form(&s);
        let perms: [[usize; 5]; 3] = [[4, 3, 2, 1, 0], [1, 0, 3, 2, 4], [2, 4, 0, 1, 3]];
        for p in perms {
            let edges = s.edges().iter().map(|e| VertexSet::from_indices(e.iter().map(|v| p[v]))).collect();
            assert_eq!(canonical_form(&Shape::new(edges).unwrap()), c);
        }
        assert_eq!(canonical_form(&c), c);
    }

    #[test]
    fn star_classes() {
        assert_eq!(classify_star(&shape(&[&[1, 2], &[1, 3], &[1, 4]])), StarClass::Star21);
        assert_eq!(classify_star(&shape(&[&[1, 2, 3], &[1, 2, 4], &[1, 2, 5]])), StarClass::Star32);
        assert_eq!(classify_star(&shape(&[&[1, 2, 3], &[1, 2, 4], &[1, 2]])), StarClass::Star32WithCenterEdges);
        assert_eq!(classify_star(&shape(&[&[1, 2, 3], &[1, 2, 4], &[1, 2], &[1, 2]])), StarClass::Star32WithCenterEdges);
        assert_eq!(classify_star(&shape(&[&[0, 1], &[1, 2], &[2, 3]])), StarClass::Other);
        assert_eq!(classify_star(&shape(&[&[0, 1], &[0, 1], &[0, 2]])), StarClass::Other);
        assert_eq!(classify_star(&shape(&[&[0, 1, 2], &[0, 3, 4]])), StarClass::Other);
    }

    #[test]
    fn worked_examples() {
        let s = shape(&[&[0, 1, 2], &[1, 2, 3]]);
        // leaves carry -1, the shared pair +1 in both rows
        let agree = SignAssignment::new(vec![VertexSet::from_indices([0]), VertexSet::from_indices([3])]);
        assert_eq!(assignment_intersection(&s, &agree).unwrap(), 10);
        // second row: -1 on vertex 1, +1 on vertex 2, +1 on its leaf
        let disagree = SignAssignment::new(vec![VertexSet::from_indices([0]), VertexSet::from_indices([1])]);
        assert_eq!(assignment_intersection(&s, &disagree).unwrap(), 8);
        let tri = shape(&[&[0, 1, 2], &[0, 3, 4], &[0, 5, 6]]);
        let signs = SignAssignment::new(vec![
            VertexSet::from_indices([2]),
            VertexSet::from_indices([4]),
            VertexSet::from_indices([6]),
        ]);
        assert_eq!(assignment_intersection(&tri, &signs).unwrap(), 54);
    }

    #[test]
    fn assignment_matches_map_evaluation() {
        let s = shape(&[&[0, 1, 2, 3], &[2, 3, 4], &[0, 4]]);
        let signs = SignAssignment::new(vec![
            VertexSet::from_indices([1, 3]),
            VertexSet::from_indices([4]),
            VertexSet::EMPTY,
        ]);
        let t = assignment_intersection(&s, &signs).unwrap();
        assert_eq!(t, s.to_map(&signs).unwrap().size());
        let bad = SignAssignment::new(vec![VertexSet::from_indices([4]), VertexSet::EMPTY, VertexSet::EMPTY]);
        assert!(assignment_intersection(&s, &bad).is_err());
    }

    #[test]
    fn star_maxima() {
        for k in 3..=9 {
            assert_eq!(max_intersection(&star21(k - 1), None).unwrap().max, (1 << (k - 1)) + 1, "star21 k={k}");
        }
        for k in 4..=10 {
            assert_eq!(max_intersection(&star32(k - 2), None).unwrap().max, (1 << (k - 1)) + 2, "star32 k={k}");
        }
        let two = max_intersection(&star32(2), None).unwrap();
        assert_eq!(two.max, 10);
        let signs = two.witness.signs(&star32(2));
        // both rows agree on the shared pair
        assert_eq!(&signs[0][..2], &signs[1][..2]);
    }

    #[test]
    fn fractions() {
        assert_eq!(shape_fraction(&star32(2)), Rational::new(5, 8));
        assert_eq!(shape_fraction(&shape(&[&[0, 1, 2], &[0, 3, 4], &[0, 5, 6]])), Rational::new(27, 64));
        assert_eq!(shape_fraction(&shape(&[&[0, 1]])), Rational::new(3, 4));
        let padded = star32(2).with_free(3).unwrap();
        assert_eq!(shape_fraction(&padded), Rational::new(5, 8));
    }

    #[test]
    fn reduced_matches_exhaustive() {
        let shapes = [
            shape(&[&[0, 1, 2], &[1, 2, 3]]),
            shape(&[&[0, 1], &[0, 2], &[0, 3]]),
            shape(&[&[0, 1, 2], &[0, 1], &[0, 1]]),
            shape(&[&[0, 1, 2, 3], &[2, 3, 4], &[0, 4]]),
            shape(&[&[0, 1, 2], &[0, 1, 2]]),
        ];
        for s in &shapes {
            let full = max_intersection_exhaustive(s, None).unwrap();
            for exec in [Exec::Sequential, Exec::Parallel] {
                assert_eq!(max_intersection_with(s, None, exec).unwrap(), full, "{s}");
            }
            let excl = Some(full.max);
            assert_eq!(max_intersection(s, excl), max_intersection_exhaustive(s, excl), "{s}");
        }
    }

    #[test]
    fn everything_excluded() {
        assert_eq!(max_intersection(&shape(&[&[0, 1]]), Some(1)), None);
    }

    #[test]
    fn json_round_trip() {
        let s = star32(3).with_free(1).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"k":6,"edges":[[0,1,2],[0,1,3],[0,1,4]]}"#);
        assert_eq!(serde_json::from_str::<Shape>(&j).unwrap(), s);
        assert!(serde_json::from_str::<Shape>(r#"{"k":2,"edges":[[0,2]]}"#).is_err());
    }
}
