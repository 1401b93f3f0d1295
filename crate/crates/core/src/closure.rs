//! Breadth-first closure of intersection patterns under adding rows.
//!
//! Starting from the full cube, each step intersects a pattern with the
//! pattern of one more row drawn from a fixed entry set. Only patterns larger
//! than `floor` are kept; since adding a row never grows a pattern, this
//! enumerates exactly the patterns above `floor` realised by maps with at most
//! `depth` rows over that entry set.

use crate::cube::{all_rows, IntersectionPattern, LinearMap};
use crate::sizes::{Provenance, SizeSet};
use crate::{Error, Exec, Rational, Result};
use std::collections::{BTreeMap, HashSet};

/// Largest dimension the closure accepts.
pub const CLOSURE_MAX_DIM: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureConfig {
    pub k: usize,
    pub entries: Vec<Rational>,
    /// Patterns of size `<= floor` are discarded.
    pub floor: u64,
    /// `None` runs until no new pattern appears.
    pub max_depth: Option<usize>,
    /// Upper bound on stored patterns.
    pub node_budget: usize,
}

impl ClosureConfig {
    pub fn signs(k: usize, floor: u64) -> Self {
        ClosureConfig {
            k,
            entries: [-1, 0, 1].map(Rational::from_integer).to_vec(),
            floor,
            max_depth: None,
            node_budget: 20_000_000,
        }
    }
}

type Words = [u64; 4];

fn words_of(p: &IntersectionPattern) -> Words {
    let mut w = [0; 4];
    w[..p.words().len()].copy_from_slice(p.words());
    w
}

fn and(a: &Words, b: &Words) -> (Words, u64) {
    let w = [a[0] & b[0], a[1] & b[1], a[2] & b[2], a[3] & b[3]];
    (w, w.iter().map(|x| x.count_ones() as u64).sum())
}

struct Node {
    pattern: Words,
    size: u64,
    parent: u32,
    row: u32,
}

pub struct PatternClosure {
    k: usize,
    rows: Vec<Vec<Rational>>,
    nodes: Vec<Node>,
    // nodes[levels[d]..levels[d + 1]] were first reached with d rows
    levels: Vec<usize>,
    exhausted: bool,
}

impl PatternClosure {
    pub fn run(config: &ClosureConfig, exec: Exec) -> Result<Self> {
        let k = config.k;
        if k == 0 || k > CLOSURE_MAX_DIM {
            return Err(Error::DimensionOutOfRange { k, max: CLOSURE_MAX_DIM });
        }
        let mut entries = config.entries.clone();
        entries.sort();
        entries.dedup();
        let candidates = all_rows(k, &entries);
        let evaluated: Vec<Option<(Vec<Rational>, IntersectionPattern)>> = exec.map(&candidates, |r| {
            let map = LinearMap::new(k, vec![r.clone()]).ok()?;
            let p = map.pattern();
            (p.len() > config.floor && p.len() < 1 << k).then(|| (r.clone(), p))
        });
        let mut rows = Vec::new();
        let mut row_patterns = Vec::new();
        let mut seen_rows = HashSet::new();
        for (r, p) in evaluated.into_iter().flatten() {
            // rows with equal patterns are interchangeable; keep the first
            if seen_rows.insert(words_of(&p)) {
                rows.push(r);
                row_patterns.push(words_of(&p));
            }
        }

        let full = words_of(&IntersectionPattern::full(k));
        let mut seen: HashSet<Words> = HashSet::new();
        seen.insert(full);
        let mut nodes = vec![Node { pattern: full, size: 1 << k, parent: u32::MAX, row: u32::MAX }];
        let mut levels = vec![0, 1];
        let mut exhausted = false;
        loop {
            let depth = levels.len() - 1;
            if config.max_depth.is_some_and(|d| depth > d) {
                break;
            }
            let (lo, hi) = (levels[depth - 1], levels[depth]);
            let frontier: Vec<u64> = (lo as u64..hi as u64).collect();
            let children: Vec<Vec<(u32, Words, u64)>> = exec.map(&frontier, |&i| {
                let parent = &nodes[i as usize];
                let mut local = HashSet::new();
                let mut out = Vec::new();
                for (j, rp) in row_patterns.iter().enumerate() {
                    let (p, size) = and(&parent.pattern, rp);
                    if size > config.floor && size < parent.size && !seen.contains(&p) && local.insert(p) {
                        out.push((j as u32, p, size));
                    }
                }
                out
            });
            for (&parent, list) in frontier.iter().zip(children) {
                for (row, pattern, size) in list {
                    if seen.insert(pattern) {
                        nodes.push(Node { pattern, size, parent: parent as u32, row });
                    }
                }
                if nodes.len() > config.node_budget {
                    return Err(Error::SearchBudget { depth: depth + 1, nodes: nodes.len() });
                }
            }
            if nodes.len() == levels[depth] {
                exhausted = true;
                break;
            }
            levels.push(nodes.len());
        }
        Ok(PatternClosure { k, rows, nodes, levels, exhausted })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Deepest level computed (number of rows).
    pub fn depth(&self) -> usize {
        self.levels.len() - 2
    }

    /// True if the closure stopped because no new pattern appeared.
    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn pattern_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of distinct row patterns used as generators.
    pub fn generator_count(&self) -> usize {
        self.rows.len()
    }

    fn chain(&self, mut i: usize) -> Vec<Vec<Rational>> {
        let mut rows = Vec::new();
        while self.nodes[i].parent != u32::MAX {
            rows.push(self.rows[self.nodes[i].row as usize].clone());
            i = self.nodes[i].parent as usize;
        }
        rows.reverse();
        rows
    }

    /// Sizes realised with at most `depth` rows, each with the first pattern
    /// found and a witness padded with zero rows to exactly `depth` rows.
    pub fn sizes_up_to(&self, depth: usize) -> SizeSet {
        let end = self.levels[(depth + 1).min(self.levels.len() - 1)];
        let mut first: BTreeMap<u64, usize> = BTreeMap::new();
        for (i, n) in self.nodes[..end].iter().enumerate() {
            first.entry(n.size).or_insert(i);
        }
        let mut out = SizeSet::new(self.k + depth, self.k);
        for (t, i) in first {
            let mut rows = self.chain(i);
            rows.resize(depth, vec![Rational::from_integer(0); self.k]);
            let witness = LinearMap::new(self.k, rows).expect("rows of the right length");
            debug_assert_eq!(witness.size(), t);
            out.insert(t, Provenance::Search { witness, note: format!("pattern closure, {} rows", self.level_of(i)) });
        }
        out
    }

    /// Every size reached at any depth.
    pub fn all_sizes(&self) -> SizeSet {
        self.sizes_up_to(self.depth())
    }

    fn level_of(&self, i: usize) -> usize {
        self.levels.partition_point(|&s| s <= i) - 1
    }
}
