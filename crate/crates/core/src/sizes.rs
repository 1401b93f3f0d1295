//! Sets of achievable intersection sizes with per-size evidence.

use crate::cube::LinearMap;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Why a size is known to be achievable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// An explicit map, re-evaluated when the entry was recorded.
    Construction { witness: LinearMap, note: String },
    /// Found by a search (shape search or pattern closure); the witness map
    /// realises the size.
    Search { witness: LinearMap, note: String },
    /// First map in brute-force enumeration order.
    Oracle { witness: LinearMap },
}

impl Provenance {
    pub fn witness(&self) -> &LinearMap {
        match self {
            Provenance::Construction { witness, .. }
            | Provenance::Search { witness, .. }
            | Provenance::Oracle { witness } => witness,
        }
    }
}

/// Achievable sizes for fixed `(n, k)`, ascending, one provenance each.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SizeSet {
    pub n: usize,
    pub k: usize,
    entries: BTreeMap<u64, Provenance>,
}

#[derive(Serialize, Deserialize)]
struct SizeEntry {
    size: u64,
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct SizeSetJson {
    n: usize,
    k: usize,
    sizes: Vec<SizeEntry>,
}

impl Serialize for SizeSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SizeSetJson {
            n: self.n,
            k: self.k,
            sizes: self.entries.iter().map(|(&size, p)| SizeEntry { size, provenance: p.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SizeSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = SizeSetJson::deserialize(d)?;
        let mut out = SizeSet::new(j.n, j.k);
        for e in j.sizes {
            out.insert(e.size, e.provenance);
        }
        Ok(out)
    }
}

impl SizeSet {
    pub fn new(n: usize, k: usize) -> Self {
        SizeSet { n, k, entries: BTreeMap::new() }
    }

    /// Keeps the first provenance recorded for a size.
    pub fn insert(&mut self, size: u64, provenance: Provenance) -> bool {
        assert!(size >= 1 && size <= 1u64 << self.k, "size {size} outside [1, 2^{}]", self.k);
        if self.entries.contains_key(&size) {
            return false;
        }
        self.entries.insert(size, provenance);
        true
    }

    pub fn contains(&self, size: u64) -> bool {
        self.entries.contains_key(&size)
    }

    pub fn get(&self, size: u64) -> Option<&Provenance> {
        self.entries.get(&size)
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.entries.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Provenance)> {
        self.entries.iter().map(|(&t, p)| (t, p))
    }

    /// Adds every entry of `other` not already present.
    pub fn merge(&mut self, other: &SizeSet) {
        for (t, p) in other.iter() {
            self.insert(t, p.clone());
        }
    }
}
