//! Linear maps on the cube, their intersection patterns, and the brute-force
//! oracle.
//!
//! Cube points are `u32` codes: coordinate `j` of `x` is bit `j`. Patterns
//! are flat bit masks over all `2^k` codes.

use crate::rational::{format_entry, parse_rational, Rational};
use crate::sizes::{Provenance, SizeSet};
use crate::{Error, Exec, Result};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Largest domain dimension accepted by [`LinearMap`]; a pattern then takes
/// 2 MiB.
pub const MAX_DIM: usize = 24;

/// Largest dimension for [`oracle_enumerate`], whose row patterns are single
/// `u64` words.
pub const ORACLE_MAX_DIM: usize = 6;

/// Default cap on the number of maps [`oracle_enumerate`] may visit.
pub const DEFAULT_ORACLE_BUDGET: u128 = 50_000_000;

/// A set of coordinates (or hypergraph vertices), `j` stored as bit `j`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct VertexSet(u32);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn from_bits(bits: u32) -> Self {
        VertexSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Panics if an index is 32 or more.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        VertexSet(indices.into_iter().fold(0, |acc, i| {
            assert!(i < 32, "vertex index {i} out of range");
            acc | 1 << i
        }))
    }

    /// The first `n` coordinates.
    pub fn prefix(n: usize) -> Self {
        VertexSet(if n >= 32 { u32::MAX } else { (1u32 << n) - 1 })
    }

    pub fn contains(self, i: usize) -> bool {
        i < 32 && self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        VertexSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        VertexSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if let Some(&bad) = v.iter().find(|&&i| i >= 32) {
            return Err(serde::de::Error::custom(format!("vertex index {bad} out of range")));
        }
        Ok(VertexSet::from_indices(v))
    }
}

/// One row scaled to integers: `x` satisfies the row iff
/// `coeffs . x` is `0` or `scale`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct ScaledRow {
    coeffs: Vec<i64>,
    scale: i64,
}

impl ScaledRow {
    fn new(row: &[Rational]) -> Result<Self> {
        let scale = row.iter().fold(1i64, |acc, r| acc.lcm(r.denom()));
        let coeffs = row
            .iter()
            .map(|r| {
                r.numer()
                    .checked_mul(scale / r.denom())
                    // keeps every partial sum over <= 24 coordinates inside i64
                    .filter(|c| c.unsigned_abs() < 1 << 50)
                    .ok_or_else(|| Error::EntryOverflow(format_entry(r)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ScaledRow { coeffs, scale })
    }

    #[inline]
    fn accepts(&self, sum: i64) -> bool {
        sum == 0 || sum == self.scale
    }
}

/// A linear map `R^k -> R^m` with exact rational entries, stored row-wise.
///
/// `m = 0` is allowed and stands for the whole space (every cube point is
/// kept).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinearMap {
    k: usize,
    rows: Vec<Vec<Rational>>,
    scaled: Vec<ScaledRow>,
}

impl LinearMap {
    pub fn new(k: usize, rows: Vec<Vec<Rational>>) -> Result<Self> {
        if k == 0 || k > MAX_DIM {
            return Err(Error::DimensionOutOfRange { k, max: MAX_DIM });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::RowLength { row: i, found: row.len(), expected: k });
            }
        }
        let scaled = rows.iter().map(|r| ScaledRow::new(r)).collect::<Result<_>>()?;
        Ok(LinearMap { k, rows, scaled })
    }

    pub fn from_ints(k: usize, rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(
            k,
            rows.iter().map(|r| r.iter().map(|&v| Rational::from_integer(v)).collect()).collect(),
        )
    }

    pub fn zero(k: usize, m: usize) -> Result<Self> {
        Self::new(k, vec![vec![Rational::zero(); k]; m])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> Rational {
        self.rows[i][j]
    }

    /// True iff every entry is -1, 0 or 1.
    pub fn is_sign_matrix(&self) -> bool {
        self.rows.iter().flatten().all(crate::rational::is_unit_or_zero)
    }

    /// Appends one all-zero column.
    pub fn with_zero_column(&self) -> Result<Self> {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.push(Rational::zero());
                r
            })
            .collect();
        LinearMap::new(self.k + 1, rows)
    }

    /// Deletes column `j`.
    pub fn without_column(&self, j: usize) -> Result<Self> {
        if j >= self.k {
            return Err(Error::Coordinate { index: j, k: self.k });
        }
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| *v).collect())
            .collect();
        LinearMap::new(self.k - 1, rows)
    }

    /// Appends a row.
    pub fn with_row(&self, row: Vec<Rational>) -> Result<Self> {
        let mut rows = self.rows.clone();
        rows.push(row);
        LinearMap::new(self.k, rows)
    }

    /// Row-by-row membership of the cube point `x`.
    pub fn accepts(&self, x: u32) -> bool {
        self.scaled.iter().all(|row| {
            let sum: i64 = (0..self.k).filter(|&j| x >> j & 1 == 1).map(|j| row.coeffs[j]).sum();
            row.accepts(sum)
        })
    }

    /// Intersection pattern, computed with the default strategy.
    pub fn pattern(&self) -> IntersectionPattern {
        evaluate_pattern_with(self, Exec::default()).0
    }

    /// `t(L)`.
    pub fn size(&self) -> u64 {
        intersection_size_with(self, Exec::default())
    }
}

impl fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> =
            self.rows.iter().map(|r| r.iter().map(format_entry).collect()).collect();
        f.debug_struct("LinearMap").field("k", &self.k).field("rows", &rows).finish()
    }
}

#[derive(Serialize, Deserialize)]
struct LinearMapJson {
    k: usize,
    m: usize,
    entries: Vec<Vec<String>>,
}

impl Serialize for LinearMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LinearMapJson {
            k: self.k,
            m: self.m(),
            entries: self.rows.iter().map(|r| r.iter().map(format_entry).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinearMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = LinearMapJson::deserialize(d)?;
        if j.entries.len() != j.m {
            return Err(D::Error::custom(format!("m = {} but {} rows given", j.m, j.entries.len())));
        }
        let rows = j
            .entries
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        LinearMap::new(j.k, rows).map_err(D::Error::custom)
    }
}

/// Membership mask over all `2^k` cube points.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntersectionPattern {
    k: usize,
    words: Vec<u64>,
}

fn word_count(k: usize) -> usize {
    if k >= 6 {
        1 << (k - 6)
    } else {
        1
    }
}

fn low_mask(k: usize) -> u64 {
    if k >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << k)) - 1
    }
}

impl IntersectionPattern {
    pub fn empty(k: usize) -> Self {
        IntersectionPattern { k, words: vec![0; word_count(k)] }
    }

    pub fn full(k: usize) -> Self {
        IntersectionPattern { k, words: vec![low_mask(k); word_count(k)] }
    }

    pub fn from_points<I: IntoIterator<Item = u32>>(k: usize, points: I) -> Self {
        let mut p = Self::empty(k);
        for x in points {
            p.insert(x);
        }
        p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn contains(&self, x: u32) -> bool {
        let x = x as usize;
        x >> self.k == 0 && self.words[x >> 6] >> (x & 63) & 1 == 1
    }

    pub fn insert(&mut self, x: u32) {
        let x = x as usize;
        assert!(x >> self.k == 0, "point {x} outside the {}-cube", self.k);
        self.words[x >> 6] |= 1 << (x & 63);
    }

    /// Number of members.
    pub fn len(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros();
                bits &= bits - 1;
                Some((i as u32) << 6 | b)
            })
        })
    }

    pub fn intersect(&self, other: &Self) -> Self {
        assert_eq!(self.k, other.k);
        IntersectionPattern {
            k: self.k,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.k == other.k && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Lowercase hex of the mask bytes; byte `i` holds points `8i..8i+8`,
    /// least significant bit first.
    pub fn to_hex(&self) -> String {
        let nbytes = (1usize << self.k).div_ceil(8);
        let bytes: Vec<u8> =
            self.words.iter().flat_map(|w| w.to_le_bytes()).take(nbytes).collect();
        hex::encode(bytes)
    }

    pub fn from_hex(k: usize, s: &str) -> Result<Self> {
        if k > MAX_DIM {
            return Err(Error::DimensionOutOfRange { k, max: MAX_DIM });
        }
        let bytes = hex::decode(s).map_err(|e| Error::InvalidArgument(format!("bad hex mask: {e}")))?;
        let nbytes = (1usize << k).div_ceil(8);
        if bytes.len() != nbytes {
            return Err(Error::InvalidArgument(format!(
                "mask has {} bytes, expected {nbytes}",
                bytes.len()
            )));
        }
        let mut p = Self::empty(k);
        for (i, b) in bytes.iter().enumerate() {
            p.words[i / 8] |= (*b as u64) << (8 * (i % 8));
        }
        if p.words[0] & !low_mask(k) != 0 {
            return Err(Error::InvalidArgument("mask has bits beyond the cube".into()));
        }
        Ok(p)
    }
}

impl fmt::Debug for IntersectionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntersectionPattern(k={}, size={}, mask={})", self.k, self.len(), self.to_hex())
    }
}

#[derive(Serialize, Deserialize)]
struct PatternJson {
    k: usize,
    size: u64,
    mask: String,
}

impl Serialize for IntersectionPattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PatternJson { k: self.k, size: self.len(), mask: self.to_hex() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntersectionPattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = PatternJson::deserialize(d)?;
        let p = IntersectionPattern::from_hex(j.k, &j.mask).map_err(D::Error::custom)?;
        if p.len() != j.size {
            return Err(D::Error::custom("size does not match mask"));
        }
        Ok(p)
    }
}

/// Per-row partial sums over the low `min(k, 6)` coordinates, indexed by the
/// low bits of a point.
struct WordKernel<'a> {
    map: &'a LinearMap,
    low: usize,
    low_sums: Vec<Vec<i64>>,
}

impl<'a> WordKernel<'a> {
    fn new(map: &'a LinearMap) -> Self {
        let low = map.k.min(6);
        let low_sums = map
            .scaled
            .iter()
            .map(|row| {
                let mut sums = vec![0i64; 1 << low];
                for j in 1..1usize << low {
                    let b = j.trailing_zeros() as usize;
                    sums[j] = sums[j & (j - 1)] + row.coeffs[b];
                }
                sums
            })
            .collect();
        WordKernel { map, low, low_sums }
    }

    /// Membership bits for points `w << 6 .. (w << 6) + 64`.
    fn word(&self, w: u64) -> u64 {
        let mut mask = low_mask(self.map.k);
        for (row, low_sums) in self.map.scaled.iter().zip(&self.low_sums) {
            let mut hi = 0i64;
            let mut bits = w;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                hi += row.coeffs[self.low + b];
                bits &= bits - 1;
            }
            let mut row_mask = 0u64;
            for (j, s) in low_sums.iter().enumerate() {
                if row.accepts(hi + s) {
                    row_mask |= 1 << j;
                }
            }
            mask &= row_mask;
            if mask == 0 {
                break;
            }
        }
        mask
    }
}

/// `I(L)` and `t(L)`.
pub fn evaluate_pattern(map: &LinearMap) -> (IntersectionPattern, u64) {
    evaluate_pattern_with(map, Exec::default())
}

pub fn evaluate_pattern_with(map: &LinearMap, exec: Exec) -> (IntersectionPattern, u64) {
    let kernel = WordKernel::new(map);
    let words = exec.map_range(0..word_count(map.k) as u64, |w| kernel.word(w));
    let p = IntersectionPattern { k: map.k, words };
    let n = p.len();
    (p, n)
}

/// `t(L)` without materialising the pattern.
pub fn intersection_size(map: &LinearMap) -> u64 {
    intersection_size_with(map, Exec::default())
}

pub fn intersection_size_with(map: &LinearMap, exec: Exec) -> u64 {
    let kernel = WordKernel::new(map);
    let words = word_count(map.k) as u64;
    if words < 64 {
        return (0..words).map(|w| kernel.word(w).count_ones() as u64).sum();
    }
    exec.fold_range(0..words, || 0u64, |acc, w| acc + kernel.word(w).count_ones() as u64, |a, b| a + b)
}

/// Row supports `S(L_i)` and the total support `S(L)`.
pub fn support(map: &LinearMap) -> (Vec<VertexSet>, VertexSet) {
    let rows: Vec<VertexSet> = map
        .rows
        .iter()
        .map(|r| VertexSet::from_indices(r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(j, _)| j)))
        .collect();
    let total = rows.iter().fold(VertexSet::EMPTY, |a, &b| a.union(b));
    (rows, total)
}

/// `L_A`: the rows indexed by `rows`, in ascending order.
pub fn restrict(map: &LinearMap, rows: &[usize]) -> Result<LinearMap> {
    if rows.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut idx = rows.to_vec();
    idx.sort_unstable();
    idx.dedup();
    if let Some(&bad) = idx.iter().find(|&&i| i >= map.m()) {
        return Err(Error::RowIndex { index: bad, m: map.m() });
    }
    LinearMap::new(map.k, idx.iter().map(|&i| map.rows[i].clone()).collect())
}

fn without_row(map: &LinearMap, i: usize) -> LinearMap {
    let rows = map.rows.iter().enumerate().filter(|&(r, _)| r != i).map(|(_, v)| v.clone()).collect();
    LinearMap::new(map.k, rows).expect("subset of a valid map")
}

/// No row support is covered by the others, and no row is vacuous.
pub fn is_minimal(map: &LinearMap) -> bool {
    let (rows, _) = support(map);
    let full = 1u64 << map.k;
    (0..map.m()).all(|i| {
        let others = rows.iter().enumerate().filter(|&(j, _)| j != i).fold(VertexSet::EMPTY, |a, (_, &b)| a.union(b));
        let single = LinearMap::new(map.k, vec![map.rows[i].clone()]).expect("row of a valid map");
        !rows[i].is_subset(others) && single.size() < full
    })
}

/// True iff deleting some single row leaves `t` unchanged.
pub fn has_redundant_condition(map: &LinearMap) -> bool {
    let t = map.size();
    (0..map.m()).any(|i| without_row(map, i).size() == t)
}

/// Splits `P = J x {0,1}^free` where `J` lives on the coordinates of
/// `support` (in ascending order) and `free = k - |support|`.
pub fn factor_pattern(pattern: &IntersectionPattern, support: VertexSet) -> Result<(IntersectionPattern, usize)> {
    let k = pattern.k;
    if support.bits() >> k != 0 {
        return Err(Error::InvalidArgument("support exceeds the dimension".into()));
    }
    let coords = support.to_vec();
    let s = coords.len();
    let free = k - s;
    let free_coords = VertexSet::prefix(k).difference(support).to_vec();
    let embed = |y: u32, positions: &[usize]| -> u32 {
        positions.iter().enumerate().fold(0u32, |acc, (b, &c)| acc | ((y >> b & 1) << c))
    };
    let mut j = IntersectionPattern::empty(s);
    for y in 0..1u32 << s {
        if pattern.contains(embed(y, &coords)) {
            j.insert(y);
        }
    }
    for x in 0..1u32 << k {
        let inner = coords.iter().enumerate().fold(0u32, |acc, (b, &c)| acc | ((x >> c & 1) << b));
        if pattern.contains(x) != j.contains(inner) {
            return Err(Error::NotAProduct);
        }
    }
    debug_assert!(free_coords.len() == free);
    Ok((j, free))
}

/// `|I(L) ∩ {x : x_i = 0}|`.
pub fn fix_coordinate_count(map: &LinearMap, i: usize) -> Result<u64> {
    if i >= map.k {
        return Err(Error::Coordinate { index: i, k: map.k });
    }
    let (p, _) = evaluate_pattern(map);
    Ok(p.iter().filter(|x| x >> i & 1 == 0).count() as u64)
}

/// Brute-force pattern of one row: every point, exact rational sums.
fn row_pattern_bruteforce(row: &[Rational]) -> u64 {
    let k = row.len();
    let mut mask = 0u64;
    for x in 0..1u32 << k {
        let v: Rational = (0..k).filter(|&j| x >> j & 1 == 1).map(|j| row[j]).sum();
        if v.is_zero() || v.is_one() {
            mask |= 1 << x;
        }
    }
    mask
}

/// Every row over `entries` in mixed-radix order (coordinate 0 fastest).
pub(crate) fn all_rows(k: usize, entries: &[Rational]) -> Vec<Vec<Rational>> {
    let q = entries.len();
    let count = q.pow(k as u32);
    (0..count)
        .map(|mut idx| {
            (0..k)
                .map(|_| {
                    let e = entries[idx % q];
                    idx /= q;
                    e
                })
                .collect()
        })
        .collect()
}

/// The exact set `{t(L) : L has entries in entry_set}` for `k x m` maps,
/// restricted to sizes above `keep_above * 2^k`. Each size carries the first
/// map (in enumeration order) that realises it.
pub fn oracle_enumerate(
    k: usize,
    m: usize,
    entry_set: &[Rational],
    keep_above: Rational,
    budget: u128,
    exec: Exec,
) -> Result<SizeSet> {
    if k == 0 || k > ORACLE_MAX_DIM {
        return Err(Error::DimensionOutOfRange { k, max: ORACLE_MAX_DIM });
    }
    let mut entries = entry_set.to_vec();
    entries.sort();
    entries.dedup();
    if entries.is_empty() {
        return Err(Error::InvalidArgument("entry set is empty".into()));
    }
    let q = entries.len() as u128;
    let required = q.checked_pow((k * m) as u32).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let rows = all_rows(k, &entries);
    let row_masks: Vec<u64> = exec.map(&rows, |r| row_pattern_bruteforce(r));
    let nrows = rows.len() as u64;
    let full = low_mask(k);
    let slots = (1usize << k) + 1;
    // first[t] = smallest map index with t(L) = t
    let first = exec.fold_range(
        0..required as u64,
        || vec![u64::MAX; slots],
        |mut acc, idx| {
            let mut rest = idx;
            let mut mask = full;
            for _ in 0..m {
                mask &= row_masks[(rest % nrows) as usize];
                rest /= nrows;
            }
            let t = mask.count_ones() as usize;
            if acc[t] == u64::MAX {
                acc[t] = idx;
            }
            acc
        },
        |a, b| a.into_iter().zip(b).map(|(x, y)| x.min(y)).collect(),
    );
    let threshold = keep_above * Rational::from_integer(1i64 << k);
    let mut out = SizeSet::new(k + m, k);
    for (t, &idx) in first.iter().enumerate() {
        if idx == u64::MAX || Rational::from_integer(t as i64) <= threshold {
            continue;
        }
        let mut rest = idx;
        let witness_rows = (0..m)
            .map(|_| {
                let r = rows[(rest % nrows) as usize].clone();
                rest /= nrows;
                r
            })
            .collect();
        let witness = LinearMap::new(k, witness_rows)?;
        out.insert(t as u64, Provenance::Oracle { witness });
    }
    Ok(out)
}
