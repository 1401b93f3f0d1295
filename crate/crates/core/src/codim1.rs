//! Closed-form counts for single-row maps with entries in {-1, 0, 1}.
//!
//! For a row with `a` entries equal to 1, `b` equal to -1 and `c` zeros, the
//! number of cube points with value `j` is `2^c * C(a+b, b+j)`, so the
//! intersection size is `2^c * C(a+b+1, b+1)`.

use crate::binomial::{binomial, central, MAX_N};
use crate::cube::LinearMap;
use crate::{Error, Rational, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Counts of +1, -1 and 0 entries in a single row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignCount {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl SignCount {
    pub fn new(a: usize, b: usize, c: usize) -> Self {
        SignCount { a, b, c }
    }

    pub fn k(&self) -> usize {
        self.a + self.b + self.c
    }

    pub fn swapped(&self) -> Self {
        SignCount { a: self.b, b: self.a, c: self.c }
    }

    /// Sign counts of a one-row map, or `None` if the map has several rows or
    /// an entry outside {-1, 0, 1}.
    pub fn of_map(map: &LinearMap) -> Option<Self> {
        if map.m() != 1 || !map.is_sign_matrix() {
            return None;
        }
        let row = map.row(0);
        let a = row.iter().filter(|v| **v == Rational::from_integer(1)).count();
        let b = row.iter().filter(|v| **v == Rational::from_integer(-1)).count();
        Some(SignCount { a, b, c: row.len() - a - b })
    }

    /// The row `[1; a] ++ [-1; b] ++ [0; c]`.
    pub fn to_map(&self) -> Result<LinearMap> {
        let row: Vec<i64> =
            std::iter::repeat_n(1, self.a).chain(std::iter::repeat_n(-1, self.b)).chain(std::iter::repeat_n(0, self.c)).collect();
        LinearMap::from_ints(self.k(), &[row])
    }
}

/// `|{x : L(x) = j}| = 2^c * C(a+b, b+j)`.
pub fn level_count(sc: SignCount, j: i64) -> u128 {
    binomial((sc.a + sc.b) as i64, sc.b as i64 + j) << sc.c
}

/// `t(L) = 2^c * C(a+b+1, b+1)`.
pub fn codim1_size(sc: SignCount) -> u128 {
    binomial((sc.a + sc.b + 1) as i64, (sc.b + 1) as i64) << sc.c
}

/// Every size above `2^(k-1)` achieved by a one-row map on `k` coordinates,
/// found by enumerating all sign counts.
pub fn large_codim1_sizes(k: usize) -> Result<BTreeSet<u64>> {
    if k < 6 {
        return Err(Error::InvalidArgument(format!("large_codim1_sizes needs k >= 6, got {k}")));
    }
    if k + 1 > MAX_N {
        return Err(Error::DimensionOutOfRange { k, max: MAX_N - 1 });
    }
    let half = 1u128 << (k - 1);
    let mut out = BTreeSet::new();
    for a in 0..=k {
        for b in 0..=k - a {
            let t = codim1_size(SignCount::new(a, b, k - a - b));
            if t > half {
                out.insert(t as u64);
            }
        }
    }
    let closed: BTreeSet<u64> =
        [35u64 << (k - 6), 5u64 << (k - 3), 3u64 << (k - 2), 1u64 << k].into_iter().collect();
    assert_eq!(out, closed, "enumerated codimension-1 sizes disagree with the closed form at k = {k}");
    Ok(out)
}

/// One row of the table of support sign counts with `2^(s-1) < t < 2^s`,
/// `s = a + b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TableRow {
    pub a: usize,
    pub b: usize,
    pub t: u64,
}

/// All full-support rows (`c = 0`, `a + b <= max_support`) whose size lies
/// strictly between half and all of their cube, sorted by `(a, b)`.
pub fn codim1_table(max_support: usize) -> Vec<TableRow> {
    let mut rows = Vec::new();
    for a in 0..=max_support {
        for b in 0..=max_support - a {
            let s = a + b;
            if s == 0 {
                continue;
            }
            let t = codim1_size(SignCount::new(a, b, 0));
            if t > 1u128 << (s - 1) && t < 1u128 << s {
                rows.push(TableRow { a, b, t: t as u64 });
            }
        }
    }
    rows
}

/// Checks that `C(n, floor(n/2)) / 2^n` never increases for `1 <= n <= n_max`
/// (the comparison also covers `n_max + 1`), by exact cross-multiplication.
pub fn central_ratio_nonincreasing(n_max: usize) -> Result<bool> {
    if n_max + 2 > MAX_N {
        return Err(Error::DimensionOutOfRange { k: n_max, max: MAX_N - 2 });
    }
    // C(n+1, ⌊(n+1)/2⌋) / 2^(n+1) <= C(n, ⌊n/2⌋) / 2^n  <=>  C(n+1, .) <= 2 C(n, .)
    Ok((1..=n_max).all(|n| central(n + 1) <= 2 * central(n)))
}

/// `C(s+1, floor((s+1)/2)) / 2^s`, the largest fraction a single row of
/// support `s` can keep.
pub fn max_row_fraction(s: usize) -> Rational {
    let num = central(s + 1);
    let den = 1u128 << s;
    let g = num_integer::gcd(num, den);
    Rational::new((num / g) as i64, (den / g) as i64)
}

/// Largest support size `s` whose best single row keeps a fraction strictly
/// above `threshold` of its cube.
pub fn support_size_bound(threshold: Rational) -> Result<usize> {
    if threshold <= Rational::from_integer(0) || threshold >= Rational::from_integer(1) {
        return Err(Error::InvalidArgument("threshold must lie in (0, 1)".into()));
    }
    // The fraction is non-increasing in s, so the admissible sizes form a prefix.
    let mut best = 0;
    for s in 1..MAX_N - 1 {
        if s >= 62 {
            return Err(Error::InvalidArgument("threshold too small for exact evaluation".into()));
        }
        if max_row_fraction(s) > threshold {
            best = s;
        } else {
            return Ok(best);
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Direct count over the cube: x_1..x_a weigh +1, the next b weigh -1.
    fn enumerate_levels(sc: SignCount) -> std::collections::BTreeMap<i64, u128> {
        let mut out = std::collections::BTreeMap::new();
        for x in 0u32..1 << sc.k() {
            let plus = (x & ((1 << sc.a) - 1)).count_ones() as i64;
            let minus = ((x >> sc.a) & ((1 << sc.b) - 1)).count_ones() as i64;
            *out.entry(plus - minus).or_insert(0) += 1;
        }
        out
    }

    #[test]
    fn level_count_examples() {
        assert_eq!(level_count(SignCount::new(1, 1, 0), 0), 2);
        assert_eq!(level_count(SignCount::new(3, 2, 0), 0), 10);
        assert_eq!(level_count(SignCount::new(3, 2, 0), 1), 10);
        assert_eq!(level_count(SignCount::new(0, 0, 5), 0), 32);
        assert_eq!(level_count(SignCount::new(2, 2, 0), 7), 0);
    }

    #[test]
    fn level_count_matches_enumeration() {
        for k in 0..=8 {
            for a in 0..=k {
                for b in 0..=k - a {
                    let sc = SignCount::new(a, b, k - a - b);
                    let levels = enumerate_levels(sc);
                    for j in -(k as i64) - 1..=k as i64 + 1 {
                        assert_eq!(level_count(sc, j), levels.get(&j).copied().unwrap_or(0), "{sc:?} j={j}");
                    }
                    let total: u128 = (-(b as i64)..=a as i64).map(|j| level_count(sc, j)).sum();
                    assert_eq!(total, 1u128 << k);
                }
            }
        }
    }

    #[test]
    fn codim1_size_examples() {
        assert_eq!(codim1_size(SignCount::new(3, 3, 0)), 35);
        assert_eq!(codim1_size(SignCount::new(4, 3, 0)), 70);
        assert_eq!(codim1_size(SignCount::new(2, 1, 0)), 6);
        let sc = SignCount::new(3, 2, 2);
        assert_eq!(codim1_size(sc), level_count(sc, 0) + level_count(sc, 1));
    }

    #[test]
    fn large_sizes_for_small_k() {
        assert_eq!(large_codim1_sizes(6).unwrap().into_iter().collect::<Vec<_>>(), vec![35, 40, 48, 64]);
        assert_eq!(large_codim1_sizes(7).unwrap().into_iter().collect::<Vec<_>>(), vec![70, 80, 96, 128]);
        assert_eq!(large_codim1_sizes(8).unwrap().into_iter().collect::<Vec<_>>(), vec![140, 160, 192, 256]);
        assert!(large_codim1_sizes(5).is_err());
    }

    #[test]
    fn table_rows() {
        let t: Vec<(usize, usize, u64)> = codim1_table(7).into_iter().map(|r| (r.a, r.b, r.t)).collect();
        assert_eq!(
            t,
            vec![(1, 1, 3), (2, 0, 3), (2, 1, 6), (2, 2, 10), (3, 1, 10), (3, 2, 20), (3, 3, 35), (4, 2, 35), (4, 3, 70)]
        );
        // nothing new beyond support 7
        assert_eq!(codim1_table(12).len(), 9);
    }

    #[test]
    fn central_ratio() {
        assert!(central_ratio_nonincreasing(1).unwrap());
        assert!(central_ratio_nonincreasing(8).unwrap());
        assert!(central_ratio_nonincreasing(64).unwrap());
        // ratio at n = 9 is at most a quarter
        assert_eq!(central(9), 126);
        assert!(4 * central(9) <= 512);
    }

    #[test]
    fn support_bounds() {
        assert_eq!(support_size_bound(Rational::new(1, 2)).unwrap(), 7);
        assert_eq!(support_size_bound(Rational::new(15, 32)).unwrap(), 9);
        // independent scan with f64-free cross multiplication
        let quarter = (1..60).filter(|&s| 4 * central(s + 1) > 1u128 << s).max().unwrap();
        assert_eq!(support_size_bound(Rational::new(1, 4)).unwrap(), quarter);
        assert_eq!(quarter, 39);
        assert!(support_size_bound(Rational::new(1, 1)).is_err());
    }

    #[test]
    fn low_codim_beyond_seven_stays_below_half() {
        for k in 8..=40usize {
            for b in 0..=k {
                assert!(codim1_size(SignCount::new(k - b, b, 0)) <= 1u128 << (k - 1));
            }
        }
    }
}
