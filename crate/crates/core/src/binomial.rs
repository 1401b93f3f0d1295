//! Exact binomial coefficients from a memoised Pascal triangle.

use std::sync::OnceLock;

/// Largest `n` served by [`binomial`]. `C(128, 64) < 2^127`, so every entry
/// fits in a `u128`.
pub const MAX_N: usize = 128;

fn table() -> &'static [Vec<u128>] {
    static TABLE: OnceLock<Vec<Vec<u128>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut rows: Vec<Vec<u128>> = Vec::with_capacity(MAX_N + 1);
        rows.push(vec![1]);
        for n in 1..=MAX_N {
            let prev = &rows[n - 1];
            let mut row = vec![1u128; n + 1];
            for r in 1..n {
                row[r] = prev[r - 1] + prev[r];
            }
            rows.push(row);
        }
        rows
    })
}

/// `C(n, r)`, zero when `r < 0` or `r > n`.
///
/// Panics if `n > MAX_N`.
pub fn binomial(n: i64, r: i64) -> u128 {
    if n < 0 || r < 0 || r > n {
        return 0;
    }
    assert!(n as usize <= MAX_N, "binomial({n}, {r}) beyond the memo table");
    table()[n as usize][r as usize]
}

/// `C(n, floor(n/2))`.
pub fn central(n: usize) -> u128 {
    binomial(n as i64, (n / 2) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn multiplicative(n: u128, r: u128) -> u128 {
        let mut acc = 1u128;
        for i in 0..r {
            acc = acc * (n - i) / (i + 1);
        }
        acc
    }

    #[test]
    fn matches_multiplicative_formula() {
        for n in 0..=60u128 {
            for r in 0..=n {
                assert_eq!(binomial(n as i64, r as i64), multiplicative(n, r));
            }
        }
    }

    #[test]
    fn out_of_range_is_zero() {
        assert_eq!(binomial(5, -1), 0);
        assert_eq!(binomial(5, 6), 0);
        assert_eq!(binomial(-1, 0), 0);
        assert_eq!(binomial(0, 0), 1);
    }

    #[test]
    fn top_of_table() {
        assert_eq!(central(128), binomial(128, 64));
        assert!(central(128) < 1u128 << 127);
        assert_eq!(binomial(9, 4), 126);
    }
}
