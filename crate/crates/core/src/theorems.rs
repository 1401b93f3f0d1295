//! Constructions and end-to-end verification of the size theorems at small
//! dimension.
//!
//! Every construction is re-evaluated on the cube before it is recorded.
//! Exclusion results come from exhaustive pattern closures over maps with
//! entries in {-1, 0, 1}, cross-checked against the shape search.

use crate::binomial::binomial;
use crate::closure::{ClosureConfig, PatternClosure};
use crate::codim1::{codim1_size, large_codim1_sizes, SignCount};
use crate::cube::{all_rows, fix_coordinate_count, has_redundant_condition, oracle_enumerate, LinearMap, VertexSet};
use crate::rational::format_entry;
use crate::report::{Report, Status};
use crate::search::{bfs_search_with, final_shapes, SearchConfig, Termination};
use crate::shape::{canonical_form, classify_star, SignAssignment, Shape, StarClass};
use crate::sizes::{Provenance, SizeSet};
use crate::{Error, Exec, Rational, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::ops::RangeInclusive;

/// Largest `k` for the large-set and small-window verifications.
pub const VERIFY_MAX_K: usize = 8;

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_integer(x)).collect()
}

/// Appends a zero column; `t` doubles.
pub fn build_zero_extension(map: &LinearMap) -> Result<LinearMap> {
    map.with_zero_column()
}

/// `R^(k+1) -> R^k` with `L_j(e_i) = 1` iff `i = j` or `i = k + 1`;
/// `t = 2^k + 1`.
pub fn build_21_star_map(k: usize) -> Result<LinearMap> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("(2,1)-star map needs k >= 2, got {k}")));
    }
    let rows: Vec<Vec<i64>> = (0..k).map(|j| (0..=k).map(|i| i64::from(i == j || i == k)).collect()).collect();
    LinearMap::from_ints(k + 1, &rows)
}

/// `k - 2` rows on `k` coordinates, row `j` equal to `x_0 + x_1 - x_(j+2)`;
/// `t = 2^(k-1) + 2`.
pub fn build_32_star_map(k: usize) -> Result<LinearMap> {
    if k < 4 {
        return Err(Error::InvalidArgument(format!("(3,2)-star map needs k >= 4, got {k}")));
    }
    let rows: Vec<Vec<i64>> = (2..k)
        .map(|leaf| {
            (0..k)
                .map(|i| match i {
                    0 | 1 => 1,
                    i if i == leaf => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect();
    LinearMap::from_ints(k, &rows)
}

/// Deletes coordinate `i`, which must split the pattern in half; the result
/// has exactly half the size.
pub fn drop_coordinate(map: &LinearMap, i: usize) -> Result<LinearMap> {
    let zero_side = fix_coordinate_count(map, i)?;
    if 2 * zero_side != map.size() {
        return Err(Error::NoHalfSplit { index: i });
    }
    map.without_column(i)
}

fn pad_rows(map: LinearMap, m: usize) -> Result<LinearMap> {
    let k = map.k();
    let mut rows = map.rows().to_vec();
    if rows.len() > m {
        return Err(Error::InvalidArgument(format!("{} rows exceed {m}", rows.len())));
    }
    rows.resize(m, vec![Rational::from_integer(0); k]);
    LinearMap::new(k, rows)
}

fn zero_extend_to(mut map: LinearMap, k: usize) -> Result<LinearMap> {
    while map.k() < k {
        map = build_zero_extension(&map)?;
    }
    Ok(map)
}

/// `H^+(k + i, k)` as stated: the codimension-1 sizes, then
/// `2^(k-1) + 2^(k-4)` from two rows and `2^(k-1) + 2^(k-j-1)` from `j`
/// rows for `3 <= j <= k - 1`.
pub fn expected_large_set(k: usize, i: usize) -> BTreeSet<u64> {
    let mut s: BTreeSet<u64> = [35u64 << (k - 6), 5 << (k - 3), 3 << (k - 2), 1 << k].into();
    if i >= 2 {
        s.insert((1 << (k - 1)) + (1 << (k - 4)));
    }
    for j in 3..=i.min(k - 1) {
        s.insert((1 << (k - 1)) + (1 << (k - j - 1)));
    }
    s
}

/// A map with exactly `m` rows on `k` coordinates realising `size` from the
/// explicit families, each checked by enumeration.
pub fn large_construction(k: usize, m: usize, size: u64) -> Result<Option<(LinearMap, String)>> {
    let mut candidates: Vec<(LinearMap, String)> = Vec::new();
    candidates.push((LinearMap::zero(k, m)?, "full cube".into()));
    if m >= 1 {
        for a in 0..=k {
            for b in 0..=k - a {
                let sc = SignCount::new(a, b, k - a - b);
                if codim1_size(sc) == size as u128 {
                    candidates.push((sc.to_map()?, format!("one row with sign counts ({a},{b},{})", sc.c)));
                }
            }
        }
    }
    if m >= 2 && k >= 4 {
        let two = LinearMap::from_ints(4, &[vec![1, -1, 0, 0], vec![0, 0, 1, -1]])?;
        candidates.push((zero_extend_to(two, k)?, "two rows on disjoint pairs".into()));
    }
    for j in 2..=m.min(k - 1) {
        candidates.push((zero_extend_to(build_21_star_map(j)?, k)?, format!("(2,1)-star with {j} rows")));
    }
    for (map, note) in candidates {
        if map.size() == size {
            return Ok(Some((pad_rows(map, m)?, note)));
        }
    }
    Ok(None)
}

fn diff(a: &BTreeSet<u64>, b: &BTreeSet<u64>) -> (Vec<u64>, Vec<u64>) {
    (a.difference(b).copied().collect(), b.difference(a).copied().collect())
}

/// Checks the chain `H^+(k + i, k)` for `1 <= i <= n_max - k` against the
/// stated sets.
///
/// Exclusion: an exhaustive closure of patterns above `2^(k-1)` over maps
/// with entries in {-1, 0, 1}. Membership: explicit constructions. Also
/// cross-checks the closure against the brute-force oracle at `k = 4` and
/// the depth-3 shape-search survivors against the star families.
pub fn verify_large_sets(k: usize, n_max: usize, exec: Exec) -> Result<Report> {
    if !(6..=VERIFY_MAX_K).contains(&k) {
        return Err(Error::DimensionOutOfRange { k, max: VERIFY_MAX_K });
    }
    if n_max <= k || n_max > 2 * k {
        return Err(Error::InvalidArgument(format!("n_max must lie in {}..={}, got {n_max}", k + 1, 2 * k)));
    }
    let mut report = Report::new(format!("large sizes, k = {k}"));
    let half = 1u64 << (k - 1);

    let codim1 = large_codim1_sizes(k)?;
    report.check("codimension-1 sizes", codim1 == expected_large_set(k, 1), format!("{codim1:?}"));

    let closure = PatternClosure::run(&ClosureConfig::signs(k, half), exec)?;
    report.check(
        "closure exhausted",
        closure.is_exhausted(),
        format!("{} patterns over {} row patterns, depth {}", closure.pattern_count(), closure.generator_count(), closure.depth()),
    );

    let mut chain = Vec::new();
    let mut previous: Option<BTreeSet<u64>> = None;
    for i in 1..=n_max - k {
        let found = closure.sizes_up_to(i);
        let got: BTreeSet<u64> = found.sizes().into_iter().collect();
        let want = expected_large_set(k, i);
        let n = k + i;
        let (extra, missing) = diff(&got, &want);
        let claim = report.check(format!("H+({n},{k})"), extra.is_empty() && missing.is_empty(), format!("{got:?}"));
        if !extra.is_empty() || !missing.is_empty() {
            let extra_witnesses: Vec<_> = extra.iter().map(|t| (t, found.get(*t).map(|p| p.witness().clone()))).collect();
            claim.with_witness(json!({"unexpected": extra_witnesses, "missing": missing}));
        }

        let mut sizes = SizeSet::new(n, k);
        let mut unbuilt = Vec::new();
        for &t in &want {
            match large_construction(k, i, t)? {
                Some((witness, note)) => {
                    sizes.insert(t, Provenance::Construction { witness, note });
                }
                None => unbuilt.push(t),
            }
        }
        sizes.merge(&found);
        report.check(format!("constructions for H+({n},{k})"), unbuilt.is_empty(), format!("missing {unbuilt:?}"));
        if i == 3 {
            report.check(
                format!("H+({},{k}) = H+({n},{k})", n - 1),
                previous.as_ref() == Some(&got),
                "three rows add nothing over two",
            );
        }
        previous = Some(got);
        chain.push(sizes);
    }
    if n_max - k >= k {
        let stable = closure.depth() < k && closure.is_exhausted();
        report.check("stable from i = k", stable, format!("closure depth {}", closure.depth()));
    }

    let entries = ints(&[-1, 0, 1]);
    let mut agree = true;
    for m in 1..=3 {
        let oracle = oracle_enumerate(4, m, &entries, Rational::new(1, 2), u128::MAX, exec)?;
        let small = PatternClosure::run(&ClosureConfig { max_depth: Some(m), ..ClosureConfig::signs(4, 8) }, exec)?;
        agree &= oracle.sizes() == small.sizes_up_to(m).sizes();
    }
    report.check("closure matches oracle at k = 4", agree, "m = 1, 2, 3");

    let search = bfs_search_with(&SearchConfig::large(k)?.with_max_edges(3), exec)?;
    let pairs_ok = search.survivors(2).iter().all(|s| s.shape.vertex_count() <= 6);
    report.check("pair supports cover at most 6 coordinates", pairs_ok, format!("{} pair shapes", search.survivors(2).len()));
    let mut stars_ok = true;
    for s in search.survivors(3) {
        let v = s.shape.k();
        stars_ok &= match classify_star(&s.shape) {
            StarClass::Star21 => s.max == (1 << (v - 1)) + 1,
            StarClass::Star32 => s.max == (1 << (v - 1)) + 2,
            _ => false,
        };
    }
    report.check("three-edge survivors are stars", stars_ok, format!("{} shapes", search.survivors(3).len()));

    report.data = json!({ "k": k, "n_max": n_max, "chain": chain });
    Ok(report)
}

/// The six depth-4 shapes of the small-mode search, canonical.
pub fn small_window_families() -> Vec<(String, Shape)> {
    let fam: [(&str, &[&[usize]]); 6] = [
        ("(2,1)-star, 4 edges", &[&[0, 1], &[0, 2], &[0, 3], &[0, 4]]),
        ("(3,2)-star, 4 edges", &[&[0, 1, 2], &[0, 1, 3], &[0, 1, 4], &[0, 1, 5]]),
        ("(2,1)-star, 3 edges, one doubled", &[&[0, 1], &[0, 1], &[0, 2], &[0, 3]]),
        ("(3,2)-star, 3 edges, one doubled", &[&[0, 1, 2], &[0, 1, 2], &[0, 1, 3], &[0, 1, 4]]),
        ("(3,2)-star, 3 edges, plus centre pair", &[&[0, 1, 2], &[0, 1, 3], &[0, 1, 4], &[0, 1]]),
        ("(3,2)-star, 2 edges, plus centre pair twice", &[&[0, 1, 2], &[0, 1, 3], &[0, 1], &[0, 1]]),
    ];
    fam.iter()
        .map(|(name, e)| (name.to_string(), canonical_form(&Shape::from_edge_lists(e).expect("valid family"))))
        .collect()
}

/// Checks that the achievable sizes in `[15/16 * 2^(k-1), 2^(k-1)]` are
/// exactly `15 * 2^(k-5)`, `126 * 2^(k-8)` and `2^(k-1)` (only `k = 8`).
pub fn verify_small_window(k: usize, exec: Exec) -> Result<Report> {
    if k != 8 {
        return Err(Error::DimensionOutOfRange { k, max: VERIFY_MAX_K });
    }
    let mut report = Report::new(format!("small window, k = {k}"));
    let half = 1u64 << (k - 1);
    let low = 15u64 << (k - 5);

    let mut members = SizeSet::new(k + 1, k);
    for sc in [SignCount::new(4, 1, k - 5), SignCount::new(5, 3, k - 8), SignCount::new(0, 1, k - 1)] {
        let map = sc.to_map()?;
        let t = map.size();
        report.check(format!("one row ({},{},{}) realises {t}", sc.a, sc.b, sc.c), t == codim1_size(sc) as u64, "");
        members.insert(t, Provenance::Construction { witness: map, note: format!("sign counts ({},{},{})", sc.a, sc.b, sc.c) });
    }

    let closure = PatternClosure::run(&ClosureConfig::signs(k, low), exec)?;
    report.check(
        "closure exhausted",
        closure.is_exhausted(),
        format!("{} patterns, depth {}", closure.pattern_count(), closure.depth()),
    );
    let found = closure.all_sizes();
    let inside: Vec<u64> = found.sizes().into_iter().filter(|&t| t > low && t < half).collect();
    let claim = report.check("sizes strictly inside the window", inside == [126u64 << (k - 8)], format!("{inside:?}"));
    if inside != [126u64 << (k - 8)] {
        let w: Vec<_> = inside.iter().map(|t| (t, found.get(*t).map(|p| p.witness().clone()))).collect();
        claim.with_witness(w);
    }
    let window: BTreeSet<u64> = members.sizes().into_iter().chain(inside.iter().copied()).collect();
    let expected: BTreeSet<u64> = [low, 126 << (k - 8), half].into();
    report.check("window", window == expected, format!("{window:?}"));

    let small = SearchConfig::small(k)?.with_max_edges(4);
    let dedup = bfs_search_with(&small, exec)?;
    let raw = bfs_search_with(&small.clone().with_dedupe(false), exec)?;
    let finals = final_shapes(&dedup, 4);
    report.check("raw depth-4 survivors", raw.survivors(4).len() == 10, format!("{}", raw.survivors(4).len()));
    report.check("canonical depth-4 survivors", finals.len() == 6, format!("{}", finals.len()));
    let raw_classes: BTreeSet<Shape> = final_shapes(&raw, 4).into_iter().map(|(s, _)| s).collect();
    let families = small_window_families();
    let family_set: BTreeSet<Shape> = families.iter().map(|(_, s)| s.clone()).collect();
    let got: BTreeSet<Shape> = finals.iter().map(|(s, _)| s.clone()).collect();
    report.check("survivors are the six families", got == family_set && raw_classes == family_set, "");

    // Extensions of the families that use every coordinate.
    let quarter = (1u64 << (k - 2)) + 4;
    let full = bfs_search_with(&SearchConfig::small(k)?.with_max_edges(2 * k), exec)?;
    report.check(
        "small search exhausted",
        full.termination == Termination::Exhausted,
        format!("{} shapes evaluated", full.evaluated),
    );
    let mut below = Vec::new();
    for d in full.depths.iter().filter(|d| d.edges >= 4) {
        for s in d.shapes.iter().filter(|s| s.shape.vertex_count() == k) {
            let vals = non_redundant_values(&s.shape)?;
            let top = vals.range(..half).next_back().copied();
            below.push((s.shape.clone(), top));
        }
    }
    let worst = below.iter().filter_map(|(_, t)| *t).max();
    report
        .check(
            "full-support extensions below half are at most 2^(k-2) + 4",
            !below.is_empty() && worst.is_none_or(|t| t <= quarter),
            format!("{} shapes, largest {worst:?}, bound {quarter}", below.len()),
        )
        .with_witness(&below);

    let mut window_set = SizeSet::new(k + 1, k);
    window_set.merge(&members);
    for &t in &inside {
        if let Some(p) = found.get(t) {
            window_set.insert(t, p.clone());
        }
    }
    report.data = json!({
        "k": k,
        "window": window_set,
        "families": finals.iter().map(|(s, m)| json!({"shape": s, "max": m})).collect::<Vec<_>>(),
    });
    Ok(report)
}

/// Sizes of the sign assignments of `shape` in which no row is redundant.
/// The first vertex of each edge keeps a `+1`, since negating a row
/// changes nothing.
pub fn non_redundant_values(shape: &Shape) -> Result<BTreeSet<u64>> {
    let free: Vec<(usize, usize)> = shape
        .edges()
        .iter()
        .enumerate()
        .flat_map(|(i, e)| e.iter().skip(1).map(move |v| (i, v)))
        .collect();
    if free.len() > 24 {
        return Err(Error::InvalidArgument(format!("{} free signs is too many", free.len())));
    }
    let mut out = BTreeSet::new();
    for code in 0u32..1 << free.len() {
        let mut neg = vec![VertexSet::EMPTY; shape.edge_count()];
        for (p, &(i, v)) in free.iter().enumerate() {
            if code >> p & 1 == 1 {
                neg[i].insert(v);
            }
        }
        let map = shape.to_map(&SignAssignment::new(neg))?;
        if !has_redundant_condition(&map) {
            out.insert(map.size());
        }
    }
    Ok(out)
}

/// `sum_{i in {-1,0,1,2}} C(l, floor(l/2) + i)`: the most subsets a union of
/// four antichains can hold.
pub fn antichain_bound(ell: usize) -> u128 {
    let c = (ell / 2) as i64;
    (-1..=2).map(|i| binomial(ell as i64, c + i)).sum()
}

/// Subset-sum frequencies of integer weights.
fn subset_sums(a: &[i64]) -> HashMap<i64, u64> {
    let mut counts = HashMap::from([(0i64, 1u64)]);
    for &x in a {
        let mut next = counts.clone();
        for (&s, &c) in &counts {
            *next.entry(s + x).or_insert(0) += c;
        }
        counts = next;
    }
    counts
}

/// Largest number of subsets whose sums fall in some 4-element set.
fn top_four(counts: &HashMap<i64, u64>) -> u64 {
    let mut v: Vec<u64> = counts.values().copied().collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v.iter().take(4).sum()
}

/// Random nonzero weights `p/q` (`1 <= |p| <= 6`, `1 <= q <= 4`), scaled to
/// integers by 12, and a random 4-element target set.
fn antichain_instance(ell: usize, seed: u64, trial: u64) -> (Vec<Rational>, Vec<i64>, Vec<i64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let weights: Vec<Rational> = (0..ell)
        .map(|_| {
            let p = rng.random_range(1..=6i64) * if rng.random_bool(0.5) { 1 } else { -1 };
            Rational::new(p, rng.random_range(1..=4i64))
        })
        .collect();
    let scaled: Vec<i64> = weights.iter().map(|w| (w * Rational::from_integer(12)).to_integer()).collect();
    let total: i64 = scaled.iter().map(|x| x.abs()).sum();
    let targets = (0..4).map(|_| rng.random_range(-total..=total)).collect();
    (weights, scaled, targets)
}

/// For every trial, the subsets of random nonzero weights whose sums land in
/// a 4-element set never exceed `15/16 * 2^l`: checked both for a random
/// target set and for the worst one (the four most frequent sums). Trials
/// cycle through `ells`; trial `j` uses stream `j` of the seeded generator.
pub fn antichain_bound_check(ells: RangeInclusive<usize>, trials: u64, seed: u64, exec: Exec) -> Result<Report> {
    let (lo, hi) = (*ells.start(), *ells.end());
    if lo < 4 || hi > 16 || lo > hi {
        return Err(Error::InvalidArgument(format!("ell range {lo}..={hi} not within 4..=16")));
    }
    let mut report = Report::new(format!("antichain bound, ell {lo}..={hi}"));

    let ones = subset_sums(&[1, 1, 1, 1]);
    let extremal: u64 = (0..=3).map(|b| ones.get(&b).copied().unwrap_or(0)).sum();
    report.check("ell = 4, unit weights, targets {0,1,2,3}", extremal == 15, format!("{extremal} subsets"));

    let mut bounds_ok = true;
    let mut ratio_ok = true;
    for ell in 4..=16usize {
        let b = antichain_bound(ell);
        bounds_ok &= 16 * b <= 15 << ell;
        if ell < 16 {
            ratio_ok &= antichain_bound(ell + 1) <= 2 * b;
        }
        let central: Vec<i64> = (0..4).map(|i| (ell / 2) as i64 - 1 + i).collect();
        let unit = subset_sums(&vec![1; ell]);
        let hit: u64 = central.iter().map(|b| unit.get(b).copied().unwrap_or(0)).sum();
        bounds_ok &= u128::from(hit) == b;
    }
    report.check("four-layer bound at most 15/16 of the cube, ell 4..=16", bounds_ok, "");
    report.check("four-layer bound non-increasing as a fraction", ratio_ok, "");

    let width = (hi - lo + 1) as u64;
    let results: Vec<Option<serde_json::Value>> = exec.map_range(0..trials, |j| {
        let ell = lo + (j % width) as usize;
        let (weights, scaled, targets) = antichain_instance(ell, seed, j);
        let counts = subset_sums(&scaled);
        let worst = top_four(&counts);
        let mut distinct = targets.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let random: u64 = distinct.iter().map(|t| counts.get(t).copied().unwrap_or(0)).sum();
        let cap = 15u64 << ell;
        let ok = 16 * worst <= cap && 16 * random <= cap && u128::from(worst) <= antichain_bound(ell);
        (!ok).then(|| {
            json!({
                "trial": j,
                "ell": ell,
                "weights": weights.iter().map(format_entry).collect::<Vec<_>>(),
                "worst_count": worst,
                "random_targets_over_12": targets,
                "random_count": random,
            })
        })
    });
    let failures: Vec<serde_json::Value> = results.into_iter().flatten().collect();
    report
        .check("random instances within the bound", failures.is_empty(), format!("{trials} trials, seed {seed}"))
        .with_witness(&failures);
    report.data = json!({ "ell": [lo, hi], "trials": trials, "seed": seed });
    Ok(report)
}

/// `Some(holds)` for the bound `t(L) <= max(3/4 T, T - 2^(k-s-1))` where `T`
/// and `s` are the size and support of all rows but the last; `None` when
/// the last row is redundant or `m < 2`.
pub fn lemma_small_bound_check(map: &LinearMap) -> Result<Option<bool>> {
    let m = map.m();
    if m < 2 {
        return Ok(None);
    }
    let head = crate::cube::restrict(map, &(0..m - 1).collect::<Vec<_>>())?;
    let big_t = head.size();
    let t = map.size();
    if t >= big_t {
        return Ok(None);
    }
    let (_, support) = crate::cube::support(&head);
    Ok(Some(small_bound_holds(map.k(), support.len(), t, big_t)))
}

fn small_bound_holds(k: usize, s: usize, t: u64, big_t: u64) -> bool {
    // t <= 3T/4, or t <= T - 2^(k-s-1), i.e. 2t <= 2T - 2^(k-s)
    4 * t <= 3 * big_t || 2 * t + (1u64 << (k - s)) <= 2 * big_t
}

/// Over every map with entries in {-1, 0, 1}, `k <= k_max`, `m <= m_max`:
/// restricting to any nonempty set of rows never shrinks `t`, and the
/// non-redundant last-row bound holds.
pub fn lemma_small_bound_sweep(k_max: usize, m_max: usize, exec: Exec) -> Result<Report> {
    if k_max == 0 || k_max > 4 || m_max > 3 {
        return Err(Error::InvalidArgument("sweep supports k <= 4 and m <= 3".into()));
    }
    let mut report = Report::new(format!("restriction and reduction, k <= {k_max}, m <= {m_max}"));
    let mut maps = 0u64;
    let mut triggered = 0u64;
    let mut mono_fail: Option<serde_json::Value> = None;
    let mut bound_fail: Option<serde_json::Value> = None;
    for k in 1..=k_max {
        let rows = all_rows(k, &ints(&[-1, 0, 1]));
        let masks: Vec<u64> = exec.map(&rows, |r| {
            let p = LinearMap::new(k, vec![r.clone()]).expect("valid row").pattern();
            p.words()[0]
        });
        let supports: Vec<u32> = rows
            .iter()
            .map(|r| VertexSet::from_indices(r.iter().enumerate().filter(|(_, v)| **v != Rational::from_integer(0)).map(|(j, _)| j)).bits())
            .collect();
        let full = if k == 6 { u64::MAX } else { (1u64 << (1 << k)) - 1 };
        let n = rows.len() as u64;
        for m in 1..=m_max {
            let total = n.pow(m as u32);
            // (count, triggered, first monotonicity failure, first bound failure)
            type Acc = (u64, u64, Option<u64>, Option<u64>);
            let acc: Acc = exec.fold_range(
                0..total,
                || (0, 0, None, None),
                |mut acc: Acc, idx| {
                    let mut rest = idx;
                    let mut picked = [0usize; 3];
                    for p in picked.iter_mut().take(m) {
                        *p = (rest % n) as usize;
                        rest /= n;
                    }
                    let t = picked[..m].iter().fold(full, |a, &r| a & masks[r]).count_ones() as u64;
                    acc.0 += 1;
                    for subset in 1u32..1 << m {
                        let sub = (0..m).filter(|i| subset >> i & 1 == 1).fold(full, |a, i| a & masks[picked[i]]);
                        if (sub.count_ones() as u64) < t && acc.2.is_none() {
                            acc.2 = Some(idx);
                        }
                    }
                    if m >= 2 {
                        let head = picked[..m - 1].iter().fold(full, |a, &r| a & masks[r]).count_ones() as u64;
                        if t < head {
                            acc.1 += 1;
                            let s = picked[..m - 1].iter().fold(0u32, |a, &r| a | supports[r]).count_ones() as usize;
                            if !small_bound_holds(k, s, t, head) && acc.3.is_none() {
                                acc.3 = Some(idx);
                            }
                        }
                    }
                    acc
                },
                |a, b| (a.0 + b.0, a.1 + b.1, a.2.or(b.2), a.3.or(b.3)),
            );
            maps += acc.0;
            triggered += acc.1;
            let decode = |idx: u64| {
                let mut rest = idx;
                let chosen: Vec<Vec<Rational>> = (0..m)
                    .map(|_| {
                        let r = rows[(rest % n) as usize].clone();
                        rest /= n;
                        r
                    })
                    .collect();
                serde_json::to_value(LinearMap::new(k, chosen).expect("valid map")).expect("serialises")
            };
            if mono_fail.is_none() {
                mono_fail = acc.2.map(decode);
            }
            if bound_fail.is_none() {
                bound_fail = acc.3.map(decode);
            }
        }
    }
    let mono_ok = mono_fail.is_none();
    let claim = report.check("restriction never shrinks t", mono_ok, format!("{maps} maps"));
    if let Some(w) = mono_fail {
        claim.with_witness(w);
    }
    let bound_ok = bound_fail.is_none();
    let claim = report.check("non-redundant last row bound", bound_ok, format!("{triggered} maps with a non-redundant last row"));
    if let Some(w) = bound_fail {
        claim.with_witness(w);
    }
    report.data = json!({ "k_max": k_max, "m_max": m_max, "maps": maps, "non_redundant": triggered });
    Ok(report)
}

/// Maps on `k <= 5` coordinates with entries from `entries` and at least one
/// entry outside {-1, 0, 1} never have `t` in `(15/16 * 2^(k-1), 2^(k-1))`
/// or above `2^(k-1)`.
///
/// Exhaustive for every number of rows: starting from the patterns of rows
/// with an outside entry, patterns are closed under intersecting with any row
/// while they stay above `15/16 * 2^(k-1)`; smaller patterns cannot grow
/// back. `samples` random maps are also evaluated directly as a cross-check.
pub fn ints_window_check(k: usize, entries: &[Rational], samples: u64, seed: u64, exec: Exec) -> Result<Report> {
    if k == 0 || k > 5 {
        return Err(Error::DimensionOutOfRange { k, max: 5 });
    }
    let base = ints(&[-1, 0, 1]);
    if !base.iter().all(|b| entries.contains(b)) {
        return Err(Error::InvalidArgument("entry set must contain -1, 0 and 1".into()));
    }
    let mut entries = entries.to_vec();
    entries.sort();
    entries.dedup();
    let half = 1u64 << (k - 1);
    // t is bad iff 16 t > 15 * 2^(k-1) and t != 2^(k-1)
    let above = |t: u64| 16 * t > 15 * half;
    let bad = |t: u64| above(t) && t != half;
    let outside = |r: &Vec<Rational>| r.iter().any(|v| !base.contains(v));

    let rows = all_rows(k, &entries);
    let masks: Vec<u32> = exec.map(&rows, |r| LinearMap::new(k, vec![r.clone()]).map_or(0, |m| m.pattern().words()[0] as u32));
    let useful: Vec<usize> = (0..rows.len()).filter(|&i| above(masks[i].count_ones() as u64)).collect();

    let mut report = Report::new(format!("integrality window, k = {k}"));
    // pattern -> (parent pattern, row index)
    let mut parent: HashMap<u32, (Option<u32>, usize)> = HashMap::new();
    let mut queue = VecDeque::new();
    for &i in &useful {
        if outside(&rows[i]) && !parent.contains_key(&masks[i]) {
            parent.insert(masks[i], (None, i));
            queue.push_back(masks[i]);
        }
    }
    let seeds = parent.len();
    while let Some(p) = queue.pop_front() {
        for &i in &useful {
            let q = p & masks[i];
            if above(q.count_ones() as u64) && !parent.contains_key(&q) {
                parent.insert(q, (Some(p), i));
                queue.push_back(q);
            }
        }
    }
    let witness_for = |mut p: u32| {
        let mut chain = Vec::new();
        loop {
            let (prev, row) = parent[&p];
            chain.push(rows[row].clone());
            match prev {
                Some(q) => p = q,
                None => break,
            }
        }
        LinearMap::new(k, chain).expect("valid rows")
    };
    let mut offenders: Vec<u32> = parent.keys().copied().filter(|&p| bad(p.count_ones() as u64)).collect();
    offenders.sort_unstable();
    let claim = report.check(
        "closure: no outside-entry map in the window",
        offenders.is_empty(),
        format!("{} starting rows, {} patterns above 15/16 * 2^(k-1)", seeds, parent.len()),
    );
    if let Some(&p) = offenders.first() {
        claim.with_witness(witness_for(p));
    }

    let extended: Vec<usize> = (0..rows.len()).filter(|&i| outside(&rows[i])).collect();
    let sampled: Vec<Option<LinearMap>> = if extended.is_empty() {
        Vec::new()
    } else {
        exec.map_range(0..samples, |j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j);
            let m = rng.random_range(1..=3usize);
            let mut chosen = vec![rows[extended[rng.random_range(0..extended.len())]].clone()];
            for _ in 1..m {
                chosen.push(rows[rng.random_range(0..rows.len())].clone());
            }
            let map = LinearMap::new(k, chosen).expect("valid rows");
            bad(map.size()).then_some(map)
        })
    };
    let sample_fail: Vec<LinearMap> = sampled.into_iter().flatten().collect();
    let status = if samples == 0 || extended.is_empty() {
        Status::Unverified
    } else if sample_fail.is_empty() {
        Status::Pass
    } else {
        Status::Fail
    };
    report
        .push("sampled maps conform", status, format!("{samples} samples, seed {seed}"))
        .with_witness(sample_fail.first());

    report.data = json!({
        "k": k,
        "entries": entries.iter().map(format_entry).collect::<Vec<_>>(),
        "patterns": parent.len(),
    });
    Ok(report)
}

/// `H(n)` restricted to `[2^n / 4, 2^n]`, each size with a construction.
pub fn h_n_window(n: usize) -> Result<SizeSet> {
    if !(8..=crate::cube::MAX_DIM).contains(&n) {
        return Err(Error::DimensionOutOfRange { k: n, max: crate::cube::MAX_DIM });
    }
    let mut out = SizeSet::new(n, n);
    let mut record = |map: LinearMap, note: String| {
        let t = map.size();
        out.insert(t, Provenance::Construction { witness: map, note });
    };
    record(LinearMap::zero(n, 0)?, format!("whole cube, k = {n}"));
    record(LinearMap::zero(n - 1, 1)?, format!("whole cube, k = {}", n - 1));
    record(LinearMap::zero(n - 2, 2)?, format!("whole cube, k = {}", n - 2));
    let k = n - 1;
    for t in large_codim1_sizes(k)? {
        if t == 1 << k {
            continue;
        }
        let (map, note) = large_construction(k, 1, t)?.expect("codimension-1 size has a row");
        record(map, format!("{note}, k = {k}"));
    }
    Ok(out)
}

/// Checks `sum 2^(t_i)` is a size of some map on `k <= 5` coordinates with
/// entries in {-1, 0, 1}, via an exhaustive closure down to that size.
pub fn sum_of_powers_members(k: usize, exponents: &[usize], exec: Exec) -> Result<Report> {
    let mut e = exponents.to_vec();
    e.sort_unstable_by(|a, b| b.cmp(a));
    if e.is_empty() || e.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("exponents must be distinct and nonempty".into()));
    }
    let j = e.len() - 1;
    if j > k || k - j < e[0] {
        return Err(Error::InvalidArgument(format!("need k - {j} >= {}", e[0])));
    }
    if k > 5 {
        return Err(Error::DimensionOutOfRange { k, max: 5 });
    }
    let target: u64 = e.iter().map(|&t| 1u64 << t).sum();
    let mut report = Report::new(format!("sum of powers {target} on k = {k}"));
    let closure = PatternClosure::run(&ClosureConfig::signs(k, target - 1), exec);
    match closure {
        Ok(c) => {
            let sizes = c.all_sizes();
            match sizes.get(target) {
                Some(p) => {
                    report.check(format!("{target} is a size"), true, "").with_witness(p.witness());
                }
                None => {
                    report.push(format!("{target} is a size"), Status::Unverified, "not reached by {-1,0,1} maps");
                }
            }
        }
        Err(Error::SearchBudget { .. }) => {
            report.push(format!("{target} is a size"), Status::Unverified, "closure budget exhausted");
        }
        Err(other) => return Err(other),
    }
    report.data = json!({ "k": k, "exponents": e, "target": target });
    Ok(report)
}
