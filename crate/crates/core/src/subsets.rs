//! Subsets of `[0, H)` as `u64` bitmasks, binomial coefficients, and colex
//! ranking.
//!
//! Increasing bitmask value is exactly colexicographic order, so the position
//! of a subset in [`enumerate_subsets`] equals its combinatorial-number-system
//! rank returned by [`colex_rank`].

/// Largest ground-set size representable by a `u64` bitmask.
pub const MAX_GROUND: u32 = 64;

/// `C(n, k)`, zero when `k < 0`, `k > n` or `n < 0`.
pub fn binomial(n: i64, k: i64) -> u128 {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// All `t`-subsets of `[0, h)` in colexicographic order.
///
/// Panics if `t > h` or `h > 64`.
pub fn enumerate_subsets(h: u32, t: u32) -> Vec<u64> {
    assert!(h <= MAX_GROUND, "ground set too large: {h}");
    assert!(t <= h, "subset size {t} exceeds ground set {h}");
    let count = binomial(h as i64, t as i64) as usize;
    let mut out = Vec::with_capacity(count);
    if t == 0 {
        out.push(0);
        return out;
    }
    let limit: u128 = 1u128 << h;
    let mut x: u128 = (1u128 << t) - 1;
    while x < limit {
        out.push(x as u64);
        // Gosper's hack: next integer with the same popcount
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    debug_assert_eq!(out.len(), count);
    out
}

/// Position of `set` among all subsets of the same size in colex order.
pub fn colex_rank(set: u64) -> usize {
    let mut rank: u128 = 0;
    let mut bits = set;
    let mut i: i64 = 1;
    while bits != 0 {
        let c = bits.trailing_zeros() as i64;
        rank += binomial(c, i);
        bits &= bits - 1;
        i += 1;
    }
    rank as usize
}

/// Number of elements in a bitmask subset.
#[inline]
pub fn size(set: u64) -> u32 {
    set.count_ones()
}

/// Elements of a bitmask subset in increasing order.
pub fn elements(set: u64) -> impl Iterator<Item = u32> {
    let mut bits = set;
    std::iter::from_fn(move || {
        if bits == 0 {
            None
        } else {
            let e = bits.trailing_zeros();
            bits &= bits - 1;
            Some(e)
        }
    })
}

/// Bitmask of the given elements.
pub fn from_elements<I: IntoIterator<Item = u32>>(items: I) -> u64 {
    items.into_iter().fold(0u64, |acc, e| acc | (1u64 << e))
}

/// Compact string form used for labels, e.g. `{0,2,3}`.
pub fn to_string(set: u64) -> String {
    let parts: Vec<String> = elements(set).map(|e| e.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}
