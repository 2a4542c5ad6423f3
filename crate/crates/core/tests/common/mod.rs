//! Fixtures and brute-force oracles shared by the integration tests. Nothing
//! here calls the validation or classification code under test.

#![allow(dead_code)]

use std::collections::HashMap;

use pda_caching::pda::{Entry, Pda};
use pda_caching::subsets::{colex_rank, enumerate_subsets, from_elements};

/// The 6x6 (6, 6, 2, 12) array as printed with rows/columns 12,13,14,23,24,34.
pub const EXAMPLE_ONE: &str = "\
6 6
* 0 1 2 3 *
0 * 4 5 * 6
1 4 * * 7 8
2 5 * * 9 10
3 * 7 9 * 11
* 6 8 10 11 *
";

/// The same array with the anti-diagonal stars deleted.
pub const EXAMPLE_ONE_REDUCED: &str = "\
6 6
* 0 1 2 3 -
0 * 4 5 - 6
1 4 * - 7 8
2 5 - * 9 10
3 - 7 9 * 11
- 6 8 10 11 *
";

pub fn example_one() -> Pda {
    EXAMPLE_ONE.parse().unwrap()
}

pub fn example_one_reduced() -> Pda {
    EXAMPLE_ONE_REDUCED.parse().unwrap()
}

/// Renumbers integers in order of first appearance in a row-major scan.
pub fn relabel(pda: &Pda) -> Pda {
    let mut map: HashMap<u32, u32> = HashMap::new();
    let mut out = pda.clone();
    for ((j, k), e) in pda.cells() {
        if let Entry::Int(s) = e {
            let next = map.len() as u32;
            let v = *map.entry(s).or_insert(next);
            out.set(j, k, Entry::Int(v));
        }
    }
    out
}

/// Rows and columns reordered: `out[i][j] = pda[rows[i]][cols[j]]`.
pub fn permute(pda: &Pda, rows: &[usize], cols: &[usize]) -> Pda {
    let grid = rows
        .iter()
        .flat_map(|&j| cols.iter().map(move |&k| pda.get(j, k)))
        .collect();
    Pda::new(rows.len(), cols.len(), grid).unwrap()
}

/// Colex positions of the `t`-subsets of `[0, h)` listed in lexicographic
/// order, i.e. the order 12, 13, 14, 23, 24, 34 for `h = 4, t = 2`.
pub fn lex_order_positions(h: u32, t: u32) -> Vec<usize> {
    let mut subsets = enumerate_subsets(h, t);
    subsets.sort_by_key(|&s| {
        pda_caching::subsets::elements(s).collect::<Vec<_>>()
    });
    subsets.into_iter().map(colex_rank).collect()
}

pub fn set(items: &[u32]) -> u64 {
    from_elements(items.iter().copied())
}

/// Direct check of the three array conditions by scanning every pair of
/// cells. Returns `Some((K, F, Z, S))` iff the array is a PDA.
pub fn oracle_pda(pda: &Pda) -> Option<(usize, usize, usize, usize)> {
    let (f, k) = (pda.rows(), pda.cols());
    let mut z = None;
    for col in 0..k {
        let mut stars = 0;
        for row in 0..f {
            match pda.get(row, col) {
                Entry::Star => stars += 1,
                Entry::Blank => return None,
                Entry::Int(_) => {}
            }
        }
        match z {
            None => z = Some(stars),
            Some(z0) if z0 != stars => return None,
            _ => {}
        }
    }
    let ints: Vec<(usize, usize, u32)> = pda
        .cells()
        .filter_map(|((j, c), e)| e.as_int().map(|s| (j, c, s)))
        .collect();
    let max = ints.iter().map(|&(_, _, s)| s).max()?;
    for s in 0..=max {
        if !ints.iter().any(|&(_, _, v)| v == s) {
            return None;
        }
    }
    for (a, &(j1, k1, s1)) in ints.iter().enumerate() {
        for &(j2, k2, s2) in &ints[a + 1..] {
            if s1 != s2 {
                continue;
            }
            let ok = j1 != j2
                && k1 != k2
                && pda.get(j1, k2) == Entry::Star
                && pda.get(j2, k1) == Entry::Star;
            if !ok {
                return None;
            }
        }
    }
    Some((k, f, z?, max as usize + 1))
}

/// Useless star positions found by building every integer's square
/// subarray explicitly and marking the stars inside it.
pub fn oracle_useless(pda: &Pda) -> Vec<(usize, usize)> {
    let (f, k) = (pda.rows(), pda.cols());
    let mut useful = vec![false; f * k];
    let max = pda.cells().filter_map(|(_, e)| e.as_int()).max();
    if let Some(max) = max {
        for s in 0..=max {
            let occ: Vec<(usize, usize)> = pda
                .cells()
                .filter(|(_, e)| *e == Entry::Int(s))
                .map(|(p, _)| p)
                .collect();
            for &(j, _) in &occ {
                for &(_, c) in &occ {
                    if pda.get(j, c) == Entry::Star {
                        useful[j * k + c] = true;
                    }
                }
            }
        }
    }
    pda.cells()
        .filter(|&((j, c), e)| e == Entry::Star && !useful[j * k + c])
        .map(|(p, _)| p)
        .collect()
}
