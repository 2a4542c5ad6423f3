//! Subset-indexed PDA families.
//!
//! Rows are the `b`-subsets `B` of `[0, H)` and columns the `r`-subsets `A`,
//! both in colex order. A cell is a star unless `|A ∩ B| = λ`, in which case
//! it carries a label:
//!
//! * rule I:  `((A ∪ B) \ I, I)` with `I = A ∩ B`
//! * rule II: `((A ∪ B) \ I, A \ B)`
//!
//! Labels are numbered by sorting the distinct `(first, second)` bitmask pairs
//! numerically, which is colex order on the first component and then on the
//! second.
//!
//! [`mn_pda`] gives the classic `t`-subset array as a baseline.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pda::{Entry, Pda, PdaParams};
use crate::subsets::{self, binomial, colex_rank, enumerate_subsets, MAX_GROUND};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "I")]
    I,
    #[serde(rename = "II")]
    II,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::I => f.write_str("I"),
            Rule::II => f.write_str("II"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("H = {0} exceeds the supported maximum of 64")]
    GroundTooLarge(u32),
    #[error("r = {r} must satisfy 0 < r < H = {h}")]
    UserSubset { r: u32, h: u32 },
    #[error("b = {b} must satisfy 0 < b < H = {h}")]
    RowSubset { b: u32, h: u32 },
    #[error("lambda must be a positive integer")]
    LambdaZero,
    #[error("lambda = {lambda} must be below min(r, b) = {min}")]
    LambdaTooLarge { lambda: u32, min: u32 },
    #[error("r + b = {sum} exceeds H + lambda = {bound}")]
    Construction { sum: u32, bound: u32 },
    #[error("r + b - lambda = {value} must be below H = {h}")]
    OriginalScheme { value: u32, h: u32 },
    #[error("r + b = {sum} exceeds H = {h}, outside the rule I reduction")]
    RuleOneReduction { sum: u32, h: u32 },
    #[error("t = {t} must satisfy 0 < t < K = {k}")]
    MnSubset { t: u32, k: u32 },
}

/// Ground-set size `H`, column subset size `r`, row subset size `b`,
/// intersection size `lambda`, and the labeling rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub h: u32,
    pub r: u32,
    pub b: u32,
    pub lambda: u32,
    pub rule: Rule,
}

impl ConstructionParams {
    /// Checks `0 < r, b < H`, `0 < λ < min(r, b)`, `r + b <= H + λ` and
    /// `H <= 64`.
    pub fn new(h: u32, r: u32, b: u32, lambda: u32, rule: Rule) -> Result<Self, ParamError> {
        let p = ConstructionParams {
            h,
            r,
            b,
            lambda,
            rule,
        };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<(), ParamError> {
        check_basic(self.h, self.r, self.b, self.lambda)?;
        if self.r + self.b > self.h + self.lambda {
            return Err(ParamError::Construction {
                sum: self.r + self.b,
                bound: self.h + self.lambda,
            });
        }
        Ok(())
    }

    /// Size of the first label component, `r + b - 2λ`.
    pub fn union_size(&self) -> u32 {
        self.r + self.b - 2 * self.lambda
    }
}

/// The conditions shared by every scheme over `(H, r, b, λ)`.
pub(crate) fn check_basic(h: u32, r: u32, b: u32, lambda: u32) -> Result<(), ParamError> {
    if h > MAX_GROUND {
        return Err(ParamError::GroundTooLarge(h));
    }
    if r == 0 || r >= h {
        return Err(ParamError::UserSubset { r, h });
    }
    if b == 0 || b >= h {
        return Err(ParamError::RowSubset { b, h });
    }
    if lambda == 0 {
        return Err(ParamError::LambdaZero);
    }
    if lambda >= r.min(b) {
        return Err(ParamError::LambdaTooLarge {
            lambda,
            min: r.min(b),
        });
    }
    Ok(())
}

/// A cell label before integer numbering, both components as bitmasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledCell {
    /// `(A ∪ B) \ (A ∩ B)`.
    pub union_part: u64,
    /// `A ∩ B` for rule I, `A \ B` for rule II.
    pub second: u64,
}

/// Label of cell `(B, A)`, or `None` for a star.
pub fn label(params: &ConstructionParams, row_set: u64, col_set: u64) -> Option<LabeledCell> {
    let inter = row_set & col_set;
    if subsets::size(inter) != params.lambda {
        return None;
    }
    let union_part = (row_set | col_set) & !inter;
    let second = match params.rule {
        Rule::I => inter,
        Rule::II => col_set & !row_set,
    };
    Some(LabeledCell { union_part, second })
}

/// Labeled grid with row and column subsets, before numbering.
#[derive(Debug, Clone)]
pub struct LabeledArray {
    pub row_sets: Vec<u64>,
    pub col_sets: Vec<u64>,
    pub cells: Vec<Option<LabeledCell>>,
}

pub fn labeled_array(params: &ConstructionParams) -> LabeledArray {
    let row_sets = enumerate_subsets(params.h, params.b);
    let col_sets = enumerate_subsets(params.h, params.r);
    let mut cells = Vec::with_capacity(row_sets.len() * col_sets.len());
    for &b in &row_sets {
        for &a in &col_sets {
            cells.push(label(params, b, a));
        }
    }
    LabeledArray {
        row_sets,
        col_sets,
        cells,
    }
}

/// Builds the rule I or rule II array for `params`.
pub fn construct(params: &ConstructionParams) -> Result<Pda, ParamError> {
    params.check()?;
    let labeled = labeled_array(params);
    let mut numbering: BTreeMap<LabeledCell, u32> = labeled
        .cells
        .iter()
        .flatten()
        .map(|&c| (c, 0))
        .collect();
    for (i, v) in numbering.values_mut().enumerate() {
        *v = i as u32;
    }
    let grid = labeled
        .cells
        .iter()
        .map(|c| match c {
            Some(c) => Entry::Int(numbering[c]),
            None => Entry::Star,
        })
        .collect();
    Ok(Pda::new(labeled.row_sets.len(), labeled.col_sets.len(), grid)
        .expect("subset families are non-empty"))
}

fn count(n: u128) -> usize {
    usize::try_from(n).expect("count fits in usize")
}

/// Closed-form `(K, F, Z, S)` of [`construct`] without building the array.
///
/// Every label occurs the same number of times: `C(r+b-2λ, r-λ)` for rule I
/// (ways to split the union part between `A` and `B`) and
/// `C(H-r-b+2λ, λ)` for rule II (choices of the intersection).
pub fn predicted_params(params: &ConstructionParams) -> Result<PdaParams, ParamError> {
    params.check()?;
    let (h, r, b, l) = (
        params.h as i64,
        params.r as i64,
        params.b as i64,
        params.lambda as i64,
    );
    let c = params.union_size() as i64;
    let k = binomial(h, r);
    let f = binomial(h, b);
    let z = f - binomial(r, l) * binomial(h - r, b - l);
    let (s, occurrences) = match params.rule {
        Rule::I => (binomial(h, c) * binomial(h - c, l), binomial(c, r - l)),
        Rule::II => (binomial(h, c) * binomial(c, r - l), binomial(h - c, l)),
    };
    Ok(PdaParams {
        k: count(k),
        f: count(f),
        z: count(z),
        s: count(s),
        gain_profile: vec![count(occurrences); count(s)],
    })
}

/// Baseline array over `t`-subsets of `K` users: row `T`, column `k` is a
/// star iff `k ∈ T`, otherwise the colex rank of `T ∪ {k}` among
/// `(t+1)`-subsets.
pub fn mn_pda(k: u32, t: u32) -> Result<Pda, ParamError> {
    if k > MAX_GROUND {
        return Err(ParamError::GroundTooLarge(k));
    }
    if t == 0 || t >= k {
        return Err(ParamError::MnSubset { t, k });
    }
    let rows = enumerate_subsets(k, t);
    let mut grid = Vec::with_capacity(rows.len() * k as usize);
    for &set in &rows {
        for user in 0..k {
            let bit = 1u64 << user;
            grid.push(if set & bit != 0 {
                Entry::Star
            } else {
                Entry::Int(colex_rank(set | bit) as u32)
            });
        }
    }
    Ok(Pda::new(rows.len(), k as usize, grid).expect("non-empty"))
}
