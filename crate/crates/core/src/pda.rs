//! Placement delivery arrays.
//!
//! A [`Pda`] is an `F x K` grid (rows are packet indices, columns are users)
//! over three entry states: a star (the user caches that packet of every
//! file), an integer slot `s` (the packet is delivered in broadcast slot `s`),
//! and a blank (a star that was deleted because it never takes part in any
//! multicast). Freshly built or parsed arrays contain no blanks; blanks only
//! appear in the output of [`Pda::reduce`].
//!
//! Text format:
//!
//! ```text
//! # comment lines start with '#'
//! F K
//! * 0
//! 0 *
//! ```
//!
//! Tokens are `*` (star), a decimal integer, or `-` (blank).

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// One cell of a placement delivery array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Entry {
    Star,
    Int(u32),
    Blank,
}

impl Entry {
    pub fn is_star(self) -> bool {
        matches!(self, Entry::Star)
    }

    pub fn as_int(self) -> Option<u32> {
        match self {
            Entry::Int(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Star => f.write_str("*"),
            Entry::Int(s) => write!(f, "{s}"),
            Entry::Blank => f.write_str("-"),
        }
    }
}

/// A grid position, `(row, col)`.
pub type Pos = (usize, usize);

/// Which part of the pairwise condition a pair of equal integers violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairFault {
    SameRow,
    SameColumn,
    /// `p[j1][k2]` is not a star.
    CrossNotStarFirst,
    /// `p[j2][k1]` is not a star.
    CrossNotStarSecond,
}

impl fmt::Display for PairFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PairFault::SameRow => "entries share a row",
            PairFault::SameColumn => "entries share a column",
            PairFault::CrossNotStarFirst => "cross entry p[j1][k2] is not a star",
            PairFault::CrossNotStarSecond => "cross entry p[j2][k1] is not a star",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PdaError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("array must have at least one row and one column")]
    Empty,
    #[error("grid has {got} entries, expected {rows}x{cols}")]
    Shape { rows: usize, cols: usize, got: usize },
    #[error("blank entry at ({row}, {col}); blanks are not allowed here")]
    BlankEntry { row: usize, col: usize },
    #[error(
        "C1 violated: column {reference_col} has {reference_count} stars but column {col} has {count}"
    )]
    StarCount {
        reference_col: usize,
        reference_count: usize,
        col: usize,
        count: usize,
    },
    #[error("C2 violated: no integer entries present")]
    NoIntegers,
    #[error("C2 violated: integer {missing} in [0, {slots}) never occurs")]
    MissingInteger { missing: u32, slots: u32 },
    #[error("C3 violated by entries {first:?} and {second:?} (value {value}): {fault}")]
    PairCondition {
        value: u32,
        first: Pos,
        second: Pos,
        fault: PairFault,
    },
    #[error("integer {value} out of range [0, {slots})")]
    OutOfRange { value: u32, slots: u32 },
    #[error(
        "unsupported array: blank count differs across columns \
         (column {min_col} has {min}, column {max_col} has {max})"
    )]
    NonUniformBlanks {
        min_col: usize,
        min: usize,
        max_col: usize,
        max: usize,
    },
    #[error(
        "unsupported array: useless-star count differs across columns \
         (column {min_col} has {min}, column {max_col} has {max})"
    )]
    NonUniformUseless {
        min_col: usize,
        min: usize,
        max_col: usize,
        max: usize,
    },
}

/// Parameters of a validated array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdaParams {
    /// Users (columns).
    pub k: usize,
    /// Subpacketization (rows).
    pub f: usize,
    /// Stars per column.
    pub z: usize,
    /// Number of distinct integers.
    pub s: usize,
    /// `gain_profile[s]` is the number of occurrences `r_s` of integer `s`.
    pub gain_profile: Vec<usize>,
}

/// Parameters of an array whose deleted stars are marked as blanks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedParams {
    /// `z` counts the remaining stars per column.
    pub params: PdaParams,
    /// Blanks per column.
    pub z_prime: usize,
}

/// Useful/useless split of the star positions of a PDA.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarClassification {
    /// Row-major order.
    pub useful: Vec<Pos>,
    /// Row-major order.
    pub useless: Vec<Pos>,
    pub per_column_useless: Vec<usize>,
}

impl StarClassification {
    /// The common per-column useless count, if every column agrees.
    pub fn uniform_useless(&self) -> Option<usize> {
        let first = *self.per_column_useless.first()?;
        self.per_column_useless
            .iter()
            .all(|&c| c == first)
            .then_some(first)
    }
}

/// A rectangular array over stars, integers and blanks, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pda {
    rows: usize,
    cols: usize,
    grid: Vec<Entry>,
}

impl Pda {
    pub fn new(rows: usize, cols: usize, grid: Vec<Entry>) -> Result<Self, PdaError> {
        if rows == 0 || cols == 0 {
            return Err(PdaError::Empty);
        }
        if grid.len() != rows * cols {
            return Err(PdaError::Shape {
                rows,
                cols,
                got: grid.len(),
            });
        }
        Ok(Pda { rows, cols, grid })
    }

    /// Builds from nested rows. Panics on ragged or empty input; meant for
    /// literals in tests and examples.
    pub fn from_rows(rows: Vec<Vec<Entry>>) -> Self {
        let f = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == k), "ragged rows");
        Pda::new(f, k, rows.into_iter().flatten().collect()).expect("non-empty grid")
    }

    /// Subpacketization `F`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of users `K`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Entry {
        self.grid[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, entry: Entry) {
        self.grid[row * self.cols + col] = entry;
    }

    pub fn row(&self, row: usize) -> &[Entry] {
        &self.grid[row * self.cols..(row + 1) * self.cols]
    }

    /// Cells in row-major order with their positions.
    pub fn cells(&self) -> impl Iterator<Item = (Pos, Entry)> + '_ {
        let cols = self.cols;
        self.grid
            .iter()
            .enumerate()
            .map(move |(i, &e)| ((i / cols, i % cols), e))
    }

    pub fn has_blanks(&self) -> bool {
        self.grid.contains(&Entry::Blank)
    }

    /// One more than the largest integer entry, or 0 if there is none.
    pub fn slot_count(&self) -> usize {
        self.grid
            .iter()
            .filter_map(|e| e.as_int())
            .max()
            .map_or(0, |m| m as usize + 1)
    }

    pub fn column_star_counts(&self) -> Vec<usize> {
        self.column_counts(Entry::Star)
    }

    pub fn column_blank_counts(&self) -> Vec<usize> {
        self.column_counts(Entry::Blank)
    }

    fn column_counts(&self, which: Entry) -> Vec<usize> {
        let mut counts = vec![0; self.cols];
        for ((_, k), e) in self.cells() {
            if e == which {
                counts[k] += 1;
            }
        }
        counts
    }

    /// Positions of every integer, indexed by value, each in row-major order.
    fn occurrences(&self) -> Vec<Vec<Pos>> {
        let mut occ = vec![Vec::new(); self.slot_count()];
        for (pos, e) in self.cells() {
            if let Entry::Int(s) = e {
                occ[s as usize].push(pos);
            }
        }
        occ
    }

    /// Checks the three defining conditions and returns `(K, F, Z, S)` plus
    /// the gain profile. Blank entries are rejected.
    pub fn validate(&self) -> Result<PdaParams, PdaError> {
        if let Some(((row, col), _)) = self.cells().find(|(_, e)| *e == Entry::Blank) {
            return Err(PdaError::BlankEntry { row, col });
        }
        self.check_conditions()
    }

    /// Validation for arrays that went through [`Pda::reduce`]: every column
    /// must carry the same number of blanks, and the star/integer part must
    /// satisfy the same conditions as an unreduced array.
    pub fn validate_reduced(&self) -> Result<ReducedParams, PdaError> {
        let blanks = self.column_blank_counts();
        let z_prime = uniform(&blanks).map_err(|(min_col, min, max_col, max)| {
            PdaError::NonUniformBlanks {
                min_col,
                min,
                max_col,
                max,
            }
        })?;
        let params = self.check_conditions()?;
        Ok(ReducedParams { params, z_prime })
    }

    fn check_conditions(&self) -> Result<PdaParams, PdaError> {
        let stars = self.column_star_counts();
        let z = stars[0];
        if let Some((col, &count)) = stars.iter().enumerate().find(|(_, &c)| c != z) {
            return Err(PdaError::StarCount {
                reference_col: 0,
                reference_count: z,
                col,
                count,
            });
        }

        let occ = self.occurrences();
        if occ.is_empty() {
            return Err(PdaError::NoIntegers);
        }
        let slots = occ.len() as u32;
        if let Some(missing) = occ.iter().position(Vec::is_empty) {
            return Err(PdaError::MissingInteger {
                missing: missing as u32,
                slots,
            });
        }

        // first offending pair in row-major order of (first, second)
        let mut worst: Option<(usize, usize, PdaError)> = None;
        for (value, positions) in occ.iter().enumerate() {
            for (a, &first) in positions.iter().enumerate() {
                for &second in &positions[a + 1..] {
                    if let Some(fault) = self.pair_fault(first, second) {
                        let key = (self.index(first), self.index(second));
                        if worst.as_ref().is_none_or(|w| key < (w.0, w.1)) {
                            worst = Some((
                                key.0,
                                key.1,
                                PdaError::PairCondition {
                                    value: value as u32,
                                    first,
                                    second,
                                    fault,
                                },
                            ));
                        }
                        break;
                    }
                }
            }
        }
        if let Some((_, _, err)) = worst {
            return Err(err);
        }

        Ok(PdaParams {
            k: self.cols,
            f: self.rows,
            z,
            s: occ.len(),
            gain_profile: occ.iter().map(Vec::len).collect(),
        })
    }

    fn index(&self, (j, k): Pos) -> usize {
        j * self.cols + k
    }

    /// Which subcondition a pair of equal integer entries fails, if any.
    pub fn pair_fault(&self, (j1, k1): Pos, (j2, k2): Pos) -> Option<PairFault> {
        if j1 == j2 {
            Some(PairFault::SameRow)
        } else if k1 == k2 {
            Some(PairFault::SameColumn)
        } else if !self.get(j1, k2).is_star() {
            Some(PairFault::CrossNotStarFirst)
        } else if !self.get(j2, k1).is_star() {
            Some(PairFault::CrossNotStarSecond)
        } else {
            None
        }
    }

    /// Positions holding integer `s`, in row-major order.
    pub fn integer_positions(&self, s: u32) -> Result<Vec<Pos>, PdaError> {
        let slots = self.slot_count() as u32;
        if s >= slots {
            return Err(PdaError::OutOfRange { value: s, slots });
        }
        Ok(self
            .cells()
            .filter(|(_, e)| *e == Entry::Int(s))
            .map(|(p, _)| p)
            .collect())
    }

    /// Splits stars into useful and useless ones. A star at `(j, k)` is useful
    /// iff some integer occurs both in row `j` and in column `k`, which is
    /// exactly membership in that integer's square subarray.
    pub fn classify_stars(&self) -> StarClassification {
        let slots = self.slot_count();
        let mut row_sets = vec![FixedBitSet::with_capacity(slots); self.rows];
        let mut col_sets = vec![FixedBitSet::with_capacity(slots); self.cols];
        for ((j, k), e) in self.cells() {
            if let Entry::Int(s) = e {
                row_sets[j].insert(s as usize);
                col_sets[k].insert(s as usize);
            }
        }

        let mut useful = Vec::new();
        let mut useless = Vec::new();
        let mut per_column_useless = vec![0; self.cols];
        for ((j, k), e) in self.cells() {
            if !e.is_star() {
                continue;
            }
            if row_sets[j].is_disjoint(&col_sets[k]) {
                useless.push((j, k));
                per_column_useless[k] += 1;
            } else {
                useful.push((j, k));
            }
        }
        StarClassification {
            useful,
            useless,
            per_column_useless,
        }
    }

    /// Replaces every useless star by a blank. Requires the same number `Z'`
    /// of useless stars in every column and returns it alongside the array.
    pub fn reduce(&self) -> Result<(Pda, usize), PdaError> {
        let classes = self.classify_stars();
        let z_prime = uniform(&classes.per_column_useless).map_err(
            |(min_col, min, max_col, max)| PdaError::NonUniformUseless {
                min_col,
                min,
                max_col,
                max,
            },
        )?;
        let mut out = self.clone();
        for &(j, k) in &classes.useless {
            out.set(j, k, Entry::Blank);
        }
        Ok((out, z_prime))
    }

    /// Text form; see the module docs for the grammar.
    pub fn serialize(&self) -> String {
        self.to_string()
    }

    /// Parses the text form without validating any array condition.
    pub fn parse(text: &str) -> Result<Self, PdaError> {
        text.parse()
    }
}

/// `Ok(v)` if all counts equal `v`, else the arg-min and arg-max.
fn uniform(counts: &[usize]) -> Result<usize, (usize, usize, usize, usize)> {
    let first = counts[0];
    if counts.iter().all(|&c| c == first) {
        return Ok(first);
    }
    let (min_col, &min) = counts.iter().enumerate().min_by_key(|(_, &c)| c).unwrap();
    let (max_col, &max) = counts.iter().enumerate().max_by_key(|(_, &c)| c).unwrap();
    Err((min_col, min, max_col, max))
}

impl fmt::Display for Pda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for j in 0..self.rows {
            let line: Vec<String> = self.row(j).iter().map(Entry::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> PdaError {
    PdaError::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Splits a line into tokens with their 1-based character columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_whitespace()
        .map(move |tok| (tok.as_ptr() as usize - line.as_ptr() as usize + 1, tok))
}

fn parse_count(tok: &str, line: usize, column: usize) -> Result<usize, PdaError> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, column, format!("expected a dimension, found {tok:?}")))
}

impl FromStr for Pda {
    type Err = PdaError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| {
                let t = l.trim_start();
                !t.is_empty() && !t.starts_with('#')
            });

        let (hline, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, 1, "missing header line"))?;
        let head: Vec<(usize, &str)> = tokens(header).collect();
        if head.len() != 2 {
            return Err(parse_err(hline, 1, "header must be `F K`"));
        }
        let rows = parse_count(head[0].1, hline, head[0].0)?;
        let cols = parse_count(head[1].1, hline, head[1].0)?;
        if rows == 0 || cols == 0 {
            return Err(PdaError::Empty);
        }

        let mut grid = Vec::with_capacity(rows * cols);
        let mut seen = 0;
        for (lineno, line) in lines {
            if seen == rows {
                return Err(parse_err(lineno, 1, format!("more than {rows} rows")));
            }
            let mut width = 0;
            for (column, tok) in tokens(line) {
                let entry = match tok {
                    "*" => Entry::Star,
                    "-" => Entry::Blank,
                    t if t.bytes().all(|b| b.is_ascii_digit()) => {
                        Entry::Int(t.parse::<u32>().map_err(|_| {
                            parse_err(lineno, column, format!("integer {t} too large"))
                        })?)
                    }
                    t if t.starts_with('-') && t[1..].bytes().all(|b| b.is_ascii_digit()) => {
                        return Err(parse_err(lineno, column, format!("negative integer {t}")))
                    }
                    t => return Err(parse_err(lineno, column, format!("invalid token {t:?}"))),
                };
                grid.push(entry);
                width += 1;
            }
            if width != cols {
                return Err(parse_err(
                    lineno,
                    1,
                    format!("row has {width} entries, expected {cols}"),
                ));
            }
            seen += 1;
        }
        if seen != rows {
            return Err(parse_err(
                text.lines().count().max(1),
                1,
                format!("expected {rows} rows, found {seen}"),
            ));
        }
        Pda::new(rows, cols, grid)
    }
}
