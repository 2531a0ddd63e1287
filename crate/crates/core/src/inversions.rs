//! The termination measure for the rewriting system: level matrices,
//! inversion counts, inversion-minimal row arrangements, the comparability
//! number, and the lexicographic pair `(c, e)`.
//!
//! Entries are variable indices. "Greater" always means greater in the
//! variable order `X_1 > X_2 > ...`, i.e. a strictly smaller index.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::LeveledFamily;
use crate::presentation::TMonomial;

/// Row cap for the inversion-minimal search.
pub const DEFAULT_ROW_CAP: usize = 10;

/// One level of a `T`-monomial: a row per factor, each row the standard
/// factorization (ascending indices) of its generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelMatrix {
    pub level: usize,
    pub rows: Vec<Vec<usize>>,
}

impl fmt::Display for LevelMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, row) in self.rows.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            let cells: Vec<String> = row.iter().map(|i| format!("x{i}")).collect();
            f.write_str(&cells.join(" "))?;
        }
        f.write_str("]")
    }
}

/// `(c_m, e_m)`, compared lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ReductionMeasure {
    pub c: u64,
    pub e: u64,
}

impl ReductionMeasure {
    pub fn is_zero(&self) -> bool {
        self.c == 0 && self.e == 0
    }
}

impl fmt::Display for ReductionMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(c,e): {} {}", self.c, self.e)
    }
}

/// Entries in column-major order.
fn column_major(rows: &[Vec<usize>]) -> Vec<usize> {
    let width = rows.first().map_or(0, Vec::len);
    (0..width)
        .flat_map(|k| rows.iter().map(move |row| row[k]))
        .collect()
}

/// Number of (entry, later entry) pairs, column-major, where the later one
/// is a strictly greater variable.
pub fn inversion_count(matrix: &LevelMatrix) -> u64 {
    let seq = column_major(&matrix.rows);
    let mut count = 0u64;
    for (p, &x) in seq.iter().enumerate() {
        count += seq[p + 1..].iter().filter(|&&y| y < x).count() as u64;
    }
    count
}

/// Standard factorizations of the level-`level` factors of `m`, in `<_lex`
/// order of the factors.
pub fn level_rows(m: &TMonomial, fam: &LeveledFamily, level: usize) -> Vec<Vec<usize>> {
    m.level_factors(level)
        .map(|r| fam.generator(r).factors())
        .collect()
}

/// Level matrices of `m` with rows in `<_lex` order (not minimized).
pub fn level_matrices(m: &TMonomial, fam: &LeveledFamily) -> Vec<LevelMatrix> {
    fam.level_numbers()
        .map(|level| LevelMatrix {
            level,
            rows: level_rows(m, fam, level),
        })
        .collect()
}

/// Searches all row permutations for the minimum inversion count. Among
/// minimizers the lexicographically smallest row sequence is returned.
///
/// Only within-column inversions depend on the row order, and they split
/// into pairwise costs, so the search is a subset DP rather than a walk
/// over permutations.
pub fn inversion_minimal(
    level: usize,
    rows: &[Vec<usize>],
    row_cap: usize,
) -> Result<(LevelMatrix, u64)> {
    let k = rows.len();
    if k > row_cap {
        return Err(Error::ResourceCap {
            what: "rows in an inversion-minimal search",
            value: k as u128,
            limit: row_cap as u128,
        });
    }
    let mut sorted: Vec<Vec<usize>> = rows.to_vec();
    sorted.sort();
    if k <= 1 {
        let matrix = LevelMatrix {
            level,
            rows: sorted,
        };
        let e = inversion_count(&matrix);
        return Ok((matrix, e));
    }

    // cost[a][b]: within-column inversions between rows a and b when a is
    // placed above b.
    let cost: Vec<Vec<u64>> = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| {
                    sorted[a]
                        .iter()
                        .zip(&sorted[b])
                        .filter(|(x, y)| y < x)
                        .count() as u64
                })
                .collect()
        })
        .collect();

    let full = (1usize << k) - 1;
    // best[placed]: minimum cost of arranging the rows not yet placed.
    let mut best = vec![0u64; 1 << k];
    for placed in (0..full).rev() {
        let mut value = u64::MAX;
        for x in (0..k).filter(|x| placed & (1 << x) == 0) {
            let below = (0..k)
                .filter(|&b| b != x && placed & (1 << b) == 0)
                .map(|b| cost[x][b])
                .sum::<u64>();
            value = value.min(below + best[placed | (1 << x)]);
        }
        best[placed] = value;
    }

    let mut order = Vec::with_capacity(k);
    let mut placed = 0usize;
    while placed != full {
        // rows are pre-sorted, so the first optimal choice is the
        // lexicographically smallest one
        let x = (0..k)
            .filter(|x| placed & (1 << x) == 0)
            .find(|&x| {
                let below = (0..k)
                    .filter(|&b| b != x && placed & (1 << b) == 0)
                    .map(|b| cost[x][b])
                    .sum::<u64>();
                below + best[placed | (1 << x)] == best[placed]
            })
            .expect("some choice attains the optimum");
        order.push(sorted[x].clone());
        placed |= 1 << x;
    }
    let matrix = LevelMatrix { level, rows: order };
    let e = inversion_count(&matrix);
    Ok((matrix, e))
}

fn revlex_rows(a: &[usize], b: &[usize]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        for k in (0..a.len()).rev() {
            if a[k] != b[k] {
                return b[k].cmp(&a[k]);
            }
        }
        Ordering::Equal
    })
}

/// Rows sorted descending by revlex. A quick arrangement, not guaranteed to
/// be inversion-minimal.
pub fn revlex_arrangement(level: usize, rows: &[Vec<usize>]) -> (LevelMatrix, u64) {
    let mut rows = rows.to_vec();
    rows.sort_by(|a, b| revlex_rows(b, a));
    let matrix = LevelMatrix { level, rows };
    let e = inversion_count(&matrix);
    (matrix, e)
}

/// `c_m`: for every entry, the number of entries on strictly higher levels
/// that are strictly smaller variables. Independent of row order.
pub fn comparability_number(m: &TMonomial, fam: &LeveledFamily) -> u64 {
    let n = fam.variables();
    // above[i]: number of entries with index i on the levels already visited
    let mut above = vec![0u64; n + 1];
    let mut c = 0u64;
    for level in fam.level_numbers().rev() {
        let entries: Vec<usize> = m
            .level_factors(level)
            .flat_map(|r| fam.generator(r).factors())
            .collect();
        for &x in &entries {
            c += above[x + 1..].iter().sum::<u64>();
        }
        for &x in &entries {
            above[x] += 1;
        }
    }
    c
}

/// `(c_m, e_m)` with the default row cap.
pub fn reduction_level(m: &TMonomial, fam: &LeveledFamily) -> Result<ReductionMeasure> {
    reduction_level_with_cap(m, fam, DEFAULT_ROW_CAP)
}

pub fn reduction_level_with_cap(
    m: &TMonomial,
    fam: &LeveledFamily,
    row_cap: usize,
) -> Result<ReductionMeasure> {
    m.check(fam)?;
    let mut e = 0;
    for level in fam.level_numbers() {
        let rows = level_rows(m, fam, level);
        e += inversion_minimal(level, &rows, row_cap)?.1;
    }
    Ok(ReductionMeasure {
        c: comparability_number(m, fam),
        e,
    })
}

/// Inversion-minimal matrices for every level of `m`.
pub fn minimal_matrices(
    m: &TMonomial,
    fam: &LeveledFamily,
    row_cap: usize,
) -> Result<Vec<(LevelMatrix, u64)>> {
    fam.level_numbers()
        .map(|level| inversion_minimal(level, &level_rows(m, fam, level), row_cap))
        .collect()
}
