//! Learning an explicit finite hypothesis table with interval-restricted
//! hypothesis queries.
//!
//! Each round walks the sample in a fixed order, keeping the rows that agree
//! with the running majority vote, and stops at the first prefix where at most
//! two thirds of the table survives. The surviving block is tested with two
//! region queries; either answer removes at least a third of the table.

use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::oracle::{LearnResult, Oracle};
use crate::point::{PointSet, Sign};
use crate::region::Region;
use crate::target::FiniteLabeling;

/// Distinct sign vectors over a sample, bit-packed (bit set = `+1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisTable {
    points: usize,
    words: usize,
    bits: Vec<u64>,
}

impl HypothesisTable {
    pub fn new(rows: &[Vec<Sign>]) -> Result<HypothesisTable> {
        let points = rows.first().map_or(0, Vec::len);
        let words = points.div_ceil(64).max(1);
        let mut bits = vec![0u64; words * rows.len()];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != points {
                return Err(Error::InvalidInput(format!("row {r} has {} entries, expected {points}", row.len())));
            }
            for (j, s) in row.iter().enumerate() {
                if s.is_pos() {
                    bits[r * words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        let table = HypothesisTable { points, words, bits };
        let mut seen = HashSet::with_capacity(rows.len());
        for r in 0..table.len() {
            if !seen.insert(table.row_bits(r)) {
                return Err(Error::InvalidInput(format!("duplicate row {r}")));
            }
        }
        Ok(table)
    }

    /// All `n + 1` threshold labelings over positions `0..n`: row `t` is `-1`
    /// on the first `t` positions and `+1` afterwards.
    pub fn thresholds(n: usize) -> HypothesisTable {
        let words = n.div_ceil(64).max(1);
        let mut bits = vec![0u64; words * (n + 1)];
        for t in 0..=n {
            for j in t..n {
                bits[t * words + j / 64] |= 1 << (j % 64);
            }
        }
        HypothesisTable { points: n, words, bits }
    }

    /// Threshold labelings of `sample` along its lexicographic order.
    pub fn thresholds_over(sample: &PointSet) -> HypothesisTable {
        let order = sample.lexicographic_order();
        HypothesisTable::thresholds(sample.len()).permute_columns(&order)
    }

    pub fn len(&self) -> usize {
        self.bits.len().checked_div(self.words).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn num_points(&self) -> usize {
        self.points
    }

    fn row_bits(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }

    pub fn label(&self, row: usize, point: usize) -> Sign {
        Sign::from_bool(self.bits[row * self.words + point / 64] >> (point % 64) & 1 == 1)
    }

    pub fn row(&self, row: usize) -> Vec<Sign> {
        (0..self.points).map(|j| self.label(row, j)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<Sign>> {
        (0..self.len()).map(|r| self.row(r)).collect()
    }

    /// Index of the row equal to `labels`, if present.
    pub fn find(&self, labels: &[Sign]) -> Option<usize> {
        (0..self.len()).find(|&r| (0..self.points).all(|j| self.label(r, j) == labels[j]))
    }

    /// A table with the rows for which `keep` returns true.
    pub fn filter(&self, mut keep: impl FnMut(usize) -> bool) -> HypothesisTable {
        let mut bits = Vec::new();
        for r in 0..self.len() {
            if keep(r) {
                bits.extend_from_slice(self.row_bits(r));
            }
        }
        HypothesisTable { points: self.points, words: self.words, bits }
    }

    /// Column `new_pos[j]` of the result is column `j` of `self`.
    pub fn permute_columns(&self, new_pos: &[usize]) -> HypothesisTable {
        let mut bits = vec![0u64; self.bits.len()];
        for r in 0..self.len() {
            for (j, &p) in new_pos.iter().enumerate() {
                if self.label(r, j).is_pos() {
                    bits[r * self.words + p / 64] |= 1 << (p % 64);
                }
            }
        }
        HypothesisTable { points: self.points, words: self.words, bits }
    }

    /// Whether rows `a` and `b` agree on positions `0..prefix`.
    fn agree_on_prefix(&self, a: usize, b: usize, prefix: usize) -> bool {
        let (ra, rb) = (self.row_bits(a), self.row_bits(b));
        let full = prefix / 64;
        if ra[..full] != rb[..full] {
            return false;
        }
        let rest = prefix % 64;
        if rest == 0 {
            return true;
        }
        let mask = (1u64 << rest) - 1;
        (ra[full] ^ rb[full]) & mask == 0
    }
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (pos, &id) in perm.iter().enumerate() {
        inv[id] = pos;
    }
    inv
}

/// A prefix of the order that splits the table into balanced parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancedPrefix {
    /// Number of points in the prefix (at least 1).
    pub i_star: usize,
    /// A row of the final majority class.
    pub rep: usize,
    /// Rows agreeing with `rep` on the prefix.
    pub agreeing: usize,
}

/// Majority walk along `order` (a permutation of the table's point ids).
///
/// Ties go to `+1`. Returns the first prefix whose majority class holds at
/// most `2|H|/3` rows; that class then holds at least `|H|/3` rows.
pub fn find_balanced_prefix(table: &HypothesisTable, order: &[usize]) -> Result<BalancedPrefix> {
    let total = table.len();
    if total <= 1 {
        return Err(Error::InvalidInput("balanced prefix needs at least two rows".into()));
    }
    if order.len() != table.num_points() {
        return Err(Error::InvalidInput("order must list every point once".into()));
    }
    let mut class: Vec<usize> = (0..total).collect();
    for (i, &x) in order.iter().enumerate() {
        let positives = class.iter().filter(|&&r| table.label(r, x).is_pos()).count();
        let majority = Sign::from_bool(2 * positives >= class.len());
        class.retain(|&r| table.label(r, x) == majority);
        if 3 * class.len() <= 2 * total {
            return Ok(BalancedPrefix { i_star: i + 1, rep: class[0], agreeing: class.len() });
        }
    }
    // distinct rows always separate before the order runs out
    Err(Error::InvalidInput("table rows are not distinct on the order".into()))
}

/// Per-round trace of a [`general_query_learn`] run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GeneralTrace {
    /// Version-space size before the first round and after each round.
    pub version_sizes: Vec<usize>,
}

/// Label `sample` exactly, given that its true labeling is a row of `table`.
///
/// Requires the labeling domain to be the sample itself.
pub fn general_query_learn(sample: &PointSet, table: &HypothesisTable, oracle: &mut Oracle) -> Result<LearnResult> {
    general_query_learn_traced(sample, table, oracle).map(|(r, _)| r)
}

pub fn general_query_learn_traced(
    sample: &PointSet,
    table: &HypothesisTable,
    oracle: &mut Oracle,
) -> Result<(LearnResult, GeneralTrace)> {
    let n = sample.len();
    if table.num_points() != n {
        return Err(Error::InvalidInput(format!("table covers {} points, sample has {n}", table.num_points())));
    }
    if oracle.domain().len() != n {
        return Err(Error::InvalidInput("general learner needs labeling domain equal to the sample".into()));
    }
    if table.is_empty() {
        return Err(Error::EmptyVersionSpace);
    }
    let start = oracle.queries();
    let order = sample.lexicographic_order();
    let pos_of = inverse(&order);
    let ordered_points: Vec<Vec<f64>> = order.iter().map(|&id| sample.point(id).to_vec()).collect();
    // columns in order position, so prefixes are contiguous bit ranges
    let mut version = table.permute_columns(&pos_of);
    let identity: Vec<usize> = (0..n).collect();
    let mut trace = GeneralTrace { version_sizes: vec![version.len()] };
    let mut rounds = 0;

    while version.len() > 1 {
        let split = find_balanced_prefix(&version, &identity)?;
        let rep_labels = version.row(split.rep);
        let prefix = &rep_labels[..split.i_star];
        let g = Arc::new(FiniteLabeling::new(ordered_points.clone(), rep_labels.clone())?);
        let range = Some([0, split.i_star - 1]);

        let mut agrees = true;
        for sign in Sign::BOTH {
            // an empty part is vacuously consistent; asking it would invite an arbitrary answer
            if !prefix.contains(&sign) {
                continue;
            }
            let region = Region::HypothesisPositiveSet { hypothesis: Arc::clone(&g), sign, order_range: range };
            if !oracle.ask(region, sign)? {
                agrees = false;
                break;
            }
        }

        let rep = split.rep;
        let i_star = split.i_star;
        let snapshot = version.clone();
        version = snapshot.filter(|r| snapshot.agree_on_prefix(r, rep, i_star) == agrees);
        rounds += 1;
        trace.version_sizes.push(version.len());
        if version.is_empty() {
            return Err(Error::EmptyVersionSpace);
        }
    }

    let mut predictions = vec![None; n];
    for (pos, &id) in order.iter().enumerate() {
        predictions[id] = Some(version.label(0, pos));
    }
    let result = LearnResult { predictions, queries_used: oracle.queries() - start, rounds };
    Ok((result, trace))
}

/// `⌈log_{3/2} m⌉`, the round bound for a table of `m` rows.
pub fn round_bound(m: usize) -> usize {
    if m <= 1 {
        return 0;
    }
    let mut rounds = 0;
    let mut size = m as f64;
    while size > 1.0 + 1e-12 {
        size /= 1.5;
        rounds += 1;
    }
    rounds
}
