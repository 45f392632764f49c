//! Labeling a sample on the line when the target is a union of intervals.
//!
//! Every query is a closed interval starting at the leftmost unlabeled sample
//! point, so no query is ever empty and the answers do not depend on which
//! superset of the sample the labeler uses.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::oracle::{LearnResult, Oracle};
use crate::point::{PointSet, Sign};
use crate::region::Region;

/// Prefix queries `[values[0], values[i]]` with a per-call answer cache.
struct Prefixes<'a> {
    values: &'a [f64],
    cache: HashMap<(usize, Sign), bool>,
}

impl<'a> Prefixes<'a> {
    fn ask(&mut self, oracle: &mut Oracle, last: usize, sign: Sign) -> Result<bool> {
        if let Some(&a) = self.cache.get(&(last, sign)) {
            return Ok(a);
        }
        let a = oracle.ask(Region::Interval { lo: self.values[0], hi: self.values[last] }, sign)?;
        self.cache.insert((last, sign), a);
        Ok(a)
    }

    /// The label shared by the whole prefix, or `None` if it is mixed.
    fn pure_sign(&mut self, oracle: &mut Oracle, last: usize) -> Result<Option<Sign>> {
        for sign in Sign::BOTH {
            if self.ask(oracle, last, sign)? {
                return Ok(Some(sign));
            }
        }
        Ok(None)
    }

    /// Sign of a prefix already known to be pure.
    fn known_sign(&self, last: usize) -> Option<Sign> {
        Sign::BOTH.into_iter().find(|&s| self.cache.get(&(last, s)) == Some(&true))
    }
}

/// Length of the longest constant-label prefix of `sorted`, and its label.
///
/// `sorted` must be ascending. Uses at most `2⌈log₂ m⌉ + 3` queries, the last
/// of which is only spent when the search ends on the first point without
/// having seen its label.
pub fn find_left(sorted: &[f64], oracle: &mut Oracle) -> Result<(usize, Sign)> {
    let m = sorted.len();
    if m == 0 {
        return Err(Error::InvalidInput("find_left needs a nonempty sample".into()));
    }
    if sorted.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidInput("find_left needs ascending values".into()));
    }
    let mut p = Prefixes { values: sorted, cache: HashMap::new() };
    if let Some(y) = p.pure_sign(oracle, m - 1)? {
        return Ok((m, y));
    }
    // candidates are the index range [lo, hi]
    let (mut lo, mut hi) = (0usize, m - 1);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        match p.pure_sign(oracle, mid)? {
            None => hi = mid - 1,
            Some(_) => lo = mid,
        }
    }
    let y = match p.known_sign(lo) {
        Some(y) => y,
        None => Sign::from_bool(p.ask(oracle, lo, Sign::Pos)?),
    };
    Ok((lo + 1, y))
}

/// Label every point of a 1-D sample.
pub fn label_k_intervals(sample: &PointSet, oracle: &mut Oracle) -> Result<LearnResult> {
    if sample.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: sample.dim() });
    }
    let start = oracle.queries();
    let order = sample.lexicographic_order();
    let values: Vec<f64> = order.iter().map(|&i| sample.point(i)[0]).collect();
    let mut predictions = vec![None; sample.len()];
    let mut offset = 0;
    let mut rounds = 0;
    while offset < values.len() {
        let (len, y) = find_left(&values[offset..], oracle)?;
        for &id in &order[offset..offset + len] {
            predictions[id] = Some(y);
        }
        offset += len;
        rounds += 1;
    }
    Ok(LearnResult { predictions, queries_used: oracle.queries() - start, rounds })
}

/// Query cap for `k` intervals over `n` points: `2(2k+1)(⌈log₂ n⌉ + 2)`.
pub fn interval_query_cap(k: usize, n: usize) -> usize {
    2 * (2 * k + 1) * (ceil_log2(n) + 2)
}

pub(crate) fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::EmptyPolicy;
    use crate::target::{Target, UnionOfIntervals};

    fn oracle_for(values: &[f64], ivs: Vec<[f64; 2]>) -> (PointSet, Oracle) {
        let s = PointSet::from_scalars(values);
        let t = Target::intervals(UnionOfIntervals::new(ivs).unwrap());
        let o = Oracle::on_sample(t, &s, EmptyPolicy::SeededRandom, 1).unwrap();
        (s, o)
    }

    #[test]
    fn whole_set_pure() {
        let (_, mut o) = oracle_for(&[1.0, 2.0], vec![[5.0, 6.0]]);
        assert_eq!(find_left(&[1.0, 2.0], &mut o).unwrap(), (2, Sign::Neg));
        assert_eq!(o.queries(), 2);
    }

    #[test]
    fn boundary_after_two() {
        let (_, mut o) = oracle_for(&[1.0, 2.0, 3.0, 4.0], vec![[2.5, 5.0]]);
        assert_eq!(find_left(&[1.0, 2.0, 3.0, 4.0], &mut o).unwrap(), (2, Sign::Neg));
        assert!(o.queries() <= 2 * 2 + 3);
    }

    #[test]
    fn single_point_prefix() {
        let (_, mut o) = oracle_for(&[1.0, 2.0, 3.0], vec![[0.5, 1.5], [2.5, 3.5]]);
        assert_eq!(find_left(&[1.0, 2.0, 3.0], &mut o).unwrap(), (1, Sign::Pos));
    }

    #[test]
    fn rejects_bad_input() {
        let (_, mut o) = oracle_for(&[1.0], vec![[0.0, 2.0]]);
        assert!(find_left(&[], &mut o).is_err());
        assert!(find_left(&[2.0, 1.0], &mut o).is_err());
    }

    #[test]
    fn one_interval_covering_everything() {
        let (s, mut o) = oracle_for(&[0.1, 0.2, 0.3], vec![[0.0, 1.0]]);
        let r = label_k_intervals(&s, &mut o).unwrap();
        assert_eq!(r.predictions, vec![Some(Sign::Pos); 3]);
        assert!(r.queries_used <= 3);
    }

    #[test]
    fn alternating_blocks_with_duplicates() {
        let vals = [3.0, 1.0, 1.0, 2.0, 5.0, 4.0, 4.0, 6.0];
        let ivs = vec![[0.5, 1.5], [3.5, 4.5], [5.5, 7.0]];
        let (s, mut o) = oracle_for(&vals, ivs.clone());
        let truth: Vec<Sign> = s.iter().map(|x| o.target().label(x)).collect();
        let r = label_k_intervals(&s, &mut o).unwrap();
        assert_eq!(r.correct_fraction(&truth), 1.0);
        assert!(r.queries_used <= interval_query_cap(3, vals.len()));
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(64), 6);
        assert_eq!(ceil_log2(65), 7);
    }
}
