//! Labeling a sample when the target is an axis-parallel box.
//!
//! Each face of the box is located by a binary search with axis-aligned
//! halfspace queries asking "is everything beyond this threshold negative?".

use crate::error::{Error, Result};
use crate::intervals::ceil_log2;
use crate::oracle::{LearnResult, Oracle};
use crate::point::{PointSet, Sign};
use crate::region::{Region, Sense};

/// The halfspace `{x : s·x[coord] >= b}` for direction `s·e_coord`.
fn beyond(coord: usize, dir: Sign, b: f64) -> Region {
    match dir {
        Sign::Pos => Region::axis(coord, Sense::Ge, b),
        Sign::Neg => Region::axis(coord, Sense::Le, -b),
    }
}

/// Boundary of the positive region along `dir · e_coord`.
///
/// For `dir = +1` returns the largest sample coordinate `v` whose halfspace
/// `{x[coord] >= v}` is not all negative, or `-inf` if the whole sample is
/// negative. For `dir = -1` returns the matching lower threshold, or `+inf`.
/// Uses at most `⌈log₂ n⌉ + 1` queries.
pub fn find_boundary(sample: &PointSet, coord: usize, dir: Sign, oracle: &mut Oracle) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::InvalidInput("find_boundary needs a nonempty sample".into()));
    }
    if coord >= sample.dim() {
        return Err(Error::DimensionMismatch { expected: coord + 1, got: sample.dim() });
    }
    let d = dir.to_f64();
    let mut vals: Vec<f64> = sample.iter().map(|x| d * x[coord]).collect();
    vals.sort_by(f64::total_cmp);
    vals.dedup();

    if oracle.ask(beyond(coord, dir, vals[0]), Sign::Neg)? {
        return Ok(-d * f64::INFINITY);
    }
    let (mut lo, mut hi) = (0usize, vals.len() - 1);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if oracle.ask(beyond(coord, dir, vals[mid]), Sign::Neg)? {
            hi = mid - 1;
        } else {
            lo = mid;
        }
    }
    Ok(d * vals[lo])
}

/// The estimated box `[lo_i, hi_i]` per coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxEstimate {
    pub bounds: Vec<[f64; 2]>,
}

impl BoxEstimate {
    pub fn contains(&self, x: &[f64]) -> bool {
        self.bounds.iter().zip(x).all(|(&[lo, hi], &v)| lo <= v && v <= hi)
    }
}

/// Label every sample point, predicting `+1` exactly inside the estimated box.
pub fn label_box(sample: &PointSet, oracle: &mut Oracle) -> Result<LearnResult> {
    label_box_with_estimate(sample, oracle).map(|(r, _)| r)
}

pub fn label_box_with_estimate(sample: &PointSet, oracle: &mut Oracle) -> Result<(LearnResult, BoxEstimate)> {
    let start = oracle.queries();
    if sample.is_empty() {
        return Ok((LearnResult::default(), BoxEstimate { bounds: Vec::new() }));
    }
    let mut bounds = Vec::with_capacity(sample.dim());
    for coord in 0..sample.dim() {
        let hi = find_boundary(sample, coord, Sign::Pos, oracle)?;
        let lo = find_boundary(sample, coord, Sign::Neg, oracle)?;
        bounds.push([lo, hi]);
    }
    let est = BoxEstimate { bounds };
    let predictions = sample.iter().map(|x| Some(Sign::from_bool(est.contains(x)))).collect();
    let result = LearnResult { predictions, queries_used: oracle.queries() - start, rounds: 2 * sample.dim() };
    Ok((result, est))
}

/// Query cap `2d(⌈log₂ n⌉ + 1)`.
pub fn box_query_cap(d: usize, n: usize) -> usize {
    2 * d * (ceil_log2(n) + 1)
}
