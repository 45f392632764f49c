//! Minimum-depth query trees that separate the extensions of a partial
//! labeling from the rest of a tiny hypothesis table.
//!
//! Queries are evaluated with the labeling domain equal to the sample: a
//! query `(T, z)` answers 1 on hypothesis `h` iff `h(x) = z` for every sample
//! point `x` in `T`. A query whose region holds no sample point answers 1.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::general::HypothesisTable;
use crate::oracle::RegionQuery;
use crate::point::{PointSet, Sign};

/// Largest table and query list handled by the exhaustive search.
pub const MAX_HYPOTHESES: usize = 16;
pub const MAX_QUERIES: usize = 16;

#[derive(Clone, Debug)]
pub struct TeachingInstance {
    pub table: HypothesisTable,
    pub points: PointSet,
    pub queries: Vec<RegionQuery>,
    /// `partial[id]` is the fixed label of point `id`, if any.
    pub partial: Vec<Option<Sign>>,
}

impl TeachingInstance {
    fn validate(&self) -> Result<()> {
        let n = self.points.len();
        if self.table.num_points() != n || self.partial.len() != n {
            return Err(Error::InvalidInput("table, points and partial labeling disagree on size".into()));
        }
        if self.table.len() > MAX_HYPOTHESES {
            return Err(Error::TooLarge(format!("{} hypotheses (at most {MAX_HYPOTHESES})", self.table.len())));
        }
        if self.queries.len() > MAX_QUERIES {
            return Err(Error::TooLarge(format!("{} queries (at most {MAX_QUERIES})", self.queries.len())));
        }
        Ok(())
    }

    /// For each query, the bitmask of hypotheses it answers 1 on.
    pub fn answer_masks(&self) -> Result<Vec<u32>> {
        self.validate()?;
        let mut masks = Vec::with_capacity(self.queries.len());
        for q in &self.queries {
            let mut inside = Vec::new();
            for (id, x) in self.points.iter().enumerate() {
                if q.region.contains(x)? {
                    inside.push(id);
                }
            }
            let mut mask = 0u32;
            for h in 0..self.table.len() {
                if inside.iter().all(|&id| self.table.label(h, id) == q.label) {
                    mask |= 1 << h;
                }
            }
            masks.push(mask);
        }
        Ok(masks)
    }

    /// Bitmask of the rows extending the partial labeling.
    pub fn extensions(&self) -> u32 {
        let mut mask = 0u32;
        for h in 0..self.table.len() {
            let agrees = self.partial.iter().enumerate().all(|(id, f)| f.is_none_or(|s| self.table.label(h, id) == s));
            if agrees {
                mask |= 1 << h;
            }
        }
        mask
    }

    pub fn full_mask(&self) -> u32 {
        if self.table.len() == 32 {
            u32::MAX
        } else {
            (1u32 << self.table.len()) - 1
        }
    }
}

/// Whether a hypothesis set needs no further queries.
pub fn is_leaf(set: u32, extensions: u32) -> bool {
    set & extensions == 0 || set & !extensions == 0
}

/// Depth of the shallowest teaching tree, or `None` if the queries cannot
/// separate the extensions from the other rows.
pub fn teaching_tree_depth(inst: &TeachingInstance) -> Result<Option<usize>> {
    let masks = inst.answer_masks()?;
    let ext = inst.extensions();
    let mut memo = HashMap::new();
    Ok(depth(inst.full_mask(), ext, &masks, &mut memo))
}

fn depth(set: u32, ext: u32, masks: &[u32], memo: &mut HashMap<u32, Option<usize>>) -> Option<usize> {
    if is_leaf(set, ext) {
        return Some(0);
    }
    if let Some(&d) = memo.get(&set) {
        return d;
    }
    let mut best: Option<usize> = None;
    for &m in masks {
        let (yes, no) = (set & m, set & !m);
        // a query that does not split the set only adds depth
        if yes == 0 || no == 0 {
            continue;
        }
        let Some(a) = depth(yes, ext, masks, memo) else { continue };
        let Some(b) = depth(no, ext, masks, memo) else { continue };
        let d = a.max(b) + 1;
        if best.is_none_or(|cur| d < cur) {
            best = Some(d);
        }
    }
    memo.insert(set, best);
    best
}
