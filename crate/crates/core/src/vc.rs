//! Brute-force shattering checks over a small probe set.
//!
//! The result is a lower bound on the VC dimension of the region family: it
//! only looks at the given probe points.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::point::PointSet;
use crate::region::{Region, Sense};

/// Largest probe set this module will enumerate.
pub const MAX_PROBES: usize = 20;

/// A shattered subset and, for every dichotomy, a region realizing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shattering {
    /// Probe ids of the shattered subset.
    pub subset: Vec<usize>,
    /// `witnesses[mask]` is a family index whose region contains exactly the
    /// subset members selected by the bits of `mask`.
    pub witnesses: Vec<usize>,
}

fn patterns(family: &[Region], probes: &PointSet) -> Result<Vec<u32>> {
    family
        .iter()
        .map(|r| {
            let mut bits = 0u32;
            for (i, x) in probes.iter().enumerate() {
                if r.contains(x)? {
                    bits |= 1 << i;
                }
            }
            Ok(bits)
        })
        .collect()
}

fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = u32> {
    (0u32..(1u32 << n)).filter(move |m| m.count_ones() as usize == k)
}

fn shatters(pats: &[u32], subset: u32) -> bool {
    let seen: HashSet<u32> = pats.iter().map(|p| p & subset).collect();
    seen.len() == 1usize << subset.count_ones()
}

/// The largest `k <= max_k` such that some `k`-subset of `probes` is
/// shattered by `family`. Exhaustive over subsets and dichotomies.
pub fn empirical_vc_dimension(family: &[Region], probes: &PointSet, max_k: usize) -> Result<usize> {
    Ok(shattering_witness(family, probes, max_k)?.map_or(0, |s| s.subset.len()))
}

/// A witness for [`empirical_vc_dimension`]; `None` for an empty family.
pub fn shattering_witness(family: &[Region], probes: &PointSet, max_k: usize) -> Result<Option<Shattering>> {
    let n = probes.len();
    if n > MAX_PROBES {
        return Err(Error::TooLarge(format!("{n} probe points (at most {MAX_PROBES})")));
    }
    if family.is_empty() {
        return Ok(None);
    }
    let pats = patterns(family, probes)?;
    let mut best = 0u32;
    // shattering is hereditary, so the first size with no shattered subset ends the search
    for k in 1..=max_k.min(n) {
        match subsets_of_size(n, k).find(|&s| shatters(&pats, s)) {
            Some(s) => best = s,
            None => break,
        }
    }
    let subset: Vec<usize> = (0..n).filter(|i| best >> i & 1 == 1).collect();
    let mut witnesses = Vec::with_capacity(1 << subset.len());
    for mask in 0..(1u32 << subset.len()) {
        let mut want = 0u32;
        for (b, &i) in subset.iter().enumerate() {
            if mask >> b & 1 == 1 {
                want |= 1 << i;
            }
        }
        let idx = pats.iter().position(|p| p & best == want).expect("shattered subset realizes every dichotomy");
        witnesses.push(idx);
    }
    Ok(Some(Shattering { subset, witnesses }))
}

/// Re-check a witness by evaluating each region on the subset members.
pub fn verify_shattering(family: &[Region], probes: &PointSet, w: &Shattering) -> Result<bool> {
    if w.witnesses.len() != 1 << w.subset.len() {
        return Ok(false);
    }
    for (mask, &idx) in w.witnesses.iter().enumerate() {
        for (b, &i) in w.subset.iter().enumerate() {
            if family[idx].contains(probes.point(i))? != (mask >> b & 1 == 1) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Cut points between consecutive distinct values, plus one beyond each end.
fn cuts(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    if v.is_empty() {
        return vec![0.0];
    }
    let mut out = vec![v[0] - 1.0];
    out.extend(v.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    out.push(v[v.len() - 1] + 1.0);
    out
}

/// Every closed interval with endpoints between consecutive probe values.
/// Realizes every membership pattern intervals can cut out of the probes.
pub fn interval_family(probes: &PointSet) -> Vec<Region> {
    let values: Vec<f64> = probes.iter().map(|x| x[0]).collect();
    let c = cuts(&values);
    let mut out = Vec::new();
    for i in 0..c.len() {
        for j in i..c.len() {
            out.push(Region::Interval { lo: c[i], hi: c[j] });
        }
    }
    out
}

/// Both senses of every coordinate threshold between probe values.
pub fn axis_halfspace_family(probes: &PointSet) -> Vec<Region> {
    let mut out = Vec::new();
    for coord in 0..probes.dim() {
        let values: Vec<f64> = probes.iter().map(|x| x[coord]).collect();
        for t in cuts(&values) {
            out.push(Region::axis(coord, Sense::Ge, t));
            out.push(Region::axis(coord, Sense::Le, t));
        }
    }
    out
}

/// One singleton region per probe point.
pub fn singleton_family(probes: &PointSet) -> Vec<Region> {
    probes.iter().map(|x| Region::finite(vec![x.to_vec()])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intervals_shatter_two_of_three() {
        let p = PointSet::from_scalars(&[1.0, 2.0, 3.0]);
        let fam = interval_family(&p);
        assert_eq!(empirical_vc_dimension(&fam, &p, 3).unwrap(), 2);
        let w = shattering_witness(&fam, &p, 3).unwrap().unwrap();
        assert!(verify_shattering(&fam, &p, &w).unwrap());
    }

    #[test]
    fn singletons_shatter_one_point() {
        let p = PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0, 2.0]]).unwrap();
        assert_eq!(empirical_vc_dimension(&singleton_family(&p), &p, 4).unwrap(), 1);
    }

    #[test]
    fn axis_halfspaces_on_a_grid() {
        let p = PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
        let fam = axis_halfspace_family(&p);
        let k = empirical_vc_dimension(&fam, &p, 4).unwrap();
        let w = shattering_witness(&fam, &p, 4).unwrap().unwrap();
        assert_eq!(w.subset.len(), k);
        assert!(verify_shattering(&fam, &p, &w).unwrap());
        // a pair on a diagonal is shattered, but no three grid points are
        assert_eq!(k, 2);
    }

    #[test]
    fn empty_family_and_max_k() {
        let p = PointSet::from_scalars(&[1.0, 2.0, 3.0]);
        assert_eq!(empirical_vc_dimension(&[], &p, 3).unwrap(), 0);
        assert_eq!(empirical_vc_dimension(&interval_family(&p), &p, 1).unwrap(), 1);
    }

    #[test]
    fn too_many_probes() {
        let p = PointSet::from_scalars(&(0..21).map(f64::from).collect::<Vec<_>>());
        assert!(empirical_vc_dimension(&interval_family(&p), &p, 2).is_err());
    }
}
