//! Minimum depth of a query tree that singles out the threshold labelings
//! agreeing with a partial labeling.

use regionq::general::HypothesisTable;
use regionq::teaching::{teaching_tree_depth, TeachingInstance};
use regionq::{PointSet, Region, RegionQuery, Sign};

fn main() -> regionq::Result<()> {
    let xs = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
    let points = PointSet::from_scalars(&xs);
    let table = HypothesisTable::thresholds(xs.len());
    let mut queries = Vec::new();
    for &x in &xs {
        for z in [Sign::Pos, Sign::Neg] {
            queries.push(RegionQuery::new(Region::interval(x - 0.5, 10.0)?, z));
        }
    }
    for fixed in [vec![], vec![(1, Sign::Neg)], vec![(1, Sign::Neg), (4, Sign::Pos)]] {
        let mut partial = vec![None; xs.len()];
        for &(id, s) in &fixed {
            partial[id] = Some(s);
        }
        let inst = TeachingInstance { table: table.clone(), points: points.clone(), queries: queries.clone(), partial };
        println!("fixed {fixed:?}: depth {:?}", teaching_tree_depth(&inst)?);
    }
    Ok(())
}
