//! Brute-force shattering on a handful of probe points.

use regionq::vc::{axis_halfspace_family, empirical_vc_dimension, interval_family, singleton_family};
use regionq::PointSet;

fn main() -> regionq::Result<()> {
    let line = PointSet::from_scalars(&[0.0, 1.0, 2.0, 3.0, 4.0]);
    println!("intervals: {}", empirical_vc_dimension(&interval_family(&line), &line, 4)?);
    println!("singletons: {}", empirical_vc_dimension(&singleton_family(&line), &line, 4)?);
    let grid = PointSet::from_rows(&[[0.0, 0.0], [1.0, 2.0], [2.0, 1.0], [3.0, 3.0]])?;
    println!("axis halfspaces in 2d: {}", empirical_vc_dimension(&axis_halfspace_family(&grid), &grid, 4)?);
    Ok(())
}
