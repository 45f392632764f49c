//! Build a low-intersection set family, pick a set no query witnesses, and
//! watch a coverage learner fail on its spiked family.

use regionq::lower_bound::{
    ground_size_for, low_intersection_family, pairwise_intersection_max, run_lower_bound_experiment,
    standard_query_family, CoverageLearner,
};

fn main() -> regionq::Result<()> {
    // a budget of k/(2γ) queries cannot cover the target set
    let (k, gamma) = (32, 4);
    let fam = low_intersection_family(k, gamma, 100, 1)?;
    println!(
        "ground={} sets={} max pairwise intersection={}",
        ground_size_for(k),
        fam.len(),
        pairwise_intersection_max(&fam)
    );
    let queries = standard_query_family(&fam);
    let learner = CoverageLearner { block: gamma };
    let report = run_lower_bound_experiment(&learner, &queries, &fam, 200, k / (2 * gamma), 2)?;
    println!(
        "target set {} error frequency {:.3} coverage {:?} replay mismatches {}",
        report.target_index, report.error_frequency, report.coverage_histogram, report.replay_mismatches
    );
    Ok(())
}
