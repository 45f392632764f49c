//! The generic learner over an explicit table: all threshold labelings of a
//! one-dimensional sample. Rounds stay below `⌈log_1.5 m⌉`.

use regionq::general::{general_query_learn, round_bound, HypothesisTable};
use regionq::target::{AxisBox, Bound};
use regionq::{EmptyPolicy, Oracle, PointSet, Target};

fn main() -> regionq::Result<()> {
    let xs: Vec<f64> = (0..40).map(|i| ((i * 17) % 40) as f64 / 4.0).collect();
    let sample = PointSet::from_scalars(&xs);
    let table = HypothesisTable::thresholds_over(&sample);
    let target = Target::axis_box(AxisBox::new(vec![Bound { lo: 6.3, hi: f64::INFINITY }])?);
    let mut oracle = Oracle::on_sample(target.clone(), &sample, EmptyPolicy::AlwaysOne, 0)?;
    let res = general_query_learn(&sample, &table, &mut oracle)?;
    let truth: Vec<_> = sample.iter().map(|x| target.label(x)).collect();
    println!(
        "hypotheses={} queries={} rounds={} bound={}",
        table.len(),
        res.queries_used,
        res.rounds,
        round_bound(table.len())
    );
    println!("correct={}", res.is_sound(&truth) && res.is_complete());
    Ok(())
}
