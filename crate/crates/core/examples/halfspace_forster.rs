//! Forster transform followed by the active perceptron, round by round.

use regionq::harness::{generate_instance, InstanceKind, InstanceParams};
use regionq::ltf::learning_ltf_report;
use regionq::{EmptyPolicy, Oracle};

fn main() -> regionq::Result<()> {
    let n = 1000;
    let params = InstanceParams { d: 3, ..InstanceParams::new(InstanceKind::Halfspace, n) };
    let inst = generate_instance(&params, 21)?;
    let mut oracle = Oracle::on_sample(inst.target.clone(), &inst.sample, EmptyPolicy::AlwaysOne, 0)?;
    let alpha = 1.0 / (2.0 * n as f64);
    let (res, report) = learning_ltf_report(&inst.sample, alpha, &mut oracle, 9)?;
    for (i, r) in report.rounds.iter().enumerate() {
        println!(
            "round {i}: k={} kept={} labeled={} queries={} redraws={}",
            r.k, r.kept, r.labeled, r.queries, r.redraws
        );
    }
    println!("total queries={} labeled={}/{n} sound={}", res.queries_used, res.labeled(), res.is_sound(&inst.truth()));
    Ok(())
}
