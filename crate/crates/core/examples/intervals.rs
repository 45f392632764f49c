//! Label a sample under a union of three intervals and compare the query
//! count with the cap `2(2k+1)(⌈log₂ n⌉ + 2)`.

use regionq::harness::{generate_instance, InstanceKind, InstanceParams};
use regionq::intervals::{interval_query_cap, label_k_intervals};
use regionq::{EmptyPolicy, Oracle};

fn main() -> regionq::Result<()> {
    let k = 3;
    for n in [64, 512, 4096] {
        let params = InstanceParams { k, ..InstanceParams::new(InstanceKind::Intervals, n) };
        let inst = generate_instance(&params, 7)?;
        let mut oracle = Oracle::on_sample(inst.target.clone(), &inst.sample, EmptyPolicy::SeededRandom, 1)?;
        let res = label_k_intervals(&inst.sample, &mut oracle)?;
        println!(
            "n={n:5} queries={:4} cap={:4} sound={}",
            res.queries_used,
            interval_query_cap(k, n),
            res.is_sound(&inst.truth())
        );
    }
    Ok(())
}
