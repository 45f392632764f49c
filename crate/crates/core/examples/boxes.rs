//! Recover an axis-parallel box in a few dimensions and print the estimate.

use regionq::boxes::{box_query_cap, label_box_with_estimate};
use regionq::harness::{generate_instance, InstanceKind, InstanceParams};
use regionq::{EmptyPolicy, Oracle};

fn main() -> regionq::Result<()> {
    let n = 2000;
    for d in [1, 2, 4] {
        let params = InstanceParams { d, ..InstanceParams::new(InstanceKind::Box, n) };
        let inst = generate_instance(&params, 11)?;
        let mut oracle = Oracle::on_sample(inst.target.clone(), &inst.sample, EmptyPolicy::AlwaysOne, 0)?;
        let (res, est) = label_box_with_estimate(&inst.sample, &mut oracle)?;
        println!("d={d} queries={} cap={} complete={}", res.queries_used, box_query_cap(d, n), res.is_complete());
        println!("  target {:?}", inst.target);
        println!("  found  {est:?}");
    }
    Ok(())
}
