//! Randomized max-margin learner on points from the sphere: queries grow
//! roughly like `d² log n`.

use regionq::harness::{generate_instance, InstanceKind, InstanceParams};
use regionq::sdl::randomized_svm_learn;
use regionq::{EmptyPolicy, Oracle};

fn main() -> regionq::Result<()> {
    for d in [2, 3] {
        for n in [100, 400, 1600] {
            let params = InstanceParams { d, ..InstanceParams::new(InstanceKind::Halfspace, n) };
            let inst = generate_instance(&params, 3)?;
            let mut oracle = Oracle::on_sample(inst.target.clone(), &inst.sample, EmptyPolicy::AlwaysOne, 0)?;
            let res = randomized_svm_learn(&inst.sample, &mut oracle, 5)?;
            println!("d={d} n={n:5} queries={:4} sound={}", res.queries_used, res.is_sound(&inst.truth()));
        }
    }
    Ok(())
}
