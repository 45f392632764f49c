//! Run a small sweep from an inline TOML config and fit queries against log₂ n.

use regionq::harness::{fit_log_slope, run_benchmark, write_rows, ExperimentConfig};

const CONFIG: &str = r#"
learner = "intervals"
n = [128, 256, 512, 1024]
k = [1, 4]
trials = 5
instance_seed = 1
oracle_seed = 2
"#;

fn main() -> regionq::Result<()> {
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    let rows = run_benchmark(&cfg, 1)?;
    write_rows(std::io::stdout(), &rows[..4])?;
    for (k, fit) in fit_log_slope(&rows, |r| r.k)? {
        println!("k={k}: {:.2} queries per doubling (r2 {:.3})", fit.slope, fit.r2);
    }
    Ok(())
}
