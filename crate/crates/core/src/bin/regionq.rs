use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::json;

use regionq::boxes::label_box;
use regionq::forster::{forster_transform, isotropy_check, margin_fraction};
use regionq::general::{general_query_learn, HypothesisTable};
use regionq::harness::{draw_target, fit_log_slope, run_benchmark, write_rows, ExperimentConfig, InstanceKind};
use regionq::intervals::label_k_intervals;
use regionq::io::{read_dataset, read_hypothesis_table, read_json, write_json, write_transcript};
use regionq::lower_bound::{
    low_intersection_family, run_lower_bound_experiment, standard_query_family, CoverageLearner,
};
use regionq::ltf::learning_ltf_report;
use regionq::oracle::RegionQuery;
use regionq::point::normalized;
use regionq::sdl::randomized_svm_learn;
use regionq::target::FiniteLabeling;
use regionq::teaching::{teaching_tree_depth, TeachingInstance};
use regionq::vc::{axis_halfspace_family, interval_family, shattering_witness, singleton_family};
use regionq::{EmptyPolicy, Error, LearnResult, Oracle, PointSet, Result, Sign, Target};

#[derive(Parser)]
#[command(name = "regionq", version, about = "Active learning with region queries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Label a dataset with one of the learners.
    Learn(LearnArgs),
    /// Run a benchmark sweep from a TOML config and write CSV rows.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Overrides `out` from the config; stdout when neither is set.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the spiked-family experiment against the block-coverage learner.
    Lowerbound {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        gamma: usize,
        #[arg(long, default_value_t = 300)]
        trials: usize,
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of sets to construct.
        #[arg(long, default_value_t = 100)]
        sets: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest shattered subset of a probe set.
    Vc {
        #[arg(long, value_enum)]
        family: VcFamily,
        /// Probe points, dataset CSV.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_k: usize,
    },
    /// Depth of the shallowest teaching tree for a JSON instance.
    Teachtree {
        #[arg(long)]
        input: PathBuf,
    },
    /// Forster-transform a dataset and check isotropy and the margin share.
    ForsterCheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        directions: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum LearnKind {
    Intervals,
    Box,
    Halfspace,
    HalfspaceSdl,
    General,
}

#[derive(Copy, Clone, ValueEnum)]
enum VcFamily {
    Intervals,
    AxisHalfspaces,
    Singletons,
}

#[derive(Args)]
struct LearnArgs {
    #[arg(value_enum)]
    kind: LearnKind,
    /// Sample, CSV with header `id,x1,...,xd`.
    #[arg(long)]
    input: PathBuf,
    /// Hidden target as JSON; drawn at random from `--seed` when absent.
    #[arg(long)]
    target: Option<PathBuf>,
    /// Extra labeling-domain points beyond the sample (same CSV format).
    #[arg(long)]
    domain: Option<PathBuf>,
    /// Hypothesis table CSV for `general`; threshold labelings when absent.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Unlabeled share allowed for `halfspace`; `1/(2n)` when absent.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value = "seeded_random")]
    policy: EmptyPolicy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    oracle_seed: u64,
    #[arg(long, default_value_t = 0)]
    init_seed: u64,
    #[arg(long, default_value_t = 0)]
    perm_seed: u64,
    /// Stop with an error after this many queries.
    #[arg(long)]
    budget: Option<usize>,
    /// Predictions CSV `id,label`; stdout summary only when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Query transcript as JSON lines.
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Per-round JSON diagnostics (`halfspace` only).
    #[arg(long)]
    diagnostics: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
struct TeachTreeFile {
    points: Vec<Vec<f64>>,
    /// One row of ±1 per hypothesis.
    table: Vec<Vec<Sign>>,
    queries: Vec<RegionQuery>,
    partial: Vec<Option<Sign>>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// `Ok(false)` signals an invariant violation.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Learn(args) => learn(args),
        Command::Bench { config, jobs, out } => bench(&config, jobs, out),
        Command::Lowerbound { k, gamma, trials, budget, seed, sets, out } => {
            let fam = low_intersection_family(k, gamma, sets, seed)?;
            let queries = standard_query_family(&fam);
            let learner = CoverageLearner { block: gamma.max(1) };
            let rep = run_lower_bound_experiment(&learner, &queries, &fam, trials, budget, seed)?;
            let value = json!({
                "achieved_N": rep.achieved_n,
                "gamma_verified": rep.gamma_verified,
                "error_frequency": rep.error_frequency,
                "coverage_histogram": rep.coverage_histogram,
                "replay_mismatches": rep.replay_mismatches,
                "off_family_queries": rep.off_family_queries,
                "k": rep.k,
                "gamma": rep.gamma,
                "ground_size": rep.ground_size,
                "trials": rep.trials,
                "budget": rep.budget,
            });
            emit_json(out.as_deref(), &value)?;
            Ok(rep.gamma_verified <= gamma && rep.replay_mismatches == 0 && rep.off_family_queries == 0)
        }
        Command::Vc { family, input, max_k } => {
            let probes = read_dataset(input)?;
            let regions = match family {
                VcFamily::Intervals => interval_family(&probes),
                VcFamily::AxisHalfspaces => axis_halfspace_family(&probes),
                VcFamily::Singletons => singleton_family(&probes),
            };
            let w = shattering_witness(&regions, &probes, max_k)?;
            let value = match w {
                Some(s) => json!({"vc_dimension": s.subset.len(), "shattered": s.subset}),
                None => json!({"vc_dimension": 0, "shattered": []}),
            };
            emit_json(None, &value)?;
            Ok(true)
        }
        Command::Teachtree { input } => {
            let file: TeachTreeFile = read_json(input)?;
            let inst = TeachingInstance {
                table: HypothesisTable::new(&file.table)?,
                points: PointSet::from_rows(&file.points)?,
                queries: file.queries,
                partial: file.partial,
            };
            let depth = teaching_tree_depth(&inst)?;
            emit_json(None, &json!({"depth": depth}))?;
            Ok(true)
        }
        Command::ForsterCheck { input, seed, directions, out } => forster_check(&input, seed, directions, out),
    }
}

fn learn(args: LearnArgs) -> Result<bool> {
    let sample = read_dataset(&args.input)?;
    let domain = match &args.domain {
        Some(p) => sample.union(&read_dataset(p)?)?,
        None => sample.clone(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let table = match args.kind {
        LearnKind::General => Some(match &args.table {
            Some(p) => read_hypothesis_table(p)?,
            None => HypothesisTable::thresholds_over(&sample),
        }),
        _ => None,
    };
    let target = match (&args.target, &table) {
        (Some(p), _) => read_json::<Target>(p)?,
        (None, Some(t)) => {
            let row = t.row(rng.random_range(0..t.len()));
            Target::Finite { labeling: FiniteLabeling::new(sample.to_rows(), row)?, default: Sign::Neg }
        }
        (None, None) => {
            let kind = match args.kind {
                LearnKind::Intervals => InstanceKind::Intervals,
                LearnKind::Box => InstanceKind::Box,
                _ => InstanceKind::Halfspace,
            };
            draw_target(kind, args.k, &sample, &mut rng)?
        }
    };
    let mut oracle = Oracle::new(target, domain, &sample, args.policy, args.oracle_seed)?;
    if let Some(b) = args.budget {
        oracle = oracle.with_budget(b);
    }
    let n = sample.len();
    let mut alpha_floor = 1.0;
    let result: LearnResult = match args.kind {
        LearnKind::Intervals => label_k_intervals(&sample, &mut oracle)?,
        LearnKind::Box => label_box(&sample, &mut oracle)?,
        LearnKind::HalfspaceSdl => randomized_svm_learn(&sample, &mut oracle, args.perm_seed)?,
        LearnKind::General => general_query_learn(&sample, table.as_ref().expect("table is set"), &mut oracle)?,
        LearnKind::Halfspace => {
            let alpha = args.alpha.unwrap_or(1.0 / (2.0 * n as f64));
            alpha_floor = 1.0 - alpha;
            let (r, rep) = learning_ltf_report(&sample, alpha, &mut oracle, args.init_seed)?;
            if let Some(p) = &args.diagnostics {
                write_json(p, &rep.rounds)?;
            }
            r
        }
    };

    let truth: Vec<Sign> = sample.iter().map(|x| oracle.target().label(x)).collect();
    let sound = result.is_sound(&truth);
    let enough = result.labeled() as f64 >= alpha_floor * n as f64;
    if let Some(p) = &args.transcript {
        write_transcript(File::create(p)?, oracle.transcript())?;
    }
    if let Some(p) = &args.out {
        let mut w = csv::Writer::from_path(p)?;
        w.write_record(["id", "label"])?;
        for (id, y) in result.predictions.iter().enumerate() {
            let label = y.map_or(String::new(), |s| s.to_i8().to_string());
            w.write_record([id.to_string(), label])?;
        }
        w.flush()?;
    }
    emit_json(
        None,
        &json!({
            "n": n,
            "queries_used": result.queries_used,
            "rounds": result.rounds,
            "labeled": result.labeled(),
            "correct_fraction": result.correct_fraction(&truth),
            "sound": sound,
        }),
    )?;
    Ok(sound && enough)
}

fn bench(config: &Path, jobs: usize, out: Option<PathBuf>) -> Result<bool> {
    let cfg = ExperimentConfig::load(config)?;
    let rows = run_benchmark(&cfg, jobs)?;
    match out.or(cfg.out.clone()) {
        Some(p) => write_rows(File::create(p)?, &rows)?,
        None => write_rows(io::stdout().lock(), &rows)?,
    }
    let distinct_n = {
        let mut v = cfg.n.clone();
        v.sort_unstable();
        v.dedup();
        v.len()
    };
    if distinct_n >= 3 {
        for ((k, d), fit) in fit_log_slope(&rows, |r| (r.k, r.d))? {
            eprintln!("k={k} d={d}: slope {:.3} intercept {:.3} r2 {:.4}", fit.slope, fit.intercept, fit.r2);
        }
    }
    let failed = rows.iter().filter(|r| !r.error.is_empty() || !r.sound).count();
    if failed > 0 {
        eprintln!("{failed} of {} rows failed or emitted a wrong label", rows.len());
    }
    Ok(failed == 0)
}

fn forster_check(input: &Path, seed: u64, directions: usize, out: Option<PathBuf>) -> Result<bool> {
    let sample = read_dataset(input)?;
    if sample.is_empty() {
        return Err(Error::InvalidInput("empty dataset".into()));
    }
    let fr = forster_transform(&sample)?;
    let k = fr.subspace_dim();
    let isotropic = isotropy_check(&fr.transformed_points, fr.eps)?;
    let gamma = 1.0 / (2.0 * (k as f64).sqrt());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let min_share = (0..directions)
        .map(|_| {
            let u: Vec<f64> = (0..k).map(|_| StandardNormal.sample(&mut rng)).collect();
            margin_fraction(&fr.transformed_points, &normalized(&u), gamma)
        })
        .fold(f64::INFINITY, f64::min);
    let floor = 1.0 / (4.0 * k as f64);
    let value = json!({
        "n": sample.len(),
        "subspace_dim": k,
        "kept": fr.kept_ids.len(),
        "iterations": fr.iterations,
        "eps": fr.eps,
        "isotropic": isotropic,
        "min_margin_share": min_share,
        "margin_share_floor": floor,
    });
    emit_json(out.as_deref(), &value)?;
    Ok(isotropic && min_share >= floor)
}

fn emit_json(path: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    match path {
        Some(p) => write_json(p, value),
        None => {
            let mut w = io::stdout().lock();
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)?;
            Ok(())
        }
    }
}
