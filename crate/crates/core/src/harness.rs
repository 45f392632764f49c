//! Seeded instance generation, benchmark sweeps and scaling fits.
//!
//! A benchmark is described by an [`ExperimentConfig`] (TOML). Every row of
//! the output is a pure function of the config and the row's position in the
//! sweep, apart from `wall_time_ms`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boxes::label_box;
use crate::error::{Error, Result};
use crate::general::{general_query_learn, HypothesisTable};
use crate::intervals::label_k_intervals;
use crate::io::read_dataset;
use crate::ltf::learning_ltf;
use crate::oracle::{EmptyPolicy, LearnResult, Oracle};
use crate::point::{normalized, PointSet, Sign};
use crate::sdl::randomized_svm_learn;
use crate::target::{AxisBox, Bound, Target, UnionOfIntervals};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    Intervals,
    Box,
    /// Forster transform plus perceptron.
    Halfspace,
    /// Self-directed max-margin learner.
    HalfspaceSdl,
    /// Version-space halving over an explicit table.
    General,
}

impl LearnerKind {
    pub fn default_instance(self) -> InstanceKind {
        match self {
            LearnerKind::Intervals => InstanceKind::Intervals,
            LearnerKind::Box => InstanceKind::Box,
            LearnerKind::Halfspace | LearnerKind::HalfspaceSdl => InstanceKind::Halfspace,
            LearnerKind::General => InstanceKind::Finite,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::Intervals => "intervals",
            LearnerKind::Box => "box",
            LearnerKind::Halfspace => "halfspace",
            LearnerKind::HalfspaceSdl => "halfspace_sdl",
            LearnerKind::General => "general",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    /// Union of `k` intervals on the line.
    Intervals,
    /// Axis-parallel box in `d` dimensions.
    Box,
    /// Homogeneous halfspace in `d` dimensions.
    Halfspace,
    /// Thresholds on the line, with the full threshold table.
    Finite,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    /// Each coordinate uniform on `range`.
    #[default]
    Uniform,
    /// Uniform on the unit sphere.
    Sphere,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceParams {
    pub kind: InstanceKind,
    pub k: usize,
    pub d: usize,
    pub n: usize,
    /// Points of the labeling domain beyond the sample.
    pub extra: usize,
    pub distribution: Distribution,
    pub range: [f64; 2],
}

impl InstanceParams {
    pub fn new(kind: InstanceKind, n: usize) -> InstanceParams {
        InstanceParams {
            kind,
            k: 1,
            d: if kind == InstanceKind::Halfspace { 2 } else { 1 },
            n,
            extra: 0,
            distribution: if kind == InstanceKind::Halfspace { Distribution::Sphere } else { Distribution::Uniform },
            range: [-1.0, 1.0],
        }
    }
}

/// A sample, its target and the labeling domain `L ⊇ S`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub sample: PointSet,
    pub target: Target,
    pub domain: PointSet,
    /// Present for the finite kind: all threshold labelings of the sample.
    pub table: Option<HypothesisTable>,
}

impl Instance {
    pub fn truth(&self) -> Vec<Sign> {
        self.sample.iter().map(|x| self.target.label(x)).collect()
    }
}

fn draw_points(n: usize, d: usize, dist: Distribution, range: [f64; 2], rng: &mut ChaCha8Rng) -> PointSet {
    let mut set = PointSet::new(d);
    for _ in 0..n {
        let x: Vec<f64> = match dist {
            Distribution::Uniform => (0..d).map(|_| rng.random_range(range[0]..range[1])).collect(),
            Distribution::Sphere => random_unit(d, rng),
        };
        set.push(&x).expect("dimension is fixed");
    }
    set
}

fn random_unit(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        if v.iter().any(|&x| x != 0.0) {
            return normalized(&v);
        }
    }
}

/// A random target of `kind` fitted to the extent of `sample`.
pub fn draw_target(kind: InstanceKind, k: usize, sample: &PointSet, rng: &mut ChaCha8Rng) -> Result<Target> {
    let d = sample.dim();
    let extent = |c: usize| -> [f64; 2] {
        let (lo, hi) =
            sample.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x[c]), hi.max(x[c])));
        if lo < hi {
            [lo, hi]
        } else {
            [lo - 1.0, lo + 1.0]
        }
    };
    match kind {
        InstanceKind::Intervals => {
            if d != 1 || k == 0 {
                return Err(Error::InvalidInput("intervals need d = 1 and k >= 1".into()));
            }
            let [lo, hi] = extent(0);
            let mut ends: Vec<f64> = (0..2 * k).map(|_| rng.random_range(lo..hi)).collect();
            ends.sort_by(f64::total_cmp);
            let ivs = ends.chunks(2).map(|c| [c[0], c[1]]).collect();
            Ok(Target::intervals(UnionOfIntervals::new(ivs)?))
        }
        InstanceKind::Box => {
            // each side covers 2^(-1/d) of the range, so about half the volume
            let frac = 0.5f64.powf(1.0 / d as f64);
            let bounds = (0..d)
                .map(|c| {
                    let [lo, hi] = extent(c);
                    let w = (hi - lo) * frac;
                    let a = rng.random_range(lo..=hi - w);
                    Bound { lo: a, hi: a + w }
                })
                .collect();
            Ok(Target::axis_box(AxisBox::new(bounds)?))
        }
        InstanceKind::Halfspace => Ok(Target::halfspace(random_unit(d, rng))),
        InstanceKind::Finite => {
            if d != 1 {
                return Err(Error::InvalidInput("threshold instances need d = 1".into()));
            }
            let mut xs: Vec<f64> = sample.iter().map(|x| x[0]).collect();
            xs.sort_by(f64::total_cmp);
            let t = rng.random_range(0..=xs.len());
            let lo = xs.get(t).copied().unwrap_or(f64::INFINITY);
            Ok(Target::axis_box(AxisBox::new(vec![Bound { lo, hi: f64::INFINITY }])?))
        }
    }
}

/// Draw a sample, a target and `extra` further domain points, all from `seed`.
pub fn generate_instance(params: &InstanceParams, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = match params.kind {
        InstanceKind::Intervals | InstanceKind::Finite => 1,
        _ => params.d,
    };
    if params.n == 0 || d == 0 || !(params.range[0] < params.range[1]) {
        return Err(Error::InvalidInput("need n >= 1, d >= 1 and a nonempty range".into()));
    }
    let sample = draw_points(params.n, d, params.distribution, params.range, &mut rng);
    instance_from_sample(params, sample, &mut rng)
}

/// Like [`generate_instance`] with a given sample.
pub fn instance_from_sample(params: &InstanceParams, sample: PointSet, rng: &mut ChaCha8Rng) -> Result<Instance> {
    let target = draw_target(params.kind, params.k, &sample, rng)?;
    let extra = draw_points(params.extra, sample.dim(), params.distribution, params.range, rng);
    let domain = sample.union(&extra)?;
    let table = (params.kind == InstanceKind::Finite).then(|| HypothesisTable::thresholds_over(&sample));
    Ok(Instance { sample, target, domain, table })
}

/// Sweep description, read from TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub learner: LearnerKind,
    /// Defaults to the learner's natural instance kind.
    pub instance: Option<InstanceKind>,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub d: Vec<usize>,
    pub trials: usize,
    pub distribution: Distribution,
    pub range: [f64; 2],
    /// Read the sample from this CSV instead of drawing it (`n` is then ignored).
    pub dataset: Option<PathBuf>,
    /// Extra domain points: `extra + extra_per_point * n`.
    pub extra: usize,
    pub extra_per_point: usize,
    pub policy: EmptyPolicy,
    pub instance_seed: u64,
    pub oracle_seed: u64,
    /// Permutation seed (SDL) or initialization seed (Forster pipeline).
    pub learner_seed: u64,
    /// Unlabeled share allowed for the Forster pipeline; `1/(2n)` when absent.
    pub alpha: Option<f64>,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            learner: LearnerKind::Intervals,
            instance: None,
            n: vec![256],
            k: vec![1],
            d: vec![1],
            trials: 1,
            distribution: Distribution::Uniform,
            range: [-1.0, 1.0],
            dataset: None,
            extra: 0,
            extra_per_point: 0,
            policy: EmptyPolicy::SeededRandom,
            instance_seed: 0,
            oracle_seed: 0,
            learner_seed: 0,
            alpha: None,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
        ExperimentConfig::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn instance_kind(&self) -> InstanceKind {
        self.instance.unwrap_or(self.learner.default_instance())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n.is_empty() || self.k.is_empty() || self.d.is_empty() {
            return Err(Error::Config("n, k and d need at least one value".into()));
        }
        if self.n.contains(&0) || self.k.contains(&0) || self.d.contains(&0) {
            return Err(Error::Config("n, k and d must be positive".into()));
        }
        if !(self.range[0] < self.range[1]) {
            return Err(Error::Config("range must satisfy lo < hi".into()));
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::Config("alpha must lie in (0, 1)".into()));
            }
        }
        let compatible = matches!(
            (self.learner, self.instance_kind()),
            (LearnerKind::Intervals, InstanceKind::Intervals | InstanceKind::Finite)
                | (LearnerKind::Box, InstanceKind::Box | InstanceKind::Finite)
                | (LearnerKind::Halfspace | LearnerKind::HalfspaceSdl, InstanceKind::Halfspace)
                | (LearnerKind::General, InstanceKind::Finite)
        );
        if !compatible {
            return Err(Error::Config(format!(
                "learner {:?} cannot run on {:?} instances",
                self.learner,
                self.instance_kind()
            )));
        }
        Ok(())
    }

    /// Parameter points `(n, k, d)` in sweep order.
    pub fn points(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for &n in &self.n {
            for &k in &self.k {
                for &d in &self.d {
                    out.push((n, k, d));
                }
            }
        }
        out
    }
}

/// One trial. Columns are fixed in this order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub learner: LearnerKind,
    pub instance: InstanceKind,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub domain_size: usize,
    pub trial: usize,
    pub policy: EmptyPolicy,
    pub instance_seed: u64,
    pub oracle_seed: u64,
    pub learner_seed: u64,
    pub queries_used: usize,
    pub rounds: usize,
    pub correct_fraction: f64,
    /// Every emitted label was right.
    pub sound: bool,
    /// Empty unless the learner failed.
    pub error: String,
    pub wall_time_ms: f64,
}

pub const RESULT_HEADER: [&str; 17] = [
    "learner",
    "instance",
    "n",
    "k",
    "d",
    "domain_size",
    "trial",
    "policy",
    "instance_seed",
    "oracle_seed",
    "learner_seed",
    "queries_used",
    "rounds",
    "correct_fraction",
    "sound",
    "error",
    "wall_time_ms",
];

fn mix(a: u64, b: u64) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = a ^ b.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Run the configured learner once on an instance.
pub fn run_learner(
    learner: LearnerKind,
    inst: &Instance,
    oracle: &mut Oracle,
    learner_seed: u64,
    alpha: Option<f64>,
) -> Result<LearnResult> {
    match learner {
        LearnerKind::Intervals => label_k_intervals(&inst.sample, oracle),
        LearnerKind::Box => label_box(&inst.sample, oracle),
        LearnerKind::HalfspaceSdl => randomized_svm_learn(&inst.sample, oracle, learner_seed),
        LearnerKind::Halfspace => {
            let a = alpha.unwrap_or(1.0 / (2.0 * inst.sample.len() as f64));
            learning_ltf(&inst.sample, a, oracle, learner_seed)
        }
        LearnerKind::General => {
            if inst.domain.len() != inst.sample.len() {
                return Err(Error::InvalidInput("the table learner needs L = S".into()));
            }
            let table = match &inst.table {
                Some(t) => t.clone(),
                None => HypothesisTable::thresholds_over(&inst.sample),
            };
            general_query_learn(&inst.sample, &table, oracle)
        }
    }
}

/// Row `trial` of parameter point `(n, k, d)`. Deterministic apart from timing.
pub fn run_trial(cfg: &ExperimentConfig, point: (usize, usize, usize), trial: usize) -> ResultRow {
    let (n, k, d) = point;
    let key = mix(mix(n as u64, k as u64), mix(d as u64, trial as u64));
    let instance_seed = mix(cfg.instance_seed, key);
    let oracle_seed = mix(cfg.oracle_seed, key);
    let learner_seed = mix(cfg.learner_seed, key);
    let kind = cfg.instance_kind();
    let mut row = ResultRow {
        learner: cfg.learner,
        instance: kind,
        n,
        k,
        d,
        domain_size: 0,
        trial,
        policy: cfg.policy,
        instance_seed,
        oracle_seed,
        learner_seed,
        queries_used: 0,
        rounds: 0,
        correct_fraction: 0.0,
        sound: false,
        error: String::new(),
        wall_time_ms: 0.0,
    };
    let start = Instant::now();
    let outcome = (|| -> Result<(LearnResult, Vec<Sign>, usize)> {
        let mut params = InstanceParams::new(kind, n);
        params.k = k;
        params.d = d;
        params.distribution = cfg.distribution;
        params.range = cfg.range;
        let inst = match &cfg.dataset {
            Some(path) => {
                let s = read_dataset(path)?;
                params.extra = cfg.extra + cfg.extra_per_point * s.len();
                instance_from_sample(&params, s, &mut ChaCha8Rng::seed_from_u64(instance_seed))?
            }
            None => {
                params.extra = cfg.extra + cfg.extra_per_point * n;
                generate_instance(&params, instance_seed)?
            }
        };
        let mut oracle = Oracle::new(inst.target.clone(), inst.domain.clone(), &inst.sample, cfg.policy, oracle_seed)?;
        let r = run_learner(cfg.learner, &inst, &mut oracle, learner_seed, cfg.alpha)?;
        Ok((r, inst.truth(), inst.domain.len()))
    })();
    row.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok((r, truth, domain_size)) => {
            row.domain_size = domain_size;
            row.queries_used = r.queries_used;
            row.rounds = r.rounds;
            row.correct_fraction = r.correct_fraction(&truth);
            row.sound = r.is_sound(&truth);
        }
        Err(e) => row.error = e.to_string(),
    }
    row
}

/// One row per (parameter point, trial), in sweep order, using up to `jobs` threads.
pub fn run_benchmark(cfg: &ExperimentConfig, jobs: usize) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let tasks: Vec<((usize, usize, usize), usize)> =
        cfg.points().into_iter().flat_map(|p| (0..cfg.trials).map(move |t| (p, t))).collect();
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().map_err(|e| Error::Config(e.to_string()))?;
    Ok(pool.install(|| tasks.par_iter().map(|&(p, t)| run_trial(cfg, p, t)).collect()))
}

pub fn write_rows(writer: impl std::io::Write, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(RESULT_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows(reader: impl std::io::Read) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != RESULT_HEADER {
        return Err(Error::InvalidInput("unexpected result header".into()));
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Least-squares line through `(log2 n, mean queries)`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

/// Ordinary least squares of `ys` on `xs`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LogFit> {
    let m = xs.len();
    let distinct = {
        let mut v = xs.to_vec();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v.len()
    };
    if m != ys.len() || distinct < 3 {
        return Err(Error::InvalidInput("a fit needs at least 3 distinct x values".into()));
    }
    let mx = xs.iter().sum::<f64>() / m as f64;
    let my = ys.iter().sum::<f64>() / m as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(LogFit { slope, intercept, r2, points: m })
}

/// Per group: fit of mean `queries_used` against `log2 n`. Failed rows are skipped.
pub fn fit_log_slope<G: Ord + Clone>(
    rows: &[ResultRow],
    group: impl Fn(&ResultRow) -> G,
) -> Result<BTreeMap<G, LogFit>> {
    let mut sums: BTreeMap<G, BTreeMap<usize, (f64, usize)>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.error.is_empty()) {
        let e = sums.entry(group(r)).or_default().entry(r.n).or_insert((0.0, 0));
        e.0 += r.queries_used as f64;
        e.1 += 1;
    }
    let mut out = BTreeMap::new();
    for (g, by_n) in sums {
        let xs: Vec<f64> = by_n.keys().map(|&n| (n as f64).log2()).collect();
        let ys: Vec<f64> = by_n.values().map(|&(s, c)| s / c as f64).collect();
        out.insert(g, fit_line(&xs, &ys)?);
    }
    Ok(out)
}
