//! The spiked-family hardness construction.
//!
//! A family of `k`-sets with small pairwise intersections guarantees that a
//! fixed query family leaves some set `C*` unwitnessed: every region inside
//! `C*` is small. Against the hypotheses "all of `C*` positive, except maybe
//! one point", a learner with few queries leaves most of `C*` uncovered and
//! cannot tell those flips apart from the unflipped hypothesis.

use std::collections::{HashMap, HashSet};

use rand::seq::index::sample as sample_indices;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{EmptyPolicy, Oracle, TranscriptEntry};
use crate::point::{PointSet, Sign};
use crate::region::Region;
use crate::target::Target;

/// `⌈4k² ln 4k⌉`, the ground-set size used for `k`-sets.
pub fn ground_size_for(k: usize) -> usize {
    let kf = k as f64;
    (4.0 * kf * kf * (4.0 * kf).ln()).ceil() as usize
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetFamily {
    pub ground_size: usize,
    /// Each set sorted ascending.
    pub sets: Vec<Vec<usize>>,
    pub gamma: usize,
}

impl SetFamily {
    pub fn k(&self) -> usize {
        self.sets.first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Exact maximum intersection over all pairs of distinct sets (0 for fewer than two).
pub fn pairwise_intersection_max(fam: &SetFamily) -> usize {
    let mut best = 0;
    for i in 0..fam.sets.len() {
        for j in i + 1..fam.sets.len() {
            best = best.max(intersection_size(&fam.sets[i], &fam.sets[j]));
        }
    }
    best
}

/// Random `k`-subsets of `[⌈4k² ln 4k⌉]`, each kept when it meets every kept
/// set in at most `gamma` points, until `target` sets are kept. Gives up after
/// `1000·target` samples. The result is re-verified over all pairs.
pub fn low_intersection_family(k: usize, gamma: usize, target: usize, seed: u64) -> Result<SetFamily> {
    if k == 0 || gamma > k {
        return Err(Error::InvalidInput(format!("need 1 <= k and gamma <= k, got k={k}, gamma={gamma}")));
    }
    let ground = ground_size_for(k).max(k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sets: Vec<Vec<usize>> = Vec::with_capacity(target);
    let cap = 1000usize.saturating_mul(target);
    let mut draws = 0;
    while sets.len() < target {
        if draws == cap {
            return Err(Error::RetryCap { achieved: sets.len(), target });
        }
        draws += 1;
        let mut s = sample_indices(&mut rng, ground, k).into_vec();
        s.sort_unstable();
        if sets.iter().all(|t| intersection_size(t, &s) <= gamma) {
            sets.push(s);
        }
    }
    let fam = SetFamily { ground_size: ground, sets, gamma };
    let max = pairwise_intersection_max(&fam);
    if max > gamma {
        return Err(Error::InvalidInput(format!("constructed family has intersection {max} > {gamma}")));
    }
    Ok(fam)
}

/// Ground-set ids in a region (ground point `i` is the scalar `i`).
pub fn region_ids(region: &Region, ground_size: usize) -> Vec<usize> {
    match region {
        Region::FiniteSet { points } => {
            let mut ids: Vec<usize> = points
                .iter()
                .filter_map(|p| {
                    let v = p[0];
                    (v >= 0.0 && v.fract() == 0.0 && (v as usize) < ground_size).then_some(v as usize)
                })
                .collect();
            ids.sort_unstable();
            ids.dedup();
            ids
        }
        other => (0..ground_size).filter(|&i| other.contains_unchecked(&[i as f64])).collect(),
    }
}

pub fn ids_region(ids: &[usize]) -> Region {
    Region::finite(ids.iter().map(|&i| vec![i as f64]).collect())
}

/// Index of the first set not witnessed by any region, where a region
/// witnesses `C` if it lies inside `C` and has more than `gamma` points.
pub fn select_uncovered_target(fam: &SetFamily, regions: &[Region]) -> Result<usize> {
    let mut witnessed = vec![false; fam.len()];
    let members: Vec<HashSet<usize>> = fam.sets.iter().map(|s| s.iter().copied().collect()).collect();
    for r in regions {
        let ids = region_ids(r, fam.ground_size);
        if ids.len() <= fam.gamma {
            continue;
        }
        for (i, m) in members.iter().enumerate() {
            if ids.iter().all(|x| m.contains(x)) {
                witnessed[i] = true;
            }
        }
    }
    witnessed
        .iter()
        .position(|&w| !w)
        .ok_or_else(|| Error::InvalidInput("every set is witnessed by some region".into()))
}

/// `C*` with its `k + 1` hypotheses: all of `C*` positive, or all but one point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpikedFamily {
    pub ground_size: usize,
    pub base: Vec<usize>,
}

impl SpikedFamily {
    pub fn new(ground_size: usize, mut base: Vec<usize>) -> SpikedFamily {
        base.sort_unstable();
        SpikedFamily { ground_size, base }
    }

    /// Number of hypotheses, `k + 1`.
    pub fn len(&self) -> usize {
        self.base.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Positive ids of the hypothesis that flips `flip` (none for `None`).
    pub fn positives(&self, flip: Option<usize>) -> Vec<usize> {
        self.base.iter().copied().filter(|&x| Some(x) != flip).collect()
    }

    pub fn labels(&self, flip: Option<usize>) -> Vec<Sign> {
        let mut out = vec![Sign::Neg; self.ground_size];
        for x in self.positives(flip) {
            out[x] = Sign::Pos;
        }
        out
    }

    pub fn target(&self, flip: Option<usize>) -> Target {
        Target::positive_set(self.positives(flip).into_iter().map(|i| vec![i as f64]).collect())
    }

    /// Hypothesis `i`: `0` is the unflipped one, `i >= 1` flips `base[i-1]`.
    pub fn flip_of(&self, i: usize) -> Option<usize> {
        (i > 0).then(|| self.base[i - 1])
    }
}

/// Ground set as scalars `0, 1, ..., n-1`.
pub fn ground_points(n: usize) -> PointSet {
    PointSet::from_scalars(&(0..n).map(|i| i as f64).collect::<Vec<_>>())
}

/// Points of `C*` covered by a transcript: `x ∈ T ⊆ C*` or `T ∩ C* = {x}`.
pub fn covered_points(base: &[usize], regions: &[Vec<usize>]) -> HashSet<usize> {
    let inside: HashSet<usize> = base.iter().copied().collect();
    let mut covered = HashSet::new();
    for ids in regions {
        let hits: Vec<usize> = ids.iter().copied().filter(|x| inside.contains(x)).collect();
        if hits.len() == ids.len() {
            covered.extend(hits);
        } else if hits.len() == 1 {
            covered.insert(hits[0]);
        }
    }
    covered
}

/// Answer of `(T, z)` with the domain equal to the ground set.
fn replay_answer(ids: &[usize], z: Sign, labels: &[Sign]) -> Option<bool> {
    if ids.is_empty() {
        return None;
    }
    Some(ids.iter().all(|&i| labels[i] == z))
}

/// A learner for the spiked family of a known `C*`.
pub trait SpikedLearner {
    /// Labels for every ground point. Hitting the budget must not fail the run.
    fn learn(&self, family: &SpikedFamily, oracle: &mut Oracle, rng: &mut ChaCha8Rng) -> Vec<Sign>;
}

/// Checks `C*` in blocks of `block` points (random block order), and splits a
/// failing block with singleton queries. Falls back to the unflipped labels
/// when nothing failed or the budget ran out.
#[derive(Clone, Debug)]
pub struct CoverageLearner {
    pub block: usize,
}

impl CoverageLearner {
    pub fn blocks(&self, base: &[usize]) -> Vec<Vec<usize>> {
        base.chunks(self.block.max(1)).map(<[usize]>::to_vec).collect()
    }

    fn find_flip(&self, family: &SpikedFamily, oracle: &mut Oracle, rng: &mut ChaCha8Rng) -> Result<Option<usize>> {
        let mut blocks = self.blocks(&family.base);
        blocks.shuffle(rng);
        for b in blocks {
            if oracle.ask(ids_region(&b), Sign::Pos)? {
                continue;
            }
            if b.len() == 1 {
                return Ok(Some(b[0]));
            }
            for &x in &b[..b.len() - 1] {
                if !oracle.ask(ids_region(&[x]), Sign::Pos)? {
                    return Ok(Some(x));
                }
            }
            return Ok(Some(b[b.len() - 1]));
        }
        Ok(None)
    }
}

impl SpikedLearner for CoverageLearner {
    fn learn(&self, family: &SpikedFamily, oracle: &mut Oracle, rng: &mut ChaCha8Rng) -> Vec<Sign> {
        let flip = self.find_flip(family, oracle, rng).unwrap_or(None);
        family.labels(flip)
    }
}

/// The query family used by the experiment: whole sets for the first half of
/// the family, then blocks of `gamma` points and singletons of every set.
pub fn standard_query_family(fam: &SetFamily) -> Vec<Region> {
    let mut out = Vec::new();
    for s in &fam.sets[..fam.len() / 2] {
        out.push(ids_region(s));
    }
    let block = fam.gamma.max(1);
    for s in &fam.sets {
        for b in s.chunks(block) {
            out.push(ids_region(b));
        }
        if block > 1 {
            for &x in s {
                out.push(ids_region(&[x]));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub k: usize,
    pub gamma: usize,
    pub ground_size: usize,
    pub achieved_n: usize,
    pub gamma_verified: usize,
    pub target_index: usize,
    pub trials: usize,
    pub budget: usize,
    pub error_frequency: f64,
    /// `coverage_histogram[c]` trials covered exactly `c` points of `C*`.
    pub coverage_histogram: Vec<usize>,
    /// Transcripts that used a region outside the query family.
    pub off_family_queries: usize,
    /// Uncovered flips whose answers differed from the unflipped run (must be 0).
    pub replay_mismatches: usize,
}

/// Draw `trials` targets from the spiked family of an unwitnessed set and
/// measure how often `learner` mislabels some ground point within `budget`.
pub fn run_lower_bound_experiment<L: SpikedLearner>(
    learner: &L,
    queries: &[Region],
    fam: &SetFamily,
    trials: usize,
    budget: usize,
    seed: u64,
) -> Result<LowerBoundReport> {
    let target_index = select_uncovered_target(fam, queries)?;
    let family = SpikedFamily::new(fam.ground_size, fam.sets[target_index].clone());
    let ground = ground_points(fam.ground_size);
    let allowed: HashSet<Vec<usize>> = queries.iter().map(|r| region_ids(r, fam.ground_size)).collect();
    let k = family.base.len();
    let mut oracles: HashMap<usize, Oracle> = HashMap::new();
    let mut errors = 0;
    let mut hist = vec![0usize; k + 1];
    let mut off_family = 0;

    for trial in 0..trials {
        let trial_seed = seed.wrapping_add((trial as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let h = rng.random_range(0..family.len());
        let flip = family.flip_of(h);
        let base_oracle = match oracles.get(&h) {
            Some(o) => o,
            None => {
                let o = Oracle::on_sample(family.target(flip), &ground, EmptyPolicy::SeededRandom, seed)?;
                oracles.entry(h).or_insert(o)
            }
        };
        let mut oracle = base_oracle.fresh().with_budget(budget);
        let out = learner.learn(&family, &mut oracle, &mut rng);
        if out != family.labels(flip) {
            errors += 1;
        }
        let ids: Vec<Vec<usize>> = oracle.transcript().iter().map(|e| region_ids(&e.region, fam.ground_size)).collect();
        off_family += ids.iter().filter(|r| !allowed.contains(*r)).count();
        hist[covered_points(&family.base, &ids).len()] += 1;
    }

    let replay_mismatches = replay_check(learner, &family, &ground, budget, seed)?;
    Ok(LowerBoundReport {
        k,
        gamma: fam.gamma,
        ground_size: fam.ground_size,
        achieved_n: fam.len(),
        gamma_verified: pairwise_intersection_max(fam),
        target_index,
        trials,
        budget,
        error_frequency: if trials == 0 { 0.0 } else { errors as f64 / trials as f64 },
        coverage_histogram: hist,
        off_family_queries: off_family,
        replay_mismatches,
    })
}

/// Run the learner against the unflipped hypothesis, then count uncovered
/// flips under which some transcript query would have been answered
/// differently.
pub fn replay_check<L: SpikedLearner>(
    learner: &L,
    family: &SpikedFamily,
    ground: &PointSet,
    budget: usize,
    seed: u64,
) -> Result<usize> {
    let mut oracle =
        Oracle::on_sample(family.target(None), ground, EmptyPolicy::SeededRandom, seed)?.with_budget(budget);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    learner.learn(family, &mut oracle, &mut rng);
    Ok(replay_mismatches(family, oracle.transcript()))
}

/// Uncovered flips that change the answer to some recorded query.
pub fn replay_mismatches(family: &SpikedFamily, transcript: &[TranscriptEntry]) -> usize {
    let ids: Vec<Vec<usize>> = transcript.iter().map(|e| region_ids(&e.region, family.ground_size)).collect();
    let covered = covered_points(&family.base, &ids);
    let mut bad = 0;
    for &x in &family.base {
        if covered.contains(&x) {
            continue;
        }
        let labels = family.labels(Some(x));
        let differs = transcript.iter().zip(&ids).any(|(e, r)| {
            let ans = replay_answer(r, e.label, &labels).map(u8::from);
            ans.is_some_and(|a| a != e.answer)
        });
        if differs {
            bad += 1;
        }
    }
    bad
}
