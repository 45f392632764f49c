//! The simulated labeler.
//!
//! A query `(T, z)` is answered `1` iff every point of the labeling domain `L`
//! that lies in `T` has label `z` under the hidden target. When `T ∩ L` is
//! empty the answer comes from the [`EmptyPolicy`]. Only the answer bit is
//! revealed.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{PointKey, PointSet, Sign};
use crate::region::{Region, Sense, SubspaceMap};
use crate::target::Target;

/// Answer for queries whose region misses the labeling domain.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptyPolicy {
    AlwaysOne,
    AlwaysZero,
    #[default]
    SeededRandom,
}

impl EmptyPolicy {
    pub const ALL: [EmptyPolicy; 3] = [EmptyPolicy::AlwaysOne, EmptyPolicy::AlwaysZero, EmptyPolicy::SeededRandom];
}

impl std::str::FromStr for EmptyPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "always_one" | "one" => Ok(EmptyPolicy::AlwaysOne),
            "always_zero" | "zero" => Ok(EmptyPolicy::AlwaysZero),
            "seeded_random" | "random" => Ok(EmptyPolicy::SeededRandom),
            other => Err(Error::InvalidInput(format!("unknown empty policy {other}"))),
        }
    }
}

/// A region together with the proposed label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionQuery {
    pub region: Region,
    pub label: Sign,
}

impl RegionQuery {
    pub fn new(region: Region, label: Sign) -> RegionQuery {
        RegionQuery { region, label }
    }
}

/// One answered query; serialized as a JSON-lines record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub region: Region,
    pub label: Sign,
    pub answer: u8,
    /// The region contained no domain point and the policy decided.
    #[serde(skip)]
    pub empty: bool,
}

/// Output of a learner run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LearnResult {
    /// Indexed by point id; `None` for points left unlabeled.
    pub predictions: Vec<Option<Sign>>,
    pub queries_used: usize,
    pub rounds: usize,
}

impl LearnResult {
    pub fn labeled(&self) -> usize {
        self.predictions.iter().filter(|p| p.is_some()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.predictions.iter().all(Option::is_some)
    }

    /// Fraction of all points whose prediction is present and equals `truth`.
    pub fn correct_fraction(&self, truth: &[Sign]) -> f64 {
        if truth.is_empty() {
            return 1.0;
        }
        let ok = self.predictions.iter().zip(truth).filter(|(p, t)| **p == Some(**t)).count();
        ok as f64 / truth.len() as f64
    }

    /// Whether every emitted label equals `truth`.
    pub fn is_sound(&self, truth: &[Sign]) -> bool {
        self.predictions.iter().zip(truth).all(|(p, t)| p.is_none_or(|p| p == *t))
    }
}

/// Sorted view of one coordinate with prefix counts of positive labels.
struct AxisIndex {
    values: Vec<f64>,
    positive_prefix: Vec<u32>,
}

impl AxisIndex {
    fn build(domain: &PointSet, labels: &[Sign], coord: usize) -> AxisIndex {
        let mut order: Vec<usize> = (0..domain.len()).filter(|&i| !domain.point(i)[coord].is_nan()).collect();
        order.sort_by(|&a, &b| domain.point(a)[coord].total_cmp(&domain.point(b)[coord]));
        let values = order.iter().map(|&i| domain.point(i)[coord]).collect();
        let mut positive_prefix = Vec::with_capacity(order.len() + 1);
        positive_prefix.push(0u32);
        let mut acc = 0u32;
        for &i in &order {
            acc += labels[i].is_pos() as u32;
            positive_prefix.push(acc);
        }
        AxisIndex { values, positive_prefix }
    }

    /// (contained, positives) among values in `[lo, hi]`.
    fn count_range(&self, lo: f64, hi: f64) -> (usize, usize) {
        let start = self.values.partition_point(|&v| v < lo);
        let end = self.values.partition_point(|&v| v <= hi).max(start);
        (end - start, (self.positive_prefix[end] - self.positive_prefix[start]) as usize)
    }
}

pub struct Oracle {
    target: Target,
    domain: PointSet,
    labels: Vec<Sign>,
    lookup: HashMap<PointKey, usize>,
    axes: Vec<Option<AxisIndex>>,
    image_cache: Option<(Arc<SubspaceMap>, Arc<[Option<Vec<f64>>]>)>,
    policy: EmptyPolicy,
    seed: u64,
    rng: ChaCha8Rng,
    transcript: Vec<TranscriptEntry>,
    budget: Option<usize>,
}

impl Oracle {
    /// A labeler over `domain`, which must contain every point of `sample`.
    pub fn new(target: Target, domain: PointSet, sample: &PointSet, policy: EmptyPolicy, seed: u64) -> Result<Oracle> {
        if let Some(d) = target.dim() {
            if d != domain.dim() {
                return Err(Error::DimensionMismatch { expected: d, got: domain.dim() });
            }
        }
        if sample.dim() != domain.dim() {
            return Err(Error::DimensionMismatch { expected: domain.dim(), got: sample.dim() });
        }
        let labels: Vec<Sign> = domain.iter().map(|x| target.label(x)).collect();
        let mut lookup = HashMap::with_capacity(domain.len());
        for (i, x) in domain.iter().enumerate() {
            lookup.entry(PointKey::new(x)).or_insert(i);
        }
        for (id, x) in sample.iter().enumerate() {
            if !lookup.contains_key(&PointKey::new(x)) {
                return Err(Error::DomainMissingSample(id));
            }
        }
        let axes = (0..domain.dim()).map(|_| None).collect();
        Ok(Oracle {
            target,
            domain,
            labels,
            lookup,
            axes,
            image_cache: None,
            policy,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            transcript: Vec::new(),
            budget: None,
        })
    }

    /// A labeler whose domain is exactly the sample.
    pub fn on_sample(target: Target, sample: &PointSet, policy: EmptyPolicy, seed: u64) -> Result<Oracle> {
        Oracle::new(target, sample.clone(), sample, policy, seed)
    }

    /// A copy with an empty transcript, no budget and the RNG reset to the seed.
    pub fn fresh(&self) -> Oracle {
        Oracle {
            target: self.target.clone(),
            domain: self.domain.clone(),
            labels: self.labels.clone(),
            lookup: self.lookup.clone(),
            axes: (0..self.domain.dim()).map(|_| None).collect(),
            image_cache: None,
            policy: self.policy,
            seed: self.seed,
            rng: ChaCha8Rng::seed_from_u64(self.seed),
            transcript: Vec::new(),
            budget: None,
        }
    }

    /// Refuse queries once `budget` have been answered.
    pub fn with_budget(mut self, budget: usize) -> Oracle {
        self.budget = Some(budget);
        self
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    pub fn domain(&self) -> &PointSet {
        &self.domain
    }

    pub fn policy(&self) -> EmptyPolicy {
        self.policy
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn queries(&self) -> usize {
        self.transcript.len()
    }

    pub fn remaining(&self) -> Option<usize> {
        self.budget.map(|b| b.saturating_sub(self.transcript.len()))
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    /// Answer `query`, appending it to the transcript.
    pub fn answer(&mut self, query: &RegionQuery) -> Result<bool> {
        if let Some(b) = self.budget {
            if self.transcript.len() >= b {
                return Err(Error::BudgetExhausted(b));
            }
        }
        self.check_dim(&query.region)?;
        let verdict = self.evaluate(&query.region, query.label);
        let (answer, empty) = match verdict {
            Some(a) => (a, false),
            None => (self.empty_answer(), true),
        };
        self.transcript.push(TranscriptEntry {
            region: query.region.clone(),
            label: query.label,
            answer: answer as u8,
            empty,
        });
        Ok(answer)
    }

    /// Convenience wrapper around [`Oracle::answer`].
    pub fn ask(&mut self, region: Region, label: Sign) -> Result<bool> {
        self.answer(&RegionQuery::new(region, label))
    }

    /// The label of a domain point, using exactly one singleton query.
    pub fn label_point(&mut self, x: &[f64]) -> Result<Sign> {
        if x.len() != self.domain.dim() {
            return Err(Error::DimensionMismatch { expected: self.domain.dim(), got: x.len() });
        }
        if !self.lookup.contains_key(&PointKey::new(x)) {
            return Err(Error::NotInDomain);
        }
        let positive = self.ask(Region::finite(vec![x.to_vec()]), Sign::Pos)?;
        Ok(Sign::from_bool(positive))
    }

    fn empty_answer(&mut self) -> bool {
        match self.policy {
            EmptyPolicy::AlwaysOne => true,
            EmptyPolicy::AlwaysZero => false,
            EmptyPolicy::SeededRandom => self.rng.random::<bool>(),
        }
    }

    fn check_dim(&self, region: &Region) -> Result<()> {
        let d = self.domain.dim();
        if let Region::AxisHalfspace { coord, .. } = region {
            if *coord >= d {
                return Err(Error::DimensionMismatch { expected: coord + 1, got: d });
            }
        }
        match region.dim() {
            Some(r) if r != d => Err(Error::DimensionMismatch { expected: d, got: r }),
            _ => Ok(()),
        }
    }

    /// `Some(answer)` when the region meets the domain, `None` when it is empty.
    fn evaluate(&mut self, region: &Region, label: Sign) -> Option<bool> {
        match region {
            Region::Interval { lo, hi } => {
                let (n, pos) = self.axis(0).count_range(*lo, *hi);
                Self::verdict_from_counts(n, pos, label)
            }
            Region::AxisHalfspace { coord, sense, threshold } => {
                let (lo, hi) = match sense {
                    Sense::Ge => (*threshold, f64::INFINITY),
                    Sense::Le => (f64::NEG_INFINITY, *threshold),
                };
                let (n, pos) = self.axis(*coord).count_range(lo, hi);
                Self::verdict_from_counts(n, pos, label)
            }
            Region::FiniteSet { points } => {
                let hits = points.iter().filter_map(|p| self.lookup.get(&PointKey::new(p)).copied());
                Self::verdict_from_hits(hits, &self.labels, label)
            }
            Region::HypothesisPositiveSet { hypothesis, sign, order_range } => {
                let (lo, hi) = match order_range {
                    Some([lo, hi]) => (*lo, (*hi).min(hypothesis.len().saturating_sub(1))),
                    None => (0, hypothesis.len().saturating_sub(1)),
                };
                if hypothesis.is_empty() || lo > hi {
                    return None;
                }
                let hits = (lo..=hi)
                    .filter(|&p| hypothesis.labels()[p] == *sign)
                    .filter_map(|p| self.lookup.get(&PointKey::new(&hypothesis.points()[p])).copied());
                Self::verdict_from_hits(hits, &self.labels, label)
            }
            Region::TransformedPolytope { map, inner, anchor } => {
                let anchor_hit = anchor.as_deref().and_then(|a| self.lookup.get(&PointKey::new(a)).copied());
                let images = self.images(map);
                let mut any = false;
                if let Some(a) = anchor_hit {
                    if self.labels[a] != label {
                        return Some(false);
                    }
                    any = true;
                }
                for (img, &y) in images.iter().zip(&self.labels) {
                    if let Some(img) = img {
                        if inner.contains(img) {
                            if y != label {
                                return Some(false);
                            }
                            any = true;
                        }
                    }
                }
                any.then_some(true)
            }
            Region::HalfspacePolytope { .. } => {
                let mut any = false;
                for (x, &y) in self.domain.iter().zip(&self.labels) {
                    if region.contains_unchecked(x) {
                        if y != label {
                            return Some(false);
                        }
                        any = true;
                    }
                }
                any.then_some(true)
            }
        }
    }

    fn verdict_from_counts(contained: usize, positives: usize, label: Sign) -> Option<bool> {
        if contained == 0 {
            return None;
        }
        Some(match label {
            Sign::Pos => positives == contained,
            Sign::Neg => positives == 0,
        })
    }

    fn verdict_from_hits(hits: impl Iterator<Item = usize>, labels: &[Sign], label: Sign) -> Option<bool> {
        let mut any = false;
        for i in hits {
            if labels[i] != label {
                return Some(false);
            }
            any = true;
        }
        any.then_some(true)
    }

    fn axis(&mut self, coord: usize) -> &AxisIndex {
        if self.axes[coord].is_none() {
            self.axes[coord] = Some(AxisIndex::build(&self.domain, &self.labels, coord));
        }
        self.axes[coord].as_ref().unwrap()
    }

    fn images(&mut self, map: &Arc<SubspaceMap>) -> Arc<[Option<Vec<f64>>]> {
        let fresh = match &self.image_cache {
            Some((cached, _)) => !Arc::ptr_eq(cached, map) && **cached != **map,
            None => true,
        };
        if fresh {
            let imgs: Arc<[Option<Vec<f64>>]> = self.domain.iter().map(|x| map.image(x)).collect();
            self.image_cache = Some((Arc::clone(map), imgs));
        }
        Arc::clone(&self.image_cache.as_ref().unwrap().1)
    }

    /// Reference answer by scanning the whole domain. Bypasses the transcript.
    pub fn brute_force_answer(&self, region: &Region, label: Sign) -> Option<bool> {
        let mut any = false;
        let mut ok = true;
        for (x, &y) in self.domain.iter().zip(&self.labels) {
            if region.contains_unchecked(x) {
                any = true;
                ok &= y == label;
            }
        }
        any.then_some(ok)
    }

    /// True labels of the domain points (for evaluation, not for learners).
    pub fn domain_labels(&self) -> &[Sign] {
        &self.labels
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::{Constraint, Polytope};
    use crate::target::UnionOfIntervals;

    fn two_point_oracle(policy: EmptyPolicy) -> Oracle {
        let s = PointSet::from_scalars(&[0.0, 1.0]);
        let t = Target::intervals(UnionOfIntervals::new(vec![[-0.5, 0.5]]).unwrap());
        Oracle::on_sample(t, &s, policy, 7).unwrap()
    }

    #[test]
    fn answers_follow_query_semantics() {
        let mut o = two_point_oracle(EmptyPolicy::AlwaysOne);
        assert!(o.ask(Region::interval(-1.0, 0.5).unwrap(), Sign::Pos).unwrap());
        assert!(!o.ask(Region::interval(-1.0, 2.0).unwrap(), Sign::Pos).unwrap());
        assert!(o.ask(Region::interval(5.0, 6.0).unwrap(), Sign::Pos).unwrap());
        assert_eq!(o.queries(), 3);
        assert!(o.transcript()[2].empty);
        assert!(!o.transcript()[0].empty);
    }

    #[test]
    fn empty_policy_zero() {
        let mut o = two_point_oracle(EmptyPolicy::AlwaysZero);
        assert!(!o.ask(Region::interval(5.0, 6.0).unwrap(), Sign::Pos).unwrap());
        assert!(!o.ask(Region::interval(5.0, 6.0).unwrap(), Sign::Neg).unwrap());
    }

    #[test]
    fn seeded_random_policy_is_deterministic() {
        let run = || {
            let mut o = two_point_oracle(EmptyPolicy::SeededRandom);
            (0..32).map(|_| o.ask(Region::interval(5.0, 6.0).unwrap(), Sign::Pos).unwrap()).collect::<Vec<_>>()
        };
        let a = run();
        assert_eq!(a, run());
        assert!(a.iter().any(|&b| b) && a.iter().any(|&b| !b));
    }

    #[test]
    fn label_point_uses_one_query() {
        let s = PointSet::from_scalars(&[0.5, 2.0]);
        let t = Target::intervals(UnionOfIntervals::new(vec![[0.0, 1.0]]).unwrap());
        let mut o = Oracle::on_sample(t, &s, EmptyPolicy::AlwaysOne, 0).unwrap();
        assert_eq!(o.label_point(&[0.5]).unwrap(), Sign::Pos);
        assert_eq!(o.label_point(&[2.0]).unwrap(), Sign::Neg);
        assert_eq!(o.queries(), 2);
        assert!(matches!(o.label_point(&[3.0]), Err(Error::NotInDomain)));
        assert_eq!(o.queries(), 2);

        let s2 = PointSet::from_rows(&[[-1.0, 3.0]]).unwrap();
        let mut o2 = Oracle::on_sample(Target::halfspace(vec![1.0, 0.0]), &s2, EmptyPolicy::AlwaysOne, 0).unwrap();
        assert_eq!(o2.label_point(&[-1.0, 3.0]).unwrap(), Sign::Neg);
    }

    #[test]
    fn domain_must_contain_sample() {
        let s = PointSet::from_scalars(&[0.0, 1.0]);
        let l = PointSet::from_scalars(&[0.0]);
        let t = Target::intervals(UnionOfIntervals::new(vec![[0.0, 1.0]]).unwrap());
        assert!(matches!(Oracle::new(t, l, &s, EmptyPolicy::AlwaysOne, 0), Err(Error::DomainMissingSample(1))));
    }

    #[test]
    fn budget_is_enforced() {
        let mut o = two_point_oracle(EmptyPolicy::AlwaysOne).with_budget(1);
        o.ask(Region::interval(0.0, 0.0).unwrap(), Sign::Pos).unwrap();
        assert!(matches!(o.ask(Region::interval(0.0, 0.0).unwrap(), Sign::Pos), Err(Error::BudgetExhausted(1))));
        assert_eq!(o.queries(), 1);
    }

    #[test]
    fn indexed_answers_match_brute_force() {
        let pts: Vec<[f64; 2]> = (0..40).map(|i| [(i * 7 % 13) as f64 - 6.0, (i * 5 % 11) as f64 - 5.0]).collect();
        let s = PointSet::from_rows(&pts).unwrap();
        let mut o = Oracle::on_sample(Target::halfspace(vec![1.0, -0.5]), &s, EmptyPolicy::AlwaysOne, 0).unwrap();
        let regions = vec![
            Region::axis(0, Sense::Ge, 2.0),
            Region::axis(1, Sense::Le, -3.0),
            Region::axis(0, Sense::Ge, 100.0),
            Region::polytope(Polytope::default().with(Constraint::ge(vec![1.0, -0.5], 0.0))),
            Region::finite(vec![pts[3].to_vec(), pts[4].to_vec(), vec![99.0, 99.0]]),
        ];
        for r in regions {
            for z in Sign::BOTH {
                let fast = o.ask(r.clone(), z).unwrap();
                match o.brute_force_answer(&r, z) {
                    Some(expected) => assert_eq!(fast, expected, "{r:?} {z}"),
                    None => assert!(o.transcript().last().unwrap().empty),
                }
            }
        }
    }

    #[test]
    fn transcript_record_shape() {
        let mut o = two_point_oracle(EmptyPolicy::AlwaysOne);
        o.ask(Region::interval(-1.0, 0.5).unwrap(), Sign::Pos).unwrap();
        let v = serde_json::to_value(&o.transcript()[0]).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"region": {"kind": "interval", "lo": -1.0, "hi": 0.5}, "label": 1, "answer": 1})
        );
    }
}
