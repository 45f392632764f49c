//! End-to-end halfspace labeling with simple queries.
//!
//! Each round moves the unlabeled points into approximate radially isotropic
//! position, tries the "everything in the subspace is positive" shortcut, and
//! otherwise runs the modified perceptron from random starts until a run labels
//! a large enough share of the subspace.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forster::forster_transform;
use crate::oracle::{LearnResult, Oracle};
use crate::perceptron::{active_perceptron, PerceptronRun, TransformedChannel};
use crate::point::{normalized, PointSet, Sign};
use crate::region::{Polytope, Region, SubspaceMap};

/// Redraws of the starting direction allowed per round.
pub const MAX_REDRAWS: usize = 200;

/// Per-round counters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LtfRound {
    /// Dimension of the subspace found this round.
    pub k: usize,
    /// Unlabeled points lying in the subspace.
    pub kept: usize,
    /// Points labeled this round.
    pub labeled: usize,
    /// Queries spent this round.
    pub queries: usize,
    /// Perceptron runs started this round (0 when the shortcut applied).
    pub redraws: usize,
    pub forster_iters: usize,
}

/// One perceptron run and the map it ran under.
#[derive(Clone, Debug)]
pub struct RunLog {
    pub map: Arc<SubspaceMap>,
    pub run: PerceptronRun,
}

#[derive(Clone, Debug, Default)]
pub struct LtfReport {
    pub rounds: Vec<LtfRound>,
    /// Every perceptron run, including discarded ones.
    pub runs: Vec<RunLog>,
}

/// Label at least a `1 - alpha` share of `sample` (all of it when `alpha < 1/n`).
pub fn learning_ltf(sample: &PointSet, alpha: f64, oracle: &mut Oracle, init_seed: u64) -> Result<LearnResult> {
    learning_ltf_report(sample, alpha, oracle, init_seed).map(|(r, _)| r)
}

pub fn learning_ltf_report(
    sample: &PointSet,
    alpha: f64,
    oracle: &mut Oracle,
    init_seed: u64,
) -> Result<(LearnResult, LtfReport)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let start = oracle.queries();
    let n = sample.len();
    let mut rng = ChaCha8Rng::seed_from_u64(init_seed);
    let mut predictions: Vec<Option<Sign>> = vec![None; n];
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut report = LtfReport::default();

    while ((n - remaining.len()) as f64) < (1.0 - alpha) * n as f64 {
        let round_start = oracle.queries();
        let sub = sample.subset(&remaining);
        let fr = forster_transform(&sub)?;
        let k = fr.subspace_dim();
        let map = Arc::new(fr.map());
        let kept: Vec<usize> = fr.kept_ids.iter().map(|&j| remaining[j]).collect();

        let whole = Region::TransformedPolytope { map: Arc::clone(&map), inner: Polytope::sphere(), anchor: None };
        let mut labels: Vec<(usize, Sign)> = Vec::new();
        let mut redraws = 0;
        let mut last_start: Vec<f64> = Vec::new();
        if oracle.ask(whole, Sign::Pos)? {
            labels = kept.iter().map(|&id| (id, Sign::Pos)).collect();
        } else {
            loop {
                if redraws == MAX_REDRAWS {
                    return Err(Error::InitializationExhausted(MAX_REDRAWS));
                }
                // odd draws flip the previous start, so both signs of w0·v* get a turn
                let w0 = match redraws % 2 {
                    0 => random_unit(k, &mut rng),
                    _ => last_start.iter().map(|v| -v).collect(),
                };
                last_start.clone_from(&w0);
                redraws += 1;
                let mut channel = TransformedChannel::new(oracle, Arc::clone(&map), sample, &kept);
                let run = active_perceptron(&w0, &fr.transformed_points, &mut channel)?;
                let enough = !run.labeled.is_empty() && run.labeled.len() * 4 * k >= kept.len();
                if enough {
                    labels = run.labeled.iter().map(|&(j, y)| (kept[j], y)).collect();
                }
                report.runs.push(RunLog { map: Arc::clone(&map), run });
                if enough {
                    break;
                }
            }
        }

        for &(id, y) in &labels {
            predictions[id] = Some(y);
        }
        remaining.retain(|&id| predictions[id].is_none());
        report.rounds.push(LtfRound {
            k,
            kept: kept.len(),
            labeled: labels.len(),
            queries: oracle.queries() - round_start,
            redraws,
            forster_iters: fr.iterations,
        });
    }

    let rounds = report.rounds.len();
    Ok((LearnResult { predictions, queries_used: oracle.queries() - start, rounds }, report))
}

fn random_unit(k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..k).map(|_| StandardNormal.sample(rng)).collect();
        if v.iter().any(|&x| x != 0.0) {
            return normalized(&v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::EmptyPolicy;
    use crate::target::Target;

    fn circle(n: usize) -> PointSet {
        let rows: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let a = i as f64 * 2.399963;
                [a.cos() * (1.0 + 0.3 * (i % 3) as f64), a.sin()]
            })
            .collect();
        PointSet::from_rows(&rows).unwrap()
    }

    #[test]
    fn all_positive_uses_the_shortcut() {
        let rows: Vec<[f64; 2]> = (0..20).map(|i| [1.0 + i as f64 * 0.1, (i as f64 * 0.7).sin()]).collect();
        let s = PointSet::from_rows(&rows).unwrap();
        let mut o = Oracle::on_sample(Target::halfspace(vec![1.0, 0.0]), &s, EmptyPolicy::SeededRandom, 0).unwrap();
        let (r, rep) = learning_ltf_report(&s, 0.5 / 20.0, &mut o, 1).unwrap();
        assert_eq!(r.predictions, vec![Some(Sign::Pos); 20]);
        assert_eq!(rep.rounds[0].redraws, 0);
        assert_eq!(r.queries_used, 1);
    }

    #[test]
    fn labels_a_planar_sample() {
        let s = circle(60);
        let mut o = Oracle::on_sample(Target::halfspace(vec![0.3, -1.0]), &s, EmptyPolicy::SeededRandom, 3).unwrap();
        let truth = o.domain_labels().to_vec();
        let r = learning_ltf(&s, 1.0 / 120.0, &mut o, 8).unwrap();
        assert_eq!(r.correct_fraction(&truth), 1.0);
    }

    #[test]
    fn rejects_bad_alpha() {
        let s = circle(4);
        let mut o = Oracle::on_sample(Target::halfspace(vec![1.0, 0.0]), &s, EmptyPolicy::SeededRandom, 3).unwrap();
        assert!(learning_ltf(&s, 0.0, &mut o, 0).is_err());
    }
}
