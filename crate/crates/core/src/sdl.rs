//! Halfspace labeling through a self-directed learner.
//!
//! The self-directed learner walks the sample in a random order and predicts
//! each point with the max-margin separator of everything revealed so far. The
//! active learner runs that pass with its own predictions as feedback, checks
//! the whole pass with two queries, and binary-searches the first mistake when
//! the check fails.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::oracle::{LearnResult, Oracle};
use crate::point::{dot, normalized, PointSet, Sign};
use crate::region::Region;
use crate::svm::{max_margin_fit, MaxMarginModel};

/// Incremental max-margin predictor. Refits only when a revealed point falls
/// inside the current margin, which is exactly when the optimum can change.
pub struct MarginLearner {
    dim: usize,
    points: Vec<Vec<f64>>,
    labels: Vec<Sign>,
    model: MaxMarginModel,
    refits: usize,
}

impl MarginLearner {
    pub fn new(dim: usize) -> MarginLearner {
        MarginLearner { dim, points: Vec::new(), labels: Vec::new(), model: MaxMarginModel::empty(dim), refits: 0 }
    }

    pub fn predict(&self, x: &[f64]) -> Sign {
        self.model.predict(x)
    }

    pub fn model(&self) -> &MaxMarginModel {
        &self.model
    }

    pub fn refits(&self) -> usize {
        self.refits
    }

    pub fn reveal(&mut self, x: &[f64], y: Sign) -> Result<()> {
        self.points.push(x.to_vec());
        self.labels.push(y);
        let first = self.points.len() == 1;
        if first || y.to_f64() * dot(&self.model.weights, x) < self.model.margin {
            let refs: Vec<&[f64]> = self.points.iter().map(Vec::as_slice).collect();
            self.model = max_margin_fit(self.dim, &refs, &self.labels)?;
            self.refits += 1;
        }
        Ok(())
    }
}

/// A uniformly random order of `0..n`.
pub fn random_order(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

fn unit_points(sample: &PointSet) -> Result<Vec<Vec<f64>>> {
    sample
        .iter()
        .map(|x| {
            if x.iter().all(|&v| v == 0.0) {
                Err(Error::InvalidInput("halfspace learners need nonzero points".into()))
            } else {
                Ok(normalized(x))
            }
        })
        .collect()
}

/// Mistakes of the self-directed pass over `sample` in `order`.
///
/// `feedback(id)` reveals the true label of point `id` after its prediction.
pub fn self_directed_pass(
    sample: &PointSet,
    order: &[usize],
    mut feedback: impl FnMut(usize) -> Sign,
) -> Result<usize> {
    let pts = unit_points(sample)?;
    let mut learner = MarginLearner::new(sample.dim());
    let mut mistakes = 0;
    for &id in order {
        let guess = learner.predict(&pts[id]);
        let y = feedback(id);
        if guess != y {
            mistakes += 1;
        }
        learner.reveal(&pts[id], y)?;
    }
    Ok(mistakes)
}

/// Per-run counters of [`randomized_svm_learn`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SdlTrace {
    /// Number of known-label points at the start of each pass.
    pub known_at_pass: Vec<usize>,
}

/// Label a sample of a homogeneous halfspace using finite-set queries.
pub fn randomized_svm_learn(sample: &PointSet, oracle: &mut Oracle, perm_seed: u64) -> Result<LearnResult> {
    randomized_svm_learn_traced(sample, oracle, perm_seed).map(|(r, _)| r)
}

pub fn randomized_svm_learn_traced(
    sample: &PointSet,
    oracle: &mut Oracle,
    perm_seed: u64,
) -> Result<(LearnResult, SdlTrace)> {
    let start = oracle.queries();
    let n = sample.len();
    let pts = unit_points(sample)?;
    let order = random_order(n, perm_seed);
    // labels in pass order; the first `known` are confirmed
    let mut guess: Vec<Sign> = vec![Sign::Pos; n];
    let mut known = 0usize;
    let mut trace = SdlTrace::default();

    while known < n {
        trace.known_at_pass.push(known);
        let mut learner = MarginLearner::new(sample.dim());
        for (pos, &id) in order.iter().enumerate() {
            if pos >= known {
                guess[pos] = learner.predict(&pts[id]);
            }
            learner.reveal(&pts[id], guess[pos])?;
        }
        if check_range(sample, &order, &guess, known, n, oracle)? {
            break;
        }
        // smallest end such that positions known..end hold a wrong guess
        let (mut lo, mut hi) = (known + 1, n);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if check_range(sample, &order, &guess, known, mid, oracle)? {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        guess[lo - 1] = -guess[lo - 1];
        known = lo;
    }

    let mut predictions = vec![None; n];
    for (pos, &id) in order.iter().enumerate() {
        predictions[id] = Some(guess[pos]);
    }
    let rounds = trace.known_at_pass.len();
    Ok((LearnResult { predictions, queries_used: oracle.queries() - start, rounds }, trace))
}

/// Whether the guesses at pass positions `from..to` are all correct.
/// An empty sign class is skipped: it holds nothing to check.
fn check_range(
    sample: &PointSet,
    order: &[usize],
    guess: &[Sign],
    from: usize,
    to: usize,
    oracle: &mut Oracle,
) -> Result<bool> {
    for sign in Sign::BOTH {
        let pts: Vec<Vec<f64>> =
            (from..to).filter(|&p| guess[p] == sign).map(|p| sample.point(order[p]).to_vec()).collect();
        if pts.is_empty() {
            continue;
        }
        if !oracle.ask(Region::finite(pts), sign)? {
            return Ok(false);
        }
    }
    Ok(true)
}
