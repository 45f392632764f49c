//! Hard-margin homogeneous linear separator.
//!
//! The maximum-margin unit vector for labeled points `(x_i, y_i)` is the
//! direction of the minimum-norm point of the convex hull of `y_i x_i`, and the
//! margin is that point's norm. The hull point is found with Wolfe's
//! active-set method, which is exact up to floating point and deterministic.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::point::{dot, norm, Sign};

const OPT_TOL: f64 = 1e-12;
const WEIGHT_TOL: f64 = 1e-14;
const MAX_MAJOR: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct MaxMarginModel {
    /// Unit normal of the separating hyperplane through the origin.
    pub weights: Vec<f64>,
    /// `min_i y_i (w · x_i)`; zero for an empty fit.
    pub margin: f64,
    /// Indices of the points attaining the margin.
    pub support_ids: Vec<usize>,
}

impl MaxMarginModel {
    /// The default model over no data: `e_1`.
    pub fn empty(dim: usize) -> MaxMarginModel {
        let mut weights = vec![0.0; dim];
        if dim > 0 {
            weights[0] = 1.0;
        }
        MaxMarginModel { weights, margin: 0.0, support_ids: Vec::new() }
    }

    /// `sign(w · x)`, with ties going to `+1`.
    pub fn predict(&self, x: &[f64]) -> Sign {
        Sign::of(dot(&self.weights, x))
    }
}

/// Fit the maximum-margin homogeneous separator of `points` with `labels`.
///
/// Fails with [`Error::NonSeparable`] when no unit vector separates the data
/// with positive margin.
pub fn max_margin_fit(dim: usize, points: &[&[f64]], labels: &[Sign]) -> Result<MaxMarginModel> {
    if points.len() != labels.len() {
        return Err(Error::InvalidInput("one label per point required".into()));
    }
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
    }
    if points.is_empty() {
        return Ok(MaxMarginModel::empty(dim));
    }
    let z: Vec<Vec<f64>> = points.iter().zip(labels).map(|(p, y)| p.iter().map(|v| v * y.to_f64()).collect()).collect();
    let p = min_norm_point(&z)?;
    let m = norm(&p);
    let scale = z.iter().map(|v| norm(v)).fold(0.0, f64::max);
    if m <= 1e-10 * scale.max(1e-300) {
        return Err(Error::NonSeparable);
    }
    let weights: Vec<f64> = p.iter().map(|v| v / m).collect();
    let margins: Vec<f64> = z.iter().map(|v| dot(&weights, v)).collect();
    let margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    if margin <= 0.0 {
        return Err(Error::NonSeparable);
    }
    let support_ids = (0..z.len()).filter(|&i| margins[i] <= margin + 1e-9 * scale).collect();
    Ok(MaxMarginModel { weights, margin, support_ids })
}

/// Minimum-norm point of the convex hull of `pts` (Wolfe's algorithm).
pub fn min_norm_point(pts: &[Vec<f64>]) -> Result<Vec<f64>> {
    let sq = |v: &[f64]| dot(v, v);
    let scale = pts.iter().map(|v| sq(v)).fold(0.0, f64::max).max(1e-300);
    let first = (0..pts.len())
        .min_by(|&a, &b| sq(&pts[a]).total_cmp(&sq(&pts[b])))
        .ok_or(Error::InvalidInput("min_norm_point needs points".into()))?;
    let mut active = vec![first];
    let mut lambda = vec![1.0];
    let mut x = pts[first].clone();

    for _ in 0..MAX_MAJOR {
        let xx = sq(&x);
        if xx <= 1e-24 * scale {
            return Ok(x);
        }
        let j = (0..pts.len()).min_by(|&a, &b| dot(&x, &pts[a]).total_cmp(&dot(&x, &pts[b]))).expect("nonempty");
        if xx - dot(&x, &pts[j]) <= OPT_TOL * scale || active.contains(&j) {
            return Ok(x);
        }
        active.push(j);
        lambda.push(0.0);

        loop {
            let mu = affine_min_norm(pts, &active);
            if mu.iter().all(|&m| m > WEIGHT_TOL) {
                lambda = mu;
                break;
            }
            // step toward mu until some weight hits zero, then drop it
            let mut theta = 1.0f64;
            for (l, m) in lambda.iter().zip(&mu) {
                if *m <= WEIGHT_TOL && l - m > 0.0 {
                    theta = theta.min(l / (l - m));
                }
            }
            for (l, m) in lambda.iter_mut().zip(&mu) {
                *l += theta * (m - *l);
            }
            let mut keep_a = Vec::with_capacity(active.len());
            let mut keep_l = Vec::with_capacity(active.len());
            for (&a, &l) in active.iter().zip(&lambda) {
                if l > WEIGHT_TOL {
                    keep_a.push(a);
                    keep_l.push(l);
                }
            }
            if keep_a.is_empty() {
                // numerical corner: restart from the best single vertex
                keep_a.push(j);
                keep_l.push(1.0);
            }
            let total: f64 = keep_l.iter().sum();
            active = keep_a;
            lambda = keep_l.into_iter().map(|l| l / total).collect();
            if active.len() == 1 {
                break;
            }
        }
        x = combine(pts, &active, &lambda);
    }
    Err(Error::InvalidInput("min-norm point iteration did not settle".into()))
}

fn combine(pts: &[Vec<f64>], active: &[usize], lambda: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; pts[0].len()];
    for (&a, &l) in active.iter().zip(lambda) {
        for (xi, pi) in x.iter_mut().zip(&pts[a]) {
            *xi += l * pi;
        }
    }
    x
}

/// Weights of the minimum-norm point of the affine hull of the active points.
fn affine_min_norm(pts: &[Vec<f64>], active: &[usize]) -> Vec<f64> {
    let m = active.len();
    let mut sys = DMatrix::zeros(m + 1, m + 1);
    for (r, &a) in active.iter().enumerate() {
        for (c, &b) in active.iter().enumerate() {
            sys[(r, c)] = dot(&pts[a], &pts[b]);
        }
        sys[(r, m)] = 1.0;
        sys[(m, r)] = 1.0;
    }
    let mut rhs = DVector::zeros(m + 1);
    rhs[m] = 1.0;
    let sol = sys.clone().lu().solve(&rhs).filter(|s| s.iter().all(|v| v.is_finite())).unwrap_or_else(|| {
        sys.svd(true, true).solve(&rhs, 1e-14).unwrap_or_else(|_| {
            let mut s = DVector::zeros(m + 1);
            s[0] = 1.0;
            s
        })
    });
    sol.iter().take(m).copied().collect()
}
