//! Approximate radially isotropic position.
//!
//! [`forster_transform`] finds a subspace `V` and an invertible map `A` such
//! that the normalized images `Ax/‖Ax‖` of the sample points in `V` have a
//! second-moment matrix whose smallest eigenvalue is at least `1/k - ε`, where
//! `k = dim V`. It iterates `A ← (k·M)^{-1/2} A`. When that stalls because too
//! many points crowd into a proper subspace, it moves to such a subspace and
//! starts over. The output is checked before it is returned.

use nalgebra::DMatrix;
use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{inverse_sqrt, min_eigenvalue, second_moment, sorted_eigen};
use crate::point::{dot, norm, normalized, PointSet};
use crate::region::SubspaceMap;

pub const MAX_ITERS: usize = 10_000;
const UNIT_TOL: f64 = 1e-9;
const RANK_TOL: f64 = 1e-12;
const HEAVY_SEED: u64 = 0x5eed_f0e5;
const RANDOM_SUBSPACE_TRIES: usize = 256;

/// Whether unit vectors are in `eps`-approximate radially isotropic position.
pub fn isotropy_check(points: &[Vec<f64>], eps: f64) -> Result<bool> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidInput("isotropy check needs points".into()));
    };
    let k = first.len();
    for p in points {
        if p.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: p.len() });
        }
        if (norm(p) - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidInput("isotropy check needs unit vectors".into()));
        }
    }
    Ok(isotropy_gap(points) >= -eps)
}

/// `λ_min(M) - 1/k` for the second moment `M` of `points`.
fn isotropy_gap(points: &[Vec<f64>]) -> f64 {
    let k = points[0].len();
    let m = second_moment(k, points.iter().map(Vec::as_slice));
    min_eigenvalue(&m) - 1.0 / k as f64
}

/// Fraction of `points` with `|u·x| >= gamma`.
pub fn margin_fraction(points: &[Vec<f64>], u: &[f64], gamma: f64) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    points.iter().filter(|x| dot(u, x).abs() >= gamma).count() as f64 / points.len() as f64
}

#[derive(Clone, Debug)]
pub struct ForsterResult {
    /// `A` in ambient coordinates; maps `V` onto itself.
    pub transform: DMatrix<f64>,
    /// Orthonormal columns spanning `V`.
    pub basis: DMatrix<f64>,
    /// `Ax/‖Ax‖` for each kept point, in the coordinates of `basis`.
    pub transformed_points: Vec<Vec<f64>>,
    /// Sample ids of the points lying in `V`, in ascending order.
    pub kept_ids: Vec<usize>,
    /// Fixed-point iterations over all attempted subspaces.
    pub iterations: usize,
    /// The `ε` the output was verified at.
    pub eps: f64,
}

impl ForsterResult {
    pub fn subspace_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn map(&self) -> SubspaceMap {
        SubspaceMap { transform: self.transform.clone(), basis: self.basis.clone() }
    }
}

/// Transform with `ε = 1/(2k)`, `k` being the dimension of the found subspace.
pub fn forster_transform(sample: &PointSet) -> Result<ForsterResult> {
    forster_transform_with(sample, |k| 1.0 / (2.0 * k as f64))
}

/// Transform with `ε = eps_for(k)`.
pub fn forster_transform_with(sample: &PointSet, eps_for: impl Fn(usize) -> f64) -> Result<ForsterResult> {
    let d = sample.dim();
    let n = sample.len();
    if n == 0 {
        return Err(Error::InvalidInput("forster transform needs points".into()));
    }
    if sample.iter().any(|x| norm(x) == 0.0) {
        return Err(Error::InvalidInput("forster transform needs nonzero points".into()));
    }
    let unit: Vec<Vec<f64>> = sample.iter().map(normalized).collect();
    let mut basis = span_basis(d, &unit);
    let mut iterations = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(HEAVY_SEED);

    loop {
        let k = basis.ncols();
        let probe = SubspaceMap { transform: DMatrix::identity(d, d), basis: basis.clone() };
        let kept_ids: Vec<usize> = (0..n).filter(|&i| probe.in_subspace(sample.point(i))).collect();
        if kept_ids.is_empty() {
            return Err(Error::ForsterNonConvergence("no sample point lies in the subspace".into()));
        }
        let coords: Vec<Vec<f64>> = kept_ids.iter().map(|&i| normalized(&project(&basis, &unit[i]))).collect();
        let eps = eps_for(k);
        let (a_k, iters, ok) = iterate(&coords, eps);
        iterations += iters;
        if ok {
            let transformed: Vec<Vec<f64>> = coords.iter().map(|y| apply_normalized(&a_k, y)).collect();
            let result = ForsterResult {
                transform: lift(&basis, &a_k),
                basis,
                transformed_points: transformed,
                kept_ids,
                iterations,
                eps,
            };
            verify(&result, n, d)?;
            return Ok(result);
        }
        if k == 1 {
            return Err(Error::ForsterNonConvergence("one-dimensional subspace failed to converge".into()));
        }
        match heavy_subspace(&coords, &a_k, &mut rng) {
            Some(w) => basis = &basis * w,
            None => {
                return Err(Error::ForsterNonConvergence(format!(
                    "no isotropic position after {iters} iterations in dimension {k} and no heavy subspace found"
                )))
            }
        }
    }
}

fn verify(r: &ForsterResult, n: usize, d: usize) -> Result<()> {
    let k = r.subspace_dim();
    if r.kept_ids.len() * d < k * n {
        return Err(Error::ForsterNonConvergence(format!(
            "kept {} of {n} points in a {k}-dimensional subspace of R^{d}",
            r.kept_ids.len()
        )));
    }
    if !isotropy_check(&r.transformed_points, r.eps)? {
        return Err(Error::ForsterNonConvergence("output failed the isotropy check".into()));
    }
    Ok(())
}

/// Orthonormal basis of the span of `points` (columns, largest directions first).
fn span_basis(d: usize, points: &[Vec<f64>]) -> DMatrix<f64> {
    let m = second_moment(d, points.iter().map(Vec::as_slice));
    let (values, vectors) = sorted_eigen(&m);
    let top = values[d - 1].max(0.0);
    let cols: Vec<usize> = (0..d).rev().filter(|&i| values[i] > RANK_TOL * top.max(1e-300)).collect();
    DMatrix::from_fn(d, cols.len(), |r, c| vectors[(r, cols[c])])
}

fn project(basis: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (0..basis.ncols()).map(|c| basis.column(c).iter().zip(x).map(|(b, v)| b * v).sum()).collect()
}

fn apply_normalized(a: &DMatrix<f64>, y: &[f64]) -> Vec<f64> {
    let v = a * nalgebra::DVector::from_column_slice(y);
    let n = v.norm();
    v.iter().map(|x| x / n).collect()
}

/// `U A_k Uᵀ + (I - U Uᵀ)`.
fn lift(basis: &DMatrix<f64>, a_k: &DMatrix<f64>) -> DMatrix<f64> {
    let d = basis.nrows();
    let proj = basis * basis.transpose();
    basis * a_k * basis.transpose() + (DMatrix::identity(d, d) - proj)
}

/// Fixed-point iteration in `k` coordinates. Returns `(A_k, iterations, converged)`.
fn iterate(coords: &[Vec<f64>], eps: f64) -> (DMatrix<f64>, usize, bool) {
    let k = coords[0].len();
    let mut a = DMatrix::identity(k, k);
    for it in 0..MAX_ITERS {
        let imgs: Vec<Vec<f64>> = coords.iter().map(|y| apply_normalized(&a, y)).collect();
        if imgs.iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            return (a, it, false);
        }
        if isotropy_gap(&imgs) >= -eps {
            return (a, it, true);
        }
        let m = second_moment(k, imgs.iter().map(Vec::as_slice)) * k as f64;
        let Some(r) = inverse_sqrt(&m) else { return (a, it, false) };
        a = r * a;
        let s = a.norm();
        if !(s.is_finite() && s > 0.0) {
            return (a, it, false);
        }
        a /= s;
    }
    (a, MAX_ITERS, false)
}

/// A subspace (orthonormal `k × m` columns) holding at least an `m/k` share of
/// the points, found by pulling back top eigenspaces of the stalled images or
/// by spanning random point subsets.
fn heavy_subspace(coords: &[Vec<f64>], a: &DMatrix<f64>, rng: &mut ChaCha8Rng) -> Option<DMatrix<f64>> {
    let k = coords[0].len();
    let n = coords.len();
    let mut candidates: Vec<DMatrix<f64>> = Vec::new();

    if let Some(a_inv) = a.clone().try_inverse() {
        let imgs: Vec<Vec<f64>> = coords.iter().map(|y| apply_normalized(a, y)).collect();
        let m = second_moment(k, imgs.iter().map(Vec::as_slice));
        let (_, vecs) = sorted_eigen(&m);
        for dim in 1..k {
            let top = DMatrix::from_fn(k, dim, |r, c| vecs[(r, k - 1 - c)]);
            if let Some(w) = orthonormal_columns(&(&a_inv * top)) {
                candidates.push(w);
            }
        }
    }
    for _ in 0..RANDOM_SUBSPACE_TRIES {
        let dim = rng.random_range(1..k);
        let picks = sample_indices(rng, n, dim.min(n));
        let cols: Vec<f64> = picks.iter().flat_map(|i| coords[i].iter().copied()).collect();
        if let Some(w) = orthonormal_columns(&DMatrix::from_column_slice(k, picks.len(), &cols)) {
            candidates.push(w);
        }
    }

    let mut best: Option<(f64, DMatrix<f64>)> = None;
    for w in candidates {
        let dim = w.ncols();
        let probe = SubspaceMap { transform: DMatrix::identity(k, k), basis: w.clone() };
        let inside = coords.iter().filter(|y| probe.in_subspace(y)).count();
        if inside * k >= dim * n && inside > 0 {
            let share = inside as f64 / dim as f64;
            if best.as_ref().is_none_or(|(s, _)| share > *s) {
                best = Some((share, w));
            }
        }
    }
    best.map(|(_, w)| w)
}

/// Orthonormal basis of the column space, or `None` if the columns are dependent.
fn orthonormal_columns(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for c in 0..m.ncols() {
        let mut v: Vec<f64> = m.column(c).iter().copied().collect();
        let scale = norm(&v);
        for _ in 0..2 {
            for b in &out {
                let p = dot(&v, b);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= p * bi;
                }
            }
        }
        let len = norm(&v);
        if len <= 1e-9 * scale.max(1e-300) {
            return None;
        }
        out.push(v.iter().map(|x| x / len).collect());
    }
    let rows = m.nrows();
    Some(DMatrix::from_fn(rows, out.len(), |r, c| out[c][r]))
}
