//! A modified perceptron that learns from region queries on the unit sphere.
//!
//! All geometry here lives in `R^k` with unit-norm sample points. Queries go
//! through a [`QueryChannel`], which either answers directly (tests) or lifts
//! them back to the original space ([`TransformedChannel`]).

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::orthogonal_complement;
use crate::oracle::{Oracle, RegionQuery};
use crate::point::{dot, norm, PointSet, Sign};
use crate::region::{Constraint, Polytope, Region, SubspaceMap};

/// Margin kept between the learner's own cap test and the threshold, so every
/// point the learner counts inside a cap is inside it for the labeler too.
const GUARD: f64 = 1e-9;

/// `w - x (x·w)`.
pub fn perceptron_update(w: &[f64], x: &[f64]) -> Vec<f64> {
    let p = dot(x, w);
    w.iter().zip(x).map(|(wi, xi)| wi - xi * p).collect()
}

/// Answers region queries about the transformed sample.
pub trait QueryChannel {
    /// Ask `(inner ∪ {anchor}, label)`; `inner` is over the unit sphere of
    /// `R^k`, `anchor` indexes the transformed sample.
    fn ask(&mut self, inner: &Polytope, anchor: Option<usize>, label: Sign) -> Result<bool>;
}

/// Parameters of one perceptron run in dimension `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerceptronParams {
    /// Cap threshold `1/(2√k)`.
    pub tau: f64,
    /// Grid spacing of the strip searches.
    pub delta: f64,
    /// Maximum number of updates.
    pub t_max: usize,
}

impl PerceptronParams {
    pub fn for_dim(k: usize) -> PerceptronParams {
        let kf = k as f64;
        PerceptronParams {
            tau: 1.0 / (2.0 * kf.sqrt()),
            delta: kf.powi(-4),
            t_max: (64.0 * kf * (kf.ln() + 1.0)).ceil() as usize,
        }
    }
}

/// Mutable state of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct PerceptronState {
    pub w: Vec<f64>,
    pub t: usize,
    pub params: PerceptronParams,
}

/// One logged update `w ← w - x(x·w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct UpdateRecord {
    pub w: Vec<f64>,
    pub x: Vec<f64>,
    /// True when `x` was the anchor sample point, false when it was a box point.
    pub from_anchor: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PerceptronRun {
    /// `(index into the transformed sample, label)`; empty after a bad start.
    pub labeled: Vec<(usize, Sign)>,
    pub updates: Vec<UpdateRecord>,
    pub queries: usize,
    /// The run stopped early because the start was shown not to be a good one.
    pub abandoned: bool,
}

struct Counting<'a, C: QueryChannel> {
    inner: &'a mut C,
    count: usize,
}

impl<C: QueryChannel> Counting<'_, C> {
    fn ask(&mut self, z: &Polytope, anchor: Option<usize>, label: Sign) -> Result<bool> {
        self.count += 1;
        self.inner.ask(z, anchor, label)
    }
}

fn scaled(v: &[f64], s: f64) -> Vec<f64> {
    v.iter().map(|x| x * s).collect()
}

/// The cap `{x : y v0·x >= tau}` on the sphere.
fn cap(v0: &[f64], y: Sign, tau: f64) -> Polytope {
    Polytope::sphere().with(Constraint::ge(scaled(v0, y.to_f64()), tau))
}

/// Largest `j` in `0..=len` with `g(j) = 0`, given `g(0) = 0`, `g(len + 1) = 1`
/// and `g` answering whether a shrinking family of regions is clean.
fn last_dirty(len: usize, mut clean: impl FnMut(usize) -> Result<bool>) -> Result<usize> {
    let (mut lo, mut hi) = (0usize, len + 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if clean(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}

/// Grid `from = θ_0 < ... < θ_len = to` with spacing at most `delta`.
fn grid(from: f64, to: f64, delta: f64) -> Vec<f64> {
    let len = ((to - from) / delta).ceil().max(1.0) as usize;
    (0..=len).map(|i| from + (to - from) * i as f64 / len as f64).collect()
}

/// Run the modified perceptron from `w0` on unit vectors `points` in `R^k`.
///
/// Every returned label was confirmed by a query answered 1, so it is correct
/// whatever labeling domain the channel uses.
pub fn active_perceptron<C: QueryChannel>(w0: &[f64], points: &[Vec<f64>], channel: &mut C) -> Result<PerceptronRun> {
    let k = w0.len();
    if points.iter().any(|p| p.len() != k) {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: points.iter().map(Vec::len).find(|&l| l != k).unwrap(),
        });
    }
    if norm(w0) == 0.0 {
        return Err(Error::InvalidInput("initial direction must be nonzero".into()));
    }
    let params = PerceptronParams::for_dim(k);
    let mut state = PerceptronState { w: w0.to_vec(), t: 0, params };
    let mut ch = Counting { inner: channel, count: 0 };
    let mut run = PerceptronRun::default();
    let tau = params.tau;

    // a start with w0·v* >= |w0|/(2√k) keeps w·v* above `good - drift`, and
    // w·v* <= |w|, so |w| < good - drift rules such a start out
    let good = norm(w0) / (2.0 * (k as f64).sqrt());
    let mut drift = 0.0;
    while state.t < params.t_max {
        let wn = norm(&state.w);
        if wn == 0.0 || wn < good - drift {
            run.abandoned = true;
            break;
        }
        let v0 = scaled(&state.w, 1.0 / wn);
        let mut failed: Option<(Sign, usize)> = None;
        let mut any_cap = false;
        for y in Sign::BOTH {
            let members: Vec<usize> =
                (0..points.len()).filter(|&i| y.to_f64() * dot(&v0, &points[i]) >= tau + GUARD).collect();
            if members.is_empty() {
                continue;
            }
            any_cap = true;
            if !ch.ask(&cap(&v0, y, tau), None, y)? {
                failed = Some((y, members[0]));
                break;
            }
        }
        if !any_cap {
            break;
        }
        let Some((y, anchor)) = failed else {
            run.labeled = (0..points.len())
                .filter_map(|i| {
                    let s = dot(&v0, &points[i]);
                    Sign::BOTH.into_iter().find(|y| y.to_f64() * s >= tau + GUARD).map(|y| (i, y))
                })
                .collect();
            break;
        };

        if !ch.ask(&Polytope::sphere().with(singleton_plane(&points[anchor])), Some(anchor), y)? {
            // the anchor itself is misclassified by the current direction
            run.updates.push(UpdateRecord { w: state.w.clone(), x: points[anchor].clone(), from_anchor: true });
            state.w = perceptron_update(&state.w, &points[anchor]);
            state.t += 1;
            continue;
        }

        let (x_tilde, reach) = locate_violation(&v0, y, anchor, params, &mut ch)?;
        drift += dot(&x_tilde, &state.w).abs() * reach;
        run.updates.push(UpdateRecord { w: state.w.clone(), x: x_tilde.clone(), from_anchor: false });
        state.w = perceptron_update(&state.w, &x_tilde);
        state.t += 1;
    }
    run.queries = ch.count;
    Ok(run)
}

/// A constraint no sphere point satisfies, so the region is just the anchor.
fn singleton_plane(x: &[f64]) -> Constraint {
    Constraint::ge(x.to_vec(), 2.0)
}

/// Narrow the dirty cap `{y v0·x >= tau}` to a small box that still holds a
/// point with label `-y`. Returns a unit vector near the box and the largest
/// distance from it to any point of the box.
fn locate_violation<C: QueryChannel>(
    v0: &[f64],
    y: Sign,
    anchor: usize,
    params: PerceptronParams,
    ch: &mut Counting<'_, C>,
) -> Result<(Vec<f64>, f64)> {
    let ys = y.to_f64();
    let mut dirs = vec![scaled(v0, ys)];
    dirs.extend(orthogonal_complement(v0).into_iter().map(|v| scaled(&v, ys)));

    // fixed strips so far, as [a, b] along dirs[..]
    let mut strips: Vec<[f64; 2]> = Vec::with_capacity(dirs.len());
    for (j, dir) in dirs.iter().enumerate() {
        let g = if j == 0 { grid(params.tau, 1.0, params.delta) } else { grid(-1.0, 1.0, params.delta) };
        let len = g.len() - 1;
        let base = strips.iter().zip(&dirs).fold(Polytope::sphere(), |p, (&[a, b], d)| {
            p.with(Constraint::ge(d.clone(), a)).with(Constraint::le(d.clone(), b))
        });
        let region_from = |i: usize| base.clone().with(Constraint::ge(dir.clone(), g[i]));
        let i = last_dirty(len, |i| ch.ask(&region_from(i), Some(anchor), y))?;
        let hi = if i == len { g[len] } else { g[i + 1] };
        strips.push([g[i], hi]);
    }

    // centre of the box, pushed onto the sphere, radial coordinate kept in its strip
    let mut coords: Vec<f64> = strips.iter().map(|&[a, b]| 0.5 * (a + b)).collect();
    let c = norm(&coords);
    for v in coords.iter_mut() {
        *v /= c;
    }
    let [a0, b0] = strips[0];
    let radial = coords[0].clamp(a0, b0.min(1.0));
    let rest = norm(&coords[1..]);
    let target = (1.0 - radial * radial).max(0.0).sqrt();
    coords[0] = radial;
    if rest > 0.0 {
        for v in coords[1..].iter_mut() {
            *v *= target / rest;
        }
    } else if coords.len() > 1 {
        coords[1] = target;
    }
    let mut x = vec![0.0; v0.len()];
    for (cj, d) in coords.iter().zip(&dirs) {
        for (xi, di) in x.iter_mut().zip(d) {
            *xi += cj * di;
        }
    }
    let n = norm(&x);
    let x: Vec<f64> = x.iter().map(|v| v / n).collect();
    let reach = dirs
        .iter()
        .zip(&strips)
        .map(|(d, &[a, b])| {
            let c = dot(d, &x);
            (c - a).abs().max((c - b).abs()).powi(2)
        })
        .sum::<f64>()
        .sqrt();
    Ok((x, reach + 1e-12))
}

/// Lift a query over the transformed sphere to the original space.
///
/// `map.basis` is `d × k`; constraint normals are mapped through it, and the
/// anchor is the original point.
pub fn simulate_transformed_query(
    z: &Polytope,
    anchor: Option<&[f64]>,
    map: &Arc<SubspaceMap>,
    y: Sign,
) -> RegionQuery {
    let basis = &map.basis;
    let rows = z
        .rows
        .iter()
        .map(|c| {
            let lifted = basis * nalgebra::DVector::from_column_slice(&c.normal);
            Constraint { normal: lifted.iter().copied().collect(), offset: c.offset, sense: c.sense }
        })
        .collect();
    RegionQuery::new(
        Region::TransformedPolytope {
            map: Arc::clone(map),
            inner: Polytope::new(rows, z.on_sphere),
            anchor: anchor.map(<[f64]>::to_vec),
        },
        y,
    )
}

/// Channel that lifts each query into the original space and asks the labeler.
pub struct TransformedChannel<'a> {
    pub oracle: &'a mut Oracle,
    pub map: Arc<SubspaceMap>,
    /// Original points, indexed like the transformed sample.
    pub originals: Vec<Vec<f64>>,
}

impl TransformedChannel<'_> {
    pub fn new<'a>(
        oracle: &'a mut Oracle,
        map: Arc<SubspaceMap>,
        sample: &PointSet,
        kept_ids: &[usize],
    ) -> TransformedChannel<'a> {
        let originals = kept_ids.iter().map(|&i| sample.point(i).to_vec()).collect();
        TransformedChannel { oracle, map, originals }
    }
}

impl QueryChannel for TransformedChannel<'_> {
    fn ask(&mut self, inner: &Polytope, anchor: Option<usize>, label: Sign) -> Result<bool> {
        let anchor_pt = match anchor {
            Some(i) => Some(
                self.originals
                    .get(i)
                    .ok_or_else(|| Error::InvalidInput(format!("anchor {i} is not a kept point")))?
                    .as_slice(),
            ),
            None => None,
        };
        let q = simulate_transformed_query(inner, anchor_pt, &self.map, label);
        self.oracle.answer(&q)
    }
}

/// Channel over explicit unit vectors labeled by `sign(v·x)`.
pub struct DirectChannel {
    pub points: Vec<Vec<f64>>,
    pub target: Vec<f64>,
    pub asked: usize,
    pub empty_queries: usize,
}

impl DirectChannel {
    pub fn new(points: Vec<Vec<f64>>, target: Vec<f64>) -> DirectChannel {
        DirectChannel { points, target, asked: 0, empty_queries: 0 }
    }
}

impl QueryChannel for DirectChannel {
    fn ask(&mut self, inner: &Polytope, anchor: Option<usize>, label: Sign) -> Result<bool> {
        self.asked += 1;
        let mut any = false;
        for (i, p) in self.points.iter().enumerate() {
            if anchor == Some(i) || inner.contains(p) {
                any = true;
                if Sign::of(dot(&self.target, p)) != label {
                    return Ok(false);
                }
            }
        }
        if !any {
            self.empty_queries += 1;
        }
        Ok(true)
    }
}

/// `A^{-T} w` restricted to the transformed subspace, normalized, in `k` coordinates.
pub fn transformed_target(map: &SubspaceMap, w: &[f64]) -> Option<Vec<f64>> {
    let a_inv_t: DMatrix<f64> = map.transform.clone().try_inverse()?.transpose();
    let v = &a_inv_t * nalgebra::DVector::from_column_slice(w);
    let coords = map.basis.tr_mul(&v);
    let n = coords.norm();
    (n > 0.0).then(|| coords.iter().map(|x| x / n).collect())
}
