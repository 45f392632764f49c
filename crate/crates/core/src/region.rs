//! Query regions and their membership tests.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::row_major;
use crate::point::{dot, PointKey, PointSet, Sign};
use crate::target::FiniteLabeling;

/// Relative tolerance for "lies in the subspace" and "has unit norm" tests.
pub const SUBSPACE_TOL: f64 = 1e-9;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
}

impl Sense {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Sense::Ge => value >= threshold,
            Sense::Le => value <= threshold,
        }
    }
}

/// One linear constraint `normal·x (sense) offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub sense: Sense,
}

impl Constraint {
    pub fn ge(normal: Vec<f64>, offset: f64) -> Constraint {
        Constraint { normal, offset, sense: Sense::Ge }
    }

    pub fn le(normal: Vec<f64>, offset: f64) -> Constraint {
        Constraint { normal, offset, sense: Sense::Le }
    }

    pub fn holds(&self, x: &[f64]) -> bool {
        self.sense.holds(dot(&self.normal, x), self.offset)
    }
}

/// Intersection of halfspaces, optionally restricted to the unit sphere.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Polytope {
    pub rows: Vec<Constraint>,
    pub on_sphere: bool,
}

impl Polytope {
    pub fn new(rows: Vec<Constraint>, on_sphere: bool) -> Polytope {
        Polytope { rows, on_sphere }
    }

    /// The whole unit sphere.
    pub fn sphere() -> Polytope {
        Polytope { rows: Vec::new(), on_sphere: true }
    }

    pub fn with(mut self, c: Constraint) -> Polytope {
        self.rows.push(c);
        self
    }

    pub fn dim(&self) -> Option<usize> {
        self.rows.first().map(|r| r.normal.len())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if self.on_sphere && (dot(x, x).sqrt() - 1.0).abs() > SUBSPACE_TOL {
            return false;
        }
        self.rows.iter().all(|r| r.holds(x))
    }
}

/// An invertible map `A` together with an orthonormal basis of a subspace `V`.
///
/// `image(x) = Ax/‖Ax‖` for `x ∈ V`, undefined elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceMap {
    #[serde(with = "row_major")]
    pub transform: DMatrix<f64>,
    /// Columns span `V`.
    #[serde(with = "row_major")]
    pub basis: DMatrix<f64>,
}

impl SubspaceMap {
    pub fn identity(dim: usize) -> SubspaceMap {
        SubspaceMap { transform: DMatrix::identity(dim, dim), basis: DMatrix::identity(dim, dim) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.transform.nrows()
    }

    pub fn subspace_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn in_subspace(&self, x: &[f64]) -> bool {
        let v = DVector::from_column_slice(x);
        let coords = self.basis.tr_mul(&v);
        let residual = (&v - &self.basis * coords).norm();
        residual <= SUBSPACE_TOL * v.norm().max(1.0)
    }

    /// `Ax/‖Ax‖` when `x ∈ V` and `Ax ≠ 0`.
    pub fn image(&self, x: &[f64]) -> Option<Vec<f64>> {
        if !self.in_subspace(x) {
            return None;
        }
        let y = &self.transform * DVector::from_column_slice(x);
        let n = y.norm();
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        Some(y.iter().map(|v| v / n).collect())
    }
}

/// A serializable query region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    /// Closed interval `[lo, hi]` on the real line.
    Interval {
        lo: f64,
        hi: f64,
    },
    /// `{x : x[coord] (sense) threshold}`.
    AxisHalfspace {
        coord: usize,
        sense: Sense,
        threshold: f64,
    },
    HalfspacePolytope {
        polytope: Polytope,
    },
    /// `{x ∈ V : Ax/‖Ax‖ ∈ inner} ∪ {anchor}`.
    TransformedPolytope {
        map: Arc<SubspaceMap>,
        inner: Polytope,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        anchor: Option<Vec<f64>>,
    },
    /// `{x : g(x) = sign}`, optionally cut to positions `[lo, hi]` of `g`'s point order.
    HypothesisPositiveSet {
        hypothesis: Arc<FiniteLabeling>,
        sign: Sign,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order_range: Option<[usize; 2]>,
    },
    FiniteSet {
        points: Vec<Vec<f64>>,
    },
}

impl Region {
    pub fn interval(lo: f64, hi: f64) -> Result<Region> {
        if !(lo <= hi) {
            return Err(Error::InvalidInput(format!("interval needs lo <= hi, got [{lo}, {hi}]")));
        }
        Ok(Region::Interval { lo, hi })
    }

    pub fn axis(coord: usize, sense: Sense, threshold: f64) -> Region {
        Region::AxisHalfspace { coord, sense, threshold }
    }

    pub fn finite(points: Vec<Vec<f64>>) -> Region {
        Region::FiniteSet { points }
    }

    pub fn polytope(polytope: Polytope) -> Region {
        Region::HalfspacePolytope { polytope }
    }

    /// The ambient dimension, when the descriptor pins one down.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Region::Interval { .. } => Some(1),
            Region::AxisHalfspace { .. } => None,
            Region::HalfspacePolytope { polytope } => polytope.dim(),
            Region::TransformedPolytope { map, .. } => Some(map.ambient_dim()),
            Region::HypothesisPositiveSet { hypothesis, .. } => hypothesis.points().first().map(Vec::len),
            Region::FiniteSet { points } => points.first().map(Vec::len),
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if let Region::AxisHalfspace { coord, .. } = self {
            if *coord >= x.len() {
                return Err(Error::DimensionMismatch { expected: coord + 1, got: x.len() });
            }
        }
        match self.dim() {
            Some(d) if d != x.len() => Err(Error::DimensionMismatch { expected: d, got: x.len() }),
            _ => Ok(()),
        }
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.check_dim(x)?;
        Ok(self.contains_unchecked(x))
    }

    /// Membership without the dimension check.
    pub fn contains_unchecked(&self, x: &[f64]) -> bool {
        match self {
            Region::Interval { lo, hi } => *lo <= x[0] && x[0] <= *hi,
            Region::AxisHalfspace { coord, sense, threshold } => sense.holds(x[*coord], *threshold),
            Region::HalfspacePolytope { polytope } => polytope.contains(x),
            Region::TransformedPolytope { map, inner, anchor } => {
                if anchor.as_deref().is_some_and(|a| PointKey::new(a) == PointKey::new(x)) {
                    return true;
                }
                map.image(x).is_some_and(|y| inner.contains(&y))
            }
            Region::HypothesisPositiveSet { hypothesis, sign, order_range } => match hypothesis.position(x) {
                Some(p) => {
                    let in_range = order_range.is_none_or(|[lo, hi]| lo <= p && p <= hi);
                    in_range && hypothesis.labels()[p] == *sign
                }
                None => false,
            },
            Region::FiniteSet { points } => {
                let key = PointKey::new(x);
                points.iter().any(|p| PointKey::new(p) == key)
            }
        }
    }

    /// Whether some point of `sample` lies in the region.
    pub fn intersects(&self, sample: &PointSet) -> Result<bool> {
        for x in sample.iter() {
            if self.contains(x)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_membership() {
        assert!(Region::interval(0.0, 1.0).unwrap().contains(&[0.5]).unwrap());
        assert!(Region::axis(1, Sense::Ge, 2.0).contains(&[0.0, 3.0]).unwrap());
        assert!(Region::interval(1.0, 0.0).is_err());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let r = Region::interval(0.0, 1.0).unwrap();
        assert!(matches!(r.contains(&[0.0, 1.0]), Err(Error::DimensionMismatch { .. })));
        let a = Region::axis(2, Sense::Le, 0.0);
        assert!(a.contains(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn transformed_identity_cap() {
        let inner = Polytope::sphere().with(Constraint::ge(vec![1.0, 0.0], 0.9));
        let r = Region::TransformedPolytope { map: Arc::new(SubspaceMap::identity(2)), inner, anchor: None };
        assert!(r.contains(&[1.0, 0.0]).unwrap());
        // scaled points are normalized before the inner test
        assert!(r.contains(&[3.0, 0.1]).unwrap());
        assert!(!r.contains(&[0.0, 1.0]).unwrap());
    }

    #[test]
    fn transformed_rejects_points_off_subspace_unless_anchor() {
        let map =
            SubspaceMap { transform: DMatrix::identity(2, 2), basis: DMatrix::from_column_slice(2, 1, &[1.0, 0.0]) };
        let r =
            Region::TransformedPolytope { map: Arc::new(map), inner: Polytope::sphere(), anchor: Some(vec![0.0, 5.0]) };
        assert!(r.contains(&[2.0, 0.0]).unwrap());
        assert!(!r.contains(&[2.0, 1e-3]).unwrap());
        assert!(r.contains(&[0.0, 5.0]).unwrap());
    }

    #[test]
    fn intersects_sample() {
        let s = PointSet::from_scalars(&[0.5]);
        assert!(Region::interval(0.0, 1.0).unwrap().intersects(&s).unwrap());
        assert!(!Region::interval(5.0, 6.0).unwrap().intersects(&s).unwrap());
        let quadrant = Region::polytope(
            Polytope::default().with(Constraint::ge(vec![1.0, 0.0], 0.0)).with(Constraint::ge(vec![0.0, 1.0], 0.0)),
        );
        let s2 = PointSet::from_rows(&[[1.0, 1.0], [-1.0, -1.0]]).unwrap();
        assert!(quadrant.intersects(&s2).unwrap());
    }

    #[test]
    fn hypothesis_positive_set_respects_order_range() {
        let g =
            FiniteLabeling::new(vec![vec![1.0], vec![2.0], vec![3.0]], vec![Sign::Pos, Sign::Neg, Sign::Pos]).unwrap();
        let r = Region::HypothesisPositiveSet { hypothesis: Arc::new(g), sign: Sign::Pos, order_range: Some([0, 1]) };
        assert!(r.contains(&[1.0]).unwrap());
        assert!(!r.contains(&[2.0]).unwrap());
        assert!(!r.contains(&[3.0]).unwrap());
        assert!(!r.contains(&[4.0]).unwrap());
    }

    #[test]
    fn json_uses_kind_tag_and_row_major_matrices() {
        let map = SubspaceMap {
            transform: DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]),
            basis: DMatrix::identity(2, 2),
        };
        let r = Region::TransformedPolytope { map: Arc::new(map), inner: Polytope::sphere(), anchor: None };
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["kind"], "transformed_polytope");
        assert_eq!(v["map"]["transform"], serde_json::json!([[1.0, 2.0], [3.0, 4.0]]));
        let back: Region = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
