use std::collections::HashMap;
use std::fmt;
use std::ops::Neg;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A binary label, serialized as `+1` / `-1`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Neg,
    Pos,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Pos, Sign::Neg];

    /// `+1` for non-negative values, `-1` otherwise.
    pub fn of(value: f64) -> Sign {
        if value >= 0.0 {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }

    pub fn from_bool(positive: bool) -> Sign {
        if positive {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Sign::Pos => 1.0,
            Sign::Neg => -1.0,
        }
    }

    pub fn to_i8(self) -> i8 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn is_pos(self) -> bool {
        self == Sign::Pos
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.to_i8()
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Sign, String> {
        match v {
            1 => Ok(Sign::Pos),
            -1 => Ok(Sign::Neg),
            other => Err(format!("label must be +1 or -1, got {other}")),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Pos => write!(f, "+1"),
            Sign::Neg => write!(f, "-1"),
        }
    }
}

/// Bitwise identity of a point, usable as a hash key.
///
/// `-0.0` and `0.0` map to the same key.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointKey(Vec<u64>);

impl PointKey {
    pub fn new(x: &[f64]) -> PointKey {
        PointKey(x.iter().map(|&v| if v == 0.0 { 0.0f64.to_bits() } else { v.to_bits() }).collect())
    }
}

/// A finite ordered collection of points sharing one dimension.
///
/// Point ids are the positions `0..len`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize) -> PointSet {
        assert!(dim >= 1, "points need at least one coordinate");
        PointSet { dim, coords: Vec::new() }
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<PointSet> {
        let dim = match rows.first() {
            Some(r) => r.as_ref().len(),
            None => return Err(Error::InvalidInput("empty point list; use PointSet::new".into())),
        };
        if dim == 0 {
            return Err(Error::InvalidInput("points need at least one coordinate".into()));
        }
        let mut set = PointSet::new(dim);
        for r in rows {
            set.push(r.as_ref())?;
        }
        Ok(set)
    }

    /// One-dimensional point set from scalars.
    pub fn from_scalars(values: &[f64]) -> PointSet {
        PointSet { dim: 1, coords: values.to_vec() }
    }

    pub fn push(&mut self, x: &[f64]) -> Result<usize> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        self.coords.extend_from_slice(x);
        Ok(self.len() - 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, id: usize) -> &[f64] {
        &self.coords[id * self.dim..(id + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// The points with the given ids, renumbered from zero.
    pub fn subset(&self, ids: &[usize]) -> PointSet {
        let mut coords = Vec::with_capacity(ids.len() * self.dim);
        for &i in ids {
            coords.extend_from_slice(self.point(i));
        }
        PointSet { dim: self.dim, coords }
    }

    /// Concatenation of `self` followed by `other`.
    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Ok(PointSet { dim: self.dim, coords })
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter().map(|p| p.to_vec()).collect()
    }

    /// Ids sorted by coordinate-lexicographic order, ties by id.
    pub fn lexicographic_order(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.len()).collect();
        ids.sort_by(|&a, &b| {
            let (pa, pb) = (self.point(a), self.point(b));
            pa.iter()
                .zip(pb)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        ids
    }
}

/// A list of points with constant-time exact-match lookup.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct PointIndex {
    points: Vec<Vec<f64>>,
    lookup: HashMap<PointKey, usize>,
}

impl PointIndex {
    pub fn new(points: Vec<Vec<f64>>) -> PointIndex {
        let mut lookup = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            lookup.entry(PointKey::new(p)).or_insert(i);
        }
        PointIndex { points, lookup }
    }

    pub fn from_set(set: &PointSet) -> PointIndex {
        PointIndex::new(set.to_rows())
    }

    /// Position of the first stored point equal to `x`.
    pub fn position(&self, x: &[f64]) -> Option<usize> {
        self.lookup.get(&PointKey::new(x)).copied()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.lookup.contains_key(&PointKey::new(x))
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl PartialEq for PointIndex {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
    }
}

impl From<Vec<Vec<f64>>> for PointIndex {
    fn from(points: Vec<Vec<f64>>) -> Self {
        PointIndex::new(points)
    }
}

impl From<PointIndex> for Vec<Vec<f64>> {
    fn from(index: PointIndex) -> Self {
        index.points
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalized(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    a.iter().map(|v| v / n).collect()
}
