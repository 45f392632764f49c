//! Hidden target hypotheses the labeler evaluates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{dot, PointIndex, Sign};

/// A union of disjoint closed intervals on the real line, sorted by left endpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct UnionOfIntervals {
    intervals: Vec<[f64; 2]>,
}

impl UnionOfIntervals {
    pub fn new(mut intervals: Vec<[f64; 2]>) -> Result<Self> {
        if intervals.iter().any(|[a, b]| !(a <= b)) {
            return Err(Error::InvalidInput("interval with lo > hi".into()));
        }
        intervals.sort_by(|x, y| x[0].total_cmp(&y[0]));
        if intervals.windows(2).any(|w| w[1][0] <= w[0][1]) {
            return Err(Error::InvalidInput("intervals overlap".into()));
        }
        Ok(UnionOfIntervals { intervals })
    }

    pub fn intervals(&self) -> &[[f64; 2]] {
        &self.intervals
    }

    pub fn label(&self, x: f64) -> Sign {
        Sign::from_bool(self.intervals.iter().any(|&[a, b]| a <= x && x <= b))
    }
}

impl TryFrom<Vec<[f64; 2]>> for UnionOfIntervals {
    type Error = Error;
    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        UnionOfIntervals::new(v)
    }
}

impl From<UnionOfIntervals> for Vec<[f64; 2]> {
    fn from(u: UnionOfIntervals) -> Self {
        u.intervals
    }
}

/// One coordinate range `[lo, hi]` of a box; either end may be infinite.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    #[serde(with = "extended_f64")]
    pub lo: f64,
    #[serde(with = "extended_f64")]
    pub hi: f64,
}

/// An axis-parallel box `∏ [lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    bounds: Vec<Bound>,
}

impl AxisBox {
    pub fn new(bounds: Vec<Bound>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidInput("box needs at least one coordinate".into()));
        }
        if bounds.iter().any(|b| !(b.lo <= b.hi)) {
            return Err(Error::InvalidInput("box bound with lo > hi".into()));
        }
        Ok(AxisBox { bounds })
    }

    pub fn bounds(&self) -> &[Bound] {
        &self.bounds
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn label(&self, x: &[f64]) -> Sign {
        Sign::from_bool(self.bounds.iter().zip(x).all(|(b, &v)| b.lo <= v && v <= b.hi))
    }
}

/// `+1` exactly on `{x : normal·x >= offset}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
}

impl Halfspace {
    pub fn homogeneous(normal: Vec<f64>) -> Halfspace {
        Halfspace { normal, offset: 0.0 }
    }

    pub fn label(&self, x: &[f64]) -> Sign {
        Sign::from_bool(dot(&self.normal, x) >= self.offset)
    }
}

/// An explicit labeling of finitely many points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteLabeling {
    points: PointIndex,
    labels: Vec<Sign>,
}

impl FiniteLabeling {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<Sign>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::InvalidInput("labeling needs one label per point".into()));
        }
        Ok(FiniteLabeling { points: PointIndex::new(points), labels })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        self.points.points()
    }

    pub fn labels(&self) -> &[Sign] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn position(&self, x: &[f64]) -> Option<usize> {
        self.points.position(x)
    }

    pub fn get(&self, x: &[f64]) -> Option<Sign> {
        self.position(x).map(|i| self.labels[i])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    Intervals {
        intervals: UnionOfIntervals,
    },
    Box {
        region: AxisBox,
    },
    Halfspace {
        halfspace: Halfspace,
    },
    /// Explicit labels; points not listed get `default`.
    Finite {
        labeling: FiniteLabeling,
        default: Sign,
    },
    /// `+1` exactly on the listed points.
    PositiveSet {
        points: PointIndex,
    },
}

impl Target {
    pub fn intervals(u: UnionOfIntervals) -> Target {
        Target::Intervals { intervals: u }
    }

    pub fn axis_box(b: AxisBox) -> Target {
        Target::Box { region: b }
    }

    pub fn halfspace(normal: Vec<f64>) -> Target {
        Target::Halfspace { halfspace: Halfspace::homogeneous(normal) }
    }

    pub fn positive_set(points: Vec<Vec<f64>>) -> Target {
        Target::PositiveSet { points: PointIndex::new(points) }
    }

    /// The dimension this target is defined over, when it fixes one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Target::Intervals { .. } => Some(1),
            Target::Box { region } => Some(region.dim()),
            Target::Halfspace { halfspace } => Some(halfspace.normal.len()),
            Target::Finite { labeling, .. } => labeling.points().first().map(Vec::len),
            Target::PositiveSet { points } => points.points().first().map(Vec::len),
        }
    }

    pub fn label(&self, x: &[f64]) -> Sign {
        match self {
            Target::Intervals { intervals } => intervals.label(x[0]),
            Target::Box { region } => region.label(x),
            Target::Halfspace { halfspace } => halfspace.label(x),
            Target::Finite { labeling, default } => labeling.get(x).unwrap_or(*default),
            Target::PositiveSet { points } => Sign::from_bool(points.contains(x)),
        }
    }
}

/// Serde for `f64` that also carries `±inf` (as the strings `"inf"` / `"-inf"`).
pub mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else if *v < 0.0 {
            s.serialize_str("-inf")
        } else {
            s.serialize_str("nan")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}
