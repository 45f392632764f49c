//! Pool-based active learning with region queries.
//!
//! A learner holds a pool of unlabeled points and asks a simulated labeler
//! questions of the form "does every point of the labeling domain inside
//! region `T` carry label `z`?". The labeler answers with a single bit.
//!
//! The crate provides:
//!
//! * the labeler itself ([`oracle::Oracle`]) over a configurable labeling
//!   domain, with a policy for queries that touch no domain point;
//! * region descriptors ([`region::Region`]) and a brute-force shattering
//!   check ([`vc`]);
//! * learners for explicit finite hypothesis tables ([`general`]), unions of
//!   intervals ([`intervals`]), axis-parallel boxes ([`boxes`]) and
//!   homogeneous halfspaces ([`sdl`], [`ltf`]);
//! * the spiked-family hardness construction ([`lower_bound`]);
//! * a seeded benchmark harness ([`harness`]).

pub mod boxes;
pub mod error;
pub mod forster;
pub mod general;
pub mod harness;
pub mod intervals;
pub mod io;
pub mod linalg;
pub mod lower_bound;
pub mod ltf;
pub mod oracle;
pub mod perceptron;
pub mod point;
pub mod region;
pub mod sdl;
pub mod svm;
pub mod target;
pub mod teaching;
pub mod vc;

pub use error::{Error, Result};
pub use oracle::{EmptyPolicy, LearnResult, Oracle, RegionQuery};
pub use point::{PointSet, Sign};
pub use region::Region;
pub use target::Target;
