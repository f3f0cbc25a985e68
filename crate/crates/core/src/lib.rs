//! Geometric intersection-graph diameter algorithms.
//!
//! The crate decides small diameters of intersection graphs of unit disks,
//! unit squares and fixed-slope segments, ships brute-force oracles used as
//! ground truth, measures VC-dimension lower bounds of ball families, and
//! generates the hardness constructions used for benchmarking.

pub mod error;
pub mod generators;
pub mod geometry;
pub mod oracle;
pub mod random;
pub mod segments;
pub mod shatter;
pub mod unit_disk;
pub mod unit_square;

pub use error::{GeoError, Result};
pub use geometry::{Point, PredicateConfig, Shape, SlopeTable};
pub use oracle::{build_graph, exact_diameter, DiameterResult, DiameterValue, IntersectionGraph};
