//! Billiard dynamics in rational polygons.
//!
//! The engine traces the billiard flow with the mirror law, unfolds
//! trajectories into corridors of reflected tables, enumerates generalized
//! diagonals, finds periodic orbits (perpendicular orbits and translation
//! words), and measures how evenly orbits spread over the table.
//!
//! All geometry is generic over [`Scalar`]; [`Rational`] gives exact
//! results, `f64` trades exactness for speed with a tolerance τ.

pub mod error;
pub mod flow;
pub mod geom;
pub mod periodic;
pub mod polygon;
pub mod scalar;
pub mod stats;
pub mod unfolding;

pub use error::{FlowError, GeomError, ParseError, PolygonError};
pub use geom::{Direction, Isometry, Point, Segment};
pub use polygon::{build_polygon, FloorSet, Polygon};
pub use scalar::{Rational, Scalar};

pub type ExactPoint = Point<Rational>;
pub type ExactDirection = Direction<Rational>;
pub type ExactPolygon = Polygon<Rational>;
pub type ExactOrbit = flow::Orbit<Rational>;
pub type ExactCylinder = periodic::Cylinder<Rational>;

pub type FloatPoint = Point<f64>;
pub type FloatDirection = Direction<f64>;
pub type FloatPolygon = Polygon<f64>;
pub type FloatOrbit = flow::Orbit<f64>;
pub type FloatCylinder = periodic::Cylinder<f64>;
