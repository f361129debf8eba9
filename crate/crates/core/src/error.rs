use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed number `{0}`")]
    Number(String),
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("malformed direction `{0}`")]
    Direction(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("degenerate segment (endpoints coincide)")]
    DegenerateSegment,
    #[error("zero direction vector")]
    ZeroDirection,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolygonError {
    #[error("a polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex {0} is repeated")]
    RepeatedVertex(usize),
    #[error("sides {0} and {1} intersect")]
    SelfIntersection(usize, usize),
    #[error("polygon has zero area")]
    ZeroArea,
    #[error("polygon is not certified rational")]
    NotRational,
    #[error("polygon is not convex")]
    NotConvex,
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("phase point is outside the table or points outward")]
    InvalidPhasePoint,
    #[error("ray escaped the table after {links} links")]
    Escaped { links: usize, last: String },
    #[error("vertex continuation did not settle at vertex {0}")]
    VertexLoop(usize),
    #[error("side index {0} out of range")]
    BadSide(usize),
    #[error("foot point lies at a vertex or off the side")]
    BadFoot,
    #[error("orbit is not periodic")]
    NotPeriodic,
    #[error("orbit meets a vertex and bounds no open strip")]
    SingularOrbit,
    #[error("orbit has zero length")]
    ZeroLength,
    #[error("direction {0} carries a generalized diagonal of the requested length")]
    DiagonalDirection(String),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}
