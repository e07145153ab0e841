use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is singular (determinant {0:e})")]
    Singular(f64),
    #[error("boundary points are not pairwise distinct")]
    RepeatedPoints,
    #[error("isometry has no axis: {0}")]
    NoAxis(&'static str),
    #[error("planes do not meet in a geodesic")]
    PlanesDisjoint,
    #[error("invalid plane: {0}")]
    InvalidPlane(String),
    #[error("point is not in the upper half-space (height {0})")]
    NotInHalfSpace(f64),
    #[error("parameters outside the admissible set: {0}")]
    OutsideDomain(String),
    #[error("cosine {0} outside (-1, 1]")]
    CosineOutOfRange(f64),
    #[error("edge {0} has an ideal endpoint")]
    IdealEdge(usize),
    #[error("edge {0} has zero length")]
    ZeroLength(usize),
    #[error("tetrahedron has coincident vertices")]
    CoincidentVertices,
    #[error("mesh is not closed: directed edge ({0}, {1}) has no opposite")]
    MeshNotClosed(usize, usize),
    #[error("mesh triangle {0} references missing vertex {1}")]
    BadTriangle(usize, usize),
    #[error("path leaves the non-holed region at s = {0}")]
    PathExitsDomain(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("gluing spec: {0}")]
    Gluing(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("relator {0} does not evaluate to plus or minus the identity")]
    RelatorNotCentral(usize),
    #[error("angle {0} must be positive")]
    NonPositiveAngle(f64),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
