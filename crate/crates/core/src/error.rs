use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("topology error: {0}")]
    Topology(String),
    #[error("invalid spherical triangle: {0}")]
    InvalidSphericalTriangle(String),
    #[error("no rotational symmetry: {0}")]
    NoSymmetry(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("convex mesh required: {0}")]
    ConvexityRequired(String),
    #[error("cannot raise pyramid apex over face {face}: feasible height {t_max:e}")]
    CannotRaiseApex { face: usize, t_max: f64 },
    #[error("radius {radius} does not exceed max circumradius {max_circumradius}")]
    RadiusTooSmall { radius: f64, max_circumradius: f64 },
    #[error("no radius satisfied the dihedral bound after {doublings} doublings")]
    CannotSatisfyVoronoiCondition { doublings: u32 },
    #[error("spike realization self-intersects in {} face pairs", pairs.len())]
    SelfIntersecting { pairs: Vec<(usize, usize)> },
    #[error("invalid family parameters: {0}")]
    InvalidSpec(String),
    #[error("construction invalid: {0}")]
    ConstructionInvalid(String),
    #[error("polar hexagon not found: {0}")]
    HexagonNotFound(String),
    #[error("face {face} is scalene")]
    NotIsosceles { face: usize },
    #[error("vertex {vertex} has the wrong type: {reason}")]
    WrongVertexType { vertex: usize, reason: String },
    #[error("domination failed: vertices {undominated:?} are not dominated")]
    DominationFailed { undominated: Vec<usize> },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("sampler exhausted {attempts} rejections for case {case}")]
    RejectionBudget { case: String, attempts: usize },
}
