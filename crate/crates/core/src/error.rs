use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({x}, {y}) lies outside the closed model disc")]
    OutsideDisc { x: f64, y: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate geodesic arc: endpoints coincide")]
    DegenerateArc,

    #[error("malformed polygon: {0}")]
    MalformedPolygon(String),

    #[error("root bracket failure: {0}")]
    Bracket(String),

    #[error("inscribed-polygon enumeration is capped at {cap} vertices, got {got}")]
    EnumerationCap { got: usize, cap: usize },

    #[error("no tau on the grid restores admissibility (largest tried {tau_max})")]
    NoAdmissibleTau { tau_max: f64 },

    #[error("degenerate compact core: {0}")]
    DegenerateCore(String),

    #[error("mesh generation failed: {0}")]
    Mesh(String),

    #[error("boundary data: {0}")]
    BoundaryData(String),

    #[error("singular stiffness matrix (mesh quality): {0}")]
    Singular(String),

    #[error("newton stagnated after {iterations} iterations with residual {residual:e}")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),

    #[error("radius {0} lies beyond the mesh support")]
    RadiusOutOfRange(f64),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("cap {cap}: {source}")]
    AtCap {
        cap: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("example step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Strips `AtCap`/`AtStep` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtCap { source, .. } | Error::AtStep { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_non_convergence(&self) -> bool {
        matches!(self.root(), Error::NonConvergence { .. })
    }
}
