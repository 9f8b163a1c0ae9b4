use thiserror::Error;

/// Errors produced by the geometry kernels, solvers and experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid resolution {n_phi}x{n_theta}: both must be even and at least 8")]
    BadResolution { n_phi: usize, n_theta: usize },

    #[error("shape mismatch: expected {expected} samples, got {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("degenerate induced metric at node {node} (det = {det:e})")]
    DegenerateMetric { node: usize, det: f64 },

    #[error("point {point:?} lies outside the domain of the {model} metric")]
    OutOfDomain { model: &'static str, point: [f64; 3] },

    #[error("inversion singularity: point coincides with the inversion centre")]
    InversionSingularity,

    #[error("disk parameter |omega| = {0} is not inside the open unit disk")]
    OmegaOutsideDisk(f64),

    #[error("root bracketing failed: {0}")]
    Bracket(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("geodesic integration failed: {0}")]
    Geodesic(String),

    #[error("newton iteration did not converge after {iterations} steps (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("spectral threshold invalid: no gap above delta = {delta:e}")]
    NoSpectralGap { delta: f64 },

    #[error("operator truncation too large: {size} basis functions exceeds {limit}")]
    TruncationTooLarge { size: usize, limit: usize },

    #[error("extremum lies on the boundary of the search domain: {0}")]
    BoundaryExtremum(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numerical check failed: {0}")]
    Check(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
