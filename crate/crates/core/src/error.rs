use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("subdivision count must be at least 1")]
    InvalidSubdivision,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("{what}: {reason}")]
    Invalid { what: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DualMeshError {
    #[error("circumcenter of triangle {triangle} lies outside the closed triangle")]
    CircumcenterOutside { triangle: usize },
    #[error("degenerate triangle {triangle}")]
    Degenerate { triangle: usize },
}

/// A breach of one of the coefficient hypotheses (bounds on k, bounds on f,
/// Lipschitz continuity) detected by sampling or at assembly time.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HypothesisError {
    #[error("k({at}) = {value} outside declared bounds [{lo}, {hi}]")]
    ConductivityBounds { at: f64, value: f64, lo: f64, hi: f64 },
    #[error("f({at}) = {value} violates nu <= f <= c1|xi| + c2 (nu = {nu}, c1 = {c1}, c2 = {c2})")]
    SourceBounds { at: f64, value: f64, nu: f64, c1: f64, c2: f64 },
    #[error("Lipschitz bound {lipschitz} violated between {a} and {b} (ratio {ratio})")]
    Lipschitz { a: f64, b: f64, ratio: f64, lipschitz: f64 },
    #[error("non-positive conductivity {value} on edge ({p}, {q})")]
    NonPositiveConductivity { p: usize, q: usize, value: f64 },
    #[error("integral of f = {integral} fell below nu * |domain| = {bound}")]
    SourceIntegral { integral: f64, bound: f64 },
    #[error("invalid coefficient constants: {0}")]
    Constants(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("conjugate gradients did not converge in {iterations} iterations (relative residual {residual:.3e})")]
    CgNotConverged { iterations: usize, residual: f64 },
    #[error("Picard iteration failed at t = {time} after {backoffs} step reductions (last tau = {tau:.3e}, last update {last_update:.3e})")]
    PicardNotConverged {
        time: f64,
        tau: f64,
        backoffs: usize,
        last_update: f64,
    },
    #[error(transparent)]
    Hypothesis(#[from] HypothesisError),
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("field has {got} entries, mesh has {expected} vertices")]
    FieldLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerificationError {
    #[error("time grids differ: {0}")]
    TimeGridMismatch(String),
    #[error("need at least {needed} levels, got {got}")]
    TooFewLevels { needed: usize, got: usize },
    #[error("reference mesh is not a uniform refinement of the numeric mesh")]
    NotNested,
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Dual(#[from] DualMeshError),
}

/// Umbrella error for callers that drive several stages.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Dual(#[from] DualMeshError),
    #[error(transparent)]
    Hypothesis(#[from] HypothesisError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Verification(#[from] VerificationError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
