//! Error type shared by every module.

use thiserror::Error;

/// Failures reported by the solvers, transforms and oracles.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("near-multiple pole: root cluster at {0} could not be resolved")]
    NearMultiplePole(String),
    #[error("pole within tolerance of the unit circle at {0}")]
    PoleOnCircle(String),
    #[error("fractional power branch is ambiguous at z = {0}")]
    BranchAmbiguity(String),
    #[error("point {0} lies outside the map domain")]
    OutsideDomain(String),
    #[error("no preimage of {0} in the map domain")]
    NoPreimage(String),
    #[error("{count} preimages of {w} in the map domain")]
    AmbiguousPreimage { w: String, count: i64 },
    #[error("Newton iteration diverged: {0}")]
    NewtonDivergence(String),
    #[error("pole misplaced for this transform: {0}")]
    PoleMisplaced(String),
    #[error("derivative order {0} exceeds the supported maximum of 8")]
    DerivativeOrderOverflow(usize),
    #[error("Faber polynomials need an exterior context")]
    InteriorContextUnsupported,
    #[error("map kind is not rational")]
    NotRational,
    #[error("solver did not converge (final residual {residual:e}): {detail}")]
    NoConvergence { residual: f64, detail: String },
    #[error("solution is not univalent: {0}")]
    NonUnivalentSolution(String),
    #[error("no admissible root: {0}")]
    NoRoot(String),
    #[error("branch condition violated: {0}")]
    BranchViolation(String),
    #[error("weighted area disagreement: cancellation {cancel} vs quadrature {quad}")]
    InconsistentT { cancel: f64, quad: f64 },
    #[error("every candidate was rejected by the filters")]
    EmptyAfterFilter,
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("domain is not rotationally symmetric of order {0}")]
    NotSymmetric(usize),
    #[error("boundary passes through the origin")]
    BoundaryThroughOrigin,
    #[error("a required solution is missing at a = {0}")]
    MissingSolution(f64),
    #[error("self-intersection density exceeds the sampling resolution")]
    SampleAliasing,
    #[error("integrand is not finite")]
    NonFinite,
    #[error("test function is not in the admissible class: {0}")]
    TestClassViolation(String),
    #[error("weighted area has an imaginary part of {0:e}")]
    ImaginaryLeak(f64),
    #[error("probe lies on the boundary")]
    ProbeOnBoundary,
    #[error("point is outside the closure of the domain")]
    OutsideClosure,
    #[error("argument lies on the Lambert W branch cut")]
    BranchCut,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, QuadError>;
