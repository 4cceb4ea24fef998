use thiserror::Error;

use crate::lorentz::Inertia;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report. Variants carry the raw numbers that
/// triggered them so callers can re-threshold.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ambient vectors live in different models")]
    ModelMismatch,
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("inertia {found} does not match the required {expected}")]
    InertiaMismatch { expected: Inertia, found: Inertia },
    #[error("Gram matrix is degenerate (det = {det:e})")]
    DegenerateGram { det: f64 },

    #[error("matrix does not preserve the tangent metric (residual {residual:e})")]
    MetricViolation { residual: f64 },
    #[error("matrix determinant is {det}, expected 1")]
    DetViolation { det: f64 },
    #[error("matrix reverses time orientation (O00 = {o00})")]
    OrientationViolation { o00: f64 },
    #[error("axis is null; use the parabolic exponential")]
    NullAxis,
    #[error("generator is not a nonzero null vector (self-pairing {pairing:e})")]
    NonNullGenerator { pairing: f64 },
    #[error("holonomy {index:?} is central and has no fixed normal line")]
    CentralHolonomy { index: Option<usize> },

    #[error("spin generator is zero")]
    ZeroGenerator,
    #[error("spin matrix has determinant {det}, expected 1")]
    NotUnimodular { det: f64 },
    #[error("no pivot branch produced a spin lift")]
    LiftFailure,
    #[error("product is not central (distance to +id {plus:e}, to -id {minus:e})")]
    NotClosing { plus: f64, minus: f64 },

    #[error("the two routes to G24 disagree by {deviation:e}")]
    ExceptionalEntryMismatch { deviation: f64 },
    #[error("triple product chi{} = {value:e} vanishes", index + 1)]
    ZeroTriple { index: usize, value: f64 },
    #[error("determinant {det:e} is too small to select a model")]
    FlatOrDegenerate { det: f64 },
    #[error("vertex {} line has self-pairing {pairing:e} of the wrong causal sign", index + 1)]
    WrongCausalVertexLine { index: usize, pairing: f64 },
    #[error("closure residual {residual:e} exceeds tolerance")]
    ClosureViolation { residual: f64 },
    #[error("no sign completion of the non-null faces makes every triple product positive")]
    InadmissibleParabolicBranch,
    #[error("geodesic endpoints are degenerate (sigma + <p,q> = {denominator:e})")]
    DegeneratePair { denominator: f64 },
    #[error("no vertex sign class gives orthochronous face holonomies")]
    NoOrthochronousRealization,

    #[error("stabilizer hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("null face has no scalar area")]
    NullFace,
    #[error("matrix is not a rotation (residual {residual:e})")]
    NotRotation { residual: f64 },
    #[error("matrix is not special unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("cannot parse scalar {0:?}")]
    Parse(String),
}
