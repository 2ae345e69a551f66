use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ray {index} is not primitive: {coords:?}")]
    NonPrimitiveRay { index: usize, coords: Vec<i64> },
    #[error("ray {index} is zero, has the wrong length, or repeats an earlier ray")]
    InvalidRay { index: usize },
    #[error("cone {rays:?} is not smooth (invariant factors {factors:?})")]
    NonSmoothCone { rays: Vec<usize>, factors: Vec<i128> },
    #[error("cones {a:?} and {b:?} do not meet in a common face")]
    NotAFan { a: Vec<usize>, b: Vec<usize> },
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{tau:?} is not a facet of {sigma:?}")]
    NotAFacet { sigma: Vec<usize>, tau: Vec<usize> },
    #[error("no cone of the target fan contains the image of {cone:?}")]
    NoContainingCone { cone: Vec<usize> },
    #[error("unknown cone {0:?}")]
    UnknownCone(Vec<usize>),
    #[error("modules live over different cones or flavors")]
    ConeMismatch,
    #[error("operation needs a flavor {expected} module")]
    FlavorMismatch { expected: &'static str },
    #[error("entry ({row},{col}) has degree outside the stalk semigroup")]
    DegreeOutsideSemigroup { row: usize, col: usize },
    #[error("malformed morphism: {0}")]
    BadMorphism(String),
    #[error("subset of the fan is not locally closed")]
    NotLocallyClosed,
    #[error("projective resolution exceeded length {0}")]
    ResolutionTooLong(usize),
    #[error("fan is not complete")]
    FanNotComplete,
    #[error("sheaf is not locally free")]
    NotLocallyFree,
    #[error("input is not coherent")]
    NotCoherentInput,
    #[error("divisor is incompatible on cone {0:?}")]
    IncompatibleDivisor(Vec<usize>),
    #[error("not a complex: d^2 != 0 at position {position}")]
    NotAComplex { position: usize },
    #[error("cellular signs are incoherent on {sigma:?} -> {xi:?}")]
    SignIncoherence { sigma: Vec<usize>, xi: Vec<usize> },
    #[error("complex term {term} has non-free stalks; resolve single objects instead")]
    NeedsResolution { term: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
}

pub type Result<T> = std::result::Result<T, Error>;
