use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid numeric literal `{0}`")]
    InvalidLiteral(String),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("invalid tolerance (abs {abs}, rel {rel})")]
    InvalidTolerance { abs: f64, rel: f64 },
    #[error("empty input")]
    Empty,
    #[error("row {row} has {found} entries, expected {expected}")]
    NonRectangular { row: usize, expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("expected {expected} points, found {found}")]
    PointCount { expected: usize, found: usize },
    #[error("points span an affine subspace of dimension {span_dim}")]
    DegenerateConfiguration { span_dim: usize },
    #[error("points are not contained in one hyperplane (relative residual {residual:e})")]
    NotCoplanar { residual: f64 },
    #[error("line is parallel to the hyperplane")]
    NearParallel,
    #[error("hyperplane normal is the zero vector")]
    ZeroNormal,
    #[error("linear system is singular")]
    Singular,
    #[error("identical points where distinct points are required")]
    CoincidentPoints,

    #[error("point is not on the line through the vertices (distance {distance:e})")]
    NotOnLine { distance: f64 },
    #[error("edge point coincides with a vertex")]
    CoincidesWithVertex,
    #[error("weights must be positive and pairwise distinct")]
    EqualWeights,
    #[error("vertices are not independent")]
    DependentVertices,
    #[error("missing edge point for pair ({i}, {j})")]
    MissingEdgePoint { i: usize, j: usize },
    #[error("homothety ratio must differ from 0 and 1")]
    InvalidRatio,

    #[error("shapes are not homothetic: {0}")]
    NotHomothetic(String),
    #[error("homothety ratio {ratio} is not greater than one")]
    RatioNotGreaterThanOne { ratio: f64 },
    #[error("homothety between the shapes is not unique")]
    NonUniqueHomothety,
    #[error("shape is unbounded")]
    UnboundedShape,
    #[error("degenerate shape: {0}")]
    DegenerateShape(String),
    #[error("halfspace constraints are infeasible")]
    Infeasible,
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("shapes {i} and {j} have equal size")]
    EqualSizes { i: usize, j: usize },
    #[error("homotheties with ratio <= 0 are not supported here")]
    NonPositiveRatio,

    #[error("point is not on the {0}")]
    NotOnManifold(&'static str),
    #[error("points belong to different geometries")]
    GeometryMismatch,
    #[error("points are antipodal or too close to it")]
    Antipodal,
    #[error("arc order violated: the second vertex is not between the first vertex and the edge point")]
    ArcOrder,
    #[error("combination is not timelike, so it does not meet the hyperboloid")]
    NotTimelike,
    #[error("section normal is not spacelike (Lorentz norm {norm:e})")]
    NotSpacelike { norm: f64 },
    #[error("geodesic parameter out of range")]
    ParameterOutOfRange,

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: usize, reason: String },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("exact mode is not available for {0} geometry")]
    ExactUnsupported(&'static str),

    #[error("pair ({i}, {j}): {source}")]
    AtPair {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps an error with 0-based pair indices; messages show them 1-based.
    pub fn at_pair(i: usize, j: usize, source: Error) -> Self {
        Error::AtPair {
            i: i + 1,
            j: j + 1,
            source: Box::new(source),
        }
    }

    /// Stable machine-readable name of the innermost error.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidLiteral(_) => "InvalidLiteral",
            Error::NonFinite => "NonFinite",
            Error::InvalidTolerance { .. } => "InvalidTolerance",
            Error::Empty => "Empty",
            Error::NonRectangular { .. } => "NonRectangular",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::PointCount { .. } => "PointCount",
            Error::DegenerateConfiguration { .. } => "DegenerateConfiguration",
            Error::NotCoplanar { .. } => "NotCoplanar",
            Error::NearParallel => "NearParallel",
            Error::ZeroNormal => "ZeroNormal",
            Error::Singular => "Singular",
            Error::CoincidentPoints => "CoincidentPoints",
            Error::NotOnLine { .. } => "NotOnLine",
            Error::CoincidesWithVertex => "CoincidesWithVertex",
            Error::EqualWeights => "EqualWeights",
            Error::DependentVertices => "DependentVertices",
            Error::MissingEdgePoint { .. } => "MissingEdgePoint",
            Error::InvalidRatio => "InvalidRatio",
            Error::NotHomothetic(_) => "NotHomothetic",
            Error::RatioNotGreaterThanOne { .. } => "RatioNotGreaterThanOne",
            Error::NonUniqueHomothety => "NonUniqueHomothety",
            Error::UnboundedShape => "UnboundedShape",
            Error::DegenerateShape(_) => "DegenerateShape",
            Error::Infeasible => "Infeasible",
            Error::InvalidShape(_) => "InvalidShape",
            Error::EqualSizes { .. } => "EqualSizes",
            Error::NonPositiveRatio => "NonPositiveRatio",
            Error::NotOnManifold(_) => "NotOnManifold",
            Error::GeometryMismatch => "GeometryMismatch",
            Error::Antipodal => "Antipodal",
            Error::ArcOrder => "ArcOrder",
            Error::NotTimelike => "NotTimelike",
            Error::NotSpacelike { .. } => "NotSpacelike",
            Error::ParameterOutOfRange => "ParameterOutOfRange",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::GenerationFailed { .. } => "GenerationFailed",
            Error::InvalidScenario(_) => "InvalidScenario",
            Error::ExactUnsupported(_) => "ExactUnsupported",
            Error::AtPair { source, .. } => source.kind(),
        }
    }

    /// Innermost error, unwrapping pair context.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtPair { source, .. } => source.root(),
            e => e,
        }
    }
}
