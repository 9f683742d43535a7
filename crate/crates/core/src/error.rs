use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed rational `{0}`")]
    Rational(String),
    #[error("malformed point `{0}`")]
    Point(String),
    #[error("malformed ball `{0}`")]
    Ball(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("radius must be positive")]
    NonPositiveRadius,
    #[error("point is not strictly inside the ball, no positive radius fits")]
    NoPositiveRadius,
    #[error("empty ball sequence")]
    EmptySequence,
    #[error("scheme of depth {depth} needs about {cells} cells, over the budget of {budget}")]
    SchemeBudget { depth: usize, cells: u128, budget: u128 },
    #[error("schemes are only built over one-dimensional spaces")]
    SchemeDimension,
    #[error("empty region")]
    EmptyRegion,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown catalog function `{0}`")]
    UnknownFunction(String),
    #[error("ball does not meet the domain of `{0}`")]
    EmptyIntersection(String),
    #[error("point outside the domain of `{0}`")]
    OutsideDomain(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OscError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("oscillation precondition fails at {point}: lower bound {lower} < {epsilon}")]
    Precondition { point: String, lower: String, epsilon: String },
    #[error("no uniform-oscillation region found within budget {0}")]
    NotFound(u32),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
    #[error("`{0}` carries no approximant sequence")]
    MissingApproximants(String),
    #[error("`{0}` carries no discontinuity witness and none could be discovered")]
    MissingWitness(String),
    #[error("witness scan exhausted before index bound {0}")]
    ScanExhausted(String),
    #[error("strategy emitted a ball not nested in its predecessor at step {0}")]
    NotNested(usize),
    #[error("branch is not a node of the selection tree")]
    NotInTree,
    #[error("no dense-range index carries the value {0}")]
    ValueNotInRange(String),
    #[error("replay failed at scheme node {address:?}: {reason}")]
    Replay { address: Vec<u32>, reason: String },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Osc(#[from] OscError),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("move offered after the verdict was recorded")]
    AlreadyDecided,
    #[error("it is Player {expected}'s turn")]
    WrongTurn { expected: &'static str },
    #[error("transcript has {have} moves, adjudication needs {need}")]
    TooShort { have: usize, need: usize },
    #[error("invalid referee configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
