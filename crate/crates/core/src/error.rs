use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("a DLV system needs at least two components, got m = {0}")]
    TooFewComponents(usize),
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension { what: &'static str, expected: usize, got: usize },
    #[error("lambda[{index}] = {value} must be positive and finite")]
    NonPositiveLambda { index: usize, value: f64 },
    #[error("coefficient {what} is not finite")]
    NonFinite { what: String },
    #[error("model file: {0}")]
    Format(String),
}

/// Raised when a catalog entry is instantiated with parameters that violate
/// one of its restrictions.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolutionError {
    #[error("unknown solution id `{0}`")]
    UnknownId(String),
    #[error("missing parameter `{0}`")]
    MissingParam(String),
    #[error("unknown parameter `{param}` for {id}")]
    UnknownParam { id: String, param: String },
    #[error("restriction violated: {condition} (required by {source_eq})")]
    Restriction { condition: String, source_eq: &'static str },
    #[error("{0}")]
    Model(#[from] ModelError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("({t}, {x}) lies within the guard band of the singular set: {reason}")]
    Singular { t: f64, x: f64, reason: String },
    #[error("({t}, {x}) is outside the validity domain: {reason}")]
    OutOfDomain { t: f64, x: f64, reason: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetryError {
    #[error("no finite flow implemented for operator {0}")]
    FlowUnsupported(String),
    #[error("operator {op} does not apply to this model: {reason}")]
    NotApplicable { op: String, reason: String },
    #[error("operator has {op} components but the solution has {sol}")]
    ComponentMismatch { op: usize, sol: usize },
    #[error("point outside the operator's domain: {0}")]
    OperatorDomain(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("g-function undefined: {0}")]
    GFunction(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error("ansatz restriction violated: {0}")]
    Restriction(String),
    #[error("profile has {got} functions, system expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("step size underflow at {at} (reached {reached} of {target})")]
    StepUnderflow { at: f64, reached: f64, target: f64 },
    #[error("integration state became non-finite at {0}")]
    NonFinite(f64),
    #[error("profile undefined at {0}")]
    Singular(f64),
    #[error("{0} has no registered reduction")]
    NoReduction(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TanhError {
    #[error("degree {0} is not supported (only 1 and 2)")]
    Degree(usize),
    #[error("{0} is not a tanh-type catalog entry")]
    NotTanhType(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("grid invalid: {0}")]
    Grid(String),
    #[error("CFL violated: dt = {dt} exceeds the explicit limit {limit}")]
    Cfl { dt: f64, limit: f64 },
    #[error("blow-up detected at t = {t} (component {component}, node {node})")]
    BlowUp { t: f64, component: usize, node: usize },
    #[error("initial data singular at node {node} (x = {x}): {reason}")]
    SingularNode { node: usize, x: f64, reason: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("boundary data: {0}")]
    Boundary(String),
}
