use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("allocation has {got} bundles but the instance has {expected} agents")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("good {good} is out of range for {num_goods} goods")]
    GoodOutOfRange { good: usize, num_goods: usize },

    #[error("good {good} is held by both agent {first} and agent {second}")]
    OverlappingBundles { good: usize, first: usize, second: usize },

    #[error("agent index {agent} out of range for {num_agents} agents")]
    AgentOutOfRange { agent: usize, num_agents: usize },

    #[error("operation `{op}` does not support {class} valuations")]
    UnsupportedClass { op: &'static str, class: &'static str },

    #[error("set of size {size} is not non-wasteful (value {value})")]
    NotNonWasteful { size: usize, value: u32 },

    #[error("target size {target} out of range 0..={max}")]
    TargetOutOfRange { target: usize, max: usize },

    #[error("exhaustive check over {m} goods exceeds the limit of {limit}")]
    OverLimit { m: usize, limit: usize },

    #[error("enumeration needs {required} steps, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("perfect matching exists; no dummy goods needed")]
    PerfectMatchingExists,

    #[error("graph is not 3-regular: {0}")]
    NotCubic(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("parameters require p < q (got p = {p}, q = {q})")]
    InvalidPq { p: usize, q: usize },
}
