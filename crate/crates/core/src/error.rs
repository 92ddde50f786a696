use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("arity {0} exceeds the supported maximum of {max}", max = crate::boolfn::MAX_ARITY)]
    ArityTooLarge(usize),
    #[error("malformed function spec: {0}")]
    MalformedSpec(String),
    #[error("malformed encoding: {0}")]
    Encoding(String),
    #[error("could not sample {s} independent vectors in F2^{n} after {attempts} attempts")]
    BasisExhausted { n: usize, s: usize, attempts: usize },
    #[error("linear pattern entry {0} has alpha = 0")]
    ZeroAlpha(usize),
    #[error("empty generator list")]
    EmptyUnion,
    #[error("class with {members} members exceeds the enumeration budget {budget}")]
    ClassTooLarge { members: u128, budget: u128 },
    #[error("design infeasible: {0}")]
    DesignInfeasible(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("distinguisher failure: {0}")]
    Distinguisher(String),
    #[error("empty sample")]
    EmptySample,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must lie in (0,1), got {v}")))
    }
}
