use crate::regularity::DecompositionResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("variable count {0} outside 1..={max}", max = crate::boolfn::MAX_VARS)]
    InvalidArity(usize),

    #[error("truth table has {got} entries, expected {expected}")]
    TableLength { expected: usize, got: usize },

    #[error("value {value} at index {index} is outside the {range} range")]
    RangeViolation {
        index: usize,
        value: f64,
        range: &'static str,
    },

    #[error("function has range tag {got}, operation requires {expected}")]
    WrongRange { expected: &'static str, got: &'static str },

    #[error("variable index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("parameter {name} = {value} is out of range ({expected})")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("E[f^2] = {0} exceeds 1")]
    NormTooLarge(f64),

    #[error("variable {var} is already fixed on the path to leaf {leaf}")]
    VariableAlreadyFixed { leaf: usize, var: usize },

    #[error("no leaf with id {0}")]
    UnknownLeaf(usize),

    #[error("degree {degree} of the mask exceeds the cap {cap}")]
    DegreeTooLarge { degree: usize, cap: usize },

    #[error("enumeration of {cases} restrictions exceeds the budget of {budget}")]
    EnumerationBudget { cases: u128, budget: u128 },

    /// The homogeneous decomposition ran out of variables before the bad
    /// mass fell below gamma. Carries the last complete tree.
    #[error("variable budget exhausted after {} iterations (|J| = {})", .0.iterations, .0.homogeneous_vars.len())]
    BudgetExceeded(Box<DecompositionResult>),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::ParamOutOfRange { name, value, expected }
    }
}

/// Checks `lo <= value <= hi`, rejecting NaN.
pub(crate) fn check_closed(name: &'static str, value: f64, lo: f64, hi: f64, expected: &'static str) -> Result<()> {
    if value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::param(name, value, expected))
    }
}
