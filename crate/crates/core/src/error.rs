use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("state ({a}, {b}, {c}; {s}) has a non-positive side square")]
    NotATriangleState { a: i64, b: i64, c: i64, s: i64 },

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("trial division budget exceeded for {0}")]
    FactorizationBudgetExceeded(u64),

    #[error("modulus {modulus} exceeds the residue budget {budget}")]
    ResidueBudgetExceeded { modulus: u64, budget: u64 },

    #[error("invalid Jacobi modulus {0}: must be odd and positive")]
    InvalidModulus(i64),

    #[error("2-adic valuation of zero is undefined")]
    Undefined,

    #[error("state is not reduced: {0}")]
    NotReduced(String),

    #[error("word syntax: {0}")]
    WordSyntax(String),

    #[error("point syntax: {0}")]
    PointSyntax(String),

    #[error("geometry and algebra disagree at step {step}: {detail}")]
    ModelInconsistency { step: usize, detail: String },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("frontier of {states} states exceeds the memory budget of {budget} bytes")]
    MemoryBudgetExceeded { states: usize, budget: u64 },

    #[error("search suspended at bucket {next_bucket}; resume from {}", path.display())]
    Suspended { path: PathBuf, next_bucket: u64 },

    #[error("checkpoint format: {0}")]
    CheckpointFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
