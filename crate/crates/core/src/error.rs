use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial has a constant term and is not divisible by its variable")]
    NotDivisible,
    #[error("odd power {power} present; only even powers can be substituted")]
    OddPowerPresent { power: usize },
    #[error("binomial closed form requires a nonnegative exponent, got n = {0}")]
    NegativeExponentUnsupported(i64),
    #[error("pole at evaluation point: base value is zero and exponent {exponent} is negative")]
    PoleAtEvaluationPoint { exponent: f64 },
    #[error("non-integer exponent n = {n} requires a real nonnegative base value")]
    NonIntegerNeedsPositiveBase { n: f64 },
    #[error("cancellation failed: expected v^{expected} to divide the specialized polynomial (engine bug)")]
    InternalCancellationFailure { expected: usize },
    #[error("finite-difference step {0} is below the minimum of 1e-6")]
    StepTooSmall(f64),
    #[error("a pole lies within {distance} of x; step {step} is too large")]
    PoleNearby { distance: f64, step: f64 },
    #[error("finite-difference oracle supports k <= {max}, got k = {k}")]
    OrderTooHigh { k: usize, max: usize },
    #[error("triangle row {0} is degenerate: a second-highest power needs k >= 2")]
    DegenerateRow(usize),
    #[error("triangle rows are numbered from 1, got {0}")]
    InvalidRow(usize),
    #[error("coefficient signs are not strictly alternating in row {0}")]
    SignPatternBroken(usize),
    #[error("malformed expression JSON: {0}")]
    MalformedJson(String),
}
