use thiserror::Error;

use crate::rifs::ScalingCondition;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative spread {0}")]
    NegativeSpread(f64),

    #[error("level {0} is outside [0, 1]")]
    LambdaOutOfRange(f64),

    #[error("negative scalar {0}; only nonnegative scaling is supported")]
    NegativeScalar(f64),

    #[error("invalid fuzzy profile: {0}")]
    InvalidProfile(String),

    #[error("Hukuhara difference does not exist (first violation at level {lambda})")]
    HukuharaNotExist { lambda: f64 },

    #[error("data set needs at least 3 points (n >= 2), got {0}")]
    TooFewPoints(usize),

    #[error("abscissae must be strictly increasing (x[{index}] = {value})")]
    NotIncreasing { index: usize, value: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("address of interval {interval}: {reason}")]
    InvalidAddress { interval: usize, reason: String },

    #[error("expected {expected} scaling factors, got {got}")]
    AlphaCount { expected: usize, got: usize },

    #[error("scaling factor alpha_{interval} = {value} is outside [0, 1)")]
    AlphaOutOfRange { interval: usize, value: f64 },

    #[error("interval index {0} out of range")]
    IntervalOutOfRange(usize),

    #[error("x = {x} lies outside [{lo}, {hi}]")]
    XOutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("interval I_{0} is covered by no address interval")]
    DanglingInterval(usize),

    #[error("transition matrix is reducible; intervals {unreachable:?} are not mutually reachable with interval 1")]
    NotIrreducible { unreachable: Vec<usize> },

    #[error("map w_{interval} is not contractive (c = {coefficient})")]
    NotContractive { interval: usize, coefficient: f64 },

    #[error("scaling condition {condition} fails for interval {interval} at level {lambda}")]
    ScalingConditionsViolated {
        interval: usize,
        condition: ScalingCondition,
        lambda: f64,
    },

    #[error(
        "fixed-point iteration did not converge in {iterations} steps (last step {last_step})"
    )]
    MaxIterExceeded { iterations: usize, last_step: f64 },

    #[error("grid density must be at least 1")]
    BadGridDensity,

    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),

    #[error("perturbed abscissae must keep both endpoints fixed")]
    EndpointMoved,

    #[error("perturbation has wrong length: expected {expected}, got {got}")]
    PerturbationLength { expected: usize, got: usize },

    #[error("inadmissible perturbation: {0}")]
    InadmissiblePerturbation(String),

    #[error("Hölder exponent {tau} is not positive (delta = {delta}, c_max = {c_max})")]
    NonPositiveExponent { tau: f64, delta: f64, c_max: f64 },

    #[error("free Hölder exponent must lie in (0, 1), got {0}")]
    BadFreeExponent(f64),

    #[error("chaos game needs steps > burn_in")]
    BadStepCount,

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
