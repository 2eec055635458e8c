//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = {0} is even; only odd primes are supported")]
    EvenPrime(u64),
    #[error("p = {p} does not divide q - 1 = {qm1}")]
    DivisibilityFailure { p: u64, qm1: u64 },
    #[error("r = {r} does not have multiplicative order {p} mod {q}")]
    BadPrimitiveRoot { r: u64, p: u64, q: u64 },
    #[error("operands belong to different groups")]
    MixedGroups,
    #[error("group of order {order} exceeds the exhaustive-search bound {bound}")]
    GroupTooLarge { order: usize, bound: usize },
    #[error("presented relations collapse the group: expected order {expected}, closure has {actual}")]
    RelationInconsistency { expected: usize, actual: usize },
    #[error("no primitive fourth root of unity mod {q} (4 does not divide q - 1)")]
    FourthRootUnavailable { q: u64 },
    #[error("unknown generator label `{0}`")]
    UnknownGenerator(String),
    #[error("Riemann-Hurwitz genus is not a nonnegative integer for this datum")]
    NonIntegralGenus,
    #[error("group order {order} is not divisible by period {period}")]
    PeriodNotDividing { order: u64, period: u64 },
    #[error("signature has non-positive hyperbolic area")]
    NonPositiveArea,
    #[error("no action exists: the signature requires n >= 2 period-p points, got n = {n}")]
    NoAction { n: usize },
    #[error("search space of {size} candidates exceeds the bound {bound}")]
    SearchSpaceTooLarge { size: u128, bound: u128 },
    #[error("braid index {index} out of range 1..{max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("no orbit member matches the family's normal-form template")]
    NormalFormNotFound,
    #[error("character average over a subgroup is not a rational integer")]
    NonIntegralFixedDim,
    #[error("factor dimension is not a nonnegative integer")]
    NonIntegralDimension,
    #[error("character table failed an exact self-check: {0}")]
    CharacterCheckFailed(String),
    #[error("restriction of the overgroup action does not match: {0}")]
    RestrictionMismatch(String),
    #[error("invalid lambda parameter: {0}")]
    BadLambda(String),
    #[error("invalid mu parameter: {0}")]
    BadMu(String),
    #[error("persistent sampling near a singular point of the model")]
    SampleNearSingularity,
}

impl Error {
    /// Errors that signal a falsified structural claim rather than bad input.
    /// The CLI maps these to a distinct exit code.
    pub fn is_falsification(&self) -> bool {
        matches!(
            self,
            Error::NormalFormNotFound
                | Error::RestrictionMismatch(_)
                | Error::NonIntegralFixedDim
                | Error::NonIntegralDimension
                | Error::NonIntegralGenus
        )
    }
}
