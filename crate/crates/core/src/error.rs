use num_bigint::BigUint;
use thiserror::Error;

use crate::numtheory::Congruence;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("egcd is undefined for a = b = 0")]
    BothZero,
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(BigUint),
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("residue {residue} is not reduced modulo {modulus}")]
    ResidueOutOfRange { residue: BigUint, modulus: BigUint },
    #[error("NotCoprime: {a} has no inverse modulo {m}")]
    NotCoprime { a: BigUint, m: BigUint },
    #[error("Inconsistent: no integer satisfies both {first} and {second}")]
    Inconsistent { first: Congruence, second: Congruence },
    #[error("EmptySystem: at least one congruence is required")]
    EmptySystem,

    #[error("a sequence needs at least 2 moduli, got {0}")]
    TooFewModuli(usize),
    #[error("threshold {threshold} must satisfy 2 <= t <= n = {n}")]
    BadThreshold { threshold: usize, n: usize },
    #[error("every modulus must be at least 2, got {0}")]
    SmallModulus(BigUint),
    #[error("NotIncreasing: moduli must be strictly increasing ({prev} then {next})")]
    NotIncreasing { prev: BigUint, next: BigUint },
    #[error("NotPairwiseCoprime({a},{b}): gcd is {gcd}")]
    NotPairwiseCoprime { a: BigUint, b: BigUint, gcd: BigUint },
    #[error("NotMignotte: the given input is not mignotte sequence (beta {beta} >= alpha {alpha})")]
    NotMignotte { beta: BigUint, alpha: BigUint },
    #[error("SearchExhausted: no valid sequence within {window} candidates")]
    SearchExhausted { window: u64 },
    #[error("SecretOutOfRange: invalid secret {secret}, must lie strictly between {beta} and {alpha}")]
    SecretOutOfRange {
        secret: BigUint,
        beta: BigUint,
        alpha: BigUint,
    },
    #[error("InsufficientShares: {have} shares supplied, threshold is {need}")]
    InsufficientShares { have: usize, need: usize },
    #[error("CandidateOutOfRange: CRT solution {candidate} lies outside ({beta}, {alpha}); shares are tampered or mismatched")]
    CandidateOutOfRange {
        candidate: BigUint,
        beta: BigUint,
        alpha: BigUint,
    },
    #[error("DegenerateRange: secret space has {size} element(s)")]
    DegenerateRange { size: BigUint },
    #[error("unknown participant id {id} (sequence has {n} participants)")]
    UnknownParticipant { id: usize, n: usize },
    #[error("participant {0} appears more than once")]
    DuplicateParticipant(usize),
    #[error("share of participant {id} has modulus {found}, sequence says {expected}")]
    ModulusMismatch {
        id: usize,
        found: BigUint,
        expected: BigUint,
    },
    #[error("range bounds must satisfy beta < alpha")]
    EmptyRange,
    #[error("candidate limit must be at least 1")]
    ZeroLimit,
    #[error("coalition size {size} must lie in 1..={n}")]
    BadCoalitionSize { size: usize, n: usize },
    #[error("audit is capped at {cap} participants, got {n}")]
    CombinatorialCap { n: usize, cap: usize },
}
