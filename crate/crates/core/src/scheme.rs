//! Mignotte threshold secret sharing: sequences, bounds, dealing and
//! threshold reconstruction.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numtheory::{crt_combine, Congruence};

/// Default number of integers scanned by [`generate_sequence`].
pub const GENERATION_WINDOW: u64 = 100_000;

/// How much coprimality a sequence must exhibit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ValidationMode {
    /// Every pair of moduli is coprime.
    #[default]
    Strict,
    /// Only neighbouring moduli are checked. Admits sequences that are not
    /// genuinely Mignotte, e.g. (7, 9, 11, 13, 15).
    Lax,
}

impl fmt::Display for ValidationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValidationMode::Strict => "strict",
            ValidationMode::Lax => "lax",
        })
    }
}

impl FromStr for ValidationMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "strict" => Ok(ValidationMode::Strict),
            "lax" => Ok(ValidationMode::Lax),
            other => Err(format!("unknown validation mode `{other}` (expected strict|lax)")),
        }
    }
}

/// Public parameters: strictly increasing moduli plus the threshold.
///
/// Construction only checks the shape (length, threshold, ordering). Whether
/// the moduli form a Mignotte sequence is decided by [`validate`](Self::validate).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MignotteSequence {
    moduli: Vec<BigUint>,
    threshold: usize,
}

impl MignotteSequence {
    pub fn new(moduli: Vec<BigUint>, threshold: usize) -> Result<Self> {
        let n = moduli.len();
        if n < 2 {
            return Err(Error::TooFewModuli(n));
        }
        if threshold < 2 || threshold > n {
            return Err(Error::BadThreshold { threshold, n });
        }
        if let Some(m) = moduli.iter().find(|m| **m < BigUint::from(2u32)) {
            return Err(Error::SmallModulus(m.clone()));
        }
        check_increasing(&moduli)?;
        Ok(MignotteSequence { moduli, threshold })
    }

    /// Convenience constructor for machine-word moduli.
    pub fn from_u64(moduli: &[u64], threshold: usize) -> Result<Self> {
        Self::new(moduli.iter().map(|&m| BigUint::from(m)).collect(), threshold)
    }

    pub fn moduli(&self) -> &[BigUint] {
        &self.moduli
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    /// Number of participants.
    pub fn len(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moduli.is_empty()
    }

    pub fn modulus(&self, id: usize) -> Result<&BigUint> {
        self.moduli.get(id).ok_or(Error::UnknownParticipant {
            id,
            n: self.moduli.len(),
        })
    }

    /// `alpha` is the product of the `t` smallest moduli, `beta` the product
    /// of the `t - 1` largest.
    pub fn bounds(&self) -> SecretBounds {
        let t = self.threshold;
        let alpha = self.moduli[..t].iter().product();
        let beta = self.moduli[self.moduli.len() - (t - 1)..].iter().product();
        SecretBounds { beta, alpha }
    }

    pub fn validate(&self, mode: ValidationMode) -> Result<()> {
        check_increasing(&self.moduli)?;
        match mode {
            ValidationMode::Strict => {
                for (i, a) in self.moduli.iter().enumerate() {
                    for b in &self.moduli[i + 1..] {
                        check_coprime(a, b)?;
                    }
                }
            }
            ValidationMode::Lax => {
                for w in self.moduli.windows(2) {
                    check_coprime(&w[0], &w[1])?;
                }
            }
        }
        let SecretBounds { beta, alpha } = self.bounds();
        if beta >= alpha {
            return Err(Error::NotMignotte { beta, alpha });
        }
        Ok(())
    }
}

fn check_increasing(moduli: &[BigUint]) -> Result<()> {
    match moduli.windows(2).find(|w| w[0] >= w[1]) {
        Some(w) => Err(Error::NotIncreasing {
            prev: w[0].clone(),
            next: w[1].clone(),
        }),
        None => Ok(()),
    }
}

fn check_coprime(a: &BigUint, b: &BigUint) -> Result<()> {
    let gcd = a.gcd(b);
    if gcd.is_one() {
        Ok(())
    } else {
        Err(Error::NotPairwiseCoprime {
            a: a.clone(),
            b: b.clone(),
            gcd,
        })
    }
}

/// The open interval `(beta, alpha)` a secret must fall in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SecretBounds {
    pub beta: BigUint,
    pub alpha: BigUint,
}

impl SecretBounds {
    pub fn new(beta: impl Into<BigUint>, alpha: impl Into<BigUint>) -> Result<Self> {
        let (beta, alpha) = (beta.into(), alpha.into());
        if beta >= alpha {
            return Err(Error::EmptyRange);
        }
        Ok(SecretBounds { beta, alpha })
    }

    /// Strict on both ends.
    pub fn contains(&self, value: &BigUint) -> bool {
        self.beta < *value && *value < self.alpha
    }

    /// Number of integers strictly between the bounds.
    pub fn secret_space(&self) -> BigUint {
        if self.alpha > &self.beta + 1u32 {
            &self.alpha - &self.beta - 1u32
        } else {
            BigUint::default()
        }
    }
}

impl fmt::Display for SecretBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.beta, self.alpha)
    }
}

/// One participant's share: `value = secret mod modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Share {
    pub participant_id: usize,
    pub value: BigUint,
    pub modulus: BigUint,
}

impl Share {
    pub fn congruence(&self) -> Result<Congruence> {
        Congruence::new(self.value.clone(), self.modulus.clone())
    }
}

/// Searches for a strict-valid sequence of `n` moduli starting at
/// `search_floor`, scanning at most [`GENERATION_WINDOW`] integers.
pub fn generate_sequence(
    n: usize,
    threshold: usize,
    search_floor: u64,
    seed: u64,
) -> Result<MignotteSequence> {
    generate_sequence_in_window(n, threshold, search_floor, GENERATION_WINDOW, seed)
}

/// Like [`generate_sequence`] but only considers integers in
/// `[search_floor, search_floor + window)`.
///
/// Odd candidates are scanned upward; the seeded RNG occasionally skips one.
/// A candidate is kept when it is coprime to everything already kept. Once
/// `n` are kept the Mignotte condition is tested, and on failure the smallest
/// kept modulus is dropped and the scan continues.
pub fn generate_sequence_in_window(
    n: usize,
    threshold: usize,
    search_floor: u64,
    window: u64,
    seed: u64,
) -> Result<MignotteSequence> {
    if n < 2 {
        return Err(Error::TooFewModuli(n));
    }
    if threshold < 2 || threshold > n {
        return Err(Error::BadThreshold { threshold, n });
    }
    let floor = search_floor.max(2);
    let ceiling = floor.saturating_add(window);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kept: Vec<u64> = Vec::with_capacity(n);

    let mut candidate = if floor.is_multiple_of(2) { floor + 1 } else { floor };
    while candidate < ceiling {
        let current = candidate;
        candidate += 2;
        if rng.gen_ratio(1, 4) {
            continue;
        }
        if kept.iter().any(|&k| k.gcd(&current) != 1) {
            continue;
        }
        kept.push(current);
        if kept.len() < n {
            continue;
        }
        let seq = MignotteSequence::from_u64(&kept, threshold)?;
        if seq.validate(ValidationMode::Strict).is_ok() {
            return Ok(seq);
        }
        kept.remove(0);
    }
    Err(Error::SearchExhausted { window })
}

/// Splits `secret` into one share per modulus.
pub fn deal(seq: &MignotteSequence, mode: ValidationMode, secret: &BigUint) -> Result<Vec<Share>> {
    seq.validate(mode)?;
    let bounds = seq.bounds();
    if !bounds.contains(secret) {
        return Err(Error::SecretOutOfRange {
            secret: secret.clone(),
            beta: bounds.beta,
            alpha: bounds.alpha,
        });
    }
    Ok(seq
        .moduli
        .iter()
        .enumerate()
        .map(|(participant_id, m)| Share {
            participant_id,
            value: secret % m,
            modulus: m.clone(),
        })
        .collect())
}

/// Checks that shares come from distinct known participants and carry the
/// moduli the sequence assigns them.
pub(crate) fn check_shares(shares: &[Share], seq: &MignotteSequence) -> Result<()> {
    let mut seen = BTreeSet::new();
    for share in shares {
        let expected = seq.modulus(share.participant_id)?;
        if !seen.insert(share.participant_id) {
            return Err(Error::DuplicateParticipant(share.participant_id));
        }
        if *expected != share.modulus {
            return Err(Error::ModulusMismatch {
                id: share.participant_id,
                found: share.modulus.clone(),
                expected: expected.clone(),
            });
        }
    }
    Ok(())
}

/// Threshold reconstruction. The CRT solution is accepted only if it lies
/// inside the public bounds.
pub fn reconstruct(shares: &[Share], seq: &MignotteSequence) -> Result<BigUint> {
    if shares.len() < seq.threshold {
        return Err(Error::InsufficientShares {
            have: shares.len(),
            need: seq.threshold,
        });
    }
    check_shares(shares, seq)?;
    let congruences = shares
        .iter()
        .map(Share::congruence)
        .collect::<Result<Vec<_>>>()?;
    let combined = crt_combine(&congruences)?;
    let bounds = seq.bounds();
    let candidate = combined.residue().clone();
    if !bounds.contains(&candidate) {
        return Err(Error::CandidateOutOfRange {
            candidate,
            beta: bounds.beta,
            alpha: bounds.alpha,
        });
    }
    Ok(candidate)
}

/// Per-participant information rates `log2(m_i) / log2(|X|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InformationRate {
    /// `|X| = alpha - beta - 1`.
    pub secret_space: BigUint,
    pub ratios: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

impl InformationRate {
    /// Rate of an ideal scheme.
    pub const IDEAL: f64 = 1.0;
}

pub fn information_rate(seq: &MignotteSequence) -> Result<InformationRate> {
    let secret_space = seq.bounds().secret_space();
    if secret_space <= BigUint::one() {
        return Err(Error::DegenerateRange { size: secret_space });
    }
    let denom = log2_big(&secret_space);
    let ratios: Vec<f64> = seq.moduli.iter().map(|m| log2_big(m) / denom).collect();
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(InformationRate {
        secret_space,
        ratios,
        min,
        max,
    })
}

/// `log2` of an arbitrarily large positive integer.
pub fn log2_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().unwrap_or(f64::INFINITY).log2();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.log2() + shift as f64
}
