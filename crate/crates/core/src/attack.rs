//! Secret recovery from coalitions smaller than the threshold.
//!
//! A coalition's shares collapse to a single congruence `S ≡ x (mod M)`.
//! Intersecting that progression with the public interval `(beta, alpha)`
//! leaves every secret the coalition cannot rule out. When `M` covers the
//! interval the secret is recovered outright, which is why Mignotte's scheme
//! leaks far more than its threshold suggests.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numtheory::{crt_combine, Congruence};
use crate::scheme::{check_shares, deal, log2_big, MignotteSequence, SecretBounds, Share, ValidationMode};

/// Number of models listed when no limit is given in positive mode.
pub const DEFAULT_POSITIVE_LIMIT: usize = 5;

/// Largest sequence [`security_audit`] accepts.
pub const AUDIT_MAX_PARTICIPANTS: usize = 20;

/// Congruences pooled by a coalition, in the order the members were selected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceSystem {
    entries: Vec<(usize, Congruence)>,
}

impl CongruenceSystem {
    pub fn new(entries: Vec<(usize, Congruence)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptySystem);
        }
        let mut seen = BTreeSet::new();
        for (id, _) in &entries {
            if !seen.insert(*id) {
                return Err(Error::DuplicateParticipant(*id));
            }
        }
        Ok(CongruenceSystem { entries })
    }

    pub fn from_shares(shares: &[Share]) -> Result<Self> {
        let entries = shares
            .iter()
            .map(|s| Ok((s.participant_id, s.congruence()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    /// Builds the system for the selected participants of a dealt share set,
    /// checking that the shares belong to `seq`.
    pub fn for_coalition(shares: &[Share], seq: &MignotteSequence) -> Result<Self> {
        check_shares(shares, seq)?;
        Self::from_shares(shares)
    }

    pub fn entries(&self) -> &[(usize, Congruence)] {
        &self.entries
    }

    pub fn congruences(&self) -> impl Iterator<Item = &Congruence> {
        self.entries.iter().map(|(_, c)| c)
    }

    pub fn participant_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|(id, _)| *id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True if `value` satisfies every congruence of the system.
    pub fn admits(&self, value: &BigUint) -> bool {
        self.congruences().all(|c| c.admits(value))
    }
}

/// Which secrets count as candidates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchMode {
    /// Every solution strictly inside the public bounds.
    Range(SecretBounds),
    /// The first `limit` positive solutions, ignoring the bounds.
    Positive { limit: usize },
}

impl SearchMode {
    pub fn positive() -> Self {
        SearchMode::Positive {
            limit: DEFAULT_POSITIVE_LIMIT,
        }
    }
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchMode::Range(b) => write!(f, "range{b}"),
            SearchMode::Positive { limit } => write!(f, "positive(limit {limit})"),
        }
    }
}

/// Collapses the coalition to one congruence modulo the lcm of its moduli.
pub fn combine(system: &CongruenceSystem) -> Result<Congruence> {
    let congruences: Vec<Congruence> = system.congruences().cloned().collect();
    crt_combine(&congruences)
}

/// Ascending candidates for the coalition under `mode`.
pub fn enumerate_candidates(system: &CongruenceSystem, mode: &SearchMode) -> Result<Vec<BigUint>> {
    let combined = combine(system)?;
    candidates_of(&combined, mode)
}

fn candidates_of(combined: &Congruence, mode: &SearchMode) -> Result<Vec<BigUint>> {
    let step = combined.modulus();
    match mode {
        SearchMode::Range(bounds) => {
            if bounds.beta >= bounds.alpha {
                return Err(Error::EmptyRange);
            }
            // Least c > beta with c ≡ x (mod M).
            let start = &bounds.beta + 1u32;
            let offset = (combined.residue() + step - &start % step) % step;
            let mut c = start + offset;
            let mut out = Vec::new();
            while c < bounds.alpha {
                out.push(c.clone());
                c += step;
            }
            Ok(out)
        }
        SearchMode::Positive { limit } => {
            if *limit == 0 {
                return Err(Error::ZeroLimit);
            }
            let first = if combined.residue().is_zero() {
                step.clone()
            } else {
                combined.residue().clone()
            };
            Ok((0..*limit).map(|k| &first + step * BigUint::from(k)).collect())
        }
    }
}

/// Closed-form `|{c : beta < c < alpha, c ≡ x (mod M)}|`.
pub fn candidate_count(combined: &Congruence, bounds: &SecretBounds) -> BigUint {
    if bounds.beta >= bounds.alpha {
        return BigUint::zero();
    }
    // #{c ≤ n : c ≡ x} up to a constant is floor((n - x) / M).
    let x = BigInt::from(combined.residue().clone());
    let m = BigInt::from(combined.modulus().clone());
    let upto = |n: BigInt| (n - &x).div_floor(&m);
    let hi = upto(BigInt::from(bounds.alpha.clone()) - 1);
    let lo = upto(BigInt::from(bounds.beta.clone()));
    (hi - lo)
        .to_biguint()
        .expect("count over a nonempty interval is nonnegative")
}

/// Everything a coalition learns about the secret.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackReport {
    pub combined: Congruence,
    pub mode: SearchMode,
    pub candidates: Vec<BigUint>,
    pub count: BigUint,
    /// `log2(count)`; zero when no candidate remains.
    pub residual_entropy_bits: f64,
    pub unique: bool,
}

pub fn attack_report(system: &CongruenceSystem, mode: &SearchMode) -> Result<AttackReport> {
    let combined = combine(system)?;
    let candidates = candidates_of(&combined, mode)?;
    let count = BigUint::from(candidates.len());
    Ok(AttackReport {
        residual_entropy_bits: entropy_bits(&count),
        unique: candidates.len() == 1,
        combined,
        mode: mode.clone(),
        candidates,
        count,
    })
}

fn entropy_bits(count: &BigUint) -> f64 {
    if count.is_zero() {
        0.0
    } else {
        log2_big(count)
    }
}

/// One coalition's row in a [`SecurityAudit`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoalitionResult {
    pub participants: Vec<usize>,
    pub combined: Congruence,
    pub count: BigUint,
    pub residual_entropy_bits: f64,
}

/// Candidate counts for every coalition of one size.
#[derive(Debug, Clone, PartialEq)]
pub struct SecurityAudit {
    pub coalition_size: usize,
    pub bounds: SecretBounds,
    /// Lexicographic by participant ids.
    pub coalitions: Vec<CoalitionResult>,
    pub min_count: BigUint,
    pub max_count: BigUint,
    pub mean_count: f64,
}

impl SecurityAudit {
    pub fn coalition(&self, ids: &[usize]) -> Option<&CoalitionResult> {
        self.coalitions.iter().find(|c| c.participants == ids)
    }
}

/// Deals `secret` and runs a range-mode attack for every coalition of
/// `coalition_size` participants.
pub fn security_audit(
    seq: &MignotteSequence,
    mode: ValidationMode,
    secret: &BigUint,
    coalition_size: usize,
) -> Result<SecurityAudit> {
    let n = seq.len();
    if n > AUDIT_MAX_PARTICIPANTS {
        return Err(Error::CombinatorialCap {
            n,
            cap: AUDIT_MAX_PARTICIPANTS,
        });
    }
    if coalition_size == 0 || coalition_size > n {
        return Err(Error::BadCoalitionSize {
            size: coalition_size,
            n,
        });
    }
    let shares = deal(seq, mode, secret)?;
    let bounds = seq.bounds();

    let coalitions = shares
        .iter()
        .combinations(coalition_size)
        .map(|members| {
            let members: Vec<Share> = members.into_iter().cloned().collect();
            let system = CongruenceSystem::from_shares(&members)?;
            let combined = combine(&system)?;
            let count = candidate_count(&combined, &bounds);
            Ok(CoalitionResult {
                participants: members.iter().map(|s| s.participant_id).collect(),
                residual_entropy_bits: entropy_bits(&count),
                combined,
                count,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let counts = coalitions.iter().map(|c| &c.count);
    let min_count = counts.clone().min().cloned().unwrap_or_default();
    let max_count = counts.clone().max().cloned().unwrap_or_default();
    let total: BigUint = counts.sum();
    let mean_count = total.to_f64().unwrap_or(f64::INFINITY) / coalitions.len() as f64;

    Ok(SecurityAudit {
        coalition_size,
        bounds,
        coalitions,
        min_count,
        max_count,
        mean_count,
    })
}
