//! Mignotte threshold secret sharing together with an analysis of what
//! coalitions below the threshold learn about the secret.
//!
//! ```
//! use mignotte_core::{attack, scheme, MignotteSequence, ValidationMode};
//! use num_bigint::BigUint;
//!
//! let seq = MignotteSequence::from_u64(&[7, 9, 11, 13, 17], 3).unwrap();
//! let shares = scheme::deal(&seq, ValidationMode::Strict, &BigUint::from(330u32)).unwrap();
//!
//! // Two shares are below the threshold, yet only five secrets remain.
//! let system = attack::CongruenceSystem::from_shares(&shares[1..3]).unwrap();
//! let mode = attack::SearchMode::Range(seq.bounds());
//! let report = attack::attack_report(&system, &mode).unwrap();
//! assert_eq!(report.count, BigUint::from(5u32));
//! ```

pub mod attack;
pub mod error;
pub mod numtheory;
pub mod scheme;
pub mod sharesfile;
pub mod smtbridge;

pub use attack::{AttackReport, CongruenceSystem, SearchMode, SecurityAudit};
pub use error::{Error, Result};
pub use numtheory::Congruence;
pub use scheme::{MignotteSequence, SecretBounds, Share, ValidationMode};
pub use sharesfile::{ShareFormat, SharesFile};
