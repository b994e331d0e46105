//! On-disk share sets.
//!
//! Two layouts are supported. The *paper* layout is one share per line,
//! `<value> , <modulus> ` with a trailing space; the line index is the
//! participant id and the threshold is not recorded. The *structured* layout
//! records the public parameters alongside the share values:
//!
//! ```text
//! moduli = [7, 9, 11, 13, 17]
//! threshold = 3
//! shares = [1, 6, 0, 5, 7]
//! ```
//!
//! Fields appear in exactly that order, one per line. Blank lines and lines
//! starting with `#` are ignored. `shares[i]` belongs to participant `i`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use thiserror::Error;

use crate::error::Error;
use crate::scheme::{MignotteSequence, Share};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("file contains no shares")]
    Empty,
    #[error("{shares} share values for {moduli} moduli")]
    LengthMismatch { moduli: usize, shares: usize },
    #[error("the structured layout needs a threshold")]
    MissingThreshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShareFormat {
    Paper,
    #[default]
    Structured,
}

impl fmt::Display for ShareFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShareFormat::Paper => "paper",
            ShareFormat::Structured => "structured",
        })
    }
}

impl FromStr for ShareFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper" => Ok(ShareFormat::Paper),
            "structured" => Ok(ShareFormat::Structured),
            other => Err(format!("unknown format `{other}` (expected paper|structured)")),
        }
    }
}

/// A full set of dealt shares, ordered by participant id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharesFile {
    pub threshold: Option<usize>,
    pub shares: Vec<Share>,
}

impl SharesFile {
    pub fn new(shares: Vec<Share>, threshold: Option<usize>) -> Self {
        SharesFile { threshold, shares }
    }

    pub fn moduli(&self) -> Vec<BigUint> {
        self.shares.iter().map(|s| s.modulus.clone()).collect()
    }

    /// Rebuilds the public sequence. A threshold given here overrides the
    /// one stored in the file.
    pub fn sequence(&self, threshold: Option<usize>) -> Result<MignotteSequence, Error> {
        let t = threshold
            .or(self.threshold)
            .ok_or(Error::BadThreshold {
                threshold: 0,
                n: self.shares.len(),
            })?;
        MignotteSequence::new(self.moduli(), t)
    }

    /// Shares of the given participants, in the given order.
    pub fn select(&self, ids: &[usize]) -> Result<Vec<Share>, Error> {
        ids.iter()
            .map(|&id| {
                self.shares.get(id).cloned().ok_or(Error::UnknownParticipant {
                    id,
                    n: self.shares.len(),
                })
            })
            .collect()
    }

    pub fn render(&self, format: ShareFormat) -> Result<String, FormatError> {
        match format {
            ShareFormat::Paper => Ok(self.render_paper()),
            ShareFormat::Structured => self.render_structured(),
        }
    }

    pub fn render_paper(&self) -> String {
        self.shares
            .iter()
            .map(|s| format!("{} , {} \n", s.value, s.modulus))
            .collect()
    }

    pub fn render_structured(&self) -> Result<String, FormatError> {
        let t = self.threshold.ok_or(FormatError::MissingThreshold)?;
        let list = |items: Vec<&BigUint>| {
            items
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        Ok(format!(
            "moduli = [{}]\nthreshold = {t}\nshares = [{}]\n",
            list(self.shares.iter().map(|s| &s.modulus).collect()),
            list(self.shares.iter().map(|s| &s.value).collect()),
        ))
    }

    /// Reads either layout, choosing by the first meaningful line.
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let structured = meaningful_lines(text)
            .next()
            .is_some_and(|(_, l)| l.starts_with("moduli"));
        if structured {
            Self::parse_structured(text)
        } else {
            Self::parse_paper(text)
        }
    }

    pub fn parse_paper(text: &str) -> Result<Self, FormatError> {
        let mut shares = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let syntax = |msg: &str| FormatError::Syntax {
                line: idx + 1,
                msg: msg.to_string(),
            };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let [value, ",", modulus] = tokens[..] else {
                return Err(syntax("expected `<value> , <modulus>`"));
            };
            shares.push(Share {
                participant_id: shares.len(),
                value: parse_int(value).ok_or_else(|| syntax("bad share value"))?,
                modulus: parse_int(modulus).ok_or_else(|| syntax("bad modulus"))?,
            });
        }
        if shares.is_empty() {
            return Err(FormatError::Empty);
        }
        Ok(SharesFile {
            threshold: None,
            shares,
        })
    }

    pub fn parse_structured(text: &str) -> Result<Self, FormatError> {
        let mut lines = meaningful_lines(text);
        let mut field = |name: &str| {
            let (no, line) = lines.next().ok_or_else(|| FormatError::Syntax {
                line: 0,
                msg: format!("missing field `{name}`"),
            })?;
            let syntax = |msg: String| FormatError::Syntax { line: no, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| syntax(format!("expected `{name} = ...`")))?;
            if key.trim() != name {
                return Err(syntax(format!("expected field `{name}`, found `{}`", key.trim())));
            }
            Ok((no, value.trim().to_string()))
        };

        let (no, moduli) = field("moduli")?;
        let moduli = parse_list(&moduli, no)?;
        let (no, threshold) = field("threshold")?;
        let threshold = threshold.parse::<usize>().map_err(|_| FormatError::Syntax {
            line: no,
            msg: "threshold must be a nonnegative integer".into(),
        })?;
        let (no, values) = field("shares")?;
        let values = parse_list(&values, no)?;
        if let Some((no, _)) = lines.next() {
            return Err(FormatError::Syntax {
                line: no,
                msg: "unexpected content after `shares`".into(),
            });
        }

        if moduli.len() != values.len() {
            return Err(FormatError::LengthMismatch {
                moduli: moduli.len(),
                shares: values.len(),
            });
        }
        if moduli.is_empty() {
            return Err(FormatError::Empty);
        }
        let shares = values
            .into_iter()
            .zip(moduli)
            .enumerate()
            .map(|(participant_id, (value, modulus))| Share {
                participant_id,
                value,
                modulus,
            })
            .collect();
        Ok(SharesFile {
            threshold: Some(threshold),
            shares,
        })
    }
}

fn meaningful_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_int(token: &str) -> Option<BigUint> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    token.parse().ok()
}

fn parse_list(text: &str, line: usize) -> Result<Vec<BigUint>, FormatError> {
    let syntax = |msg: &str| FormatError::Syntax {
        line,
        msg: msg.to_string(),
    };
    let inner = text
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| syntax("expected a bracketed list"))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|item| parse_int(item.trim()).ok_or_else(|| syntax("list items must be nonnegative integers")))
        .collect()
}
