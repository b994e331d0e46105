//! SMT-LIB2 rendering of a coalition attack, plus a driver that enumerates
//! models from an external solver by blocking each value of `S` in turn.

use std::fmt::{self, Write as _};
use std::io::{self, BufRead, BufReader, Read, Write};
use std::process::{Child, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::attack::{CongruenceSystem, SearchMode};

/// Per-call wall clock given to the solver when none is configured.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

/// Name of the secret variable in emitted scripts.
pub const SECRET_VAR: &str = "S";

#[derive(Debug, Error)]
pub enum SmtError {
    #[error("EmptySystem: a query needs at least one congruence")]
    EmptySystem,
    #[error("malformed solver output: {0}")]
    Malformed(String),
    #[error("SolverUnavailable: cannot start `{command}`: {source}")]
    SolverUnavailable { command: String, source: io::Error },
    #[error("SolverError: {0}")]
    SolverError(String),
    #[error("Timeout: solver gave no answer within {0:?}")]
    Timeout(Duration),
}

/// A single assertion of the query, in emission order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Assertion {
    /// `S > 0`
    Positive,
    /// `beta < S < alpha`
    Range { beta: BigUint, alpha: BigUint },
    /// `var = S mod modulus`
    ModEquals { var: String, modulus: BigUint },
    /// `var = value`
    Binds { var: String, value: BigUint },
    /// `S != value`
    Blocks(BigUint),
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assertion::Positive => write!(f, "(assert (> {SECRET_VAR} 0))"),
            Assertion::Range { beta, alpha } => write!(
                f,
                "(assert (and (> {SECRET_VAR} {beta}) (< {SECRET_VAR} {alpha})))"
            ),
            Assertion::ModEquals { var, modulus } => {
                write!(f, "(assert (= {var} (mod {SECRET_VAR} {modulus})))")
            }
            Assertion::Binds { var, value } => write!(f, "(assert (= {var} {value}))"),
            Assertion::Blocks(value) => write!(f, "(assert (distinct {SECRET_VAR} {value}))"),
        }
    }
}

/// The attack as an SMT query: `S` plus one share variable per coalition
/// member, named `I0`, `I1`, ... in selection order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmtQuery {
    pub variables: Vec<String>,
    pub assertions: Vec<Assertion>,
    pub system: CongruenceSystem,
}

impl SmtQuery {
    pub fn new(system: &CongruenceSystem, mode: &SearchMode) -> Result<Self, SmtError> {
        if system.is_empty() {
            return Err(SmtError::EmptySystem);
        }
        let mut variables = vec![SECRET_VAR.to_string()];
        let mut assertions = vec![match mode {
            SearchMode::Positive { .. } => Assertion::Positive,
            SearchMode::Range(b) => Assertion::Range {
                beta: b.beta.clone(),
                alpha: b.alpha.clone(),
            },
        }];
        for (i, c) in system.congruences().enumerate() {
            let var = format!("I{i}");
            assertions.push(Assertion::ModEquals {
                var: var.clone(),
                modulus: c.modulus().clone(),
            });
            assertions.push(Assertion::Binds {
                var: var.clone(),
                value: c.residue().clone(),
            });
            variables.push(var);
        }
        Ok(SmtQuery {
            variables,
            assertions,
            system: system.clone(),
        })
    }

    /// Evaluates the query natively with `S = secret`, each share variable
    /// taking the value its mod assertion forces.
    pub fn satisfied_by(&self, secret: &BigUint) -> bool {
        let share_value = |name: &str| {
            self.assertions.iter().find_map(|a| match a {
                Assertion::ModEquals { var, modulus } if var == name => Some(secret % modulus),
                _ => None,
            })
        };
        self.assertions.iter().all(|a| match a {
            Assertion::Positive => *secret > BigUint::zero(),
            Assertion::Range { beta, alpha } => beta < secret && secret < alpha,
            Assertion::ModEquals { .. } => true,
            Assertion::Binds { var, value } => share_value(var).as_ref() == Some(value),
            Assertion::Blocks(v) => v != secret,
        })
    }

    pub fn block(&mut self, value: BigUint) {
        self.assertions.push(Assertion::Blocks(value));
    }

    pub fn render(&self) -> String {
        let mut out = String::from("(set-logic ALL)\n");
        for v in &self.variables {
            let _ = writeln!(out, "(declare-const {v} Int)");
        }
        for a in &self.assertions {
            let _ = writeln!(out, "{a}");
        }
        out.push_str("(check-sat)\n(get-model)\n");
        out
    }
}

/// Renders the coalition query. Only the bound line depends on `mode`; a
/// positive-mode limit is a driver concern and does not appear in the text.
pub fn emit_script(system: &CongruenceSystem, mode: &SearchMode) -> Result<String, SmtError> {
    Ok(SmtQuery::new(system, mode)?.render())
}

pub fn blocking_clause(value: &BigUint) -> String {
    Assertion::Blocks(value.clone()).to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverOutcome {
    pub status: SolverStatus,
    /// Value bound to `S`; present exactly when `status` is `Sat`.
    pub model_value: Option<BigUint>,
}

/// Parses a `check-sat` answer optionally followed by a `get-model` response.
pub fn parse_outcome(solver_output: &str) -> Result<SolverOutcome, SmtError> {
    let mut lines = solver_output.lines().map(str::trim).skip_while(|l| l.is_empty());
    let status_line = lines
        .next()
        .ok_or_else(|| SmtError::Malformed("no status line".into()))?;
    let status = match status_line {
        "sat" => SolverStatus::Sat,
        "unsat" => SolverStatus::Unsat,
        "unknown" => SolverStatus::Unknown,
        other => return Err(SmtError::Malformed(format!("unexpected status `{other}`"))),
    };
    if status != SolverStatus::Sat {
        return Ok(SolverOutcome {
            status,
            model_value: None,
        });
    }
    let rest: Vec<&str> = lines.collect();
    let value = model_value(&rest.join("\n"))?;
    Ok(SolverOutcome {
        status,
        model_value: Some(value),
    })
}

fn tokenize(text: &str) -> Vec<&str> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        if ch == '(' || ch == ')' || ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(&text[s..i]);
            }
            if !ch.is_whitespace() {
                tokens.push(&text[i..i + 1]);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(&text[s..]);
    }
    tokens
}

/// Extracts `v` from `(define-fun S () Int v)` inside a balanced model.
fn model_value(model: &str) -> Result<BigUint, SmtError> {
    let tokens = tokenize(model);
    let mut depth = 0i64;
    for t in &tokens {
        match *t {
            "(" => depth += 1,
            ")" => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            break;
        }
    }
    if depth != 0 || tokens.is_empty() {
        return Err(SmtError::Malformed("unbalanced model".into()));
    }
    let shape = ["define-fun", SECRET_VAR, "(", ")", "Int"];
    tokens
        .windows(shape.len() + 1)
        .find(|w| w[..shape.len()] == shape)
        .and_then(|w| w[shape.len()].parse::<BigUint>().ok())
        .ok_or_else(|| SmtError::Malformed(format!("no nonnegative integer bound to {SECRET_VAR}")))
}

/// An external solver invocation, e.g. `z3 -in`. The script is fed on
/// standard input and the process must answer commands as they arrive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverCommand {
    pub program: String,
    pub args: Vec<String>,
    pub timeout: Duration,
}

impl SolverCommand {
    /// Splits a whitespace separated command template.
    pub fn parse(template: &str) -> Option<Self> {
        let mut parts = template.split_whitespace().map(str::to_string);
        let program = parts.next()?;
        Some(SolverCommand {
            program,
            args: parts.collect(),
            timeout: DEFAULT_TIMEOUT,
        })
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    fn display(&self) -> String {
        std::iter::once(&self.program)
            .chain(&self.args)
            .cloned()
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Emits the coalition query and enumerates up to `limit` models with the
/// external solver.
pub fn drive_solver(
    system: &CongruenceSystem,
    mode: &SearchMode,
    limit: usize,
    solver: &SolverCommand,
) -> Result<Vec<BigUint>, SmtError> {
    let script = emit_script(system, mode)?;
    drive_script(&script, limit, solver)
}

/// Runs an existing script (ending in `(check-sat)` and `(get-model)`) and
/// keeps blocking the reported `S` until the solver answers unsat or `limit`
/// models are collected. Returns the models in ascending order.
pub fn drive_script(
    script: &str,
    limit: usize,
    solver: &SolverCommand,
) -> Result<Vec<BigUint>, SmtError> {
    let mut session = SolverSession::spawn(solver)?;
    let result = session.enumerate(script, limit);
    session.shutdown();
    let mut found = result?;
    found.sort();
    Ok(found)
}

struct SolverSession {
    child: Child,
    lines: Receiver<io::Result<String>>,
    timeout: Duration,
}

impl SolverSession {
    fn spawn(solver: &SolverCommand) -> Result<Self, SmtError> {
        let mut child = Command::new(&solver.program)
            .args(&solver.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|source| SmtError::SolverUnavailable {
                command: solver.display(),
                source,
            })?;
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(SolverSession {
            child,
            lines: rx,
            timeout: solver.timeout,
        })
    }

    fn enumerate(&mut self, script: &str, limit: usize) -> Result<Vec<BigUint>, SmtError> {
        let mut found = Vec::new();
        self.send(script)?;
        while found.len() < limit {
            let outcome = self.read_outcome()?;
            match outcome.status {
                SolverStatus::Unsat => break,
                SolverStatus::Unknown => {
                    return Err(SmtError::SolverError("solver answered unknown".into()))
                }
                SolverStatus::Sat => {
                    let value = outcome.model_value.expect("sat carries a model");
                    if found.contains(&value) {
                        return Err(SmtError::SolverError(format!(
                            "solver repeated blocked model S = {value}"
                        )));
                    }
                    found.push(value.clone());
                    if found.len() < limit {
                        self.send(&format!(
                            "{}\n(check-sat)\n(get-model)\n",
                            blocking_clause(&value)
                        ))?;
                    }
                }
            }
        }
        Ok(found)
    }

    fn send(&mut self, text: &str) -> Result<(), SmtError> {
        let stdin = self.child.stdin.as_mut().expect("stdin is piped");
        stdin
            .write_all(text.as_bytes())
            .and_then(|_| stdin.flush())
            .map_err(|e| self.failure(format!("writing to solver: {e}")))
    }

    /// Reads one status line and, after `sat`, one balanced model.
    fn read_outcome(&mut self) -> Result<SolverOutcome, SmtError> {
        let deadline = Instant::now() + self.timeout;
        let status = loop {
            let line = self.next_line(deadline)?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if trimmed.starts_with("(error") {
                return Err(self.failure(trimmed.to_string()));
            }
            break trimmed.to_string();
        };
        if status != "sat" {
            return parse_outcome(&status);
        }
        let mut model = String::new();
        let mut depth = 0i64;
        let mut opened = false;
        while !opened || depth > 0 {
            let line = self.next_line(deadline)?;
            for t in tokenize(&line) {
                match t {
                    "(" => {
                        depth += 1;
                        opened = true;
                    }
                    ")" => depth -= 1,
                    _ => {}
                }
            }
            model.push_str(&line);
            model.push('\n');
        }
        parse_outcome(&format!("sat\n{model}"))
    }

    fn next_line(&mut self, deadline: Instant) -> Result<String, SmtError> {
        let wait = deadline.saturating_duration_since(Instant::now());
        match self.lines.recv_timeout(wait) {
            Ok(Ok(line)) => Ok(line),
            Ok(Err(e)) => Err(self.failure(format!("reading solver output: {e}"))),
            Err(RecvTimeoutError::Timeout) => {
                let _ = self.child.kill();
                Err(SmtError::Timeout(self.timeout))
            }
            Err(RecvTimeoutError::Disconnected) => {
                Err(self.failure("solver closed its output".to_string()))
            }
        }
    }

    fn failure(&mut self, what: String) -> SmtError {
        let _ = self.child.kill();
        let status = self.child.wait().ok();
        let mut stderr = String::new();
        if let Some(mut err) = self.child.stderr.take() {
            let _ = err.read_to_string(&mut stderr);
        }
        let mut msg = what;
        if let Some(status) = status.filter(|s| !s.success()) {
            let _ = write!(msg, " ({status})");
        }
        if !stderr.trim().is_empty() {
            let _ = write!(msg, ": {}", stderr.trim());
        }
        SmtError::SolverError(msg)
    }

    fn shutdown(mut self) {
        drop(self.child.stdin.take());
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::Congruence;
    use crate::scheme::SecretBounds;

    const GOLDEN: &str = "(set-logic ALL)
(declare-const S Int)
(declare-const I0 Int)
(declare-const I1 Int)
(assert (> S 0))
(assert (= I0 (mod S 9)))
(assert (= I0 6))
(assert (= I1 (mod S 11)))
(assert (= I1 0))
(check-sat)
(get-model)
";

    fn two_share() -> CongruenceSystem {
        CongruenceSystem::new(vec![
            (1, Congruence::new(6u32, 9u32).unwrap()),
            (2, Congruence::new(0u32, 11u32).unwrap()),
        ])
        .unwrap()
    }

    #[test]
    fn golden_positive_script() {
        let script = emit_script(&two_share(), &SearchMode::positive()).unwrap();
        assert_eq!(script, GOLDEN);
        assert_eq!(script, emit_script(&two_share(), &SearchMode::positive()).unwrap());
    }

    #[test]
    fn range_script_swaps_one_line() {
        let bounds = SecretBounds::new(221u32, 693u32).unwrap();
        let script = emit_script(&two_share(), &SearchMode::Range(bounds)).unwrap();
        let expected = GOLDEN.replace(
            "(assert (> S 0))",
            "(assert (and (> S 221) (< S 693)))",
        );
        assert_eq!(script, expected);
    }

    #[test]
    fn declared_variables() {
        let q = SmtQuery::new(&two_share(), &SearchMode::positive()).unwrap();
        assert_eq!(q.variables, ["S", "I0", "I1"]);
        assert_eq!(q.assertions.len(), 1 + 2 * 2);
    }

    #[test]
    fn blocking_clause_examples() {
        assert_eq!(blocking_clause(&BigUint::from(33u32)), "(assert (distinct S 33))");
        assert_eq!(blocking_clause(&BigUint::from(0u32)), "(assert (distinct S 0))");
        assert_eq!(blocking_clause(&BigUint::from(7062u32)), "(assert (distinct S 7062))");
    }

    #[test]
    fn parse_outcome_examples() {
        let out = parse_outcome("sat\n((define-fun S () Int 330) (define-fun I0 () Int 6))").unwrap();
        assert_eq!(out.status, SolverStatus::Sat);
        assert_eq!(out.model_value, Some(BigUint::from(330u32)));

        let out = parse_outcome("unsat").unwrap();
        assert_eq!(out, SolverOutcome { status: SolverStatus::Unsat, model_value: None });
        assert_eq!(parse_outcome("unknown\n").unwrap().status, SolverStatus::Unknown);

        assert!(matches!(parse_outcome("sat\n(garbage"), Err(SmtError::Malformed(_))));
        assert!(matches!(parse_outcome(""), Err(SmtError::Malformed(_))));
        assert!(matches!(parse_outcome("error"), Err(SmtError::Malformed(_))));
    }

    #[test]
    fn parse_outcome_tolerates_layout() {
        // z3 layout: one binding per line, value on its own line.
        let z3 = "sat\n(\n  (define-fun I0 () Int\n    6)\n  (define-fun S () Int\n    132)\n)\n";
        assert_eq!(parse_outcome(z3).unwrap().model_value, Some(BigUint::from(132u32)));
        let older = "\n  sat\n(model\n  (define-fun S () Int 2013)\n)";
        assert_eq!(parse_outcome(older).unwrap().model_value, Some(BigUint::from(2013u32)));
        // The share variable alone is not enough.
        assert!(matches!(
            parse_outcome("sat\n((define-fun I0 () Int 6))"),
            Err(SmtError::Malformed(_))
        ));
    }

    #[test]
    fn missing_solver_binary() {
        let cmd = SolverCommand::parse("definitely-not-a-solver-binary -in").unwrap();
        let err = drive_solver(&two_share(), &SearchMode::positive(), 5, &cmd).unwrap_err();
        assert!(matches!(err, SmtError::SolverUnavailable { .. }), "{err}");
    }

    #[test]
    fn solver_command_parse() {
        let cmd = SolverCommand::parse("  z3   -in -smt2 ").unwrap();
        assert_eq!(cmd.program, "z3");
        assert_eq!(cmd.args, ["-in", "-smt2"]);
        assert_eq!(cmd.timeout, DEFAULT_TIMEOUT);
        assert_eq!(SolverCommand::parse("   "), None);
    }
}
