use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use mignotte_core::attack::{attack_report, security_audit, AttackReport, CongruenceSystem, SearchMode};
use mignotte_core::scheme::{deal, reconstruct};
use mignotte_core::smtbridge::{drive_script, emit_script, SolverCommand};
use mignotte_core::{MignotteSequence, SecretBounds, ShareFormat, SharesFile, ValidationMode};
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::{Cli, CoalitionArgs, Command, SearchArgs};

type CmdResult = Result<u8, CliError>;

pub fn run(cli: Cli, out: &mut dyn Write) -> CmdResult {
    let Cli {
        command,
        format,
        mode,
        json,
    } = cli;
    match command {
        Command::Deal {
            moduli,
            threshold,
            secret,
            out: path,
        } => cmd_deal(out, moduli, threshold, &secret, &path, format, mode, json),
        Command::Reconstruct { coalition } => cmd_reconstruct(out, &coalition, json),
        Command::Attack { coalition, search } => cmd_attack(out, &coalition, &search, json),
        Command::Audit {
            moduli,
            threshold,
            secret,
            size,
        } => cmd_audit(out, moduli, threshold, &secret, size, mode, json),
        Command::EmitSmt {
            coalition,
            search,
            out: path,
        } => cmd_emit_smt(out, &coalition, &search, path.as_deref()),
        Command::SolveSmt {
            script,
            solver_cmd,
            limit,
            timeout,
        } => cmd_solve_smt(out, &script, &solver_cmd, limit, timeout),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_deal(
    out: &mut dyn Write,
    moduli: Vec<BigUint>,
    threshold: usize,
    secret: &BigUint,
    path: &Path,
    format: ShareFormat,
    mode: ValidationMode,
    json: bool,
) -> CmdResult {
    let seq = MignotteSequence::new(moduli, threshold)?;
    let shares = deal(&seq, mode, secret)?;
    let file = SharesFile::new(shares, Some(threshold));
    let text = file
        .render(format)
        .map_err(|e| CliError::Domain(e.to_string()))?;
    fs::write(path, text).map_err(|e| CliError::io(path, e))?;

    let bounds = seq.bounds();
    if json {
        let doc = json!({
            "beta": bounds.beta.to_string(),
            "alpha": bounds.alpha.to_string(),
            "mode": mode.to_string(),
            "format": format.to_string(),
            "path": path.display().to_string(),
            "shares": file.shares.iter().map(|s| json!({
                "participant_id": s.participant_id,
                "value": s.value.to_string(),
                "modulus": s.modulus.to_string(),
            })).collect::<Vec<_>>(),
        });
        writeln!(out, "{doc:#}")?;
    } else {
        writeln!(out, "Secret range: {bounds}")?;
        if mode == ValidationMode::Lax {
            writeln!(out, "Validation: lax (only adjacent moduli checked for coprimality)")?;
        }
        writeln!(out, "Wrote {} shares to {} ({format})", file.shares.len(), path.display())?;
    }
    Ok(0)
}

/// Loads the shares file and picks out the coalition.
fn load_coalition(args: &CoalitionArgs) -> Result<(SharesFile, Vec<mignotte_core::Share>), CliError> {
    let text = fs::read_to_string(&args.shares).map_err(|e| CliError::io(&args.shares, e))?;
    let file = SharesFile::parse(&text)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.shares.display())))?;
    let mut seen = BTreeSet::new();
    if let Some(dup) = args.ids.iter().find(|id| !seen.insert(**id)) {
        return Err(CliError::Domain(format!("participant id {dup} given twice")));
    }
    let picked = file.select(&args.ids)?;
    Ok((file, picked))
}

fn sequence_of(file: &SharesFile, threshold: Option<usize>) -> Result<MignotteSequence, CliError> {
    if threshold.is_none() && file.threshold.is_none() {
        return Err(CliError::Domain(
            "the shares file does not record the threshold; pass --threshold".into(),
        ));
    }
    Ok(file.sequence(threshold)?)
}

fn cmd_reconstruct(out: &mut dyn Write, args: &CoalitionArgs, json: bool) -> CmdResult {
    let (file, picked) = load_coalition(args)?;
    let seq = sequence_of(&file, args.threshold)?;
    let secret = reconstruct(&picked, &seq)?;
    if json {
        writeln!(out, "{:#}", json!({ "participants": args.ids, "secret": secret.to_string() }))?;
    } else {
        writeln!(out, "{secret}")?;
    }
    Ok(0)
}

fn parse_range(text: &str) -> Result<SecretBounds, CliError> {
    let bad = || CliError::Domain(format!("--range expects BETA:ALPHA, got `{text}`"));
    let (beta, alpha) = text.split_once(':').ok_or_else(bad)?;
    let beta: BigUint = beta.trim().parse().map_err(|_| bad())?;
    let alpha: BigUint = alpha.trim().parse().map_err(|_| bad())?;
    Ok(SecretBounds::new(beta, alpha)?)
}

fn search_mode(
    search: &SearchArgs,
    file: &SharesFile,
    threshold: Option<usize>,
) -> Result<SearchMode, CliError> {
    if search.positive {
        return Ok(SearchMode::Positive {
            limit: search.limit,
        });
    }
    match &search.range {
        Some(r) => Ok(SearchMode::Range(parse_range(r)?)),
        None => Ok(SearchMode::Range(sequence_of(file, threshold)?.bounds())),
    }
}

fn cmd_attack(out: &mut dyn Write, args: &CoalitionArgs, search: &SearchArgs, json: bool) -> CmdResult {
    let (file, picked) = load_coalition(args)?;
    let mode = search_mode(search, &file, args.threshold)?;
    let system = CongruenceSystem::from_shares(&picked)?;
    let report = attack_report(&system, &mode)?;
    if json {
        writeln!(out, "{:#}", report_json(&args.ids, &report))?;
    } else {
        for c in &report.candidates {
            writeln!(out, "{c}")?;
        }
    }
    Ok(if report.candidates.is_empty() { 3 } else { 0 })
}

fn report_json(ids: &[usize], report: &AttackReport) -> Value {
    let mut doc = json!({
        "participants": ids,
        "combined": {
            "residue": report.combined.residue().to_string(),
            "modulus": report.combined.modulus().to_string(),
        },
        "candidates": report.candidates.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "count": report.count.to_string(),
        "residual_entropy_bits": report.residual_entropy_bits,
        "unique": report.unique,
    });
    doc["mode"] = match &report.mode {
        SearchMode::Range(b) => json!({
            "kind": "range",
            "beta": b.beta.to_string(),
            "alpha": b.alpha.to_string(),
        }),
        SearchMode::Positive { limit } => json!({ "kind": "positive", "limit": limit }),
    };
    doc
}

fn cmd_audit(
    out: &mut dyn Write,
    moduli: Vec<BigUint>,
    threshold: usize,
    secret: &BigUint,
    size: usize,
    mode: ValidationMode,
    json: bool,
) -> CmdResult {
    let seq = MignotteSequence::new(moduli, threshold)?;
    let audit = security_audit(&seq, mode, secret, size)?;
    if json {
        let doc = json!({
            "coalition_size": audit.coalition_size,
            "beta": audit.bounds.beta.to_string(),
            "alpha": audit.bounds.alpha.to_string(),
            "mode": mode.to_string(),
            "coalitions": audit.coalitions.iter().map(|c| json!({
                "participants": c.participants,
                "count": c.count.to_string(),
                "residual_entropy_bits": c.residual_entropy_bits,
            })).collect::<Vec<_>>(),
            "min": audit.min_count.to_string(),
            "max": audit.max_count.to_string(),
            "mean": audit.mean_count,
        });
        writeln!(out, "{doc:#}")?;
        return Ok(0);
    }
    writeln!(out, "Secret range: {}", audit.bounds)?;
    if mode == ValidationMode::Lax {
        writeln!(out, "Validation: lax (only adjacent moduli checked for coprimality)")?;
    }
    writeln!(out, "coalition\tcount\tentropy_bits")?;
    for c in &audit.coalitions {
        let ids: Vec<String> = c.participants.iter().map(ToString::to_string).collect();
        writeln!(
            out,
            "{{{}}}\t{}\t{:.4}",
            ids.join(","),
            c.count,
            c.residual_entropy_bits
        )?;
    }
    writeln!(
        out,
        "size {}: min {} max {} mean {:.4}",
        audit.coalition_size, audit.min_count, audit.max_count, audit.mean_count
    )?;
    Ok(0)
}

fn cmd_emit_smt(
    out: &mut dyn Write,
    args: &CoalitionArgs,
    search: &SearchArgs,
    path: Option<&Path>,
) -> CmdResult {
    let (file, picked) = load_coalition(args)?;
    let mode = search_mode(search, &file, args.threshold)?;
    let system = CongruenceSystem::from_shares(&picked)?;
    let script = emit_script(&system, &mode)?;
    match path {
        Some(p) => fs::write(p, script).map_err(|e| CliError::io(p, e))?,
        None => out.write_all(script.as_bytes())?,
    }
    Ok(0)
}

fn cmd_solve_smt(
    out: &mut dyn Write,
    script_path: &Path,
    solver_cmd: &str,
    limit: usize,
    timeout: u64,
) -> CmdResult {
    if limit == 0 {
        return Err(CliError::Domain("--limit must be at least 1".into()));
    }
    let script = fs::read_to_string(script_path).map_err(|e| CliError::io(script_path, e))?;
    let solver = SolverCommand::parse(solver_cmd)
        .ok_or_else(|| CliError::Domain("--solver-cmd is empty".into()))?
        .with_timeout(Duration::from_secs(timeout));
    let models = drive_script(&script, limit, &solver)?;
    for m in &models {
        writeln!(out, "{m}")?;
    }
    Ok(if models.is_empty() { 3 } else { 0 })
}
