//! Browser bindings for the demo page in `www/`.
//!
//! Each exported function takes plain strings and numbers from the page and
//! returns a JSON document the page renders. Big integers travel as decimal
//! strings.

use mignotte_core::attack::{
    candidate_count, combine, enumerate_candidates, security_audit, CongruenceSystem, SearchMode,
};
use mignotte_core::scheme::{deal, information_rate};
use mignotte_core::{MignotteSequence, ValidationMode};
use num_bigint::BigUint;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Most candidates listed for one coalition; larger sets are only counted.
pub const MAX_LISTED: usize = 2_000;

fn parse_list<T: std::str::FromStr>(csv: &str, what: &str) -> Result<Vec<T>, String> {
    csv.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| format!("bad {what} `{s}`")))
        .collect()
}

fn parse_mode(mode: &str) -> Result<ValidationMode, String> {
    mode.parse()
}

fn sequence(moduli: &str, threshold: usize) -> Result<MignotteSequence, String> {
    let moduli: Vec<BigUint> = parse_list(moduli, "modulus")?;
    MignotteSequence::new(moduli, threshold).map_err(|e| e.to_string())
}

fn parse_secret(secret: &str) -> Result<BigUint, String> {
    secret
        .trim()
        .parse()
        .map_err(|_| format!("bad secret `{secret}`"))
}

/// Bounds, validation outcome and per-participant information rates.
pub fn explore_sequence(moduli: &str, threshold: usize, mode: &str) -> Result<Value, String> {
    let seq = sequence(moduli, threshold)?;
    let mode = parse_mode(mode)?;
    let bounds = seq.bounds();
    let validation = seq.validate(mode).err().map(|e| e.to_string());
    let rate = information_rate(&seq).ok();
    Ok(json!({
        "moduli": seq.moduli().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "threshold": seq.threshold(),
        "beta": bounds.beta.to_string(),
        "alpha": bounds.alpha.to_string(),
        "secret_space": bounds.secret_space().to_string(),
        "valid": validation.is_none(),
        "error": validation,
        "rates": rate.as_ref().map(|r| r.ratios.clone()),
        "rate_min": rate.as_ref().map(|r| r.min),
        "rate_max": rate.as_ref().map(|r| r.max),
    }))
}

/// Deals `secret` and attacks it with the coalition `ids` in range mode.
pub fn attack_coalition(
    moduli: &str,
    threshold: usize,
    secret: &str,
    ids: &str,
    mode: &str,
) -> Result<Value, String> {
    let seq = sequence(moduli, threshold)?;
    let secret = parse_secret(secret)?;
    let shares = deal(&seq, parse_mode(mode)?, &secret).map_err(|e| e.to_string())?;
    let ids: Vec<usize> = parse_list(ids, "participant id")?;
    let picked = ids
        .iter()
        .map(|&id| {
            shares
                .get(id)
                .cloned()
                .ok_or_else(|| format!("no participant {id}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let system = CongruenceSystem::from_shares(&picked).map_err(|e| e.to_string())?;
    let combined = combine(&system).map_err(|e| e.to_string())?;
    let bounds = seq.bounds();
    let count = candidate_count(&combined, &bounds);
    let listed = count <= BigUint::from(MAX_LISTED);
    let candidates = if listed {
        enumerate_candidates(&system, &SearchMode::Range(bounds.clone()))
            .map_err(|e| e.to_string())?
            .iter()
            .map(ToString::to_string)
            .collect()
    } else {
        Vec::new()
    };
    Ok(json!({
        "beta": bounds.beta.to_string(),
        "alpha": bounds.alpha.to_string(),
        "secret": secret.to_string(),
        "shares": shares.iter().map(|s| json!({
            "id": s.participant_id,
            "value": s.value.to_string(),
            "modulus": s.modulus.to_string(),
        })).collect::<Vec<_>>(),
        "coalition": ids,
        "residue": combined.residue().to_string(),
        "modulus": combined.modulus().to_string(),
        "count": count.to_string(),
        "entropy_bits": mignotte_core::scheme::log2_big(&count.clone().max(BigUint::from(1u32))),
        "listed": listed,
        "candidates": candidates,
    }))
}

/// Candidate counts for every coalition of `size` participants.
pub fn audit(moduli: &str, threshold: usize, secret: &str, size: usize, mode: &str) -> Result<Value, String> {
    let seq = sequence(moduli, threshold)?;
    let secret = parse_secret(secret)?;
    let report = security_audit(&seq, parse_mode(mode)?, &secret, size).map_err(|e| e.to_string())?;
    Ok(json!({
        "size": report.coalition_size,
        "secret_space": report.bounds.secret_space().to_string(),
        "coalitions": report.coalitions.iter().map(|c| json!({
            "ids": c.participants,
            "count": c.count.to_string(),
            "entropy_bits": c.residual_entropy_bits,
        })).collect::<Vec<_>>(),
        "min": report.min_count.to_string(),
        "max": report.max_count.to_string(),
        "mean": report.mean_count,
    }))
}

fn to_js(result: Result<Value, String>) -> Result<String, JsValue> {
    result
        .map(|v| v.to_string())
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = exploreSequence)]
pub fn explore_sequence_js(moduli: &str, threshold: usize, mode: &str) -> Result<String, JsValue> {
    to_js(explore_sequence(moduli, threshold, mode))
}

#[wasm_bindgen(js_name = attackCoalition)]
pub fn attack_coalition_js(
    moduli: &str,
    threshold: usize,
    secret: &str,
    ids: &str,
    mode: &str,
) -> Result<String, JsValue> {
    to_js(attack_coalition(moduli, threshold, secret, ids, mode))
}

#[wasm_bindgen(js_name = auditCoalitions)]
pub fn audit_js(moduli: &str, threshold: usize, secret: &str, size: usize, mode: &str) -> Result<String, JsValue> {
    to_js(audit(moduli, threshold, secret, size, mode))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SESSION: &str = "7,9,11,13,17";

    #[test]
    fn explore_session_sequence() {
        let v = explore_sequence(SESSION, 3, "strict").unwrap();
        assert_eq!(v["beta"], "221");
        assert_eq!(v["alpha"], "693");
        assert_eq!(v["secret_space"], "471");
        assert_eq!(v["valid"], true);
        assert_eq!(v["rates"].as_array().unwrap().len(), 5);
    }

    #[test]
    fn explore_reports_invalid_sequences() {
        let v = explore_sequence("7, 9, 11, 13, 15", 3, "strict").unwrap();
        assert_eq!(v["valid"], false);
        assert!(v["error"].as_str().unwrap().contains("NotPairwiseCoprime(9,15)"));
        assert_eq!(explore_sequence("7,9,11,13,15", 3, "lax").unwrap()["valid"], true);
        assert!(explore_sequence("7,x", 2, "strict").is_err());
        assert!(explore_sequence(SESSION, 3, "sloppy").is_err());
    }

    #[test]
    fn attack_two_shares() {
        let v = attack_coalition(SESSION, 3, "330", "1,2", "strict").unwrap();
        assert_eq!(v["count"], "5");
        assert_eq!(v["modulus"], "99");
        let candidates: Vec<&str> = v["candidates"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c.as_str().unwrap())
            .collect();
        assert_eq!(candidates, ["231", "330", "429", "528", "627"]);
        assert!(attack_coalition(SESSION, 3, "330", "1,9", "strict").is_err());
        assert!(attack_coalition(SESSION, 3, "221", "1,2", "strict").is_err());
    }

    #[test]
    fn attack_caps_listing() {
        let v = attack_coalition("1009,1013,1019,1021", 3, "2000000", "0", "strict").unwrap();
        assert_eq!(v["listed"], false);
        assert!(v["candidates"].as_array().unwrap().is_empty());
        assert_ne!(v["count"], "0");
    }

    #[test]
    fn audit_pairs() {
        let v = audit(SESSION, 3, "330", 2, "strict").unwrap();
        let rows = v["coalitions"].as_array().unwrap();
        assert_eq!(rows.len(), 10);
        assert_eq!(rows[0]["ids"], json!([0, 1]));
        assert_eq!(rows[0]["count"], "7");
        assert_eq!(rows[9]["count"], "2");
        assert!(audit(SESSION, 3, "330", 0, "strict").is_err());
    }
}
