use std::collections::BTreeMap;

use lqu_core::Tolerances;

use crate::error::{CliError, CliResult};

/// Environment variable holding a JSON object of tolerance overrides, e.g.
/// `LQU_TOLERANCES='{"psd_clip": 1e-9, "trace": 1e-8}'`.
pub const TOLERANCE_ENV: &str = "LQU_TOLERANCES";

/// Applies a JSON object of overrides to the defaults. Malformed JSON is a
/// parse error; unknown names or negative values are validation errors.
pub fn parse_tolerances(json: &str) -> CliResult<Tolerances> {
    let map: BTreeMap<String, f64> =
        serde_json::from_str(json).map_err(|e| CliError::Parse(format!("{TOLERANCE_ENV}: {e}")))?;
    let mut tol = Tolerances::DEFAULT;
    for (name, value) in map {
        tol.set(&name, value)
            .map_err(|e| CliError::Validation(format!("{TOLERANCE_ENV}: {e}")))?;
    }
    Ok(tol)
}

/// Defaults, overridden by [`TOLERANCE_ENV`] when it is set and nonempty.
pub fn tolerances_from_env() -> CliResult<Tolerances> {
    match std::env::var(TOLERANCE_ENV) {
        Ok(s) if !s.trim().is_empty() => parse_tolerances(&s),
        _ => Ok(Tolerances::DEFAULT),
    }
}

pub fn tolerance_map(tol: &Tolerances) -> BTreeMap<&'static str, f64> {
    Tolerances::NAMES
        .iter()
        .map(|&n| (n, tol.get(n).expect("listed name")))
        .collect()
}
