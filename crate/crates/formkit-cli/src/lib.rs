//! Library surface of the formkit CLI: JSON document schemas and the
//! command implementations, kept in a library so integration tests can
//! exercise them directly.

pub mod commands;
pub mod doc;

use formkit::Tolerance;

/// Resolve the effective tolerance: defaults, then the
/// `FORMKIT_TOL_OVERRIDE` environment variable (`"rank=<x>,eq=<y>"`),
/// then explicit flags.
pub fn resolve_tolerance(
    flag_rank: Option<f64>,
    flag_eq: Option<f64>,
    env_override: Option<&str>,
) -> Result<Tolerance, String> {
    let mut tol = Tolerance::default();
    if let Some(raw) = env_override {
        for item in raw.split(',').filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| format!("FORMKIT_TOL_OVERRIDE entry {item:?} is not key=value"))?;
            let parsed: f64 = value
                .trim()
                .parse()
                .map_err(|e| format!("FORMKIT_TOL_OVERRIDE {key}: {e}"))?;
            match key.trim() {
                "rank" => tol.rank_rel = Some(parsed),
                "eq" => tol.eq_abs = parsed,
                other => return Err(format!("FORMKIT_TOL_OVERRIDE: unknown key {other:?}")),
            }
        }
    }
    if let Some(r) = flag_rank {
        tol.rank_rel = Some(r);
    }
    if let Some(e) = flag_eq {
        tol.eq_abs = e;
    }
    tol.validate().map_err(|e| e.to_string())?;
    Ok(tol)
}
