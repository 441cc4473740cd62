//! Batch verification of equations, with reports and exit codes.

use std::fmt;
use std::time::Instant;

use heckmort_core::{Exponent, QSeries, VerificationStatus};
use rayon::prelude::*;
use serde::Serialize;

use crate::ast::{Equation, Node};
use crate::cache::Cache;
use crate::eval::{evaluate, EvalError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ENGINE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub order: Exponent,
    pub format: OutputFormat,
    /// Parallelism width; 0 means one thread per core.
    pub jobs: usize,
    pub cache: Option<Cache>,
    pub verbosity: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn new(order: Exponent) -> Result<Self, ConfigError> {
        if !order.is_positive() {
            return Err(ConfigError(format!("order must be positive, got {order}")));
        }
        Ok(RunConfig { order, format: OutputFormat::Text, jobs: 0, cache: None, verbosity: 0 })
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::new(Exponent::int(60)).expect("60 > 0")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MismatchJson {
    pub exponent: (i64, i64),
    pub lhs: String,
    pub rhs: String,
}

/// One line of a JSON report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquationReport {
    pub identity: String,
    /// `Verified`, `Mismatch`, `Inconclusive` or `Error`.
    pub status: String,
    pub checked_order: (i64, i64),
    pub first_mismatch: Option<MismatchJson>,
    pub elapsed_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl EquationReport {
    pub fn is_verified(&self) -> bool {
        self.status == VerificationStatus::Verified.as_str()
    }

    pub fn is_error(&self) -> bool {
        self.error.is_some()
    }

    /// The report with its timing zeroed, for comparing runs.
    pub fn without_timing(&self) -> Self {
        EquationReport { elapsed_ms: 0, ..self.clone() }
    }
}

impl fmt::Display for EquationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let frac = |(n, d): (i64, i64)| {
            if d == 1 {
                format!("{n}")
            } else {
                format!("{n}/{d}")
            }
        };
        let order = frac(self.checked_order);
        match (&self.error, &self.first_mismatch) {
            (Some(e), _) => write!(f, "Error         {}: {e}", self.identity),
            (None, Some(m)) => write!(
                f,
                "{:<13} {} at q^({}): lhs {} rhs {}",
                self.status,
                self.identity,
                frac(m.exponent),
                m.lhs,
                m.rhs
            ),
            (None, None) => write!(f, "{:<13} {} mod q^({order}) [{} ms]", self.status, self.identity, self.elapsed_ms),
        }
    }
}

/// Evaluates through the cache when one is configured. The key is the
/// printed node, which is canonical because printing inverts parsing.
pub fn cached_evaluate(node: &Node, order: Exponent, cache: Option<&Cache>) -> Result<QSeries, EvalError> {
    let text = node.to_string();
    if let Some(c) = cache {
        if let Some(s) = c.load(&text, order) {
            return Ok(s);
        }
    }
    let s = evaluate(node, order)?;
    if let Some(c) = cache {
        // a failed write only costs a recomputation later
        let _ = c.store(&text, order, &s);
    }
    Ok(s)
}

pub fn verify_equation(eq: &Equation, cfg: &RunConfig) -> EquationReport {
    let start = Instant::now();
    let cache = cfg.cache.as_ref();
    let sides = cached_evaluate(&eq.lhs, cfg.order, cache)
        .and_then(|l| cached_evaluate(&eq.rhs, cfg.order, cache).map(|r| (l, r)));
    let elapsed_ms = start.elapsed().as_millis() as u64;
    match sides {
        Err(e) => EquationReport {
            identity: eq.name(),
            status: "Error".into(),
            checked_order: (0, 1),
            first_mismatch: None,
            elapsed_ms,
            error: Some(format!("line {}, {e}", eq.line)),
        },
        Ok((l, r)) => {
            let rep = l.compare_to(&r, cfg.order);
            EquationReport {
                identity: eq.name(),
                status: rep.status.as_str().into(),
                checked_order: (rep.checked_to.numer(), rep.checked_to.denom()),
                first_mismatch: rep.first_mismatch.map(|m| MismatchJson {
                    exponent: (m.exponent.numer(), m.exponent.denom()),
                    lhs: m.lhs.to_string(),
                    rhs: m.rhs.to_string(),
                }),
                elapsed_ms,
                error: None,
            }
        }
    }
}

/// Verifies every equation, concurrently up to `cfg.jobs`. Reports come back
/// in input order whatever the width.
pub fn run_verify(eqs: &[Equation], cfg: &RunConfig) -> Vec<EquationReport> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build().expect("thread pool");
    pool.install(|| eqs.par_iter().map(|eq| verify_equation(eq, cfg)).collect())
}

/// 0 if all verified, 3 if any engine error, else 1.
pub fn exit_code(reports: &[EquationReport]) -> i32 {
    if reports.iter().any(EquationReport::is_error) {
        EXIT_ENGINE
    } else if reports.iter().all(EquationReport::is_verified) {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}

pub fn reports_json(reports: &[EquationReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_equation, parse_file};

    fn cfg(order: i64) -> RunConfig {
        RunConfig::new(Exponent::int(order)).unwrap()
    }

    #[test]
    fn order_must_be_positive() {
        assert!(RunConfig::new(Exponent::ZERO).is_err());
        assert!(RunConfig::new(Exponent::int(-3)).is_err());
        assert_eq!(RunConfig::default().order, Exponent::int(60));
    }

    #[test]
    fn perturbed_coefficient_is_named() {
        let eq = parse_equation("slater: builtin(slater39_lhs) == Jbar(3,8)/Jm(2) + q^7").unwrap();
        let r = verify_equation(&eq, &cfg(20));
        assert_eq!(r.status, "Mismatch");
        assert_eq!(r.identity, "slater");
        assert_eq!(r.first_mismatch.unwrap().exponent, (7, 1));
        assert_eq!(exit_code(&[verify_equation(&eq, &cfg(20))]), EXIT_MISMATCH);
    }

    #[test]
    fn exit_codes() {
        let eqs = parse_file("a: Jm(1) == Jm(1)\nb: J(1,3) == Jm(1)\n").unwrap();
        let reports = run_verify(&eqs, &cfg(15));
        assert_eq!(exit_code(&reports), EXIT_OK);
        let bad = parse_file("Jm(1) == builtin(none)\n").unwrap();
        let reports = run_verify(&bad, &cfg(15));
        assert_eq!(exit_code(&reports), EXIT_ENGINE);
        assert!(reports[0].error.as_ref().unwrap().contains("line 1"));
    }

    #[test]
    fn json_schema() {
        let eqs = parse_file("e: Jm(1) == Jm(1) + q^3\n").unwrap();
        let json: serde_json::Value = serde_json::from_str(&reports_json(&run_verify(&eqs, &cfg(10)))).unwrap();
        let r = &json[0];
        assert_eq!(r["identity"], "e");
        assert_eq!(r["status"], "Mismatch");
        assert_eq!(r["checked_order"], serde_json::json!([10, 1]));
        assert_eq!(r["first_mismatch"]["exponent"], serde_json::json!([3, 1]));
        assert!(r["elapsed_ms"].is_u64());
        assert!(r.get("error").is_none());
    }

    #[test]
    fn cache_and_width_do_not_change_reports() {
        let dir = tempfile::tempdir().unwrap();
        let eqs = parse_file("a: f(1,2,1; q^1, q^1) == gsum(1,2,1; q^1, q^1) + thetaNP(1,1; q^1, q^1)\nb: Jm(1)^3 == Jm(1)*Jm(1)*Jm(1)\n").unwrap();
        let mut c = cfg(20);
        c.cache = Some(Cache::new(dir.path()));
        let strip = |v: Vec<EquationReport>| v.iter().map(EquationReport::without_timing).collect::<Vec<_>>();
        let cold = strip(run_verify(&eqs, &c));
        let warm = strip(run_verify(&eqs, &c));
        c.jobs = 1;
        c.cache = None;
        let serial = strip(run_verify(&eqs, &c));
        assert_eq!(reports_json(&cold), reports_json(&warm));
        assert_eq!(cold, serial);
        assert!(cold.iter().all(EquationReport::is_verified));
    }
}
