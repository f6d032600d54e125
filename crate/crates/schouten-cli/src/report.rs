//! JSON report schema.
//!
//! Every command emits one `Report` (batch verification emits an array of
//! them, ordered by seed). All scalars are serialized as exact strings
//! ("3/4", "1/2+5/3i") so no consumer ever sees a rounded value. With an
//! identical configuration the output is byte-identical except for the
//! `timing_ms` and `timestamp` fields.

use std::collections::BTreeMap;

use serde::Serialize;

use schouten_core::deformation::{DecompositionChecks, DeformationReport, Verdict};
use schouten_core::poincare::ResonanceCertificate;

use crate::expr::{format_expression, Mode};

#[derive(Serialize, Clone, Debug)]
pub struct CertificateJson {
    pub kind: String,
    pub order_bound: u32,
    pub nonresonant: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<i64>>,
}

impl CertificateJson {
    pub fn from_resonance(cert: &ResonanceCertificate) -> Self {
        CertificateJson {
            kind: "nonresonance".to_string(),
            order_bound: cert.order_bound,
            nonresonant: cert.is_nonresonant(),
            witness: cert.witness.clone(),
        }
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub config: BTreeMap<String, serde_json::Value>,
    pub result: serde_json::Value,
    pub dimensions: BTreeMap<String, usize>,
    pub bases: BTreeMap<String, Vec<String>>,
    pub certificates: Vec<CertificateJson>,
    pub timing_ms: u64,
    pub timestamp: u64,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            verdict: String::new(),
            seed: None,
            config: BTreeMap::new(),
            result: serde_json::Value::Null,
            dimensions: BTreeMap::new(),
            bases: BTreeMap::new(),
            certificates: Vec::new(),
            timing_ms: 0,
            timestamp: 0,
        }
    }

    pub fn config_str(&mut self, key: &str, value: impl Into<String>) {
        self.config
            .insert(key.to_string(), serde_json::Value::String(value.into()));
    }

    pub fn config_num(&mut self, key: &str, value: u64) {
        self.config.insert(key.to_string(), serde_json::json!(value));
    }
}

fn checks_json(c: &DecompositionChecks) -> serde_json::Value {
    serde_json::json!({
        "alpha_wedge": c.alpha_wedge,
        "alpha0_bracket": c.alpha0_bracket,
        "derivative_eq": c.derivative_eq,
        "transport_eq": c.transport_eq,
        "all_pass": c.all_pass(),
    })
}

/// Serialize one verification run. The expression strings use homogeneous
/// naming (`x0..xn`, `e0..en`) because the bases are global sections.
pub fn verification_report(command: &str, run: &DeformationReport) -> Report {
    let mut report = Report::new(command);
    report.seed = Some(run.seed);
    report.config_num("n", run.n as u64);
    report.config_num("order_bound", u64::from(run.order_bound));
    report.config_str("lambda", run.lambda.to_string());
    report.config_str("mode", "homogeneous");
    report.verdict = match run.verdict {
        Verdict::FirstOrderVerified => "first-order-theorem-verified".to_string(),
        Verdict::CounterexampleCandidate => "counterexample-candidate".to_string(),
    };
    report
        .dimensions
        .insert("tangent_pois".to_string(), run.dim_poisson);
    report
        .dimensions
        .insert("tangent_fol".to_string(), run.dim_foliation);
    report.bases.insert(
        "tangent_pois".to_string(),
        run.poisson_basis
            .iter()
            .map(|s| format_expression(s.rep(), Mode::Homogeneous))
            .collect(),
    );
    report.bases.insert(
        "tangent_fol".to_string(),
        run.foliation_basis
            .iter()
            .map(|s| format_expression(s.rep(), Mode::Homogeneous))
            .collect(),
    );
    report
        .certificates
        .push(CertificateJson::from_resonance(&run.genericity.resonance));
    report.result = serde_json::json!({
        "rank": run.rank,
        "poisson_contained_in_foliation": run.poisson_contained_in_foliation,
        "foliation_contained_in_poisson": run.foliation_contained_in_poisson,
        "outside_scope": run.outside_scope,
        "expected_dim": run.expected_dim,
        "dim_warning": run.dim_warning(),
        "genericity": {
            "in_poincare_domain": run.genericity.in_poincare_domain,
            "origin_singular": run.genericity.origin_singular,
            "linear_part_prescribed": run.genericity.linear_part_prescribed,
            "admissible": run.genericity.admissible(),
        },
        "decomposition_checks": run
            .decomposition_checks
            .iter()
            .map(checks_json)
            .collect::<Vec<_>>(),
        "offending": run
            .offending
            .as_ref()
            .map(|s| format_expression(s.rep(), Mode::Homogeneous)),
    });
    report
}
