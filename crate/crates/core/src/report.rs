//! Structured verification reports.
//!
//! Reports serialize to JSON with a stable field order. The `elapsed_ms`
//! field is the only part allowed to differ between repeated runs of the
//! same task; `determinism_payload` strips it so byte comparison of two runs
//! is meaningful.

use serde::Serialize;

use crate::structure::CriticalPairClassification;

/// How a critical pair fared against its taxonomy.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum ClassifyOutcome {
    /// Matched a case.
    Classified {
        #[serde(flatten)]
        classification: CriticalPairClassification,
    },
    /// The taxonomy's own hypothesis does not cover this pair.
    OutsideTaxonomy { reason: String },
    /// Hypothesis met, no case matched. For proven taxonomies this is an
    /// implementation bug; for the conjectured one it is the interesting
    /// outcome either way.
    Unclassified,
}

impl ClassifyOutcome {
    pub fn case_label(&self) -> &str {
        match self {
            ClassifyOutcome::Classified { classification } => classification.case_label,
            ClassifyOutcome::OutsideTaxonomy { .. } => "out_of_scope",
            ClassifyOutcome::Unclassified => "unclassified",
        }
    }
}

/// One offending pair (bound violation, counterexample, or unclassified).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairFinding {
    pub a_hex: String,
    pub b_hex: String,
    pub a: String,
    pub b: String,
    pub detail: String,
}

/// One critical pair as enumerated, with its classification outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPairRecord {
    pub a_hex: String,
    pub b_hex: String,
    pub a: String,
    pub b: String,
    pub a_size: usize,
    pub b_size: usize,
    pub product_size: usize,
    pub outcome: ClassifyOutcome,
}

/// A named boolean assertion inside a reproduction-style verifier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Outcome of one verifier run.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    /// Which verifier produced this report.
    pub verifier: String,
    /// Echo of the task parameters.
    pub task: serde_json::Value,
    /// Exact number of instances enumerated (no sampling drift).
    pub instances_checked: u64,
    /// Instances skipped because a progression collided with itself.
    pub degenerate_skipped: u64,
    /// Critical pairs whose taxonomy hypothesis does not apply.
    pub hypothesis_out_of_scope: u64,
    pub critical_pairs_found: u64,
    pub bound_violations: Vec<PairFinding>,
    pub counterexamples: Vec<PairFinding>,
    pub classification_failures: Vec<PairFinding>,
    pub sample_witnesses: Vec<CriticalPairRecord>,
    pub checks: Vec<CheckLine>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// True when record retention hit its cap (counts stay exact).
    pub truncated: bool,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn new(verifier: &str, task: serde_json::Value) -> Self {
        VerificationReport {
            verifier: verifier.to_string(),
            task,
            instances_checked: 0,
            degenerate_skipped: 0,
            hypothesis_out_of_scope: 0,
            critical_pairs_found: 0,
            bound_violations: Vec::new(),
            counterexamples: Vec::new(),
            classification_failures: Vec::new(),
            sample_witnesses: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            seed: None,
            truncated: false,
            elapsed_ms: 0,
        }
    }

    /// Any finding a verifier run should fail on.
    pub fn has_findings(&self) -> bool {
        !self.bound_violations.is_empty()
            || !self.counterexamples.is_empty()
            || !self.classification_failures.is_empty()
            || self.checks.iter().any(|c| !c.pass)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("report serializes")
    }

    /// JSON with timing removed: two runs of the same task must agree on
    /// this byte-for-byte, whatever the worker count.
    pub fn determinism_payload(&self) -> String {
        let mut v = self.to_json_value();
        if let Some(map) = v.as_object_mut() {
            map.remove("elapsed_ms");
        }
        serde_json::to_string(&v).expect("report serializes")
    }

    /// Human-oriented summary.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("verifier: {}\n", self.verifier));
        out.push_str(&format!("instances checked: {}\n", self.instances_checked));
        if self.degenerate_skipped > 0 {
            out.push_str(&format!("degenerate skipped: {}\n", self.degenerate_skipped));
        }
        out.push_str(&format!(
            "critical pairs found: {}\n",
            self.critical_pairs_found
        ));
        if self.hypothesis_out_of_scope > 0 {
            out.push_str(&format!(
                "outside taxonomy hypothesis: {}\n",
                self.hypothesis_out_of_scope
            ));
        }
        out.push_str(&format!(
            "bound violations: {}\n",
            self.bound_violations.len()
        ));
        for v in &self.bound_violations {
            out.push_str(&format!("  A={} B={} {}\n", v.a, v.b, v.detail));
        }
        if !self.counterexamples.is_empty() || self.verifier.starts_with("thm") {
            out.push_str(&format!(
                "counterexamples: {}\n",
                self.counterexamples.len()
            ));
        }
        for v in &self.counterexamples {
            out.push_str(&format!("  A={} B={} {}\n", v.a, v.b, v.detail));
        }
        if !self.classification_failures.is_empty() {
            out.push_str(&format!(
                "CLASSIFICATION FAILURES: {}\n",
                self.classification_failures.len()
            ));
            for v in &self.classification_failures {
                out.push_str(&format!("  A={} B={} {}\n", v.a, v.b, v.detail));
            }
        }
        for c in &self.checks {
            out.push_str(&format!(
                "check {}: {} ({})\n",
                c.name,
                if c.pass { "pass" } else { "FAIL" },
                c.detail
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed: {seed}\n"));
        }
        if self.truncated {
            out.push_str("records truncated at retention cap\n");
        }
        out.push_str(&format!("elapsed: {} ms\n", self.elapsed_ms));
        out
    }
}

/// CSV of critical pairs: one row per record, hex bit vectors plus sizes and
/// the case label.
pub fn critical_pairs_csv(records: &[CriticalPairRecord]) -> String {
    let mut out = String::from("a_bits_hex,b_bits_hex,a_size,b_size,product_size,case_label\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.a_hex,
            r.b_hex,
            r.a_size,
            r.b_size,
            r.product_size,
            r.outcome.case_label()
        ));
    }
    out
}
