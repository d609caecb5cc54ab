//! Report assembly and rendering. The JSON form is byte-deterministic
//! for a given config and seed: keys are emitted in sorted order and
//! timing lives only in the markdown rendering.

use std::fmt::Write as _;

use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub label: String,
    pub passed: bool,
    /// Residual or witness text, present when there is something to
    /// show (always on failure).
    pub detail: Option<String>,
    /// A narrowed config document that reproduces this failure.
    pub reproducer: Option<Value>,
}

impl CheckResult {
    pub fn pass(label: impl Into<String>) -> CheckResult {
        CheckResult {
            label: label.into(),
            passed: true,
            detail: None,
            reproducer: None,
        }
    }

    pub fn fail(label: impl Into<String>, detail: String, reproducer: Value) -> CheckResult {
        CheckResult {
            label: label.into(),
            passed: false,
            detail: Some(detail),
            reproducer: Some(reproducer),
        }
    }

    pub fn with_detail(mut self, detail: String) -> CheckResult {
        self.detail = Some(detail);
        self
    }
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: String,
    pub elapsed_ms: u128,
    pub checks: Vec<CheckResult>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone)]
pub struct ReportDocument {
    /// Echo of the effective configuration the run used, after
    /// command-line and environment overrides.
    pub config: Value,
    pub suites: Vec<SuiteResult>,
}

impl ReportDocument {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed())
    }
}

pub fn emit(report: &ReportDocument, format: Format) -> String {
    match format {
        Format::Json => emit_json(report),
        Format::Markdown => emit_markdown(report),
    }
}

fn emit_json(report: &ReportDocument) -> String {
    let suites: Vec<Value> = report
        .suites
        .iter()
        .map(|suite| {
            let checks: Vec<Value> = suite
                .checks
                .iter()
                .map(|check| {
                    let mut obj = json!({
                        "label": check.label,
                        "passed": check.passed,
                    });
                    let map = obj.as_object_mut().expect("literal object");
                    if let Some(detail) = &check.detail {
                        map.insert("detail".into(), Value::String(detail.clone()));
                    }
                    if let Some(repro) = &check.reproducer {
                        map.insert("reproducer".into(), repro.clone());
                    }
                    obj
                })
                .collect();
            json!({
                "name": suite.name,
                "passed": suite.passed(),
                "checks": checks,
            })
        })
        .collect();
    let doc = json!({
        "config": report.config,
        "passed": report.all_passed(),
        "suites": suites,
    });
    let mut out = serde_json::to_string_pretty(&doc).expect("report serializes");
    out.push('\n');
    out
}

fn emit_markdown(report: &ReportDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Verification report\n");
    let _ = writeln!(
        out,
        "Overall: **{}**\n",
        if report.all_passed() { "pass" } else { "FAIL" }
    );

    let _ = writeln!(out, "## Configuration\n");
    let _ = writeln!(out, "```json");
    let _ = writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&report.config).expect("config echo serializes")
    );
    let _ = writeln!(out, "```\n");

    let _ = writeln!(out, "## Suites\n");
    let _ = writeln!(out, "| suite | checks | result | time (ms) |");
    let _ = writeln!(out, "|-------|-------:|--------|----------:|");
    for suite in &report.suites {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} |",
            suite.name,
            suite.checks.len(),
            if suite.passed() { "pass" } else { "FAIL" },
            suite.elapsed_ms
        );
    }
    let _ = writeln!(out);

    for suite in &report.suites {
        let _ = writeln!(out, "### {}\n", suite.name);
        let _ = writeln!(out, "| check | result |");
        let _ = writeln!(out, "|-------|--------|");
        for check in &suite.checks {
            let _ = writeln!(
                out,
                "| {} | {} |",
                check.label.replace('|', "\\|"),
                if check.passed { "pass" } else { "FAIL" }
            );
        }
        let _ = writeln!(out);
        for check in &suite.checks {
            if let Some(detail) = &check.detail {
                let _ = writeln!(out, "**{}**\n", check.label.replace('|', "\\|"));
                let _ = writeln!(out, "```");
                let _ = writeln!(out, "{detail}");
                let _ = writeln!(out, "```\n");
                if let Some(repro) = &check.reproducer {
                    let _ = writeln!(out, "Reproducer:\n");
                    let _ = writeln!(out, "```json");
                    let _ = writeln!(
                        out,
                        "{}",
                        serde_json::to_string_pretty(repro).expect("reproducer serializes")
                    );
                    let _ = writeln!(out, "```\n");
                }
            }
        }
    }
    out
}
