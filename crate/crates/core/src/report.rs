//! Versioned machine-readable run reports.
//!
//! A report is one JSON document: schema version, scalar format, the
//! truncation order and mode window that scope every claim inside, and one
//! entry per task in input order. The wall-clock field is the only part
//! allowed to differ between repeated runs of the same input.

use serde::{Deserialize, Serialize};

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TaskReport {
    pub task: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified_to_order: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

impl TaskReport {
    pub fn new(task: &str, verdict: Verdict) -> Self {
        TaskReport {
            task: task.to_string(),
            verdict,
            witnesses: Vec::new(),
            certified_to_order: None,
            note: None,
            details: serde_json::Value::Null,
        }
    }

    /// A failure produced by an error rather than a witnessed verdict.
    pub fn failed(task: &str, reason: String) -> Self {
        TaskReport {
            witnesses: vec![reason],
            ..TaskReport::new(task, Verdict::Fail)
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub report_version: u32,
    pub scalars: String,
    pub truncation: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<i64>,
    pub tasks: Vec<TaskReport>,
    /// Wall-clock milliseconds; excluded from determinism comparisons.
    pub timing_ms: u64,
}

impl Report {
    /// No task failed; skipped tasks do not count against a run.
    pub fn all_passed(&self) -> bool {
        self.tasks.iter().all(|t| t.verdict != Verdict::Fail)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("reports always serialize");
        out.push('\n');
        out
    }

    /// The report with timing zeroed, for byte-level comparisons.
    pub fn comparable(&self) -> Report {
        Report {
            timing_ms: 0,
            ..self.clone()
        }
    }

    /// Human-readable one-line-per-task summary.
    pub fn summary(&self) -> String {
        let mut lines = Vec::with_capacity(self.tasks.len() + 1);
        for t in &self.tasks {
            let mut line = match t.verdict {
                Verdict::Pass => format!("PASS {}", t.task),
                Verdict::Fail => format!("FAIL {}", t.task),
                Verdict::Skipped => format!("SKIP {}", t.task),
            };
            if let Some(w) = t.witnesses.first() {
                line.push_str(": ");
                line.push_str(w);
            } else if let Some(n) = &t.note {
                line.push_str(": ");
                line.push_str(n);
            }
            lines.push(line);
        }
        let failed = self
            .tasks
            .iter()
            .filter(|t| t.verdict == Verdict::Fail)
            .count();
        lines.push(format!(
            "{} tasks, {} failed (order {}{})",
            self.tasks.len(),
            failed,
            self.truncation,
            match self.window {
                Some(k) => format!(", window {k}"),
                None => String::new(),
            }
        ));
        lines.join("\n")
    }
}
