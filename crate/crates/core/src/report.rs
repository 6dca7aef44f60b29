//! Machine-readable verification reports.
//!
//! A report is a JSON document: a header naming the command, the RNG seed,
//! and the bounds in force, followed by one entry per check instance. The
//! same spec, seed, and bounds always produce byte-identical output.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Unknown,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportEntry {
    pub check: String,
    pub instance: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub bounds: String,
    pub status: Status,
    pub checks: Vec<ReportEntry>,
}

impl Report {
    pub fn new(command: impl Into<String>, seed: u64, bounds: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            seed,
            bounds: bounds.into(),
            status: Status::Pass,
            checks: Vec::new(),
        }
    }

    pub fn push(
        &mut self,
        check: impl Into<String>,
        instance: impl Into<String>,
        status: Status,
        witness: Option<String>,
    ) {
        self.checks.push(ReportEntry {
            check: check.into(),
            instance: instance.into(),
            status,
            witness,
        });
        self.status = match (self.status, status) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Unknown, _) | (_, Status::Unknown) => Status::Unknown,
            _ => Status::Pass,
        };
    }

    pub fn pass(&mut self, check: impl Into<String>, instance: impl Into<String>) {
        self.push(check, instance, Status::Pass, None);
    }

    pub fn fail(&mut self, check: impl Into<String>, instance: impl Into<String>, witness: String) {
        self.push(check, instance, Status::Fail, Some(witness));
    }

    pub fn unknown(
        &mut self,
        check: impl Into<String>,
        instance: impl Into<String>,
        witness: String,
    ) {
        self.push(check, instance, Status::Unknown, Some(witness));
    }

    pub fn merge(&mut self, other: Report) {
        for e in other.checks {
            self.push(e.check, e.instance, e.status, e.witness);
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        s.push('\n');
        s
    }

    /// Human-readable rendering: one line per entry plus a verdict line.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for e in &self.checks {
            out.push_str(&format!("{:<7} {}  [{}]", e.status.to_string(), e.check, e.instance));
            if let Some(w) = &e.witness {
                out.push_str(&format!("  witness: {w}"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "{}: {} checks, {} failed, {} unknown\n",
            self.status,
            self.checks.len(),
            self.checks.iter().filter(|e| e.status == Status::Fail).count(),
            self.checks.iter().filter(|e| e.status == Status::Unknown).count(),
        ));
        out
    }

    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|e| e.status == Status::Fail) {
            1
        } else {
            0
        }
    }
}
