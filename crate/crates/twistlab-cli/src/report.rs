//! Report assembly. Everything under `payload` is a pure function of the
//! config and seed; wall-clock data lives in `metadata`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::RunConfig;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Declared as expected to fail, and it did with residual ≥ floor.
    Xfail,
    /// Declared as expected to fail, but passed or stayed below the floor.
    Xpass,
    Skip,
    /// Reported for context; never affects the exit code.
    Info,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Xfail => "xfail",
            Status::Xpass => "xpass",
            Status::Skip => "skip",
            Status::Info => "info",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    /// The identity or property the check instantiates.
    pub anchor: &'static str,
    pub status: Status,
    pub residual: Option<f64>,
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub name: String,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub xfail: usize,
    pub xpass: usize,
    pub skip: usize,
    pub info: usize,
}

impl Summary {
    pub fn of(cases: &[CaseReport]) -> Self {
        let mut s = Summary::default();
        for c in cases.iter().flat_map(|c| &c.checks) {
            match c.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Xfail => s.xfail += 1,
                Status::Xpass => s.xpass += 1,
                Status::Skip => s.skip += 1,
                Status::Info => s.info += 1,
            }
        }
        s
    }

    pub fn failures(&self) -> usize {
        self.fail + self.xpass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Payload {
    pub seed: u64,
    pub config: RunConfig,
    pub cases: Vec<CaseReport>,
    pub summary: Summary,
}

#[derive(Clone, Debug, Serialize)]
pub struct Metadata {
    pub version: &'static str,
    pub parallel: bool,
    /// Milliseconds per "case/check", plus "total".
    pub timing_ms: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub payload: Payload,
    pub metadata: Metadata,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn print_summary(&self) {
        for case in &self.payload.cases {
            println!("{}", case.name);
            for c in &case.checks {
                let res = c.residual.map_or("-".to_string(), |r| format!("{r:.3e}"));
                let thr = c.threshold.map_or("-".to_string(), |r| format!("{r:.1e}"));
                let note = c
                    .note
                    .as_deref()
                    .map(|n| format!("  ({n})"))
                    .unwrap_or_default();
                println!(
                    "  {:<6} {:<24} residual {:>10}  threshold {:>8}{note}",
                    c.status.as_str(),
                    c.name,
                    res,
                    thr
                );
            }
        }
        let s = &self.payload.summary;
        println!(
            "pass {} fail {} xfail {} xpass {} skip {} info {}",
            s.pass, s.fail, s.xfail, s.xpass, s.skip, s.info
        );
    }
}
