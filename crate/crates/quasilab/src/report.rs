//! Answer/witness plumbing shared by the decision procedures and the CLI.

use serde::Serialize;

/// Three-valued verdict with typed witnesses. `Unknown` always names the
/// tripped budget or missing information; it is never a silent failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<Y, N = ()> {
    Yes(Y),
    No(N),
    Unknown(String),
}

impl<Y, N> Verdict<Y, N> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No(_))
    }

    pub fn yes(&self) -> Option<&Y> {
        match self {
            Verdict::Yes(y) => Some(y),
            _ => None,
        }
    }

    pub fn no(&self) -> Option<&N> {
        match self {
            Verdict::No(n) => Some(n),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Unknown,
    Error,
}

/// The serializable result of one CLI question. Every yes/no carries a
/// witness or certificate sufficient for independent re-verification.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub question: String,
    pub inputs: serde_json::Value,
    pub answer: Answer,
    pub witness: serde_json::Value,
    /// Design-decision ids this answer relies on (e.g. the finite
    /// free-rank bound), so a reader knows which bridges were crossed.
    pub assumptions: Vec<String>,
    pub timing_ms: u128,
}

impl Report {
    pub fn new(question: &str) -> Report {
        Report {
            schema: "quasilab/1",
            question: question.to_string(),
            inputs: serde_json::Value::Null,
            answer: Answer::Unknown,
            witness: serde_json::Value::Null,
            assumptions: Vec::new(),
            timing_ms: 0,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.answer {
            Answer::Yes | Answer::No => 0,
            Answer::Unknown => 2,
            Answer::Error => 1,
        }
    }
}
