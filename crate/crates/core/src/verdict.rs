use serde::{Deserialize, Serialize};

/// Final decision of a verifier: an output, or a rejection with its cause.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict<T> {
    Accept(T),
    Reject { reason: String },
}

impl<T> Verdict<T> {
    pub fn reject(reason: impl Into<String>) -> Self {
        Verdict::Reject { reason: reason.into() }
    }

    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept(_))
    }

    pub fn output(&self) -> Option<&T> {
        match self {
            Verdict::Accept(t) => Some(t),
            Verdict::Reject { .. } => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Verdict<U> {
        match self {
            Verdict::Accept(t) => Verdict::Accept(f(t)),
            Verdict::Reject { reason } => Verdict::Reject { reason },
        }
    }
}

/// Oracle usage of one protocol run, verifier side.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub membership_queries: u64,
    pub random_examples: u64,
}
