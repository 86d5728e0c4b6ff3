//! The verdict vocabulary shared by the classifier and the oracle.

use serde::{Deserialize, Serialize};

use crate::ratio_engine::LimitEstimate;

/// Monotonicity pattern of a scalar function on an interval. `Inconclusive`
/// doubles as the oracle's "more than one sign change" outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pattern {
    Increasing,
    Decreasing,
    IncThenDec,
    DecThenInc,
    Constant,
    Inconclusive,
}

impl Pattern {
    pub fn is_unimodal(self) -> bool {
        matches!(self, Pattern::IncThenDec | Pattern::DecThenInc)
    }

    pub fn name(self) -> &'static str {
        match self {
            Pattern::Increasing => "Increasing",
            Pattern::Decreasing => "Decreasing",
            Pattern::IncThenDec => "IncThenDec",
            Pattern::DecThenInc => "DecThenInc",
            Pattern::Constant => "Constant",
            Pattern::Inconclusive => "Inconclusive",
        }
    }
}

/// A predicted monotonicity pattern with the rule that produced it and the
/// endpoint estimates it relied on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityVerdict {
    pub pattern: Pattern,
    /// Present exactly when the pattern is unimodal.
    pub turning_point: Option<f64>,
    /// Identifier from the rule catalog (e.g. "rule 2.2(ii)",
    /// "Lemma 3.1(iii)", "Theorem 3.3(iv)") or "numeric-only".
    pub provenance: String,
    pub endpoint_diagnostics: Vec<LimitEstimate>,
}

impl MonotonicityVerdict {
    pub fn monotone(pattern: Pattern, provenance: impl Into<String>) -> Self {
        debug_assert!(!pattern.is_unimodal());
        MonotonicityVerdict {
            pattern,
            turning_point: None,
            provenance: provenance.into(),
            endpoint_diagnostics: Vec::new(),
        }
    }

    pub fn unimodal(pattern: Pattern, turning_point: f64, provenance: impl Into<String>) -> Self {
        debug_assert!(pattern.is_unimodal());
        MonotonicityVerdict {
            pattern,
            turning_point: Some(turning_point),
            provenance: provenance.into(),
            endpoint_diagnostics: Vec::new(),
        }
    }

    pub fn inconclusive(provenance: impl Into<String>) -> Self {
        MonotonicityVerdict {
            pattern: Pattern::Inconclusive,
            turning_point: None,
            provenance: provenance.into(),
            endpoint_diagnostics: Vec::new(),
        }
    }

    pub fn with_diagnostics(mut self, diagnostics: Vec<LimitEstimate>) -> Self {
        self.endpoint_diagnostics = diagnostics;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_json_round_trips() {
        let v = MonotonicityVerdict::unimodal(Pattern::IncThenDec, 1.25, "rule 2.2(ii)");
        let s = serde_json::to_string(&v).unwrap();
        let back: MonotonicityVerdict = serde_json::from_str(&s).unwrap();
        let s2 = serde_json::to_string(&back).unwrap();
        assert_eq!(s, s2);
        assert_eq!(back, v);
    }
}
