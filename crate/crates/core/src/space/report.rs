//! Verdicts and reports shared by all checkers.

use serde::{Serialize, Serializer};

use super::PointId;

/// Concrete evidence for a verdict: the points involved, a human-readable
/// description and the numbers that were compared.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub points: Vec<PointId>,
    pub detail: String,
    #[serde(serialize_with = "serialize_floats", skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
}

impl Witness {
    pub fn new(points: impl IntoIterator<Item = usize>, detail: impl Into<String>) -> Self {
        Self {
            points: points.into_iter().map(PointId).collect(),
            detail: detail.into(),
            values: Vec::new(),
        }
    }

    pub fn with_values(mut self, values: impl IntoIterator<Item = f64>) -> Self {
        self.values = values.into_iter().collect();
        self
    }
}

/// Writes floats as JSON numbers, with `"inf"`/`"-inf"`/`"nan"` strings for
/// non-finite values.
pub fn serialize_floats<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        if x.is_finite() {
            seq.serialize_element(x)?;
        } else if x.is_nan() {
            seq.serialize_element("nan")?;
        } else if *x > 0.0 {
            seq.serialize_element("inf")?;
        } else {
            seq.serialize_element("-inf")?;
        }
    }
    seq.end()
}

/// Outcome of checking one axiom.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail { witness: Witness },
    NotCheckable { reason: String },
    /// Holds up to a documented surrogate limitation; carries the evidence.
    Flagged { witness: Witness },
}

impl Verdict {
    pub fn fail(witness: Witness) -> Self {
        Verdict::Fail { witness }
    }

    pub fn flagged(witness: Witness) -> Self {
        Verdict::Flagged { witness }
    }

    pub fn not_checkable(reason: impl Into<String>) -> Self {
        Verdict::NotCheckable {
            reason: reason.into(),
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Fail { witness } | Verdict::Flagged { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail { .. } => "fail",
            Verdict::NotCheckable { .. } => "not-checkable",
            Verdict::Flagged { .. } => "flagged",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomItem {
    pub axiom: String,
    #[serde(flatten)]
    pub verdict: Verdict,
}

/// Verdicts for a group of axioms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub check: String,
    pub items: Vec<AxiomItem>,
}

impl AxiomReport {
    pub fn new(check: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            items: Vec::new(),
        }
    }

    pub fn push(&mut self, axiom: impl Into<String>, verdict: Verdict) {
        self.items.push(AxiomItem {
            axiom: axiom.into(),
            verdict,
        });
    }

    /// No axiom failed (not-checkable and flagged verdicts do not fail).
    pub fn passed(&self) -> bool {
        !self.items.iter().any(|i| i.verdict.is_fail())
    }

    pub fn get(&self, axiom: &str) -> Option<&Verdict> {
        self.items.iter().find(|i| i.axiom == axiom).map(|i| &i.verdict)
    }

    /// The first failing item.
    pub fn first_failure(&self) -> Option<&AxiomItem> {
        self.items.iter().find(|i| i.verdict.is_fail())
    }

    pub fn merge(&mut self, other: AxiomReport) {
        self.items.extend(other.items);
    }

    /// One line per axiom, for terminal summaries.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for i in &self.items {
            out.push_str(&format!("{}: {}: {}", self.check, i.axiom, i.verdict.label()));
            if let Some(w) = i.verdict.witness() {
                out.push_str(&format!(" ({})", w.detail));
            }
            if let Verdict::NotCheckable { reason } = &i.verdict {
                out.push_str(&format!(" ({reason})"));
            }
            out.push('\n');
        }
        out
    }
}
