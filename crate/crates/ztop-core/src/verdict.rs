//! Three-valued membership verdicts shared by every neighborhood family.
//!
//! `In` and `Out` are certified and final: no precision refinement or cap
//! increase may flip them. `Unknown` always carries the reason the decision
//! procedure stopped (precision ceiling, search cap, undefined sequence tail).

use serde::Serialize;

use crate::zelenyuk::SignedCombination;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerdictKind {
    In,
    Out,
    Unknown,
}

/// Witness payloads attached to definite verdicts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum Witness {
    /// A level index into a neighborhood base (e.g. the chain term that
    /// divides the queried integer, or the continuity level of a character).
    Level(u32),
    /// A torus point, in its string literal form.
    Point(String),
    /// A signed combination of sequence terms summing to the queried integer.
    Combination(SignedCombination),
    /// A single integer (residue, counterexample, etc.).
    Integer(i64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Present exactly when `kind == Unknown`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Set when interval arithmetic participated in the decision; `None`
    /// means the verdict came from exact rational/integer arithmetic.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<u32>,
}

impl Verdict {
    pub fn is_in(&self) -> bool {
        self.kind == VerdictKind::In
    }

    pub fn is_out(&self) -> bool {
        self.kind == VerdictKind::Out
    }

    pub fn is_unknown(&self) -> bool {
        self.kind == VerdictKind::Unknown
    }

    /// Exact verdicts never consulted an interval enclosure.
    pub fn is_exact(&self) -> bool {
        self.precision_bits.is_none() && !self.is_unknown()
    }

    pub fn member_in() -> Verdict {
        Verdict {
            kind: VerdictKind::In,
            reason: None,
            witness: None,
            precision_bits: None,
        }
    }

    pub fn member_out() -> Verdict {
        Verdict {
            kind: VerdictKind::Out,
            reason: None,
            witness: None,
            precision_bits: None,
        }
    }

    pub fn unknown(reason: impl Into<String>) -> Verdict {
        Verdict {
            kind: VerdictKind::Unknown,
            reason: Some(reason.into()),
            witness: None,
            precision_bits: None,
        }
    }

    pub fn with_witness(mut self, witness: Witness) -> Verdict {
        self.witness = Some(witness);
        self
    }

    pub fn with_precision(mut self, bits: u32) -> Verdict {
        self.precision_bits = Some(bits);
        self
    }
}

/// How a reported result is certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvidenceLabel {
    /// Every underlying value and verdict came from exact arithmetic.
    Exact,
    /// The statement was only checked on a finite window of integers.
    WindowEvidence,
    /// The result is a certified interval around a non-rational value.
    Enclosure,
    /// Some underlying verdict was Unknown.
    Unknown,
}
