//! Divisibility chains b1 = 1 | b2 | b3 | ... with strictly increasing terms.
//!
//! These chains classify the non-discrete Hausdorff linear topologies on the
//! integers through the subgroup base {b_n * Z}, and they double as the
//! defining sequences of the finest-convergence neighborhoods in
//! [`crate::zelenyuk`]. Terms are produced lazily from a ratio rule and
//! memoized; explicit finite lists enter only through [`validate`] and have
//! an undefined tail, which downstream certificates surface as errors or
//! Unknown verdicts rather than guesses.
//!
//! Indexing is 1-based with b1 = 1, so the rule `padic:p` has b_n = p^(n-1)
//! and [`badic_level`](DSequence::badic_level) sits one above the classical
//! p-adic valuation.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::verdict::Verdict;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DSeqError {
    #[error("sequence literal is empty")]
    Empty,
    #[error("first term must be 1")]
    FirstTermNotOne,
    #[error("term {} is not a multiple of term {index}", index + 1)]
    NotMultiple { index: u32 },
    #[error("terms {index} and {} are equal", index + 1)]
    RepeatedTerm { index: u32 },
    #[error("term {index} is not positive")]
    NonPositive { index: u32 },
    #[error("ratio at position {index} must be at least 2")]
    RatioTooSmall { index: u32 },
    #[error("term {n} of '{name}' lies beyond the defined prefix")]
    UndefinedTerm { name: String, n: u32 },
    #[error("zero divides out at every level; no valuation")]
    ZeroLevel,
    #[error("unparseable sequence literal: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum RatioRule {
    /// b_n = p^(n-1); constant ratio p >= 2.
    PAdic(u64),
    /// b_n = n!; ratio at position n is n.
    Factorial,
    /// Explicit finite ratio list; the tail is undefined.
    Ratios(Vec<u64>),
}

/// A divisibility chain given by a ratio rule, with a memoized term cache
/// shared across clones.
#[derive(Clone, Debug)]
pub struct DSequence {
    name: String,
    rule: RatioRule,
    cache: Arc<Mutex<Vec<BigInt>>>,
}

impl PartialEq for DSequence {
    fn eq(&self, other: &Self) -> bool {
        self.rule == other.rule
    }
}

impl Eq for DSequence {}

impl DSequence {
    fn new(name: String, rule: RatioRule) -> DSequence {
        DSequence {
            name,
            rule,
            cache: Arc::new(Mutex::new(vec![BigInt::one()])),
        }
    }

    pub fn padic(p: u64) -> Result<DSequence, DSeqError> {
        if p < 2 {
            return Err(DSeqError::RatioTooSmall { index: 2 });
        }
        Ok(DSequence::new(format!("padic:{p}"), RatioRule::PAdic(p)))
    }

    pub fn factorial() -> DSequence {
        DSequence::new("factorial".to_string(), RatioRule::Factorial)
    }

    pub fn from_ratios(ratios: Vec<u64>) -> Result<DSequence, DSeqError> {
        if ratios.is_empty() {
            return Err(DSeqError::Empty);
        }
        for (i, r) in ratios.iter().enumerate() {
            if *r < 2 {
                return Err(DSeqError::RatioTooSmall {
                    index: i as u32 + 2,
                });
            }
        }
        let name = format!(
            "ratios:{}",
            ratios
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        Ok(DSequence::new(name, RatioRule::Ratios(ratios)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of defined terms, or None when the rule is total.
    pub fn defined_len(&self) -> Option<u32> {
        match &self.rule {
            RatioRule::PAdic(_) | RatioRule::Factorial => None,
            RatioRule::Ratios(v) => Some(v.len() as u32 + 1),
        }
    }

    /// Ratio r_n = b_n / b_(n-1) for n >= 2, when defined.
    pub fn ratio(&self, n: u32) -> Result<BigInt, DSeqError> {
        assert!(n >= 2, "ratios start at position 2");
        match &self.rule {
            RatioRule::PAdic(p) => Ok(BigInt::from(*p)),
            RatioRule::Factorial => Ok(BigInt::from(n)),
            RatioRule::Ratios(v) => v
                .get(n as usize - 2)
                .map(|r| BigInt::from(*r))
                .ok_or_else(|| DSeqError::UndefinedTerm {
                    name: self.name.clone(),
                    n,
                }),
        }
    }

    /// A lower bound on every ratio r_j with j >= n, certified by the rule
    /// itself (so it covers the infinite tail). None when the tail is
    /// undefined.
    pub fn min_ratio_from(&self, n: u32) -> Option<BigInt> {
        match &self.rule {
            RatioRule::PAdic(p) => Some(BigInt::from(*p)),
            RatioRule::Factorial => Some(BigInt::from(n.max(2))),
            RatioRule::Ratios(_) => None,
        }
    }

    /// The finite prime support, when the rule certifies one: every ratio
    /// (hence every term) factors over it.
    pub fn prime_support(&self) -> Option<Vec<u64>> {
        match &self.rule {
            RatioRule::PAdic(p) => Some(vec![*p]),
            _ => None,
        }
    }

    /// True when every ratio equals the same constant.
    pub fn has_constant_ratio(&self) -> bool {
        matches!(&self.rule, RatioRule::PAdic(_))
    }

    /// Whether the rule certifies that every ratio beyond any fixed position
    /// is coprime to q.
    pub fn tail_coprime_certified(&self, q: &BigInt) -> bool {
        match &self.rule {
            RatioRule::PAdic(p) => BigInt::from(*p).gcd(q).is_one(),
            // Factorial ratios sweep every integer, and finite rules have an
            // undefined tail: no certificate either way.
            _ => false,
        }
    }

    /// Term b_n, 1-based; b_1 = 1.
    pub fn term(&self, n: u32) -> Result<BigInt, DSeqError> {
        assert!(n >= 1, "terms are 1-based");
        let mut cache = self.cache.lock().unwrap();
        while cache.len() < n as usize {
            let next_index = cache.len() as u32 + 1;
            let r = self.ratio(next_index)?;
            let next = cache.last().unwrap() * r;
            cache.push(next);
        }
        Ok(cache[n as usize - 1].clone())
    }

    /// Term as i64 when it fits, for hot loops.
    pub fn term_i64(&self, n: u32) -> Result<Option<i64>, DSeqError> {
        Ok(self.term(n)?.to_i64())
    }

    /// Mixed-radix digits of |m|: the unique c_1, c_2, ... with
    /// 0 <= c_i < r_(i+1) and |m| = sum c_i * b_i.
    pub fn digits(&self, m: &BigInt) -> Result<DigitVector, DSeqError> {
        let negative = m.is_negative();
        let mut rem = m.abs();
        let mut digits = Vec::new();
        let mut position = 1u32;
        while !rem.is_zero() {
            let radix = self.ratio(position + 1)?;
            let digit = rem.mod_floor(&radix);
            rem = (rem - &digit) / radix;
            digits.push(digit);
            position += 1;
        }
        Ok(DigitVector { digits, negative })
    }

    /// In iff b_n divides m; always exact.
    pub fn badic_member(&self, m: &BigInt, level: u32) -> Result<Verdict, DSeqError> {
        let term = self.term(level)?;
        Ok(if m.mod_floor(&term).is_zero() {
            Verdict::member_in()
        } else {
            Verdict::member_out()
        })
    }

    /// Largest n <= cap with b_n | m. AtCap flags that the scan stopped at
    /// the cap with divisibility still holding (deeper levels untested).
    pub fn badic_level(&self, m: &BigInt, cap: u32) -> Result<LevelResult, DSeqError> {
        if m.is_zero() {
            return Err(DSeqError::ZeroLevel);
        }
        assert!(cap >= 1);
        let mut best = 1u32;
        for n in 1..=cap {
            let term = self.term(n)?;
            if m.mod_floor(&term).is_zero() {
                best = n;
            } else {
                return Ok(LevelResult::Level(best));
            }
        }
        Ok(LevelResult::AtCap)
    }
}

impl fmt::Display for DSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl FromStr for DSequence {
    type Err = DSeqError;

    /// Literal forms: "padic:p", "factorial", "ratios:2,3,4", "list:1,2,6,24".
    fn from_str(s: &str) -> Result<Self, DSeqError> {
        let s = s.trim();
        if let Some(p) = s.strip_prefix("padic:") {
            let p: u64 = p.parse().map_err(|_| DSeqError::Parse(s.to_string()))?;
            return DSequence::padic(p);
        }
        if s == "factorial" {
            return Ok(DSequence::factorial());
        }
        if let Some(list) = s.strip_prefix("ratios:") {
            let ratios = list
                .split(',')
                .map(|t| t.trim().parse::<u64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| DSeqError::Parse(s.to_string()))?;
            return DSequence::from_ratios(ratios);
        }
        if let Some(list) = s.strip_prefix("list:") {
            let terms = list
                .split(',')
                .map(|t| BigInt::from_str(t.trim()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| DSeqError::Parse(s.to_string()))?;
            return validate(&terms);
        }
        Err(DSeqError::Parse(s.to_string()))
    }
}

impl Serialize for DSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Accept an explicit term list iff b1 = 1, each term strictly divides the
/// next, and consecutive terms differ; ratios are derived from the quotients.
pub fn validate(candidate: &[BigInt]) -> Result<DSequence, DSeqError> {
    if candidate.is_empty() {
        return Err(DSeqError::Empty);
    }
    for (i, t) in candidate.iter().enumerate() {
        if !t.is_positive() {
            return Err(DSeqError::NonPositive {
                index: i as u32 + 1,
            });
        }
    }
    if !candidate[0].is_one() {
        return Err(DSeqError::FirstTermNotOne);
    }
    let mut ratios = Vec::with_capacity(candidate.len().saturating_sub(1));
    for (i, pair) in candidate.windows(2).enumerate() {
        let index = i as u32 + 1;
        if pair[0] == pair[1] {
            return Err(DSeqError::RepeatedTerm { index });
        }
        if !pair[1].mod_floor(&pair[0]).is_zero() {
            return Err(DSeqError::NotMultiple { index });
        }
        let q = &pair[1] / &pair[0];
        let q = q.to_u64().ok_or(DSeqError::Parse(format!(
            "ratio at position {} too large",
            index + 1
        )))?;
        ratios.push(q);
    }
    let name = format!(
        "list:{}",
        candidate
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    let mut seq = DSequence::from_ratios(ratios)?;
    seq.name = name;
    Ok(seq)
}

/// Derived ratios of a sequence prefix, mainly for report payloads.
pub fn derived_ratios(seq: &DSequence, upto: u32) -> Result<Vec<BigInt>, DSeqError> {
    (2..=upto).map(|n| seq.ratio(n)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelResult {
    Level(u32),
    AtCap,
}

/// Signed mixed-radix digit vector; digits index from position 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DigitVector {
    /// c_i with 0 <= c_i < r_(i+1); highest stored digit is nonzero.
    #[serde(serialize_with = "serialize_bigints")]
    pub digits: Vec<BigInt>,
    pub negative: bool,
}

fn serialize_bigints<S: Serializer>(v: &[BigInt], serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_seq(v.iter().map(|b| b.to_string()))
}

impl DigitVector {
    /// Reassemble the represented integer; inverse of [`DSequence::digits`].
    pub fn reconstruct(&self, seq: &DSequence) -> Result<BigInt, DSeqError> {
        let mut total = BigInt::zero();
        for (i, c) in self.digits.iter().enumerate() {
            total += c * seq.term(i as u32 + 1)?;
        }
        Ok(if self.negative { -total } else { total })
    }
}

/// Probe sequences whose convergence into the chain's subgroups gets
/// certified on a finite prefix.
#[derive(Clone, Debug)]
pub enum ProbeSequence {
    /// x_k = b_k: the chain converges to 0 in its own topology.
    Terms(DSequence),
    Constant(BigInt),
    /// x_k = k * b_k.
    IndexTimesTerm(DSequence),
}

impl ProbeSequence {
    pub fn eval(&self, k: u32) -> Result<BigInt, DSeqError> {
        match self {
            ProbeSequence::Terms(seq) => seq.term(k),
            ProbeSequence::Constant(c) => Ok(c.clone()),
            ProbeSequence::IndexTimesTerm(seq) => Ok(seq.term(k)? * BigInt::from(k)),
        }
    }

    /// Literal forms: "self", "const:<int>", "mulidx" (k * b_k), relative to
    /// the sequence under test.
    pub fn parse(s: &str, base: &DSequence) -> Result<ProbeSequence, DSeqError> {
        let s = s.trim();
        if s == "self" {
            return Ok(ProbeSequence::Terms(base.clone()));
        }
        if s == "mulidx" {
            return Ok(ProbeSequence::IndexTimesTerm(base.clone()));
        }
        if let Some(c) = s.strip_prefix("const:") {
            let c = BigInt::from_str(c.trim()).map_err(|_| DSeqError::Parse(s.to_string()))?;
            return Ok(ProbeSequence::Constant(c));
        }
        Err(DSeqError::Parse(s.to_string()))
    }

    pub fn describe(&self) -> String {
        match self {
            ProbeSequence::Terms(seq) => format!("terms of {seq}"),
            ProbeSequence::Constant(c) => format!("const:{c}"),
            ProbeSequence::IndexTimesTerm(seq) => format!("k*b_k of {seq}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome")]
pub enum CertificateOutcome {
    /// Least K with b_n | x_k for all K <= k <= horizon.
    Settles { k_n: u32 },
    /// Divisibility fails at the horizon itself; witness_k is the largest
    /// failing index.
    Failure { witness_k: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateRow {
    pub level: u32,
    pub term: String,
    #[serde(flatten)]
    pub outcome: CertificateOutcome,
}

/// Finite-prefix convergence evidence: per level n <= depth, the least entry
/// index K_n such that every probe value from K_n to the horizon lies in
/// b_n * Z. Explicitly evidence, not a proof.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvergenceCertificate {
    pub sequence: String,
    pub probe: String,
    pub depth: u32,
    pub horizon: u32,
    pub rows: Vec<CertificateRow>,
    pub evidence: &'static str,
}

impl ConvergenceCertificate {
    pub fn all_settle(&self) -> bool {
        self.rows
            .iter()
            .all(|r| matches!(r.outcome, CertificateOutcome::Settles { .. }))
    }
}

pub fn convergence_certificate(
    probe: &ProbeSequence,
    seq: &DSequence,
    depth: u32,
    horizon: u32,
) -> Result<ConvergenceCertificate, DSeqError> {
    assert!(depth >= 1 && horizon >= 1);
    let values: Vec<BigInt> = (1..=horizon)
        .map(|k| probe.eval(k))
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::with_capacity(depth as usize);
    for n in 1..=depth {
        let term = seq.term(n)?;
        let mut last_failure = None;
        for k in (1..=horizon).rev() {
            if !values[k as usize - 1].mod_floor(&term).is_zero() {
                last_failure = Some(k);
                break;
            }
        }
        let outcome = match last_failure {
            Some(k) if k == horizon => CertificateOutcome::Failure { witness_k: k },
            Some(k) => CertificateOutcome::Settles { k_n: k + 1 },
            None => CertificateOutcome::Settles { k_n: 1 },
        };
        rows.push(CertificateRow {
            level: n,
            term: term.to_string(),
            outcome,
        });
    }
    Ok(ConvergenceCertificate {
        sequence: seq.name().to_string(),
        probe: probe.describe(),
        depth,
        horizon,
        rows,
        evidence: "finite-prefix evidence, not a proof",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn validate_examples() {
        let seq = validate(&[big(1), big(2), big(6), big(24)]).unwrap();
        assert_eq!(
            derived_ratios(&seq, 4).unwrap(),
            vec![big(2), big(3), big(4)]
        );
        assert_eq!(
            validate(&[big(1), big(2), big(3)]),
            Err(DSeqError::NotMultiple { index: 2 })
        );
        assert_eq!(
            validate(&[big(2), big(4), big(8)]),
            Err(DSeqError::FirstTermNotOne)
        );
        assert_eq!(
            validate(&[big(1), big(1), big(2)]),
            Err(DSeqError::RepeatedTerm { index: 1 })
        );
    }

    #[test]
    fn terms_padic_and_factorial() {
        let p2 = DSequence::padic(2).unwrap();
        assert_eq!(p2.term(1).unwrap(), big(1));
        assert_eq!(p2.term(5).unwrap(), big(16));
        let fact = DSequence::factorial();
        assert_eq!(fact.term(3).unwrap(), big(6));
        assert_eq!(fact.term(6).unwrap(), big(720));
    }

    #[test]
    fn digits_examples() {
        let fact = DSequence::factorial();
        let d = fact.digits(&big(10)).unwrap();
        assert_eq!(d.digits, vec![big(0), big(2), big(1)]);
        assert_eq!(d.reconstruct(&fact).unwrap(), big(10));
        assert!(fact.digits(&big(0)).unwrap().digits.is_empty());
        let p2 = DSequence::padic(2).unwrap();
        let d = p2.digits(&big(5)).unwrap();
        assert_eq!(d.digits, vec![big(1), big(0), big(1)]);
    }

    #[test]
    fn digits_undefined_tail_errors() {
        let seq: DSequence = "list:1,2,6".parse().unwrap();
        // 9 needs the radix above position 3, which is undefined.
        assert!(matches!(
            seq.digits(&big(9)),
            Err(DSeqError::UndefinedTerm { .. })
        ));
    }

    #[test]
    fn badic_member_examples() {
        let fact = DSequence::factorial();
        assert!(fact.badic_member(&big(24), 3).unwrap().is_in());
        assert!(fact.badic_member(&big(10), 3).unwrap().is_out());
        assert!(fact.badic_member(&big(0), 5).unwrap().is_in());
    }

    #[test]
    fn badic_level_examples() {
        let p2 = DSequence::padic(2).unwrap();
        assert_eq!(
            p2.badic_level(&big(40), 10).unwrap(),
            LevelResult::Level(4)
        );
        assert_eq!(p2.badic_level(&big(7), 10).unwrap(), LevelResult::Level(1));
        let fact = DSequence::factorial();
        assert_eq!(fact.badic_level(&big(720), 6).unwrap(), LevelResult::AtCap);
        assert_eq!(p2.badic_level(&big(0), 3), Err(DSeqError::ZeroLevel));
    }

    #[test]
    fn convergence_certificate_examples() {
        let p2 = DSequence::padic(2).unwrap();
        let cert =
            convergence_certificate(&ProbeSequence::Terms(p2.clone()), &p2, 10, 30).unwrap();
        for row in &cert.rows {
            assert_eq!(
                row.outcome,
                CertificateOutcome::Settles { k_n: row.level },
                "level {}",
                row.level
            );
        }
        let cert =
            convergence_certificate(&ProbeSequence::Constant(big(1)), &p2, 2, 10).unwrap();
        assert_eq!(
            cert.rows[1].outcome,
            CertificateOutcome::Failure { witness_k: 10 }
        );
        let fact = DSequence::factorial();
        let cert =
            convergence_certificate(&ProbeSequence::IndexTimesTerm(fact.clone()), &fact, 5, 20)
                .unwrap();
        for row in &cert.rows {
            match row.outcome {
                CertificateOutcome::Settles { k_n } => assert!(k_n <= row.level),
                CertificateOutcome::Failure { .. } => panic!("multiples must settle"),
            }
        }
    }

    #[test]
    fn parse_roundtrip() {
        for lit in ["padic:2", "factorial", "ratios:2,3,4,5", "list:1,2,6,24"] {
            let seq: DSequence = lit.parse().unwrap();
            assert_eq!(seq.to_string(), lit);
        }
        assert!("padic:1".parse::<DSequence>().is_err());
        assert!("garbage".parse::<DSequence>().is_err());
    }

    proptest! {
        #[test]
        fn digits_reconstruct_roundtrip(m in -100_000i64..100_000) {
            for seq in [DSequence::padic(2).unwrap(), DSequence::padic(5).unwrap(), DSequence::factorial()] {
                let d = seq.digits(&big(m)).unwrap();
                prop_assert_eq!(d.reconstruct(&seq).unwrap(), big(m));
                // Digit bounds: 0 <= c_i < r_(i+1).
                for (i, c) in d.digits.iter().enumerate() {
                    let radix = seq.ratio(i as u32 + 2).unwrap();
                    prop_assert!(!c.is_negative() && c < &radix);
                }
                if let Some(last) = d.digits.last() {
                    prop_assert!(!last.is_zero());
                }
            }
        }

        #[test]
        fn badic_chain_is_decreasing(m in -100_000i64..100_000, n in 1u32..8) {
            let fact = DSequence::factorial();
            // In at level n implies In at every shallower level.
            if fact.badic_member(&big(m), n).unwrap().is_in() {
                for shallower in 1..n {
                    prop_assert!(fact.badic_member(&big(m), shallower).unwrap().is_in());
                }
            }
        }

        #[test]
        fn basic_sets_are_subgroups(a in -50_000i64..50_000, b in -50_000i64..50_000, n in 1u32..7) {
            let seq = DSequence::padic(3).unwrap();
            let am = seq.badic_member(&big(a), n).unwrap().is_in();
            let bm = seq.badic_member(&big(b), n).unwrap().is_in();
            if am && bm {
                prop_assert!(seq.badic_member(&big(a - b), n).unwrap().is_in());
            }
        }

        #[test]
        fn level_matches_valuation(m in 1i64..1_000_000, p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let seq = DSequence::padic(p).unwrap();
            // Independent valuation by repeated division.
            let mut v = 0u32;
            let mut x = m;
            while x % p as i64 == 0 {
                v += 1;
                x /= p as i64;
            }
            let cap = 40;
            match seq.badic_level(&big(m), cap).unwrap() {
                LevelResult::Level(level) => prop_assert_eq!(level, v + 1),
                LevelResult::AtCap => prop_assert!(v + 1 >= cap),
            }
        }
    }
}
