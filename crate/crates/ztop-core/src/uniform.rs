//! The uniform-convergence pseudometric d_S and its neighborhood base.
//!
//! d_S(m, n) is the supremum over x in S of the chord 2*sin(pi*||(m-n)x||),
//! bounded by 2; the level-n basic neighborhood is
//! V_(S,n) = { k : ||k*x|| <= 1/(4n) for every x in S } with a closed band.
//!
//! Because the chord is a strictly increasing function of the torus norm,
//! suprema and comparisons are carried out exactly on the rational norms and
//! sine is only evaluated for numeric output. For the reciprocal-term family
//! S = { 1/b_j } of a divisibility chain, both the supremum and the band
//! test are decided exactly from a finite prefix: once b_j grows past the
//! relevant bound, ||k/b_j|| = |k|/b_j is strictly inside the band (strictly
//! below the running supremum), so the infinite tail cannot change the
//! answer. That prefix bound is kept in a dedicated helper with its own
//! tests because the exactness claims of this module rest on it.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::dseq::{DSeqError, DSequence};
use crate::interval::RatInterval;
use crate::torus::{band_member, chord_value, norm_rational, ChordValue, Norm, TorusError, TorusPoint};
use crate::verdict::{Verdict, VerdictKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UniformError {
    #[error("explicit point set must be nonempty")]
    EmptyExplicit,
    #[error("grid size must be at least 1")]
    GridZero,
    #[error("pseudometric scan requires m != n")]
    EqualArguments,
    #[error("unparseable point-set literal: {0}")]
    Parse(String),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Seq(#[from] DSeqError),
}

/// The subset S of the torus that the pseudometric converges uniformly on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SSpec {
    Explicit(Vec<TorusPoint>),
    /// The rational grid { i/N : 0 <= i < N }.
    Grid(u64),
    /// The reciprocal terms { 1/b_j mod 1 : j >= 1 } of a divisibility chain.
    InvSeq(DSequence),
}

impl SSpec {
    pub fn validate(&self) -> Result<(), UniformError> {
        match self {
            SSpec::Explicit(points) => {
                if points.is_empty() {
                    return Err(UniformError::EmptyExplicit);
                }
            }
            SSpec::Grid(n) => {
                if *n == 0 {
                    return Err(UniformError::GridZero);
                }
            }
            SSpec::InvSeq(_) => {}
        }
        Ok(())
    }
}

impl fmt::Display for SSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SSpec::Explicit(points) => {
                let parts: Vec<String> = points.iter().map(|p| p.to_string()).collect();
                write!(f, "set:{}", parts.join(","))
            }
            SSpec::Grid(n) => write!(f, "grid:{n}"),
            SSpec::InvSeq(seq) => write!(f, "inv:{seq}"),
        }
    }
}

impl FromStr for SSpec {
    type Err = UniformError;

    /// Literal forms: "set:1/8,1/5", "grid:64", "inv:padic:2".
    fn from_str(s: &str) -> Result<Self, UniformError> {
        let s = s.trim();
        if let Some(list) = s.strip_prefix("set:") {
            let points = list
                .split(',')
                .map(|t| t.trim().parse::<TorusPoint>())
                .collect::<Result<Vec<_>, _>>()?;
            let spec = SSpec::Explicit(points);
            spec.validate()?;
            return Ok(spec);
        }
        if let Some(n) = s.strip_prefix("grid:") {
            let n: u64 = n.parse().map_err(|_| UniformError::Parse(s.to_string()))?;
            let spec = SSpec::Grid(n);
            spec.validate()?;
            return Ok(spec);
        }
        if let Some(seq) = s.strip_prefix("inv:") {
            let seq: DSequence = seq.parse()?;
            return Ok(SSpec::InvSeq(seq));
        }
        Err(UniformError::Parse(s.to_string()))
    }
}

impl Serialize for SSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// The supremum of the chord over S, with the attaining point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricResult {
    /// The norm key of the supremum when every comparison was exact; the
    /// metric value is then exactly 2*sin(pi * norm).
    pub exact_norm: Option<BigRational>,
    /// Certified numeric enclosure of the metric value, inside [0, 2].
    pub enclosure: RatInterval,
    pub attaining: TorusPoint,
    /// How many reciprocal terms were examined (reciprocal-term sets only).
    pub prefix_len: Option<u32>,
}

impl MetricResult {
    /// Exact rational metric value, where one exists (norm 0, 1/6 or 1/2).
    pub fn exact_value(&self) -> Option<BigRational> {
        let norm = self.exact_norm.clone()?;
        ChordValue::from_norm(Norm::Exact(norm)).exact_rational()
    }

    fn from_exact_norm(norm: BigRational, attaining: TorusPoint, bits: u32) -> MetricResult {
        let enclosure = ChordValue::from_norm(Norm::Exact(norm.clone())).enclosure(bits);
        MetricResult {
            exact_norm: Some(norm),
            enclosure,
            attaining,
            prefix_len: None,
        }
    }
}

impl Serialize for MetricResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("MetricResult", 5)?;
        st.serialize_field("exact_norm", &self.exact_norm.as_ref().map(|n| n.to_string()))?;
        st.serialize_field("exact_value", &self.exact_value().map(|v| v.to_string()))?;
        st.serialize_field("value_lo", &self.enclosure.lo().to_string())?;
        st.serialize_field("value_hi", &self.enclosure.hi().to_string())?;
        st.serialize_field("attaining_point", &self.attaining.to_string())?;
        st.end()
    }
}

/// Largest torus norm over the orbit { delta * i/n : i }, with an attaining
/// index: the orbit is the subgroup generated by gcd(delta, n)/n, so the
/// extreme residue is computable in closed form.
fn grid_max_norm(delta: i64, n: u64) -> (BigRational, u64) {
    let n_big = n as i128;
    let residue = (delta as i128).rem_euclid(n_big);
    if residue == 0 {
        return (BigRational::zero(), 0);
    }
    let g = residue.gcd(&n_big);
    let m = n_big / g; // orbit size
    let target = m / 2; // index of the residue closest to n/2 from below
    // Solve (residue/g) * i == target (mod m).
    let step = residue / g;
    let ext = step.extended_gcd(&m);
    debug_assert_eq!(ext.gcd, 1);
    let inv = ext.x.rem_euclid(m);
    let i = (inv * target).rem_euclid(m);
    let norm = norm_rational(&BigRational::new(
        BigInt::from(g * target),
        BigInt::from(n_big),
    ));
    (norm, i as u64)
}

/// Term indices of the chain whose reciprocal point can either attain the
/// supremum of the chord at distance `delta` or violate the level-n band for
/// k: all j with b_j <= bound, plus the first one past it (which dominates
/// the entire remaining tail, since ||c/b_j|| = |c|/b_j is strictly
/// decreasing once b_j > 2|c|).
fn invseq_prefix(seq: &DSequence, bound: &BigInt) -> Result<Vec<u32>, DSeqError> {
    let mut indices = Vec::new();
    let mut j = 1u32;
    loop {
        match seq.term(j) {
            Ok(term) => {
                let past = &term > bound;
                indices.push(j);
                if past {
                    return Ok(indices);
                }
            }
            Err(DSeqError::UndefinedTerm { .. }) => return Ok(indices),
            Err(e) => return Err(e),
        }
        j += 1;
    }
}

/// Exposed form of the prefix bound used by the band test: indices that can
/// violate V_(S,n) for the integer k. Everything beyond satisfies
/// ||k/b_j|| < 1/(4n) strictly.
pub fn invseq_relevant_indices(
    seq: &DSequence,
    k: i64,
    level: u32,
    slack: u32,
) -> Result<Vec<u32>, DSeqError> {
    let bound = BigInt::from(4u64 * level as u64 * slack as u64) * BigInt::from(k.unsigned_abs());
    let mut indices = Vec::new();
    let mut j = 1u32;
    loop {
        match seq.term(j) {
            Ok(term) => {
                if term > bound {
                    return Ok(indices);
                }
                indices.push(j);
            }
            Err(DSeqError::UndefinedTerm { .. }) => return Ok(indices),
            Err(e) => return Err(e),
        }
        j += 1;
    }
}

/// d_S(m, n): supremum of the chord over S. Exact (with the attaining point)
/// for rational explicit sets, grids, and reciprocal-term sets; an enclosure
/// with exact endpoints otherwise.
pub fn pseudometric(
    m: i64,
    n: i64,
    s: &SSpec,
    bits: u32,
) -> Result<MetricResult, UniformError> {
    s.validate()?;
    let delta = m - n;
    match s {
        SSpec::Explicit(points) => {
            let values: Vec<ChordValue> =
                points.iter().map(|x| chord_value(x, m, n)).collect();
            let all_exact = values.iter().all(|v| v.norm().as_exact().is_some());
            if all_exact {
                let mut best = 0usize;
                for (i, v) in values.iter().enumerate() {
                    if v.norm().as_exact().unwrap() > values[best].norm().as_exact().unwrap() {
                        best = i;
                    }
                }
                let norm = values[best].norm().as_exact().unwrap().clone();
                return Ok(MetricResult::from_exact_norm(
                    norm,
                    points[best].clone(),
                    bits,
                ));
            }
            // Mixed exact/enclosure supremum: hull of the candidate
            // enclosures; the attaining point is the one with the largest
            // certified upper bound, ties toward the first listed.
            let enclosures: Vec<RatInterval> =
                values.iter().map(|v| v.enclosure(bits)).collect();
            let mut best = 0usize;
            let mut lo = enclosures[0].lo().clone();
            let mut hi = enclosures[0].hi().clone();
            for (i, e) in enclosures.iter().enumerate().skip(1) {
                if e.lo() > &lo {
                    lo = e.lo().clone();
                }
                if e.hi() > &hi {
                    hi = e.hi().clone();
                    best = i;
                }
            }
            Ok(MetricResult {
                exact_norm: None,
                enclosure: RatInterval::new(lo, hi),
                attaining: points[best].clone(),
                prefix_len: None,
            })
        }
        SSpec::Grid(grid) => {
            let (norm, index) = grid_max_norm(delta, *grid);
            let attaining = TorusPoint::rational(BigRational::new(
                BigInt::from(index),
                BigInt::from(*grid),
            ));
            Ok(MetricResult::from_exact_norm(norm, attaining, bits))
        }
        SSpec::InvSeq(seq) => {
            // Relevant prefix: all terms up to 2|delta| plus the first one
            // beyond, which strictly dominates the rest of the tail.
            let bound = BigInt::from(2) * BigInt::from(delta.unsigned_abs());
            let indices = invseq_prefix(seq, &bound)?;
            let mut best_norm = BigRational::zero();
            let mut best_j = 1u32;
            for &j in &indices {
                let term = seq.term(j)?;
                let norm = norm_rational(&BigRational::new(
                    BigInt::from(delta),
                    term,
                ));
                if norm > best_norm {
                    best_norm = norm;
                    best_j = j;
                }
            }
            let attaining = TorusPoint::rational(BigRational::new(
                BigInt::one(),
                seq.term(best_j)?,
            ));
            let mut result = MetricResult::from_exact_norm(best_norm, attaining, bits);
            result.prefix_len = Some(indices.len() as u32);
            Ok(result)
        }
    }
}

/// Membership of k in V_(S,n) with the closed band 1/(4n).
pub fn uniform_member(k: i64, s: &SSpec, level: u32) -> Result<Verdict, UniformError> {
    assert!(level >= 1);
    s.validate()?;
    let delta = BigRational::new(BigInt::one(), BigInt::from(4u64 * level as u64));
    match s {
        SSpec::Explicit(points) => {
            let mut unknown = None;
            let mut max_bits = None;
            for x in points {
                let v = band_member(&x.scalar_mul(k), &delta);
                max_bits = max_bits.max(v.precision_bits);
                match v.kind {
                    VerdictKind::Out => return Ok(v),
                    VerdictKind::Unknown => unknown = Some(v),
                    VerdictKind::In => {}
                }
            }
            Ok(match unknown {
                Some(v) => v,
                None => {
                    let mut v = Verdict::member_in();
                    v.precision_bits = max_bits;
                    v
                }
            })
        }
        SSpec::Grid(grid) => {
            let (norm, _) = grid_max_norm(k, *grid);
            Ok(if norm <= delta {
                Verdict::member_in()
            } else {
                Verdict::member_out()
            })
        }
        SSpec::InvSeq(seq) => {
            if k == 0 {
                return Ok(Verdict::member_in());
            }
            // Only terms b_j <= 4n|k| can violate the closed band; beyond it
            // 0 < |k|/b_j < 1/(4n) holds strictly. Decided exactly.
            for j in invseq_relevant_indices(seq, k, level, 1)? {
                let term = seq.term(j)?;
                let norm = norm_rational(&BigRational::new(BigInt::from(k), term));
                if norm > delta {
                    return Ok(Verdict::member_out());
                }
            }
            Ok(Verdict::member_in())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvarianceFinding {
    /// Both values carried exact norm keys and they coincide.
    ExactlyEqual,
    /// Enclosures overlap, as translation invariance demands.
    EnclosuresOverlap,
    /// Enclosures are disjoint: would falsify translation invariance.
    Mismatch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub original: MetricResult,
    pub translated: MetricResult,
    pub finding: InvarianceFinding,
}

/// Evaluate d_S(m, n) against d_S(m+k, n+k).
pub fn translation_invariance_check(
    m: i64,
    n: i64,
    k: i64,
    s: &SSpec,
    bits: u32,
) -> Result<InvarianceReport, UniformError> {
    let original = pseudometric(m, n, s, bits)?;
    let translated = pseudometric(m + k, n + k, s, bits)?;
    let finding = match (&original.exact_norm, &translated.exact_norm) {
        (Some(a), Some(b)) if a == b => InvarianceFinding::ExactlyEqual,
        _ if original.enclosure.overlaps(&translated.enclosure) => {
            InvarianceFinding::EnclosuresOverlap
        }
        _ => InvarianceFinding::Mismatch,
    };
    Ok(InvarianceReport {
        original,
        translated,
        finding,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    pub grid: u64,
    pub value: MetricResult,
    /// Norm key of the analytic floor 2*cos(pi/(2N)): the chord of the
    /// nearest grid point to the maximizing torus point.
    pub floor_norm: String,
    pub exceeds_floor: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanTable {
    pub m: i64,
    pub n: i64,
    pub rows: Vec<ScanRow>,
}

/// Quantitative approach to the full-torus chord 2 along a family of grids:
/// d_Grid(N)(m, n) lies above the analytic floor 2*cos(pi/(2N)) once the
/// grid outresolves |m - n|, and approaches 2.
pub fn dense_limit_scan(
    m: i64,
    n: i64,
    grids: &[u64],
    bits: u32,
) -> Result<ScanTable, UniformError> {
    if m == n {
        return Err(UniformError::EqualArguments);
    }
    let mut rows = Vec::with_capacity(grids.len());
    for &grid in grids {
        if grid == 0 {
            return Err(UniformError::GridZero);
        }
        let value = pseudometric(m, n, &SSpec::Grid(grid), bits)?;
        // 2*cos(pi/(2N)) = 2*sin(pi*(N-1)/(2N)): norm key (N-1)/(2N).
        let floor_norm = BigRational::new(
            BigInt::from(grid - 1),
            BigInt::from(2 * grid),
        );
        let exceeds = value
            .exact_norm
            .as_ref()
            .map(|norm| norm >= &floor_norm)
            .unwrap_or(false);
        rows.push(ScanRow {
            grid,
            value,
            floor_norm: floor_norm.to_string(),
            exceeds_floor: exceeds,
        });
    }
    Ok(ScanTable { m, n, rows })
}
