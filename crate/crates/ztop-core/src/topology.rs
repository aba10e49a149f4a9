//! A uniform view of "one basic neighborhood of 0 with a membership oracle",
//! plus finite-window checks of the neighborhood-filter axioms, finite-window
//! refinement comparisons, and covering witnesses for precompactness.
//!
//! Everything here is window evidence: the axioms and inclusions are global
//! statements, and a finite scan can falsify or corroborate them but never
//! prove them. Reports say so explicitly. Unknown memberships propagate to
//! Inconclusive axiom results, never to Pass or Fail.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::dseq::DSequence;
use crate::torus::TorusError;
use crate::uniform::{uniform_member, SSpec, UniformError};
use crate::verdict::{Verdict, VerdictKind};
use crate::weak::{weak_member, CharacterSet, WeakError};
use crate::zelenyuk::{vn_member, MinsSpec, SearchCaps, ZelError, ZelenyukSpec};

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("window must satisfy lo <= 0 <= hi, got {0}")]
    WindowOrder(String),
    #[error("unparseable window literal: {0}")]
    ParseWindow(String),
    #[error("family of neighborhoods is empty")]
    EmptyFamily,
    #[error("axiom checks need all specs from one topology family")]
    MixedFamily,
    #[error("band radius must lie in (0, 1/2]")]
    BandRange,
    #[error("level must be at least 1")]
    LevelZero,
    #[error("no general witness procedure for this neighborhood family")]
    NoWitnessProcedure,
    #[error("cover needs {needed} translates, over the budget {budget}")]
    TranslateBudget { needed: String, budget: u64 },
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Weak(#[from] WeakError),
    #[error(transparent)]
    Uniform(#[from] UniformError),
    #[error(transparent)]
    Zel(#[from] ZelError),
    #[error(transparent)]
    Seq(#[from] crate::dseq::DSeqError),
}

/// A finite scan range that always contains the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Window, TopologyError> {
        if lo > 0 || hi < 0 {
            return Err(TopologyError::WindowOrder(format!("{lo}..{hi}")));
        }
        Ok(Window { lo, hi })
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Iterate 0, 1, -1, 2, -2, ... clipped to the window, so the first
    /// reported counterexample is the one of smallest magnitude.
    pub fn by_magnitude(&self) -> impl Iterator<Item = i64> + '_ {
        let max = self.hi.max(-self.lo);
        let lo = self.lo;
        let hi = self.hi;
        (0..=max).flat_map(move |a| {
            let mut out = Vec::with_capacity(2);
            if a <= hi {
                out.push(a);
            }
            if a > 0 && -a >= lo {
                out.push(-a);
            }
            out
        })
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

impl FromStr for Window {
    type Err = TopologyError;

    fn from_str(s: &str) -> Result<Self, TopologyError> {
        let (lo, hi) = s
            .split_once("..")
            .ok_or_else(|| TopologyError::ParseWindow(s.to_string()))?;
        let lo: i64 = lo
            .trim()
            .parse()
            .map_err(|_| TopologyError::ParseWindow(s.to_string()))?;
        let hi: i64 = hi
            .trim()
            .parse()
            .map_err(|_| TopologyError::ParseWindow(s.to_string()))?;
        Window::new(lo, hi)
    }
}

impl Serialize for Window {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A tagged basic neighborhood of 0 from one of the four families.
#[derive(Clone, Debug)]
pub enum NeighborhoodSpec {
    /// The subgroup b_level * Z of a divisibility chain.
    Badic { seq: DSequence, level: u32 },
    /// U_(F, band) = { k : ||k*x|| <= band for all x in F }.
    Weak {
        chars: CharacterSet,
        band: BigRational,
    },
    /// V_(S, level) with the closed band 1/(4*level).
    Uniform { s: SSpec, level: u32 },
    /// V_(n_i) for the finest topology converging the chain to 0.
    Zelenyuk {
        seq: DSequence,
        mins: Vec<u32>,
        caps: SearchCaps,
    },
}

impl NeighborhoodSpec {
    pub fn badic(seq: DSequence, level: u32) -> Result<NeighborhoodSpec, TopologyError> {
        if level == 0 {
            return Err(TopologyError::LevelZero);
        }
        Ok(NeighborhoodSpec::Badic { seq, level })
    }

    pub fn weak(chars: CharacterSet, band: BigRational) -> Result<NeighborhoodSpec, TopologyError> {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        if !band.is_positive() || band > half {
            return Err(TopologyError::BandRange);
        }
        Ok(NeighborhoodSpec::Weak { chars, band })
    }

    pub fn uniform(s: SSpec, level: u32) -> Result<NeighborhoodSpec, TopologyError> {
        if level == 0 {
            return Err(TopologyError::LevelZero);
        }
        s.validate()?;
        Ok(NeighborhoodSpec::Uniform { s, level })
    }

    pub fn zelenyuk(
        seq: DSequence,
        mins: Vec<u32>,
        caps: SearchCaps,
    ) -> Result<NeighborhoodSpec, TopologyError> {
        MinsSpec::Explicit(mins.clone()).validate()?;
        Ok(NeighborhoodSpec::Zelenyuk { seq, mins, caps })
    }

    fn family(&self) -> &'static str {
        match self {
            NeighborhoodSpec::Badic { .. } => "badic",
            NeighborhoodSpec::Weak { .. } => "weak",
            NeighborhoodSpec::Uniform { .. } => "uniform",
            NeighborhoodSpec::Zelenyuk { .. } => "zelenyuk",
        }
    }
}

impl fmt::Display for NeighborhoodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NeighborhoodSpec::Badic { seq, level } => write!(f, "badic({seq};{level})"),
            NeighborhoodSpec::Weak { chars, band } => write!(f, "weak({chars};{band})"),
            NeighborhoodSpec::Uniform { s, level } => write!(f, "uniform({s};{level})"),
            NeighborhoodSpec::Zelenyuk { seq, mins, .. } => {
                let mins: Vec<String> = mins.iter().map(|m| m.to_string()).collect();
                write!(f, "zelenyuk({seq};{})", mins.join(","))
            }
        }
    }
}

impl Serialize for NeighborhoodSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Membership of k in the basic neighborhood. 0 is In for every
/// constructible spec. Data limitations (an undefined chain tail) surface as
/// Unknown, not as errors.
pub fn member(k: i64, spec: &NeighborhoodSpec) -> Verdict {
    match spec {
        NeighborhoodSpec::Badic { seq, level } => {
            match seq.badic_member(&BigInt::from(k), *level) {
                Ok(v) => v,
                Err(e) => Verdict::unknown(e.to_string()),
            }
        }
        NeighborhoodSpec::Weak { chars, band } => weak_member(k, chars, band),
        NeighborhoodSpec::Uniform { s, level } => match uniform_member(k, s, *level) {
            Ok(v) => v,
            Err(e) => Verdict::unknown(e.to_string()),
        },
        NeighborhoodSpec::Zelenyuk { seq, mins, caps } => {
            let spec = ZelenyukSpec {
                seq: seq.clone(),
                mins: MinsSpec::Explicit(mins.clone()),
                caps: *caps,
            };
            match vn_member(k, &spec) {
                Ok(outcome) => outcome.verdict,
                Err(e) => Verdict::unknown(e.to_string()),
            }
        }
    }
}

/// Fixed-range bitset, indexed by integers lo..=hi.
#[derive(Clone, Debug)]
struct WindowSet {
    lo: i64,
    len: usize,
    words: Vec<u64>,
}

impl WindowSet {
    fn new(lo: i64, hi: i64) -> WindowSet {
        let len = (hi - lo) as usize + 1;
        WindowSet {
            lo,
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    fn set(&mut self, k: i64) {
        let idx = (k - self.lo) as usize;
        self.words[idx / 64] |= 1 << (idx % 64);
    }

    fn get(&self, k: i64) -> bool {
        if k < self.lo {
            return false;
        }
        let idx = (k - self.lo) as usize;
        if idx >= self.len {
            return false;
        }
        self.words[idx / 64] & (1 << (idx % 64)) != 0
    }

    fn any(&self) -> bool {
        self.words.iter().any(|w| *w != 0)
    }

    fn iter_members(&self) -> impl Iterator<Item = i64> + '_ {
        let lo = self.lo;
        self.words.iter().enumerate().flat_map(move |(wi, &w)| {
            let mut bits = w;
            let mut out = Vec::new();
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                out.push(lo + (wi * 64 + b) as i64);
                bits &= bits - 1;
            }
            out
        })
    }

    /// The sumset {x + y : x, y in self}, over the doubled range.
    fn sumset(&self) -> WindowSet {
        let hi = self.lo + self.len as i64 - 1;
        let mut out = WindowSet::new(2 * self.lo, 2 * hi);
        for x in self.iter_members() {
            let shift = (x - self.lo) as usize;
            or_shifted(&mut out.words, &self.words, shift, out.len);
        }
        out
    }
}

/// dst |= src << shift, in bits; dst must be long enough.
fn or_shifted(dst: &mut [u64], src: &[u64], shift: usize, dst_bits: usize) {
    let word_shift = shift / 64;
    let bit_shift = shift % 64;
    for (w, &v) in src.iter().enumerate() {
        if v == 0 {
            continue;
        }
        let target = w + word_shift;
        if target < dst.len() {
            dst[target] |= v << bit_shift;
        }
        if bit_shift > 0 && target + 1 < dst.len() {
            dst[target + 1] |= v >> (64 - bit_shift);
        }
    }
    // Mask stray bits beyond the logical range.
    let last_bits = dst_bits % 64;
    if last_bits != 0 {
        if let Some(last) = dst.last_mut() {
            *last &= (1u64 << last_bits) - 1;
        }
    }
}

/// Memberships of one spec over a range, split into definite-In and Unknown.
struct ScanSets {
    in_set: WindowSet,
    unknown_set: WindowSet,
}

fn scan(spec: &NeighborhoodSpec, lo: i64, hi: i64) -> ScanSets {
    let mut in_set = WindowSet::new(lo, hi);
    let mut unknown_set = WindowSet::new(lo, hi);
    for k in lo..=hi {
        match member(k, spec).kind {
            VerdictKind::In => in_set.set(k),
            VerdictKind::Unknown => unknown_set.set(k),
            VerdictKind::Out => {}
        }
    }
    ScanSets {
        in_set,
        unknown_set,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AxiomStatus {
    Pass,
    Fail,
    Inconclusive,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Counterexample {
    Point { k: i64 },
    PairSum { x: i64, y: i64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomResult {
    pub axiom: &'static str,
    pub status: AxiomStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub family: Vec<String>,
    pub window: Window,
    pub results: Vec<AxiomResult>,
    pub evidence: &'static str,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.results
            .iter()
            .all(|r| matches!(r.status, AxiomStatus::Pass | AxiomStatus::NotApplicable))
    }

    pub fn any_fail(&self) -> bool {
        self.results.iter().any(|r| r.status == AxiomStatus::Fail)
    }
}

/// Check the neighborhood-filter axioms on a window, among the supplied
/// family members only:
///
/// * G1: 0 belongs to every listed set.
/// * G2: each pairwise intersection contains some listed set, on the window.
/// * G3: closure under supersets is vacuous for a base; reported as not
///   applicable.
/// * G4: for each W some listed V has (V on w) + (V on w) inside W.
/// * G5: each set is symmetric on the window.
pub fn axioms_check_window(
    family: &[NeighborhoodSpec],
    window: Window,
) -> Result<AxiomReport, TopologyError> {
    if family.is_empty() {
        return Err(TopologyError::EmptyFamily);
    }
    if family
        .iter()
        .any(|spec| spec.family() != family[0].family())
    {
        return Err(TopologyError::MixedFamily);
    }

    let scans: Vec<ScanSets> = family
        .iter()
        .map(|spec| scan(spec, window.lo, window.hi))
        .collect();
    let mut results = Vec::new();

    // G1: identity in every member.
    {
        let mut status = AxiomStatus::Pass;
        let mut counterexample = None;
        let mut detail = None;
        for (i, spec) in family.iter().enumerate() {
            match member(0, spec).kind {
                VerdictKind::In => {}
                VerdictKind::Out => {
                    status = AxiomStatus::Fail;
                    counterexample = Some(Counterexample::Point { k: 0 });
                    detail = Some(format!("0 not in member {i} ({spec})"));
                    break;
                }
                VerdictKind::Unknown => {
                    status = AxiomStatus::Inconclusive;
                    detail = Some(format!("membership of 0 unknown in member {i}"));
                }
            }
        }
        results.push(AxiomResult {
            axiom: "G1",
            status,
            counterexample,
            witness: None,
            detail,
        });
    }

    // G2: pairwise intersections contain a listed member, on the window.
    {
        let mut status = AxiomStatus::Pass;
        let mut counterexample = None;
        let mut detail = None;
        'pairs: for i in 0..family.len() {
            for j in i..family.len() {
                let mut pair_inconclusive = false;
                let mut first_candidate_ce = None;
                let mut found = None;
                for (c, candidate) in scans.iter().enumerate() {
                    match candidate_inside_pair(candidate, &scans[i], &scans[j], &window) {
                        CandidateCheck::Holds => {
                            found = Some(c);
                            break;
                        }
                        CandidateCheck::Counterexample(k) => {
                            if first_candidate_ce.is_none() {
                                first_candidate_ce = Some((c, k));
                            }
                        }
                        CandidateCheck::Inconclusive => pair_inconclusive = true,
                    }
                }
                match found {
                    Some(_) => {}
                    None if pair_inconclusive => {
                        status = AxiomStatus::Inconclusive;
                        detail = Some(format!(
                            "no listed set certified inside intersection of members {i} and {j}"
                        ));
                    }
                    None => {
                        status = AxiomStatus::Fail;
                        if let Some((c, k)) = first_candidate_ce {
                            counterexample = Some(Counterexample::Point { k });
                            detail = Some(format!(
                                "every candidate escapes the intersection of members {i} and {j}; e.g. candidate {c} contains {k}"
                            ));
                        }
                        break 'pairs;
                    }
                }
            }
        }
        results.push(AxiomResult {
            axiom: "G2",
            status,
            counterexample,
            witness: None,
            detail,
        });
    }

    // G3 is vacuous for basic-set families.
    results.push(AxiomResult {
        axiom: "G3",
        status: AxiomStatus::NotApplicable,
        counterexample: None,
        witness: None,
        detail: Some("superset closure is vacuous for a base of neighborhoods".to_string()),
    });

    // G4: sum of some listed V stays inside each W, on the doubled window.
    {
        let mut status = AxiomStatus::Pass;
        let mut counterexample = None;
        let mut witness = None;
        let mut detail = None;
        let wide_scans: Vec<ScanSets> = family
            .iter()
            .map(|spec| scan(spec, 2 * window.lo, 2 * window.hi))
            .collect();
        let sumsets: Vec<Option<WindowSet>> = scans
            .iter()
            .map(|s| {
                if s.unknown_set.any() {
                    None
                } else {
                    Some(s.in_set.sumset())
                }
            })
            .collect();
        'targets: for (wi, wide) in wide_scans.iter().enumerate() {
            let mut target_inconclusive = false;
            let mut target_ce = None;
            let mut found = None;
            for (vi, sumset) in sumsets.iter().enumerate() {
                let Some(sumset) = sumset else {
                    target_inconclusive = true;
                    continue;
                };
                let mut candidate_ce = None;
                let mut candidate_unknown = false;
                for s in sumset.iter_members() {
                    if wide.in_set.get(s) {
                        continue;
                    }
                    if wide.unknown_set.get(s) {
                        candidate_unknown = true;
                    } else {
                        candidate_ce = Some(s);
                        break;
                    }
                }
                match (candidate_ce, candidate_unknown) {
                    (None, false) => {
                        found = Some(vi);
                        break;
                    }
                    (None, true) => target_inconclusive = true,
                    (Some(s), _) => {
                        if target_ce.is_none() {
                            // Recover a concrete pair x + y = s.
                            let pair = scans[vi]
                                .in_set
                                .iter_members()
                                .find(|&x| scans[vi].in_set.get(s - x))
                                .map(|x| (x, s - x));
                            target_ce = pair;
                        }
                    }
                }
            }
            match found {
                Some(vi) => {
                    if witness.is_none() {
                        witness = Some(format!(
                            "for member {wi}: V = member {vi} ({})",
                            family[vi]
                        ));
                    }
                }
                None if target_inconclusive => {
                    status = AxiomStatus::Inconclusive;
                    detail = Some(format!("no candidate certified for member {wi}"));
                }
                None => {
                    status = AxiomStatus::Fail;
                    if let Some((x, y)) = target_ce {
                        counterexample = Some(Counterexample::PairSum { x, y });
                        detail = Some(format!(
                            "every candidate V has V+V escaping member {wi}"
                        ));
                    }
                    break 'targets;
                }
            }
        }
        results.push(AxiomResult {
            axiom: "G4",
            status,
            counterexample,
            witness,
            detail,
        });
    }

    // G5: symmetry on the window.
    {
        let mut status = AxiomStatus::Pass;
        let mut counterexample = None;
        let mut detail = None;
        let reach = window.hi.min(-window.lo);
        'specs: for (i, sets) in scans.iter().enumerate() {
            for k in 0..=reach {
                let fwd = (sets.in_set.get(k), sets.unknown_set.get(k));
                let bwd = (sets.in_set.get(-k), sets.unknown_set.get(-k));
                if fwd.1 || bwd.1 {
                    if status == AxiomStatus::Pass {
                        status = AxiomStatus::Inconclusive;
                        detail = Some(format!("unknown membership at +/-{k} in member {i}"));
                    }
                    continue;
                }
                if fwd.0 != bwd.0 {
                    status = AxiomStatus::Fail;
                    counterexample = Some(Counterexample::Point { k });
                    detail = Some(format!("member {i} separates {k} from {}", -k));
                    break 'specs;
                }
            }
        }
        results.push(AxiomResult {
            axiom: "G5",
            status,
            counterexample,
            witness: None,
            detail,
        });
    }

    Ok(AxiomReport {
        family: family.iter().map(|s| s.to_string()).collect(),
        window,
        results,
        evidence: "window evidence, not proof",
    })
}

enum CandidateCheck {
    Holds,
    Counterexample(i64),
    Inconclusive,
}

/// Is the candidate (on the window) inside both targets, definitively?
fn candidate_inside_pair(
    candidate: &ScanSets,
    a: &ScanSets,
    b: &ScanSets,
    window: &Window,
) -> CandidateCheck {
    let mut inconclusive = false;
    for k in window.by_magnitude() {
        if candidate.unknown_set.get(k) {
            inconclusive = true;
            continue;
        }
        if !candidate.in_set.get(k) {
            continue;
        }
        for target in [a, b] {
            if target.unknown_set.get(k) {
                inconclusive = true;
            } else if !target.in_set.get(k) {
                return CandidateCheck::Counterexample(k);
            }
        }
    }
    if inconclusive {
        CandidateCheck::Inconclusive
    } else {
        CandidateCheck::Holds
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status")]
pub enum InclusionFinding {
    /// First listed source whose window trace fits inside the target.
    Inclusion { source_index: usize },
    /// Every candidate has a definite escape; one counterexample each.
    NoInclusion { counterexamples: Vec<(usize, i64)> },
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct TargetComparison {
    pub target_index: usize,
    pub target: String,
    #[serde(flatten)]
    pub finding: InclusionFinding,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub window: Window,
    pub forward: Vec<TargetComparison>,
    pub backward: Vec<TargetComparison>,
    pub evidence: &'static str,
}

impl CompareReport {
    pub fn fully_decided(&self) -> bool {
        self.forward
            .iter()
            .chain(self.backward.iter())
            .all(|t| !matches!(t.finding, InclusionFinding::Inconclusive))
    }
}

/// For each member of t2, the first member of t1 contained in it on the
/// window (or a counterexample per candidate); then the same with the roles
/// swapped. Finite evidence for refinement claims between topologies.
pub fn compare_window(
    t1: &[NeighborhoodSpec],
    t2: &[NeighborhoodSpec],
    window: Window,
) -> CompareReport {
    let scans1: Vec<ScanSets> = t1.iter().map(|s| scan(s, window.lo, window.hi)).collect();
    let scans2: Vec<ScanSets> = t2.iter().map(|s| scan(s, window.lo, window.hi)).collect();
    let forward = compare_direction(&scans1, &scans2, t2, &window);
    let backward = compare_direction(&scans2, &scans1, t1, &window);
    CompareReport {
        window,
        forward,
        backward,
        evidence: "window evidence, not proof",
    }
}

fn compare_direction(
    sources: &[ScanSets],
    targets: &[ScanSets],
    target_specs: &[NeighborhoodSpec],
    window: &Window,
) -> Vec<TargetComparison> {
    let mut out = Vec::with_capacity(targets.len());
    for (ti, target) in targets.iter().enumerate() {
        let mut counterexamples = Vec::new();
        let mut inconclusive = false;
        let mut inclusion = None;
        for (si, source) in sources.iter().enumerate() {
            match candidate_inside_pair(source, target, target, window) {
                CandidateCheck::Holds => {
                    inclusion = Some(si);
                    break;
                }
                CandidateCheck::Counterexample(k) => counterexamples.push((si, k)),
                CandidateCheck::Inconclusive => inconclusive = true,
            }
        }
        let finding = match inclusion {
            Some(source_index) => InclusionFinding::Inclusion { source_index },
            None if inconclusive => InclusionFinding::Inconclusive,
            None => InclusionFinding::NoInclusion { counterexamples },
        };
        out.push(TargetComparison {
            target_index: ti,
            target: target_specs[ti].to_string(),
            finding,
        });
    }
    out
}

/// Finitely many translates covering the window: evidence for G = F + V.
#[derive(Clone, Debug, Serialize)]
pub struct CoverWitness {
    pub translates: Vec<i64>,
    pub neighborhood: String,
    pub window: Window,
}

impl CoverWitness {
    /// Re-check the cover point by point: every k in the window must have
    /// some translate f with k - f in the neighborhood. Returns the first
    /// gap, if any.
    pub fn replay(&self, spec: &NeighborhoodSpec, window: Window) -> Option<i64> {
        (window.lo..=window.hi)
            .find(|&k| !self.translates.iter().any(|&f| member(k - f, spec).is_in()))
    }
}

/// Produce a covering witness where a finite procedure exists: the residues
/// modulo b_level for a chain subgroup, and the residues modulo the lcm of
/// the generator denominators for an all-rational weak neighborhood. The
/// uniform and finest-convergence families have no general procedure.
pub fn cover_witness(
    spec: &NeighborhoodSpec,
    window: Window,
    translate_budget: u64,
) -> Result<CoverWitness, TopologyError> {
    let modulus: BigInt = match spec {
        NeighborhoodSpec::Badic { seq, level } => seq.term(*level)?,
        NeighborhoodSpec::Weak { chars, .. } => chars
            .rational_period()
            .ok_or(TopologyError::NoWitnessProcedure)?,
        NeighborhoodSpec::Uniform { .. } | NeighborhoodSpec::Zelenyuk { .. } => {
            return Err(TopologyError::NoWitnessProcedure)
        }
    };
    let count = modulus
        .to_u64()
        .filter(|&c| c <= translate_budget)
        .ok_or_else(|| TopologyError::TranslateBudget {
            needed: modulus.to_string(),
            budget: translate_budget,
        })?;
    Ok(CoverWitness {
        translates: (0..count as i64).collect(),
        neighborhood: spec.to_string(),
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn p2() -> DSequence {
        DSequence::padic(2).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn badic_family(seq: &DSequence, depth: u32) -> Vec<NeighborhoodSpec> {
        (1..=depth)
            .map(|n| NeighborhoodSpec::badic(seq.clone(), n).unwrap())
            .collect()
    }

    #[test]
    fn member_examples() {
        let v = member(
            0,
            &NeighborhoodSpec::uniform(SSpec::InvSeq(p2()), 2).unwrap(),
        );
        assert!(v.is_in());
        let fact = DSequence::factorial();
        assert!(member(24, &NeighborhoodSpec::badic(fact, 3).unwrap()).is_in());
        let weak = NeighborhoodSpec::weak(CharacterSet::parse("1/5").unwrap(), rat(1, 10)).unwrap();
        assert!(member(2, &weak).is_out());
    }

    #[test]
    fn window_parse() {
        let w: Window = "-100..50".parse().unwrap();
        assert_eq!((w.lo, w.hi), (-100, 50));
        assert!("5..10".parse::<Window>().is_err());
        assert!("nonsense".parse::<Window>().is_err());
    }

    #[test]
    fn axioms_badic_family_pass() {
        let family = badic_family(&p2(), 5);
        let window: Window = "-1000..1000".parse().unwrap();
        let report = axioms_check_window(&family, window).unwrap();
        assert!(report.all_pass(), "report: {report:?}");
        // G4 witnessed by the member itself (subgroups satisfy V+V=V).
        let g4 = report.results.iter().find(|r| r.axiom == "G4").unwrap();
        assert!(g4.witness.as_deref().unwrap().contains("member 0"));
    }

    #[test]
    fn axioms_weak_family_pass() {
        let chars = CharacterSet::parse("1/5").unwrap();
        let family: Vec<NeighborhoodSpec> = (1..=4)
            .map(|n| NeighborhoodSpec::weak(chars.clone(), rat(1, 4 * n)).unwrap())
            .collect();
        let window: Window = "-500..500".parse().unwrap();
        let report = axioms_check_window(&family, window).unwrap();
        assert!(report.all_pass(), "report: {report:?}");
    }

    #[test]
    fn axioms_zelenyuk_g1() {
        let family: Vec<NeighborhoodSpec> = (1..=3)
            .map(|n| {
                NeighborhoodSpec::zelenyuk(p2(), vec![n], SearchCaps::default()).unwrap()
            })
            .collect();
        let window: Window = "-60..60".parse().unwrap();
        let report = axioms_check_window(&family, window).unwrap();
        let g1 = report.results.iter().find(|r| r.axiom == "G1").unwrap();
        assert_eq!(g1.status, AxiomStatus::Pass);
    }

    #[test]
    fn axioms_reject_mixed_or_empty() {
        assert!(matches!(
            axioms_check_window(&[], "-10..10".parse().unwrap()),
            Err(TopologyError::EmptyFamily)
        ));
        let mixed = vec![
            NeighborhoodSpec::badic(p2(), 1).unwrap(),
            NeighborhoodSpec::uniform(SSpec::Grid(4), 1).unwrap(),
        ];
        assert!(matches!(
            axioms_check_window(&mixed, "-10..10".parse().unwrap()),
            Err(TopologyError::MixedFamily)
        ));
    }

    #[test]
    fn compare_window_examples() {
        let window: Window = "-64..64".parse().unwrap();
        // Chain subgroups against the two-character uniform band.
        let t1 = badic_family(&p2(), 6);
        let t2 = vec![NeighborhoodSpec::uniform(
            SSpec::Explicit(vec![
                "1/2".parse().unwrap(),
                "1/4".parse().unwrap(),
            ]),
            1,
        )
        .unwrap()];
        let report = compare_window(&t1, &t2, window);
        match &report.forward[0].finding {
            InclusionFinding::Inclusion { source_index } => {
                // 4Z (level 3) is the first chain subgroup inside the band.
                assert_eq!(*source_index, 2);
            }
            other => panic!("expected inclusion, got {other:?}"),
        }

        // Identical families include mutually.
        let report = compare_window(&t1, &t1, window);
        assert!(report
            .forward
            .iter()
            .all(|t| matches!(t.finding, InclusionFinding::Inclusion { .. })));

        // 6Z vs 4Z: counterexample 6 (smallest magnitude, positive first).
        let six = vec![NeighborhoodSpec::badic("list:1,6".parse().unwrap(), 2).unwrap()];
        let four = vec![NeighborhoodSpec::badic(p2(), 3).unwrap()];
        let report = compare_window(&six, &four, "-24..24".parse().unwrap());
        match &report.forward[0].finding {
            InclusionFinding::NoInclusion { counterexamples } => {
                assert_eq!(counterexamples[0], (0, 6));
            }
            other => panic!("expected counterexamples, got {other:?}"),
        }
    }

    #[test]
    fn compare_transitive_on_chain() {
        // In a chain family, inclusion found is transitive by construction;
        // check on a sample chain.
        let window: Window = "-200..200".parse().unwrap();
        let a = vec![NeighborhoodSpec::badic(p2(), 4).unwrap()];
        let b = vec![NeighborhoodSpec::badic(p2(), 3).unwrap()];
        let c = vec![NeighborhoodSpec::badic(p2(), 2).unwrap()];
        let ab = compare_window(&a, &b, window);
        let bc = compare_window(&b, &c, window);
        let ac = compare_window(&a, &c, window);
        for r in [&ab, &bc, &ac] {
            assert!(matches!(
                r.forward[0].finding,
                InclusionFinding::Inclusion { .. }
            ));
        }
    }

    #[test]
    fn cover_witness_examples() {
        let window: Window = "-100..100".parse().unwrap();
        let spec = NeighborhoodSpec::badic(p2(), 3).unwrap();
        let witness = cover_witness(&spec, window, 1_000_000).unwrap();
        assert_eq!(witness.translates, vec![0, 1, 2, 3]);
        assert_eq!(witness.replay(&spec, window), None);

        let weak =
            NeighborhoodSpec::weak(CharacterSet::parse("1/5").unwrap(), rat(1, 10)).unwrap();
        let witness = cover_witness(&weak, "-50..50".parse().unwrap(), 1_000_000).unwrap();
        assert_eq!(witness.translates, vec![0, 1, 2, 3, 4]);
        assert_eq!(witness.replay(&weak, "-50..50".parse().unwrap()), None);

        let unif = NeighborhoodSpec::uniform(SSpec::Grid(8), 1).unwrap();
        assert!(matches!(
            cover_witness(&unif, window, 1_000_000),
            Err(TopologyError::NoWitnessProcedure)
        ));

        // Budget limits the translate count.
        let deep = NeighborhoodSpec::badic(p2(), 12).unwrap();
        assert!(matches!(
            cover_witness(&deep, window, 100),
            Err(TopologyError::TranslateBudget { .. })
        ));
    }

    #[test]
    fn sumset_matches_naive() {
        let mut set = WindowSet::new(-7, 9);
        for k in [-7i64, -3, 0, 2, 5, 9] {
            set.set(k);
        }
        let sums = set.sumset();
        let members: Vec<i64> = set.iter_members().collect();
        for a in -14i64..=18 {
            let expected = members
                .iter()
                .any(|x| members.iter().any(|y| x + y == a));
            assert_eq!(sums.get(a), expected, "sum {a}");
        }
    }

    #[test]
    fn member_symmetry_across_families() {
        let specs = vec![
            NeighborhoodSpec::badic(p2(), 3).unwrap(),
            NeighborhoodSpec::weak(CharacterSet::parse("1/5,2/7").unwrap(), rat(1, 8)).unwrap(),
            NeighborhoodSpec::uniform(SSpec::InvSeq(p2()), 2).unwrap(),
            NeighborhoodSpec::zelenyuk(p2(), vec![1, 2], SearchCaps::default()).unwrap(),
        ];
        for spec in &specs {
            for k in -40i64..=40 {
                let a = member(k, spec);
                let b = member(-k, spec);
                // An In/Out pair for (k, -k) would be a bug in any family.
                assert!(
                    !(a.is_in() && b.is_out()) && !(a.is_out() && b.is_in()),
                    "asymmetry at {k} for {spec}"
                );
            }
        }
    }
}
