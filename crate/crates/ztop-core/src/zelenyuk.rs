//! Finest-convergence neighborhoods for a divisibility chain.
//!
//! For a sequence a and slot minima (n_1, ..., n_k), the bracket set
//! [n_1, ..., n_k] collects all sums g_1 + ... + g_k where each g_i is 0 or
//! +/- a_j for some j >= n_i; the neighborhood V_(n_i) is the union of the
//! brackets over all prefix lengths. Membership is answered three-valued:
//!
//! * `In` always comes with a replayable [`SignedCombination`] whose indices
//!   respect both the slot minima and the configured index cap.
//! * `Out` is certified by one of three sound closure arguments:
//!   divisibility by the smallest admissible term, a tail bound on ratios
//!   beyond the index cap after exhaustive bounded search, or an exhaustive
//!   residue walk over mixed-radix carry states (which decides membership
//!   for total ratio rules without any index bound).
//! * `Unknown` records the cap or budget that stopped the decision; it is
//!   never a guess.
//!
//! The search processes term indices in ascending order; a partial
//! assignment must match the target modulo a_j before any slot may use an
//! index >= j, which is what makes both the pruning and the exhaustive
//! residue walk sound. Slot minima are canonicalized ascending (the bracket
//! is invariant under permuting them), and a query for g < 0 is answered by
//! negating a witness for |g|, so In/Out symmetry holds by construction.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::dseq::{DSeqError, DSequence};
use crate::verdict::{Verdict, Witness};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ZelError {
    #[error("slot minima list is empty")]
    EmptyMins,
    #[error("slot minima must be at least 1")]
    MinZero,
    #[error("enumeration space exceeds the configured budget")]
    SpaceExceeded,
    #[error("unparseable slot-minima literal: {0}")]
    Parse(String),
    #[error(transparent)]
    Seq(#[from] DSeqError),
}

/// Effort limits for membership searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchCaps {
    /// Largest term index a witness may use.
    pub index_cap: u32,
    /// Largest bracket length tried by [`vn_member`].
    pub slot_cap: u32,
    /// Search-node budget shared by one query.
    pub node_budget: u64,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps {
            index_cap: 12,
            slot_cap: 4,
            node_budget: 1_000_000,
        }
    }
}

/// The slot-minima sequence (n_i): an explicit finite list or an arithmetic
/// rule n_i = start + (i-1)*step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinsSpec {
    Explicit(Vec<u32>),
    Arith { start: u32, step: u32 },
}

impl MinsSpec {
    /// First k entries; for explicit lists the prefix stops at the list end.
    pub fn prefix(&self, k: u32) -> Vec<u32> {
        match self {
            MinsSpec::Explicit(v) => v.iter().take(k as usize).copied().collect(),
            MinsSpec::Arith { start, step } => {
                (0..k).map(|i| start + i * step).collect()
            }
        }
    }

    /// Smallest minimum over the entire (possibly infinite) sequence.
    pub fn global_min(&self) -> u32 {
        match self {
            MinsSpec::Explicit(v) => v.iter().copied().min().unwrap_or(1),
            MinsSpec::Arith { start, .. } => *start,
        }
    }

    pub fn len(&self) -> Option<u32> {
        match self {
            MinsSpec::Explicit(v) => Some(v.len() as u32),
            MinsSpec::Arith { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<(), ZelError> {
        match self {
            MinsSpec::Explicit(v) => {
                if v.is_empty() {
                    return Err(ZelError::EmptyMins);
                }
                if v.iter().any(|&m| m == 0) {
                    return Err(ZelError::MinZero);
                }
            }
            MinsSpec::Arith { start, .. } => {
                if *start == 0 {
                    return Err(ZelError::MinZero);
                }
            }
        }
        Ok(())
    }

    /// Literal forms: "1,1,2" (explicit) or "arith:start,step".
    pub fn parse(s: &str) -> Result<MinsSpec, ZelError> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("arith:") {
            let (start, step) = rest
                .split_once(',')
                .ok_or_else(|| ZelError::Parse(s.to_string()))?;
            let start: u32 = start
                .trim()
                .parse()
                .map_err(|_| ZelError::Parse(s.to_string()))?;
            let step: u32 = step
                .trim()
                .parse()
                .map_err(|_| ZelError::Parse(s.to_string()))?;
            let spec = MinsSpec::Arith { start, step };
            spec.validate()?;
            return Ok(spec);
        }
        let entries = s
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| ZelError::Parse(s.to_string()))?;
        let spec = MinsSpec::Explicit(entries);
        spec.validate()?;
        Ok(spec)
    }

    pub fn describe(&self) -> String {
        match self {
            MinsSpec::Explicit(v) => v
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>()
                .join(","),
            MinsSpec::Arith { start, step } => format!("arith:{start},{step}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZelenyukSpec {
    pub seq: DSequence,
    pub mins: MinsSpec,
    pub caps: SearchCaps,
}

/// One witness term: slot i contributes sign * a_index with index >= n_i.
/// Slots not listed contribute 0. Slot numbering refers to the minima sorted
/// ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignedTerm {
    pub slot: u32,
    pub index: u32,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignedCombination {
    pub terms: Vec<SignedTerm>,
}

impl SignedCombination {
    pub fn empty() -> SignedCombination {
        SignedCombination { terms: Vec::new() }
    }

    pub fn sum(&self, seq: &DSequence) -> Result<BigInt, DSeqError> {
        let mut total = BigInt::zero();
        for t in &self.terms {
            let term = seq.term(t.index)?;
            if t.sign >= 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        Ok(total)
    }

    /// Every term sits in a distinct slot and meets that slot's minimum.
    pub fn respects_minima(&self, sorted_mins: &[u32]) -> bool {
        let mut seen = vec![false; sorted_mins.len()];
        for t in &self.terms {
            let slot = t.slot as usize;
            if slot >= sorted_mins.len() || seen[slot] || t.index < sorted_mins[slot] {
                return false;
            }
            seen[slot] = true;
        }
        true
    }

    fn negated(mut self) -> SignedCombination {
        for t in &mut self.terms {
            t.sign = -t.sign;
        }
        self
    }
}

/// Membership answer plus the reasoning trail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BracketOutcome {
    pub verdict: Verdict,
    /// Which closure or search produced the verdict.
    pub closures_applied: Vec<String>,
    pub nodes: u64,
}

impl BracketOutcome {
    pub fn witness(&self) -> Option<&SignedCombination> {
        match &self.verdict.witness {
            Some(Witness::Combination(c)) => Some(c),
            _ => None,
        }
    }
}

struct SearchCtx<'a> {
    seq: &'a DSequence,
    /// Sorted ascending.
    mins: Vec<u32>,
    nodes: u64,
    budget: u64,
}

impl SearchCtx<'_> {
    /// How many slots may hold a term of index <= j.
    fn slots_up_to(&self, j: u32) -> u32 {
        self.mins.partition_point(|&m| m <= j) as u32
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        self.nodes <= self.budget
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Walk {
    /// Net coefficients (position, e) along an accepting path.
    Found(Vec<(u32, i64)>),
    Exhausted,
    /// The sequence tail is undefined; exhaustion could not be certified.
    Undecided,
    Aborted,
}

/// Candidate net coefficients at one position: e == q (mod r), |e| <= avail,
/// in deterministic order (small magnitude first, positive before negative).
fn coefficient_candidates(q: i64, r: i64, avail: u32) -> Vec<i64> {
    let mut out = Vec::new();
    let residue = q.rem_euclid(r);
    for magnitude in 0..=avail as i64 {
        for e in [magnitude, -magnitude] {
            if e.rem_euclid(r) == residue && !out.contains(&e) {
                out.push(e);
            }
        }
    }
    out
}

/// Depth-first walk over mixed-radix carry states.
///
/// State: position j, remaining target q (in units of b_j), slots used so
/// far. Every step either spends slot weight or divides |q| by the next
/// ratio, so the walk terminates unconditionally. With `max_index` set the
/// walk must flush q exactly at that position; without it the walk decides
/// true membership whenever the ratio rule is total.
fn walk(
    ctx: &mut SearchCtx,
    memo: &mut HashMap<(u32, i64, u32), Walk>,
    j: u32,
    q: i64,
    used: u32,
    max_index: Option<u32>,
) -> Walk {
    if q == 0 {
        return Walk::Found(Vec::new());
    }
    if !ctx.tick() {
        return Walk::Aborted;
    }
    // Beyond the largest minimum the constraint profile is position-free for
    // constant-ratio rules, so those states can share memo entries.
    let top_min = *ctx.mins.last().unwrap();
    let memo_j = if ctx.seq.has_constant_ratio() && j > top_min && max_index.is_none() {
        top_min + 1
    } else {
        j
    };
    let key = (memo_j, q, used);
    if max_index.is_none() {
        if let Some(cached) = memo.get(&key) {
            return cached.clone();
        }
    }
    let avail = ctx.slots_up_to(j).saturating_sub(used);
    let result = (|| {
        if let Some(cap) = max_index {
            if j == cap {
                // Last allowed position: q must be flushed exactly here.
                return if q.unsigned_abs() <= avail as u64 {
                    Walk::Found(vec![(j, q)])
                } else {
                    Walk::Exhausted
                };
            }
        }
        let ratio = match ctx.seq.ratio(j + 1) {
            Ok(r) => match r.to_i64() {
                Some(r) => r,
                None => return Walk::Undecided,
            },
            Err(DSeqError::UndefinedTerm { .. }) => return Walk::Undecided,
            Err(_) => return Walk::Undecided,
        };
        let mut undecided = false;
        for e in coefficient_candidates(q, ratio, avail) {
            let next_q = (q - e) / ratio;
            match walk(ctx, memo, j + 1, next_q, used + e.unsigned_abs() as u32, max_index) {
                Walk::Found(mut path) => {
                    if e != 0 {
                        path.push((j, e));
                    }
                    return Walk::Found(path);
                }
                Walk::Undecided => undecided = true,
                Walk::Exhausted => {}
                Walk::Aborted => return Walk::Aborted,
            }
        }
        if undecided {
            Walk::Undecided
        } else {
            Walk::Exhausted
        }
    })();
    if max_index.is_none() && result != Walk::Aborted {
        memo.insert(key, result.clone());
    }
    result
}

/// Turn an accepting path of net coefficients into a slot assignment: the
/// t-th smallest used index goes to the slot with the t-th smallest minimum.
fn path_to_combination(path: &[(u32, i64)]) -> SignedCombination {
    let mut uses: Vec<(u32, i8)> = Vec::new();
    for &(index, e) in path {
        let sign = if e >= 0 { 1i8 } else { -1 };
        for _ in 0..e.unsigned_abs() {
            uses.push((index, sign));
        }
    }
    uses.sort();
    SignedCombination {
        terms: uses
            .into_iter()
            .enumerate()
            .map(|(slot, (index, sign))| SignedTerm {
                slot: slot as u32,
                index,
                sign,
            })
            .collect(),
    }
}

fn sorted_mins(mins: &[u32]) -> Result<Vec<u32>, ZelError> {
    if mins.is_empty() {
        return Err(ZelError::EmptyMins);
    }
    if mins.iter().any(|&m| m == 0) {
        return Err(ZelError::MinZero);
    }
    let mut sorted = mins.to_vec();
    sorted.sort_unstable();
    Ok(sorted)
}

/// Membership of g in the bracket set [n_1, ..., n_k].
pub fn bracket_member(
    g: i64,
    seq: &DSequence,
    mins: &[u32],
    caps: &SearchCaps,
) -> Result<BracketOutcome, ZelError> {
    let mins = sorted_mins(mins)?;
    if g == 0 {
        return Ok(BracketOutcome {
            verdict: Verdict::member_in().with_witness(Witness::Combination(
                SignedCombination::empty(),
            )),
            closures_applied: vec!["identity".to_string()],
            nodes: 0,
        });
    }
    let k = mins.len() as u32;
    let target = g.unsigned_abs() as i64;

    // Closure (a): every bracket element is divisible by the term at the
    // smallest minimum.
    let base_term = seq.term(mins[0])?;
    if !BigInt::from(target).mod_floor(&base_term).is_zero() {
        return Ok(BracketOutcome {
            verdict: Verdict::member_out(),
            closures_applied: vec!["divisibility".to_string()],
            nodes: 0,
        });
    }

    let mut ctx = SearchCtx {
        seq,
        mins: mins.clone(),
        nodes: 0,
        budget: caps.node_budget,
    };
    let effective_cap = match seq.defined_len() {
        Some(len) => caps.index_cap.min(len),
        None => caps.index_cap,
    };

    // Bounded witness search, iterative deepening over the largest index
    // used so the first witness found has the smallest possible top index.
    for deepen in mins[0]..=effective_cap {
        let mut memo = HashMap::new();
        match walk(&mut ctx, &mut memo, 1, target, 0, Some(deepen)) {
            Walk::Found(mut path) => {
                path.sort();
                let mut combo = path_to_combination(&path);
                if g < 0 {
                    combo = combo.negated();
                }
                debug_assert_eq!(combo.sum(seq)?, BigInt::from(g));
                debug_assert!(combo.respects_minima(&mins));
                return Ok(BracketOutcome {
                    verdict: Verdict::member_in()
                        .with_witness(Witness::Combination(combo)),
                    closures_applied: vec!["bounded-search".to_string()],
                    nodes: ctx.nodes,
                });
            }
            Walk::Aborted => {
                return Ok(BracketOutcome {
                    verdict: Verdict::unknown(format!(
                        "node budget {} exhausted during bounded search",
                        caps.node_budget
                    )),
                    closures_applied: vec![],
                    nodes: ctx.nodes,
                });
            }
            Walk::Exhausted | Walk::Undecided => {}
        }
    }

    // Closure (b): bounded search was exhaustive up to the cap, and the rule
    // certifies ratios beyond it so large that any combination touching an
    // index above the cap overshoots g.
    if let Some(r_min) = seq.min_ratio_from(effective_cap + 1) {
        if r_min >= BigInt::from(k) {
            let bound = seq.term(effective_cap)? * (r_min - BigInt::from(k) + 1);
            if BigInt::from(target) < bound {
                return Ok(BracketOutcome {
                    verdict: Verdict::member_out(),
                    closures_applied: vec![
                        "bounded-search-exhausted".to_string(),
                        "tail-bound".to_string(),
                    ],
                    nodes: ctx.nodes,
                });
            }
        }
    }

    // Closure (c): exhaustive residue walk with no index bound. For total
    // ratio rules this decides true membership; an In found here means every
    // representation needs an index beyond the cap, which the caps contract
    // reports as Unknown rather than as a witnessless In.
    let mut memo = HashMap::new();
    let unbounded = walk(&mut ctx, &mut memo, 1, target, 0, None);
    let outcome = match unbounded {
        Walk::Exhausted => BracketOutcome {
            verdict: Verdict::member_out(),
            closures_applied: vec!["residue-walk".to_string()],
            nodes: ctx.nodes,
        },
        Walk::Found(_) => BracketOutcome {
            verdict: Verdict::unknown(format!(
                "member, but every representation needs a term index above index_cap {}",
                caps.index_cap
            )),
            closures_applied: vec!["residue-walk".to_string()],
            nodes: ctx.nodes,
        },
        Walk::Undecided => BracketOutcome {
            verdict: Verdict::unknown(format!(
                "sequence tail undefined beyond term {}",
                seq.defined_len().unwrap_or(0)
            )),
            closures_applied: vec![],
            nodes: ctx.nodes,
        },
        Walk::Aborted => BracketOutcome {
            verdict: Verdict::unknown(format!(
                "node budget {} exhausted during residue walk",
                caps.node_budget
            )),
            closures_applied: vec![],
            nodes: ctx.nodes,
        },
    };
    Ok(outcome)
}

/// Membership in V_(n_i): the union of brackets over prefix lengths up to
/// slot_cap. In is witnessed through some prefix; Out needs an argument that
/// covers every prefix length, implemented for the divisibility closure (and
/// for explicit minima lists short enough that every prefix was decided).
pub fn vn_member(g: i64, spec: &ZelenyukSpec) -> Result<BracketOutcome, ZelError> {
    spec.mins.validate()?;
    if g == 0 {
        return Ok(BracketOutcome {
            verdict: Verdict::member_in().with_witness(Witness::Combination(
                SignedCombination::empty(),
            )),
            closures_applied: vec!["identity".to_string()],
            nodes: 0,
        });
    }
    let global_min_term = spec.seq.term(spec.mins.global_min())?;
    if !BigInt::from(g).mod_floor(&global_min_term).is_zero() {
        return Ok(BracketOutcome {
            verdict: Verdict::member_out(),
            closures_applied: vec!["divisibility".to_string()],
            nodes: 0,
        });
    }
    let max_k = match spec.mins.len() {
        Some(len) => len.min(spec.caps.slot_cap),
        None => spec.caps.slot_cap,
    };
    let mut nodes = 0;
    let mut all_prefixes_out = true;
    for k in 1..=max_k {
        let prefix = spec.mins.prefix(k);
        let outcome = bracket_member(g, &spec.seq, &prefix, &spec.caps)?;
        nodes += outcome.nodes;
        match outcome.verdict.kind {
            crate::verdict::VerdictKind::In => {
                let mut closures = outcome.closures_applied;
                closures.push(format!("prefix-length {k}"));
                return Ok(BracketOutcome {
                    verdict: outcome.verdict,
                    closures_applied: closures,
                    nodes,
                });
            }
            crate::verdict::VerdictKind::Out => {}
            crate::verdict::VerdictKind::Unknown => all_prefixes_out = false,
        }
    }
    // For a finite minima list fully covered by slot_cap, the union itself
    // has been decided.
    if all_prefixes_out && spec.mins.len().is_some_and(|len| len <= spec.caps.slot_cap) {
        return Ok(BracketOutcome {
            verdict: Verdict::member_out(),
            closures_applied: vec!["all-prefixes-exhausted".to_string()],
            nodes,
        });
    }
    Ok(BracketOutcome {
        verdict: Verdict::unknown(format!(
            "no witness up to slot_cap {max_k}; no union-wide closure applies"
        )),
        closures_applied: vec![],
        nodes,
    })
}

/// Exhaustive slot-assignment enumeration, independent of the search above.
/// Used by tests and the oracle mode of the command-line tool.
pub fn brute_force_oracle(
    g: i64,
    seq: &DSequence,
    mins: &[u32],
    index_cap: u32,
    node_budget: u64,
) -> Result<Verdict, ZelError> {
    let mins = sorted_mins(mins)?;
    let effective_cap = match seq.defined_len() {
        Some(len) => index_cap.min(len),
        None => index_cap,
    };
    // Per-slot choice lists: 0 or +/- a_j for n_i <= j <= cap.
    let mut space: u64 = 1;
    let mut choices: Vec<Vec<i128>> = Vec::new();
    for &m in &mins {
        let mut slot = vec![0i128];
        for j in m..=effective_cap {
            let term = seq
                .term(j)?
                .to_i128()
                .ok_or(ZelError::SpaceExceeded)?;
            slot.push(term);
            slot.push(-term);
        }
        space = space.saturating_mul(slot.len() as u64);
        choices.push(slot);
    }
    if space > node_budget {
        return Err(ZelError::SpaceExceeded);
    }
    let target = g as i128;
    fn recurse(choices: &[Vec<i128>], depth: usize, acc: i128, target: i128) -> bool {
        if depth == choices.len() {
            return acc == target;
        }
        choices[depth]
            .iter()
            .any(|c| recurse(choices, depth + 1, acc + c, target))
    }
    let found = recurse(&choices, 0, 0, target);
    Ok(if found {
        Verdict::member_in()
    } else {
        Verdict::member_out()
    })
}

/// All sums reachable with indices up to the cap whose magnitude stays
/// within `bound`, as a bitmap indexed by g + bound. Oracle support for
/// grid-scale cross-checks.
pub fn reachable_sums(
    seq: &DSequence,
    mins: &[u32],
    index_cap: u32,
    bound: i64,
) -> Result<Vec<bool>, ZelError> {
    let mins = sorted_mins(mins)?;
    let effective_cap = match seq.defined_len() {
        Some(len) => index_cap.min(len),
        None => index_cap,
    };
    let mut choices: Vec<Vec<i128>> = Vec::new();
    for &m in &mins {
        let mut slot = vec![0i128];
        for j in m..=effective_cap {
            let term = seq.term(j)?.to_i128().ok_or(ZelError::SpaceExceeded)?;
            slot.push(term);
            slot.push(-term);
        }
        choices.push(slot);
    }
    let mut bitmap = vec![false; (2 * bound + 1) as usize];
    fn recurse(choices: &[Vec<i128>], depth: usize, acc: i128, bound: i64, bitmap: &mut [bool]) {
        if depth == choices.len() {
            if acc.unsigned_abs() <= bound as u128 {
                bitmap[(acc as i64 + bound) as usize] = true;
            }
            return;
        }
        for c in &choices[depth] {
            recurse(choices, depth + 1, acc + c, bound, bitmap);
        }
    }
    recurse(&choices, 0, 0, bound, &mut bitmap);
    Ok(bitmap)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TailEntry {
    pub index: u32,
    pub term: String,
    pub verdict: Verdict,
}

/// Finite-horizon certificate that the sequence's own tail enters the
/// neighborhood: the least J with a_j in V_(n_i) for all J <= j <= horizon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TailReport {
    pub horizon: u32,
    pub entries: Vec<TailEntry>,
    /// None when even the horizon term stays outside (or undecided).
    pub least_settle: Option<u32>,
    pub evidence: &'static str,
}

pub fn tail_convergence_check(spec: &ZelenyukSpec, horizon: u32) -> Result<TailReport, ZelError> {
    // A tail term a_j enters through a single-term witness at index j, so
    // the index cap must reach the horizon for the check to be meaningful.
    let mut spec = spec.clone();
    spec.caps.index_cap = spec.caps.index_cap.max(horizon);
    let mut entries = Vec::with_capacity(horizon as usize);
    for j in 1..=horizon {
        let term = spec.seq.term(j)?;
        let g = term.to_i64().ok_or(ZelError::SpaceExceeded)?;
        let outcome = vn_member(g, &spec)?;
        entries.push(TailEntry {
            index: j,
            term: term.to_string(),
            verdict: outcome.verdict,
        });
    }
    let mut least = None;
    for entry in entries.iter().rev() {
        if entry.verdict.is_in() {
            least = Some(entry.index);
        } else {
            break;
        }
    }
    Ok(TailReport {
        horizon,
        entries,
        least_settle: least,
        evidence: "finite-horizon evidence, not a proof",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p2() -> DSequence {
        DSequence::padic(2).unwrap()
    }

    fn caps() -> SearchCaps {
        SearchCaps::default()
    }

    #[test]
    fn bracket_examples() {
        // 3 = a_1 + a_2 = 1 + 2 over padic:2.
        let out = bracket_member(3, &p2(), &[1, 1], &caps()).unwrap();
        assert!(out.verdict.is_in());
        let w = out.witness().unwrap();
        assert_eq!(w.sum(&p2()).unwrap(), BigInt::from(3));
        assert_eq!(
            w.terms,
            vec![
                SignedTerm { slot: 0, index: 1, sign: 1 },
                SignedTerm { slot: 1, index: 2, sign: 1 }
            ]
        );

        let out = bracket_member(0, &p2(), &[2, 3], &caps()).unwrap();
        assert!(out.verdict.is_in());
        assert!(out.witness().unwrap().terms.is_empty());

        // a_3 = 4 divides every element of [3,3]; 4 does not divide 3.
        let out = bracket_member(3, &p2(), &[3, 3], &caps()).unwrap();
        assert!(out.verdict.is_out());
        assert_eq!(out.closures_applied, vec!["divisibility".to_string()]);
    }

    #[test]
    fn bracket_out_by_tail_bound_for_two_slots() {
        // 11 is not +/-2^a +/- 2^b with exponents up to the cap, and with
        // two slots the constant ratio 2 already meets the tail condition.
        let out = bracket_member(11, &p2(), &[1, 1], &caps()).unwrap();
        assert!(out.verdict.is_out());
        assert!(out.closures_applied.contains(&"tail-bound".to_string()));
    }

    #[test]
    fn bracket_out_by_residue_walk() {
        // 43 is not a sum of three signed powers of two for any exponents,
        // and with three slots the ratio-2 tail bound is unavailable: only
        // the unbounded residue walk can certify Out.
        let out = bracket_member(43, &p2(), &[1, 1, 1], &caps()).unwrap();
        assert!(out.verdict.is_out());
        assert_eq!(out.closures_applied, vec!["residue-walk".to_string()]);
    }

    #[test]
    fn bracket_unknown_when_witness_needs_bigger_index() {
        // 4097 = 2^12 + 1 = a_13 + a_1 needs index 13 > cap 12 as a two-term
        // sum; with k = 2 no bounded witness exists.
        let out = bracket_member(4097, &p2(), &[1, 1], &caps()).unwrap();
        assert!(out.verdict.is_unknown());
        assert!(out
            .verdict
            .reason
            .as_deref()
            .unwrap()
            .contains("above index_cap"));
    }

    #[test]
    fn bracket_tail_bound_closure() {
        // 10 is even (passes divisibility) but no two signed factorials from
        // index 2 sum to it; the growing ratios above the cap certify Out.
        let fact = DSequence::factorial();
        let out = bracket_member(10, &fact, &[2, 2], &caps()).unwrap();
        assert!(out.verdict.is_out());
        assert!(out
            .closures_applied
            .contains(&"tail-bound".to_string()));
    }

    #[test]
    fn bracket_undefined_tail_is_unknown() {
        let seq: DSequence = "list:1,2,4".parse().unwrap();
        // 2 - 4 = -2... 6 = 2 + 4 is in; 10 needs terms beyond the list.
        let out = bracket_member(6, &seq, &[2, 2], &caps()).unwrap();
        assert!(out.verdict.is_in());
        let out = bracket_member(10, &seq, &[2, 2], &caps()).unwrap();
        assert!(out.verdict.is_unknown());
        assert!(out.verdict.reason.as_deref().unwrap().contains("undefined"));
    }

    #[test]
    fn oracle_examples() {
        let out = brute_force_oracle(5, &p2(), &[1, 2], 4, 1_000_000).unwrap();
        assert!(out.is_in());
        let out = brute_force_oracle(3, &p2(), &[1], 6, 1_000_000).unwrap();
        assert!(out.is_out());
        let out = brute_force_oracle(0, &p2(), &[1, 1], 2, 1_000_000).unwrap();
        assert!(out.is_in());
        assert_eq!(
            brute_force_oracle(1, &p2(), &[1; 12], 12, 100),
            Err(ZelError::SpaceExceeded)
        );
    }

    #[test]
    fn vn_examples() {
        let spec = ZelenyukSpec {
            seq: p2(),
            mins: MinsSpec::Arith { start: 1, step: 1 },
            caps: caps(),
        };
        // a_5 = 16 enters at prefix length 1.
        let out = vn_member(16, &spec).unwrap();
        assert!(out.verdict.is_in());
        assert_eq!(out.witness().unwrap().terms.len(), 1);

        let shifted = ZelenyukSpec {
            seq: p2(),
            mins: MinsSpec::Arith { start: 2, step: 1 },
            caps: caps(),
        };
        let out = vn_member(3, &shifted).unwrap();
        assert!(out.verdict.is_out());
        assert_eq!(out.closures_applied, vec!["divisibility".to_string()]);

        assert!(vn_member(0, &spec).unwrap().verdict.is_in());
    }

    #[test]
    fn tail_convergence_examples() {
        let spec = ZelenyukSpec {
            seq: p2(),
            mins: MinsSpec::Arith { start: 1, step: 1 },
            caps: caps(),
        };
        let report = tail_convergence_check(&spec, 20).unwrap();
        assert_eq!(report.least_settle, Some(1));

        let fact_spec = ZelenyukSpec {
            seq: DSequence::factorial(),
            mins: MinsSpec::Arith { start: 3, step: 1 },
            caps: caps(),
        };
        let report = tail_convergence_check(&fact_spec, 20).unwrap();
        assert_eq!(report.least_settle, Some(3));

        let const_spec = ZelenyukSpec {
            seq: p2(),
            mins: MinsSpec::Arith { start: 1, step: 0 },
            caps: caps(),
        };
        let report = tail_convergence_check(&const_spec, 5).unwrap();
        assert_eq!(report.least_settle, Some(1));
    }

    #[test]
    fn mins_parse_forms() {
        assert_eq!(
            MinsSpec::parse("1,1,2").unwrap(),
            MinsSpec::Explicit(vec![1, 1, 2])
        );
        assert_eq!(
            MinsSpec::parse("arith:2,1").unwrap(),
            MinsSpec::Arith { start: 2, step: 1 }
        );
        assert!(MinsSpec::parse("0,1").is_err());
        assert!(MinsSpec::parse("").is_err());
    }

    proptest! {
        // Search agrees with the exhaustive oracle wherever both commit.
        #[test]
        fn search_matches_oracle(g in -260i64..260, k in 1usize..=3, m1 in 1u32..4, m2 in 1u32..4, m3 in 1u32..4) {
            let mins: Vec<u32> = [m1, m2, m3][..k].to_vec();
            let caps = SearchCaps { index_cap: 8, slot_cap: 4, node_budget: 1_000_000 };
            for seq in [p2(), DSequence::factorial()] {
                let got = bracket_member(g, &seq, &mins, &caps).unwrap();
                let oracle = brute_force_oracle(g, &seq, &mins, 8, 10_000_000).unwrap();
                if got.verdict.is_in() {
                    prop_assert!(oracle.is_in(), "search In, oracle Out: g={g} mins={mins:?} seq={seq}");
                    let w = got.witness().unwrap();
                    prop_assert_eq!(w.sum(&seq).unwrap(), BigInt::from(g));
                    let mut sorted = mins.clone();
                    sorted.sort_unstable();
                    prop_assert!(w.respects_minima(&sorted));
                    prop_assert!(w.terms.iter().all(|t| t.index <= 8));
                }
                if got.verdict.is_out() {
                    prop_assert!(oracle.is_out(), "search Out, oracle In: g={g} mins={mins:?} seq={seq}");
                }
            }
        }

        #[test]
        fn symmetry(g in -500i64..500, m1 in 1u32..4, m2 in 1u32..4) {
            let out_pos = bracket_member(g, &p2(), &[m1, m2], &caps()).unwrap();
            let out_neg = bracket_member(-g, &p2(), &[m1, m2], &caps()).unwrap();
            prop_assert_eq!(out_pos.verdict.kind, out_neg.verdict.kind);
        }

        #[test]
        fn monotone_in_slot_count(g in -500i64..500, m1 in 1u32..4, m2 in 1u32..4) {
            let small = bracket_member(g, &p2(), &[m1], &caps()).unwrap();
            if small.verdict.is_in() {
                let bigger = bracket_member(g, &p2(), &[m1, m2], &caps()).unwrap();
                prop_assert!(bigger.verdict.is_in());
            }
        }

        #[test]
        fn in_witness_divisible_by_min_term(g in -2000i64..2000, m1 in 1u32..5, m2 in 1u32..5) {
            let mins = [m1, m2];
            let out = bracket_member(g, &p2(), &mins, &caps()).unwrap();
            if out.verdict.is_in() {
                let least = seq_term_i64(&p2(), m1.min(m2));
                prop_assert_eq!(g % least, 0);
            }
        }
    }

    fn seq_term_i64(seq: &DSequence, n: u32) -> i64 {
        seq.term(n).unwrap().to_i64().unwrap()
    }
}
