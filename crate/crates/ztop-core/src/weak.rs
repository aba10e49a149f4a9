//! Characters of the integers and the weak (precompact) topologies they
//! induce.
//!
//! A finite set F of torus points defines the neighborhood
//! U_(F, delta) = { k : ||k*x|| <= delta for every x in F }. This module
//! answers membership in those sets, searches subgroup words for a character
//! separating a given integer from zero, and decides whether a rational
//! character is continuous for the linear topology of a divisibility chain
//! (the torsion dual: a/q is continuous iff q divides some chain term).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::dseq::{DSeqError, DSequence};
use crate::torus::{band_member, torus_norm, Norm, TorusError, TorusPoint};
use crate::verdict::{Verdict, VerdictKind, Witness};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WeakError {
    #[error("character set must be nonempty")]
    EmptyCharacterSet,
    #[error("nothing separates 0 from 0")]
    SeparateZero,
    #[error("band radius must lie in (0, 1/2]")]
    BandRange,
    #[error("Pruefer elements over different primes cannot be added")]
    MismatchedPrimes,
    #[error("{0} is not a valid Pruefer denominator for prime {1}")]
    NotAPrimePower(String, u64),
    #[error("unparseable Pruefer literal: {0}")]
    ParsePrufer(String),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Seq(#[from] DSeqError),
}

/// Per-generator closure hint: rational a/q generates a cyclic group of
/// order q; enclosure points are declared infinite by the caller.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ClosureHint {
    FiniteCyclic { order: String },
    DeclaredInfinite,
}

/// A finitely generated subgroup of the torus, doubling as the finite set F
/// of a weak-topology neighborhood.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterSet {
    generators: Vec<TorusPoint>,
}

impl CharacterSet {
    pub fn new(generators: Vec<TorusPoint>) -> Result<CharacterSet, WeakError> {
        if generators.is_empty() {
            return Err(WeakError::EmptyCharacterSet);
        }
        Ok(CharacterSet { generators })
    }

    pub fn generators(&self) -> &[TorusPoint] {
        &self.generators
    }

    pub fn closure_hints(&self) -> Vec<ClosureHint> {
        self.generators
            .iter()
            .map(|g| match g.as_rational() {
                Some(r) => ClosureHint::FiniteCyclic {
                    order: r.denom().to_string(),
                },
                None => ClosureHint::DeclaredInfinite,
            })
            .collect()
    }

    /// lcm of the generator denominators, when every generator is rational.
    /// Membership in any U_(F, delta) is then periodic with this period.
    pub fn rational_period(&self) -> Option<BigInt> {
        let mut period = BigInt::one();
        for g in &self.generators {
            let r = g.as_rational()?;
            period = period.lcm(r.denom());
        }
        Some(period)
    }

    /// Comma-separated torus point literals.
    pub fn parse(s: &str) -> Result<CharacterSet, WeakError> {
        let generators = s
            .split(',')
            .map(|t| t.trim().parse::<TorusPoint>())
            .collect::<Result<Vec<_>, _>>()?;
        CharacterSet::new(generators)
    }
}

impl fmt::Display for CharacterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Membership of k in U_(F, delta): every generator must keep k*x inside the
/// closed band. Exact whenever every generator is rational.
pub fn weak_member(k: i64, chars: &CharacterSet, delta: &BigRational) -> Verdict {
    let mut unknown: Option<Verdict> = None;
    let mut max_bits = None;
    for x in chars.generators() {
        let v = band_member(&x.scalar_mul(k), delta);
        max_bits = max_bits.max(v.precision_bits);
        match v.kind {
            VerdictKind::Out => return v,
            VerdictKind::Unknown => unknown = Some(v),
            VerdictKind::In => {}
        }
    }
    match unknown {
        Some(v) => v,
        None => {
            let mut v = Verdict::member_in();
            v.precision_bits = max_bits;
            v
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SeparationResult {
    /// A word in the generators with certified nonzero norm at m.
    Witness {
        character: TorusPoint,
        /// Generator exponents of the witness word.
        word: Vec<i64>,
        /// Certified lower bound for ||m * character||.
        norm_lower_bound: String,
    },
    NotFound {
        cap: u32,
    },
}

/// Search subgroup words of length 1..=cap (length = sum of |exponents|,
/// enumerated in increasing length, lexicographic within a length) for a
/// character chi with a certified nonzero ||m * chi||.
///
/// A witness from an enclosure generator requires the whole norm enclosure
/// to clear zero; straddling enclosures are skipped, never asserted.
pub fn separation_witness(
    m: i64,
    subgroup: &CharacterSet,
    cap: u32,
) -> Result<SeparationResult, WeakError> {
    if m == 0 {
        return Err(WeakError::SeparateZero);
    }
    let gens = subgroup.generators();
    for length in 1..=cap {
        let mut exponents = vec![0i64; gens.len()];
        if let Some(result) = search_words(m, gens, &mut exponents, 0, length as i64) {
            return Ok(result);
        }
    }
    Ok(SeparationResult::NotFound { cap })
}

fn search_words(
    m: i64,
    gens: &[TorusPoint],
    exponents: &mut Vec<i64>,
    position: usize,
    remaining: i64,
) -> Option<SeparationResult> {
    if position == gens.len() {
        if remaining != 0 {
            return None;
        }
        let mut chi = TorusPoint::zero();
        for (g, &c) in gens.iter().zip(exponents.iter()) {
            if c != 0 {
                chi = chi.add(&g.scalar_mul(c));
            }
        }
        let norm = torus_norm(&chi.scalar_mul(m));
        let lower = match &norm {
            Norm::Exact(n) => n.clone(),
            Norm::Enclosure(iv) => iv.lo().clone(),
        };
        if lower.is_positive() {
            return Some(SeparationResult::Witness {
                character: chi,
                word: exponents.clone(),
                norm_lower_bound: lower.to_string(),
            });
        }
        return None;
    }
    // Distribute `remaining` magnitude over the remaining generators;
    // positive exponent explored before negative for determinism.
    let max_here = remaining;
    for magnitude in (0..=max_here).rev() {
        let signs: &[i64] = if magnitude == 0 { &[1] } else { &[1, -1] };
        for &sign in signs {
            exponents[position] = sign * magnitude;
            if let Some(hit) = search_words(m, gens, exponents, position + 1, remaining - magnitude)
            {
                return Some(hit);
            }
        }
    }
    exponents[position] = 0;
    None
}

/// Is the rational character a/q continuous for the linear topology of the
/// chain b? In with the first level n where q | b_n. Out is certified either
/// through the chain's prime support or through a tail-coprimality
/// certificate from the rule; enclosure points are declared infinite-order
/// and thus discontinuous.
pub fn character_continuity(chi: &TorusPoint, seq: &DSequence, cap: u32) -> Verdict {
    let r = match chi.as_rational() {
        Some(r) => r,
        None => {
            // Declared non-rational: infinite order, and no finite-order
            // subgroup of the torus can absorb it.
            return Verdict {
                kind: VerdictKind::Out,
                reason: Some("declared infinite order".to_string()),
                witness: None,
                precision_bits: None,
            };
        }
    };
    let q = r.denom().clone();
    if q.is_one() {
        // The zero character is continuous everywhere.
        return Verdict::member_in().with_witness(Witness::Level(1));
    }
    for n in 1..=cap {
        match seq.term(n) {
            Ok(term) => {
                if term.mod_floor(&q).is_zero() {
                    return Verdict::member_in().with_witness(Witness::Level(n));
                }
            }
            Err(_) => {
                return Verdict::unknown(format!(
                    "sequence undefined beyond term {}; no continuity level found",
                    n.saturating_sub(1)
                ));
            }
        }
    }
    if let Some(support) = seq.prime_support() {
        let mut rest = q.clone();
        for p in support {
            let p = BigInt::from(p);
            while rest.mod_floor(&p).is_zero() {
                rest /= &p;
            }
        }
        if !rest.is_one() {
            return Verdict {
                kind: VerdictKind::Out,
                reason: Some("denominator has a prime outside the chain's support".to_string()),
                witness: None,
                precision_bits: None,
            };
        }
    }
    if seq.tail_coprime_certified(&q) {
        // gcd(q, b_n) is frozen from the cap on, so no deeper level divides.
        return Verdict {
            kind: VerdictKind::Out,
            reason: Some("chain exponents stabilized below the denominator".to_string()),
            witness: None,
            precision_bits: None,
        };
    }
    Verdict::unknown(format!("no continuity level up to cap {cap}"))
}

/// A torsion point a/p^n of the torus in canonical form: 0 <= a < p^n and
/// p does not divide a unless n = 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PruferElement {
    pub p: u64,
    pub numerator: String,
    pub exponent: u32,
}

impl PruferElement {
    pub fn new(p: u64, numerator: BigInt, exponent: u32) -> PruferElement {
        let pb = BigInt::from(p);
        let modulus = pb.pow(exponent);
        let mut a = numerator.mod_floor(&modulus);
        let mut n = exponent;
        while n > 0 && a.mod_floor(&pb).is_zero() {
            a /= &pb;
            n -= 1;
        }
        if n == 0 {
            a = BigInt::zero();
        }
        PruferElement {
            p,
            numerator: a.to_string(),
            exponent: n,
        }
    }

    fn numer_int(&self) -> BigInt {
        BigInt::from_str(&self.numerator).expect("canonical numerator")
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.numer_int(), BigInt::from(self.p).pow(self.exponent))
    }

    /// Canonicalize a reduced rational a/q as a torsion point, when q is a
    /// power of p.
    pub fn try_from_rational(r: &BigRational, p: u64) -> Option<PruferElement> {
        let reduced = r - r.floor();
        let mut q = reduced.denom().clone();
        let pb = BigInt::from(p);
        let mut exponent = 0u32;
        while q.mod_floor(&pb).is_zero() {
            q /= &pb;
            exponent += 1;
        }
        if !q.is_one() {
            return None;
        }
        Some(PruferElement::new(p, reduced.numer().clone(), exponent))
    }
}

impl fmt::Display for PruferElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}^{}", self.numerator, self.p, self.exponent)
    }
}

impl FromStr for PruferElement {
    type Err = WeakError;

    /// Literal form "a/p^n".
    fn from_str(s: &str) -> Result<Self, WeakError> {
        let err = || WeakError::ParsePrufer(s.to_string());
        let (a, rest) = s.split_once('/').ok_or_else(err)?;
        let (p, n) = rest.split_once('^').ok_or_else(err)?;
        let a = BigInt::from_str(a.trim()).map_err(|_| err())?;
        let p: u64 = p.trim().parse().map_err(|_| err())?;
        let n: u32 = n.trim().parse().map_err(|_| err())?;
        if p < 2 {
            return Err(err());
        }
        Ok(PruferElement::new(p, a, n))
    }
}

/// Sum inside the p-torsion subgroup; the result's order divides
/// p^max(n, m).
pub fn prufer_add(u: &PruferElement, v: &PruferElement) -> Result<PruferElement, WeakError> {
    if u.p != v.p {
        return Err(WeakError::MismatchedPrimes);
    }
    let sum = u.to_rational() + v.to_rational();
    let sum = &sum - sum.floor();
    let exponent = u.exponent.max(v.exponent);
    let scale = BigInt::from(u.p).pow(exponent);
    let numerator = (&sum * BigRational::from_integer(scale)).to_integer();
    Ok(PruferElement::new(u.p, numerator, exponent))
}
