//! Certified rational interval arithmetic.
//!
//! Endpoints are exact `BigRational`s; every transcendental step rounds the
//! endpoints outward onto a dyadic grid so enclosures stay small while the
//! true value never escapes. This is the only module that evaluates
//! transcendental functions; everything that can stay in exact rational
//! arithmetic does.

use std::collections::BTreeMap;
use std::sync::Mutex;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// 2^exp as an exact rational (exp may be negative).
pub fn pow2(exp: i64) -> BigRational {
    if exp >= 0 {
        BigRational::from_integer(BigInt::one() << exp as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-exp) as usize)
    }
}

/// Largest multiple of 2^-bits that is <= x.
pub fn round_down(x: &BigRational, bits: u32) -> BigRational {
    let scaled = x * pow2(bits as i64);
    scaled.floor() * pow2(-(bits as i64))
}

/// Smallest multiple of 2^-bits that is >= x.
pub fn round_up(x: &BigRational, bits: u32) -> BigRational {
    let scaled = x * pow2(bits as i64);
    scaled.ceil() * pow2(-(bits as i64))
}

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RatInterval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn overlaps(&self, other: &RatInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn add(&self, other: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> RatInterval {
        RatInterval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul(&self, other: &RatInterval) -> RatInterval {
        let candidates = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = candidates.iter().min().unwrap().clone();
        let hi = candidates.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }

    pub fn scale(&self, c: &BigRational) -> RatInterval {
        if c.is_negative() {
            RatInterval {
                lo: &self.hi * c,
                hi: &self.lo * c,
            }
        } else {
            RatInterval {
                lo: &self.lo * c,
                hi: &self.hi * c,
            }
        }
    }

    /// Round both endpoints outward onto the 2^-bits grid.
    pub fn round_out(&self, bits: u32) -> RatInterval {
        RatInterval {
            lo: round_down(&self.lo, bits),
            hi: round_up(&self.hi, bits),
        }
    }

    /// Symmetric widening by a nonnegative slack.
    pub fn widen(&self, slack: &BigRational) -> RatInterval {
        debug_assert!(!slack.is_negative());
        RatInterval {
            lo: &self.lo - slack,
            hi: &self.hi + slack,
        }
    }

    pub fn hull(&self, other: &RatInterval) -> RatInterval {
        RatInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }
}

/// Enclosure of pi at roughly `bits` fractional bits, computed from
/// 16*atan(1/5) - 4*atan(1/239) with exact rational partial sums and the
/// alternating-series remainder bound. Results are cached per precision.
pub fn pi(bits: u32) -> RatInterval {
    static CACHE: OnceLock<Mutex<BTreeMap<u32, RatInterval>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    // Quantize requests so the cache stays small.
    let q = bits.div_ceil(64) * 64;
    {
        let guard = cache.lock().unwrap();
        if let Some(v) = guard.get(&q) {
            return v.clone();
        }
    }
    let a5 = atan_inv(5, q + 8);
    let a239 = atan_inv(239, q + 8);
    let sixteen = BigRational::from_integer(BigInt::from(16));
    let four = BigRational::from_integer(BigInt::from(4));
    let value = a5.scale(&sixteen).sub(&a239.scale(&four)).round_out(q);
    cache.lock().unwrap().insert(q, value.clone());
    value
}

/// atan(1/n) for integer n >= 2, enclosed by consecutive alternating partial
/// sums of the Leibniz-style series.
fn atan_inv(n: u64, bits: u32) -> RatInterval {
    let x = BigRational::new(BigInt::one(), BigInt::from(n));
    let x2 = &x * &x;
    let eps = pow2(-((bits + 4) as i64));
    let mut sum = BigRational::zero();
    let mut power = x.clone();
    let mut k: u64 = 0;
    loop {
        let term = &power / BigRational::from_integer(BigInt::from(2 * k + 1));
        if term < eps {
            // |atan(1/n) - sum| <= term since the series alternates with
            // strictly decreasing magnitudes.
            return RatInterval::new(&sum - &term, &sum + &term).round_out(bits);
        }
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power *= &x2;
        k += 1;
    }
}

/// sin(y) for an interval y within [0, 0.8], via the alternating Taylor
/// series evaluated in interval arithmetic. Valid because the term magnitudes
/// decrease from the first term on this range.
fn sin_series(y: &RatInterval, bits: u32) -> RatInterval {
    debug_assert!(!y.lo().is_negative());
    let work = bits + 8;
    let y2 = y.mul(y).round_out(work);
    let eps = pow2(-((bits + 4) as i64));
    let mut sum = RatInterval::point(BigRational::zero());
    let mut power = y.clone(); // y^(2k+1)
    let mut factorial = BigInt::one(); // (2k+1)!
    let mut k: u64 = 0;
    loop {
        let denom = BigRational::from_integer(factorial.clone());
        let term = power.scale(&denom.recip());
        if term.hi() < &eps {
            // Remainder of the alternating series is bounded by the first
            // omitted term (evaluated at the largest argument).
            return sum.widen(term.hi()).round_out(bits);
        }
        if k % 2 == 0 {
            sum = sum.add(&term);
        } else {
            sum = sum.sub(&term);
        }
        sum = sum.round_out(work);
        power = power.mul(&y2).round_out(work);
        factorial *= BigInt::from((2 * k + 2) * (2 * k + 3));
        k += 1;
    }
}

/// cos(y) for an interval y within [0, 0.8].
fn cos_series(y: &RatInterval, bits: u32) -> RatInterval {
    debug_assert!(!y.lo().is_negative());
    let work = bits + 8;
    let y2 = y.mul(y).round_out(work);
    let eps = pow2(-((bits + 4) as i64));
    let mut sum = RatInterval::point(BigRational::zero());
    let mut power = RatInterval::point(BigRational::one()); // y^(2k)
    let mut factorial = BigInt::one(); // (2k)!
    let mut k: u64 = 0;
    loop {
        let denom = BigRational::from_integer(factorial.clone());
        let term = power.scale(&denom.recip());
        if term.hi() < &eps {
            return sum.widen(term.hi()).round_out(bits);
        }
        if k % 2 == 0 {
            sum = sum.add(&term);
        } else {
            sum = sum.sub(&term);
        }
        sum = sum.round_out(work);
        power = power.mul(&y2).round_out(work);
        factorial *= BigInt::from((2 * k + 1) * (2 * k + 2));
        k += 1;
    }
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// Certified enclosure of sin(pi*t) for an exact rational t in [0, 1/2].
///
/// Exact at t in {0, 1/6, 1/2}; elsewhere the argument is folded so the
/// series always runs on [0, pi/4], where both series alternate with
/// decreasing terms and no monotonicity edge cases arise.
pub fn sin_pi(t: &BigRational, bits: u32) -> RatInterval {
    assert!(
        !t.is_negative() && *t <= half(),
        "sin_pi argument must lie in [0, 1/2]"
    );
    if t.is_zero() {
        return RatInterval::point(BigRational::zero());
    }
    if *t == BigRational::new(BigInt::one(), BigInt::from(6)) {
        return RatInterval::point(half());
    }
    if *t == half() {
        return RatInterval::point(BigRational::one());
    }
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    let pi_enc = pi(bits + 8);
    if *t <= quarter {
        sin_series(&pi_enc.scale(t).round_out(bits + 8), bits)
    } else {
        // sin(pi*t) = cos(pi*(1/2 - t)) with 1/2 - t in [0, 1/4).
        let u = half() - t;
        cos_series(&pi_enc.scale(&u).round_out(bits + 8), bits)
    }
}

/// Monotone extension of `sin_pi` to a rational subinterval of [0, 1/2].
pub fn sin_pi_interval(t: &RatInterval, bits: u32) -> RatInterval {
    // sin(pi*t) is increasing on [0, 1/2].
    let lo = sin_pi(t.lo(), bits);
    let hi = sin_pi(t.hi(), bits);
    RatInterval::new(lo.lo().clone(), hi.hi().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn pi_matches_f64() {
        // The f64 constant is itself ~1e-16 off, so compare with that slack.
        let enc = pi(64);
        let mid = (enc.lo() + enc.hi()).to_f64().unwrap() / 2.0;
        assert!((mid - std::f64::consts::PI).abs() < 1e-12);
        assert!(enc.width() < pow2(-60));
    }

    #[test]
    fn sin_pi_exact_points() {
        assert_eq!(sin_pi(&rat(0, 1), 64), RatInterval::point(rat(0, 1)));
        assert_eq!(sin_pi(&rat(1, 6), 64), RatInterval::point(rat(1, 2)));
        assert_eq!(sin_pi(&rat(1, 2), 64), RatInterval::point(rat(1, 1)));
    }

    #[test]
    fn sin_pi_tracks_f64_oracle() {
        // Independent spot check against the libm sine.
        for (n, d) in [(1i64, 4i64), (1, 3), (1, 5), (2, 5), (3, 8), (7, 16), (99, 200), (1, 1000)] {
            let t = rat(n, d);
            let enc = sin_pi(&t, 64);
            let oracle = (std::f64::consts::PI * (n as f64) / (d as f64)).sin();
            let lo = enc.lo().to_f64().unwrap();
            let hi = enc.hi().to_f64().unwrap();
            assert!(
                lo - 1e-9 <= oracle && oracle <= hi + 1e-9,
                "sin(pi*{n}/{d}) = {oracle} outside [{lo}, {hi}]"
            );
            assert!(enc.width() < pow2(-50), "enclosure too wide for {n}/{d}");
        }
    }

    #[test]
    fn sin_pi_refinement_nests() {
        let t = rat(3, 7);
        let coarse = sin_pi(&t, 32);
        let fine = sin_pi(&t, 128);
        assert!(coarse.lo() <= fine.lo() && fine.hi() <= coarse.hi());
    }

    proptest! {
        #[test]
        fn sin_pi_monotone_on_half_band(a in 0u64..5000, b in 0u64..5000) {
            let (a, b) = (a.min(b), a.max(b));
            let ta = BigRational::new(BigInt::from(a), BigInt::from(10000));
            let tb = BigRational::new(BigInt::from(b), BigInt::from(10000));
            let ea = sin_pi(&ta, 80);
            let eb = sin_pi(&tb, 80);
            // Increasing: the enclosure of the smaller argument cannot sit
            // strictly above the enclosure of the larger one.
            prop_assert!(ea.lo() <= eb.hi());
        }

        #[test]
        fn chord_subadditivity_bridge(a in 0u64..=5000, b in 0u64..=5000, c in 0u64..=5000) {
            // For norms a <= b + c in [0, 1/2], the chord 2*sin(pi*norm) is
            // subadditive as well; checked here through enclosures with an
            // outward slack so exact ties cannot trip the assertion.
            let denom = BigInt::from(10000);
            let ra = BigRational::new(BigInt::from(a), denom.clone());
            let rb = BigRational::new(BigInt::from(b), denom.clone());
            let rc = BigRational::new(BigInt::from(c), denom);
            if ra <= &rb + &rc {
                let ea = sin_pi(&ra, 80);
                let eb = sin_pi(&rb, 80);
                let ec = sin_pi(&rc, 80);
                let allowance = (eb.hi() + ec.hi()) + pow2(-70);
                prop_assert!(*ea.lo() <= allowance);
            }
        }
    }
}
