//! Dyadic interval arithmetic with directed rounding.
//!
//! An [`Interval`] at precision `w` is a pair of integers `lo <= hi`
//! standing for the real interval `[lo / 2^w, hi / 2^w]`. Every operation
//! rounds the lower end down and the upper end up, so the true value of a
//! computation is always enclosed. Point intervals stay points as long as
//! the results are exactly representable.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exact::{Int, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Int,
    pub hi: Int,
    pub prec: u32,
}

fn shr_floor(x: &Int, k: u64) -> Int {
    // arithmetic shift on BigInt rounds toward negative infinity
    x >> k
}

fn shr_ceil(x: &Int, k: u64) -> Int {
    -((-x) >> k)
}

fn div_floor(a: &Int, b: &Int) -> Int {
    a.div_floor(b)
}

fn div_ceil(a: &Int, b: &Int) -> Int {
    -((-a).div_floor(b))
}

impl Interval {
    pub fn point(scaled: Int, prec: u32) -> Self {
        Interval { lo: scaled.clone(), hi: scaled, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Self::point(Int::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::point(Int::one() << prec, prec)
    }

    pub fn from_int(n: &Int, prec: u32) -> Self {
        Self::point(n << prec, prec)
    }

    /// Tightest enclosure of a rational at this precision.
    pub fn from_rat(r: &Rat, prec: u32) -> Self {
        let scaled = r.numer() << prec;
        Interval { lo: div_floor(&scaled, r.denom()), hi: div_ceil(&scaled, r.denom()), prec }
    }

    pub fn from_f64(x: f64, prec: u32) -> Option<Self> {
        Rat::from_f64(x).map(|r| Self::from_rat(&r, prec))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn add(&self, other: &Interval) -> Interval {
        debug_assert_eq!(self.prec, other.prec);
        Interval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi, prec: self.prec }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        debug_assert_eq!(self.prec, other.prec);
        let w = self.prec as u64;
        let products = [&self.lo * &other.lo, &self.lo * &other.hi, &self.hi * &other.lo, &self.hi * &other.hi];
        let min = products.iter().min().unwrap();
        let max = products.iter().max().unwrap();
        Interval { lo: shr_floor(min, w), hi: shr_ceil(max, w), prec: self.prec }
    }

    /// Multiplication by an exact integer.
    pub fn scale(&self, k: &Int) -> Interval {
        let (a, b) = (&self.lo * k, &self.hi * k);
        if k.is_negative() {
            Interval { lo: b, hi: a, prec: self.prec }
        } else {
            Interval { lo: a, hi: b, prec: self.prec }
        }
    }

    pub fn pow(&self, mut e: u64) -> Interval {
        let mut base = self.clone();
        let mut acc = Interval::one(self.prec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Re-expresses the enclosure at a lower precision.
    pub fn with_prec(&self, prec: u32) -> Interval {
        if prec >= self.prec {
            let k = (prec - self.prec) as usize;
            return Interval { lo: &self.lo << k, hi: &self.hi << k, prec };
        }
        let k = (self.prec - prec) as u64;
        Interval { lo: shr_floor(&self.lo, k), hi: shr_ceil(&self.hi, k), prec }
    }

    pub fn floor_lo(&self) -> Int {
        shr_floor(&self.lo, self.prec as u64)
    }

    pub fn ceil_lo(&self) -> Int {
        shr_ceil(&self.lo, self.prec as u64)
    }

    pub fn ceil_hi(&self) -> Int {
        shr_ceil(&self.hi, self.prec as u64)
    }

    /// `ceil(x)` for every `x` in the interval, if they all agree.
    pub fn certified_ceil(&self) -> Option<Int> {
        let (a, b) = (self.ceil_lo(), self.ceil_hi());
        (a == b).then_some(a)
    }

    pub fn midpoint_f64(&self) -> f64 {
        let r = Rat::new(&self.lo + &self.hi, Int::one() << (self.prec + 1)).unwrap();
        r.to_f64()
    }
}

/// Enclosure of `2 * atanh(t)` for rational `0 <= t <= 1/3`.
fn two_atanh(t: &Rat, w: u32) -> Interval {
    debug_assert!(!t.numer().is_negative());
    let t = Interval::from_rat(t, w);
    let t2 = t.mul(&t);
    let ulp_tail = Int::from(4);
    let mut sum_lo = Int::zero();
    let mut sum_hi = Int::zero();
    let mut pow_lo = t.lo.clone();
    let mut pow_hi = t.hi.clone();
    let mut k = 1u64;
    loop {
        let d = Int::from(k);
        sum_lo += div_floor(&pow_lo, &d);
        sum_hi += div_ceil(&pow_hi, &d);
        pow_lo = shr_floor(&(&pow_lo * &t2.lo), w as u64);
        pow_hi = shr_ceil(&(&pow_hi * &t2.hi), w as u64);
        k += 2;
        // remaining terms sum to at most pow_hi / k * 1/(1 - t^2) <= 9/8 pow_hi
        if pow_hi <= Int::one() {
            sum_hi += &ulp_tail;
            break;
        }
    }
    Interval { lo: sum_lo << 1, hi: sum_hi << 1, prec: w }
}

pub fn ln2(w: u32) -> Interval {
    two_atanh(&Rat::new(1.into(), 3.into()).unwrap(), w)
}

/// Enclosure of `ln(n)` for a positive integer.
pub fn ln_int(n: &Int, w: u32) -> Interval {
    assert!(n.is_positive(), "logarithm of a non-positive integer");
    if n.is_one() {
        return Interval::zero(w);
    }
    // n = 2^k * y with 1 <= y < 2; ln y = 2 atanh((n - 2^k) / (n + 2^k))
    let k = n.bits() - 1;
    let pow = Int::one() << k;
    let t = Rat::new(n - &pow, n + &pow).unwrap();
    let ln_y = two_atanh(&t, w);
    ln2(w).scale(&Int::from(k)).add(&ln_y)
}

/// Lower (`upper = false`) or upper bound of `exp(x)` for a scaled point
/// `x >= 0` at precision `w`.
fn exp_bound(x: &Int, w: u32, upper: bool) -> Int {
    debug_assert!(!x.is_negative());
    if x.is_zero() {
        return Int::one() << w;
    }
    // y = x / 2^s <= 1/2
    let s = (x.bits() + 1).saturating_sub(w as u64);
    let guard = s as u32 + 16;
    let wp = w + guard;
    let scaled = x << guard as usize;
    let y = if upper { shr_ceil(&scaled, s) } else { shr_floor(&scaled, s) };
    let round = |v: &Int, k: u64| if upper { shr_ceil(v, k) } else { shr_floor(v, k) };
    let one = Int::one() << wp;
    let mut sum = one.clone();
    let mut term = one;
    let mut i = 1u64;
    loop {
        let prod = &term * &y;
        let d = Int::from(i) << wp;
        term = if upper { div_ceil(&prod, &d) } else { div_floor(&prod, &d) };
        if term.is_zero() {
            break;
        }
        sum += &term;
        i += 1;
        if upper && term <= Int::one() {
            // geometric tail with ratio y/(i) <= 1/2
            sum += Int::from(2);
            break;
        }
    }
    for _ in 0..s {
        sum = round(&(&sum * &sum), wp as u64);
    }
    round(&sum, guard as u64)
}

/// Enclosure of `exp(x)` for a non-negative interval.
pub fn exp(x: &Interval) -> Interval {
    assert!(!x.lo.is_negative(), "exp is only implemented for non-negative arguments");
    if x.is_point() && x.lo.is_zero() {
        return Interval::one(x.prec);
    }
    Interval { lo: exp_bound(&x.lo, x.prec, false), hi: exp_bound(&x.hi, x.prec, true), prec: x.prec }
}
