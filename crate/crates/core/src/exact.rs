//! Exact integers and rationals.
//!
//! [`Int`] is an unbounded signed integer. [`Rat`] is always kept in lowest
//! terms with a strictly positive denominator, so structural equality is value
//! equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;

/// Parses a decimal integer with an optional leading `-`.
pub fn parse_int(s: &str) -> Result<Int> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a decimal integer: `{s}`")));
    }
    Int::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

/// Approximate number of decimal digits of `|n|`, from its bit length.
pub fn decimal_digits(n: &Int) -> u64 {
    digits_from_bits(n.bits())
}

pub(crate) fn digits_from_bits(bits: u64) -> u64 {
    (bits as f64 * std::f64::consts::LOG10_2).ceil() as u64
}

/// Natural logarithm of a positive integer, accurate to about 1e-15 relative.
pub fn ln_int(n: &Int) -> f64 {
    debug_assert!(n.is_positive());
    let bits = n.bits();
    if bits <= 64 {
        let (_, digits) = n.to_u64_digits();
        return (digits[0] as f64).ln();
    }
    let shift = bits - 64;
    let top: Int = n >> shift;
    let (_, digits) = top.to_u64_digits();
    (digits[0] as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rat {
    num: Int,
    den: Int,
}

impl Rat {
    pub fn new(num: Int, den: Int) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(mut num: Int, mut den: Int) -> Self {
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let g = num.gcd(&den);
        if !g.is_one() {
            num /= &g;
            den /= &g;
        }
        Rat { num, den }
    }

    pub fn zero() -> Self {
        Rat { num: Int::zero(), den: Int::one() }
    }

    pub fn from_int(n: Int) -> Self {
        Rat { num: n, den: Int::one() }
    }

    /// Exact value of a finite double.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mantissa, exp) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        let m = Int::from(mantissa) * sign;
        Some(if exp >= 0 {
            Self::from_int(m << exp as usize)
        } else {
            Self::normalize(m, Int::one() << (-exp) as usize)
        })
    }

    pub fn numer(&self) -> &Int {
        &self.num
    }

    pub fn denom(&self) -> &Int {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn floor(&self) -> Int {
        self.num.div_floor(&self.den)
    }

    pub fn ceil(&self) -> Int {
        -((-&self.num).div_floor(&self.den))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn to_f64(&self) -> f64 {
        if self.num.is_zero() {
            return 0.0;
        }
        let sign = if self.num.is_negative() { -1.0 } else { 1.0 };
        let (mn, en) = top_bits(&self.num.abs());
        let (md, ed) = top_bits(&self.den);
        let exp = en - ed;
        // split the power to avoid premature overflow of 2^exp
        let half = (exp / 2) as i32;
        sign * (mn / md) * 2f64.powi(half) * 2f64.powi(exp as i32 - half)
    }
}

/// `n ~ mantissa * 2^exp` with the mantissa carrying the top 64 bits.
fn top_bits(n: &Int) -> (f64, i64) {
    let bits = n.bits();
    let shift = bits.saturating_sub(64);
    let top: Int = n >> shift;
    let (_, digits) = top.to_u64_digits();
    (digits.first().copied().unwrap_or(0) as f64, shift as i64)
}

impl From<Int> for Rat {
    fn from(n: Int) -> Self {
        Rat::from_int(n)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(Int::from(n))
    }
}

impl Add for &Rat {
    type Output = Rat;
    fn add(self, rhs: &Rat) -> Rat {
        if self.den == rhs.den {
            return Rat::normalize(&self.num + &rhs.num, self.den.clone());
        }
        Rat::normalize(&self.num * &rhs.den + &rhs.num * &self.den, &self.den * &rhs.den)
    }
}

impl Sub for &Rat {
    type Output = Rat;
    fn sub(self, rhs: &Rat) -> Rat {
        self + &(-rhs)
    }
}

impl Mul for &Rat {
    type Output = Rat;
    fn mul(self, rhs: &Rat) -> Rat {
        Rat::normalize(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat { num: -self.num, den: self.den }
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Rat {
    type Err = Error;

    /// Accepts `p/q` or a bare integer `p`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('/') {
            Some((p, q)) => Rat::new(parse_int(p)?, parse_int(q)?),
            None => Ok(Rat::from_int(parse_int(s)?)),
        }
    }
}
