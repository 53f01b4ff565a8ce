//! The folding maps
//!
//! ```text
//! phi_z(+1): [a0; a] -> [a0; a, z-1, rev(tilde(a))]
//! phi_z(-1): [a0; a] -> [a0; tilde(a), z-1, rev(a)]
//! ```
//!
//! If `p/q` is the value of `[a0; a]` with `|a| = n`, the folded fraction has
//! value `p/q + sign * (-1)^n / (z q^2)`. Zero partial quotients (from `z = 1`
//! or a trailing 1 in `a`) are concatenated away immediately.

use num_traits::{One, Signed};
use serde::Serialize;

use crate::cf::{concatenate, ContinuedFraction};
use crate::error::{Error, Result};
use crate::exact::{Int, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Sign {
    pub fn from_i8(s: i8) -> Option<Sign> {
        match s {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// `self * (-1)^n`
    pub fn times_parity(self, n: usize) -> Sign {
        if n % 2 == 0 {
            self
        } else {
            self.flip()
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Sign> {
        match s {
            "+1" | "1" | "+" => Ok(Sign::Plus),
            "-1" | "-" => Ok(Sign::Minus),
            _ => Err(Error::Parse(format!("sign must be +1 or -1, got `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FoldStep {
    #[serde(with = "crate::serde_int")]
    pub z: Int,
    pub sign: Sign,
    pub concatenations_applied: usize,
    pub length_before: usize,
    pub length_after: usize,
    /// Word before zeros were concatenated away.
    #[serde(serialize_with = "crate::serde_int::serialize_vec")]
    pub raw_word: Vec<Int>,
}

fn check_z(z: &Int) -> Result<()> {
    if z.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidZ(z.to_string()))
    }
}

pub fn fold(cf: &ContinuedFraction, z: &Int, sign: Sign) -> Result<(ContinuedFraction, FoldStep)> {
    check_z(z)?;
    let n = cf.len();
    if n == 0 {
        return Err(Error::EmptyWord);
    }
    let tilde = cf.word.tilde()?;
    let mut raw = Vec::with_capacity(2 * n + 2);
    match sign {
        Sign::Plus => {
            raw.extend_from_slice(&cf.word);
            raw.push(z - 1);
            raw.extend(tilde.iter().rev().cloned());
        }
        Sign::Minus => {
            raw.extend_from_slice(&tilde);
            raw.push(z - 1);
            raw.extend(cf.word.iter().rev().cloned());
        }
    }
    finish(cf.a0.clone(), raw, z, sign, n)
}

/// Folding an integer `[a0]`, the word-free case:
/// `+1` gives `[a0; z-1, 1] = a0 + 1/z`, `-1` gives `[a0-1; 1, z-1] = a0 - 1/z`.
pub fn fold_integer(a0: &Int, z: &Int, sign: Sign) -> Result<(ContinuedFraction, FoldStep)> {
    check_z(z)?;
    let (head, raw) = match sign {
        Sign::Plus => (a0.clone(), vec![z - 1, Int::one()]),
        Sign::Minus => (a0 - 1, vec![Int::one(), z - 1]),
    };
    finish(head, raw, z, sign, 0)
}

fn finish(a0: Int, raw: Vec<Int>, z: &Int, sign: Sign, length_before: usize) -> Result<(ContinuedFraction, FoldStep)> {
    let (out, zeros) = concatenate(a0, raw.clone(), false)?;
    let step = FoldStep {
        z: z.clone(),
        sign,
        concatenations_applied: zeros,
        length_before,
        length_after: out.len(),
        raw_word: raw,
    };
    debug_assert_eq!(step.length_after, 2 * length_before + 2 - 2 * zeros);
    Ok((out, step))
}

/// Checks `value(fold(cf)) - value(cf) == sign * (-1)^n / (z q_n^2)` exactly.
pub fn folding_lemma_check(cf: &ContinuedFraction, z: &Int, sign: Sign) -> bool {
    let folded = if cf.is_empty() { fold_integer(&cf.a0, z, sign) } else { fold(cf, z, sign) };
    let Ok((folded, _)) = folded else {
        return false;
    };
    let (_, q) = cf.last_convergent();
    let mut increment = Rat::new(Int::one(), z * &q * &q).expect("z and q are positive");
    if sign.times_parity(cf.len()) == Sign::Minus {
        increment = -increment;
    }
    folded.value() - cf.value() == increment
}
