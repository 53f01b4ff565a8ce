//! Finite regular continued fractions `[a0; a1, ..., an]`.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{parse_int, Int, Rat};

/// The fractional part `(a1, ..., an)` of a continued fraction.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Int>);

impl Word {
    pub fn new(entries: Vec<Int>) -> Self {
        Word(entries)
    }

    pub fn into_vec(self) -> Vec<Int> {
        self.0
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().cloned().collect())
    }

    /// `(a1, ..., a(n-1), an - 1, 1)`, which denotes the same tail value.
    pub fn tilde(&self) -> Result<Word> {
        let (last, init) = self.0.split_last().ok_or(Error::EmptyWord)?;
        let mut out = Vec::with_capacity(self.0.len() + 1);
        out.extend_from_slice(init);
        out.push(last - 1);
        out.push(Int::one());
        Ok(Word(out))
    }
}

impl Deref for Word {
    type Target = [Int];
    fn deref(&self) -> &[Int] {
        &self.0
    }
}

impl From<Vec<Int>> for Word {
    fn from(v: Vec<Int>) -> Self {
        Word(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    pub a0: Int,
    pub word: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Convergent {
    pub index: i64,
    #[serde(with = "crate::serde_int")]
    pub p: Int,
    #[serde(with = "crate::serde_int")]
    pub q: Int,
}

impl ContinuedFraction {
    /// Builds a continued fraction whose word entries are all positive.
    pub fn new(a0: Int, word: Vec<Int>) -> Result<Self> {
        if let Some(bad) = word.iter().position(|a| !a.is_positive()) {
            return Err(Error::MalformedWord(format!(
                "partial quotient a{} = {} is not positive",
                bad + 1,
                word[bad]
            )));
        }
        Ok(ContinuedFraction { a0, word: Word(word) })
    }

    pub fn integer(a0: Int) -> Self {
        ContinuedFraction { a0, word: Word::default() }
    }

    pub fn from_i64s(a0: i64, word: &[i64]) -> Result<Self> {
        Self::new(a0.into(), word.iter().map(|&a| Int::from(a)).collect())
    }

    /// Length of the word; the integer part is not counted.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Euclidean expansion. The last partial quotient exceeds 1 whenever the
    /// word is non-empty.
    pub fn from_rational(r: &Rat) -> Self {
        let mut num = r.numer().clone();
        let mut den = r.denom().clone();
        let (a0, rem) = num.div_mod_floor(&den);
        let mut word = Vec::new();
        num = den;
        den = rem;
        while !den.is_zero() {
            let (a, rem) = num.div_rem(&den);
            word.push(a);
            num = den;
            den = rem;
        }
        ContinuedFraction { a0, word: Word(word) }
    }

    /// Convergents `p_j/q_j` for `j = -2, -1, 0, ..., len`.
    pub fn convergents(&self) -> Vec<Convergent> {
        let mut out = Vec::with_capacity(self.len() + 3);
        out.push(Convergent { index: -2, p: Int::zero(), q: Int::one() });
        out.push(Convergent { index: -1, p: Int::one(), q: Int::zero() });
        let (mut p_prev, mut q_prev) = (Int::zero(), Int::one());
        let (mut p, mut q) = (Int::one(), Int::zero());
        for (i, a) in std::iter::once(&self.a0).chain(self.word.iter()).enumerate() {
            let p_next = a * &p + &p_prev;
            let q_next = a * &q + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
            out.push(Convergent { index: i as i64, p: p.clone(), q: q.clone() });
        }
        out
    }

    /// Denominators `q_0, ..., q_len` only; cheaper than full convergents.
    pub fn denominators(&self) -> Vec<Int> {
        let mut out = Vec::with_capacity(self.len() + 1);
        let (mut q_prev, mut q) = (Int::zero(), Int::one());
        out.push(q.clone());
        for a in self.word.iter() {
            let next = a * &q + &q_prev;
            q_prev = std::mem::replace(&mut q, next);
            out.push(q.clone());
        }
        out
    }

    /// Last convergent `(p_n, q_n)` via the three-term recurrence.
    pub fn last_convergent(&self) -> (Int, Int) {
        let (mut p_prev, mut q_prev) = (Int::one(), Int::zero());
        let (mut p, mut q) = (self.a0.clone(), Int::one());
        for a in self.word.iter() {
            let p_next = a * &p + &p_prev;
            let q_next = a * &q + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
        }
        (p, q)
    }

    pub fn value(&self) -> Rat {
        let (p, q) = self.last_convergent();
        Rat::new(p, q).expect("convergent denominators are positive")
    }

    /// The representation ending in an entry greater than 1, using
    /// `[.., b, 1] = [.., b + 1]`.
    pub fn canonical(&self) -> ContinuedFraction {
        let mut out = self.clone();
        if out.word.last().is_some_and(|a| a.is_one()) {
            out.word.0.pop();
            match out.word.0.last_mut() {
                Some(b) => *b += 1,
                None => out.a0 += 1,
            }
        }
        out
    }
}

/// Removes zero partial quotients by `[.., A, 0, B, ..] -> [.., A + B, ..]`.
///
/// A zero directly after `a0` merges into the integer part; a trailing zero
/// removes itself and its predecessor. When `canonical_form` is set the
/// trailing-1 rule is applied as well. Returns the result and the number of
/// zeros removed.
pub fn concatenate(a0: Int, raw: Vec<Int>, canonical_form: bool) -> Result<(ContinuedFraction, usize)> {
    let mut out: Vec<Int> = Vec::with_capacity(raw.len() + 1);
    out.push(a0);
    let mut removed = 0;
    let mut it = raw.into_iter().enumerate().peekable();
    while let Some((i, a)) = it.next() {
        if a.is_negative() {
            return Err(Error::MalformedWord(format!("negative partial quotient {a} at position {}", i + 1)));
        }
        if !a.is_zero() {
            out.push(a);
            continue;
        }
        removed += 1;
        match it.next() {
            Some((_, b)) if b.is_zero() => {
                return Err(Error::MalformedWord(format!("adjacent zeros at positions {} and {}", i + 1, i + 2)));
            }
            Some((j, b)) if b.is_negative() => {
                return Err(Error::MalformedWord(format!("negative partial quotient {b} at position {}", j + 1)));
            }
            Some((_, b)) => {
                let top = out.last_mut().expect("integer part is always present");
                *top += b;
            }
            None => {
                if out.len() < 2 {
                    return Err(Error::MalformedWord("trailing zero with empty word has no finite value".into()));
                }
                out.pop();
            }
        }
    }
    let mut it = out.into_iter();
    let a0 = it.next().expect("integer part is always present");
    let cf = ContinuedFraction { a0, word: Word(it.collect()) };
    Ok((if canonical_form { cf.canonical() } else { cf }, removed))
}

pub fn canonicalize(cf_raw: &ContinuedFraction) -> Result<ContinuedFraction> {
    concatenate(cf_raw.a0.clone(), cf_raw.word.to_vec(), true).map(|(cf, _)| cf)
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.a0)?;
        for (i, a) in self.word.iter().enumerate() {
            f.write_str(if i == 0 { ";" } else { "," })?;
            write!(f, "{a}")?;
        }
        f.write_str("]")
    }
}

/// Parses `[a0]` or `[a0;a1,...,an]`. Entries may be zero or negative here;
/// callers decide whether the word is acceptable.
pub fn parse_raw(s: &str) -> Result<(Int, Vec<Int>)> {
    let inner = s
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("continued fraction must be bracketed: `{s}`")))?;
    let (head, tail) = match inner.split_once(';') {
        Some((h, t)) => (h, Some(t)),
        None => (inner, None),
    };
    let a0 = parse_int(head)?;
    let word = match tail {
        None => Vec::new(),
        Some(t) => t.split(',').map(parse_int).collect::<Result<_>>()?,
    };
    Ok((a0, word))
}

impl Serialize for ContinuedFraction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// First index `j >= -1` at which `p_j q_(j-1) - p_(j-1) q_j != (-1)^(j-1)`.
pub fn determinant_failure(cf: &ContinuedFraction) -> Option<i64> {
    let conv = cf.convergents();
    conv.windows(2).find_map(|pair| {
        let (prev, cur) = (&pair[0], &pair[1]);
        let det = &cur.p * &prev.q - &prev.p * &cur.q;
        let expected = if (cur.index - 1).rem_euclid(2) == 0 { Int::one() } else { -Int::one() };
        (det != expected).then_some(cur.index)
    })
}

impl FromStr for ContinuedFraction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (a0, word) = parse_raw(s)?;
        ContinuedFraction::new(a0, word)
    }
}
