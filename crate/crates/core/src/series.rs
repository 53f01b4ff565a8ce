//! Integer sequences of strong Engel series and their partial sums.
//!
//! Every family produces `x_1 = u_1`, `x_(j+1) = x_j * v_j * u_(j+1)` and the
//! ratios `z_1 = x_1`, `z_(j+1) = x_(j+1) / x_j^2`. Recurrence variants also
//! carry `rho_1 = m`, `rho_(n+1) = alpha_n * rho_n`, and every `z` is computed
//! both directly and from its closed form; the two must agree.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{digits_from_bits, ln_int, parse_int, Int, Rat};
use crate::fold::Sign;
use crate::interval::{self, Interval};

pub const DEFAULT_DIGIT_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// `u_(n+2) u_n = alpha_n u_(n+1)^3 v_(n+1)`, `u_2 = m u_1^2 v_1`
    EngelA,
    /// `u_(n+2) = alpha_n u_(n+1)^2 v_n`, `u_2 = m u_1`
    EngelB,
    LurothA,
    LurothB,
    AltLurothA,
    AltLurothB,
    /// `u_n = beta_n prod u_k`, `v_n = gamma_n prod v_k`
    IndependentUV,
    ExplicitX,
}

/// Which of the two second-order recurrences a variant follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    A,
    B,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::EngelA,
        Variant::EngelB,
        Variant::LurothA,
        Variant::LurothB,
        Variant::AltLurothA,
        Variant::AltLurothB,
        Variant::IndependentUV,
        Variant::ExplicitX,
    ];

    pub fn family(self) -> Option<Family> {
        match self {
            Variant::EngelA | Variant::LurothA | Variant::AltLurothA => Some(Family::A),
            Variant::EngelB | Variant::LurothB | Variant::AltLurothB => Some(Family::B),
            Variant::IndependentUV | Variant::ExplicitX => None,
        }
    }

    pub fn is_luroth(self) -> bool {
        matches!(self, Variant::LurothA | Variant::LurothB | Variant::AltLurothA | Variant::AltLurothB)
    }

    fn name(self) -> &'static str {
        match self {
            Variant::EngelA => "EngelA",
            Variant::EngelB => "EngelB",
            Variant::LurothA => "LurothA",
            Variant::LurothB => "LurothB",
            Variant::AltLurothA => "AltLurothA",
            Variant::AltLurothB => "AltLurothB",
            Variant::IndependentUV => "IndependentUV",
            Variant::ExplicitX => "ExplicitX",
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// An integer sequence indexed from some first index.
#[derive(Clone, Debug, PartialEq)]
pub enum IntSource {
    /// Values repeated cyclically.
    Const(Vec<Int>),
    /// `n -> n`
    Index,
}

impl IntSource {
    fn at(&self, n: usize, first: usize) -> Int {
        match self {
            IntSource::Const(list) => list[(n - first) % list.len()].clone(),
            IntSource::Index => Int::from(n),
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        match self {
            IntSource::Const(list) if list.is_empty() => Err(Error::InvalidSpec(format!("{what} list is empty"))),
            IntSource::Const(list) if list.iter().any(|a| !a.is_positive()) => {
                Err(Error::InvalidSpec(format!("{what} values must be positive")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyTerm {
    pub c: f64,
    pub r: f64,
    pub s: f64,
}

/// `alpha_n = ceil(exp(C nu^n) * sum c_ij X^r_i Y^s_j)` with `X = u_n`,
/// `Y = u_(n+1)`. The terms must cover the full grid of distinct `r` and `s`
/// exponents.
#[derive(Clone, Debug, PartialEq)]
pub struct MuParams {
    pub c: f64,
    pub nu: f64,
    pub terms: Vec<PolyTerm>,
}

impl MuParams {
    /// `P = 1`, no exponential factor.
    pub fn constant_one() -> Self {
        MuParams { c: 0.0, nu: 1.0, terms: vec![PolyTerm { c: 1.0, r: 0.0, s: 0.0 }] }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(format!("pseudo-polynomial: {m}")));
        if !(self.c.is_finite() && self.c >= 0.0) {
            return bad("C must be a finite non-negative real");
        }
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return bad("nu must be a finite positive real");
        }
        if self.terms.is_empty() {
            return bad("no terms");
        }
        for t in &self.terms {
            if !(t.c.is_finite() && t.c > 0.0) {
                return bad("coefficients must be positive");
            }
            if !(t.r.is_finite() && t.r >= 0.0 && t.s.is_finite() && t.s >= 0.0) {
                return bad("exponents must be non-negative reals");
            }
        }
        let (rs, ss) = (self.r_exponents(), self.s_exponents());
        if rs.len() * ss.len() != self.terms.len() {
            return bad("terms must form the full grid of r and s exponents, each pair once");
        }
        for r in &rs {
            for s in &ss {
                if !self.terms.iter().any(|t| t.r == *r && t.s == *s) {
                    return bad("terms must form the full grid of r and s exponents, each pair once");
                }
            }
        }
        Ok(())
    }

    fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }

    pub fn r_exponents(&self) -> Vec<f64> {
        Self::sorted_unique(self.terms.iter().map(|t| t.r).collect())
    }

    pub fn s_exponents(&self) -> Vec<f64> {
        Self::sorted_unique(self.terms.iter().map(|t| t.s).collect())
    }

    /// Largest exponents `(r_M, s_N)`.
    pub fn leading_exponents(&self) -> (f64, f64) {
        (
            self.terms.iter().map(|t| t.r).fold(0.0, f64::max),
            self.terms.iter().map(|t| t.s).fold(0.0, f64::max),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlphaSource {
    Const(Vec<Int>),
    Pseudo(MuParams),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SignSeq {
    Plus,
    /// `eps_n = (-1)^(n-1)`
    Alternating,
    /// `eps_1, eps_2, ...`; must cover every index that is used.
    List(Vec<Sign>),
    /// `eps_n = pattern[(n-1) mod len]`
    Period(Vec<Sign>),
}

impl SignSeq {
    pub fn sign(&self, n: usize) -> Result<Sign> {
        assert!(n >= 1);
        match self {
            SignSeq::Plus => Ok(Sign::Plus),
            SignSeq::Alternating => Ok(Sign::Plus.times_parity(n - 1)),
            SignSeq::List(list) => list
                .get(n - 1)
                .copied()
                .ok_or_else(|| Error::InvalidSpec(format!("sign list has {} entries, eps_{n} requested", list.len()))),
            SignSeq::Period(p) => Ok(p[(n - 1) % p.len()]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesSpec {
    pub variant: Variant,
    pub u1: Int,
    pub m: Int,
    pub alpha: AlphaSource,
    /// `v_n` for the general Engel variants, indexed from 1.
    pub v: IntSource,
    /// `v_1` for [`Variant::IndependentUV`].
    pub v1: Int,
    /// `beta_n`, `gamma_n` for [`Variant::IndependentUV`], indexed from 2.
    pub beta: IntSource,
    pub gamma: IntSource,
    pub signs: SignSeq,
    /// `p/q` with `q = x_1`; defaults to `eps_1 / x_1`.
    pub prefix: Option<Rat>,
    pub x_list: Vec<Int>,
}

impl SeriesSpec {
    pub fn new(variant: Variant, u1: i64) -> Self {
        SeriesSpec {
            variant,
            u1: Int::from(u1),
            m: Int::one(),
            alpha: AlphaSource::Const(vec![Int::one()]),
            v: IntSource::Const(vec![Int::one()]),
            v1: Int::one(),
            beta: IntSource::Index,
            gamma: IntSource::Const(vec![Int::one()]),
            signs: SignSeq::Plus,
            prefix: None,
            x_list: Vec::new(),
        }
    }

    pub fn explicit(x_list: Vec<Int>) -> Self {
        let mut spec = Self::new(Variant::ExplicitX, 1);
        spec.u1 = x_list.first().cloned().unwrap_or_else(Int::one);
        spec.x_list = x_list;
        spec
    }

    pub fn with_signs(mut self, signs: SignSeq) -> Self {
        self.signs = signs;
        self
    }

    pub fn with_m(mut self, m: i64) -> Self {
        self.m = Int::from(m);
        self
    }

    pub fn with_alpha(mut self, alpha: AlphaSource) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_prefix(mut self, prefix: Rat) -> Self {
        self.prefix = Some(prefix);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        match self.variant {
            Variant::ExplicitX => {
                if self.x_list.is_empty() {
                    return bad("ExplicitX needs a non-empty x_list".into());
                }
                if self.x_list.iter().any(|x| !x.is_positive()) {
                    return bad("x_list entries must be positive".into());
                }
            }
            Variant::IndependentUV => {
                if !self.u1.is_positive() || !self.v1.is_positive() {
                    return bad("u1 and v1 must be positive".into());
                }
                self.beta.validate("beta")?;
                self.gamma.validate("gamma")?;
            }
            v => {
                let min = if v.is_luroth() { 2 } else { 1 };
                if self.u1 < Int::from(min) {
                    return bad(format!("{v} needs u1 >= {min}"));
                }
                if !self.m.is_positive() {
                    return bad("m must be positive".into());
                }
                if matches!(v, Variant::EngelA | Variant::EngelB) {
                    self.v.validate("v")?;
                }
                match &self.alpha {
                    AlphaSource::Const(list) => IntSource::Const(list.clone()).validate("alpha")?,
                    AlphaSource::Pseudo(p) => p.validate()?,
                }
            }
        }
        match &self.signs {
            SignSeq::List(l) | SignSeq::Period(l) if l.is_empty() => bad("sign pattern is empty".into()),
            _ => Ok(()),
        }
    }

    /// The leading term `p/q`; its reduced denominator must equal `x_1`.
    pub fn resolve_prefix(&self, x1: &Int) -> Result<Rat> {
        let prefix = match &self.prefix {
            Some(p) => p.clone(),
            None => {
                let eps1 = self.signs.sign(1)?;
                Rat::new(Int::from(eps1.as_i8()), x1.clone())?
            }
        };
        if prefix.denom() != x1 {
            return Err(Error::InvalidSpec(format!("prefix {prefix} must have denominator x_1 = {x1} in lowest terms")));
        }
        Ok(prefix)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SpecFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let spec = file.into_spec()?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SpecFile::from_spec(self)).expect("spec serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesState {
    pub n: usize,
    #[serde(serialize_with = "crate::serde_int::serialize_opt", skip_serializing_if = "Option::is_none")]
    pub u: Option<Int>,
    #[serde(serialize_with = "crate::serde_int::serialize_opt", skip_serializing_if = "Option::is_none")]
    pub u_next: Option<Int>,
    #[serde(serialize_with = "crate::serde_int::serialize_opt", skip_serializing_if = "Option::is_none")]
    pub v: Option<Int>,
    #[serde(with = "crate::serde_int")]
    pub x: Int,
    #[serde(serialize_with = "crate::serde_int::serialize_opt", skip_serializing_if = "Option::is_none")]
    pub rho: Option<Int>,
    #[serde(with = "crate::serde_int")]
    pub z: Int,
    #[serde(serialize_with = "crate::serde_int::serialize_opt", skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Int>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CeilConfig {
    pub start_bits: u32,
    pub max_bits: u32,
}

impl Default for CeilConfig {
    fn default() -> Self {
        CeilConfig { start_bits: 64, max_bits: 1 << 16 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenOptions {
    pub digit_budget: u64,
    pub ceil: CeilConfig,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions { digit_budget: DEFAULT_DIGIT_BUDGET, ceil: CeilConfig::default() }
    }
}

fn guard(n: usize, bits: u64, budget: u64) -> Result<()> {
    let predicted = digits_from_bits(bits);
    if predicted > budget {
        return Err(Error::DigitBudgetExceeded { n, predicted, budget });
    }
    Ok(())
}

/// `u_(n+2)` from `u_n`, `u_(n+1)`, `v_n`, `v_(n+1)` and `alpha_n`.
pub fn step_u(family: Family, n: usize, u: &Int, u_next: &Int, v: &Int, v_next: &Int, alpha: &Int) -> Result<Int> {
    match family {
        Family::A => {
            let num = alpha * u_next * u_next * u_next * v_next;
            let (q, r) = num.div_rem(u);
            if !r.is_zero() {
                return Err(Error::DivisibilityViolation { n });
            }
            Ok(q)
        }
        Family::B => Ok(alpha * u_next * u_next * v),
    }
}

/// `z_1 = x_1`, `z_(j+1) = x_(j+1) / x_j^2`.
pub fn strong_check(x: &[Int]) -> Result<Vec<Int>> {
    let Some(first) = x.first() else {
        return Err(Error::InvalidSpec("empty x sequence".into()));
    };
    if x.iter().any(|v| !v.is_positive()) {
        return Err(Error::InvalidSpec("x values must be positive".into()));
    }
    let mut z = vec![first.clone()];
    for (j, pair) in x.windows(2).enumerate() {
        z.push(strong_ratio(&pair[0], &pair[1], j + 2)?);
    }
    Ok(z)
}

fn strong_ratio(prev: &Int, next: &Int, index: usize) -> Result<Int> {
    let (q, r) = next.div_rem(&(prev * prev));
    if !r.is_zero() {
        return Err(Error::StrongPropertyViolation { index });
    }
    Ok(q)
}

fn closed_matches(n: usize, closed: Int, direct: &Int) -> Result<()> {
    if &closed != direct {
        return Err(Error::ClosedFormMismatch { n, closed: closed.to_string(), direct: direct.to_string() });
    }
    Ok(())
}

pub fn gen_sequences(spec: &SeriesSpec, count: usize) -> Result<Vec<SeriesState>> {
    gen_sequences_with(spec, count, &GenOptions::default())
}

pub fn gen_sequences_with(spec: &SeriesSpec, count: usize, opts: &GenOptions) -> Result<Vec<SeriesState>> {
    if count == 0 {
        return Err(Error::InvalidSpec("need at least one term".into()));
    }
    spec.validate()?;
    match spec.variant {
        Variant::ExplicitX => gen_explicit(spec, count, opts),
        Variant::IndependentUV => gen_independent(spec, count, opts),
        v => gen_recurrence(spec, v.family().expect("recurrence variant"), count, opts),
    }
}

fn gen_explicit(spec: &SeriesSpec, count: usize, opts: &GenOptions) -> Result<Vec<SeriesState>> {
    if count > spec.x_list.len() {
        return Err(Error::InvalidSpec(format!("x_list has {} terms, {count} requested", spec.x_list.len())));
    }
    let xs = &spec.x_list[..count];
    for (i, x) in xs.iter().enumerate() {
        guard(i + 1, x.bits(), opts.digit_budget)?;
    }
    let zs = strong_check(xs)?;
    Ok(xs
        .iter()
        .zip(zs)
        .enumerate()
        .map(|(i, (x, z))| SeriesState { n: i + 1, u: None, u_next: None, v: None, x: x.clone(), rho: None, z, alpha: None })
        .collect())
}

fn gen_independent(spec: &SeriesSpec, count: usize, opts: &GenOptions) -> Result<Vec<SeriesState>> {
    let budget = opts.digit_budget;
    let mut u = spec.u1.clone();
    let mut v = spec.v1.clone();
    let mut prod_u = u.clone();
    let mut prod_v = v.clone();
    let mut u_next = spec.beta.at(2, 2) * &prod_u;
    let mut x = u.clone();
    let mut z = x.clone();
    let mut out = Vec::with_capacity(count);
    for n in 1..=count {
        out.push(SeriesState {
            n,
            u: Some(u.clone()),
            u_next: Some(u_next.clone()),
            v: Some(v.clone()),
            x: x.clone(),
            rho: None,
            z: z.clone(),
            alpha: None,
        });
        if n == count {
            break;
        }
        let v_next = spec.gamma.at(n + 1, 2) * &prod_v;
        guard(n + 1, x.bits() + v.bits() + u_next.bits(), budget)?;
        let x_next = &x * &v * &u_next;
        let z_next = strong_ratio(&x, &x_next, n + 1)?;
        let closed = if n == 1 { spec.beta.at(2, 2) * &spec.v1 } else { spec.beta.at(n + 1, 2) * spec.gamma.at(n, 2) };
        closed_matches(n + 1, closed, &z_next)?;

        prod_u *= &u_next;
        prod_v *= &v_next;
        guard(n + 2, prod_u.bits() + 64, budget)?;
        let u_after = spec.beta.at(n + 2, 2) * &prod_u;
        u = std::mem::replace(&mut u_next, u_after);
        v = v_next;
        x = x_next;
        z = z_next;
    }
    Ok(out)
}

fn v_of(spec: &SeriesSpec, n: usize, u: &Int) -> Int {
    match spec.variant {
        Variant::LurothA | Variant::LurothB => u - 1,
        Variant::AltLurothA | Variant::AltLurothB => u + 1,
        _ => spec.v.at(n, 1),
    }
}

fn gen_recurrence(spec: &SeriesSpec, family: Family, count: usize, opts: &GenOptions) -> Result<Vec<SeriesState>> {
    let budget = opts.digit_budget;
    let m = &spec.m;
    let mut u = spec.u1.clone();
    let mut v = v_of(spec, 1, &u);
    let mut u_next = match family {
        Family::A => m * &u * &u * &v,
        Family::B => m * &u,
    };
    let mut x = u.clone();
    let mut z = x.clone();
    let mut rho = m.clone();
    let mut out = Vec::with_capacity(count);
    for n in 1..=count {
        let alpha = alpha_at(spec, n, &u, &u_next, opts)?;
        out.push(SeriesState {
            n,
            u: Some(u.clone()),
            u_next: Some(u_next.clone()),
            v: Some(v.clone()),
            x: x.clone(),
            rho: Some(rho.clone()),
            z: z.clone(),
            alpha: Some(alpha.clone()),
        });
        if n == count {
            break;
        }
        let v_next = v_of(spec, n + 1, &u_next);
        guard(n + 1, x.bits() + v.bits() + u_next.bits(), budget)?;
        let x_next = &x * &v * &u_next;
        let z_next = strong_ratio(&x, &x_next, n + 1)?;
        let closed = match family {
            Family::A => &u * &v * &v * &rho,
            Family::B => &v * &rho,
        };
        closed_matches(n + 1, closed, &z_next)?;

        let predicted_bits = match family {
            Family::A => (alpha.bits() + 3 * u_next.bits() + v_next.bits()).saturating_sub(u.bits()) + 1,
            Family::B => alpha.bits() + 2 * u_next.bits() + v.bits(),
        };
        guard(n + 2, predicted_bits, budget)?;
        let u_after = step_u(family, n, &u, &u_next, &v, &v_next, &alpha)?;

        rho = &alpha * &rho;
        u = std::mem::replace(&mut u_next, u_after);
        v = v_next;
        x = x_next;
        z = z_next;
    }
    Ok(out)
}

fn alpha_at(spec: &SeriesSpec, n: usize, u: &Int, u_next: &Int, opts: &GenOptions) -> Result<Int> {
    match &spec.alpha {
        AlphaSource::Const(list) => Ok(list[(n - 1) % list.len()].clone()),
        AlphaSource::Pseudo(p) => alpha_eval_with(p, n, u, u_next, opts.ceil, opts.digit_budget),
    }
}

/// Exact partial sum `prefix + sum_{j=2}^{n} eps_j / x_j`.
pub fn partial_sum(spec: &SeriesSpec, n: usize) -> Result<Rat> {
    let states = gen_sequences(spec, n)?;
    partial_sum_of(spec, &states)
}

pub fn partial_sum_of(spec: &SeriesSpec, states: &[SeriesState]) -> Result<Rat> {
    let mut sum = spec.resolve_prefix(&states[0].x)?;
    for st in &states[1..] {
        let eps = spec.signs.sign(st.n)?;
        sum = &sum + &Rat::new(Int::from(eps.as_i8()), st.x.clone())?;
    }
    Ok(sum)
}

pub fn alpha_eval(p: &MuParams, n: usize, u: &Int, u_next: &Int) -> Result<Int> {
    alpha_eval_with(p, n, u, u_next, CeilConfig::default(), DEFAULT_DIGIT_BUDGET)
}

fn integral_exponent(e: f64) -> Option<u64> {
    (e.fract() == 0.0 && e <= 4096.0).then_some(e as u64)
}

/// Certified `ceil(exp(C nu^n) P(u, u_next))`.
///
/// Each term is enclosed with outward-rounded dyadic intervals, integer
/// powers exactly and real powers as `exp(r ln u)`. Precision doubles from
/// `start_bits` until the ceiling is the same at both ends of the enclosure.
pub fn alpha_eval_with(p: &MuParams, n: usize, u: &Int, u_next: &Int, cfg: CeilConfig, budget: u64) -> Result<Int> {
    p.validate()?;
    if !u.is_positive() || !u_next.is_positive() {
        return Err(Error::InvalidSpec("pseudo-polynomial arguments must be positive".into()));
    }
    let exponent = p.c * p.nu.powi(n as i32);
    let (lu, lw) = (ln_int(u), ln_int(u_next));
    let est_ln = p
        .terms
        .iter()
        .map(|t| exponent + t.c.ln() + t.r * lu + t.s * lw)
        .fold(f64::NEG_INFINITY, f64::max)
        + (p.terms.len() as f64).ln();
    let est_digits = est_ln / std::f64::consts::LN_10;
    if !est_digits.is_finite() || est_digits > budget as f64 {
        let predicted = if est_digits.is_finite() { est_digits.ceil() as u64 } else { u64::MAX };
        return Err(Error::DigitBudgetExceeded { n, predicted, budget });
    }
    let magnitude_bits = (est_ln / std::f64::consts::LN_2).max(0.0).ceil() as u32;

    let mut bits = cfg.start_bits;
    let certified = loop {
        let iv = enclose(p, n, u, u_next, bits + magnitude_bits + 32);
        if let Some(c) = iv.certified_ceil() {
            break c;
        }
        if bits >= cfg.max_bits {
            return Err(Error::PrecisionExhausted { bits });
        }
        bits = (bits * 2).min(cfg.max_bits);
    };

    let all_integral = p.c == 0.0
        && p.terms.iter().all(|t| integral_exponent(t.r).is_some() && integral_exponent(t.s).is_some() && t.c.fract() == 0.0);
    if all_integral {
        let exact: Int = p
            .terms
            .iter()
            .map(|t| {
                let c = Rat::from_f64(t.c).expect("finite").floor();
                c * num_traits::pow(u.clone(), t.r as usize) * num_traits::pow(u_next.clone(), t.s as usize)
            })
            .sum();
        if exact != certified {
            return Err(Error::CertificationMismatch { certified: certified.to_string(), exact: exact.to_string() });
        }
    }
    Ok(certified)
}

fn enclose(p: &MuParams, n: usize, u: &Int, u_next: &Int, w: u32) -> Interval {
    let common = if p.c == 0.0 {
        Interval::zero(w)
    } else {
        let c = Interval::from_f64(p.c, w).expect("finite");
        let nu = Interval::from_f64(p.nu, w).expect("finite");
        c.mul(&nu.pow(n as u64))
    };
    let mut ln_u = None;
    let mut ln_w = None;
    let mut sum = Interval::zero(w);
    for t in &p.terms {
        let mut exponent = common.clone();
        let mut exact = Interval::from_f64(t.c, w).expect("finite");
        for (e, base, cache) in [(t.r, u, &mut ln_u), (t.s, u_next, &mut ln_w)] {
            if e == 0.0 {
                continue;
            }
            match integral_exponent(e) {
                Some(k) => exact = exact.mul(&Interval::from_int(base, w).pow(k)),
                None => {
                    let ln = cache.get_or_insert_with(|| interval::ln_int(base, w));
                    exponent = exponent.add(&ln.mul(&Interval::from_f64(e, w).expect("finite")));
                }
            }
        }
        sum = sum.add(&interval::exp(&exponent).mul(&exact));
    }
    sum
}

// JSON spec files

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Str(String),
    Num(i64),
}

impl JsonInt {
    fn parse(&self) -> Result<Int> {
        match self {
            JsonInt::Str(s) => parse_int(s),
            JsonInt::Num(n) => Ok(Int::from(*n)),
        }
    }

    fn of(n: &Int) -> Self {
        JsonInt::Str(n.to_string())
    }
}

fn parse_ints(v: &[JsonInt]) -> Result<Vec<Int>> {
    v.iter().map(JsonInt::parse).collect()
}

fn ints(v: &[Int]) -> Vec<JsonInt> {
    v.iter().map(JsonInt::of).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    c: f64,
    r: f64,
    s: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PseudoJson {
    #[serde(rename = "C")]
    c: f64,
    nu: f64,
    terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum AlphaJson {
    Const(Vec<JsonInt>),
    Pseudo(PseudoJson),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SourceJson {
    Const(Vec<JsonInt>),
    Index,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SignsJson {
    Plus,
    Alternating,
    List(Vec<i8>),
    Period(Vec<i8>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    u1: Option<JsonInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<JsonInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<AlphaJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v: Option<SourceJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v1: Option<JsonInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<SourceJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<SourceJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    signs: Option<SignsJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prefix: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x_list: Option<Vec<JsonInt>>,
}

fn source_from_json(s: &SourceJson) -> Result<IntSource> {
    Ok(match s {
        SourceJson::Const(v) => IntSource::Const(parse_ints(v)?),
        SourceJson::Index => IntSource::Index,
    })
}

fn source_to_json(s: &IntSource) -> SourceJson {
    match s {
        IntSource::Const(v) => SourceJson::Const(ints(v)),
        IntSource::Index => SourceJson::Index,
    }
}

fn signs_from_json(s: &SignsJson) -> Result<SignSeq> {
    let conv = |v: &[i8]| -> Result<Vec<Sign>> {
        v.iter()
            .map(|&e| Sign::from_i8(e).ok_or_else(|| Error::InvalidSpec(format!("sign must be 1 or -1, got {e}"))))
            .collect()
    };
    Ok(match s {
        SignsJson::Plus => SignSeq::Plus,
        SignsJson::Alternating => SignSeq::Alternating,
        SignsJson::List(v) => SignSeq::List(conv(v)?),
        SignsJson::Period(v) => SignSeq::Period(conv(v)?),
    })
}

fn signs_to_json(s: &SignSeq) -> SignsJson {
    let conv = |v: &[Sign]| v.iter().map(|s| s.as_i8()).collect();
    match s {
        SignSeq::Plus => SignsJson::Plus,
        SignSeq::Alternating => SignsJson::Alternating,
        SignSeq::List(v) => SignsJson::List(conv(v)),
        SignSeq::Period(v) => SignsJson::Period(conv(v)),
    }
}

impl SpecFile {
    fn into_spec(self) -> Result<SeriesSpec> {
        let mut spec = SeriesSpec::new(self.variant, 1);
        let uses_u1 = self.variant != Variant::ExplicitX;
        match (&self.u1, uses_u1) {
            (Some(u1), _) => spec.u1 = u1.parse()?,
            (None, true) => return Err(Error::InvalidSpec(format!("{} needs u1", self.variant))),
            (None, false) => {}
        }
        if let Some(m) = &self.m {
            spec.m = m.parse()?;
        }
        if let Some(a) = &self.alpha {
            spec.alpha = match a {
                AlphaJson::Const(v) => AlphaSource::Const(parse_ints(v)?),
                AlphaJson::Pseudo(p) => AlphaSource::Pseudo(MuParams {
                    c: p.c,
                    nu: p.nu,
                    terms: p.terms.iter().map(|t| PolyTerm { c: t.c, r: t.r, s: t.s }).collect(),
                }),
            };
        }
        if let Some(v) = &self.v {
            spec.v = source_from_json(v)?;
        }
        if let Some(v1) = &self.v1 {
            spec.v1 = v1.parse()?;
        }
        if let Some(b) = &self.beta {
            spec.beta = source_from_json(b)?;
        }
        if let Some(g) = &self.gamma {
            spec.gamma = source_from_json(g)?;
        }
        if let Some(s) = &self.signs {
            spec.signs = signs_from_json(s)?;
        }
        if let Some(p) = &self.prefix {
            spec.prefix = Some(p.parse()?);
        }
        if let Some(x) = &self.x_list {
            spec.x_list = parse_ints(x)?;
            if let Some(first) = spec.x_list.first() {
                spec.u1 = first.clone();
            }
        }
        Ok(spec)
    }

    fn from_spec(spec: &SeriesSpec) -> Self {
        let v = spec.variant;
        let recurrence = v.family().is_some();
        let alpha = recurrence.then(|| match &spec.alpha {
            AlphaSource::Const(list) => AlphaJson::Const(ints(list)),
            AlphaSource::Pseudo(p) => AlphaJson::Pseudo(PseudoJson {
                c: p.c,
                nu: p.nu,
                terms: p.terms.iter().map(|t| TermJson { c: t.c, r: t.r, s: t.s }).collect(),
            }),
        });
        let independent = v == Variant::IndependentUV;
        SpecFile {
            variant: v,
            u1: (v != Variant::ExplicitX).then(|| JsonInt::of(&spec.u1)),
            m: recurrence.then(|| JsonInt::of(&spec.m)),
            alpha,
            v: matches!(v, Variant::EngelA | Variant::EngelB).then(|| source_to_json(&spec.v)),
            v1: independent.then(|| JsonInt::of(&spec.v1)),
            beta: independent.then(|| source_to_json(&spec.beta)),
            gamma: independent.then(|| source_to_json(&spec.gamma)),
            signs: Some(signs_to_json(&spec.signs)),
            prefix: spec.prefix.as_ref().map(|p| p.to_string()),
            x_list: (v == Variant::ExplicitX).then(|| ints(&spec.x_list)),
        }
    }
}

/// `x` values as integers, for tests and callers that only need them.
pub fn x_values(states: &[SeriesState]) -> Vec<Int> {
    states.iter().map(|s| s.x.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[&str]) -> Vec<Int> {
        v.iter().map(|s| s.parse().unwrap()).collect()
    }

    fn i(n: i64) -> Int {
        Int::from(n)
    }

    #[test]
    fn step_examples() {
        // LurothA, alpha = 1, (u1, u2) = (3, 18)
        let u3 = step_u(Family::A, 1, &i(3), &i(18), &i(2), &i(17), &i(1)).unwrap();
        assert_eq!(u3, i(33048));
        // AltLurothB, alpha = 1
        assert_eq!(step_u(Family::B, 1, &i(2), &i(2), &i(3), &i(3), &i(1)).unwrap(), i(12));
        assert_eq!(step_u(Family::B, 2, &i(2), &i(12), &i(3), &i(13), &i(1)).unwrap(), i(432));
        assert_eq!(step_u(Family::A, 1, &i(5), &i(18), &i(2), &i(17), &i(1)), Err(Error::DivisibilityViolation { n: 1 }));
    }

    #[test]
    fn luroth_a_example() {
        let spec = SeriesSpec::new(Variant::LurothA, 3);
        let st = gen_sequences(&spec, 4).unwrap();
        assert_eq!(x_values(&st), ints(&["3", "108", "60676128", "132875521042766180738219532288"]));
        let z: Vec<Int> = st.iter().map(|s| s.z.clone()).collect();
        assert_eq!(z, ints(&["3", "12", "5202", "36091859899032"]));
        let u: Vec<Int> = st.iter().map(|s| s.u.clone().unwrap()).collect();
        assert_eq!(u, ints(&["3", "18", "33048", "66266659938624768"]));
        assert!(st.iter().all(|s| s.rho == Some(i(1))));
    }

    #[test]
    fn alt_luroth_b_example() {
        let spec = SeriesSpec::new(Variant::AltLurothB, 2).with_signs(SignSeq::Alternating);
        let st = gen_sequences(&spec, 5).unwrap();
        assert_eq!(x_values(&st), ints(&["2", "12", "432", "2426112", "2548646416023552"]));
        for w in st.windows(2) {
            assert_eq!(w[1].z, w[0].u.clone().unwrap() + 1);
            // x_n = u_(n+1) for these seeds
            assert_eq!(Some(w[0].x.clone()), w[0].u_next);
        }
    }

    #[test]
    fn independent_uv_example() {
        let spec = SeriesSpec::new(Variant::IndependentUV, 1).with_signs(SignSeq::Alternating);
        let st = gen_sequences(&spec, 6).unwrap();
        let u: Vec<Int> = st.iter().map(|s| s.u.clone().unwrap()).collect();
        assert_eq!(u, ints(&["1", "2", "6", "48", "2880", "9953280"]));
        assert_eq!(x_values(&st), ints(&["1", "2", "12", "576", "1658880", "16511297126400"]));
        for s in &st[1..] {
            assert_eq!(s.z, Int::from(s.n));
        }
    }

    #[test]
    fn strong_check_examples() {
        assert_eq!(strong_check(&ints(&["3", "108", "60676128"])).unwrap(), ints(&["3", "12", "5202"]));
        assert_eq!(strong_check(&ints(&["2", "4", "16", "256"])).unwrap(), ints(&["2", "1", "1", "1"]));
        assert_eq!(strong_check(&ints(&["2", "6"])), Err(Error::StrongPropertyViolation { index: 2 }));
        assert!(strong_check(&[]).is_err());
    }

    #[test]
    fn partial_sums() {
        let lur = SeriesSpec::new(Variant::LurothA, 3);
        assert_eq!(partial_sum(&lur, 2).unwrap(), "37/108".parse().unwrap());
        assert_eq!(partial_sum(&lur, 1).unwrap(), "1/3".parse().unwrap());
        let alt = SeriesSpec::new(Variant::AltLurothB, 2).with_signs(SignSeq::Alternating);
        assert_eq!(partial_sum(&alt, 2).unwrap(), "5/12".parse().unwrap());
        let neg = SeriesSpec::new(Variant::LurothA, 3).with_signs(SignSeq::List(vec![Sign::Minus, Sign::Plus]));
        assert_eq!(partial_sum(&neg, 2).unwrap(), "-35/108".parse().unwrap());
        let bad = SeriesSpec::new(Variant::LurothA, 3).with_prefix("1/2".parse().unwrap());
        assert!(matches!(partial_sum(&bad, 2), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn rho_is_product_of_alphas() {
        let spec = SeriesSpec::new(Variant::LurothB, 3)
            .with_m(2)
            .with_alpha(AlphaSource::Const(vec![i(2), i(5), i(1)]));
        let st = gen_sequences(&spec, 6).unwrap();
        let mut expected = i(2);
        for s in &st {
            assert_eq!(s.rho.as_ref().unwrap(), &expected);
            expected *= s.alpha.clone().unwrap();
        }
    }

    #[test]
    fn seeds_and_validation() {
        assert!(matches!(gen_sequences(&SeriesSpec::new(Variant::LurothA, 1), 3), Err(Error::InvalidSpec(_))));
        assert!(gen_sequences(&SeriesSpec::new(Variant::EngelA, 1), 4).is_ok());
        let mut zero_alpha = SeriesSpec::new(Variant::EngelB, 2);
        zero_alpha.alpha = AlphaSource::Const(vec![i(0)]);
        assert!(zero_alpha.validate().is_err());
        assert!(gen_sequences(&SeriesSpec::explicit(ints(&["2", "4"])), 3).is_err());
    }

    #[test]
    fn digit_budget_guard() {
        let spec = SeriesSpec::new(Variant::LurothA, 3);
        let opts = GenOptions { digit_budget: 50, ..Default::default() };
        match gen_sequences_with(&spec, 8, &opts) {
            Err(Error::DigitBudgetExceeded { budget, predicted, .. }) => {
                assert_eq!(budget, 50);
                assert!(predicted > 50);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
        assert!(gen_sequences_with(&spec, 3, &opts).is_ok());
    }

    #[test]
    fn kempner_family() {
        for u in 2..6i64 {
            let x: Vec<Int> = (0..8u32).map(|k| num_traits::pow(i(u), 1usize << k)).collect();
            let st = gen_sequences(&SeriesSpec::explicit(x), 8).unwrap();
            assert_eq!(st[0].z, i(u));
            assert!(st[1..].iter().all(|s| s.z.is_one()));
        }
    }

    #[test]
    fn alpha_examples() {
        let one = MuParams::constant_one();
        assert_eq!(alpha_eval(&one, 1, &i(3), &i(18)).unwrap(), i(1));
        assert_eq!(alpha_eval(&one, 7, &i(12345), &i(999)).unwrap(), i(1));
        let xy = MuParams { c: 0.0, nu: 1.0, terms: vec![PolyTerm { c: 1.0, r: 1.0, s: 1.0 }] };
        assert_eq!(alpha_eval(&xy, 1, &i(3), &i(18)).unwrap(), i(54));
        let e = MuParams { c: 1.0, nu: 1.0, terms: vec![PolyTerm { c: 1.0, r: 0.0, s: 0.0 }] };
        assert_eq!(alpha_eval(&e, 1, &i(3), &i(18)).unwrap(), i(3));
        // ceil(e^4) = ceil(54.598...) = 55
        let e4 = MuParams { c: 0.25, nu: 2.0, terms: vec![PolyTerm { c: 1.0, r: 0.0, s: 0.0 }] };
        assert_eq!(alpha_eval(&e4, 4, &i(3), &i(18)).unwrap(), i(55));
        // ceil(sqrt(2) * 10) = 15
        let root = MuParams { c: 0.0, nu: 1.0, terms: vec![PolyTerm { c: 10.0, r: 0.5, s: 0.0 }] };
        assert_eq!(alpha_eval(&root, 1, &i(2), &i(5)).unwrap(), i(15));
        // sqrt(16) = 4 exactly via a non-integer exponent can never certify
        let exact_root = MuParams { c: 0.0, nu: 1.0, terms: vec![PolyTerm { c: 1.0, r: 0.5, s: 0.0 }] };
        let cfg = CeilConfig { start_bits: 64, max_bits: 256 };
        assert_eq!(
            alpha_eval_with(&exact_root, 1, &i(16), &i(1), cfg, DEFAULT_DIGIT_BUDGET),
            Err(Error::PrecisionExhausted { bits: 256 })
        );
    }

    #[test]
    fn pseudo_params_validation() {
        let sparse = MuParams {
            c: 0.0,
            nu: 1.0,
            terms: vec![PolyTerm { c: 1.0, r: 1.0, s: 0.0 }, PolyTerm { c: 1.0, r: 0.0, s: 1.0 }],
        };
        assert!(sparse.validate().is_err());
        let grid = MuParams {
            c: 1.0,
            nu: 2.0,
            terms: vec![
                PolyTerm { c: 1.0, r: 1.0, s: 0.0 },
                PolyTerm { c: 1.0, r: 0.0, s: 1.0 },
                PolyTerm { c: 2.0, r: 1.0, s: 1.0 },
                PolyTerm { c: 3.0, r: 0.0, s: 0.0 },
            ],
        };
        assert!(grid.validate().is_ok());
        assert_eq!(grid.leading_exponents(), (1.0, 1.0));
        let neg = MuParams { c: -1.0, ..grid.clone() };
        assert!(neg.validate().is_err());
    }

    #[test]
    fn pseudo_alpha_in_recurrence() {
        let p = MuParams { c: 0.0, nu: 1.0, terms: vec![PolyTerm { c: 0.5, r: 1.0, s: 0.0 }] };
        let spec = SeriesSpec::new(Variant::LurothA, 3).with_alpha(AlphaSource::Pseudo(p));
        let st = gen_sequences(&spec, 4).unwrap();
        // alpha_1 = ceil(3/2) = 2, alpha_2 = ceil(18/2) = 9
        assert_eq!(st[0].alpha, Some(i(2)));
        assert_eq!(st[1].alpha, Some(i(9)));
        assert_eq!(st[2].rho, Some(i(18)));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"variant":"LurothA","u1":"3","m":1,"alpha":{"const":["1"]},"signs":{"period":[1,-1,-1]}}"#;
        let spec = SeriesSpec::from_json(text).unwrap();
        assert_eq!(spec.u1, i(3));
        assert_eq!(spec.signs, SignSeq::Period(vec![Sign::Plus, Sign::Minus, Sign::Minus]));
        let again = SeriesSpec::from_json(&spec.to_json().to_string()).unwrap();
        assert_eq!(again, spec);

        let pseudo = r#"{"variant":"AltLurothA","u1":"3","alpha":{"pseudo":{"C":0.5,"nu":2,"terms":[{"c":1,"r":0,"s":0}]}},"signs":"alternating","prefix":"1/3"}"#;
        let spec = SeriesSpec::from_json(pseudo).unwrap();
        assert!(matches!(spec.alpha, AlphaSource::Pseudo(_)));
        assert_eq!(SeriesSpec::from_json(&spec.to_json().to_string()).unwrap(), spec);

        let explicit = r#"{"variant":"ExplicitX","x_list":["2","4","16"]}"#;
        assert_eq!(SeriesSpec::from_json(explicit).unwrap().x_list.len(), 3);

        for bad in [
            r#"{"variant":"LurothA"}"#,
            r#"{"variant":"Nope","u1":"3"}"#,
            r#"{"variant":"LurothA","u1":"3","extra":1}"#,
            r#"{"variant":"LurothA","u1":"3x"}"#,
            r#"{"variant":"LurothA","u1":"3","signs":{"list":[2]}}"#,
        ] {
            assert!(SeriesSpec::from_json(bad).is_err(), "{bad}");
        }
    }
}
