//! Irrationality exponents: predicted values for the Lüroth families and an
//! empirical estimate `1 + max L_(j+1) / L_j` from convergent denominators,
//! with `L_j = log q_j`.

use std::fmt;

use num_integer::Roots;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{ln_int, Int, Rat};
use crate::expand::expand_series_with;
use crate::fold::Sign;
use crate::series::{AlphaSource, Family, GenOptions, MuParams, SeriesSpec, Variant};

/// Largest root of `t^2 - (s+4) t - (r-1)` (family A) or
/// `t^2 - (s+2) t - (r+1)` (family B).
pub fn lambda_root(family: Family, r: f64, s: f64) -> f64 {
    let (b, c) = coefficients(family, r, s);
    (b + (b * b + 4.0 * c).sqrt()) / 2.0
}

fn coefficients(family: Family, r: f64, s: f64) -> (f64, f64) {
    match family {
        Family::A => (s + 4.0, r - 1.0),
        Family::B => (s + 2.0, r + 1.0),
    }
}

/// `a + b * sqrt(d)` with `d` square-free; `d = 1` means a rational value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    pub a: Rat,
    pub b: Rat,
    pub d: u64,
}

impl Surd {
    pub fn to_f64(&self) -> f64 {
        self.a.to_f64() + self.b.to_f64() * (self.d as f64).sqrt()
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d == 1 || self.b.is_zero() {
            return write!(f, "{}", &self.a + &(&self.b * &Rat::from(self.d as i64)));
        }
        if !self.a.is_zero() {
            write!(f, "{}+", self.a)?;
        }
        if self.b != Rat::from(1) {
            write!(f, "{}*", self.b)?;
        }
        write!(f, "sqrt({})", self.d)
    }
}

impl Serialize for Surd {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Exact form of [`lambda_root`] for integer exponents.
pub fn lambda_closed_form(family: Family, r: u32, s: u32) -> Surd {
    let (b, c) = match family {
        Family::A => (s as i64 + 4, r as i64 - 1),
        Family::B => (s as i64 + 2, r as i64 + 1),
    };
    let disc = (b * b + 4 * c) as u64;
    let (f, d) = split_square(disc);
    Surd { a: Rat::new(b.into(), 2.into()).unwrap(), b: Rat::new((f as i64).into(), 2.into()).unwrap(), d }
}

/// `n = f^2 d` with `d` square-free.
fn split_square(n: u64) -> (u64, u64) {
    if n == 0 {
        return (0, 1);
    }
    let mut f = 1;
    let mut d = n;
    let mut p = 2;
    while p * p <= d {
        while d % (p * p) == 0 {
            d /= p * p;
            f *= p;
        }
        p += 1;
    }
    if d.sqrt() * d.sqrt() == d {
        f *= d.sqrt();
        d = 1;
    }
    (f, d)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuPrediction {
    pub mu: f64,
    pub lambda: f64,
    /// Set when `mu = lambda` and both exponents are integers.
    pub closed_form: Option<Surd>,
}

/// `max(nu, lambda(r_M, s_N))`. When `C = 0` there is no exponential factor
/// and `nu` plays no role.
pub fn mu_predicted(family: Family, params: &MuParams) -> MuPrediction {
    let (r, s) = params.leading_exponents();
    let lambda = lambda_root(family, r, s);
    let nu_wins = params.c > 0.0 && params.nu > lambda;
    let integral = |e: f64| (e.fract() == 0.0 && e <= 1e6).then_some(e as u32);
    let closed_form = match (nu_wins, integral(r), integral(s)) {
        (false, Some(r), Some(s)) => Some(lambda_closed_form(family, r, s)),
        _ => None,
    };
    MuPrediction { mu: if nu_wins { params.nu } else { lambda }, lambda, closed_form }
}

/// Prediction for a series spec, available for the Lüroth families.
pub fn mu_for_spec(spec: &SeriesSpec) -> Option<MuPrediction> {
    if !spec.variant.is_luroth() {
        return None;
    }
    let family = spec.variant.family()?;
    let params = match &spec.alpha {
        AlphaSource::Const(_) => MuParams::constant_one(),
        AlphaSource::Pseudo(p) => p.clone(),
    };
    Some(mu_predicted(family, &params))
}

/// `ln q`, or 0 for `q = 1`.
pub fn log_q(q: &Int) -> f64 {
    ln_int(q)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioPoint {
    /// `j`, for the ratio `L_(j+1) / L_j`.
    pub index: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Landmark {
    /// Stage whose fold inserted `z_stage - 1`.
    pub stage: usize,
    pub sign: Sign,
    pub index: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuReport {
    pub variant: Variant,
    pub n_max: usize,
    pub length: usize,
    pub predicted: Option<MuPrediction>,
    /// `L_j = ln q_j` for `j = 0..=length`.
    pub log_q: Vec<f64>,
    /// `ln u_n`, where the family has a `u` sequence.
    pub log_u: Vec<f64>,
    pub ratios: Vec<RatioPoint>,
    pub landmarks: Vec<Landmark>,
    pub window_start: usize,
    pub window_max: f64,
    pub estimate: f64,
    /// `(estimate - 1) / (mu - 1) - 1` against the prediction.
    pub eta: Option<f64>,
}

pub fn mu_estimate(spec: &SeriesSpec, n_max: usize, window_start: Option<usize>) -> Result<MuReport> {
    mu_estimate_with(spec, n_max, window_start, &GenOptions::default())
}

pub fn mu_estimate_with(spec: &SeriesSpec, n_max: usize, window_start: Option<usize>, opts: &GenOptions) -> Result<MuReport> {
    let (cf, trace) = expand_series_with(spec, n_max, opts)?;
    let length = cf.len();
    let window = window_start.unwrap_or_else(|| trace.stages.get(2).map_or(0, |s| s.actual_length));
    if window >= length {
        return Err(Error::InvalidSpec(format!("window start {window} must be below the expansion length {length}")));
    }
    let log_q: Vec<f64> = cf.denominators().iter().map(log_q).collect();

    let ratio_at = |j: usize| (log_q[j] > 0.0).then(|| log_q[j + 1] / log_q[j]);
    let ratios: Vec<RatioPoint> = (window..length).filter_map(|j| ratio_at(j).map(|ratio| RatioPoint { index: j, ratio })).collect();
    let window_max = ratios.iter().map(|p| p.ratio).fold(f64::NEG_INFINITY, f64::max);
    if !window_max.is_finite() {
        return Err(Error::InvalidSpec("no usable denominators in the window".into()));
    }

    let landmarks = trace
        .stages
        .iter()
        .filter_map(|st| {
            let step = st.step.as_ref()?;
            let j = match step.sign {
                Sign::Plus => step.length_before,
                Sign::Minus => step.length_before + 1,
            };
            let ratio = (j < length).then(|| ratio_at(j)).flatten()?;
            Some(Landmark { stage: st.n, sign: step.sign, index: j, ratio })
        })
        .collect();

    let predicted = mu_for_spec(spec);
    let estimate = 1.0 + window_max;
    let eta = predicted.as_ref().map(|p| (estimate - 1.0) / (p.mu - 1.0) - 1.0);
    let log_u = trace.states.iter().filter_map(|s| s.u.as_ref().map(ln_int)).collect();
    Ok(MuReport {
        variant: spec.variant,
        n_max,
        length,
        predicted,
        log_q,
        log_u,
        ratios,
        landmarks,
        window_start: window,
        window_max,
        estimate,
        eta,
    })
}
