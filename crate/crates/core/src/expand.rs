//! Continued fractions of partial sums by iterated folding.
//!
//! Stage 1 is the Euclidean expansion of the prefix `p/q` (length `k`).
//! Stage `j` folds stage `j - 1` with `z_j` and sign `eps_j * (-1)^len`, where
//! `len` is the current length; after the first fold every length is even, so
//! the factor only matters when `k` is odd.

use num_traits::One;
use serde::Serialize;

use crate::cf::{canonicalize, determinant_failure, ContinuedFraction};
use crate::error::{Error, Result};
use crate::exact::{Int, Rat};
use crate::fold::{fold, fold_integer, FoldStep, Sign};
use crate::series::{gen_sequences_with, GenOptions, SeriesSpec, SeriesState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LengthCase {
    Generic,
    SpecialEngelX1Eq2,
    SpecialPierceX1Eq2,
    NonApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansionStage {
    pub n: usize,
    pub cf: ContinuedFraction,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<FoldStep>,
    pub predicted_length: Option<usize>,
    pub actual_length: usize,
    pub oracle_match: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansionTrace {
    /// Length of the prefix expansion.
    pub k: usize,
    pub case: LengthCase,
    pub stages: Vec<ExpansionStage>,
    #[serde(skip)]
    pub states: Vec<SeriesState>,
}

impl ExpansionTrace {
    pub fn lengths(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.actual_length).collect()
    }

    pub fn z_values(&self) -> Vec<Int> {
        self.states.iter().map(|s| s.z.clone()).collect()
    }
}

/// `l_n` for the given case.
pub fn predict_length(k: usize, n: usize, case: LengthCase) -> Result<usize> {
    if n == 0 {
        return Err(Error::CaseOutOfRange("n must be at least 1".into()));
    }
    let pow = |e: usize| -> Result<usize> {
        1usize.checked_shl(e as u32).filter(|_| e < 63).ok_or_else(|| Error::CaseOutOfRange(format!("n = {n} is too large")))
    };
    match case {
        LengthCase::Generic => Ok((k + 2) * pow(n - 1)? - 2),
        LengthCase::SpecialEngelX1Eq2 | LengthCase::SpecialPierceX1Eq2 if n < 3 => {
            Err(Error::CaseOutOfRange(format!("{case:?} formula holds from n = 3, got n = {n}")))
        }
        LengthCase::SpecialEngelX1Eq2 => Ok(5 * pow(n - 2)?),
        LengthCase::SpecialPierceX1Eq2 => Ok(5 * pow(n - 2)? - 2),
        LengthCase::NonApplicable => Err(Error::CaseOutOfRange("no length formula for this series".into())),
    }
}

/// Length formula for stage `n`, using the generic formula for the first two
/// stages of the `x_1 = 2` cases where the two agree.
fn stage_prediction(k: usize, n: usize, case: LengthCase) -> Option<usize> {
    match case {
        LengthCase::NonApplicable => None,
        LengthCase::SpecialEngelX1Eq2 | LengthCase::SpecialPierceX1Eq2 if n < 3 => {
            predict_length(k, n, LengthCase::Generic).ok()
        }
        c => predict_length(k, n, c).ok(),
    }
}

fn classify(prefix_cf: &ContinuedFraction, spec: &SeriesSpec, states: &[SeriesState]) -> Result<LengthCase> {
    let k = prefix_cf.len();
    if k == 0 || states[1..].iter().any(|s| s.z <= Int::one()) {
        return Ok(LengthCase::NonApplicable);
    }
    let a1 = &prefix_cf.word[0];
    let two = Int::from(2);
    if k == 1 && *a1 == two {
        let mut plus = true;
        let mut alternating = true;
        for j in 2..=states.len() {
            let eps = spec.signs.sign(j)?;
            plus &= eps == Sign::Plus;
            alternating &= eps == Sign::Plus.times_parity(j - 1);
        }
        return Ok(match (plus, alternating) {
            (true, _) => LengthCase::SpecialEngelX1Eq2,
            (false, true) => LengthCase::SpecialPierceX1Eq2,
            _ => LengthCase::NonApplicable,
        });
    }
    let generic = if k == 1 { *a1 > two } else { *a1 > Int::one() };
    Ok(if generic { LengthCase::Generic } else { LengthCase::NonApplicable })
}

/// Length case for the first `depth` terms of a series.
pub fn classify_case(spec: &SeriesSpec, depth: usize) -> Result<LengthCase> {
    let states = gen_sequences_with(spec, depth.max(1), &GenOptions::default())?;
    let prefix = spec.resolve_prefix(&states[0].x)?;
    classify(&ContinuedFraction::from_rational(&prefix), spec, &states)
}

pub fn expand_series(spec: &SeriesSpec, n: usize) -> Result<(ContinuedFraction, ExpansionTrace)> {
    expand_series_with(spec, n, &GenOptions::default())
}

pub fn expand_series_with(spec: &SeriesSpec, n: usize, opts: &GenOptions) -> Result<(ContinuedFraction, ExpansionTrace)> {
    let states = gen_sequences_with(spec, n, opts)?;
    let prefix = spec.resolve_prefix(&states[0].x)?;
    let mut cf = ContinuedFraction::from_rational(&prefix);
    let k = cf.len();
    let case = classify(&cf, spec, &states)?;

    let mut sum = prefix;
    let mut stages = vec![ExpansionStage {
        n: 1,
        cf: cf.clone(),
        step: None,
        predicted_length: stage_prediction(k, 1, case),
        actual_length: k,
        oracle_match: true,
    }];
    for st in &states[1..] {
        let eps = spec.signs.sign(st.n)?;
        let sign = eps.times_parity(cf.len());
        let (next, step) = if cf.is_empty() { fold_integer(&cf.a0, &st.z, sign)? } else { fold(&cf, &st.z, sign)? };
        sum = &sum + &Rat::new(Int::from(eps.as_i8()), st.x.clone())?;
        if next.value() != sum {
            return Err(Error::OracleMismatch { n: st.n });
        }
        cf = next;
        stages.push(ExpansionStage {
            n: st.n,
            cf: cf.clone(),
            step: Some(step),
            predicted_length: stage_prediction(k, st.n, case),
            actual_length: cf.len(),
            oracle_match: true,
        });
    }
    Ok((cf, ExpansionTrace { k, case, stages, states }))
}

/// Number of occurrences of `z_j - 1` in `cf` for each `j = 2..=zs.len()`.
pub fn coefficient_census(cf: &ContinuedFraction, zs: &[Int]) -> Vec<usize> {
    zs.iter()
        .skip(1)
        .map(|z| {
            let target = z - 1;
            cf.word.iter().filter(|a| **a == target).count()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageCheck {
    pub n: usize,
    pub cf: String,
    pub value: String,
    pub value_ok: bool,
    pub word_ok: bool,
    pub determinant_ok: bool,
    pub predicted_length: Option<usize>,
    pub actual_length: usize,
    pub length_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub n_max: usize,
    pub case: Option<LengthCase>,
    pub stages: Vec<StageCheck>,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// Checks every stage against the Euclidean expansion of the exact partial
/// sum. Problems are collected in the report instead of returned as errors.
pub fn verify_expansion(spec: &SeriesSpec, n_max: usize) -> VerifyReport {
    verify_expansion_with(spec, n_max, &GenOptions::default())
}

pub fn verify_expansion_with(spec: &SeriesSpec, n_max: usize, opts: &GenOptions) -> VerifyReport {
    let mut report = VerifyReport { n_max, case: None, stages: Vec::new(), failures: Vec::new(), passed: false };
    let states = match gen_sequences_with(spec, n_max, opts) {
        Ok(s) => s,
        Err(e) => {
            report.failures.push(format!("generation: {e}"));
            return report;
        }
    };
    let prefix = match spec.resolve_prefix(&states[0].x) {
        Ok(p) => p,
        Err(e) => {
            report.failures.push(format!("prefix: {e}"));
            return report;
        }
    };
    let mut cf = ContinuedFraction::from_rational(&prefix);
    let k = cf.len();
    let case = match classify(&cf, spec, &states) {
        Ok(c) => c,
        Err(e) => {
            report.failures.push(format!("classification: {e}"));
            return report;
        }
    };
    report.case = Some(case);

    let mut sum = prefix;
    for (idx, st) in states.iter().enumerate() {
        if idx > 0 {
            let folded = spec.signs.sign(st.n).and_then(|eps| {
                sum = &sum + &Rat::new(Int::from(eps.as_i8()), st.x.clone())?;
                let sign = eps.times_parity(cf.len());
                if cf.is_empty() {
                    fold_integer(&cf.a0, &st.z, sign)
                } else {
                    fold(&cf, &st.z, sign)
                }
            });
            match folded {
                Ok((next, _)) => cf = next,
                Err(e) => {
                    report.failures.push(format!("n = {}: fold failed: {e}", st.n));
                    break;
                }
            }
        }
        let value = cf.value();
        let euclid = ContinuedFraction::from_rational(&sum);
        let word_ok = canonicalize(&cf).is_ok_and(|c| c == euclid);
        let predicted = stage_prediction(k, st.n, case);
        let check = StageCheck {
            n: st.n,
            cf: cf.to_string(),
            value: value.to_string(),
            value_ok: value == sum,
            word_ok,
            determinant_ok: determinant_failure(&cf).is_none(),
            predicted_length: predicted,
            actual_length: cf.len(),
            length_ok: predicted.map(|p| p == cf.len()),
        };
        if !check.value_ok {
            report.failures.push(format!("n = {}: value {} differs from partial sum {sum}", st.n, check.value));
        }
        if !check.word_ok {
            report.failures.push(format!("n = {}: canonical word differs from {euclid}", st.n));
        }
        if !check.determinant_ok {
            report.failures.push(format!("n = {}: determinant identity fails", st.n));
        }
        if check.length_ok == Some(false) {
            report.failures.push(format!(
                "n = {}: length {} but formula gives {}",
                st.n,
                check.actual_length,
                predicted.unwrap_or_default()
            ));
        }
        report.stages.push(check);
    }
    report.passed = report.failures.is_empty();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{SignSeq, Variant};

    fn cf(s: &str) -> ContinuedFraction {
        s.parse().unwrap()
    }

    fn lur1() -> SeriesSpec {
        SeriesSpec::new(Variant::LurothA, 3)
    }

    fn altlur2() -> SeriesSpec {
        SeriesSpec::new(Variant::AltLurothB, 2).with_signs(SignSeq::Alternating)
    }

    fn zjisj() -> SeriesSpec {
        SeriesSpec::new(Variant::IndependentUV, 1).with_signs(SignSeq::Alternating)
    }

    #[test]
    fn luroth_stages() {
        let (out, trace) = expand_series(&lur1(), 3).unwrap();
        assert_eq!(out, cf("[0;2,1,11,3,5201,1,2,11,1,2]"));
        let stages: Vec<String> = trace.stages.iter().map(|s| s.cf.to_string()).collect();
        assert_eq!(stages, ["[0;3]", "[0;2,1,11,3]", "[0;2,1,11,3,5201,1,2,11,1,2]"]);
        assert_eq!(trace.case, LengthCase::Generic);
        assert_eq!(trace.lengths(), [1, 4, 10]);
    }

    #[test]
    fn alternating_stages() {
        let (out, trace) = expand_series(&altlur2(), 4).unwrap();
        assert_eq!(out, cf("[0;2,2,1,1,2,2,2,1,1,12,2,2,2,2,1,1,2,2]"));
        assert_eq!(trace.stages[2].cf, cf("[0;2,2,1,1,2,2,2,2]"));
        assert_eq!(trace.stages[2].step.as_ref().unwrap().concatenations_applied, 1);
        assert_eq!(trace.case, LengthCase::SpecialPierceX1Eq2);
    }

    #[test]
    fn integer_prefix_stages() {
        let (out, trace) = expand_series(&zjisj(), 5).unwrap();
        let stages: Vec<String> = trace.stages.iter().map(|s| s.cf.to_string()).collect();
        assert_eq!(
            stages,
            ["[1]", "[0;1,1]", "[0;1,1,2,2]", "[0;1,1,2,1,1,3,2,2,1,1]", "[0;1,1,2,1,1,3,2,2,1,1,4,2,2,2,3,1,1,2,1,1]"]
        );
        assert_eq!(out.len(), 20);
        assert_eq!(trace.k, 0);
        assert_eq!(trace.case, LengthCase::NonApplicable);
    }

    #[test]
    fn length_formulas() {
        assert_eq!(predict_length(1, 3, LengthCase::Generic).unwrap(), 10);
        assert_eq!(predict_length(1, 3, LengthCase::SpecialPierceX1Eq2).unwrap(), 8);
        assert_eq!(predict_length(1, 3, LengthCase::SpecialEngelX1Eq2).unwrap(), 10);
        assert_eq!(predict_length(4, 1, LengthCase::Generic).unwrap(), 4);
        assert!(predict_length(1, 2, LengthCase::SpecialEngelX1Eq2).is_err());
        assert!(predict_length(1, 4, LengthCase::NonApplicable).is_err());
    }

    #[test]
    fn classification() {
        assert_eq!(classify_case(&lur1(), 4).unwrap(), LengthCase::Generic);
        assert_eq!(classify_case(&altlur2(), 4).unwrap(), LengthCase::SpecialPierceX1Eq2);
        let engel = SeriesSpec::new(Variant::AltLurothB, 2);
        assert_eq!(classify_case(&engel, 4).unwrap(), LengthCase::SpecialEngelX1Eq2);
        let kempner = SeriesSpec::explicit(vec![2.into(), 4.into(), 16.into(), 256.into()]);
        assert_eq!(classify_case(&kempner, 4).unwrap(), LengthCase::NonApplicable);
        let mixed = SeriesSpec::new(Variant::AltLurothB, 2).with_signs(SignSeq::Period(vec![Sign::Plus, Sign::Minus, Sign::Minus]));
        assert_eq!(classify_case(&mixed, 4).unwrap(), LengthCase::NonApplicable);
    }

    #[test]
    fn engel_special_lengths() {
        let engel = SeriesSpec::new(Variant::AltLurothB, 2);
        let (_, trace) = expand_series(&engel, 6).unwrap();
        assert_eq!(trace.lengths(), [1, 4, 10, 20, 40, 80]);
        assert!(verify_expansion(&engel, 6).passed);
    }

    #[test]
    fn verify_reports() {
        let report = verify_expansion(&lur1(), 4);
        assert!(report.passed, "{:?}", report.failures);
        assert_eq!(report.stages.len(), 4);
        let kempner = SeriesSpec::explicit((0..6u32).map(|k| Int::from(2).pow(1u32 << k)).collect());
        let report = verify_expansion(&kempner, 6);
        assert!(report.passed, "{:?}", report.failures);
        assert!(report.stages.iter().all(|s| s.length_ok.is_none()));
        let bad = SeriesSpec::explicit(vec![2.into(), 6.into()]);
        let report = verify_expansion(&bad, 2);
        assert!(!report.passed);
    }

    #[test]
    fn census_generic() {
        let (out, trace) = expand_series(&lur1(), 5).unwrap();
        let zs = trace.z_values();
        assert_eq!(coefficient_census(&out, &zs), [8, 4, 2, 1]);
    }

    #[test]
    fn negative_prefix() {
        let spec = lur1().with_signs(SignSeq::List(vec![Sign::Minus, Sign::Plus, Sign::Minus, Sign::Plus]));
        let report = verify_expansion(&spec, 4);
        assert!(report.passed, "{:?}", report.failures);
        assert_eq!(report.stages[0].cf, "[-1;1,2]");
    }
}
