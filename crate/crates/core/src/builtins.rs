//! Named example series.

use crate::error::{Error, Result};
use crate::exact::{parse_int, Int};
use crate::series::{IntSource, SeriesSpec, SignSeq, Variant};

/// Terms generated for `kempner:<u>`.
pub const KEMPNER_TERMS: u32 = 12;

pub const NAMES: [&str; 4] = ["lur1", "altlur2", "zjisj", "kempner:<u>"];

/// Lüroth series with `u_1 = 3`, `m = 1`, `alpha = 1`, all signs positive.
pub fn lur1() -> SeriesSpec {
    SeriesSpec::new(Variant::LurothA, 3)
}

/// Alternating Lüroth series with `u_1 = 2`, `m = 1`, `alpha = 1` and
/// alternating signs.
pub fn altlur2() -> SeriesSpec {
    SeriesSpec::new(Variant::AltLurothB, 2).with_signs(SignSeq::Alternating)
}

/// `beta_n = n`, `gamma_n = 1`, `u_1 = v_1 = 1`, alternating signs; `z_n = n`.
pub fn zjisj() -> SeriesSpec {
    let mut spec = SeriesSpec::new(Variant::IndependentUV, 1).with_signs(SignSeq::Alternating);
    spec.beta = IntSource::Index;
    spec.gamma = IntSource::Const(vec![Int::from(1)]);
    spec.v1 = Int::from(1);
    spec
}

/// `x_n = u^(2^(n-1))`.
pub fn kempner(u: &Int) -> Result<SeriesSpec> {
    if *u < Int::from(2) {
        return Err(Error::InvalidSpec(format!("kempner base must be at least 2, got {u}")));
    }
    let mut x = Vec::with_capacity(KEMPNER_TERMS as usize);
    let mut cur = u.clone();
    for _ in 0..KEMPNER_TERMS {
        let next = &cur * &cur;
        x.push(cur);
        cur = next;
    }
    Ok(SeriesSpec::explicit(x))
}

pub fn lookup(name: &str) -> Result<SeriesSpec> {
    match name {
        "lur1" => Ok(lur1()),
        "altlur2" => Ok(altlur2()),
        "zjisj" => Ok(zjisj()),
        _ => match name.strip_prefix("kempner:") {
            Some(u) => kempner(&parse_int(u).map_err(|_| Error::UnknownExample(name.into()))?),
            None => Err(Error::UnknownExample(name.into())),
        },
    }
}
