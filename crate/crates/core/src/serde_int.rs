//! Big integers as decimal strings in JSON.

use serde::ser::SerializeSeq;
use serde::Serializer;

use crate::exact::Int;

pub fn serialize<S: Serializer>(n: &Int, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(n)
}

pub fn serialize_vec<S: Serializer>(v: &[Int], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for n in v {
        seq.serialize_element(&n.to_string())?;
    }
    seq.end()
}

pub fn serialize_opt<S: Serializer>(n: &Option<Int>, s: S) -> Result<S::Ok, S::Error> {
    match n {
        Some(n) => s.collect_str(n),
        None => s.serialize_none(),
    }
}
