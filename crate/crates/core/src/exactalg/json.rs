//! JSON form of a `DiffPoly`: an array of terms in canonical order,
//! `{"c": [re, im], "eps": e, "mu": m, "jets": [[kx, ky, mult], ...]}`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::monomial::DiffMonomial;
use super::poly::DiffPoly;
use super::truncation::TruncationContext;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub c: [String; 2],
    pub eps: i32,
    pub mu: u32,
    pub jets: Vec<[u32; 3]>,
}

pub fn term_json(m: &DiffMonomial, c: &Scalar) -> TermJson {
    let (re, im) = c.to_strings();
    TermJson {
        c: [re, im],
        eps: m.eps,
        mu: m.mu,
        jets: m.jets().iter().map(|p| [p.var.kx, p.var.ky, p.mult]).collect(),
    }
}

pub fn to_terms(f: &DiffPoly) -> Vec<TermJson> {
    f.terms().map(|(m, c)| term_json(m, c)).collect()
}

pub fn to_json(f: &DiffPoly) -> Value {
    serde_json::to_value(to_terms(f)).expect("terms serialize")
}

pub fn from_terms(terms: &[TermJson], trunc: TruncationContext) -> Result<DiffPoly> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let c = Scalar::from_strings(&t.c[0], &t.c[1])?;
        let powers: Vec<(u32, u32, u32)> = t.jets.iter().map(|j| (j[0], j[1], j[2])).collect();
        out.push((DiffMonomial::from_powers(&powers, t.eps, t.mu), c));
    }
    Ok(DiffPoly::from_terms(out, trunc))
}

pub fn from_json(v: &Value, trunc: TruncationContext) -> Result<DiffPoly> {
    let terms: Vec<TermJson> = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    from_terms(&terms, trunc)
}
