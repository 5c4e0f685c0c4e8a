//! Pseudo-differential operators `Σ a_i ∂_x^i` with coefficients in the Moyal
//! star algebra.
//!
//! Operators are normal ordered (coefficients to the left of powers of ∂).
//! Each operator records the lowest order it knows: `depth = Some(d)` means
//! coefficients below `∂^d` were discarded, `None` means the stored
//! coefficients are the whole operator (e.g. a differential operator).
//! Composition propagates this honestly: if `A` is known down to `d_A` and
//! `B` has top order `n_B`, the product is only known down to `d_A + n_B`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde_json::{Map, Value};

use crate::cancel::CancelToken;
use crate::error::{Error, Result};
use crate::exactalg::{json, Accumulator, DiffMonomial, DiffPoly, JetVar, TruncationContext};
use crate::moyal::{star_into, star_reach, DerivativeTable};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct PseudoDiffOp {
    coeffs: BTreeMap<i32, DiffPoly>,
    depth: Option<i32>,
    trunc: TruncationContext,
}

impl PartialEq for PseudoDiffOp {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.depth == other.depth
    }
}

/// Generalized binomial `i (i−1) ... (i−k+1) / k!` for any integer `i`.
pub fn gen_binomial(i: i32, k: u32) -> BigRational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for t in 0..k as i64 {
        num *= BigInt::from(i as i64 - t);
        den *= BigInt::from(t + 1);
    }
    BigRational::new(num, den)
}

impl PseudoDiffOp {
    /// Builds an operator, dropping zero coefficients and anything below `depth`.
    pub fn new<I>(coeffs: I, depth: Option<i32>, trunc: TruncationContext) -> Self
    where
        I: IntoIterator<Item = (i32, DiffPoly)>,
    {
        let mut map: BTreeMap<i32, DiffPoly> = BTreeMap::new();
        for (e, c) in coeffs {
            if depth.is_some_and(|d| e < d) {
                continue;
            }
            let c = if *c.trunc() == trunc {
                c
            } else {
                c.with_trunc(trunc)
            };
            let slot = map.remove(&e);
            let merged = match slot {
                Some(prev) => prev.add(&c),
                None => c,
            };
            if !merged.is_zero() {
                map.insert(e, merged);
            }
        }
        PseudoDiffOp {
            coeffs: map,
            depth,
            trunc,
        }
    }

    pub fn zero(trunc: TruncationContext) -> Self {
        Self::new([], None, trunc)
    }

    pub fn identity(trunc: TruncationContext) -> Self {
        Self::new([(0, DiffPoly::one(trunc))], None, trunc)
    }

    /// `∂_x^n`.
    pub fn d_power(n: i32, trunc: TruncationContext) -> Self {
        Self::new([(n, DiffPoly::one(trunc))], None, trunc)
    }

    /// `f ∂^n`, exact.
    pub fn term(f: DiffPoly, n: i32) -> Self {
        let trunc = *f.trunc();
        Self::new([(n, f)], None, trunc)
    }

    pub fn trunc(&self) -> &TruncationContext {
        &self.trunc
    }

    pub fn depth(&self) -> Option<i32> {
        self.depth
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_order(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn min_order(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn coeff(&self, e: i32) -> DiffPoly {
        self.coeffs
            .get(&e)
            .cloned()
            .unwrap_or_else(|| DiffPoly::zero(self.trunc))
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (i32, &DiffPoly)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn is_clipped(&self) -> bool {
        self.coeffs.values().any(DiffPoly::is_clipped)
    }

    /// Discards everything below `depth` (no-op if already shallower).
    pub fn truncate_to(&self, depth: i32) -> Self {
        let d = Some(self.depth.map_or(depth, |cur| cur.max(depth)));
        Self::new(self.coeffs.clone(), d, self.trunc)
    }

    fn combined_depth(a: Option<i32>, b: Option<i32>) -> Option<i32> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    fn check_trunc(&self, other: &Self) -> Result<()> {
        if self.trunc != other.trunc {
            return Err(Error::TruncationMismatch(format!(
                "{} vs {}",
                self.trunc, other.trunc
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_trunc(other)?;
        let depth = Self::combined_depth(self.depth, other.depth);
        let all = self
            .coeffs
            .iter()
            .chain(other.coeffs.iter())
            .map(|(e, c)| (*e, c.clone()));
        Ok(Self::new(all, depth, self.trunc))
    }

    pub fn neg(&self) -> Self {
        Self::new(
            self.coeffs.iter().map(|(e, c)| (*e, c.neg())),
            self.depth,
            self.trunc,
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Self::new(
            self.coeffs.iter().map(|(e, c)| (*e, c.scale(s))),
            self.depth,
            self.trunc,
        )
    }

    /// Multiplies every coefficient by `ε^k`, moving the ε window along.
    pub fn rescale_eps(&self, k: i32) -> Self {
        let trunc = self.trunc.shift_eps(k);
        Self::new(
            self.coeffs.iter().map(|(e, c)| (*e, c.rescale_eps(k))),
            self.depth,
            trunc,
        )
    }

    /// Lowest order at which `self ∘ other` is fully determined.
    fn product_depth(&self, other: &Self) -> Option<i32> {
        let a = match (self.depth, other.max_order()) {
            (Some(d), Some(n)) => Some(d + n),
            _ => None,
        };
        let b = match (other.depth, self.max_order()) {
            (Some(d), Some(n)) => Some(d + n),
            _ => None,
        };
        Self::combined_depth(a, b)
    }

    fn expansion_is_finite(&self, other: &Self) -> bool {
        let has_negative = self.min_order().is_some_and(|e| e < 0);
        let nonconstant = other
            .coeffs
            .values()
            .any(|c| c.terms().any(|(m, _)| !m.is_constant()));
        !(has_negative && nonconstant)
    }

    /// `(f∂^i)∘(g∂^j) = Σ_k C(i,k) (f * ∂_x^k g) ∂^{i+j−k}`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_trunc(other)?;
        let depth = self.product_depth(other);
        if depth.is_none() && !self.expansion_is_finite(other) {
            return Err(Error::UnboundedExpansion(
                "exact operators with negative orders need an explicit depth (compose_to)".into(),
            ));
        }
        Ok(self.compose_inner(other, depth))
    }

    /// Composition cut off at `cap` in addition to the propagated depth.
    pub fn compose_to(&self, other: &Self, cap: i32) -> Result<Self> {
        self.check_trunc(other)?;
        let depth = Self::combined_depth(self.product_depth(other), Some(cap));
        Ok(self.compose_inner(other, depth))
    }

    fn compose_inner(&self, other: &Self, depth: Option<i32>) -> Self {
        let max_mu = self.trunc.max_mu;
        let mut ta = TableCache::new(&self.coeffs);
        let mut tb = TableCache::new(&other.coeffs);
        let mut plan = Vec::new();
        for (&i, f) in &self.coeffs {
            for (&j, g) in &other.coeffs {
                let Some(reach) = star_reach(f, g, max_mu) else {
                    continue;
                };
                let mut k: u32 = 0;
                loop {
                    let ord = i + j - k as i32;
                    if depth.is_some_and(|d| ord < d) || (i >= 0 && k as i32 > i) {
                        break;
                    }
                    tb.ensure(j, k, 0);
                    if tb.get(j).get(k, 0).is_zero() {
                        break;
                    }
                    ta.ensure(i, reach, reach);
                    tb.ensure(j, k + reach, reach);
                    plan.push((i, j, k));
                    k += 1;
                }
            }
        }
        let mut accs: BTreeMap<i32, Accumulator> = BTreeMap::new();
        for (i, j, k) in plan {
            let acc = accs
                .entry(i + j - k as i32)
                .or_insert_with(|| Accumulator::new(self.trunc));
            let c = Scalar::real(gen_binomial(i, k));
            star_into(acc, ta.get(i), 0, tb.get(j), k, &c);
        }
        Self::new(
            accs.into_iter().map(|(e, a)| (e, a.finish(false))),
            depth,
            self.trunc,
        )
    }

    /// `A_+`: nonnegative powers of ∂. Exact whenever `A` is known down to order 0.
    pub fn positive_part(&self) -> Self {
        let depth = match self.depth {
            Some(d) if d > 0 => Some(d),
            _ => None,
        };
        Self::new(
            self.coeffs.range(0..).map(|(e, c)| (*e, c.clone())),
            depth,
            self.trunc,
        )
    }

    /// `A_−`: strictly negative powers of ∂.
    pub fn negative_part(&self) -> Self {
        Self::new(
            self.coeffs.range(..0).map(|(e, c)| (*e, c.clone())),
            self.depth,
            self.trunc,
        )
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// Coefficient of `∂^{-1}`.
    pub fn residue(&self) -> DiffPoly {
        self.coeff(-1)
    }

    pub fn to_json(&self) -> Value {
        let mut coeffs = Map::new();
        for (e, c) in self.coeffs.iter().rev() {
            coeffs.insert(e.to_string(), json::to_json(c));
        }
        let mut obj = Map::new();
        obj.insert("depth".into(), self.depth.map_or(Value::Null, Value::from));
        obj.insert("coeffs".into(), Value::Object(coeffs));
        Value::Object(obj)
    }

    pub fn from_json(v: &Value, trunc: TruncationContext) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("operator json: {m}"));
        let obj = v.as_object().ok_or_else(|| bad("expected object"))?;
        let depth = match obj.get("depth") {
            None | Some(Value::Null) => None,
            Some(d) => Some(
                d.as_i64()
                    .and_then(|x| i32::try_from(x).ok())
                    .ok_or_else(|| bad("depth"))?,
            ),
        };
        let coeffs = obj
            .get("coeffs")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("coeffs"))?;
        let mut out = Vec::new();
        for (k, c) in coeffs {
            let e: i32 = k.parse().map_err(|_| bad("exponent key"))?;
            out.push((e, json::from_json(c, trunc)?));
        }
        Ok(Self::new(out, depth, trunc))
    }
}

/// Derivative tables of every coefficient of an operator.
struct TableCache {
    tables: BTreeMap<i32, DerivativeTable>,
}

impl TableCache {
    fn new(coeffs: &BTreeMap<i32, DiffPoly>) -> Self {
        TableCache {
            tables: coeffs
                .iter()
                .map(|(e, c)| (*e, DerivativeTable::new(c)))
                .collect(),
        }
    }

    fn insert(&mut self, e: i32, c: &DiffPoly) {
        self.tables.insert(e, DerivativeTable::new(c));
    }

    fn ensure(&mut self, e: i32, a: u32, b: u32) {
        self.tables.get_mut(&e).expect("known exponent").ensure(a, b);
    }

    fn get(&self, e: i32) -> &DerivativeTable {
        &self.tables[&e]
    }
}

/// `L = ∂_x² + 2ε⁻²u`.
pub fn lax_operator(trunc: TruncationContext) -> Result<PseudoDiffOp> {
    if !trunc.keeps_eps(-2) || !trunc.keeps_eps(0) {
        return Err(Error::InvalidWindow(format!(
            "the Lax operator needs eps exponents -2 and 0 inside the window ({trunc})"
        )));
    }
    let potential = DiffPoly::monomial(DiffMonomial::new(&[JetVar::U], -2, 0), Scalar::from_int(2), trunc);
    Ok(PseudoDiffOp::new(
        [(2, DiffPoly::one(trunc)), (0, potential)],
        None,
        trunc,
    ))
}

/// Coefficient of `∂^m` in `R∘R`, summing only the stored coefficients.
fn square_coeff(
    coeffs: &BTreeMap<i32, DiffPoly>,
    tables: &mut TableCache,
    m: i32,
    trunc: TruncationContext,
) -> DiffPoly {
    let mut plan = Vec::new();
    for (&i, f) in coeffs {
        for (&j, g) in coeffs {
            let k = i + j - m;
            if k < 0 || (i >= 0 && k > i) {
                continue;
            }
            let Some(reach) = star_reach(f, g, trunc.max_mu) else {
                continue;
            };
            let k = k as u32;
            tables.ensure(j, k, 0);
            if tables.get(j).get(k, 0).is_zero() {
                continue;
            }
            tables.ensure(i, reach, reach);
            tables.ensure(j, k + reach, reach);
            plan.push((i, j, k));
        }
    }
    let mut acc = Accumulator::new(trunc);
    for (i, j, k) in plan {
        let c = Scalar::real(gen_binomial(i, k));
        star_into(&mut acc, tables.get(i), 0, tables.get(j), k, &c);
    }
    acc.finish(false)
}

/// Square root `R = ∂ + Σ_{i<=0} a_i ∂^i` of a monic second-order operator
/// without a `∂` term, with `R∘R = L` at every order `>= depth`.
///
/// The coefficient of `∂^m` in `R∘R − L` is `2 a_{m−1}` plus terms in already
/// known coefficients, so each `a_{m−1}` is one scalar division by 2.
pub fn sqrt_lax(l: &PseudoDiffOp, depth: i32, cancel: &CancelToken) -> Result<PseudoDiffOp> {
    if depth > 1 {
        return Err(Error::InsufficientDepth(format!(
            "square root requested only down to order {depth}; need <= 1"
        )));
    }
    if l.max_order() != Some(2) || l.coeff(2) != DiffPoly::one(l.trunc) {
        return Err(Error::NotLaxOperator("leading term must be ∂²".into()));
    }
    if !l.coeff(1).is_zero() {
        return Err(Error::NotLaxOperator("∂¹ coefficient must vanish".into()));
    }
    if l.depth.is_some_and(|d| d > depth) {
        return Err(Error::InsufficientDepth(format!(
            "operator known only down to {:?}, root requested to {depth}",
            l.depth
        )));
    }
    let trunc = l.trunc;
    let half = Scalar::frac(-1, 2);
    let mut root: BTreeMap<i32, DiffPoly> = BTreeMap::new();
    root.insert(1, DiffPoly::one(trunc));
    let mut tables = TableCache::new(&root);
    for m in (depth..=1).rev() {
        cancel.check()?;
        let sq = square_coeff(&root, &mut tables, m, trunc);
        let a = sq.sub(&l.coeff(m)).scale(&half);
        if !a.is_zero() {
            tables.insert(m - 1, &a);
            root.insert(m - 1, a);
        }
    }
    Ok(PseudoDiffOp::new(root, Some(depth - 1), trunc))
}

/// `L^d ∘ L^{1/2}`, known down to `depth`.
pub fn half_power(l: &PseudoDiffOp, d: u32, depth: i32, cancel: &CancelToken) -> Result<PseudoDiffOp> {
    if d == 0 {
        return sqrt_lax(l, depth + 1, cancel);
    }
    let root = sqrt_lax(l, depth - 2 * d as i32 + 1, cancel)?;
    let mut power = l.clone();
    for _ in 1..d {
        cancel.check()?;
        power = power.compose(l)?;
    }
    cancel.check()?;
    let out = power.compose(&root)?;
    Ok(out.truncate_to(depth))
}

/// Integer power `L^n` (n >= 0) by repeated composition.
pub fn int_power(l: &PseudoDiffOp, n: u32) -> Result<PseudoDiffOp> {
    let mut acc = PseudoDiffOp::identity(l.trunc);
    for _ in 0..n {
        acc = acc.compose(l)?;
    }
    Ok(acc)
}
