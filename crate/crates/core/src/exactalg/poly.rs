use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::monomial::{DiffMonomial, JetVar};
use super::truncation::TruncationContext;
use crate::scalar::Scalar;

/// Sparse differential polynomial in `u_{*,*}`, `ε^{±1}`, `μ` over the Gaussian rationals.
///
/// Terms are kept in canonical monomial order with no zero coefficients.
/// Every value carries the window it was computed in; `clipped` records
/// that the ε window discarded at least one nonzero term somewhere in its
/// history. Equality compares terms only.
#[derive(Clone, Debug)]
pub struct DiffPoly {
    terms: BTreeMap<DiffMonomial, Scalar>,
    trunc: TruncationContext,
    clipped: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bidegree {
    Zero,
    Homogeneous(i64, i64),
    Inhomogeneous,
}

impl Bidegree {
    pub fn pair(self) -> Option<(i64, i64)> {
        match self {
            Bidegree::Homogeneous(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

impl PartialEq for DiffPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for DiffPoly {}

impl DiffPoly {
    pub fn zero(trunc: TruncationContext) -> Self {
        DiffPoly {
            terms: BTreeMap::new(),
            trunc,
            clipped: false,
        }
    }

    pub fn constant(c: Scalar, trunc: TruncationContext) -> Self {
        Self::from_terms([(DiffMonomial::one(), c)], trunc)
    }

    pub fn one(trunc: TruncationContext) -> Self {
        Self::constant(Scalar::one(), trunc)
    }

    pub fn u(trunc: TruncationContext) -> Self {
        Self::jet(0, 0, trunc)
    }

    pub fn jet(kx: u32, ky: u32, trunc: TruncationContext) -> Self {
        Self::monomial(
            DiffMonomial::new(&[JetVar::new(kx, ky)], 0, 0),
            Scalar::one(),
            trunc,
        )
    }

    pub fn monomial(m: DiffMonomial, c: Scalar, trunc: TruncationContext) -> Self {
        Self::from_terms([(m, c)], trunc)
    }

    /// Sums repeated monomials, drops zeros and anything outside `trunc`.
    pub fn from_terms<I>(terms: I, trunc: TruncationContext) -> Self
    where
        I: IntoIterator<Item = (DiffMonomial, Scalar)>,
    {
        let mut acc = Accumulator::new(trunc);
        for (m, c) in terms {
            acc.add(m, c);
        }
        acc.finish(false)
    }

    pub fn trunc(&self) -> &TruncationContext {
        &self.trunc
    }

    pub fn is_clipped(&self) -> bool {
        self.clipped
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DiffMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &DiffMonomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Re-truncates into a (normally narrower) window.
    pub fn with_trunc(&self, trunc: TruncationContext) -> Self {
        let mut acc = Accumulator::new(trunc);
        for (m, c) in &self.terms {
            acc.add(m.clone(), c.clone());
        }
        acc.finish(self.clipped)
    }

    pub fn add(&self, other: &Self) -> Self {
        let trunc = self.trunc.intersect(&other.trunc);
        let mut acc = Accumulator::new(trunc);
        for (m, c) in self.terms.iter().chain(other.terms.iter()) {
            acc.add(m.clone(), c.clone());
        }
        acc.finish(self.clipped || other.clipped)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        DiffPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
            trunc: self.trunc,
            clipped: self.clipped,
        }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return DiffPoly::zero(self.trunc);
        }
        DiffPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
            trunc: self.trunc,
            clipped: self.clipped,
        }
    }

    /// Commutative product under the intersected window.
    pub fn mul(&self, other: &Self) -> Self {
        let trunc = self.trunc.intersect(&other.trunc);
        let mut acc = Accumulator::new(trunc);
        acc.add_product(self, other, &Scalar::one(), 0, 0);
        acc.finish(self.clipped || other.clipped)
    }

    /// Multiplication by `ε^de μ^dm` inside the current window.
    pub fn shift(&self, de: i32, dm: u32) -> Self {
        self.shift_into(de, dm, self.trunc)
    }

    /// Multiplication by `ε^de` with the ε window moved along, so no term
    /// can be lost. Used for overall normalizations.
    pub fn rescale_eps(&self, de: i32) -> Self {
        self.shift_into(de, 0, self.trunc.shift_eps(de))
    }

    fn shift_into(&self, de: i32, dm: u32, trunc: TruncationContext) -> Self {
        let mut acc = Accumulator::new(trunc);
        for (m, c) in &self.terms {
            acc.add(m.with_exponents(m.eps + de, m.mu + dm), c.clone());
        }
        acc.finish(self.clipped)
    }

    pub fn bidegree(&self) -> Bidegree {
        let mut it = self.terms.keys().map(|m| m.bidegree());
        let Some(first) = it.next() else {
            return Bidegree::Zero;
        };
        if it.all(|d| d == first) {
            Bidegree::Homogeneous(first.0, first.1)
        } else {
            Bidegree::Inhomogeneous
        }
    }

    /// Terms whose monomial satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&DiffMonomial) -> bool) -> Self {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
            trunc: self.trunc,
            clipped: self.clipped,
        }
    }

    /// The `ε^e` slice, with ε still attached.
    pub fn eps_part(&self, e: i32) -> Self {
        self.filter(|m| m.eps == e)
    }

    pub fn mu_part(&self, mu: u32) -> Self {
        self.filter(|m| m.mu == mu)
    }

    pub fn min_eps(&self) -> Option<i32> {
        self.terms.keys().map(|m| m.eps).min()
    }

    pub fn max_mu(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.mu).max()
    }

    pub fn min_mu(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.mu).min()
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(Scalar::is_real)
    }

    /// Highest polynomial degree in the jets.
    pub fn u_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.u_degree()).max().unwrap_or(0)
    }

    pub fn constant_term(&self) -> Scalar {
        self.terms
            .iter()
            .filter(|(m, _)| m.is_constant())
            .fold(Scalar::zero(), |acc, (_, c)| acc + c)
    }
}

/// Term accumulator enforcing a truncation window.
pub(crate) struct Accumulator {
    trunc: TruncationContext,
    terms: BTreeMap<DiffMonomial, Scalar>,
    clipped: bool,
}

impl Accumulator {
    pub(crate) fn new(trunc: TruncationContext) -> Self {
        Accumulator {
            trunc,
            terms: BTreeMap::new(),
            clipped: false,
        }
    }

    pub(crate) fn add(&mut self, m: DiffMonomial, c: Scalar) {
        if c.is_zero() || !self.trunc.keeps_mu(m.mu) {
            return;
        }
        if !self.trunc.keeps_eps(m.eps) {
            self.clipped = true;
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
            }
        }
    }

    /// Adds `s · ε^de μ^dm · f · g`.
    pub(crate) fn add_product(&mut self, f: &DiffPoly, g: &DiffPoly, s: &Scalar, de: i32, dm: u32) {
        if s.is_zero() {
            return;
        }
        let unit = s.is_one();
        for (mf, cf) in &f.terms {
            if mf.mu + dm > self.trunc.max_mu {
                continue;
            }
            let cfs = if unit { cf.clone() } else { cf * s };
            for (mg, cg) in &g.terms {
                if mf.mu + mg.mu + dm > self.trunc.max_mu {
                    continue;
                }
                let mut m = mf.mul(mg);
                m.eps += de;
                m.mu += dm;
                self.add(m, &cfs * cg);
            }
        }
    }

    pub(crate) fn add_poly(&mut self, f: &DiffPoly, s: &Scalar) {
        for (m, c) in &f.terms {
            self.add(m.clone(), c * s);
        }
        self.clipped |= f.clipped;
    }

    pub(crate) fn max_mu(&self) -> u32 {
        self.trunc.max_mu
    }

    pub(crate) fn mark_clipped(&mut self, clipped: bool) {
        self.clipped |= clipped;
    }

    pub(crate) fn finish(mut self, clipped: bool) -> DiffPoly {
        self.terms.retain(|_, c| !c.is_zero());
        DiffPoly {
            terms: self.terms,
            trunc: self.trunc,
            clipped: self.clipped || clipped,
        }
    }
}

impl<'a> Add<&'a DiffPoly> for &'a DiffPoly {
    type Output = DiffPoly;
    fn add(self, o: &DiffPoly) -> DiffPoly {
        DiffPoly::add(self, o)
    }
}

impl<'a> Sub<&'a DiffPoly> for &'a DiffPoly {
    type Output = DiffPoly;
    fn sub(self, o: &DiffPoly) -> DiffPoly {
        DiffPoly::sub(self, o)
    }
}

impl<'a> Mul<&'a DiffPoly> for &'a DiffPoly {
    type Output = DiffPoly;
    fn mul(self, o: &DiffPoly) -> DiffPoly {
        DiffPoly::mul(self, o)
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly::neg(self)
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let negative = c.im().is_zero() && c.re().is_negative();
            let c = if negative { -c } else { c.clone() };
            match (first, negative) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            if m.is_constant() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{c}·{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> TruncationContext {
        TruncationContext::new(4, -4, Some(4)).unwrap()
    }

    fn ux() -> DiffPoly {
        DiffPoly::jet(1, 0, t())
    }

    #[test]
    fn additive_identity_and_inverse() {
        let u = DiffPoly::u(t());
        assert_eq!(u.add(&DiffPoly::zero(t())), u);
        let z = u.add(&u.scale(&Scalar::from_int(-1)));
        assert!(z.is_zero());
        assert_eq!(z.len(), 0);
    }

    #[test]
    fn cancellation_leaves_remainder() {
        let u = DiffPoly::u(t());
        let u2 = u.mul(&u);
        let f = u2.add(&ux().shift(1, 0));
        let g = f.add(&u2.neg());
        assert_eq!(g, ux().shift(1, 0));
    }

    #[test]
    fn product_adds_exponents() {
        let u = DiffPoly::u(t());
        assert_eq!(
            u.mul(&u),
            DiffPoly::monomial(
                DiffMonomial::new(&[JetVar::U, JetVar::U], 0, 0),
                Scalar::one(),
                t()
            )
        );
        let a = u.shift(-2, 0);
        let b = ux().shift(2, 0);
        let p = a.mul(&b);
        let (m, _) = p.terms().next().unwrap();
        assert_eq!(m.eps, 0);
        assert_eq!(m, &DiffMonomial::new(&[JetVar::U, JetVar::new(1, 0)], 0, 0));
    }

    #[test]
    fn bidegree_cases() {
        assert_eq!(DiffPoly::u(t()).bidegree(), Bidegree::Homogeneous(0, 0));
        assert_eq!(
            DiffPoly::jet(3, 0, t()).shift(2, 0).bidegree(),
            Bidegree::Homogeneous(1, 0)
        );
        assert_eq!(DiffPoly::u(t()).add(&ux()).bidegree(), Bidegree::Inhomogeneous);
        assert_eq!(DiffPoly::zero(t()).bidegree(), Bidegree::Zero);
    }

    #[test]
    fn mu_cap_truncates_silently_eps_window_flags() {
        let tr = TruncationContext::new(1, -2, Some(2)).unwrap();
        let m = DiffPoly::u(tr).shift(0, 1);
        assert!(m.mul(&m).is_zero());
        assert!(!m.mul(&m).is_clipped());
        let e = DiffPoly::u(tr).shift(2, 0);
        let sq = e.mul(&e);
        assert!(sq.is_zero());
        assert!(sq.is_clipped());
    }

    #[test]
    fn windows_intersect_on_combination() {
        let a = DiffPoly::u(TruncationContext::new(6, -8, None).unwrap());
        let b = DiffPoly::u(TruncationContext::new(2, -2, Some(3)).unwrap());
        assert_eq!(
            *a.add(&b).trunc(),
            TruncationContext::new(2, -2, Some(3)).unwrap()
        );
    }
}
