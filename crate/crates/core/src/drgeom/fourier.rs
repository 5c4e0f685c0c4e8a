//! The substitution `u_{k₁,k₂} = ∂_x^{k₁} ∂_y^{k₂} Σ p^a_b e^{iay+ibx}` and
//! equality of local functionals through constant Fourier coefficients.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::exactalg::{DiffPoly, JetVar};
use crate::hierarchy::LocalFunctional;
use crate::scalar::Scalar;

/// A Fourier mode `p^a_b e^{iay+ibx}`: `a` is the y-frequency, `b` the x-frequency.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    pub a: i64,
    pub b: i64,
}

impl Mode {
    pub fn new(a: i64, b: i64) -> Self {
        Mode { a, b }
    }

    /// `b^{kx} a^{ky}`, i.e. `(ib)^{kx} (ia)^{ky}` without the power of `i`.
    fn weight(self, v: JetVar) -> Option<i128> {
        (self.b as i128)
            .checked_pow(v.kx)?
            .checked_mul((self.a as i128).checked_pow(v.ky)?)
    }

    fn weight_big(self, v: JetVar) -> BigInt {
        BigInt::from(self.b).pow(v.kx) * BigInt::from(self.a).pow(v.ky)
    }
}

/// A monomial `ε^eps μ^mu Π p^{a}_{b}` over a sorted multiset of modes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FourierKey {
    pub modes: Vec<Mode>,
    pub eps: i32,
    pub mu: u32,
}

impl FourierKey {
    pub fn frequency(&self) -> (i64, i64) {
        self.modes.iter().fold((0, 0), |(a, b), m| (a + m.a, b + m.b))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FourierPoly {
    terms: BTreeMap<FourierKey, Scalar>,
}

impl FourierPoly {
    pub fn zero() -> Self {
        FourierPoly::default()
    }

    fn add_term(&mut self, key: FourierKey, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key.clone()).or_insert_with(Scalar::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FourierKey, &Scalar)> {
        self.terms.iter()
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

    pub fn coeff(&self, key: &FourierKey) -> Scalar {
        self.terms.get(key).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = FourierPoly::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let mut modes = k1.modes.clone();
                modes.extend_from_slice(&k2.modes);
                modes.sort();
                let key = FourierKey {
                    modes,
                    eps: k1.eps + k2.eps,
                    mu: k1.mu + k2.mu,
                };
                out.add_term(key, c1 * c2);
            }
        }
        out
    }

    /// Terms of total frequency `(0, 0)`.
    pub fn constant_part(&self) -> Self {
        FourierPoly {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.frequency() == (0, 0))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(k, c)| {
                    let (re, im) = c.to_strings();
                    json!({
                        "c": [re, im],
                        "eps": k.eps,
                        "mu": k.mu,
                        "modes": k.modes.iter().map(|m| [m.a, m.b]).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    }
}

/// Expands every product of the substituted jets.
pub fn fourier_substitute(f: &DiffPoly, support: &[Mode]) -> FourierPoly {
    let mut support: Vec<Mode> = support.to_vec();
    support.sort();
    support.dedup();
    let mut out = FourierPoly::zero();
    for (m, c) in f.terms() {
        let mut acc = FourierPoly::zero();
        acc.add_term(
            FourierKey {
                modes: Vec::new(),
                eps: m.eps,
                mu: m.mu,
            },
            c.clone(),
        );
        for v in m.jet_list() {
            let mut lin = FourierPoly::zero();
            for mode in &support {
                let w = Scalar::real(BigRational::from_integer(mode.weight_big(v)));
                let k = &w * &Scalar::i_pow((v.kx + v.ky) as i64);
                lin.add_term(
                    FourierKey {
                        modes: vec![*mode],
                        eps: 0,
                        mu: 0,
                    },
                    k,
                );
            }
            acc = acc.mul(&lin);
        }
        out = out.add(&acc);
    }
    out
}

/// Jet list of a degree-`n` monomial together with its coefficients per
/// `(eps, mu)`, already multiplied by `i^{Σk}`.
type Graded = Vec<((i32, u32), Scalar)>;

struct JetGroup {
    jets: Vec<JetVar>,
    entries: Graded,
}

fn jet_groups(f: &DiffPoly, n: usize) -> Vec<JetGroup> {
    let mut map: BTreeMap<Vec<JetVar>, Graded> = BTreeMap::new();
    for (m, c) in f.terms() {
        if m.u_degree() as usize != n {
            continue;
        }
        let jets = m.jet_list();
        let k: u32 = jets.iter().map(|v| v.kx + v.ky).sum();
        let c = c * &Scalar::i_pow(k as i64);
        map.entry(jets).or_default().push(((m.eps, m.mu), c));
    }
    map.into_iter()
        .map(|(jets, entries)| JetGroup { jets, entries })
        .collect()
}

/// Permanent of the `n × n` matrix `w[i][j] = modes[j].weight(jets[i])` by
/// Ryser's formula; `None` on i128 overflow.
fn permanent_i128(jets: &[JetVar], modes: &[Mode]) -> Option<i128> {
    let n = jets.len();
    let mut total: i128 = 0;
    for s in 1u32..(1 << n) {
        let mut prod: i128 = 1;
        for v in jets {
            let mut row: i128 = 0;
            for (j, m) in modes.iter().enumerate() {
                if s & (1 << j) != 0 {
                    row = row.checked_add(m.weight(*v)?)?;
                }
            }
            prod = prod.checked_mul(row)?;
            if prod == 0 {
                break;
            }
        }
        let sign = if (n as u32 - s.count_ones()).is_multiple_of(2) {
            1
        } else {
            -1
        };
        total = total.checked_add(sign * prod)?;
    }
    Some(total)
}

fn permanent_big(jets: &[JetVar], modes: &[Mode]) -> BigInt {
    let n = jets.len();
    let mut total = BigInt::zero();
    for s in 1u32..(1 << n) {
        let mut prod = BigInt::one();
        for v in jets {
            let mut row = BigInt::zero();
            for (j, m) in modes.iter().enumerate() {
                if s & (1 << j) != 0 {
                    row += m.weight_big(*v);
                }
            }
            prod *= row;
        }
        if (n as u32 - s.count_ones()).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}

fn permanent(jets: &[JetVar], modes: &[Mode]) -> BigInt {
    match permanent_i128(jets, modes) {
        Some(p) => BigInt::from(p),
        None => permanent_big(jets, modes),
    }
}

pub(crate) fn multiset_symmetry(modes: &[Mode]) -> BigInt {
    let mut out = BigInt::one();
    let mut run = 1i64;
    for w in modes.windows(2) {
        if w[0] == w[1] {
            run += 1;
            out *= BigInt::from(run);
        } else {
            run = 1;
        }
    }
    out
}

/// Coefficient of `Π_j p^{a_j}_{b_j}` (a multiset) in the constant Fourier
/// part of `f`, keyed by `(eps, mu)`. Empty unless the modes sum to zero.
pub fn constant_coefficient(f: &DiffPoly, modes: &[Mode]) -> BTreeMap<(i32, u32), Scalar> {
    let mut modes = modes.to_vec();
    modes.sort();
    let mut out: BTreeMap<(i32, u32), Scalar> = BTreeMap::new();
    let freq = modes.iter().fold((0, 0), |(a, b), m| (a + m.a, b + m.b));
    if freq != (0, 0) || modes.is_empty() {
        return out;
    }
    let sym = BigRational::from_integer(multiset_symmetry(&modes));
    for group in jet_groups(f, modes.len()) {
        let p = permanent(&group.jets, &modes);
        if p.is_zero() {
            continue;
        }
        let w = Scalar::real(BigRational::from_integer(p) / &sym);
        for (key, c) in &group.entries {
            *out.entry(*key).or_insert_with(Scalar::zero) += &(c * &w);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Every sorted multiset of `n` modes with `|a|, |b| <= bound` and zero total frequency.
pub fn zero_sum_multisets(n: usize, bound: i64) -> Vec<Vec<Mode>> {
    let mut modes = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            modes.push(Mode::new(a, b));
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(
        modes: &[Mode],
        start: usize,
        left: usize,
        sum: (i64, i64),
        bound: i64,
        cur: &mut Vec<Mode>,
        out: &mut Vec<Vec<Mode>>,
    ) {
        if left == 0 {
            if sum == (0, 0) {
                out.push(cur.clone());
            }
            return;
        }
        let reach = bound * left as i64;
        if sum.0.abs() > reach || sum.1.abs() > reach {
            return;
        }
        for i in start..modes.len() {
            let m = modes[i];
            cur.push(m);
            rec(modes, i, left - 1, (sum.0 + m.a, sum.1 + m.b), bound, cur, out);
            cur.pop();
        }
    }
    rec(&modes, 0, n, (0, 0), bound, &mut cur, &mut out);
    out
}

/// Integer numerators of a group's coefficients over a common denominator per `(eps, mu)`.
struct IntGroup {
    jets: Vec<JetVar>,
    // (bucket, re, im)
    entries: Vec<(usize, i128, i128)>,
}

fn integer_groups(groups: &[JetGroup]) -> Option<(Vec<IntGroup>, usize)> {
    let mut dens: BTreeMap<(i32, u32), BigInt> = BTreeMap::new();
    for g in groups {
        for (k, c) in &g.entries {
            let d = dens.entry(*k).or_insert_with(BigInt::one);
            *d = d.lcm(c.re().denom()).lcm(c.im().denom());
        }
    }
    let index: BTreeMap<(i32, u32), usize> = dens.keys().enumerate().map(|(i, k)| (*k, i)).collect();
    let mut out = Vec::new();
    for g in groups {
        let mut entries = Vec::new();
        for (k, c) in &g.entries {
            let d = BigRational::from_integer(dens[k].clone());
            let re = (c.re() * &d).to_integer().to_i128()?;
            let im = (c.im() * &d).to_integer().to_i128()?;
            entries.push((index[k], re, im));
        }
        out.push(IntGroup {
            jets: g.jets.clone(),
            entries,
        });
    }
    Some((out, index.len()))
}

/// Whether all constant coefficients of `f` vanish on one multiset, using
/// machine integers when nothing overflows.
fn vanishes_on(f: &DiffPoly, groups: Option<&(Vec<IntGroup>, usize)>, modes: &[Mode]) -> bool {
    if let Some((groups, buckets)) = groups {
        let mut acc = vec![(0i128, 0i128); *buckets];
        let mut ok = true;
        'outer: for g in groups {
            let Some(p) = permanent_i128(&g.jets, modes) else {
                ok = false;
                break;
            };
            if p == 0 {
                continue;
            }
            for (b, re, im) in &g.entries {
                let (Some(x), Some(y)) = (re.checked_mul(p), im.checked_mul(p)) else {
                    ok = false;
                    break 'outer;
                };
                let slot = &mut acc[*b];
                let (Some(x), Some(y)) = (slot.0.checked_add(x), slot.1.checked_add(y)) else {
                    ok = false;
                    break 'outer;
                };
                *slot = (x, y);
            }
        }
        if ok {
            return acc.iter().all(|&(x, y)| x == 0 && y == 0);
        }
    }
    constant_coefficient(f, modes).is_empty()
}

/// Fourier modes and the nonzero `(eps, mu)` coefficients at them.
pub type Witness = (Vec<Mode>, BTreeMap<(i32, u32), Scalar>);

/// First multiset (with its nonzero coefficients) on which `F − G` has a
/// nonvanishing constant Fourier coefficient, over all zero-sum multisets
/// with `|a|, |b| <= bound` and size up to the jet degree of `F − G`.
pub fn functional_witness(f: &LocalFunctional, g: &LocalFunctional, bound: i64) -> Option<Witness> {
    let diff = f.density.sub(&g.density);
    for n in 1..=diff.u_degree() as usize {
        let groups = jet_groups(&diff, n);
        if groups.is_empty() {
            continue;
        }
        let ints = integer_groups(&groups);
        for modes in zero_sum_multisets(n, bound) {
            if !vanishes_on(&diff, ints.as_ref(), &modes) {
                let coeffs = constant_coefficient(&diff, &modes);
                return Some((modes, coeffs));
            }
        }
    }
    None
}

/// Equality of local functionals modulo `Im ∂_x ⊕ Im ∂_y ⊕ ℂ`, tested on
/// every zero-sum multiset of modes with `|a|, |b| <= bound`.
pub fn functional_equal(f: &LocalFunctional, g: &LocalFunctional, bound: i64) -> bool {
    functional_witness(f, g, bound).is_none()
}
