//! The Moyal star product on differential polynomials,
//!
//! `f * g = Σ_n Σ_{k1+k2=n} (−1)^{k2} (iεμ)^n / (2^n k1! k2!) (∂_x^{k1} ∂_y^{k2} f)(∂_x^{k2} ∂_y^{k1} g)`.
//!
//! Order `n` carries exactly `μ^n`, so the sum stops where the μ cap of the
//! combined window is reached and the result is exact through that order.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::exactalg::{dx, dy, Accumulator, DiffPoly};
use crate::scalar::Scalar;

/// Mixed partial derivatives `∂_x^a ∂_y^b f`, grown on demand and reusable
/// across many star products.
#[derive(Clone, Debug)]
pub struct DerivativeTable {
    // rows[a][b]
    rows: Vec<Vec<DiffPoly>>,
}

impl DerivativeTable {
    pub fn new(f: &DiffPoly) -> Self {
        DerivativeTable {
            rows: vec![vec![f.clone()]],
        }
    }

    /// Makes every entry with `a <= max_a`, `b <= max_b` available.
    pub fn ensure(&mut self, max_a: u32, max_b: u32) {
        let (max_a, max_b) = (max_a as usize, max_b as usize);
        while self.rows.len() <= max_a {
            let head = dx(&self.rows[self.rows.len() - 1][0]);
            self.rows.push(vec![head]);
        }
        for row in self.rows.iter_mut().take(max_a + 1) {
            while row.len() <= max_b {
                let next = dy(&row[row.len() - 1]);
                row.push(next);
            }
        }
    }

    /// Entry `(a, b)`; call `ensure` first.
    pub fn get(&self, a: u32, b: u32) -> &DiffPoly {
        &self.rows[a as usize][b as usize]
    }

    pub fn base(&self) -> &DiffPoly {
        &self.rows[0][0]
    }

    /// Entries with `a + b <= order`, each keeping only terms with
    /// `mu <= budget − (a + b)`; higher-μ terms cannot reach the cap.
    fn triangle(f: &DiffPoly, order: u32, budget: u32) -> Self {
        let keep = |p: DiffPoly, n: u32| {
            let cap = budget.saturating_sub(n);
            if p.max_mu().is_some_and(|m| m > cap) {
                p.filter(|m| m.mu <= cap)
            } else {
                p
            }
        };
        let mut rows: Vec<Vec<DiffPoly>> = Vec::with_capacity(order as usize + 1);
        let mut head = f.clone();
        for a in 0..=order {
            if a > 0 {
                head = keep(dx(&head), a);
            }
            let mut row = Vec::with_capacity((order - a) as usize + 1);
            row.push(head.clone());
            for b in 1..=order - a {
                let next = keep(dy(&row[b as usize - 1]), a + b);
                row.push(next);
            }
            rows.push(row);
        }
        DerivativeTable { rows }
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n as u64).fold(BigInt::from(1), |acc, k| acc * BigInt::from(k))
}

/// `(−1)^{k2} i^n / (2^n k1! k2!)`, `n = k1 + k2`.
pub fn moyal_coefficient(k1: u32, k2: u32) -> Scalar {
    let n = k1 + k2;
    let den = BigInt::from(2).pow(n) * factorial(k1) * factorial(k2);
    let sign = if k2.is_multiple_of(2) { 1 } else { -1 };
    let mag = Scalar::real(BigRational::new(BigInt::from(sign), den));
    &mag * &Scalar::i_pow(n as i64)
}

/// Highest Moyal order that can survive the μ cap.
fn moyal_order(f: &DiffPoly, g: &DiffPoly, max_mu: u32) -> Option<u32> {
    let used = f.min_mu()? + g.min_mu()?;
    max_mu.checked_sub(used)
}

fn star_tables(f: &DiffPoly, g: &DiffPoly, order: u32, max_mu: u32) -> (DerivativeTable, DerivativeTable) {
    let (mf, mg) = (f.min_mu().unwrap_or(0), g.min_mu().unwrap_or(0));
    (
        DerivativeTable::triangle(f, order, max_mu.saturating_sub(mg)),
        DerivativeTable::triangle(g, order, max_mu.saturating_sub(mf)),
    )
}

pub fn star(f: &DiffPoly, g: &DiffPoly) -> DiffPoly {
    let trunc = f.trunc().intersect(g.trunc());
    let mut acc = Accumulator::new(trunc);
    acc.mark_clipped(f.is_clipped() || g.is_clipped());
    let Some(order) = moyal_order(f, g, trunc.max_mu) else {
        return acc.finish(false);
    };
    let (tf, tg) = star_tables(f, g, order, trunc.max_mu);
    star_into(&mut acc, &tf, 0, &tg, 0, &Scalar::from_int(1));
    acc.finish(false)
}

/// Number of x-derivatives beyond the shift that `star_into` reads from a table.
pub(crate) fn star_reach(f: &DiffPoly, g: &DiffPoly, max_mu: u32) -> Option<u32> {
    moyal_order(f, g, max_mu)
}

/// Adds `s · (∂_x^{fx} f) * (∂_x^{gx} g)` using precomputed tables. The
/// tables must cover `a <= shift + order`, `b <= order` with `order` from
/// `star_reach` on the unshifted bases.
pub(crate) fn star_into(
    acc: &mut Accumulator,
    tf: &DerivativeTable,
    fx: u32,
    tg: &DerivativeTable,
    gx: u32,
    s: &Scalar,
) {
    let Some(order) = moyal_order(tf.base(), tg.base(), acc.max_mu()) else {
        return;
    };
    for n in 0..=order {
        for k1 in 0..=n {
            let k2 = n - k1;
            let left = tf.get(fx + k1, k2);
            let right = tg.get(gx + k2, k1);
            if left.is_zero() || right.is_zero() {
                continue;
            }
            acc.add_product(left, right, &(&moyal_coefficient(k1, k2) * s), n as i32, n);
        }
    }
}

/// `f * g − g * f`. Even Moyal orders cancel, so only odd `n` are summed.
pub fn star_commutator(f: &DiffPoly, g: &DiffPoly) -> DiffPoly {
    let trunc = f.trunc().intersect(g.trunc());
    let mut acc = Accumulator::new(trunc);
    acc.mark_clipped(f.is_clipped() || g.is_clipped());
    let Some(order) = moyal_order(f, g, trunc.max_mu) else {
        return acc.finish(false);
    };
    let (tf, tg) = star_tables(f, g, order, trunc.max_mu);
    let two = Scalar::from_int(2);
    for n in (1..=order).step_by(2) {
        for k1 in 0..=n {
            let k2 = n - k1;
            let left = tf.get(k1, k2);
            let right = tg.get(k2, k1);
            if left.is_zero() || right.is_zero() {
                continue;
            }
            acc.add_product(left, right, &(&moyal_coefficient(k1, k2) * &two), n as i32, n);
        }
    }
    acc.finish(false)
}

/// Left-associated `f * f * ... * f`; `n = 0` gives 1.
pub fn star_power(f: &DiffPoly, n: u32) -> DiffPoly {
    let mut acc = DiffPoly::one(*f.trunc());
    for _ in 0..n {
        acc = star(&acc, f);
    }
    acc
}
