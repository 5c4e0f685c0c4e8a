//! Closed formulas for `∫ λ_g DR_g(a) DR_g(b)` on M̄_{g,3}, the recursion
//! behind them, and the vanishing rules for `∫ λ_g Θ^k DR_g`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::{DiffMonomial, DiffPoly, JetVar, TruncationContext};
use crate::scalar::Scalar;

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(big(n), big(d))
}

fn factorial(n: u32) -> BigInt {
    (1..=n as i64).fold(BigInt::one(), |acc, k| acc * big(k))
}

fn odd_double_factorial(g: u32) -> BigInt {
    (0..=g as i64).fold(BigInt::one(), |acc, j| acc * big(2 * j + 1))
}

fn det(a1: i64, a2: i64, b1: i64, b2: i64) -> BigInt {
    big(a1) * big(b2) - big(a2) * big(b1)
}

/// `(a₁b₂ − a₂b₁)^{2g} / (2^{3g} g! (2g+1)!!)`.
pub fn quadratic_dr_integral(g: u32, a1: i64, a2: i64, b1: i64, b2: i64) -> BigRational {
    let num = det(a1, a2, b1, b2).pow(2 * g);
    let den = BigInt::from(2).pow(3 * g) * factorial(g) * odd_double_factorial(g);
    BigRational::new(num, den)
}

/// `f_g = (a₁b₂ − a₂b₁)² / (8(2g+1)) · f_{g−1}`, `f₀ = 1`.
pub fn theta_normalized_recursive(g: u32, a1: i64, a2: i64, b1: i64, b2: i64) -> BigRational {
    let d2 = BigRational::from_integer(det(a1, a2, b1, b2).pow(2));
    let mut f = BigRational::one();
    for h in 1..=g as i64 {
        f = f * &d2 / BigRational::from_integer(big(8 * (2 * h + 1)));
    }
    f
}

fn check_triple(v: &[i64; 3], name: &str) -> Result<()> {
    if v.iter().sum::<i64>() != 0 {
        return Err(Error::Ramification(format!(
            "{name} = {v:?} does not sum to zero"
        )));
    }
    Ok(())
}

fn check_genus(g: u32) -> Result<()> {
    if g == 0 {
        return Err(Error::Ramification("genus must be at least 1".into()));
    }
    Ok(())
}

/// `∫ λ_g ψ_i Θ(a)^{g−1} DR_g(b) = ((2g+1)b_i² − 6b_jb_k) / (24(2g+1)) · f_{g−1}`, `i ∈ {1,2,3}`.
pub fn theta_dr_psi_integral(g: u32, i: usize, a: &[i64; 3], b: &[i64; 3]) -> Result<BigRational> {
    check_genus(g)?;
    check_triple(a, "a")?;
    check_triple(b, "b")?;
    if !(1..=3).contains(&i) {
        return Err(Error::Ramification(format!("marked point {i} outside 1..=3")));
    }
    let (j, k) = match i {
        1 => (2, 3),
        2 => (1, 3),
        _ => (1, 2),
    };
    let (bi, bj, bk) = (b[i - 1], b[j - 1], b[k - 1]);
    let two_g1 = 2 * g as i64 + 1;
    let num = big(two_g1) * big(bi) * big(bi) - big(6) * big(bj) * big(bk);
    let f_prev = theta_normalized_recursive(g - 1, a[0], a[1], b[0], b[1]);
    Ok(BigRational::new(num, big(24 * two_g1)) * f_prev)
}

/// `f_{g−1} · Σ a_i² b_i² / 24`.
pub fn theta_dr_boundary_term(g: u32, a: &[i64; 3], b: &[i64; 3]) -> Result<BigRational> {
    check_genus(g)?;
    check_triple(a, "a")?;
    check_triple(b, "b")?;
    let s: BigInt = a
        .iter()
        .zip(b)
        .map(|(x, y)| big(*x).pow(2) * big(*y).pow(2))
        .sum();
    let f_prev = theta_normalized_recursive(g - 1, a[0], a[1], b[0], b[1]);
    Ok(BigRational::new(s, big(24)) * f_prev)
}

/// `½(Σ a_i²·ψ-term_i − boundary) − f_g`, which vanishes identically.
pub fn proof_consistency_residual(g: u32, a: &[i64; 3], b: &[i64; 3]) -> Result<BigRational> {
    let mut psi_sum = BigRational::zero();
    for i in 1..=3 {
        let ai = BigRational::from_integer(big(a[i - 1]).pow(2));
        psi_sum += ai * theta_dr_psi_integral(g, i, a, b)?;
    }
    let lhs = (psi_sum - theta_dr_boundary_term(g, a, b)?) * rat(1, 2);
    Ok(lhs - theta_normalized_recursive(g, a[0], a[1], b[0], b[1]))
}

/// Genus and ramification vectors `a`, `b` of equal length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamificationData {
    pub genus: u32,
    pub a: Vec<i64>,
    pub b: Vec<i64>,
}

impl RamificationData {
    pub fn new(genus: u32, a: Vec<i64>, b: Vec<i64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Ramification(format!(
                "a has {} entries, b has {}",
                a.len(),
                b.len()
            )));
        }
        Ok(RamificationData { genus, a, b })
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn check_balanced(&self) -> Result<()> {
        if self.a.iter().sum::<i64>() != 0 || self.b.iter().sum::<i64>() != 0 {
            return Err(Error::Ramification(format!(
                "a = {:?}, b = {:?} must each sum to zero",
                self.a, self.b
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThetaValue {
    Value(BigRational),
    Vanishes,
    /// Needs data the caller did not supply (the `a` vector for n = 3).
    NotDetermined(String),
}

impl ThetaValue {
    /// Numeric value, with vanishing read as 0.
    pub fn number(&self) -> Option<BigRational> {
        match self {
            ThetaValue::Value(v) => Some(v.clone()),
            ThetaValue::Vanishes => Some(BigRational::zero()),
            ThetaValue::NotDetermined(_) => None,
        }
    }
}

/// `∫_{M̄_{g,n}} λ_g Θ(a)^k DR_g(b)`.
///
/// Degree count forces `k = g − 3 + n`, and `λ_g Θ^{g+1} = 0` forces `k <= g`,
/// so only `n = 3, k = g` (value `f_g`) and `n = 2, k = 0, g = 1`
/// (value `b₁²/24`) survive. For `n = 2` and `g >= 2` both classes are
/// multiples of `Θ(1,−1)` and the power exceeds `g`; for `n = 1` the class
/// `Θ(0)` is zero.
pub fn theta_power_dr_value(g: u32, n: usize, k: u32, a: Option<&[i64]>, b: &[i64]) -> Result<ThetaValue> {
    if b.len() != n {
        return Err(Error::Ramification(format!(
            "n = {n} but b has {} entries",
            b.len()
        )));
    }
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(Error::Unstable(g, n));
    }
    if b.iter().sum::<i64>() != 0 {
        return Err(Error::Ramification(format!("b = {b:?} does not sum to zero")));
    }
    if let Some(a) = a {
        if a.len() != n || a.iter().sum::<i64>() != 0 {
            return Err(Error::Ramification(format!(
                "a = {a:?} must have {n} entries summing to zero"
            )));
        }
    }
    if k as i64 != g as i64 - 3 + n as i64 || k > g {
        return Ok(ThetaValue::Vanishes);
    }
    match n {
        3 => match a {
            Some(a) => Ok(ThetaValue::Value(theta_normalized_recursive(
                g, a[0], a[1], b[0], b[1],
            ))),
            None => Ok(ThetaValue::NotDetermined("n = 3 needs the a vector".into())),
        },
        2 if g == 1 => Ok(ThetaValue::Value(BigRational::new(big(b[0]).pow(2), big(24)))),
        _ => Ok(ThetaValue::Vanishes),
    }
}

/// `2g − 2 + n`: pulling `ψ₁` back along the forgetful map of a point with `a = b = 0`.
pub fn psi_pullback_factor(g: u32, n: usize) -> Result<i64> {
    let v = 2 * g as i64 - 2 + n as i64;
    if v <= 0 {
        return Err(Error::Unstable(g, n));
    }
    Ok(v)
}

/// `Σ_{g<=G} Σ_{k₁+k₂=2g} (−1)^{k₂} (−ε²μ²)^g / (2^{2g} k₁! k₂!) · u_{k₁,k₂} u_{k₂,k₁}`.
pub fn step1_series(gmax: u32, trunc: TruncationContext) -> DiffPoly {
    let mut terms = Vec::new();
    for g in 0..=gmax {
        for k1 in 0..=2 * g {
            let k2 = 2 * g - k1;
            let sign = if (k2 + g) % 2 == 0 { 1 } else { -1 };
            let den = BigInt::from(2).pow(2 * g) * factorial(k1) * factorial(k2);
            let c = Scalar::real(BigRational::new(big(sign), den));
            let m = DiffMonomial::new(&[JetVar::new(k1, k2), JetVar::new(k2, k1)], 2 * g as i32, 2 * g);
            terms.push((m, c));
        }
    }
    DiffPoly::from_terms(terms, trunc)
}

/// One row of the quadratic DR table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub g: u32,
    pub a1: i64,
    pub a2: i64,
    pub b1: i64,
    pub b2: i64,
    pub value: String,
}

/// All `g <= gmax`, `|a_i| <= amax`, `|b_i| <= bmax`, in lexicographic order.
pub fn quadratic_table(gmax: u32, amax: i64, bmax: i64) -> Vec<TableRow> {
    let mut rows = Vec::new();
    for g in 0..=gmax {
        for a1 in -amax..=amax {
            for a2 in -amax..=amax {
                for b1 in -bmax..=bmax {
                    for b2 in -bmax..=bmax {
                        let v = quadratic_dr_integral(g, a1, a2, b1, b2);
                        rows.push(TableRow {
                            g,
                            a1,
                            a2,
                            b1,
                            b2,
                            value: v.to_string(),
                        });
                    }
                }
            }
        }
    }
    rows
}
