//! Reading `∫_{DR_g(0,b)} λ_g ψ₁^d Θ(0,a)^k` off the DR Hamiltonian densities.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::fourier::{constant_coefficient, multiset_symmetry, Mode};
use crate::cancel::CancelToken;
use crate::error::{Error, Result};
use crate::exactalg::TruncationContext;
use crate::hierarchy::{flow_rhs_with, inverse_dx, reconstruct_density, LocalFunctional, FLOW_DEPTH};

/// Whether an extracted number has an independent geometric derivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtractionSource {
    /// d = 1 (and d = 0): fixed by the intersection-number computations.
    Determined,
    /// d >= 2: follows from identifying the DR flows with the Lax flows.
    Prediction,
}

impl ExtractionSource {
    pub fn for_flow(d: u32) -> Self {
        if d <= 1 {
            ExtractionSource::Determined
        } else {
            ExtractionSource::Prediction
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ExtractionSource::Determined => "determined",
            ExtractionSource::Prediction => "prediction",
        }
    }
}

/// `ḡ_d` with `∂_x(δḡ_d/δu) = ∂u/∂t_d`.
pub fn hamiltonian_density(
    d: u32,
    trunc: TruncationContext,
    cancel: &CancelToken,
) -> Result<LocalFunctional> {
    let flow = flow_rhs_with(d, trunc, FLOW_DEPTH, cancel)?;
    cancel.check()?;
    reconstruct_density(&inverse_dx(&flow)?)
}

/// `(−1)^g · k! · |Aut| · [ε^{2g} μ^{2k} Π_j p^{a_j}_{b_j}]` of the constant
/// Fourier part of the density of `ḡ_d`.
///
/// The densities are `Σ (−ε²)^g/n! Σ_{ordered} (∫ λ_g ψ₁^d e^{μ²Θ} DR_g) Π p`;
/// the ordered sum hits a multiset `n!/|Aut|` times and `e^{μ²Θ}` contributes
/// `μ^{2k} Θ^k / k!`.
pub fn extract_intersection_numbers(
    density: &LocalFunctional,
    d: u32,
    g: u32,
    k: u32,
    a: &[i64],
    b: &[i64],
) -> Result<(BigRational, ExtractionSource)> {
    if a.len() != b.len() || b.is_empty() {
        return Err(Error::Ramification(format!(
            "a = {a:?} and b = {b:?} must be nonempty and of equal length"
        )));
    }
    if a.iter().sum::<i64>() != 0 || b.iter().sum::<i64>() != 0 {
        return Err(Error::Ramification(format!(
            "a = {a:?}, b = {b:?} must each sum to zero"
        )));
    }
    if density.density.trunc().max_mu < 2 * k {
        return Err(Error::InvalidWindow(format!(
            "μ cap {} below μ^{}",
            density.density.trunc().max_mu,
            2 * k
        )));
    }
    let mut modes: Vec<Mode> = a.iter().zip(b).map(|(x, y)| Mode::new(*x, *y)).collect();
    modes.sort();
    let coeffs = constant_coefficient(&density.density, &modes);
    let Some(c) = coeffs.get(&(2 * g as i32, 2 * k)) else {
        return Ok((BigRational::zero(), ExtractionSource::for_flow(d)));
    };
    if !c.is_real() {
        return Err(Error::Consistency(format!(
            "non-real coefficient {c} for modes {modes:?}"
        )));
    }
    let kfact: BigInt = (1..=k as i64).fold(BigInt::one(), |acc, j| acc * BigInt::from(j));
    let sign = if g.is_multiple_of(2) { 1 } else { -1 };
    let scale = BigRational::from_integer(kfact * multiset_symmetry(&modes) * BigInt::from(sign));
    Ok((c.re() * &scale, ExtractionSource::for_flow(d)))
}
