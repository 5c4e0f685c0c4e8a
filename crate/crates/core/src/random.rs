//! Seeded generators of random differential polynomials for property suites.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactalg::{variational_derivative, DiffMonomial, DiffPoly, JetVar, TruncationContext};
use crate::scalar::Scalar;

/// Deterministic generator for a given seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of generated polynomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolyShape {
    /// Largest `kx + ky` of any jet.
    pub max_jet_order: u32,
    /// Degree range in `u` (inclusive).
    pub min_u_degree: u32,
    pub max_u_degree: u32,
    /// Upper bound on the number of generated terms before merging.
    pub max_terms: usize,
    /// Numerators and denominators are drawn from `1..=coeff_bound` (with sign).
    pub coeff_bound: i64,
    /// Allow nonzero imaginary parts.
    pub complex: bool,
}

impl Default for PolyShape {
    fn default() -> Self {
        PolyShape {
            max_jet_order: 3,
            min_u_degree: 1,
            max_u_degree: 3,
            max_terms: 4,
            coeff_bound: 5,
            complex: true,
        }
    }
}

fn random_rational<R: Rng>(rng: &mut R, bound: i64) -> BigRational {
    let num = rng.gen_range(-bound..=bound);
    let den = rng.gen_range(1..=bound);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn random_scalar<R: Rng>(rng: &mut R, shape: &PolyShape) -> Scalar {
    loop {
        let re = random_rational(rng, shape.coeff_bound);
        let im = if shape.complex && rng.gen_bool(0.5) {
            random_rational(rng, shape.coeff_bound)
        } else {
            BigRational::from_integer(BigInt::from(0))
        };
        let s = Scalar::new(re, im);
        if !s.is_zero() {
            return s;
        }
    }
}

fn random_jets<R: Rng>(rng: &mut R, shape: &PolyShape) -> Vec<JetVar> {
    let deg = rng.gen_range(shape.min_u_degree..=shape.max_u_degree);
    (0..deg)
        .map(|_| {
            let order = rng.gen_range(0..=shape.max_jet_order);
            let kx = rng.gen_range(0..=order);
            JetVar::new(kx, order - kx)
        })
        .collect()
}

/// Random polynomial with `ε^eps μ^mu` factors drawn from the window
/// `0 <= eps <= max_eps`, `0 <= mu <= trunc.max_mu`.
pub fn random_poly<R: Rng>(
    rng: &mut R,
    shape: &PolyShape,
    max_eps: i32,
    trunc: TruncationContext,
) -> DiffPoly {
    let n = rng.gen_range(1..=shape.max_terms.max(1));
    let terms = (0..n).map(|_| {
        let jets = random_jets(rng, shape);
        let eps = rng.gen_range(0..=max_eps.max(0));
        let mu = rng.gen_range(0..=trunc.max_mu);
        (DiffMonomial::new(&jets, eps, mu), random_scalar(rng, shape))
    });
    let terms: Vec<_> = terms.collect();
    DiffPoly::from_terms(terms, trunc)
}

/// Random polynomial homogeneous of bidegree `(p, q)`: every monomial has
/// `Σkx − eps = p` and `Σky − mu = q`. Monomials whose μ exponent would be
/// negative or above the cap are redrawn; gives up with zero after many misses.
pub fn random_homogeneous<R: Rng>(
    rng: &mut R,
    shape: &PolyShape,
    bidegree: (i64, i64),
    trunc: TruncationContext,
) -> DiffPoly {
    let n = rng.gen_range(1..=shape.max_terms.max(1));
    let mut terms = Vec::with_capacity(n);
    let mut misses = 0;
    while terms.len() < n && misses < 1000 {
        let jets = random_jets(rng, shape);
        let sx: i64 = jets.iter().map(|j| j.kx as i64).sum();
        let sy: i64 = jets.iter().map(|j| j.ky as i64).sum();
        let eps = sx - bidegree.0;
        let mu = sy - bidegree.1;
        if mu < 0 || mu > trunc.max_mu as i64 || !trunc.keeps_eps(eps as i32) {
            misses += 1;
            continue;
        }
        terms.push((
            DiffMonomial::new(&jets, eps as i32, mu as u32),
            random_scalar(rng, shape),
        ));
    }
    DiffPoly::from_terms(terms, trunc)
}

/// Variational derivative of a random density: a gradient by construction.
/// Returns `(density, gradient)`; the gradient is nonzero.
pub fn random_exact_gradient<R: Rng>(
    rng: &mut R,
    shape: &PolyShape,
    trunc: TruncationContext,
) -> (DiffPoly, DiffPoly) {
    loop {
        let density = random_poly(rng, shape, 2, trunc);
        let grad = variational_derivative(&density);
        if !grad.is_zero() {
            return (density, grad);
        }
    }
}
